"""Lattice points and difference quotients on the reference tetrahedra.

For the order-k refinement of a reference tetrahedron (unit right-corner
Type 1 or its sheared Type 2 companion) the interpolation nodes form an
integer lattice X^k: a 3D integer point g = (i, j, l) corresponds to a
barycentric multi-index gamma with |gamma| = k, and the physical node is
g/k.  A direction multi-index delta selects a box of lattice points
(g + eta for eta <= delta), and the difference quotient

    DQ^delta f(x_g) = k^|delta| * sum_{eta <= delta}
        (-1)^{|delta| - |eta|} / (eta! (delta - eta)!) * f(x_{g + eta})

approximates d^delta f / delta!.  The quotient equals an iterated integral
of d^delta f over one ordered simplex per axis, which is what makes the
calculus exact for polynomials and summable over boxes.

Coefficients are kept as exact fractions; floats enter only when values of
f do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
from scipy.special import roots_legendre

from .errors import MissingNodeValue
from .geom import TYPE1, TYPE2

LatticePoint = tuple[int, int, int]
MultiIndex = tuple[int, int, int]
Barycentric = tuple[int, int, int, int]


def sigma_k(k: int) -> list[Barycentric]:
    """All barycentric multi-indices gamma >= 0 with |gamma| = k."""
    if k < 0:
        raise ValueError("k must be >= 0, got %r" % (k,))
    out = []
    for g2 in range(k + 1):
        for g3 in range(k + 1 - g2):
            for g4 in range(k + 1 - g2 - g3):
                out.append((k - g2 - g3 - g4, g2, g3, g4))
    return out


def in_lattice(point: LatticePoint, k: int, kind: int) -> bool:
    """Membership of an integer point in X^k of the given reference kind."""
    i, j, l = point
    if kind == TYPE1:
        return i >= 0 and j >= 0 and l >= 0 and i + j + l <= k
    if kind == TYPE2:
        return l >= 0 and 0 <= j <= i and i + l <= k
    raise ValueError("kind must be TYPE1 or TYPE2, got %r" % (kind,))


def lattice_points(k: int, kind: int) -> list[LatticePoint]:
    """X^k in lexicographic order; exactly C(k+3, 3) points for both kinds."""
    pts = []
    if kind == TYPE1:
        for i in range(k + 1):
            for j in range(k + 1 - i):
                for l in range(k + 1 - i - j):
                    pts.append((i, j, l))
    elif kind == TYPE2:
        for i in range(k + 1):
            for j in range(i + 1):
                for l in range(k + 1 - i):
                    pts.append((i, j, l))
    else:
        raise ValueError("kind must be TYPE1 or TYPE2, got %r" % (kind,))
    return pts


def lattice_to_gamma(point: LatticePoint, k: int, kind: int) -> Barycentric:
    """Barycentric multi-index of a lattice point."""
    i, j, l = point
    if kind == TYPE1:
        gamma = (k - i - j - l, i, j, l)
    elif kind == TYPE2:
        gamma = (k - i - l, i - j, j, l)
    else:
        raise ValueError("kind must be TYPE1 or TYPE2, got %r" % (kind,))
    if min(gamma) < 0:
        raise ValueError("point %r not in X^%d of kind %d" % (point, k, kind))
    return gamma


def gamma_to_lattice(gamma: Barycentric, kind: int) -> LatticePoint:
    """Inverse of lattice_to_gamma; k is implicit in |gamma|."""
    _, g2, g3, g4 = gamma
    if kind == TYPE1:
        return (g2, g3, g4)
    if kind == TYPE2:
        return (g2 + g3, g3, g4)
    raise ValueError("kind must be TYPE1 or TYPE2, got %r" % (kind,))


def nodes_on(vertices, k: int) -> tuple[list[Barycentric], np.ndarray]:
    """Barycentric multi-indices and node coordinates on a tetrahedron.

    vertices is a (4, 3) array-like; the node of gamma is
    sum_i gamma_i * v_i / k.  For k = 0 the single node is the centroid.
    """
    verts = np.asarray(vertices, dtype=float)
    gammas = sigma_k(k)
    if k == 0:
        return gammas, verts.mean(axis=0)[None, :]
    weights = np.array(gammas, dtype=float) / k
    return gammas, weights @ verts


@dataclass(frozen=True)
class Box:
    """The lattice box with corners base + eta, 0 <= eta <= delta."""

    base: LatticePoint
    delta: MultiIndex

    def corners(self) -> list[LatticePoint]:
        b, d = self.base, self.delta
        return [
            (b[0] + e0, b[1] + e1, b[2] + e2)
            for e0 in range(d[0] + 1)
            for e1 in range(d[1] + 1)
            for e2 in range(d[2] + 1)
        ]


def enumerate_boxes(k: int, delta: MultiIndex, kind: int) -> list[Box]:
    """All boxes of direction delta fully contained in X^k.

    The count is C(k - |delta| + 3, 3) for both reference kinds.
    """
    if min(delta) < 0 or sum(delta) == 0:
        raise ValueError("delta must be nonnegative and nonzero, got %r" % (delta,))
    boxes = []
    for base in lattice_points(k, kind):
        if all(in_lattice(c, k, kind) for c in Box(base, delta).corners()):
            boxes.append(Box(base, delta))
    return boxes


def quotient_coefficients(delta: MultiIndex) -> list[tuple[MultiIndex, Fraction]]:
    """Exact coefficients (-1)^{|delta - eta|} / (eta! (delta - eta)!)."""
    coeffs = []
    d0, d1, d2 = delta
    for e0 in range(d0 + 1):
        for e1 in range(d1 + 1):
            for e2 in range(d2 + 1):
                sign = -1 if (d0 - e0 + d1 - e1 + d2 - e2) % 2 else 1
                denom = (
                    math.factorial(e0)
                    * math.factorial(e1)
                    * math.factorial(e2)
                    * math.factorial(d0 - e0)
                    * math.factorial(d1 - e1)
                    * math.factorial(d2 - e2)
                )
                coeffs.append(((e0, e1, e2), Fraction(sign, denom)))
    return coeffs


def difference_quotient(
    values: Mapping[LatticePoint, float],
    base: LatticePoint,
    delta: MultiIndex,
    k: int,
) -> float:
    """The quotient at a box from node values keyed by lattice point.

    Raises MissingNodeValue when a corner of the box has no value.
    """
    total = 0.0
    for eta, coeff in quotient_coefficients(delta):
        p = (base[0] + eta[0], base[1] + eta[1], base[2] + eta[2])
        if p not in values:
            raise MissingNodeValue("no value at lattice point %r" % (p,))
        total += float(coeff) * values[p]
    return float(k) ** sum(delta) * total


def quotient_from_function(
    f: Callable[[np.ndarray], np.ndarray],
    base: LatticePoint,
    delta: MultiIndex,
    k: int,
) -> float:
    """Difference quotient of f sampled at the lattice nodes g/k."""
    pts = np.array(Box(base, delta).corners(), dtype=float) / k
    vals = np.asarray(f(pts), dtype=float).reshape(-1)
    total = 0.0
    for (eta, coeff), v in zip(quotient_coefficients(delta), vals):
        total += float(coeff) * v
    return float(k) ** sum(delta) * total


def _ordered_simplex_rule(s: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature for the ordered simplex 0 <= w_s <= ... <= w_1 <= 1.

    Maps the unit cube by w_i = v_1 * ... * v_i, whose Jacobian is
    prod_i v_i^(s - i); the rule is a tensor Gauss-Legendre grid with the
    Jacobian folded into the weights.  Returns (points (m, s), weights (m,)).
    """
    x, w = roots_legendre(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([x] * s), indexing="ij")
    wgrids = np.meshgrid(*([w] * s), indexing="ij")
    v = np.stack([g.reshape(-1) for g in grids], axis=1)  # (m, s)
    wts = np.ones(v.shape[0])
    for i in range(s):
        wts *= wgrids[i].reshape(-1)
        wts *= v[:, i] ** (s - 1 - i)
    pts = np.cumprod(v, axis=1)
    return pts, wts


def quotient_integral(
    derivative: Callable[[np.ndarray], np.ndarray],
    base: LatticePoint,
    delta: MultiIndex,
    k: int,
    points_per_dim: int = 6,
) -> float:
    """Integral representation of the difference quotient.

    `derivative` evaluates d^delta f on (N, 3) points of the reference
    domain.  The quotient equals the iterated integral of the derivative
    over one ordered simplex per axis, the argument being shifted from g/k
    by the sum of that axis's simplex coordinates over k.  For a constant
    derivative c the integral is c/delta!, matching the quotient on any
    polynomial with d^delta f = c.
    """
    rules = []
    for s in delta:
        if s == 0:
            rules.append((np.zeros((1, 0)), np.ones(1)))
        else:
            rules.append(_ordered_simplex_rule(s, points_per_dim))
    pts = []
    wts = []
    x0 = np.array(base, dtype=float) / k
    (p1, w1), (p2, w2), (p3, w3) = rules
    for a in range(p1.shape[0]):
        for b in range(p2.shape[0]):
            for c in range(p3.shape[0]):
                shift = np.array([p1[a].sum(), p2[b].sum(), p3[c].sum()]) / k
                pts.append(x0 + shift)
                wts.append(w1[a] * w2[b] * w3[c])
    vals = np.asarray(derivative(np.array(pts)), dtype=float).reshape(-1)
    return float(np.dot(vals, np.array(wts)))
