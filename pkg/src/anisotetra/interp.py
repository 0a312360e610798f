"""Lagrange interpolation of degree k on a tetrahedron.

Interpolants live in P_k and are represented two ways at once: a global
monomial Polynomial3 (the exact-calculus view: partial derivatives and
integrals are closed-form), and an internal monomial basis centered at the
tetra centroid and scaled by h_T, which is what the Vandermonde system is
solved in and what evaluation uses.  The centered basis keeps the solve
well conditioned on moderately anisotropic elements; one step of iterative
refinement pushes the nodal residual to machine level whenever the system
is solvable at all, and a residual above 1e-8 raises IllConditionedBasis
with a condition estimate instead of returning garbage.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
import scipy.linalg

from .errors import DerivativeUnavailable, IllConditionedBasis, InvalidDegree
from .geom import Tetrahedron, sorted_edge_lengths
from .lattice import Barycentric, nodes_on, sigma_k

MAX_DEGREE = 8
NODAL_RESIDUAL_LIMIT = 1e-8

MultiIndex = tuple[int, int, int]


def monomial_indices(k: int) -> list[MultiIndex]:
    """Exponent triples of total degree <= k, graded lexicographic."""
    out = []
    for total in range(k + 1):
        for a in range(total, -1, -1):
            for b in range(total - a, -1, -1):
                out.append((a, b, total - a - b))
    return out


class Polynomial3:
    """A polynomial in three variables as a sparse monomial-coefficient map.

    Supports exact partial differentiation, exact integration over a
    tetrahedron, affine substitution, arithmetic, and vectorized evaluation.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[MultiIndex, float] | None = None):
        clean: dict[MultiIndex, float] = {}
        if coeffs:
            for key, val in coeffs.items():
                a, b, c = key
                v = float(val)
                if v != 0.0:
                    clean[(int(a), int(b), int(c))] = v
        self.coeffs = clean

    @classmethod
    def constant(cls, c: float) -> "Polynomial3":
        return cls({(0, 0, 0): c})

    @classmethod
    def variable(cls, axis: int) -> "Polynomial3":
        key = [0, 0, 0]
        key[axis] = 1
        return cls({tuple(key): 1.0})

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(sum(k) for k in self.coeffs)

    def evaluate(self, pts) -> np.ndarray | float:
        p = np.asarray(pts, dtype=float)
        single = p.ndim == 1
        p = np.atleast_2d(p)
        if not self.coeffs:
            out = np.zeros(p.shape[0])
            return float(out[0]) if single else out
        deg = self.degree
        powers = [np.ones((p.shape[0], deg + 1)) for _ in range(3)]
        for ax in range(3):
            for d in range(1, deg + 1):
                powers[ax][:, d] = powers[ax][:, d - 1] * p[:, ax]
        out = np.zeros(p.shape[0])
        for (a, b, c), coef in self.coeffs.items():
            out += coef * powers[0][:, a] * powers[1][:, b] * powers[2][:, c]
        return float(out[0]) if single else out

    __call__ = evaluate

    def partial(self, gamma: MultiIndex) -> "Polynomial3":
        """Exact partial derivative d^gamma."""
        out = {}
        g0, g1, g2 = gamma
        for (a, b, c), coef in self.coeffs.items():
            if a < g0 or b < g1 or c < g2:
                continue
            factor = (
                math.perm(a, g0) * math.perm(b, g1) * math.perm(c, g2)
            )
            out[(a - g0, b - g1, c - g2)] = out.get((a - g0, b - g1, c - g2), 0.0) + coef * factor
        return Polynomial3(out)

    def compose_affine(self, B, b) -> "Polynomial3":
        """The polynomial x -> p(B @ x + b), expanded exactly."""
        B = np.asarray(B, dtype=float)
        b = np.asarray(b, dtype=float)
        lin = [
            Polynomial3(
                {
                    (1, 0, 0): B[i, 0],
                    (0, 1, 0): B[i, 1],
                    (0, 0, 1): B[i, 2],
                    (0, 0, 0): b[i],
                }
            )
            for i in range(3)
        ]
        powers: list[list[Polynomial3]] = []
        deg = self.degree
        for i in range(3):
            row = [Polynomial3.constant(1.0)]
            for _ in range(deg):
                row.append(row[-1] * lin[i])
            powers.append(row)
        total = Polynomial3()
        for (a, bb, c), coef in self.coeffs.items():
            total = total + coef * (powers[0][a] * powers[1][bb] * powers[2][c])
        return total

    def integrate(self, t: Tetrahedron) -> float:
        """Exact integral over a tetrahedron via the affine map to the
        unit right-corner reference (monomial integrals are factorials)."""
        verts = t.as_array()
        m = (verts[1:] - verts[0]).T
        det = abs(float(np.linalg.det(m)))
        mapped = self.compose_affine(m, verts[0])
        total = 0.0
        for (a, b, c), coef in mapped.coeffs.items():
            total += coef * (
                math.factorial(a)
                * math.factorial(b)
                * math.factorial(c)
                / math.factorial(a + b + c + 3)
            )
        return det * total

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial3.constant(float(other))
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out.get(key, 0.0) + val
        return Polynomial3(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial3({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial3.constant(float(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Polynomial3({k: v * float(other) for k, v in self.coeffs.items()})
        out: dict[MultiIndex, float] = {}
        for (a1, b1, c1), v1 in self.coeffs.items():
            for (a2, b2, c2), v2 in other.coeffs.items():
                key = (a1 + a2, b1 + b2, c1 + c2)
                out[key] = out.get(key, 0.0) + v1 * v2
        return Polynomial3(out)

    __rmul__ = __mul__

    def __repr__(self):
        terms = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        return "Polynomial3(%r)" % (dict(terms),)


class ScalarField:
    """A scalar function with partial derivatives up to a declared order.

    When analytic partials are not supplied, central finite differences with
    adaptive step eps^(1/(|gamma|+2)) * scale are used; exact_partials then
    reports False so downstream reports can flag the approximation.
    """

    def __init__(
        self,
        eval_fn: Callable[[np.ndarray], np.ndarray],
        partial_fn: Callable[[MultiIndex, np.ndarray], np.ndarray] | None = None,
        order: int | None = None,
        scale: float = 1.0,
        exact: bool | None = None,
    ):
        self._eval = eval_fn
        self._partial = partial_fn
        self.order = order
        self.scale = scale
        self._exact = (partial_fn is not None) if exact is None else exact

    @classmethod
    def from_polynomial(cls, poly: Polynomial3) -> "ScalarField":
        return cls(
            poly.evaluate,
            partial_fn=lambda gamma, pts: np.atleast_1d(
                np.asarray(poly.partial(gamma).evaluate(pts))
            ),
            order=None,
        )

    @property
    def exact_partials(self) -> bool:
        return self._exact

    def __call__(self, pts) -> np.ndarray:
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self._eval(p), dtype=float).reshape(p.shape[0])

    def partial(self, gamma: MultiIndex, pts) -> np.ndarray:
        total = sum(gamma)
        if self.order is not None and total > self.order:
            raise DerivativeUnavailable(
                "field declares order %d, requested |gamma| = %d" % (self.order, total)
            )
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        if total == 0:
            return self(p)
        if self._partial is not None:
            return np.asarray(self._partial(tuple(gamma), p), dtype=float).reshape(
                p.shape[0]
            )
        return self._fd_partial(tuple(gamma), p)

    def _fd_partial(self, gamma: MultiIndex, pts: np.ndarray) -> np.ndarray:
        total = sum(gamma)
        h = float(np.finfo(float).eps) ** (1.0 / (total + 2)) * self.scale

        def rec(g: MultiIndex, p: np.ndarray) -> np.ndarray:
            for ax in range(3):
                if g[ax] > 0:
                    lower = list(g)
                    lower[ax] -= 1
                    shift = np.zeros(3)
                    shift[ax] = h
                    return (rec(tuple(lower), p + shift) - rec(tuple(lower), p - shift)) / (
                        2.0 * h
                    )
            return self(p)

        return rec(gamma, pts)


class Interpolant:
    """The Lagrange interpolant I_T^k v as a polynomial plus node data.

    `poly` is the global monomial form (exact calculus); `evaluate` and
    `partial` go through the centered-and-scaled internal form, which is the
    numerically preferred route on anisotropic elements.
    """

    def __init__(
        self,
        poly: Polynomial3,
        tetra: Tetrahedron,
        k: int,
        node_values: list[tuple[Barycentric, float]],
        scaled: Polynomial3,
        center: np.ndarray,
        scale: float,
        condition_estimate: float,
    ):
        self.poly = poly
        self.tetra = tetra
        self.k = k
        self.node_values = node_values
        self._scaled = scaled
        self._center = center
        self._scale = scale
        self.condition_estimate = condition_estimate

    def evaluate(self, pts) -> np.ndarray:
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        y = (p - self._center) / self._scale
        return np.atleast_1d(np.asarray(self._scaled.evaluate(y)))

    __call__ = evaluate

    def partial(self, gamma: MultiIndex, pts) -> np.ndarray:
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        y = (p - self._center) / self._scale
        dp = self._scaled.partial(gamma)
        return np.atleast_1d(np.asarray(dp.evaluate(y))) / self._scale ** sum(gamma)

    def as_field(self) -> ScalarField:
        return ScalarField(self.evaluate, partial_fn=self.partial, order=None)


@lru_cache(maxsize=128)
def _nodal_system(coords_key: tuple, k: int):
    """Nodes, scaled Vandermonde, LU factors and a condition estimate."""
    verts = np.array(coords_key).reshape(4, 3)
    t = Tetrahedron.from_points(verts)
    gammas, nodes = nodes_on(verts, k)
    center = verts.mean(axis=0)
    scale = sorted_edge_lengths(t)[5]
    y = (nodes - center) / scale
    monos = monomial_indices(k)
    v = np.empty((len(gammas), len(monos)))
    for col, (a, b, c) in enumerate(monos):
        v[:, col] = y[:, 0] ** a * y[:, 1] ** b * y[:, 2] ** c
    lu = scipy.linalg.lu_factor(v)
    anorm = float(np.linalg.norm(v, 1))
    rcond, _ = scipy.linalg.lapack.dgecon(lu[0], anorm, norm="1")
    cond = 1.0 / rcond if rcond > 0 else math.inf
    return gammas, nodes, center, scale, monos, v, lu, cond


def _check_degree(k: int):
    if not isinstance(k, int) or k < 1:
        raise InvalidDegree("interpolation degree must be an integer >= 1, got %r" % (k,))
    if k > MAX_DEGREE:
        raise InvalidDegree(
            "interpolation degree %d exceeds the supported maximum %d" % (k, MAX_DEGREE)
        )


def _solve_coefficients(coords_key, k, values: np.ndarray):
    gammas, nodes, center, scale, monos, v, lu, cond = _nodal_system(coords_key, k)
    coef = scipy.linalg.lu_solve(lu, values)
    # One step of iterative refinement pushes solvable systems to
    # machine-level nodal residuals.
    resid = values - v @ coef
    coef = coef + scipy.linalg.lu_solve(lu, resid)
    resid = values - v @ coef
    limit = NODAL_RESIDUAL_LIMIT * (1.0 + float(np.abs(values).max(initial=0.0)))
    worst = float(np.abs(resid).max(initial=0.0))
    if not np.isfinite(worst) or worst > limit:
        raise IllConditionedBasis(
            "nodal residual %.3e exceeds %.3e" % (worst, limit),
            condition_estimate=cond,
        )
    return gammas, nodes, center, scale, monos, coef, cond


def _scaled_to_global(scaled: Polynomial3, center: np.ndarray, scale: float) -> Polynomial3:
    return scaled.compose_affine(np.eye(3) / scale, -center / scale)


def interpolate(v, t: Tetrahedron, k: int) -> Interpolant:
    """The degree-k Lagrange interpolant of v on t.

    v may be a ScalarField, a Polynomial3, or a plain callable on (N, 3)
    arrays.  Reproduces any q in P_k up to roundoff.
    """
    _check_degree(k)
    coords_key = tuple(np.asarray(t.as_array(), dtype=float).reshape(-1))
    gammas, nodes, _, _, _, _, _, _ = _nodal_system(coords_key, k)
    if isinstance(v, Polynomial3):
        values = np.atleast_1d(np.asarray(v.evaluate(nodes), dtype=float))
    elif isinstance(v, ScalarField):
        values = v(nodes)
    else:
        values = np.asarray(v(nodes), dtype=float).reshape(len(gammas))
    gammas, nodes, center, scale, monos, coef, cond = _solve_coefficients(
        coords_key, k, values
    )
    scaled = Polynomial3({mono: c for mono, c in zip(monos, coef)})
    poly = _scaled_to_global(scaled, center, scale)
    node_values = list(zip(gammas, (float(x) for x in values)))
    return Interpolant(
        poly=poly,
        tetra=t,
        k=k,
        node_values=node_values,
        scaled=scaled,
        center=center,
        scale=scale,
        condition_estimate=cond,
    )


def lagrange_basis(t: Tetrahedron, k: int) -> list[Polynomial3]:
    """The nodal basis on Sigma^k(t): phi_i(x_j) = delta_ij, in node order."""
    _check_degree(k)
    coords_key = tuple(np.asarray(t.as_array(), dtype=float).reshape(-1))
    gammas, _, center, scale, monos, _, _, _ = _nodal_system(coords_key, k)
    n = len(gammas)
    basis = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        _, _, _, _, _, coef, _ = _solve_coefficients(coords_key, k, e)
        scaled = Polynomial3({mono: c for mono, c in zip(monos, coef)})
        basis.append(_scaled_to_global(scaled, center, scale))
    return basis


def residual(v, t: Tetrahedron, k: int) -> ScalarField:
    """The interpolation residual u = v - I_T^k v as a ScalarField.

    Partials combine v's partials (exact or finite-difference) with the
    interpolant's exact polynomial partials; u vanishes at every node.
    """
    if isinstance(v, Polynomial3):
        v = ScalarField.from_polynomial(v)
    elif not isinstance(v, ScalarField):
        v = ScalarField(v)
    ip = interpolate(v, t, k)

    def eval_fn(pts):
        return v(pts) - ip.evaluate(pts)

    def partial_fn(gamma, pts):
        return v.partial(gamma, pts) - ip.partial(gamma, pts)

    # The difference is exact only when v's own partials are.
    return ScalarField(
        eval_fn,
        partial_fn=partial_fn,
        order=v.order,
        scale=v.scale,
        exact=v.exact_partials,
    )
