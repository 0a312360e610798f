"""Quadrature on tetrahedra and Sobolev seminorms |u|_{m,p,T}.

Rules come from the collapsed-coordinate map of the unit cube onto the unit
right-corner tetrahedron, x = u, y = v(1-u), z = w(1-u)(1-v), whose Jacobian
(1-u)^2 (1-v) is absorbed exactly by Gauss-Jacobi weights: nodes from
roots_jacobi(n, 2, 0) in u, roots_jacobi(n, 1, 0) in v and Gauss-Legendre in
w integrate every polynomial of total degree <= 2n-1 exactly.  Nodes are
stored in barycentric coordinates with weights normalized to sum one, so a
rule transfers to any tetrahedron by an affine map and a volume factor.

The seminorm follows the weighted convention

    |u|_{m,p,T}^p = sum_{|gamma| = m} (m!/gamma!) int_T |d^gamma u|^p,

with an unweighted variant selectable for cross-checks.  For p = infinity
the maximum of |d^gamma u| is sampled on a dense lattice and, for
polynomials, polished with one constrained Newton step; this route is
documented as approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import InadmissiblePC, UnsupportedDegree
from .geom import Tetrahedron, volume
from .interp import Interpolant, Polynomial3, ScalarField

MAX_RULE_DEGREE = 20
DEFAULT_NUMERIC_DEGREE = 12
RICHARDSON_DEGREE = 18
RICHARDSON_RTOL = 1e-6
DENSE_LATTICE_ORDER = 40

MultiIndex = tuple[int, int, int]


@dataclass(frozen=True)
class QuadratureRule:
    """Barycentric nodes and weights; weights sum to one."""

    nodes: np.ndarray
    weights: np.ndarray
    exactness: int

    def points_on(self, vertices) -> np.ndarray:
        return self.nodes @ np.asarray(vertices, dtype=float)


@lru_cache(maxsize=64)
def rule_for_degree(d: int) -> QuadratureRule:
    """A rule exact for all polynomials of total degree <= d."""
    if not isinstance(d, int) or d < 1 or d > MAX_RULE_DEGREE:
        raise UnsupportedDegree(
            "quadrature degree must lie in [1, %d], got %r" % (MAX_RULE_DEGREE, d)
        )
    n = (d + 2) // 2  # smallest n with 2n-1 >= d
    xu, wu = roots_jacobi(n, 2, 0)
    xv, wv = roots_jacobi(n, 1, 0)
    xw, ww = roots_legendre(n)
    # Map [-1, 1] to [0, 1]; the Jacobi weights (1-x)^a pick up 2^a.
    u, cu = 0.5 * (xu + 1.0), wu / 8.0
    v, cv = 0.5 * (xv + 1.0), wv / 4.0
    w, cw = 0.5 * (xw + 1.0), ww / 2.0

    uu, vv, www = np.meshgrid(u, v, w, indexing="ij")
    cc = (
        cu[:, None, None] * cv[None, :, None] * cw[None, None, :]
    ).reshape(-1)
    uu, vv, www = uu.reshape(-1), vv.reshape(-1), www.reshape(-1)
    x = uu
    y = vv * (1.0 - uu)
    z = www * (1.0 - uu) * (1.0 - vv)
    bary = np.stack([1.0 - x - y - z, x, y, z], axis=1)
    weights = cc * 6.0  # raw weights sum to |T_ref| = 1/6
    return QuadratureRule(nodes=bary, weights=weights, exactness=2 * n - 1)


def integrate(f, t: Tetrahedron, degree: int = DEFAULT_NUMERIC_DEGREE) -> float:
    """Integral of f over t with a rule exact to the given degree."""
    rule = rule_for_degree(degree)
    pts = rule.points_on(t.as_array())
    vals = np.asarray(f(pts), dtype=float).reshape(-1)
    return volume(t) * float(np.dot(rule.weights, vals))


@dataclass(frozen=True)
class SeminormSpec:
    """Order m, exponent p (math.inf allowed) and weight convention."""

    m: int
    p: float
    weighted: bool = True

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("seminorm order m must be >= 0, got %r" % (self.m,))
        if self.p != math.inf and self.p < 1:
            raise ValueError("exponent p must be >= 1 or inf, got %r" % (self.p,))


def validate_p(k: int, m: int, p: float) -> tuple[bool, str]:
    """Admissibility of (k, m, p) for the interpolation error estimates.

    Three branches: k - m = 0 needs 2 < p <= inf; k = 1 (with m = 0) needs
    3/2 < p <= inf; k >= 2 with k - m >= 1 allows 1 <= p <= inf.
    """
    if k < 1 or not 0 <= m <= k:
        return False, "requires k >= 1 and 0 <= m <= k, got k=%d m=%d" % (k, m)
    if k - m == 0:
        if p > 2:
            return True, "k - m = 0 and p > 2"
        return False, "k - m = 0 requires 2 < p <= inf, got p=%s" % (p,)
    if k == 1:
        if p > 1.5:
            return True, "k = 1, m = 0 and p > 3/2"
        return False, "k = 1 requires 3/2 < p <= inf, got p=%s" % (p,)
    if p >= 1:
        return True, "k >= 2 and k - m >= 1 allow 1 <= p <= inf"
    return False, "p must satisfy 1 <= p <= inf, got p=%s" % (p,)


def derivative_indices(m: int) -> list[MultiIndex]:
    """Multi-indices of total order m in a fixed lexicographic order."""
    return [
        (a, b, m - a - b)
        for a in range(m, -1, -1)
        for b in range(m - a, -1, -1)
    ]


def multinomial_weight(gamma: MultiIndex) -> float:
    m = sum(gamma)
    return math.factorial(m) / (
        math.factorial(gamma[0]) * math.factorial(gamma[1]) * math.factorial(gamma[2])
    )


@dataclass(frozen=True)
class SeminormInfo:
    """Value plus evaluation metadata for reports."""

    value: float
    quadrature_degree: int | None
    warnings: tuple[str, ...] = ()
    approximate_partials: bool = False


def _as_field(u) -> tuple[ScalarField, int | None]:
    """Normalize the input and return (field, polynomial degree or None)."""
    if isinstance(u, Polynomial3):
        return ScalarField.from_polynomial(u), u.degree
    if isinstance(u, Interpolant):
        return u.as_field(), u.k
    if isinstance(u, ScalarField):
        return u, None
    return ScalarField(u), None


@lru_cache(maxsize=4)
def _dense_unit_weights(order: int) -> np.ndarray:
    from .lattice import sigma_k

    return np.array(sigma_k(order), dtype=float) / order


def _dense_points(t: Tetrahedron, order: int) -> np.ndarray:
    return _dense_unit_weights(order) @ t.as_array()


def _inside(t: Tetrahedron, x: np.ndarray, tol: float = 1e-9) -> bool:
    verts = t.as_array()
    m = (verts[1:] - verts[0]).T
    try:
        lam = np.linalg.solve(m, x - verts[0])
    except np.linalg.LinAlgError:
        return False
    return bool(lam.min() >= -tol and lam.sum() <= 1.0 + tol)


def _newton_polish(poly: Polynomial3, t: Tetrahedron, x0: np.ndarray) -> float:
    """One constrained Newton step toward a local extremum of |poly|."""
    val0 = float(np.asarray(poly.evaluate(x0[None, :])).reshape(-1)[0])
    sign = 1.0 if val0 >= 0 else -1.0
    axes = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    grad = np.array(
        [float(np.asarray(poly.partial(a).evaluate(x0[None, :]))[0]) for a in axes]
    )
    hess = np.empty((3, 3))
    for i, ai in enumerate(axes):
        for j, aj in enumerate(axes):
            if j < i:
                hess[i, j] = hess[j, i]
                continue
            gij = tuple(ai[l] + aj[l] for l in range(3))
            hess[i, j] = float(np.asarray(poly.partial(gij).evaluate(x0[None, :]))[0])
    try:
        step = np.linalg.solve(hess, -grad)
    except np.linalg.LinAlgError:
        return abs(val0)
    x1 = x0 + step
    if not _inside(t, x1):
        return abs(val0)
    val1 = sign * float(np.asarray(poly.evaluate(x1[None, :])).reshape(-1)[0])
    return max(abs(val0), val1 if val1 > 0 else abs(val0))


def _sup_seminorm(u, t: Tetrahedron, spec: SeminormSpec) -> SeminormInfo:
    field_u, _ = _as_field(u)
    pts = _dense_points(t, DENSE_LATTICE_ORDER)
    best = 0.0
    best_gamma = None
    best_idx = 0
    for gamma in derivative_indices(spec.m):
        vals = np.abs(field_u.partial(gamma, pts))
        idx = int(np.argmax(vals))
        if vals[idx] > best:
            best = float(vals[idx])
            best_gamma = gamma
            best_idx = idx
    warnings = ("p=inf maximum from dense sampling; value is approximate",)
    if best_gamma is not None and isinstance(u, (Polynomial3, Interpolant)):
        poly = u if isinstance(u, Polynomial3) else u.poly
        best = max(best, _newton_polish(poly.partial(best_gamma), t, pts[best_idx]))
    return SeminormInfo(
        value=best,
        quadrature_degree=None,
        warnings=warnings,
        approximate_partials=not field_u.exact_partials,
    )


def _finite_seminorm(
    u, t: Tetrahedron, spec: SeminormSpec, degree: int | None
) -> SeminormInfo:
    field_u, poly_degree = _as_field(u)
    p = float(spec.p)
    warnings: list[str] = []

    p_is_even_int = p == int(p) and int(p) % 2 == 0
    if degree is not None:
        degrees = [min(degree, MAX_RULE_DEGREE)]
    elif poly_degree is not None and p_is_even_int:
        exact_deg = max(1, (poly_degree - spec.m) * int(p))
        if exact_deg <= MAX_RULE_DEGREE:
            degrees = [exact_deg]
        else:
            degrees = [DEFAULT_NUMERIC_DEGREE, RICHARDSON_DEGREE]
    else:
        degrees = [DEFAULT_NUMERIC_DEGREE, RICHARDSON_DEGREE]

    totals = []
    for deg in degrees:
        rule = rule_for_degree(deg)
        pts = rule.points_on(t.as_array())
        vol = volume(t)
        total = 0.0
        for gamma in derivative_indices(spec.m):
            w = multinomial_weight(gamma) if spec.weighted else 1.0
            vals = np.abs(field_u.partial(gamma, pts)) ** p
            total += w * vol * float(np.dot(rule.weights, vals))
        totals.append(total)

    if len(totals) == 2:
        ref = max(abs(totals[-1]), 1e-300)
        if abs(totals[0] - totals[1]) > RICHARDSON_RTOL * ref:
            warnings.append(
                "quadrature degrees %d and %d disagree (rel %.2e); integrand may "
                "be under-resolved"
                % (degrees[0], degrees[1], abs(totals[0] - totals[1]) / ref)
            )
    value = totals[-1] ** (1.0 / p)
    return SeminormInfo(
        value=float(value),
        quadrature_degree=degrees[-1],
        warnings=tuple(warnings),
        approximate_partials=not field_u.exact_partials,
    )


def seminorm_with_info(
    u,
    t: Tetrahedron,
    spec: SeminormSpec,
    degree: int | None = None,
    validate_for_k: int | None = None,
) -> SeminormInfo:
    """|u|_{m,p,T} plus quadrature metadata and warnings.

    With validate_for_k set, the (k, m, p) admissibility condition is
    enforced first and InadmissiblePC raised on violation.
    """
    if validate_for_k is not None:
        ok, reason = validate_p(validate_for_k, spec.m, spec.p)
        if not ok:
            raise InadmissiblePC(reason)
    if spec.p == math.inf:
        return _sup_seminorm(u, t, spec)
    return _finite_seminorm(u, t, spec, degree)


def seminorm(
    u,
    t: Tetrahedron,
    spec: SeminormSpec,
    degree: int | None = None,
    validate_for_k: int | None = None,
) -> float:
    """The seminorm value alone; see seminorm_with_info for metadata."""
    return seminorm_with_info(u, t, spec, degree, validate_for_k).value
