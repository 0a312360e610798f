"""Tetrahedron geometry: classification, standard position, quality.

An arbitrary nondegenerate tetrahedron is classified as Type 1 or Type 2 by
a half-space test built on its shortest edge e2 and the longest edge e1
adjacent to it.  After relabeling, a rigid motion (plus an optional mirror)
carries the tetrahedron onto canonical coordinates

    x1 = (0, 0, 0),  x2 = (alpha1, 0, 0),
    x3 = (alpha2*s1, alpha2*t1, 0)            (Type 1)
    x3 = (alpha1 - alpha2*s1, alpha2*t1, 0)   (Type 2)
    x4 = (alpha3*s21, alpha3*s22, alpha3*t2)

with s1^2 + t1^2 = 1, s21^2 + s22^2 + t2^2 = 1, t1, t2 > 0,
alpha2*s1 <= alpha1/2 and alpha3*s21 <= alpha1/2.  From these parameters the
module derives the factor matrices A = X*Y with closed-form spectral norms,
the quality quantities R_T and H_T, the full angle inventory (face angles,
dihedral angles, edge-face angles), maximum-angle-condition checks, and the
constants tying the maximum angle condition to R_T/h_T.

Scalar geometry is written with plain floats on purpose: these routines run
per sample inside 1e5-sample experiments where numpy's per-call overhead
dominates.  numpy appears only for the 3x3 matrix work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateTetrahedron, InvalidGammaMax

# Relative tolerances (all scale-invariant).
EPS_VOL_REL = 1e-14      # degeneracy: |T| < EPS_VOL_REL * h_T^3
EPS_PLANE_REL = 1e-12    # half-space test: |sigma| <= EPS_PLANE_REL * h_T
EPS_ANGLE = 1e-12        # slack for MAC comparisons, in radians

# Vertex index pairs of the six edges, in a fixed order.
EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

TYPE1 = 1
TYPE2 = 2


@dataclass(frozen=True)
class Point3:
    """A point in R^3 with finite coordinates."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError("Point3 coordinates must be finite, got %r" % (c,))

    @classmethod
    def of(cls, seq) -> "Point3":
        x, y, z = seq
        return cls(float(x), float(y), float(z))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class Tetrahedron:
    """Four vertices; nondegeneracy is enforced by the operations, not here."""

    v: tuple[Point3, Point3, Point3, Point3]

    def __post_init__(self):
        if len(self.v) != 4:
            raise ValueError("a tetrahedron needs exactly 4 vertices")

    @classmethod
    def from_points(cls, pts) -> "Tetrahedron":
        return cls(tuple(p if isinstance(p, Point3) else Point3.of(p) for p in pts))

    def coords(self) -> tuple[tuple[float, float, float], ...]:
        return tuple(p.as_tuple() for p in self.v)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords())


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _norm(a):
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def _dist(a, b):
    return _norm(_sub(a, b))


def _scale(a, s):
    return (a[0] * s, a[1] * s, a[2] * s)


def edge_lengths(t: Tetrahedron) -> tuple[float, ...]:
    """The six edge lengths in the fixed EDGES order."""
    v = t.coords()
    return tuple(_dist(v[i], v[j]) for i, j in EDGES)


def sorted_edge_lengths(t: Tetrahedron) -> tuple[float, ...]:
    """Edge lengths sorted ascending: h1 <= ... <= h6 = h_T."""
    return tuple(sorted(edge_lengths(t)))


def _signed_volume6(v) -> float:
    # 6 * signed volume = det[v2-v1, v3-v1, v4-v1]
    a = _sub(v[1], v[0])
    b = _sub(v[2], v[0])
    c = _sub(v[3], v[0])
    return _dot(a, _cross(b, c))


def volume(t: Tetrahedron, eps_vol: float | None = None) -> float:
    """Unsigned volume |T|; raises DegenerateTetrahedron below the threshold.

    The default threshold is EPS_VOL_REL * h_T^3, which is scale invariant.
    Pass eps_vol to override with an absolute threshold.
    """
    v = t.coords()
    vol = abs(_signed_volume6(v)) / 6.0
    if eps_vol is None:
        h_t = max(_dist(v[i], v[j]) for i, j in EDGES)
        eps_vol = EPS_VOL_REL * h_t ** 3
    if vol < eps_vol:
        raise DegenerateTetrahedron(
            "volume %.3e below degeneracy threshold %.3e" % (vol, eps_vol)
        )
    return vol


@dataclass(frozen=True)
class Classification:
    """Vertex relabeling of a tetrahedron.

    kind: TYPE1 or TYPE2.
    perm: perm[i] is the original vertex index playing the role of x_{i+1}.
    alpha: (alpha1, alpha2, alpha3); alpha2 is the shortest edge length,
        alpha1 the longest edge adjacent to it, alpha3 = |x1 x4|.
    e1, e2: the edges as sorted original vertex index pairs.
    """

    kind: int
    perm: tuple[int, int, int, int]
    alpha: tuple[float, float, float]
    e1: tuple[int, int]
    e2: tuple[int, int]


def classify(t: Tetrahedron) -> Classification:
    """Classify a tetrahedron as Type 1 or Type 2 and relabel its vertices.

    e2 is a globally shortest edge and e1 a longest edge sharing a vertex
    with it.  The deciding test is against the perpendicular bisector plane
    of e1: the far endpoint of e2 always lies weakly on the side of the
    shared vertex, so the remaining vertex x4 settles the dichotomy.  Ties
    are broken by the lexicographically smallest pair of canonical vertex
    ranks (vertices ordered lexicographically by coordinates), which makes
    the result stable under permutations of the input vertices.
    """
    v = t.coords()
    lengths = {e: _dist(v[e[0]], v[e[1]]) for e in EDGES}
    h_t = max(lengths.values())
    vol6 = abs(_signed_volume6(v))
    if vol6 / 6.0 < EPS_VOL_REL * h_t ** 3:
        raise DegenerateTetrahedron(
            "cannot classify: volume %.3e below threshold" % (vol6 / 6.0,)
        )

    order = sorted(range(4), key=lambda i: v[i])
    rank = [0] * 4
    for r, i in enumerate(order):
        rank[i] = r

    def tie_key(e):
        a, b = rank[e[0]], rank[e[1]]
        return (a, b) if a < b else (b, a)

    e2 = min(EDGES, key=lambda e: (lengths[e], tie_key(e)))
    adjacent = [e for e in EDGES if len(set(e) & set(e2)) == 1]
    e1 = min(adjacent, key=lambda e: (-lengths[e], tie_key(e)))

    c = (set(e1) & set(e2)).pop()
    w = e1[0] if e1[1] == c else e1[1]
    d = e2[0] if e2[1] == c else e2[1]
    f = (set(range(4)) - {c, w, d}).pop()

    alpha1 = lengths[e1]
    # Signed distance of the remaining vertex from the perpendicular bisector
    # plane of e1, positive toward w.
    mid = _scale((v[c][0] + v[w][0], v[c][1] + v[w][1], v[c][2] + v[w][2]), 0.5)
    axis = _scale(_sub(v[w], v[c]), 1.0 / alpha1)
    sigma_f = _dot(_sub(v[f], mid), axis)

    if sigma_f <= EPS_PLANE_REL * h_t:
        # x3 and x4 share the half-space of the shared vertex: Type 1.
        kind = TYPE1
        perm = (c, w, d, f)
    else:
        kind = TYPE2
        perm = (w, c, d, f)

    alpha2 = lengths[e2]
    alpha3 = _dist(v[perm[0]], v[perm[3]])
    return Classification(
        kind=kind,
        perm=perm,
        alpha=(alpha1, alpha2, alpha3),
        e1=tuple(sorted(e1)),
        e2=tuple(sorted(e2)),
    )


@dataclass(frozen=True)
class StandardPosition:
    """Parameters and rigid motion carrying a tetrahedron to standard position.

    motion(x) = rotation @ x + translation maps the original coordinates onto
    the canonical ones; `mirror` records whether a reflection was folded into
    the (still orthogonal) rotation matrix.
    """

    alpha: tuple[float, float, float]
    params: tuple[float, float, float, float, float]  # (s1, t1, s21, s22, t2)
    rotation: np.ndarray
    translation: Point3
    mirror: bool

    def apply_motion(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = pts @ self.rotation.T + self.translation.as_array()
        return out if np.ndim(points) > 1 else out[0]


def _standard_position_from(t: Tetrahedron, cls: Classification) -> StandardPosition:
    v = t.coords()
    labeled = [v[i] for i in cls.perm]
    alpha1, alpha2, alpha3 = cls.alpha

    b1 = _scale(_sub(labeled[1], labeled[0]), 1.0 / alpha1)
    v3 = _sub(labeled[2], labeled[0])
    proj = _dot(v3, b1)
    w3 = (v3[0] - proj * b1[0], v3[1] - proj * b1[1], v3[2] - proj * b1[2])
    n3 = _norm(w3)
    if n3 <= 0.0:
        raise DegenerateTetrahedron("x3 lies on the line through x1 x2")
    b2 = _scale(w3, 1.0 / n3)
    t1 = n3 / alpha2
    if cls.kind == TYPE1:
        s1 = proj / alpha2
    else:
        s1 = (alpha1 - proj) / alpha2

    b3 = _cross(b1, b2)
    v4 = _sub(labeled[3], labeled[0])
    zc = _dot(v4, b3)
    mirror = zc < 0.0
    if mirror:
        b3 = _scale(b3, -1.0)
        zc = -zc
    s21 = _dot(v4, b1) / alpha3
    s22 = _dot(v4, b2) / alpha3
    t2 = zc / alpha3
    if t2 <= 0.0:
        raise DegenerateTetrahedron("x4 lies in the plane of x1 x2 x3")

    rotation = np.array([b1, b2, b3])
    translation = Point3.of(-(rotation @ np.array(labeled[0])))
    return StandardPosition(
        alpha=cls.alpha,
        params=(s1, t1, s21, s22, t2),
        rotation=rotation,
        translation=translation,
        mirror=mirror,
    )


def standard_position(t: Tetrahedron, cls: Classification | None = None) -> StandardPosition:
    """Rigid motion and parameters of the standard position of t.

    The classification is computed when not supplied.  The returned
    parameters satisfy s1^2 + t1^2 = 1 and s21^2 + s22^2 + t2^2 = 1 by
    construction; the half-space rule guarantees alpha2*s1 <= alpha1/2 and
    alpha3*s21 <= alpha1/2 up to the plane tolerance.
    """
    if cls is None:
        cls = classify(t)
    return _standard_position_from(t, cls)


def standard_position_vertices(sp: StandardPosition, kind: int) -> tuple[tuple[float, float, float], ...]:
    """The canonical vertex coordinates determined by (alpha, params, kind)."""
    alpha1, alpha2, alpha3 = sp.alpha
    s1, t1, s21, s22, t2 = sp.params
    if kind == TYPE1:
        x3 = (alpha2 * s1, alpha2 * t1, 0.0)
    elif kind == TYPE2:
        x3 = (alpha1 - alpha2 * s1, alpha2 * t1, 0.0)
    else:
        raise ValueError("kind must be TYPE1 or TYPE2, got %r" % (kind,))
    return (
        (0.0, 0.0, 0.0),
        (alpha1, 0.0, 0.0),
        x3,
        (alpha3 * s21, alpha3 * s22, alpha3 * t2),
    )


def reference_tetrahedron(kind: int) -> Tetrahedron:
    """The reference tetrahedron of the given type (unit right-corner or its
    sheared Type-2 companion)."""
    if kind == TYPE1:
        pts = ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    elif kind == TYPE2:
        pts = ((0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 0, 1))
    else:
        raise ValueError("kind must be TYPE1 or TYPE2, got %r" % (kind,))
    return Tetrahedron.from_points(pts)


@dataclass(frozen=True)
class TransformMatrices:
    """The factorization T = A D(reference) with A = X Y.

    normX/normXinv/normY/normYinv are the closed-form spectral norms
    (1 + s)^(1/2) and (1 - s)^(-1/2); normA/normAinv are computed from the
    singular values of A.  The inverse norms are evaluated as
    sqrt(1 + s)/t, which is algebraically identical and does not cancel.
    """

    A: np.ndarray
    D: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    normA: float
    normAinv: float
    normX: float
    normXinv: float
    normY: float
    normYinv: float


def matrices(sp: StandardPosition, kind: int) -> TransformMatrices:
    """Transformation matrices and their spectral norms for a standard position."""
    s1, t1, s21, s22, t2 = sp.params
    if kind == TYPE2:
        s1_signed = -s1
    elif kind == TYPE1:
        s1_signed = s1
    else:
        raise ValueError("kind must be TYPE1 or TYPE2, got %r" % (kind,))

    X = np.array([[1.0, 0.0, s21], [0.0, 1.0, s22], [0.0, 0.0, t2]])
    Y = np.array([[1.0, s1_signed, 0.0], [0.0, t1, 0.0], [0.0, 0.0, 1.0]])
    A = X @ Y
    D = np.diag(sp.alpha)

    bold_s1 = abs(s1)
    bold_s2 = math.hypot(s21, s22)
    sv = np.linalg.svd(A, compute_uv=False)
    return TransformMatrices(
        A=A,
        D=D,
        X=X,
        Y=Y,
        normA=float(sv[0]),
        normAinv=1.0 / float(sv[-1]),
        normX=math.sqrt(1.0 + bold_s2),
        normXinv=math.sqrt(1.0 + bold_s2) / t2,
        normY=math.sqrt(1.0 + bold_s1),
        normYinv=math.sqrt(1.0 + bold_s1) / t1,
    )


def quality(t: Tetrahedron) -> tuple[float, float]:
    """The quality quantities (R_T, H_T).

    R_T = h1*h2*h_T^2/|T| comes from the sorted edge lengths and the
    determinant volume; H_T = 6*h_T/(t1*t2) comes from the standard-position
    parameters.  The two routes are independent; H_T equals
    alpha1*alpha2*alpha3*h_T/|T| identically.
    """
    hs = sorted_edge_lengths(t)
    vol = volume(t)
    r_t = hs[0] * hs[1] * hs[5] ** 2 / vol
    cls = classify(t)
    sp = _standard_position_from(t, cls)
    _, t1, _, _, t2 = sp.params
    h_t = hs[5]
    return r_t, 6.0 * h_t / (t1 * t2)


def quality_ratio(t: Tetrahedron, cls: Classification | None = None) -> float:
    """R_T/H_T evaluated without the volume: h1*h2*h_T/(alpha1*alpha2*alpha3).

    The determinant volume cancels between R_T and H_T; this form keeps full
    relative accuracy on needle elements where |T| itself does not.
    """
    if cls is None:
        cls = classify(t)
    hs = sorted_edge_lengths(t)
    a1, a2, a3 = cls.alpha
    return hs[0] * hs[1] * hs[5] / (a1 * a2 * a3)


@dataclass(frozen=True)
class GeometryReport:
    """Edge lengths, volume, quality quantities and the full angle inventory.

    theta[(i, j)] is the internal angle of face F_i (opposite vertex i) at
    vertex j; psi[(i, j)] with i < j is the dihedral angle between faces F_i
    and F_j; phi[(i, j)] is the angle between face F_i and the edge x_i x_j.
    All indices are 0-based original vertex indices.  max_angle ranges over
    theta and psi only (the maximum angle condition does not involve phi).
    """

    h: tuple[float, ...]
    volume: float
    R_T: float
    H_T: float
    theta: dict[tuple[int, int], float]
    psi: dict[tuple[int, int], float]
    phi: dict[tuple[int, int], float]
    max_angle: float


def _face_angles(v):
    """theta, inward unit normals, and point-plane distances for all faces."""
    theta = {}
    normals = {}
    dists = {}
    for i in range(4):
        others = [j for j in range(4) if j != i]
        a, b, c = (v[others[0]], v[others[1]], v[others[2]])
        n = _cross(_sub(b, a), _sub(c, a))
        nn = _norm(n)
        if nn == 0.0:
            raise DegenerateTetrahedron("face %d is degenerate" % i)
        n = _scale(n, 1.0 / nn)
        # Orient inward: toward the opposite vertex.
        dist = _dot(_sub(v[i], a), n)
        if dist < 0.0:
            n = _scale(n, -1.0)
            dist = -dist
        normals[i] = n
        dists[i] = dist
        for j in others:
            rest = [k for k in others if k != j]
            u = _sub(v[rest[0]], v[j])
            w = _sub(v[rest[1]], v[j])
            theta[(i, j)] = math.atan2(_norm(_cross(u, w)), _dot(u, w))
    return theta, normals, dists


def angles(t: Tetrahedron) -> GeometryReport:
    """Compute the full geometry report of a nondegenerate tetrahedron."""
    v = t.coords()
    vol = volume(t)
    theta, normals, dists = _face_angles(v)

    psi = {}
    for i in range(4):
        for j in range(i + 1, 4):
            ni, nj = normals[i], normals[j]
            gap = math.atan2(_norm(_cross(ni, nj)), _dot(ni, nj))
            psi[(i, j)] = math.pi - gap

    phi = {}
    for i in range(4):
        for j in range(4):
            if j == i:
                continue
            ratio = dists[i] / _dist(v[i], v[j])
            phi[(i, j)] = math.asin(min(1.0, ratio))

    r_t, h_t_quality = quality(t)
    return GeometryReport(
        h=sorted_edge_lengths(t),
        volume=vol,
        R_T=r_t,
        H_T=h_t_quality,
        theta=theta,
        psi=psi,
        phi=phi,
        max_angle=max(max(theta.values()), max(psi.values())),
    )


def max_face_and_dihedral_angle(t: Tetrahedron) -> float:
    """max(theta union psi) without the rest of the report (hot path)."""
    v = t.coords()
    if abs(_signed_volume6(v)) / 6.0 < EPS_VOL_REL * max(
        _dist(v[i], v[j]) for i, j in EDGES
    ) ** 3:
        raise DegenerateTetrahedron("degenerate tetrahedron has no angle report")
    theta, normals, _ = _face_angles(v)
    worst = max(theta.values())
    for i in range(4):
        for j in range(i + 1, 4):
            ni, nj = normals[i], normals[j]
            gap = math.atan2(_norm(_cross(ni, nj)), _dot(ni, nj))
            worst = max(worst, math.pi - gap)
    return worst


def _check_gamma_max(gamma_max: float):
    if not (math.pi / 3.0 <= gamma_max < math.pi):
        raise InvalidGammaMax(
            "gamma_max must lie in [pi/3, pi), got %r" % (gamma_max,)
        )


def mac_check(t: Tetrahedron, gamma_max: float, eps_angle: float = EPS_ANGLE) -> bool:
    """True iff every face internal angle and dihedral angle is <= gamma_max."""
    _check_gamma_max(gamma_max)
    return max_face_and_dihedral_angle(t) <= gamma_max + eps_angle


@dataclass(frozen=True)
class MacConstants:
    """Constants attached to a maximum angle condition with angle gamma_max.

    D = 6/(C0*C1^2) bounds H_T/h_T for MAC-satisfying tetrahedra; the
    corresponding R_T/h_T bound is 2*D.
    """

    gamma_max: float
    delta: float
    C0: float
    C1: float
    D: float

    def gamma_of_M(self, M: float) -> float:
        if not 0.0 < M < 1.0:
            raise ValueError("gamma(M) needs 0 < M < 1, got %r" % (M,))
        return math.pi - math.asin(M)


def mac_bound_constants(gamma_max: float) -> MacConstants:
    """delta, C0, C1 and D = 6/(C0*C1^2) for a given gamma_max."""
    _check_gamma_max(gamma_max)
    ratio = (math.cos(gamma_max) + 1.0) / (math.sin(gamma_max / 2.0) + 1.0)
    sin_delta = math.sqrt(ratio)
    delta = math.asin(min(1.0, sin_delta))
    c1 = min(math.sin((math.pi - gamma_max) / 2.0), math.sin(gamma_max))
    c0 = min(sin_delta, math.sin(gamma_max))
    return MacConstants(
        gamma_max=gamma_max,
        delta=delta,
        C0=c0,
        C1=c1,
        D=6.0 / (c0 * c1 * c1),
    )


def mac_reverse_gamma(d_bound: float, kind: int | None = None) -> float:
    """The angle gamma' such that R_T/h_T <= d_bound implies the MAC with gamma'.

    The implication is proved per type from the bound H_T/h_T <= 2*d_bound
    (H_T <= 2*R_T), with M = 6/(2*d_bound) = 3/d_bound:

        Type 1: gamma' = max(gamma(M/2), arccos(-sqrt(1-M^2)*sqrt(1-M^2/4)))
        Type 2: gamma' = max(gamma(M),   arccos(M^2 - 1))

    where gamma(M) = pi - arcsin(M).  With kind=None the weaker (larger) of
    the two values is returned, valid for a tetrahedron of unknown type.
    """
    m = 3.0 / d_bound
    if not 0.0 < m < 1.0:
        raise ValueError(
            "reverse MAC formula needs d_bound > 3 so that 0 < M < 1, got %r"
            % (d_bound,)
        )

    def type1(mm):
        g1 = math.pi - math.asin(mm / 2.0)
        g2 = math.acos(-math.sqrt(1.0 - mm * mm) * math.sqrt(1.0 - mm * mm / 4.0))
        return max(g1, g2)

    def type2(mm):
        g1 = math.pi - math.asin(mm)
        g2 = math.acos(mm * mm - 1.0)
        return max(g1, g2)

    if kind == TYPE1:
        return type1(m)
    if kind == TYPE2:
        return type2(m)
    if kind is None:
        return max(type1(m), type2(m))
    raise ValueError("kind must be TYPE1, TYPE2 or None, got %r" % (kind,))


@dataclass(frozen=True)
class TrigIdentityReport:
    """Residuals of the sine and cosine identities among theta, psi, phi.

    twosin:    sin phi[(j,n)] - sin theta[(k,n)] * sin psi[(k,j)]
    cos_theta: cos theta[(k,j)] - (cos theta[(m,j)] cos theta[(n,j)]
               + sin theta[(m,j)] sin theta[(n,j)] cos psi[(m,n)])
    cos_psi:   cos psi[(m,n)] - (sin psi[(m,k)] sin psi[(n,k)] cos theta[(k,j)]
               - cos psi[(m,k)] cos psi[(n,k)])
    keyed by (j, n, k) resp. (j, k); max_residual ranges over everything.
    """

    twosin: dict[tuple[int, int, int], float]
    cos_theta: dict[tuple[int, int], float]
    cos_psi: dict[tuple[int, int], float]
    max_residual: float


def verify_trig_identities(t: Tetrahedron) -> TrigIdentityReport:
    """Evaluate all instances of the angle identities on t."""
    rep = angles(t)

    def psi_at(i, j):
        return rep.psi[(i, j) if i < j else (j, i)]

    twosin = {}
    for j in range(4):
        for n in range(4):
            if n == j:
                continue
            for k in range(4):
                if k in (j, n):
                    continue
                lhs = math.sin(rep.phi[(j, n)])
                rhs = math.sin(rep.theta[(k, n)]) * math.sin(psi_at(k, j))
                twosin[(j, n, k)] = lhs - rhs

    cos_theta = {}
    cos_psi = {}
    for j in range(4):
        rest = [i for i in range(4) if i != j]
        for k in rest:
            m, n = [i for i in rest if i != k]
            lhs = math.cos(rep.theta[(k, j)])
            rhs = math.cos(rep.theta[(m, j)]) * math.cos(rep.theta[(n, j)]) + math.sin(
                rep.theta[(m, j)]
            ) * math.sin(rep.theta[(n, j)]) * math.cos(psi_at(m, n))
            cos_theta[(j, k)] = lhs - rhs

            lhs2 = math.cos(psi_at(m, n))
            rhs2 = math.sin(psi_at(m, k)) * math.sin(psi_at(n, k)) * math.cos(
                rep.theta[(k, j)]
            ) - math.cos(psi_at(m, k)) * math.cos(psi_at(n, k))
            cos_psi[(j, k)] = lhs2 - rhs2

    worst = max(
        max(abs(r) for r in twosin.values()),
        max(abs(r) for r in cos_theta.values()),
        max(abs(r) for r in cos_psi.values()),
    )
    return TrigIdentityReport(
        twosin=twosin, cos_theta=cos_theta, cos_psi=cos_psi, max_residual=worst
    )
