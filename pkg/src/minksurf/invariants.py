"""Pointwise invariant theory: the tangent-pair invariant, second fundamental
form, Weingarten-type map with k and kappa, point classification, principal
and asymptotic tangents, indicatrix, curvature ellipse, and the minimality /
flat-normal-connection predicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FrameError
from .exprs import Expr, SurfaceSpec, substitute
from .forms import (FirstForm, NormalFrame, SecondTensor, first_form,
                    normal_frame, second_tensor)
from .jets import SurfaceJet2, lift, surface_jet
from .lorentz import CausalClass, causal_class, norm2_euclid

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class SecondForm:
    """Coefficients L, M, N built from the 2x2 determinants of c_ij^k."""

    Delta1: float
    Delta2: float
    Delta3: float
    L: float
    M: float
    N: float


@dataclass(frozen=True)
class TangentDirection:
    """Direction lam * z_u + mu * z_v in the coordinate tangent basis."""

    lam: float
    mu: float

    def __post_init__(self):
        if self.lam == 0.0 and self.mu == 0.0:
            raise ValueError("tangent direction cannot be the zero vector")


class PointClass(Enum):
    FLAT = "flat"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def second_form(tensor: SecondTensor, first: FirstForm) -> SecondForm:
    d1 = tensor.c11_1 * tensor.c12_2 - tensor.c11_2 * tensor.c12_1
    d2 = tensor.c11_1 * tensor.c22_2 - tensor.c11_2 * tensor.c22_1
    d3 = tensor.c12_1 * tensor.c22_2 - tensor.c12_2 * tensor.c22_1
    w = first.W
    return SecondForm(Delta1=d1, Delta2=d2, Delta3=d3,
                      L=2.0 * d1 / w, M=d2 / w, N=2.0 * d3 / w)


def first_form_value(ff: FirstForm, g: TangentDirection) -> float:
    """I(lam, mu) = E lam^2 + 2F lam mu + G mu^2."""
    return ff.E * g.lam * g.lam + 2.0 * ff.F * g.lam * g.mu + ff.G * g.mu * g.mu


def second_form_value(sf: SecondForm, g: TangentDirection) -> float:
    """II(lam, mu) = L lam^2 + 2M lam mu + N mu^2."""
    return sf.L * g.lam * g.lam + 2.0 * sf.M * g.lam * g.mu + sf.N * g.mu * g.mu


def _sqrt_i(ff: FirstForm, g: TangentDirection) -> float:
    i = first_form_value(ff, g)
    if i <= 0.0:
        raise ValueError("direction has non-positive metric length")
    return math.sqrt(i)


def zeta(g1: TangentDirection, g2: TangentDirection,
         sf: SecondForm, ff: FirstForm) -> float:
    """Invariant pairing of two tangents; zero means the pair is conjugate."""
    num = (sf.L * g1.lam * g2.lam
           + sf.M * (g1.lam * g2.mu + g1.mu * g2.lam)
           + sf.N * g1.mu * g2.mu)
    return num / (_sqrt_i(ff, g1) * _sqrt_i(ff, g2))


def normal_curvature(g: TangentDirection, sf: SecondForm, ff: FirstForm) -> float:
    return second_form_value(sf, g) / first_form_value(ff, g)


def geodesic_torsion(g: TangentDirection, sf: SecondForm, ff: FirstForm) -> float:
    num = (g.lam * g.lam * (ff.E * sf.M - ff.F * sf.L)
           + g.lam * g.mu * (ff.E * sf.N - ff.G * sf.L)
           + g.mu * g.mu * (ff.F * sf.N - ff.G * sf.M))
    return num / (ff.W * first_form_value(ff, g))


def orthogonal_direction(g: TangentDirection, ff: FirstForm) -> TangentDirection:
    """The tangent perpendicular to g (rotated by +90 degrees in the metric)."""
    return TangentDirection(-(ff.F * g.lam + ff.G * g.mu) / ff.W,
                            (ff.E * g.lam + ff.F * g.mu) / ff.W)


@dataclass(frozen=True)
class WeingartenMap:
    """Entries of the invariant tangent-space map, its determinant k,
    kappa = -trace/2, and the roots of nu^2 + 2 kappa nu + k = 0."""

    g11: float
    g12: float
    g21: float
    g22: float
    k: float
    kappa: float
    char_roots: tuple[float, float]


def weingarten(sf: SecondForm, ff: FirstForm) -> WeingartenMap:
    w2 = ff.E * ff.G - ff.F * ff.F
    g11 = (ff.F * sf.M - ff.G * sf.L) / w2
    g12 = (ff.F * sf.L - ff.E * sf.M) / w2
    g21 = (ff.F * sf.N - ff.G * sf.M) / w2
    g22 = (ff.F * sf.M - ff.E * sf.N) / w2
    k = (sf.L * sf.N - sf.M * sf.M) / w2
    kappa = (ff.E * sf.N + ff.G * sf.L - 2.0 * ff.F * sf.M) / (2.0 * w2)
    s = math.sqrt(max(kappa * kappa - k, 0.0))
    return WeingartenMap(g11=g11, g12=g12, g21=g21, g22=g22, k=k, kappa=kappa,
                         char_roots=(-kappa + s, -kappa - s))


def classify_point(k: float, kappa: float, tol: float = DEFAULT_TOL,
                   kappa_tol: float | None = None) -> PointClass:
    kt = tol if kappa_tol is None else kappa_tol
    if abs(k) <= tol:
        return PointClass.FLAT if abs(kappa) <= kt else PointClass.PARABOLIC
    return PointClass.ELLIPTIC if k > 0.0 else PointClass.HYPERBOLIC


def _classification_scales(sf: SecondForm, ff: FirstForm) -> tuple[float, float]:
    """Roundoff-aware magnitudes of k and kappa for tolerance scaling."""
    w2 = ff.W * ff.W
    k_scale = (abs(sf.L * sf.N) + sf.M * sf.M) / w2
    kappa_scale = (abs(ff.E * sf.N) + abs(ff.G * sf.L)
                   + 2.0 * abs(ff.F * sf.M)) / (2.0 * w2)
    return k_scale, kappa_scale


@dataclass(frozen=True)
class DirectionSet:
    """Solutions of a quadratic in (lam : mu); ``whole_plane`` means every
    direction solves it."""

    directions: tuple[TangentDirection, ...]
    whole_plane: bool = False
    repeated: bool = False


def _normalize_direction(lam: float, mu: float, ff: FirstForm) -> TangentDirection:
    s = math.sqrt(first_form_value(ff, TangentDirection(lam, mu)))
    lam, mu = lam / s, mu / s
    if lam < 0.0 or (lam == 0.0 and mu < 0.0):
        lam, mu = -lam, -mu
    return TangentDirection(lam, mu)


def _quadratic_directions(a: float, b: float, c: float, ff: FirstForm,
                          scale: float, tol: float) -> DirectionSet:
    if max(abs(a), abs(b), abs(c)) <= tol * max(scale, 1e-300):
        return DirectionSet(directions=(), whole_plane=True)
    disc = b * b - 4.0 * a * c
    coeff_scale = max(abs(a), abs(b), abs(c))
    rep_tol = 1e-12 * coeff_scale * coeff_scale
    if disc < -rep_tol:
        return DirectionSet(directions=())
    if abs(a) < 1e-14 * coeff_scale and abs(c) < 1e-14 * coeff_scale:
        return DirectionSet(directions=(_normalize_direction(1.0, 0.0, ff),
                                        _normalize_direction(0.0, 1.0, ff)))
    if disc <= rep_tol:
        if abs(a) >= abs(c):
            return DirectionSet(directions=(_normalize_direction(-b / (2.0 * a), 1.0, ff),),
                                repeated=True)
        return DirectionSet(directions=(_normalize_direction(1.0, -b / (2.0 * c), ff),),
                            repeated=True)
    root = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(root, b if b != 0.0 else 1.0))
    if abs(a) >= abs(c):
        # roots in t = lam/mu
        t1 = q / a
        t2 = (c / q) if q != 0.0 else 0.0
        dirs = (_normalize_direction(t1, 1.0, ff), _normalize_direction(t2, 1.0, ff))
    else:
        s1 = q / c
        s2 = (a / q) if q != 0.0 else 0.0
        dirs = (_normalize_direction(1.0, s1, ff), _normalize_direction(1.0, s2, ff))
    return DirectionSet(directions=dirs)


def _u_alignment(g: TangentDirection, ff: FirstForm) -> float:
    return abs(ff.E * g.lam + ff.F * g.mu) / math.sqrt(ff.E)


def principal_tangents(sf: SecondForm, ff: FirstForm,
                       tol: float = DEFAULT_TOL) -> DirectionSet:
    """Directions with zero geodesic torsion, ordered u-aligned first.

    At a flat or minimal point every direction is principal and the
    whole-plane flag is set.
    """
    a = ff.E * sf.M - ff.F * sf.L
    b = ff.E * sf.N - ff.G * sf.L
    c = ff.F * sf.N - ff.G * sf.M
    s1 = max(abs(ff.E), abs(ff.F), abs(ff.G))
    s2 = max(abs(sf.L), abs(sf.M), abs(sf.N))
    ds = _quadratic_directions(a, b, c, ff, s1 * s2, tol)
    if len(ds.directions) == 2:
        d1, d2 = ds.directions
        if _u_alignment(d2, ff) > _u_alignment(d1, ff):
            ds = DirectionSet(directions=(d2, d1), repeated=ds.repeated)
    return ds


def asymptotic_tangents(sf: SecondForm, ff: FirstForm,
                        tol: float = DEFAULT_TOL) -> DirectionSet:
    """Self-conjugate directions; their count is fixed by the sign of k."""
    s2 = max(abs(sf.L), abs(sf.M), abs(sf.N))
    return _quadratic_directions(sf.L, 2.0 * sf.M, sf.N, ff, s2, tol)


def mean_curvature(tensor: SecondTensor, ff: FirstForm,
                   frame: NormalFrame) -> tuple[np.ndarray, CausalClass | None]:
    """Ambient mean curvature vector and its causal class (None when zero)."""
    w2 = ff.W * ff.W
    h1 = (ff.G * tensor.c11_1 - 2.0 * ff.F * tensor.c12_1 + ff.E * tensor.c22_1) / (2.0 * w2)
    h2 = (ff.G * tensor.c11_2 - 2.0 * ff.F * tensor.c12_2 + ff.E * tensor.c22_2) / (2.0 * w2)
    H = h1 * frame.n1 - h2 * frame.n2
    scale = (abs(ff.G * tensor.c11_1) + abs(2.0 * ff.F * tensor.c12_1)
             + abs(ff.E * tensor.c22_1) + abs(ff.G * tensor.c11_2)
             + abs(2.0 * ff.F * tensor.c12_2) + abs(ff.E * tensor.c22_2)) / (2.0 * w2)
    if norm2_euclid(H) <= (1e-12 * max(1.0, scale)) ** 2:
        return H, None
    return H, causal_class(H)


def gauss_curvature(tensor: SecondTensor, ff: FirstForm,
                    frame: NormalFrame | None = None) -> float:
    """Intrinsic curvature via the inner products of sigma on an orthonormal
    tangent pair (frame-independent)."""
    w2 = ff.W * ff.W
    return (tensor.c11_1 * tensor.c22_1 - tensor.c11_2 * tensor.c22_2
            - tensor.c12_1 * tensor.c12_1 + tensor.c12_2 * tensor.c12_2) / w2


def _orthonormal_sigma(tensor: SecondTensor, ff: FirstForm):
    """Components of sigma on the Gram-Schmidt orthonormal pair built from
    (z_u, z_v), for each normal index."""
    r = ff.F / ff.E
    sxx1, sxx2 = tensor.c11_1 / ff.E, tensor.c11_2 / ff.E
    sxy1 = (tensor.c12_1 - r * tensor.c11_1) / ff.W
    sxy2 = (tensor.c12_2 - r * tensor.c11_2) / ff.W
    syy1 = ff.E * (tensor.c22_1 - 2.0 * r * tensor.c12_1 + r * r * tensor.c11_1) / (ff.W * ff.W)
    syy2 = ff.E * (tensor.c22_2 - 2.0 * r * tensor.c12_2 + r * r * tensor.c11_2) / (ff.W * ff.W)
    return (sxx1, sxy1, syy1), (sxx2, sxy2, syy2)


def normal_connection_commutator(tensor: SecondTensor, ff: FirstForm,
                                 frame: NormalFrame | None = None) -> float:
    """Commutator pairing of the two shape operators; equals kappa."""
    (sxx1, sxy1, syy1), (sxx2, sxy2, syy2) = _orthonormal_sigma(tensor, ff)
    a1 = np.array([[sxx1, sxy1], [sxy1, syy1]])
    a2 = np.array([[sxx2, sxy2], [sxy2, syy2]])
    comm = a2 @ a1 - a1 @ a2
    return float(comm[1, 0])


@dataclass(frozen=True)
class InvariantReport:
    """Everything the forward direction produces at one parameter point."""

    at: tuple[float, float]
    first: FirstForm
    second: SecondForm
    k: float
    kappa: float
    K: float
    H: np.ndarray
    H_class: CausalClass | None
    nu1p: float
    nu2p: float
    point_class: PointClass
    weingarten: WeingartenMap
    principal: DirectionSet


def invariant_report(jet: SurfaceJet2, tol: float = DEFAULT_TOL,
                     frame: NormalFrame | None = None) -> InvariantReport:
    ff = first_form(jet)
    if frame is None:
        frame = normal_frame(jet, ff)
    tensor = second_tensor(jet, frame)
    sf = second_form(tensor, ff)
    wg = weingarten(sf, ff)
    k_scale, kappa_scale = _classification_scales(sf, ff)
    point_class = classify_point(wg.k, wg.kappa, tol * max(1.0, k_scale),
                                 tol * max(1.0, kappa_scale))
    H, H_class = mean_curvature(tensor, ff, frame)
    principal = principal_tangents(sf, ff, tol)
    if point_class is PointClass.FLAT:
        nu1p = nu2p = 0.0
    elif principal.whole_plane or len(principal.directions) < 2:
        nu1p = nu2p = wg.kappa
    else:
        nu1p = normal_curvature(principal.directions[0], sf, ff)
        nu2p = normal_curvature(principal.directions[1], sf, ff)
    return InvariantReport(at=jet.at, first=ff, second=sf, k=wg.k,
                           kappa=wg.kappa, K=gauss_curvature(tensor, ff),
                           H=H, H_class=H_class, nu1p=nu1p, nu2p=nu2p,
                           point_class=point_class, weingarten=wg,
                           principal=principal)


# ---------------------------------------------------------------------------
# indicatrix and curvature ellipse

class IndicatrixShape(Enum):
    ELLIPSE = "ellipse"
    HYPERBOLA = "hyperbola"
    PARALLEL_LINES = "parallel-lines"
    CIRCLE = "circle"
    RECTANGULAR_HYPERBOLA = "rectangular-hyperbola"


@dataclass(frozen=True)
class IndicatrixSpec:
    nu1p: float
    nu2p: float
    eps: int
    shape: IndicatrixShape


def indicatrix(report: InvariantReport, tol: float = DEFAULT_TOL) -> IndicatrixSpec:
    """Conic nu' X^2 + nu'' Y^2 = eps in the principal tangent axes."""
    if report.point_class is PointClass.FLAT:
        raise FrameError("indicatrix is undefined at a flat point")
    nu1, nu2 = report.nu1p, report.nu2p
    s = max(1.0, abs(nu1), abs(nu2))
    if report.point_class is PointClass.ELLIPTIC:
        shape = (IndicatrixShape.CIRCLE if abs(nu1 - nu2) <= tol * s
                 else IndicatrixShape.ELLIPSE)
        eps = 1 if nu1 + nu2 > 0.0 else -1
    elif report.point_class is PointClass.HYPERBOLIC:
        shape = (IndicatrixShape.RECTANGULAR_HYPERBOLA if abs(nu1 + nu2) <= tol * s
                 else IndicatrixShape.HYPERBOLA)
        eps = 1
    else:
        shape = IndicatrixShape.PARALLEL_LINES
        eps = 1 if nu1 + nu2 > 0.0 else -1
    return IndicatrixSpec(nu1p=nu1, nu2p=nu2, eps=eps, shape=shape)


class EllipseDegeneracy(Enum):
    NON_DEGENERATE = "non-degenerate"
    LINE_SEGMENT = "line-segment"
    POINT = "point"


@dataclass(frozen=True)
class EllipseSample:
    """Normal-curvature ellipse sampled over unit tangents.

    Coordinates are with respect to (n1, n2): a vector (a1, a2) stands for
    a1*n1 + a2*n2.  ``points`` are the corresponding ambient vectors.
    """

    center_coords: np.ndarray        # (2,), the mean curvature vector
    half_diff_coords: np.ndarray     # (2,), (sigma(x,x) - sigma(y,y)) / 2
    conjugate_coords: np.ndarray     # (2,), sigma(x,y)
    coords: np.ndarray               # (n, 2)
    points: np.ndarray               # (n, 4)
    degeneracy: EllipseDegeneracy
    collinear_with_h: bool


def curvature_ellipse(tensor: SecondTensor, ff: FirstForm, frame: NormalFrame,
                      n_samples: int = 64,
                      degeneracy_tol: float = 1e-8) -> EllipseSample:
    (sxx1, sxy1, syy1), (sxx2, sxy2, syy2) = _orthonormal_sigma(tensor, ff)
    # (n1, n2) coordinates carry the sign flip of the timelike component
    sxx = np.array([sxx1, -sxx2])
    sxy = np.array([sxy1, -sxy2])
    syy = np.array([syy1, -syy2])
    center = 0.5 * (sxx + syy)
    half_diff = 0.5 * (sxx - syy)
    coeff = np.column_stack([half_diff, sxy])
    s1, s2 = np.linalg.svd(coeff, compute_uv=False)
    h_norm = float(np.hypot(center[0], center[1]))
    scale = max(s1, h_norm, 1e-300)
    if s1 <= 1e-12 * max(1.0, h_norm):
        degeneracy = EllipseDegeneracy.POINT
    elif s2 <= degeneracy_tol * s1:
        degeneracy = EllipseDegeneracy.LINE_SEGMENT
    else:
        degeneracy = EllipseDegeneracy.NON_DEGENERATE
    # dominant axis direction for the collinearity test
    u_mat, _, _ = np.linalg.svd(coeff)
    axis = u_mat[:, 0]
    cross = center[0] * axis[1] - center[1] * axis[0]
    collinear = bool(abs(cross) <= 1e-8 * scale or h_norm <= 1e-12 * scale)
    psi = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    coords = (center[None, :] + np.cos(2 * psi)[:, None] * half_diff[None, :]
              + np.sin(2 * psi)[:, None] * sxy[None, :])
    points = coords[:, 0:1] * frame.n1[None, :] + coords[:, 1:2] * frame.n2[None, :]
    return EllipseSample(center_coords=center, half_diff_coords=half_diff,
                         conjugate_coords=sxy, coords=coords, points=points,
                         degeneracy=degeneracy, collinear_with_h=collinear)


# ---------------------------------------------------------------------------
# predicates and the reparametrization contract

@dataclass(frozen=True)
class Predicates:
    is_minimal: bool
    is_flat_normal_connection: bool
    is_umbilical_free: bool
    tol: float


def predicates(report: InvariantReport, tol: float = DEFAULT_TOL) -> Predicates:
    gap = report.kappa * report.kappa - report.k
    is_minimal = gap <= tol * max(1.0, report.kappa * report.kappa)
    return Predicates(is_minimal=is_minimal,
                      is_flat_normal_connection=abs(report.kappa) <= tol,
                      is_umbilical_free=not is_minimal,
                      tol=tol)


@dataclass(frozen=True)
class ReparamCheck:
    zeta_old: float
    zeta_new: float
    eps: float


def reparametrize_check(surface: SurfaceSpec, change: tuple[Expr, Expr],
                        g1: TangentDirection, g2: TangentDirection,
                        at: tuple[float, float]) -> ReparamCheck:
    """Recompute the tangent-pair invariant after a parameter change.

    ``change`` gives (u, v) as expressions of the new parameters; ``at`` is a
    point in the new parameters.  Contract: zeta_new == eps * zeta_old with
    eps the sign of the Jacobian.  The original normal frame is reused so
    that the comparison isolates the parameter change.
    """
    cu, cv = change
    ju = lift(cu, at)
    jv = lift(cv, at)
    jac = ju.d_u * jv.d_v - ju.d_v * jv.d_u
    if jac == 0.0:
        raise ValueError(
            f"parameter change is singular (J = 0) at ({at[0]:.17g}, {at[1]:.17g})")
    jet_old = surface_jet(surface, (ju.val, jv.val))
    ff_old = first_form(jet_old)
    frame = normal_frame(jet_old, ff_old)
    sf_old = second_form(second_tensor(jet_old, frame), ff_old)
    zeta_old = zeta(g1, g2, sf_old, ff_old)

    composed = SurfaceSpec(
        coords=tuple(substitute(c, {"u": cu, "v": cv}) for c in surface.coords))
    jet_new = surface_jet(composed, at)
    ff_new = first_form(jet_new)
    sf_new = second_form(second_tensor(jet_new, frame), ff_new)

    def pull_back(g: TangentDirection) -> TangentDirection:
        return TangentDirection((jv.d_v * g.lam - ju.d_v * g.mu) / jac,
                                (-jv.d_u * g.lam + ju.d_u * g.mu) / jac)

    zeta_new = zeta(pull_back(g1), pull_back(g2), sf_new, ff_new)
    return ReparamCheck(zeta_old=zeta_old, zeta_new=zeta_new,
                        eps=1.0 if jac > 0.0 else -1.0)
