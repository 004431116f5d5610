"""Geometric frame {x, y, b, l} and the eight invariant functions.

At every point with nonzero, non-lightlike mean curvature vector H there is
a canonical orthonormal frame: x, y are the principal tangents (u-aligned
first), the H-direction sits in the normal plane (b for spacelike H, l for
timelike H), and the remaining member completes the positive orientation.
Frame derivatives feeding beta1, beta2, gamma1, gamma2 come from central
differences of the sign-aligned frame field; everything else is pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gridops
from .errors import FrameError
from .exprs import SurfaceSpec
from .gridops import FrenetBatch, H_CODE_TO_CLASS, PC_FLAT
from .jets import SurfaceJet2
from .lorentz import CausalClass, inner


@dataclass(frozen=True)
class FrenetData:
    """Frame, the eight invariant functions, and reference invariants."""

    at: tuple[float, float]
    x: np.ndarray
    y: np.ndarray
    b: np.ndarray
    l: np.ndarray
    nu1: float
    nu2: float
    lam: float
    mu: float
    beta1: float
    beta2: float
    gamma1: float
    gamma2: float
    h_case: CausalClass
    k: float
    kappa: float
    K: float
    H: np.ndarray


def _data_from_batch(fb: FrenetBatch, i: int) -> FrenetData:
    return FrenetData(at=(float(fb.us[i]), float(fb.vs[i])),
                      x=fb.x[i], y=fb.y[i], b=fb.b[i], l=fb.l[i],
                      nu1=float(fb.nu1[i]), nu2=float(fb.nu2[i]),
                      lam=float(fb.lam[i]), mu=float(fb.mu[i]),
                      beta1=float(fb.beta1[i]), beta2=float(fb.beta2[i]),
                      gamma1=float(fb.gamma1[i]), gamma2=float(fb.gamma2[i]),
                      h_case=H_CODE_TO_CLASS[int(fb.h_code[i])],
                      k=float(fb.k[i]), kappa=float(fb.kappa[i]),
                      K=float(fb.K[i]), H=fb.H[i])


@dataclass(frozen=True)
class JetStencil:
    """Neighbor jets for the frame-field derivatives at one point.

    Either one jet per side and axis (3-point differences) or two
    (5-point); offsets are h_u, h_v in parameter space.
    """

    h_u: float
    h_v: float
    u_minus: SurfaceJet2
    u_plus: SurfaceJet2
    v_minus: SurfaceJet2
    v_plus: SurfaceJet2
    u_minus2: SurfaceJet2 | None = None
    u_plus2: SurfaceJet2 | None = None
    v_minus2: SurfaceJet2 | None = None
    v_plus2: SurfaceJet2 | None = None

    def five_point(self) -> bool:
        extras = (self.u_minus2, self.u_plus2, self.v_minus2, self.v_plus2)
        if all(j is not None for j in extras):
            return True
        if any(j is not None for j in extras):
            raise ValueError("supply either all or none of the second-ring jets")
        return False


def _stack_jets(jets: list[SurfaceJet2]) -> np.ndarray:
    out = np.empty((len(jets), 4, 6))
    for i, j in enumerate(jets):
        out[i, :, 0] = j.z
        out[i, :, 1] = j.z_u
        out[i, :, 2] = j.z_v
        out[i, :, 3] = j.z_uu
        out[i, :, 4] = j.z_uv
        out[i, :, 5] = j.z_vv
    return out


def frenet_at(jet: SurfaceJet2, stencil: JetStencil,
              tol: float = 1e-9) -> FrenetData:
    """Frame and the eight invariant functions from precomputed jets."""
    if stencil.five_point():
        jets = [jet, stencil.u_minus2, stencil.u_minus, stencil.u_plus,
                stencil.u_plus2, stencil.v_minus2, stencil.v_minus,
                stencil.v_plus, stencil.v_plus2]
        n_groups = 9
    else:
        jets = [jet, stencil.u_minus, stencil.u_plus,
                stencil.v_minus, stencil.v_plus]
        n_groups = 5
    us = np.array([j.at[0] for j in jets])
    vs = np.array([j.at[1] for j in jets])
    pb = gridops.pipeline_from_jets(_stack_jets(jets), us, vs, tol)
    fb = gridops.frenet_from_stencil(pb, 1, n_groups, stencil.h_u, stencil.h_v)
    return _data_from_batch(fb, 0)


def frenet_from_surface(surface: SurfaceSpec, at: tuple[float, float],
                        h: float = 1e-3, tol: float = 1e-9) -> FrenetData:
    """Frame and invariant functions of an analytic surface at one point."""
    fb = gridops.frenet_points(surface, np.array([at[0]], dtype=float),
                               np.array([at[1]], dtype=float), h=h, tol=tol)
    return _data_from_batch(fb, 0)


@dataclass(frozen=True)
class ConsistencyReport:
    """Residuals of the pointwise identities tying the frame functions to
    the independently computed invariants k, kappa, K and ||H||."""

    r_k: float
    r_kappa: float
    r_gauss: float
    r_mean: float

    @property
    def max_residual(self) -> float:
        return max(abs(self.r_k), abs(self.r_kappa),
                   abs(self.r_gauss), abs(self.r_mean))


def consistency(fd: FrenetData) -> ConsistencyReport:
    r_k = fd.k + 4.0 * fd.nu1 * fd.nu2 * fd.mu * fd.mu
    r_kappa = fd.kappa - (fd.nu1 - fd.nu2) * fd.mu
    if fd.h_case is CausalClass.SPACELIKE:
        r_gauss = fd.K - (fd.nu1 * fd.nu2 - fd.lam * fd.lam + fd.mu * fd.mu)
    else:
        r_gauss = fd.K - (-fd.nu1 * fd.nu2 + fd.lam * fd.lam - fd.mu * fd.mu)
    h_len = math.sqrt(abs(inner(fd.H, fd.H)))
    gap = max(fd.kappa * fd.kappa - fd.k, 0.0)
    r_mean = h_len - math.sqrt(gap) / (2.0 * abs(fd.mu))
    return ConsistencyReport(r_k=r_k, r_kappa=r_kappa, r_gauss=r_gauss,
                             r_mean=r_mean)


def allied_and_chen(fd: FrenetData, tol: float = 1e-9) -> tuple[np.ndarray, bool]:
    """Allied mean curvature vector and the Chen-surface flag (lambda = 0)."""
    if fd.h_case is CausalClass.SPACELIKE:
        gap = max(fd.kappa * fd.kappa - fd.k, 0.0)
        a_h = 0.5 * math.sqrt(gap) * fd.lam * fd.l
    else:
        a_h = 0.5 * (fd.nu1 + fd.nu2) * fd.lam * fd.mu * fd.b
    return a_h, bool(abs(fd.lam) <= tol)


# ---------------------------------------------------------------------------
# surfaces consisting of flat points

@dataclass(frozen=True)
class FlatScanReport:
    """Which branch of the flat-point dichotomy the sampled data supports."""

    branch: str                      # "hyperplane" or "developable"
    beta_max: float
    constant_normal: np.ndarray | None
    normal_deviation: float | None
    curvature_residual: float | None
    h_case: CausalClass | None
    n_points: int


def flat_point_scan(surface: SurfaceSpec, u_axis, v_axis, h: float = 1e-3,
                    tol: float = 1e-9, beta_tol: float = 1e-6) -> FlatScanReport:
    """Scan a grid of flat points and report the hyperplane / developable
    dichotomy data.

    All grid points must classify as flat (k = kappa = 0); otherwise this
    raises.  With beta1 = beta2 = 0 everywhere the frame member orthogonal
    to H is constant and a hyperplane is reported together with that normal
    and its maximal deviation over the grid; otherwise the surface data is
    checked against the developable branch (vanishing intrinsic curvature).
    """
    u_axis = np.asarray(u_axis, dtype=float)
    v_axis = np.asarray(v_axis, dtype=float)
    uu, vv = np.meshgrid(u_axis, v_axis, indexing="ij")
    us, vs = uu.ravel(), vv.ravel()
    pb = gridops.point_batch(surface, us, vs, tol)
    not_flat = pb.point_code != PC_FLAT
    if not_flat.any():
        i = int(np.argmax(not_flat))
        raise ValueError("grid contains a non-flat point at "
                         f"(u, v) = ({us[i]:.6g}, {vs[i]:.6g})")

    sig_scale = np.abs(pb.jets[:, :, 3:]).max()
    sig_max = max(np.abs(pb.sig_uu).max(), np.abs(pb.sig_uv).max(),
                  np.abs(pb.sig_vv).max())
    if sig_max <= 1e-10 * max(1.0, sig_scale):
        # totally geodesic: lies in a 2-plane, hence in hyperplanes
        n2 = pb.n2[0]
        dev = _direction_deviation(pb.n2, n2)
        return FlatScanReport(branch="hyperplane", beta_max=0.0,
                              constant_normal=n2, normal_deviation=dev,
                              curvature_residual=None, h_case=None,
                              n_points=pb.n_points)

    fb = gridops.frenet_points(surface, us, vs, h=h, tol=tol)
    h_case = fb.h_case()
    beta_max = float(max(np.abs(fb.beta1).max(), np.abs(fb.beta2).max()))
    if beta_max <= beta_tol:
        member = fb.l if h_case is CausalClass.SPACELIKE else fb.b
        dev = _direction_deviation(member, member[0])
        return FlatScanReport(branch="hyperplane", beta_max=beta_max,
                              constant_normal=member[0], normal_deviation=dev,
                              curvature_residual=None, h_case=h_case,
                              n_points=pb.n_points)
    residual = float(np.abs(fb.nu1 * fb.nu2 - fb.lam * fb.lam).max())
    return FlatScanReport(branch="developable", beta_max=beta_max,
                          constant_normal=None, normal_deviation=None,
                          curvature_residual=residual, h_case=h_case,
                          n_points=pb.n_points)


def _direction_deviation(vectors: np.ndarray, reference: np.ndarray) -> float:
    plus = np.linalg.norm(vectors - reference[None, :], axis=1)
    minus = np.linalg.norm(vectors + reference[None, :], axis=1)
    return float(np.minimum(plus, minus).max())
