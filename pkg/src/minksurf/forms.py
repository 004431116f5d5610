"""First fundamental form, normal frames, and the second fundamental tensor.

The normal frame {n1, n2} is Lorentz-orthonormal (n1 spacelike, n2 timelike)
with {z_u, z_v, n1, n2} positively oriented.  Where the mean curvature vector
is usable (nonzero, non-lightlike) the frame is aligned with it, which makes
the construction canonical and continuous; elsewhere a deterministic
Gram-Schmidt over basis seeds is used.  Downstream invariants do not depend
on the choice (the frame gauge is a hyperbolic rotation), which the test
suite verifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FrameError, NotSpacelikeError
from .jets import SurfaceJet2
from .lorentz import (E1, E2, E3, E4, CausalClass, causal_class, inner,
                      norm2_euclid, orientation_det)

DEGENERACY_TOL = 1e-8  # smallest allowed Gram-Schmidt normalization denominator


@dataclass(frozen=True)
class FirstForm:
    """Metric coefficients and the area element W = sqrt(EG - F^2)."""

    E: float
    F: float
    G: float
    W: float


@dataclass(frozen=True)
class NormalFrame:
    n1: np.ndarray  # spacelike unit
    n2: np.ndarray  # timelike unit


@dataclass(frozen=True)
class SecondTensor:
    """Normal components of the second partials: c_ij^k = <z_ij, n_k>."""

    c11_1: float
    c11_2: float
    c12_1: float
    c12_2: float
    c22_1: float
    c22_2: float


def first_form(jet: SurfaceJet2) -> FirstForm:
    E = inner(jet.z_u, jet.z_u)
    F = inner(jet.z_u, jet.z_v)
    G = inner(jet.z_v, jet.z_v)
    disc = E * G - F * F
    if E <= 0.0 or disc <= 0.0:
        raise NotSpacelikeError(
            f"not spacelike at (u, v) = ({jet.at[0]:.17g}, {jet.at[1]:.17g})")
    return FirstForm(E=E, F=F, G=G, W=math.sqrt(disc))


def tangential_coeffs(jet: SurfaceJet2, ff: FirstForm, w) -> tuple[float, float]:
    """Coefficients (a, b) with proj_T(w) = a z_u + b z_v."""
    p = inner(w, jet.z_u)
    q = inner(w, jet.z_v)
    w2 = ff.W * ff.W
    return (ff.G * p - ff.F * q) / w2, (ff.E * q - ff.F * p) / w2


def normal_part(jet: SurfaceJet2, ff: FirstForm, w) -> np.ndarray:
    a, b = tangential_coeffs(jet, ff, w)
    return w - a * jet.z_u - b * jet.z_v


def second_fundamental_vectors(jet: SurfaceJet2, ff: FirstForm):
    """Ambient normal components of z_uu, z_uv, z_vv (values of sigma on
    the coordinate fields)."""
    return (normal_part(jet, ff, jet.z_uu),
            normal_part(jet, ff, jet.z_uv),
            normal_part(jet, ff, jet.z_vv))


def mean_curvature_vector(jet: SurfaceJet2, ff: FirstForm) -> np.ndarray:
    """Frame-free ambient mean curvature vector (half trace of sigma)."""
    s_uu, s_uv, s_vv = second_fundamental_vectors(jet, ff)
    w2 = ff.W * ff.W
    return (ff.G * s_uu - 2.0 * ff.F * s_uv + ff.E * s_vv) / (2.0 * w2)


_SEED_PAIRS = ((E3, E4), (E1, E2), (E1, E3), (E1, E4), (E2, E3), (E2, E4))
_SEEDS = (E4, E3, E2, E1)


def _project_out(w, n):
    return w - (inner(w, n) / inner(n, n)) * n


def _mean_curvature_scale(jet: SurfaceJet2, ff: FirstForm) -> float:
    s_uu, s_uv, s_vv = second_fundamental_vectors(jet, ff)
    w2 = ff.W * ff.W
    return (abs(ff.G) * math.sqrt(norm2_euclid(s_uu))
            + 2.0 * abs(ff.F) * math.sqrt(norm2_euclid(s_uv))
            + abs(ff.E) * math.sqrt(norm2_euclid(s_vv))) / (2.0 * w2)


def _gram_schmidt_frame(jet: SurfaceJet2, ff: FirstForm) -> tuple[np.ndarray, np.ndarray]:
    best = None
    best_score = 0.0
    for s1, s2 in _SEED_PAIRS:
        w1 = normal_part(jet, ff, s1)
        q1 = inner(w1, w1)
        d1 = math.sqrt(abs(q1))
        if d1 <= DEGENERACY_TOL:
            continue
        na = w1 / d1
        w2 = _project_out(normal_part(jet, ff, s2), na)
        q2 = inner(w2, w2)
        d2 = math.sqrt(abs(q2))
        if d2 <= DEGENERACY_TOL or q1 * q2 >= 0.0:
            continue
        score = min(d1, d2)
        if score > best_score:
            best_score = score
            nb = w2 / d2
            best = (na, nb) if q1 > 0.0 else (nb, na)
    if best is None:
        raise FrameError(
            "degenerate normal space (no timelike direction among seeds) at "
            f"(u, v) = ({jet.at[0]:.17g}, {jet.at[1]:.17g})")
    return best


def normal_frame(jet: SurfaceJet2, ff: FirstForm | None = None) -> NormalFrame:
    """Positively oriented Lorentz-orthonormal normal pair at the jet's point."""
    if ff is None:
        ff = first_form(jet)
    H = mean_curvature_vector(jet, ff)
    h_scale = _mean_curvature_scale(jet, ff)
    hh = inner(H, H)
    he = norm2_euclid(H)
    use_h = (he > (1e-8 * max(h_scale, 1e-30)) ** 2
             and abs(hh) > 1e-10 * he)
    if use_h:
        if hh > 0.0:
            n1 = H / math.sqrt(hh)
            n2 = _complete_timelike(jet, ff, n1)
        else:
            n2 = H / math.sqrt(-hh)
            n1 = _complete_spacelike(jet, ff, n2)
        if n2[3] < 0.0 and hh > 0.0:
            n2 = -n2
    else:
        n1, n2 = _gram_schmidt_frame(jet, ff)
        if n2[3] < 0.0:
            n2 = -n2
    if orientation_det(jet.z_u, jet.z_v, n1, n2) <= 0.0:
        n1 = -n1
    return NormalFrame(n1=n1, n2=n2)


def _complete_timelike(jet, ff, n1):
    best = None
    best_d = 0.0
    for seed in _SEEDS:
        w = _project_out(normal_part(jet, ff, seed), n1)
        q = inner(w, w)
        if q >= 0.0:
            continue
        d = math.sqrt(-q)
        if d > best_d:
            best_d = d
            best = w / d
    if best is None or best_d <= DEGENERACY_TOL:
        raise FrameError(
            "degenerate normal space (no timelike direction among seeds) at "
            f"(u, v) = ({jet.at[0]:.17g}, {jet.at[1]:.17g})")
    return best


def _complete_spacelike(jet, ff, n2):
    best = None
    best_d = 0.0
    for seed in (E3, E1, E2, E4):
        w = _project_out(normal_part(jet, ff, seed), n2)
        q = inner(w, w)
        if q <= 0.0:
            continue
        d = math.sqrt(q)
        if d > best_d:
            best_d = d
            best = w / d
    if best is None or best_d <= DEGENERACY_TOL:
        raise FrameError(
            "degenerate normal space (no spacelike completion) at "
            f"(u, v) = ({jet.at[0]:.17g}, {jet.at[1]:.17g})")
    return best


def second_tensor(jet: SurfaceJet2, frame: NormalFrame) -> SecondTensor:
    return SecondTensor(
        c11_1=inner(jet.z_uu, frame.n1), c11_2=inner(jet.z_uu, frame.n2),
        c12_1=inner(jet.z_uv, frame.n1), c12_2=inner(jet.z_uv, frame.n2),
        c22_1=inner(jet.z_vv, frame.n1), c22_2=inner(jet.z_vv, frame.n2))


def sigma_vector(tensor: SecondTensor, frame: NormalFrame, which: str) -> np.ndarray:
    """Reassemble sigma(z_i, z_j) = c^1 n1 - c^2 n2 for which in {uu, uv, vv}."""
    c1, c2 = {"uu": (tensor.c11_1, tensor.c11_2),
              "uv": (tensor.c12_1, tensor.c12_2),
              "vv": (tensor.c22_1, tensor.c22_2)}[which]
    return c1 * frame.n1 - c2 * frame.n2


def rotate_frame(frame: NormalFrame, theta: float, eps_prime: int = 1) -> NormalFrame:
    """Hyperbolic rotation of the normal frame; the allowed gauge freedom."""
    if eps_prime not in (1, -1):
        raise ValueError("eps_prime must be +1 or -1")
    ch, sh = math.cosh(theta), math.sinh(theta)
    return NormalFrame(n1=eps_prime * (ch * frame.n1 + sh * frame.n2),
                       n2=eps_prime * (sh * frame.n1 + ch * frame.n2))


def align_frames(frames: list[NormalFrame]) -> list[NormalFrame]:
    """Propagate the overall sign (the eps' gauge) along a connected sweep.

    Flips both members together, preserving Lorentz orthonormality and
    orientation.  Run single-threaded per patch after the pointwise stage.
    """
    out: list[NormalFrame] = []
    prev = None
    for fr in frames:
        if prev is not None and inner(fr.n1, prev.n1) < 0.0:
            fr = NormalFrame(n1=-fr.n1, n2=-fr.n2)
        out.append(fr)
        prev = fr
    return out


def frame_causal_class(H) -> CausalClass:
    return causal_class(H)
