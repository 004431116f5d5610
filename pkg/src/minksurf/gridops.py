"""Vectorized evaluation of the pointwise pipeline over batches of points.

Grid sweeps (CLI commands, field extraction for the reconstruction solver,
the acceptance suites) run through this module; results match the scalar
operations to roundoff, which the test suite checks.  Points are processed
independently, so batches may be evaluated concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FrameError, NotSpacelikeError
from .exprs import SurfaceSpec
from .forms import first_form, normal_frame
from .jets import SurfaceJet2, surface_jets_batch
from .lorentz import CausalClass

# causal / point-class codes used in array form
H_NONE, H_SPACELIKE, H_TIMELIKE, H_LIGHTLIKE = 0, 1, 2, 3
PC_FLAT, PC_ELLIPTIC, PC_PARABOLIC, PC_HYPERBOLIC = 0, 1, 2, 3

H_CODE_TO_CLASS = {H_NONE: None, H_SPACELIKE: CausalClass.SPACELIKE,
                   H_TIMELIKE: CausalClass.TIMELIKE,
                   H_LIGHTLIKE: CausalClass.LIGHTLIKE}
PC_NAMES = {PC_FLAT: "flat", PC_ELLIPTIC: "elliptic",
            PC_PARABOLIC: "parabolic", PC_HYPERBOLIC: "hyperbolic"}


def minner(a, b):
    """Minkowski inner product along the last axis."""
    return (a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
            + a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3])


def mdual(a, b, c):
    """Vector Minkowski-orthogonal to a, b, c with <v, mdual> = det(a,b,c,v)."""

    def det3(i, j, k):
        return (a[..., i] * (b[..., j] * c[..., k] - b[..., k] * c[..., j])
                - a[..., j] * (b[..., i] * c[..., k] - b[..., k] * c[..., i])
                + a[..., k] * (b[..., i] * c[..., j] - b[..., j] * c[..., i]))

    m0 = det3(1, 2, 3)
    m1 = det3(0, 2, 3)
    m2 = det3(0, 1, 3)
    m3 = det3(0, 1, 2)
    # covector (-m0, m1, -m2, m3) raised with the metric
    return np.stack([-m0, m1, -m2, -m3], axis=-1)


@dataclass
class PointBatch:
    """Pointwise pipeline results for a flat list of parameter points."""

    us: np.ndarray
    vs: np.ndarray
    jets: np.ndarray          # (n, 4, 6)
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    W: np.ndarray
    sig_uu: np.ndarray        # (n, 4) ambient normal parts of z_uu, z_uv, z_vv
    sig_uv: np.ndarray
    sig_vv: np.ndarray
    n1: np.ndarray            # (n, 4) normal frame
    n2: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    k: np.ndarray
    kappa: np.ndarray
    K: np.ndarray
    H: np.ndarray             # (n, 4)
    hh: np.ndarray            # <H, H>
    h_code: np.ndarray        # int codes
    point_code: np.ndarray
    nu1p: np.ndarray
    nu2p: np.ndarray
    dir1: np.ndarray          # (n, 2) principal direction coordinates
    dir2: np.ndarray
    whole_plane: np.ndarray   # bool: every direction principal

    @property
    def n_points(self) -> int:
        return self.us.shape[0]

    def jet_at(self, i: int) -> SurfaceJet2:
        s = self.jets[i]
        return SurfaceJet2(at=(float(self.us[i]), float(self.vs[i])),
                           z=s[:, 0].copy(), z_u=s[:, 1].copy(),
                           z_v=s[:, 2].copy(), z_uu=s[:, 3].copy(),
                           z_uv=s[:, 4].copy(), z_vv=s[:, 5].copy())


def _first_bad(mask, us, vs):
    i = int(np.argmax(mask))
    return float(us[i]), float(vs[i])


def point_batch(surface: SurfaceSpec, us, vs, tol: float = 1e-9) -> PointBatch:
    us = np.ascontiguousarray(us, dtype=float)
    vs = np.ascontiguousarray(vs, dtype=float)
    return pipeline_from_jets(surface_jets_batch(surface, us, vs), us, vs, tol)


def pipeline_from_jets(jets: np.ndarray, us, vs, tol: float = 1e-9) -> PointBatch:
    """Run the pointwise pipeline on precomputed jets of shape (n, 4, 6)."""
    us = np.ascontiguousarray(us, dtype=float)
    vs = np.ascontiguousarray(vs, dtype=float)
    z_u = jets[:, :, 1]
    z_v = jets[:, :, 2]
    z_uu = jets[:, :, 3]
    z_uv = jets[:, :, 4]
    z_vv = jets[:, :, 5]

    E = minner(z_u, z_u)
    F = minner(z_u, z_v)
    G = minner(z_v, z_v)
    disc = E * G - F * F
    bad = (E <= 0.0) | (disc <= 0.0)
    if bad.any():
        bu, bv = _first_bad(bad, us, vs)
        raise NotSpacelikeError(f"not spacelike at (u, v) = ({bu:.17g}, {bv:.17g})")
    W = np.sqrt(disc)

    def normal_part(w):
        p = minner(w, z_u)
        q = minner(w, z_v)
        a = (G * p - F * q) / disc
        b = (E * q - F * p) / disc
        return w - a[:, None] * z_u - b[:, None] * z_v

    sig_uu = normal_part(z_uu)
    sig_uv = normal_part(z_uv)
    sig_vv = normal_part(z_vv)

    H = (G[:, None] * sig_uu - 2.0 * F[:, None] * sig_uv
         + E[:, None] * sig_vv) / (2.0 * disc[:, None])
    hh = minner(H, H)
    he = (H * H).sum(axis=1)
    h_scale = (np.abs(G) * np.linalg.norm(sig_uu, axis=1)
               + 2.0 * np.abs(F) * np.linalg.norm(sig_uv, axis=1)
               + np.abs(E) * np.linalg.norm(sig_vv, axis=1)) / (2.0 * disc)
    use_h = (he > (1e-8 * np.maximum(h_scale, 1e-30)) ** 2) & (np.abs(hh) > 1e-10 * he)
    spacelike_h = use_h & (hh > 0.0)
    timelike_h = use_h & (hh < 0.0)
    fallback = ~use_h

    n1 = np.empty_like(H)
    n2 = np.empty_like(H)
    if spacelike_h.any():
        idx = spacelike_h
        n1[idx] = H[idx] / np.sqrt(hh[idx])[:, None]
        raw = mdual(z_u[idx], z_v[idx], n1[idx])
        q = minner(raw, raw)
        if (q >= 0.0).any():
            bu, bv = _first_bad(q >= 0.0, us[idx], vs[idx])
            raise FrameError(f"degenerate normal space at (u, v) = ({bu:.17g}, {bv:.17g})")
        cand = raw / np.sqrt(-q)[:, None]
        cand[cand[:, 3] < 0.0] *= -1.0
        n2[idx] = cand
    if timelike_h.any():
        idx = timelike_h
        n2[idx] = H[idx] / np.sqrt(-hh[idx])[:, None]
        raw = mdual(z_u[idx], z_v[idx], n2[idx])
        q = minner(raw, raw)
        if (q <= 0.0).any():
            bu, bv = _first_bad(q <= 0.0, us[idx], vs[idx])
            raise FrameError(f"degenerate normal space at (u, v) = ({bu:.17g}, {bv:.17g})")
        n1[idx] = raw / np.sqrt(q)[:, None]
    if fallback.any():
        # rare branch (vanishing or lightlike mean curvature); scalar code path
        for i in np.flatnonzero(fallback):
            s = jets[i]
            jet = SurfaceJet2(at=(float(us[i]), float(vs[i])), z=s[:, 0],
                              z_u=s[:, 1], z_v=s[:, 2], z_uu=s[:, 3],
                              z_uv=s[:, 4], z_vv=s[:, 5])
            fr = normal_frame(jet, first_form(jet))
            n1[i] = fr.n1
            n2[i] = fr.n2

    # orientation: flip n1 where {z_u, z_v, n1, n2} is negatively oriented
    frames = np.stack([z_u, z_v, n1, n2], axis=1)
    dets = np.linalg.det(frames)
    n1[dets <= 0.0] *= -1.0

    c11_1 = minner(z_uu, n1)
    c11_2 = minner(z_uu, n2)
    c12_1 = minner(z_uv, n1)
    c12_2 = minner(z_uv, n2)
    c22_1 = minner(z_vv, n1)
    c22_2 = minner(z_vv, n2)

    d1 = c11_1 * c12_2 - c11_2 * c12_1
    d2 = c11_1 * c22_2 - c11_2 * c22_1
    d3 = c12_1 * c22_2 - c12_2 * c22_1
    L = 2.0 * d1 / W
    M = d2 / W
    N = 2.0 * d3 / W

    k = (L * N - M * M) / disc
    kappa = (E * N + G * L - 2.0 * F * M) / (2.0 * disc)
    K = (c11_1 * c22_1 - c11_2 * c22_2 - c12_1 ** 2 + c12_2 ** 2) / disc

    h_code = np.full(us.shape, H_NONE, dtype=np.int64)
    h_scale_rep = h_scale  # same combination as the scalar mean_curvature
    nonzero = he > (1e-12 * np.maximum(1.0, h_scale_rep)) ** 2
    light = nonzero & (np.abs(hh) <= 1e-10 * he)
    h_code[nonzero & (hh > 0.0) & ~light] = H_SPACELIKE
    h_code[nonzero & (hh < 0.0) & ~light] = H_TIMELIKE
    h_code[light] = H_LIGHTLIKE

    k_scale = (np.abs(L * N) + M * M) / disc
    kappa_scale = (np.abs(E * N) + np.abs(G * L) + 2.0 * np.abs(F * M)) / (2.0 * disc)
    tol_k = tol * np.maximum(1.0, k_scale)
    tol_kappa = tol * np.maximum(1.0, kappa_scale)
    point_code = np.full(us.shape, PC_HYPERBOLIC, dtype=np.int64)
    small_k = np.abs(k) <= tol_k
    point_code[small_k & (np.abs(kappa) <= tol_kappa)] = PC_FLAT
    point_code[small_k & (np.abs(kappa) > tol_kappa)] = PC_PARABOLIC
    point_code[~small_k & (k > 0.0)] = PC_ELLIPTIC

    dir1, dir2, whole = _principal_batch(E, F, G, W, L, M, N, tol)
    nu1p = _normal_curvature_batch(E, F, G, L, M, N, dir1)
    nu2p = _normal_curvature_batch(E, F, G, L, M, N, dir2)
    flat = point_code == PC_FLAT
    nu1p[flat] = 0.0
    nu2p[flat] = 0.0
    umb = whole & ~flat
    nu1p[umb] = kappa[umb]
    nu2p[umb] = kappa[umb]

    return PointBatch(us=us, vs=vs, jets=jets, E=E, F=F, G=G, W=W,
                      sig_uu=sig_uu, sig_uv=sig_uv, sig_vv=sig_vv,
                      n1=n1, n2=n2, L=L, M=M, N=N, k=k, kappa=kappa, K=K,
                      H=H, hh=hh, h_code=h_code, point_code=point_code,
                      nu1p=nu1p, nu2p=nu2p, dir1=dir1, dir2=dir2,
                      whole_plane=whole)


def _normal_curvature_batch(E, F, G, L, M, N, d):
    lam, mu = d[:, 0], d[:, 1]
    ii = L * lam * lam + 2.0 * M * lam * mu + N * mu * mu
    i1 = E * lam * lam + 2.0 * F * lam * mu + G * mu * mu
    return ii / i1


def _principal_batch(E, F, G, W, L, M, N, tol):
    """Principal direction pair per point, u-aligned direction first, signed
    so that <x, z_u> >= 0 and <y, z_v> >= 0."""
    a = E * M - F * L
    b = E * N - G * L
    c = F * N - G * M
    coeff_scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.abs(c))
    ref = np.maximum(np.abs(E), np.maximum(np.abs(F), np.abs(G))) * \
        np.maximum(np.abs(L), np.maximum(np.abs(M), np.abs(N)))
    whole = coeff_scale <= tol * np.maximum(ref, 1e-300)

    disc = np.maximum(b * b - 4.0 * a * c, 0.0)
    root = np.sqrt(disc)
    sign_b = np.where(b >= 0.0, 1.0, -1.0)
    q = -0.5 * (b + sign_b * root)
    rep = disc <= 1e-12 * coeff_scale * coeff_scale

    n_pts = E.shape[0]
    lam1 = np.empty(n_pts)
    mu1 = np.empty(n_pts)
    lam2 = np.empty(n_pts)
    mu2 = np.empty(n_pts)

    safe = lambda num, den: np.divide(num, den, out=np.zeros_like(num),
                                      where=den != 0.0)
    use_a = (np.abs(a) >= np.abs(c)) & (np.abs(a) > 0.0)
    # pivot on a: roots in lam/mu
    lam1[use_a] = safe(q, a)[use_a]
    mu1[use_a] = 1.0
    lam2[use_a] = safe(c, q)[use_a]
    mu2[use_a] = 1.0
    # pivot on c: roots in mu/lam
    use_c = ~use_a & (np.abs(c) > 0.0)
    lam1[use_c] = 1.0
    mu1[use_c] = safe(q, c)[use_c]
    lam2[use_c] = 1.0
    mu2[use_c] = safe(a, q)[use_c]
    # a and c negligible: coordinate directions
    rest = ~use_a & ~use_c
    lam1[rest] = 1.0
    mu1[rest] = 0.0
    lam2[rest] = 0.0
    mu2[rest] = 1.0
    # degenerate cases: u-direction plus its orthogonal complement
    degen = whole | rep
    lam1[degen] = 1.0
    mu1[degen] = 0.0
    lam2[degen] = -F[degen] / (W[degen] * np.sqrt(E[degen]))
    mu2[degen] = np.sqrt(E[degen]) / W[degen]

    def normalize(lam, mu):
        ii = E * lam * lam + 2.0 * F * lam * mu + G * mu * mu
        s = np.sqrt(ii)
        return lam / s, mu / s

    lam1, mu1 = normalize(lam1, mu1)
    lam2, mu2 = normalize(lam2, mu2)

    # order: u-aligned direction first
    a1 = np.abs(E * lam1 + F * mu1)
    a2 = np.abs(E * lam2 + F * mu2)
    swap = a2 > a1
    lam1s = np.where(swap, lam2, lam1)
    mu1s = np.where(swap, mu2, mu1)
    lam2s = np.where(swap, lam1, lam2)
    mu2s = np.where(swap, mu1, mu2)

    # signs: <x, z_u> >= 0 (ties by <x, z_v>), <y, z_v> >= 0 (ties by <y, z_u>)
    def fix_sign(lam, mu, primary, secondary):
        s = np.where(primary != 0.0, np.sign(primary), np.sign(secondary))
        s = np.where(s == 0.0, 1.0, s)
        return lam * s, mu * s

    lam1s, mu1s = fix_sign(lam1s, mu1s, E * lam1s + F * mu1s, F * lam1s + G * mu1s)
    lam2s, mu2s = fix_sign(lam2s, mu2s, F * lam2s + G * mu2s, E * lam2s + F * mu2s)
    return (np.stack([lam1s, mu1s], axis=1),
            np.stack([lam2s, mu2s], axis=1), whole)


# ---------------------------------------------------------------------------
# grids of invariants

@dataclass
class InvariantGrid:
    """Cartesian-grid invariants in row-major (u index, v index) layout."""

    u_axis: np.ndarray
    v_axis: np.ndarray
    batch: PointBatch

    def reshape(self, field: np.ndarray) -> np.ndarray:
        return field.reshape(self.u_axis.size, self.v_axis.size, *field.shape[1:])


def invariant_grid(surface: SurfaceSpec, u_axis, v_axis,
                   tol: float = 1e-9) -> InvariantGrid:
    u_axis = np.asarray(u_axis, dtype=float)
    v_axis = np.asarray(v_axis, dtype=float)
    uu, vv = np.meshgrid(u_axis, v_axis, indexing="ij")
    batch = point_batch(surface, uu.ravel(), vv.ravel(), tol)
    return InvariantGrid(u_axis=u_axis, v_axis=v_axis, batch=batch)


# ---------------------------------------------------------------------------
# frame fields with finite-difference derivatives

# stencil groups: center, u-offsets (-2h, -h, +h, +2h), v-offsets likewise
_STENCIL_U = np.array([0.0, -2.0, -1.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0])
_STENCIL_V = np.array([0.0, 0.0, 0.0, 0.0, 0.0, -2.0, -1.0, 1.0, 2.0])


def _fd5(f_m2, f_m1, f_p1, f_p2, h):
    return (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h)


@dataclass
class FrenetBatch:
    """Frame field and the eight invariant functions at a list of points."""

    us: np.ndarray
    vs: np.ndarray
    x: np.ndarray             # (n, 4) frame members
    y: np.ndarray
    b: np.ndarray
    l: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    h_code: np.ndarray        # H_SPACELIKE or H_TIMELIKE per point
    k: np.ndarray             # reference invariants from the pointwise path
    kappa: np.ndarray
    K: np.ndarray
    H: np.ndarray
    sqrt_e: np.ndarray        # metric roots of the (principal) parameters
    sqrt_g: np.ndarray

    @property
    def n_points(self) -> int:
        return self.us.shape[0]

    def h_case(self) -> CausalClass:
        """Uniform causal type of H, or an error at the first change."""
        if (self.h_code == H_SPACELIKE).all():
            return CausalClass.SPACELIKE
        if (self.h_code == H_TIMELIKE).all():
            return CausalClass.TIMELIKE
        i = int(np.argmax(self.h_code != self.h_code[0]))
        raise FrameError(
            "mean curvature changes causal type across the patch near "
            f"(u, v) = ({self.us[i]:.6g}, {self.vs[i]:.6g})")


def _frenet_frames(pb: PointBatch):
    """Build (x, y, b, l) and the pointwise sigma scalars for a batch."""
    bad = pb.h_code == H_NONE
    if bad.any():
        bu, bv = _first_bad(bad, pb.us, pb.vs)
        raise FrameError(f"minimal point: frame undefined at (u, v) = ({bu:.17g}, {bv:.17g})")
    bad = pb.h_code == H_LIGHTLIKE
    if bad.any():
        bu, bv = _first_bad(bad, pb.us, pb.vs)
        raise FrameError("lightlike mean curvature unsupported at "
                         f"(u, v) = ({bu:.17g}, {bv:.17g})")

    z_u = pb.jets[:, :, 1]
    z_v = pb.jets[:, :, 2]
    lam1, mu1 = pb.dir1[:, 0], pb.dir1[:, 1]
    lam2, mu2 = pb.dir2[:, 0], pb.dir2[:, 1]
    x = lam1[:, None] * z_u + mu1[:, None] * z_v
    y = lam2[:, None] * z_u + mu2[:, None] * z_v

    # l is the future-pointing unit timelike normal and b completes the
    # positive orientation; the mean curvature direction then carries a
    # definite sign in nu1, nu2, lam, mu.
    spacelike = pb.h_code == H_SPACELIKE
    b = np.empty_like(x)
    l = np.empty_like(x)
    if spacelike.any():
        idx = spacelike
        b_dir = pb.H[idx] / np.sqrt(pb.hh[idx])[:, None]
        raw = mdual(x[idx], y[idx], b_dir)
        q = minner(raw, raw)
        if (q >= 0.0).any():
            bu, bv = _first_bad(q >= 0.0, pb.us[idx], pb.vs[idx])
            raise FrameError(f"degenerate frame at (u, v) = ({bu:.17g}, {bv:.17g})")
        l_unit = raw / np.sqrt(-q)[:, None]
        s_l = np.where(l_unit[:, 3] >= 0.0, 1.0, -1.0)
        l[idx] = s_l[:, None] * l_unit
        b[idx] = -s_l[:, None] * b_dir
    timelike = ~spacelike
    if timelike.any():
        idx = timelike
        s_l = np.where(pb.H[idx, 3] >= 0.0, 1.0, -1.0)
        l[idx] = s_l[:, None] * pb.H[idx] / np.sqrt(-pb.hh[idx])[:, None]
        raw = mdual(x[idx], y[idx], l[idx])
        q = minner(raw, raw)
        if (q <= 0.0).any():
            bu, bv = _first_bad(q <= 0.0, pb.us[idx], pb.vs[idx])
            raise FrameError(f"degenerate frame at (u, v) = ({bu:.17g}, {bv:.17g})")
        b[idx] = -raw / np.sqrt(q)[:, None]

    def sigma_of(d1, d2):
        la, ma = d1[:, 0], d1[:, 1]
        lb, mb = d2[:, 0], d2[:, 1]
        return (la * lb)[:, None] * pb.sig_uu \
            + (la * mb + ma * lb)[:, None] * pb.sig_uv \
            + (ma * mb)[:, None] * pb.sig_vv

    s_xx = sigma_of(pb.dir1, pb.dir1)
    s_xy = sigma_of(pb.dir1, pb.dir2)
    s_yy = sigma_of(pb.dir2, pb.dir2)

    nu1 = np.empty(pb.n_points)
    nu2 = np.empty(pb.n_points)
    lam = np.empty(pb.n_points)
    mu = np.empty(pb.n_points)
    if spacelike.any():
        idx = spacelike
        nu1[idx] = minner(s_xx[idx], b[idx])
        nu2[idx] = minner(s_yy[idx], b[idx])
        lam[idx] = minner(s_xy[idx], b[idx])
        mu[idx] = minner(s_xy[idx], l[idx])
    if timelike.any():
        idx = timelike
        nu1[idx] = minner(s_xx[idx], l[idx])
        nu2[idx] = minner(s_yy[idx], l[idx])
        lam[idx] = minner(s_xy[idx], l[idx])
        mu[idx] = minner(s_xy[idx], b[idx])
    return x, y, b, l, nu1, nu2, lam, mu


def frenet_points(surface: SurfaceSpec, us, vs, h: float = 1e-3,
                  tol: float = 1e-9) -> FrenetBatch:
    """Frame field and all eight invariant functions at a list of points.

    The derivatives entering beta1, beta2, gamma1, gamma2 come from 5-point
    central differences of the sign-aligned frame field with step ``h``, so
    the points must sit at least 2h inside the surface's valid domain.
    """
    us = np.ascontiguousarray(us, dtype=float)
    vs = np.ascontiguousarray(vs, dtype=float)
    uu = (us[None, :] + h * _STENCIL_U[:, None]).ravel()
    vv = (vs[None, :] + h * _STENCIL_V[:, None]).ravel()
    pb = point_batch(surface, uu, vv, tol)
    return frenet_from_stencil(pb, us.shape[0], 9, h, h)


def frenet_from_stencil(pb: PointBatch, n: int, n_groups: int,
                        h_u: float, h_v: float) -> FrenetBatch:
    """Frenet data from a stencil-layout batch (groups stacked along axis 0).

    Group order is [center, u-offsets, v-offsets]: with 9 groups the offsets
    are (-2h, -h, +h, +2h) per axis (5-point differences), with 5 groups
    (-h, +h) per axis (3-point differences).
    """
    if pb.n_points != n * n_groups or n_groups not in (5, 9):
        raise ValueError("stencil batch must hold 5 or 9 groups of n points")
    x, y, b, l, nu1, nu2, lam, mu = _frenet_frames(pb)

    def groups(arr):
        return arr.reshape(n_groups, n, *arr.shape[1:])

    xg, yg, bg, lg = groups(x), groups(y), groups(b), groups(l)
    h_code = groups(pb.h_code)
    if (h_code != h_code[0]).any():
        raise FrameError("mean curvature changes causal type within a "
                         "finite-difference stencil; shrink the step")

    x0, y0 = xg[0], yg[0]
    b0, l0 = bg[0], lg[0]
    for gi in range(1, n_groups):
        xi, yi, bi = xg[gi], yg[gi], bg[gi]
        parity = np.zeros(n, dtype=np.int64)
        swap = np.abs(minner(xi, x0)) < np.abs(minner(yi, x0))
        xi2 = np.where(swap[:, None], yi, xi)
        yi2 = np.where(swap[:, None], xi, yi)
        parity += swap
        fx = minner(xi2, x0) < 0.0
        xi2 = np.where(fx[:, None], -xi2, xi2)
        parity += fx
        fy = minner(yi2, y0) < 0.0
        yi2 = np.where(fy[:, None], -yi2, yi2)
        parity += fy
        odd = (parity % 2).astype(bool)
        # b is orientation-derived and flips with the tangent parity;
        # l is canonical (future-pointing) and needs no alignment
        bi2 = np.where(odd[:, None], -bi, bi)
        xg[gi], yg[gi], bg[gi] = xi2, yi2, bi2

    if n_groups == 9:
        def dX(grp):
            return (_fd5(grp[1], grp[2], grp[3], grp[4], h_u),
                    _fd5(grp[5], grp[6], grp[7], grp[8], h_v))
    else:
        def dX(grp):
            return ((grp[2] - grp[1]) / (2.0 * h_u),
                    (grp[4] - grp[3]) / (2.0 * h_v))

    du_x, dv_x = dX(xg)
    du_y, dv_y = dX(yg)
    du_b, dv_b = dX(bg)

    pb0 = _center_slice(pb, n)
    lam1, mu1 = pb0.dir1[:, 0], pb0.dir1[:, 1]
    lam2, mu2 = pb0.dir2[:, 0], pb0.dir2[:, 1]

    def directional(du, dv, lam_c, mu_c):
        return lam_c[:, None] * du + mu_c[:, None] * dv

    dxb = directional(du_b, dv_b, lam1, mu1)
    dyb = directional(du_b, dv_b, lam2, mu2)
    dxx = directional(du_x, dv_x, lam1, mu1)
    dyy = directional(du_y, dv_y, lam2, mu2)

    beta1 = minner(dxb, l0)
    beta2 = minner(dyb, l0)
    gamma1 = minner(dxx, y0)
    gamma2 = minner(dyy, x0)

    nu1c, nu2c, lamc, muc = (g.reshape(n_groups, n)[0] for g in
                             (nu1, nu2, lam, mu))

    gap = pb0.kappa ** 2 - pb0.k
    scale = np.maximum(1.0, np.abs(nu1c) + np.abs(nu2c))
    inconsistent = (np.abs(muc) <= 1e-12 * scale) & (gap > 1e-8 * scale ** 2)
    if inconsistent.any():
        bu, bv = _first_bad(inconsistent, pb0.us, pb0.vs)
        raise FrameError("internal inconsistency: mu vanishes off the minimal "
                         f"locus at (u, v) = ({bu:.17g}, {bv:.17g})")

    return FrenetBatch(us=pb0.us, vs=pb0.vs, x=x0, y=y0, b=b0, l=l0,
                       nu1=nu1c, nu2=nu2c, lam=lamc, mu=muc,
                       beta1=beta1, beta2=beta2, gamma1=gamma1, gamma2=gamma2,
                       h_code=h_code[0], k=pb0.k, kappa=pb0.kappa, K=pb0.K,
                       H=pb0.H, sqrt_e=np.sqrt(pb0.E), sqrt_g=np.sqrt(pb0.G))


def _center_slice(pb: PointBatch, n: int) -> PointBatch:
    """View of the center stencil group (first n of 9n points)."""
    sl = slice(0, n)
    return PointBatch(
        us=pb.us[sl], vs=pb.vs[sl], jets=pb.jets[sl], E=pb.E[sl], F=pb.F[sl],
        G=pb.G[sl], W=pb.W[sl], sig_uu=pb.sig_uu[sl], sig_uv=pb.sig_uv[sl],
        sig_vv=pb.sig_vv[sl], n1=pb.n1[sl], n2=pb.n2[sl], L=pb.L[sl],
        M=pb.M[sl], N=pb.N[sl], k=pb.k[sl], kappa=pb.kappa[sl], K=pb.K[sl],
        H=pb.H[sl], hh=pb.hh[sl], h_code=pb.h_code[sl],
        point_code=pb.point_code[sl], nu1p=pb.nu1p[sl], nu2p=pb.nu2p[sl],
        dir1=pb.dir1[sl], dir2=pb.dir2[sl], whole_plane=pb.whole_plane[sl])
