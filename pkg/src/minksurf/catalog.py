"""Built-in surface families with closed-form ground truth.

Two general rotational families over a planar meridian (f(u), g(u)):

* m1: (f cos av, f sin av, g cosh bv, g sinh bv) -- spacelike mean curvature
* m2: (f cos av, f sin av, g sinh bv, g cosh bv) -- timelike mean curvature

plus degenerate test surfaces (plane, hyperplane graph, developable cone)
and a rejection-sampling generator of valid random specs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exprs as E
from .errors import FrameError
from .exprs import Expr, SurfaceSpec, parse_meridian, to_string
from .jets import lift
from .lorentz import CausalClass

N_CONSTRAINT_SAMPLES = 65


@dataclass(frozen=True)
class RotationalSurfaceSpec:
    variant: str                    # "m1" or "m2"
    f: Expr
    g: Expr
    alpha: float
    beta: float
    u_domain: tuple[float, float]
    v_domain: tuple[float, float] = (0.0, 2.0 * math.pi)

    def __post_init__(self):
        if self.variant not in ("m1", "m2"):
            raise ValueError("variant must be 'm1' or 'm2'")
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise ValueError("alpha and beta must be positive")
        bad = {"v"} & (E.vars_used(self.f) | E.vars_used(self.g))
        if bad:
            raise ValueError("meridian functions may depend on u only")

    def to_json(self) -> dict:
        return {"variant": self.variant, "f": to_string(self.f),
                "g": to_string(self.g), "alpha": self.alpha, "beta": self.beta,
                "u_domain": list(self.u_domain), "v_domain": list(self.v_domain)}

    @classmethod
    def from_json(cls, d: dict) -> "RotationalSurfaceSpec":
        return cls(variant=d["variant"], f=parse_meridian(d["f"]),
                   g=parse_meridian(d["g"]), alpha=float(d["alpha"]),
                   beta=float(d["beta"]), u_domain=tuple(d["u_domain"]),
                   v_domain=tuple(d.get("v_domain", (0.0, 2.0 * math.pi))))


def _meridian_jet(spec: RotationalSurfaceSpec, u: float):
    """(f, f', f'', g, g', g'') at u."""
    jf = lift(spec.f, (u, 0.0))
    jg = lift(spec.g, (u, 0.0))
    return jf.val, jf.d_u, jf.d_uu, jg.val, jg.d_u, jg.d_uu


def _forms_along_meridian(spec: RotationalSurfaceSpec, u: float):
    f, fp, fpp, g, gp, gpp = _meridian_jet(spec, u)
    a2, b2 = spec.alpha ** 2, spec.beta ** 2
    if spec.variant == "m1":
        e_coef = fp * fp + gp * gp
        g_coef = a2 * f * f - b2 * g * g
    else:
        e_coef = fp * fp - gp * gp
        g_coef = a2 * f * f + b2 * g * g
    return f, fp, fpp, g, gp, gpp, e_coef, g_coef


def check_constraints(spec: RotationalSurfaceSpec, margin: float = 0.0) -> None:
    """Verify the variant inequalities at sample points of the u-interval."""
    lo, hi = spec.u_domain
    for u in np.linspace(lo, hi, N_CONSTRAINT_SAMPLES):
        _, _, _, _, _, _, e_coef, g_coef = _forms_along_meridian(spec, float(u))
        if spec.variant == "m1":
            if g_coef <= margin:
                raise ValueError(
                    f"constraint alpha^2 f^2 - beta^2 g^2 > 0 violated at u = {u:.6g}")
            if e_coef <= margin:
                raise ValueError(
                    f"constraint f'^2 + g'^2 > 0 violated at u = {u:.6g}")
        else:
            if e_coef <= margin:
                raise ValueError(
                    f"constraint f'^2 - g'^2 > 0 violated at u = {u:.6g}")
            if g_coef <= margin:
                raise ValueError(
                    f"constraint alpha^2 f^2 + beta^2 g^2 > 0 violated at u = {u:.6g}")


def immersion(spec: RotationalSurfaceSpec) -> SurfaceSpec:
    """The four coordinate expressions of the chosen variant."""
    check_constraints(spec)
    av = E.Const(spec.alpha) * E.V
    bv = E.Const(spec.beta) * E.V
    if spec.variant == "m1":
        coords = (spec.f * E.cos(av), spec.f * E.sin(av),
                  spec.g * E.cosh(bv), spec.g * E.sinh(bv))
    else:
        coords = (spec.f * E.cos(av), spec.f * E.sin(av),
                  spec.g * E.sinh(bv), spec.g * E.cosh(bv))
    return SurfaceSpec(coords=coords, u_domain=spec.u_domain,
                       v_domain=spec.v_domain, name=spec.variant)


def closed_form_invariants(spec: RotationalSurfaceSpec, u: float):
    """(k, kappa, K) from the published closed forms of the two families."""
    f, fp, fpp, g, gp, gpp, e_coef, g_coef = _forms_along_meridian(spec, u)
    if e_coef <= 0.0 or g_coef <= 0.0:
        raise ValueError(f"spec invalid at u = {u:.6g} (metric coefficient <= 0)")
    a, b = spec.alpha, spec.beta
    a2, b2 = a * a, b * b
    t1 = gp * fpp - fp * gpp
    t2 = a2 * f * gp + b2 * g * fp
    c = g * fp - f * gp
    e2, g2 = e_coef * e_coef, g_coef * g_coef
    k = 4.0 * a2 * b2 * c * c * t1 * t2 / (e2 * e_coef * g2 * g_coef)
    kappa = a * b * c * (g_coef * t1 + e_coef * t2) / (e2 * g2)
    if spec.variant == "m1":
        kk = (-g_coef * t2 * t1 + a2 * b2 * e_coef * c * c) / (e2 * g2)
    else:
        kk = (g_coef * t2 * t1 - a2 * b2 * e_coef * c * c) / (e2 * g2)
    return k, kappa, kk


@dataclass(frozen=True)
class ClosedFormFrenet:
    """The eight frame invariants along a meridian, plus metric roots."""

    gamma1: float
    gamma2: float
    nu1: float
    nu2: float
    lam: float
    mu: float
    beta1: float
    beta2: float
    h_case: CausalClass
    sqrt_e: float
    sqrt_g: float


def closed_form_frenet(spec: RotationalSurfaceSpec, u: float) -> ClosedFormFrenet:
    f, fp, fpp, g, gp, gpp, e_coef, g_coef = _forms_along_meridian(spec, u)
    if e_coef <= 0.0 or g_coef <= 0.0:
        raise ValueError(f"spec invalid at u = {u:.6g} (metric coefficient <= 0)")
    a, b = spec.alpha, spec.beta
    a2, b2 = a * a, b * b
    se = math.sqrt(e_coef)
    t1 = gp * fpp - fp * gpp
    t2 = a2 * f * gp + b2 * g * fp
    nu1 = t1 / (e_coef * se)
    nu2 = -t2 / (se * g_coef)
    if abs(nu1 + nu2) <= 1e-12 * max(1.0, abs(nu1), abs(nu2)):
        raise FrameError(f"mean curvature vanishes at u = {u:.6g}; frame undefined")
    if spec.variant == "m1":
        gamma2 = -(a2 * f * fp - b2 * g * gp) / (se * g_coef)
        mu = a * b * (g * fp - f * gp) / (se * g_coef)
        beta2 = a * b * (f * fp + g * gp) / (se * g_coef)
        h_case = CausalClass.SPACELIKE
        sign = 1.0 if f > 0.0 else -1.0
    else:
        gamma2 = -(a2 * f * fp + b2 * g * gp) / (se * g_coef)
        mu = a * b * (f * gp - g * fp) / (se * g_coef)
        beta2 = a * b * (g * gp - f * fp) / (se * g_coef)
        h_case = CausalClass.TIMELIKE
        sign = 1.0 if fp > 0.0 else -1.0
    # the rotational normal frame is future-pointing only when sign = +1;
    # otherwise the canonical frame flips (b, l) and with it nu1, nu2, lam, mu
    return ClosedFormFrenet(gamma1=0.0, gamma2=gamma2, nu1=sign * nu1,
                            nu2=sign * nu2, lam=0.0, mu=sign * mu, beta1=0.0,
                            beta2=beta2, h_case=h_case, sqrt_e=se,
                            sqrt_g=math.sqrt(g_coef))


def de_sitter_spec(u_domain=(0.05, 0.7), v_domain=(0.0, 1.0)) -> RotationalSurfaceSpec:
    """m1 with f = cos u, g = sin u, alpha = beta = 1: a surface of the unit
    de Sitter hyperquadric with flat normal connection."""
    return RotationalSurfaceSpec(variant="m1", f=E.cos(E.U), g=E.sin(E.U),
                                 alpha=1.0, beta=1.0, u_domain=u_domain,
                                 v_domain=v_domain)


def hyperbolic_sphere_spec(u_domain=(0.05, 1.0), v_domain=(0.0, 1.0)) -> RotationalSurfaceSpec:
    """m2 with f = sinh u, g = cosh u, alpha = beta = 1: a surface of the unit
    hyperbolic sphere with flat normal connection."""
    return RotationalSurfaceSpec(variant="m2", f=E.sinh(E.U), g=E.cosh(E.U),
                                 alpha=1.0, beta=1.0, u_domain=u_domain,
                                 v_domain=v_domain)


def degenerate_surfaces() -> dict[str, SurfaceSpec]:
    """Flat-point test surfaces: a 2-plane, a hyperplane graph, and a
    developable cone that lies in no hyperplane."""
    zero = E.Const(0.0)
    plane = SurfaceSpec(coords=(E.U, E.V, zero, zero),
                        u_domain=(-1.0, 1.0), v_domain=(-1.0, 1.0), name="plane")
    graph = SurfaceSpec(coords=(E.U, E.V, E.U * E.U + E.V * E.V, zero),
                        u_domain=(-0.8, 0.8), v_domain=(-0.8, 0.8), name="graph")
    two_v = E.Const(2.0) * E.V
    cone = SurfaceSpec(coords=(E.U * E.cos(E.V), E.U * E.sin(E.V),
                               E.Const(0.3) * E.U * E.cos(two_v),
                               E.Const(0.2) * E.U * E.sin(two_v)),
                       u_domain=(1.0, 2.0), v_domain=(0.0, 0.8), name="cone")
    return {"plane": plane, "graph": graph, "cone": cone}


def _random_meridian(rng: np.random.Generator, base: float, slope: float,
                     amp: float) -> Expr:
    c0 = base + rng.uniform(-0.15, 0.15)
    c1 = rng.uniform(-slope, slope)
    c2 = rng.uniform(0.3, 1.0) * amp
    w = rng.uniform(0.5, 1.6)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    trig = E.sin if rng.random() < 0.5 else E.cos
    return (E.Const(c0) + E.Const(c1) * E.U
            + E.Const(c2) * trig(E.Const(w) * E.U + E.Const(phase)))


def random_spec(rng: np.random.Generator, variant: str,
                margin: float = 1e-3, frenet_margin: float = 5e-2,
                max_tries: int = 400) -> RotationalSurfaceSpec:
    """Rejection-sample a valid spec whose inequalities hold with a margin.

    ``frenet_margin`` keeps the mean curvature away from zero on the domain
    so the frame invariants are well defined everywhere.
    """
    for _ in range(max_tries):
        u0 = rng.uniform(-0.3, 0.3)
        u_domain = (u0, u0 + 0.8)
        alpha = rng.uniform(0.7, 1.4)
        beta = rng.uniform(0.6, 1.2)
        if variant == "m1":
            f = _random_meridian(rng, 1.6, 0.3, 0.25)
            g = _random_meridian(rng, 0.0, 0.3, 0.35)
        else:
            f = _random_meridian(rng, 1.2, 0.0, 0.3)
            g = _random_meridian(rng, 0.3, 0.15, 0.12)
        spec = RotationalSurfaceSpec(variant=variant, f=f, g=g, alpha=alpha,
                                     beta=beta, u_domain=u_domain,
                                     v_domain=(0.0, 0.8))
        try:
            check_constraints(spec, margin=margin)
        except ValueError:
            continue
        ok = True
        for u in np.linspace(u_domain[0], u_domain[1], 33):
            try:
                cf = closed_form_frenet(spec, float(u))
            except (FrameError, ValueError):
                ok = False
                break
            if abs(cf.nu1 + cf.nu2) / 2.0 < frenet_margin:
                ok = False
                break
        if ok:
            return spec
    raise RuntimeError(f"could not sample a valid {variant} spec "
                       f"in {max_tries} tries")
