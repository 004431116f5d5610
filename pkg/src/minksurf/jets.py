"""Second-order forward-mode jets of immersions z(u, v).

``lift`` evaluates an expression tree to its value and all first and second
partials at a point (exact to roundoff); ``surface_jet`` applies it to the
four coordinates of a surface.  For externally sampled surfaces,
``jet_from_samples`` builds the same data from a position grid by central
finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .exprs import Expr, SurfaceSpec, _tape_cached

EPS_QUARTER = float(np.finfo(float).eps) ** 0.25  # default FD step scale


@dataclass(frozen=True)
class Scalar2Jet:
    """Value with first and second partials with respect to (u, v).

    Arithmetic follows the second-order Leibniz rules, so expression trees
    can be evaluated directly on jets; the compiled kernels implement the
    same tables.
    """

    val: float
    d_u: float = 0.0
    d_v: float = 0.0
    d_uu: float = 0.0
    d_uv: float = 0.0
    d_vv: float = 0.0

    @classmethod
    def constant(cls, value: float) -> "Scalar2Jet":
        return cls(float(value))

    @classmethod
    def variable_u(cls, value: float) -> "Scalar2Jet":
        return cls(float(value), d_u=1.0)

    @classmethod
    def variable_v(cls, value: float) -> "Scalar2Jet":
        return cls(float(value), d_v=1.0)

    def as_tuple(self):
        return (self.val, self.d_u, self.d_v, self.d_uu, self.d_uv, self.d_vv)

    def __add__(self, other):
        other = _as_jet(other)
        return Scalar2Jet(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_jet(other)
        return Scalar2Jet(*(a - b for a, b in zip(self.as_tuple(), other.as_tuple())))

    def __rsub__(self, other):
        return _as_jet(other) - self

    def __neg__(self):
        return Scalar2Jet(*(-a for a in self.as_tuple()))

    def __mul__(self, other):
        f = self
        g = _as_jet(other)
        return Scalar2Jet(
            f.val * g.val,
            f.d_u * g.val + f.val * g.d_u,
            f.d_v * g.val + f.val * g.d_v,
            f.d_uu * g.val + 2.0 * f.d_u * g.d_u + f.val * g.d_uu,
            f.d_uv * g.val + f.d_u * g.d_v + f.d_v * g.d_u + f.val * g.d_uv,
            f.d_vv * g.val + 2.0 * f.d_v * g.d_v + f.val * g.d_vv,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        f = self
        g = _as_jet(other)
        if g.val == 0.0:
            raise DomainError("division by zero")
        q0 = f.val / g.val
        qu = (f.d_u - q0 * g.d_u) / g.val
        qv = (f.d_v - q0 * g.d_v) / g.val
        return Scalar2Jet(
            q0, qu, qv,
            (f.d_uu - q0 * g.d_uu - 2.0 * qu * g.d_u) / g.val,
            (f.d_uv - q0 * g.d_uv - qu * g.d_v - qv * g.d_u) / g.val,
            (f.d_vv - q0 * g.d_vv - 2.0 * qv * g.d_v) / g.val,
        )

    def __rtruediv__(self, other):
        return _as_jet(other) / self

    def __pow__(self, p):
        if isinstance(p, (int, float)) and float(p) == int(p):
            return _jet_powi(self, int(p))
        if self.val <= 0.0:
            raise DomainError("power with non-integer exponent requires a positive base")
        return jet_exp(_as_jet(p) * jet_log(self))

    def chain(self, h0: float, h1: float, h2: float) -> "Scalar2Jet":
        """Compose with a scalar function given h(x), h'(x), h''(x) at val."""
        return Scalar2Jet(
            h0,
            h1 * self.d_u,
            h1 * self.d_v,
            h2 * self.d_u * self.d_u + h1 * self.d_uu,
            h2 * self.d_u * self.d_v + h1 * self.d_uv,
            h2 * self.d_v * self.d_v + h1 * self.d_vv,
        )


def _as_jet(x) -> Scalar2Jet:
    if isinstance(x, Scalar2Jet):
        return x
    return Scalar2Jet.constant(x)


def _jet_powi(f: Scalar2Jet, n: int) -> Scalar2Jet:
    if n == 0:
        return Scalar2Jet.constant(1.0)
    if n < 0:
        if f.val == 0.0:
            raise DomainError("zero base with negative integer exponent")
        x = f.val
        f = f.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
        n = -n
    r = f
    for _ in range(n - 1):
        r = r * f
    return r


def jet_sin(f: Scalar2Jet) -> Scalar2Jet:
    return f.chain(math.sin(f.val), math.cos(f.val), -math.sin(f.val))


def jet_cos(f: Scalar2Jet) -> Scalar2Jet:
    return f.chain(math.cos(f.val), -math.sin(f.val), -math.cos(f.val))


def jet_sinh(f: Scalar2Jet) -> Scalar2Jet:
    return f.chain(math.sinh(f.val), math.cosh(f.val), math.sinh(f.val))


def jet_cosh(f: Scalar2Jet) -> Scalar2Jet:
    return f.chain(math.cosh(f.val), math.sinh(f.val), math.cosh(f.val))


def jet_exp(f: Scalar2Jet) -> Scalar2Jet:
    e = math.exp(f.val)
    return f.chain(e, e, e)


def jet_log(f: Scalar2Jet) -> Scalar2Jet:
    if f.val <= 0.0:
        raise DomainError("log of non-positive argument")
    x = f.val
    return f.chain(math.log(x), 1.0 / x, -1.0 / (x * x))


def jet_sqrt(f: Scalar2Jet) -> Scalar2Jet:
    if f.val <= 0.0:
        raise DomainError("sqrt of non-positive argument")
    s = math.sqrt(f.val)
    return f.chain(s, 0.5 / s, -0.25 / (f.val * s))


_JET_CALLS = {"sin": jet_sin, "cos": jet_cos, "sinh": jet_sinh,
              "cosh": jet_cosh, "exp": jet_exp, "log": jet_log,
              "sqrt": jet_sqrt}


def lift(expr: Expr, at: tuple[float, float]) -> Scalar2Jet:
    """Exact value and first/second partials of an expression at (u, v)."""
    tape = _tape_cached(expr)
    return Scalar2Jet(*_kernels.eval_tape(tape.code, tape.consts,
                                          float(at[0]), float(at[1])))


def evaluate_jet_tree(expr: Expr, at: tuple[float, float]) -> Scalar2Jet:
    """Reference tree-walking evaluation with Scalar2Jet arithmetic.

    Slower than ``lift`` but independent of the tape compiler; kept for
    cross-checking the kernels.
    """
    from . import exprs as E

    u, v = at

    def walk(e):
        if isinstance(e, E.Const):
            return Scalar2Jet.constant(e.value)
        if isinstance(e, E.Var):
            return (Scalar2Jet.variable_u(u) if e.name == "u"
                    else Scalar2Jet.variable_v(v))
        if isinstance(e, E.Neg):
            return -walk(e.arg)
        if isinstance(e, E.Call):
            return _JET_CALLS[e.fn](walk(e.arg))
        if isinstance(e, E.BinOp):
            if e.op == "^" and isinstance(e.right, E.Const):
                return walk(e.left) ** e.right.value
            a, b = walk(e.left), walk(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if e.op == "/":
                return a / b
            return jet_exp(b * jet_log(a))
        raise TypeError(f"not an expression: {e!r}")

    try:
        return walk(expr)
    except DomainError as err:
        raise DomainError(str(err).split(" at (u, v)")[0], at) from None


@dataclass(frozen=True)
class SurfaceJet2:
    """Position and all first/second partials of an immersion at one point."""

    at: tuple[float, float]
    z: np.ndarray
    z_u: np.ndarray
    z_v: np.ndarray
    z_uu: np.ndarray
    z_uv: np.ndarray
    z_vv: np.ndarray


def surface_jet(surface: SurfaceSpec, at: tuple[float, float]) -> SurfaceJet2:
    """Componentwise lift of the four coordinate expressions."""
    u, v = float(at[0]), float(at[1])
    slots = np.empty((4, 6))
    for i, tape in enumerate(surface.tapes()):
        slots[i] = _kernels.eval_tape(tape.code, tape.consts, u, v)
    return SurfaceJet2(at=(u, v), z=slots[:, 0].copy(), z_u=slots[:, 1].copy(),
                       z_v=slots[:, 2].copy(), z_uu=slots[:, 3].copy(),
                       z_uv=slots[:, 4].copy(), z_vv=slots[:, 5].copy())


def surface_jets_batch(surface: SurfaceSpec, us, vs) -> np.ndarray:
    """Jets at many points as an array of shape (n, 4, 6).

    Axis 1 is the ambient coordinate, axis 2 the jet slot
    (val, du, dv, duu, duv, dvv).
    """
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    out = np.empty((us.shape[0], 4, 6))
    for i, tape in enumerate(surface.tapes()):
        out[:, i, :] = _kernels.eval_tape_batch(tape.code, tape.consts, us, vs)
    return out


def default_fd_steps(at: tuple[float, float]) -> tuple[float, float]:
    """eps^(1/4) scaled by the parameter magnitude."""
    u, v = at
    return (EPS_QUARTER * max(1.0, abs(u)), EPS_QUARTER * max(1.0, abs(v)))


def fd_jet(fn, at: tuple[float, float], steps=None) -> SurfaceJet2:
    """Finite-difference jet of a callable (u, v) -> 4-vector.

    Central stencils: 2-point for first partials, 5-point for the pure
    second partials, 4-point cross for the mixed one.  Truncation O(h^2).
    """
    u, v = float(at[0]), float(at[1])
    hu, hv = steps if steps is not None else default_fd_steps(at)

    def f(uu, vv):
        return np.asarray(fn(uu, vv), dtype=float)

    z = f(u, v)
    fu1, fu_1 = f(u + hu, v), f(u - hu, v)
    fu2, fu_2 = f(u + 2 * hu, v), f(u - 2 * hu, v)
    fv1, fv_1 = f(u, v + hv), f(u, v - hv)
    fv2, fv_2 = f(u, v + 2 * hv), f(u, v - 2 * hv)
    z_u = (fu1 - fu_1) / (2 * hu)
    z_v = (fv1 - fv_1) / (2 * hv)
    z_uu = (-fu2 + 16 * fu1 - 30 * z + 16 * fu_1 - fu_2) / (12 * hu * hu)
    z_vv = (-fv2 + 16 * fv1 - 30 * z + 16 * fv_1 - fv_2) / (12 * hv * hv)
    z_uv = (f(u + hu, v + hv) - f(u + hu, v - hv)
            - f(u - hu, v + hv) + f(u - hu, v - hv)) / (4 * hu * hv)
    return SurfaceJet2(at=(u, v), z=z, z_u=z_u, z_v=z_v,
                       z_uu=z_uu, z_uv=z_uv, z_vv=z_vv)


def jet_from_samples(grid, index: tuple[int, int],
                     steps: tuple[float, float]) -> SurfaceJet2:
    """Finite-difference jet from a rectangular grid of sampled positions.

    ``grid`` has shape (nu, nv, 4); the stencil needs two neighbors on each
    side of ``index``.  A single stencil produces the mixed partial, so
    z_uv == z_vu identically.  Truncation O(h^2).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 3 or grid.shape[2] != 4:
        raise ValueError("grid must have shape (nu, nv, 4)")
    i, j = index
    hu, hv = steps
    if not (2 <= i <= grid.shape[0] - 3 and 2 <= j <= grid.shape[1] - 3):
        raise IndexError("index too close to the grid boundary (need 2 neighbors per side)")
    z = grid[i, j]
    z_u = (grid[i + 1, j] - grid[i - 1, j]) / (2 * hu)
    z_v = (grid[i, j + 1] - grid[i, j - 1]) / (2 * hv)
    z_uu = (-grid[i + 2, j] + 16 * grid[i + 1, j] - 30 * z
            + 16 * grid[i - 1, j] - grid[i - 2, j]) / (12 * hu * hu)
    z_vv = (-grid[i, j + 2] + 16 * grid[i, j + 1] - 30 * z
            + 16 * grid[i, j - 1] - grid[i, j - 2]) / (12 * hv * hv)
    z_uv = (grid[i + 1, j + 1] - grid[i + 1, j - 1]
            - grid[i - 1, j + 1] + grid[i - 1, j - 1]) / (4 * hu * hv)
    return SurfaceJet2(at=(float(i * hu), float(j * hv)), z=z.copy(), z_u=z_u,
                       z_v=z_v, z_uu=z_uu, z_uv=z_uv, z_vv=z_vv)
