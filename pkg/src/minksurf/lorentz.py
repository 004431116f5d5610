"""Lorentzian linear algebra over 4-component vectors, signature (+, +, +, -).

The fixed orthonormal basis is e1..e4 with e4 timelike; all other modules
inherit this convention.
"""

from __future__ import annotations

import itertools
import math
from enum import Enum

import numpy as np

METRIC_SIGNS = (1.0, 1.0, 1.0, -1.0)
METRIC = np.diag(METRIC_SIGNS)

E1 = np.array([1.0, 0.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0, 0.0])
E4 = np.array([0.0, 0.0, 0.0, 1.0])

DEFAULT_CAUSAL_TOL = 1e-10


def vec(c1: float, c2: float, c3: float, c4: float) -> np.ndarray:
    """Vector from components in the fixed basis."""
    return np.array([c1, c2, c3, c4], dtype=float)


class CausalClass(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def inner(a, b) -> float:
    """Indefinite inner product a1*b1 + a2*b2 + a3*b3 - a4*b4."""
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]


def norm2_euclid(v) -> float:
    """Euclidean norm squared; used to scale degeneracy tolerances."""
    return v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]


def causal_class(v, tol: float = DEFAULT_CAUSAL_TOL) -> CausalClass:
    """Classify a nonzero vector by the sign of inner(v, v).

    |inner(v, v)| <= tol * ||v||^2_euclid counts as lightlike.
    """
    e2 = norm2_euclid(v)
    if e2 == 0.0:
        raise ValueError("zero vector has no causal class")
    q = inner(v, v)
    if abs(q) <= tol * e2:
        return CausalClass.LIGHTLIKE
    return CausalClass.SPACELIKE if q > 0.0 else CausalClass.TIMELIKE


# Permutations stored as (column -> row) maps with their parity; products are
# accumulated in column order so that swapping two argument vectors maps each
# signed term to the exact negation of another term.  math.fsum then makes the
# determinant alternating to the last bit.
def _signed_perms():
    out = []
    for p in itertools.permutations(range(4)):
        inv = 0
        for i in range(4):
            for j in range(i + 1, 4):
                inv += p[i] > p[j]
        out.append((p, -1.0 if inv % 2 else 1.0))
    return tuple(out)


_SIGNED_PERMS = _signed_perms()


def orientation_det(a, b, c, d) -> float:
    """Determinant of the 4x4 matrix with rows a, b, c, d.

    Positive exactly when the quadruple is positively oriented.  Exchanging
    any two arguments flips the sign exactly.
    """
    rows = (a, b, c, d)
    terms = []
    for p, sign in _SIGNED_PERMS:
        t = rows[p[0]][0]
        t *= rows[p[1]][1]
        t *= rows[p[2]][2]
        t *= rows[p[3]][3]
        terms.append(t if sign > 0.0 else -t)
    return math.fsum(terms)


def check_lorentz_pair(n1, n2, tol: float = 1e-9) -> None:
    """Require inner(n1,n1)=1, inner(n2,n2)=-1, inner(n1,n2)=0 within tol."""
    if (abs(inner(n1, n1) - 1.0) > tol or abs(inner(n2, n2) + 1.0) > tol
            or abs(inner(n1, n2)) > tol):
        raise ValueError("pair is not a Lorentz-orthonormal (spacelike, timelike) pair")


def plane_coords(a, n1, n2) -> tuple[float, float]:
    """Coordinates of a vector of span{n1, n2} in a Lorentz-orthonormal pair.

    The timelike member carries a sign correction: a = a1*n1 + a2*n2 with
    a1 = inner(a, n1), a2 = -inner(a, n2).
    """
    return inner(a, n1), -inner(a, n2)


def lorentz_plane_area(a, b, n1, n2, tol: float = 1e-9) -> float:
    """Oriented area of the parallelogram spanned by a, b inside span{n1, n2}.

    Both a and b must lie in the plane spanned by the Lorentz-orthonormal
    pair {n1, n2}; this precondition is not checked.
    """
    check_lorentz_pair(n1, n2, tol)
    a1, a2 = plane_coords(a, n1, n2)
    b1, b2 = plane_coords(b, n1, n2)
    return a1 * b2 - a2 * b1
