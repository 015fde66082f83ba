"""Exact rational linear algebra, hyperplane operations and 2D convex hulls.

Every quantity in this package is a `fractions.Fraction`: arbitrary-precision
numerator, positive denominator, always in lowest terms. Nothing here ever
rounds, and all comparisons are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Optional, Sequence

Rational = Fraction


def rat(value, den=None) -> Fraction:
    """Exact rational from an int, a 'num/den' string, or a pair of ints."""
    if den is not None:
        return Fraction(value, den)
    return Fraction(value)


class SingularMatrixError(Exception):
    """The linear system has no unique solution."""


class DegenerateHullError(Exception):
    """Hull input is collinear or has fewer than three distinct points."""


class OriginNotInteriorError(Exception):
    """A halfspace with rhs <= 0 cannot be rescaled to rhs = 1."""


class Vec(tuple):
    """Immutable vector of exact rationals with componentwise arithmetic."""

    def __new__(cls, coords: Iterable) -> "Vec":
        return super().__new__(cls, (Fraction(c) for c in coords))

    def __add__(self, other):
        return Vec(a + b for a, b in zip(self, other, strict=True))

    def __sub__(self, other):
        return Vec(a - b for a, b in zip(self, other, strict=True))

    def __neg__(self):
        return Vec(-a for a in self)

    def __mul__(self, factor):
        f = Fraction(factor)
        return Vec(f * a for a in self)

    __rmul__ = __mul__

    def dot(self, other) -> Fraction:
        return sum((a * b for a, b in zip(self, other, strict=True)), Fraction(0))

    def norm_sq(self) -> Fraction:
        return self.dot(self)

    @staticmethod
    def zero(dim: int) -> "Vec":
        return Vec([Fraction(0)] * dim)

    @staticmethod
    def unit(dim: int, axis: int) -> "Vec":
        return Vec(Fraction(1) if i == axis else Fraction(0) for i in range(dim))


@dataclass(frozen=True)
class HalfSpace:
    """The inequality normal . x <= rhs."""

    normal: Vec
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", Vec(self.normal))
        object.__setattr__(self, "rhs", Fraction(self.rhs))
        if not any(self.normal):
            raise ValueError("halfspace normal must be nonzero")

    def value(self, x: Vec) -> Fraction:
        return self.normal.dot(x)

    def holds(self, x: Vec) -> bool:
        return self.value(x) <= self.rhs


class Membership(NamedTuple):
    inside: bool
    tight: tuple  # per-halfspace: value == rhs exactly


@dataclass(frozen=True)
class HPolytope:
    """Finite conjunction of halfspaces; membership is decided exactly."""

    dim: int
    halfspaces: tuple

    def __post_init__(self):
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))
        if not self.halfspaces:
            raise ValueError("need at least one halfspace")
        for h in self.halfspaces:
            if len(h.normal) != self.dim:
                raise ValueError("halfspace dimension mismatch")

    def contains(self, x: Vec) -> Membership:
        """Exact membership plus a per-halfspace tightness report."""
        if len(x) != self.dim:
            raise ValueError("point dimension mismatch")
        inside = True
        tight = []
        for h in self.halfspaces:
            v = h.value(x)
            if v > h.rhs:
                inside = False
            tight.append(v == h.rhs)
        return Membership(inside, tuple(tight))


def orient2d(o: Sequence, a: Sequence, b: Sequence) -> Fraction:
    """Signed area cross product; > 0 iff o->a->b turns counterclockwise."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Polygon2:
    """Strictly convex polygon, vertices in counterclockwise order."""

    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(Vec(v) for v in self.vertices))
        vs = self.vertices
        if len(vs) < 3:
            raise ValueError("polygon needs at least three vertices")
        if len(set(vs)) != len(vs):
            raise ValueError("polygon vertices must be pairwise distinct")
        n = len(vs)
        for i in range(n):
            if orient2d(vs[i], vs[(i + 1) % n], vs[(i + 2) % n]) <= 0:
                raise ValueError("polygon must be strictly convex and counterclockwise")

    def __len__(self):
        return len(self.vertices)


def convex_hull_2d(points: Iterable[Sequence]) -> Polygon2:
    """Counterclockwise hull by monotone chain with exact orientation signs.

    Interior points and points in the relative interior of hull edges are
    dropped, so the result is strictly convex. Raises DegenerateHullError
    when all points are collinear or fewer than three are distinct.
    """
    pts = sorted({Vec(p) for p in points})
    if pts and len(pts[0]) != 2:
        raise ValueError("convex_hull_2d expects 2D points")
    if len(pts) < 3:
        raise DegenerateHullError("need at least three distinct points")

    def chain(seq):
        out = []
        for p in seq:
            while len(out) > 1 and orient2d(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHullError("all points are collinear")
    return Polygon2(tuple(hull))


def normalize_halfspace(h: HalfSpace) -> HalfSpace:
    """Rescale a . x <= b with b > 0 to (a/b) . x <= 1 (same solution set)."""
    if h.rhs <= 0:
        raise OriginNotInteriorError(f"cannot normalize rhs {h.rhs} <= 0")
    return HalfSpace(h.normal * (1 / h.rhs), Fraction(1))


def project_to_unit_hyperplane(q: Vec, a: Vec) -> tuple:
    """Orthogonal projection of q onto the hyperplane a . x = 1.

    Returns (p, slack) with p = q + slack * a / ||a||^2 and slack = 1 - a . q,
    so a . p = 1 exactly and p - q is a scalar multiple of a.
    """
    if not any(a):
        raise ValueError("projection normal must be nonzero")
    slack = 1 - a.dot(q)
    p = q + a * (slack / a.norm_sq())
    return p, slack


def _integer_rows(A: Sequence[Sequence], b: Sequence) -> list:
    """Row-scale [A | b] to integers; scaling rows preserves the solution set."""
    rows = []
    for row, rhs in zip(A, b, strict=True):
        entries = [Fraction(x) for x in row] + [Fraction(rhs)]
        den = 1
        for x in entries:
            den = den * x.denominator // gcd(den, x.denominator)
        rows.append([int(x * den) for x in entries])
    return rows


def solve_linear_system(A: Sequence[Sequence], b: Sequence) -> Vec:
    """Exact solution of a square system Ax = b.

    Fraction-free (Bareiss) elimination over integers after row scaling, with
    exact rational back-substitution. Raises SingularMatrixError instead of
    ever returning an inexact or arbitrary vector.
    """
    n = len(b)
    if any(len(row) != n for row in A) or len(A) != n:
        raise ValueError("system must be square")
    if n == 0:
        return Vec(())
    M = _integer_rows(A, b)
    prev = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise SingularMatrixError(f"no pivot in column {col}")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        for r in range(col + 1, n):
            mr, mc, f = M[r], M[col], M[r][col]
            for c in range(col, n + 1):
                mr[c] = (pv * mr[c] - f * mc[c]) // prev
        prev = pv
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        s = M[r][n] - sum(M[r][c] * x[c] for c in range(r + 1, n))
        x[r] = Fraction(s, M[r][r])
    return Vec(x)


def solve_linear_system_general(
    A: Sequence[Sequence], b: Sequence
) -> Optional[tuple]:
    """Rational RREF solve of a possibly rectangular/singular system.

    Returns (particular, nullspace_basis) with free variables set to zero in
    the particular solution, or None when the system is inconsistent.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(A, b, strict=True)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(M[i][n] != 0 for i in range(r, m)):
        return None
    particular = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        particular[c] = M[i][n]
    basis = []
    for free_col in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[free_col] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -M[i][free_col]
        basis.append(v)
    return particular, basis
