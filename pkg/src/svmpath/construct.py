"""Stretched instances: breakpoint pairs, support decompositions, calibration.

For each admissible sign vector sigma (last two entries +1) the construction
produces a point q_sigma on the vertical line {x : x_1 = ... = x_{d-2} = 0,
x_{d-1} = 2} and its projection p_sigma onto the sigma-facet of the stretched
dual cube. Calibrating two extra points on that line turns the family of pairs
into a single SVM instance whose solution path visits every pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .geometry import SingularMatrixError, Vec, solve_linear_system
from .goldfarb import (
    GoldfarbParams,
    SignVec,
    admissible_sign_vectors,
    cube_vertex,
    dual_vertices,
    shadow_certificate,
    sign_vectors,
)


class DecompositionError(Exception):
    """The facet point is not a positive convex combination of its d vertices.

    Signals that the stretch factor is too small for the construction (or a
    bug); callers react by growing the stretch factor.
    """


class CalibrationError(Exception):
    """q_min == q_max across several pairs, contradicting their distinctness."""


class StrictnessError(Exception):
    """A constructed point touches a facet other than its own."""


@dataclass(frozen=True)
class StretchFactor:
    """Multiplier applied to all coordinates except the last two."""

    factor: Fraction

    def __post_init__(self):
        object.__setattr__(self, "factor", Fraction(self.factor))
        if self.factor <= 0:
            raise ValueError("stretch factor must be positive")

    @property
    def inverse(self) -> Fraction:
        return 1 / self.factor


def stretch(x: Vec, factor) -> Vec:
    """Scale the first d-2 coordinates by `factor`, keep the last two."""
    f = Fraction(factor)
    d = len(x)
    return Vec([f * c for c in x[: d - 2]] + list(x[d - 2 :]))


def line_point(dim: int, last: Fraction) -> Vec:
    """The point (0, ..., 0, 2, last) on the construction line."""
    return Vec([Fraction(0)] * (dim - 2) + [Fraction(2), Fraction(last)])


@dataclass(frozen=True)
class ConstructedPair:
    """One breakpoint of the path: sigma, its shadow point, q, and p.

    p_shadow is the unstretched supporting point in the sigma-facet; q sits on
    the line with q[-2] = 2; p is the projection of q back onto the stretched
    sigma-facet; slack = 1 - v_sigma(ell) . q < 0.
    """

    sigma: SignVec
    p_shadow: Vec
    q: Vec
    p: Vec
    slack: Fraction


@dataclass(frozen=True)
class SupportDecomposition:
    """Unique convex combination of p over the d facet vertices; all weights > 0."""

    sigma: SignVec
    alphas: tuple
    mu_sigma: Fraction


@dataclass(frozen=True)
class Calibration:
    """Placement data for the two-point class on the construction line."""

    mu_bar: Fraction
    q_min: Fraction
    q_max: Fraction
    u_left: Vec
    u_right: Vec

    def __post_init__(self):
        if not Fraction(1, 2) <= self.mu_bar < 1:
            raise ValueError("mu_bar must lie in [1/2, 1)")
        if self.q_min > self.q_max:
            raise ValueError("q_min must not exceed q_max")
        if self.u_left[-1] != self.q_min:
            raise ValueError("u_left must sit at q_min")


@dataclass(frozen=True)
class SvmInstance:
    """Two labeled point classes; class +1 spans the stretched dual cube.

    For constructed instances n = 2d + 2: the 2d stretched dual vertices
    labeled by their facet pair (k, s), plus two points on the line labeled
    'left' and 'right'. The 2D demo instance stores plain integer labels and
    no construction metadata.
    """

    plus_points: tuple
    plus_labels: tuple
    minus_points: tuple
    params: Optional[GoldfarbParams] = None
    stretch: Optional[StretchFactor] = None
    calibration: Optional[Calibration] = None

    @property
    def dim(self) -> int:
        return len(self.plus_points[0])

    @property
    def n_points(self) -> int:
        return len(self.plus_points) + len(self.minus_points)


MINUS_LABELS = ("left", "right")


def build_q(cert_point: Vec, vertex: Vec) -> tuple:
    """Back-project the shadow point onto the line, fixing q[-2] = 2.

    q = p_shadow - slack * v(0) / ||v(0)||^2 where the slack constant is chosen
    in closed form so the second-to-last coordinate of q is exactly 2. Returns
    (q, slack); slack = 1 - v(0) . q < 0 always holds, since the shadow point
    has second-to-last coordinate at most 1 while q has 2.
    """
    d = len(vertex)
    v0 = stretch(vertex, 0)
    if vertex[d - 2] <= 0:
        raise ValueError("vertex must have positive second-to-last coordinate")
    nsq = v0.norm_sq()
    slack = (cert_point[d - 2] - 2) * nsq / v0[d - 2]
    q = cert_point - v0 * (slack / nsq)
    assert q[d - 2] == 2
    assert slack == 1 - v0.dot(q)
    if slack >= 0:
        raise ValueError("slack must be negative")
    return q, slack


def build_p_stretched(q: Vec, vertex: Vec, ell) -> Vec:
    """Project q onto the stretched facet hyperplane v(ell) . x = 1."""
    ell = Fraction(ell)
    v_ell = stretch(vertex, ell)
    slack = 1 - v_ell.dot(q)
    p = q + v_ell * (slack / v_ell.norm_sq())
    assert v_ell.dot(p) == 1
    return p


def build_pair(params: GoldfarbParams, sigma: SignVec, s: StretchFactor) -> ConstructedPair:
    """Assemble the breakpoint pair for one admissible sigma."""
    sigma = tuple(sigma)
    if sigma[-2] != 1 or sigma[-1] != 1:
        raise ValueError("pair construction needs the last two signs to be +1")
    cert = shadow_certificate(params, sigma)
    vertex = cube_vertex(params, sigma).coords
    q, slack = build_q(cert.vector, vertex)
    p = build_p_stretched(q, vertex, s.inverse)
    return ConstructedPair(sigma, cert.vector, q, p, slack)


def facet_strictness_check(p: Vec, params: GoldfarbParams, ell, sigma: SignVec) -> bool:
    """True iff p is tight on the sigma-facet and strictly inside all others."""
    ell = Fraction(ell)
    sigma = tuple(sigma)
    for tau in sign_vectors(params.dim):
        value = stretch(cube_vertex(params, tau).coords, ell).dot(p)
        if tau == sigma:
            if value != 1:
                return False
        elif value >= 1:
            return False
    return True


def support_decomposition(
    p: Vec, sigma: SignVec, params: GoldfarbParams, s: StretchFactor
) -> SupportDecomposition:
    """Solve the d x d system sum_k alpha_k w_(k, sigma_k)(L) = p exactly.

    The d stretched facet vertices are linearly independent, and tightness of
    p on the sigma-facet forces sum alpha_k = 1 automatically; both facts are
    asserted. All weights must come out strictly positive.
    """
    d = params.dim
    duals = dual_vertices(params)
    cols = [stretch(duals[2 * k + (1 if sigma[k] == 1 else 0)].coords, s.factor) for k in range(d)]
    matrix = [[cols[j][i] for j in range(d)] for i in range(d)]
    try:
        alphas = solve_linear_system(matrix, p)
    except SingularMatrixError as exc:
        raise DecompositionError(f"facet vertices degenerate for sigma={sigma}") from exc
    if sum(alphas) != 1:
        raise DecompositionError(f"weights sum to {sum(alphas)} != 1 for sigma={sigma}")
    if any(a <= 0 for a in alphas):
        raise DecompositionError(f"nonpositive weight for sigma={sigma}: {alphas}")
    reconstructed = Vec.zero(d)
    for a, c in zip(alphas, cols):
        reconstructed = reconstructed + c * a
    assert reconstructed == p
    mu_sigma = max(alphas)
    if mu_sigma >= 1:
        raise DecompositionError(f"largest weight {mu_sigma} >= 1 for sigma={sigma}")
    return SupportDecomposition(tuple(sigma), tuple(alphas), mu_sigma)


def calibrate(pairs: Iterable[ConstructedPair], decomps: Iterable[SupportDecomposition]) -> Calibration:
    """Fix the two line points from the extreme q positions and the largest weight.

    u_left sits at q_min; u_right at q_min + (q_max - q_min) / (1 - mu_bar).
    With a single pair (dim 2) the span degenerates to zero, so a unit
    numerator stands in for q_max - q_min to keep the two points distinct.
    """
    pairs = list(pairs)
    decomps = list(decomps)
    if not pairs:
        raise ValueError("calibration needs at least one pair")
    mu_bar = max(Fraction(1, 2), max(dc.mu_sigma for dc in decomps))
    q_last = [pr.q[-1] for pr in pairs]
    q_min, q_max = min(q_last), max(q_last)
    if q_min == q_max and len(pairs) > 1:
        raise CalibrationError("all q positions coincide across distinct pairs")
    dim = len(pairs[0].q)
    span = (q_max - q_min) if q_max > q_min else Fraction(1)
    u_left = line_point(dim, q_min)
    u_right = line_point(dim, q_min + span / (1 - mu_bar))
    return Calibration(mu_bar, q_min, q_max, u_left, u_right)


def mu_of_q(q_last: Fraction, calib: Calibration) -> Fraction:
    """Regularization value at which the pair with this q position is optimal.

    Linear in q_last: 1 at q_min, mu_bar at q_max, strictly decreasing.
    """
    q_last = Fraction(q_last)
    if not calib.q_min <= q_last <= calib.q_max:
        raise ValueError(f"q position {q_last} outside [{calib.q_min}, {calib.q_max}]")
    if q_last == calib.q_min:
        return Fraction(1)
    return 1 - (q_last - calib.q_min) * (1 - calib.mu_bar) / (calib.q_max - calib.q_min)


def reduced_hull_segment(u_left: Vec, u_right: Vec, mu) -> tuple:
    """Reduced hull of a two-point class: the capped-coefficient segment.

    [mu*u_left + (1-mu)*u_right, mu*u_right + (1-mu)*u_left]; the full segment
    at mu = 1, its midpoint at mu = 1/2.
    """
    mu = Fraction(mu)
    if not Fraction(1, 2) <= mu <= 1:
        raise ValueError(f"mu {mu} outside [1/2, 1]")
    left = u_left * mu + u_right * (1 - mu)
    right = u_right * mu + u_left * (1 - mu)
    return left, right


@lru_cache(maxsize=None)
def admissible_constructions(params: GoldfarbParams, s: StretchFactor) -> tuple:
    """(pair, decomposition) for every admissible sigma, lexicographic order.

    Raises StrictnessError or DecompositionError when the stretch factor is
    not large enough for the construction to go through.
    """
    out = []
    ell = s.inverse
    for sigma in admissible_sign_vectors(params.dim):
        pair = build_pair(params, sigma, s)
        if not facet_strictness_check(pair.p, params, ell, sigma):
            raise StrictnessError(f"facet strictness fails for sigma={sigma} at L={s.factor}")
        decomp = support_decomposition(pair.p, sigma, params, s)
        out.append((pair, decomp))
    return tuple(out)


def build_instance(params: GoldfarbParams, s: StretchFactor) -> SvmInstance:
    """The full 2d + 2 point instance with calibration embedded."""
    constructions = admissible_constructions(params, s)
    calib = calibrate([c[0] for c in constructions], [c[1] for c in constructions])
    duals = dual_vertices(params)
    plus_points = tuple(stretch(w.coords, s.factor) for w in duals)
    plus_labels = tuple((w.k, w.s) for w in duals)
    return SvmInstance(
        plus_points=plus_points,
        plus_labels=plus_labels,
        minus_points=(calib.u_left, calib.u_right),
        params=params,
        stretch=s,
        calibration=calib,
    )


def choose_stretch(
    params: GoldfarbParams, start=20000, max_doublings: int = 64
) -> StretchFactor:
    """Smallest certified stretch factor from a doubling search.

    Starts at `start` and doubles until every admissible sigma passes facet
    strictness, decomposes with positive weights, and carries a valid
    optimality certificate; the first passing factor is returned. The checks
    are exhaustive and exact, so the result is certified rather than assumed.
    """
    from .qp import CertificateError, build_kkt_certificate

    factor = Fraction(start)
    for _ in range(max_doublings + 1):
        s = StretchFactor(factor)
        try:
            for pair, _decomp in admissible_constructions(params, s):
                build_kkt_certificate(pair, params, s.inverse)
            return s
        except (StrictnessError, DecompositionError, CertificateError):
            factor *= 2
    raise RuntimeError(f"no passing stretch factor after {max_doublings} doublings")


def generate_2d_arc_instance(n_plus: int) -> SvmInstance:
    """Two-dimensional demo: n_plus points on a circle arc plus two line points.

    The arc is the right-facing chain of the circle with center (-1, 0) and
    radius 2, sampled at rational tangent-half-angle parameters, so every
    coordinate is exact. The two opposite-class points sit on the vertical
    line x = 2: one near the arc's closest approach, one far below, so the
    shrinking reduced hull of the pair drags the optimal point across every
    arc face as the regularization parameter decreases.
    """
    if n_plus < 3:
        raise ValueError("need at least three arc points")
    t_lo, t_hi = Fraction(-3, 4), Fraction(-1, 24)
    pts = []
    for i in range(n_plus):
        t = t_lo + (t_hi - t_lo) * i / (n_plus - 1)
        one = 1 + t * t
        pts.append(Vec((-1 + 2 * (1 - t * t) / one, 4 * t / one)))
    minus = (Vec((Fraction(2), Fraction(-25))), Vec((Fraction(2), Fraction(-1, 4))))
    return SvmInstance(
        plus_points=tuple(pts),
        plus_labels=tuple(range(n_plus)),
        minus_points=minus,
    )
