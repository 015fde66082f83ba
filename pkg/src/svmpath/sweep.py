"""Regularization sweeps: solve at discrete mu values and count support changes.

A bend is recorded exactly when the support set strictly changes between two
consecutive solved values, which is the experimental proxy used throughout.
Grid points are exact rationals, so every solve along a sweep stays exact.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .construct import MINUS_LABELS, SvmInstance, mu_of_q
from .qp import (
    OptimalPair,
    ReducedHullQP,
    SolverStalledError,
    solve_reduced_distance,
    support_set,
)


class SweepMismatchError(Exception):
    """A constructed breakpoint did not reproduce its predicted optimum."""

    def __init__(self, sigma, detail: str):
        self.sigma = tuple(sigma)
        super().__init__(f"sigma={self.sigma}: {detail}")


@dataclass(frozen=True)
class SweepRecord:
    """One solved value: mu, labeled support sets, objective, and the pair."""

    mu: Fraction
    support_plus: frozenset
    support_minus: frozenset
    objective: Fraction
    pair: OptimalPair

    @property
    def support(self) -> tuple:
        return self.support_plus, self.support_minus


@dataclass(frozen=True)
class SweepReport:
    """Records ordered by decreasing mu with bend and distinct-set counts."""

    records: tuple
    bend_count: int
    distinct_support_sets: int
    lower_bound: int


def _thread_count() -> int:
    raw = os.environ.get("SVMPATH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _solve_record(instance: SvmInstance, mu: Fraction, warm: Optional[OptimalPair]) -> SweepRecord:
    qp = ReducedHullQP.from_instance(instance, mu)
    try:
        pair = solve_reduced_distance(qp, start=warm)
    except SolverStalledError as exc:
        raise SolverStalledError(f"at mu = {mu}: {exc}") from exc
    plus_idx, minus_idx = support_set(pair)
    return SweepRecord(
        mu=Fraction(mu),
        support_plus=frozenset(instance.plus_labels[i] for i in plus_idx),
        support_minus=frozenset(MINUS_LABELS[i] for i in minus_idx),
        objective=pair.objective,
        pair=pair,
    )


def _solve_record_args(args) -> SweepRecord:
    instance, mu = args
    return _solve_record(instance, mu, None)


def _report(records: Iterable[SweepRecord], lower_bound: int) -> SweepReport:
    ordered = tuple(sorted(records, key=lambda r: r.mu, reverse=True))
    bends = sum(
        1 for a, b in zip(ordered, ordered[1:]) if a.support != b.support
    )
    distinct = len({r.support for r in ordered})
    return SweepReport(ordered, bends, distinct, lower_bound)


def instance_lower_bound(instance: SvmInstance) -> int:
    """Bend lower bound: 2^d / 4 for constructed instances, 2(n_+ - 3) for the demo."""
    if instance.params is not None:
        return 2 ** instance.params.dim // 4
    return 2 * (len(instance.plus_points) - 3)


def grid_values(mu_lo: Fraction, mu_hi: Fraction, steps: int) -> list:
    return [mu_lo + (mu_hi - mu_lo) * i / (steps - 1) for i in range(steps)]


def sweep_grid(instance: SvmInstance, mu_lo, mu_hi, steps: int) -> SweepReport:
    """Solve on a uniform rational grid of `steps` points over [mu_lo, mu_hi].

    Serial sweeps ascend in mu so each solve warm-starts from its predecessor
    (coefficients stay feasible when the cap grows); with SVMPATH_THREADS > 1
    the solves run cold in a process pool instead.
    """
    mu_lo, mu_hi = Fraction(mu_lo), Fraction(mu_hi)
    if not Fraction(1, 2) <= mu_lo < mu_hi <= 1:
        raise ValueError("need 1/2 <= mu_lo < mu_hi <= 1")
    if steps < 2:
        raise ValueError("need at least two grid points")
    grid = grid_values(mu_lo, mu_hi, steps)
    threads = _thread_count()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_solve_record_args, ((instance, mu) for mu in grid)))
    else:
        records = []
        warm = None
        for mu in grid:
            rec = _solve_record(instance, mu, warm)
            warm = rec.pair
            records.append(rec)
    return _report(records, instance_lower_bound(instance))


def refine_between(instance: SvmInstance, mu_a, mu_b, depth: int) -> list:
    """Bisect [mu_a, mu_b] wherever endpoint support sets differ.

    Returns every record probed, endpoints included, ordered by decreasing mu.
    Depth 0 solves only the endpoints.
    """
    mu_a, mu_b = Fraction(mu_a), Fraction(mu_b)
    if mu_a >= mu_b:
        raise ValueError("need mu_a < mu_b")
    rec_a = _solve_record(instance, mu_a, None)
    rec_b = _solve_record(instance, mu_b, rec_a.pair)
    found = [rec_a, rec_b]
    _refine(instance, mu_a, rec_a, mu_b, rec_b, depth, found)
    return sorted(found, key=lambda r: r.mu, reverse=True)


def _refine(instance, mu_a, rec_a, mu_b, rec_b, depth, out) -> None:
    if depth <= 0 or rec_a.support == rec_b.support:
        return
    mid = (mu_a + mu_b) / 2
    rec = _solve_record(instance, mid, rec_a.pair)
    out.append(rec)
    _refine(instance, mu_a, rec_a, mid, rec, depth - 1, out)
    _refine(instance, mid, rec, mu_b, rec_b, depth - 1, out)


def sweep_refined(instance: SvmInstance, mu_lo, mu_hi, steps: int, depth: int) -> SweepReport:
    """Grid sweep plus recursive bisection between differing neighbours."""
    base = sweep_grid(instance, mu_lo, mu_hi, steps)
    records = list(base.records)
    extra = []
    ascending = list(reversed(records))
    for rec_a, rec_b in zip(ascending, ascending[1:]):
        _refine(instance, rec_a.mu, rec_a, rec_b.mu, rec_b, depth, extra)
    return _report(records + extra, base.lower_bound)


def sweep_constructed(
    instance: SvmInstance,
    pairs: Sequence,
    decomps: Sequence,
) -> SweepReport:
    """Solve at each constructed breakpoint value and verify the prediction.

    For every admissible sigma in decreasing mu(q_sigma) order the solver must
    return exactly the constructed pair, with the positive-class support equal
    to the d facet labels (k, sigma_k). Any deviation raises
    SweepMismatchError naming the offending sigma.
    """
    if instance.calibration is None:
        raise ValueError("constructed sweep needs a calibrated instance")
    calib = instance.calibration
    by_mu = sorted(
        zip(pairs, decomps), key=lambda pd: mu_of_q(pd[0].q[-1], calib), reverse=True
    )
    records = []
    for pair, _decomp in by_mu:
        mu = mu_of_q(pair.q[-1], calib)
        rec = _solve_record(instance, mu, None)
        if rec.pair.p != pair.p or rec.pair.q != pair.q:
            raise SweepMismatchError(pair.sigma, "solved pair differs from the constructed one")
        expected = frozenset((k, pair.sigma[k - 1]) for k in range(1, len(pair.sigma) + 1))
        if rec.support_plus != expected:
            raise SweepMismatchError(
                pair.sigma, f"support {sorted(rec.support_plus)} != {sorted(expected)}"
            )
        records.append(rec)
    report = _report(records, instance_lower_bound(instance))
    expected_count = len(records)
    if report.distinct_support_sets != expected_count:
        raise SweepMismatchError((), f"only {report.distinct_support_sets} distinct sets")
    return report
