from fractions import Fraction as F

import pytest

from conftest import DEFAULT_STRETCH, default_params
from svmpath.construct import admissible_constructions, generate_2d_arc_instance, mu_of_q
from svmpath.sweep import (
    SweepMismatchError,
    grid_values,
    instance_lower_bound,
    refine_between,
    sweep_constructed,
    sweep_grid,
    sweep_refined,
)


@pytest.fixture(scope="module")
def arc10():
    return generate_2d_arc_instance(10)


class TestGrid:
    def test_grid_points_are_exact(self):
        grid = grid_values(F(8, 10), F(1), 512)
        assert len(grid) == 512
        assert grid[0] == F(8, 10) and grid[-1] == 1
        assert all(isinstance(g, F) for g in grid)

    def test_trivial_two_step_sweep(self, arc10):
        # a slice at the bottom of the range keeps the support constant
        report = sweep_grid(arc10, F(11, 20), F(13, 20), 2)
        assert len(report.records) == 2
        assert report.bend_count == 0
        assert report.distinct_support_sets == 1

    def test_records_ordered_by_decreasing_mu(self, arc10):
        report = sweep_grid(arc10, F(3, 5), F(1), 9)
        mus = [r.mu for r in report.records]
        assert mus == sorted(mus, reverse=True)

    def test_objective_nonincreasing_in_mu(self, arc10):
        report = sweep_grid(arc10, F(1, 2), F(1), 17)
        objectives = [r.objective for r in report.records]  # decreasing mu order
        assert all(a <= b for a, b in zip(objectives, objectives[1:]))

    def test_invalid_ranges_rejected(self, arc10):
        with pytest.raises(ValueError):
            sweep_grid(arc10, F(1), F(1, 2), 4)
        with pytest.raises(ValueError):
            sweep_grid(arc10, F(8, 10), F(1), 1)

    def test_support_sets_are_labelled(self, instance3):
        report = sweep_grid(instance3, F(97, 100), F(1), 3)
        for rec in report.records:
            assert all(isinstance(l, tuple) and len(l) == 2 for l in rec.support_plus)
            assert rec.support_minus <= {"left", "right"}


class TestRefine:
    def test_depth_zero_returns_endpoints_only(self, arc10):
        records = refine_between(arc10, F(3, 5), F(4, 5), 0)
        assert [r.mu for r in records] == [F(4, 5), F(3, 5)]

    def test_identical_endpoints_produce_nothing_new(self, arc10):
        records = refine_between(arc10, F(11, 20), F(13, 20), 5)
        assert len(records) == 2

    def test_straddled_breakpoint_found(self, instance3):
        # bisection around a known constructed breakpoint must find a change
        cons = admissible_constructions(default_params(3), DEFAULT_STRETCH)
        calib = instance3.calibration
        mus = sorted(mu_of_q(pair.q[-1], calib) for pair, _ in cons)
        target = mus[0]
        lo, hi = target - F(1, 50), target + F(1, 50)
        records = refine_between(instance3, lo, hi, 3)
        assert len(records) > 2
        supports = [r.support for r in records]
        assert any(a != b for a, b in zip(supports, supports[1:]))

    def test_bad_interval_rejected(self, arc10):
        with pytest.raises(ValueError):
            refine_between(arc10, F(4, 5), F(4, 5), 3)


class TestConstructedSweep:
    @pytest.mark.parametrize("d,expected", [(3, 2), (4, 4)])
    def test_distinct_support_count(self, d, expected):
        from svmpath.construct import build_instance

        params = default_params(d)
        cons = admissible_constructions(params, DEFAULT_STRETCH)
        inst = build_instance(params, DEFAULT_STRETCH)
        report = sweep_constructed(inst, [c[0] for c in cons], [c[1] for c in cons])
        assert report.distinct_support_sets == expected == 2 ** d // 4
        assert all(len(r.support_plus) == d for r in report.records)
        assert report.bend_count == expected - 1  # consecutive sets all differ

    def test_breakpoint_values_ordered_and_within_range(self, instance4, constructions4):
        calib = instance4.calibration
        pairs = sorted(constructions4, key=lambda c: c[0].q[-1])
        mus = [mu_of_q(p.q[-1], calib) for p, _ in pairs]
        assert all(a > b for a, b in zip(mus, mus[1:]))
        assert all(calib.mu_bar <= m <= 1 for m in mus)

    def test_tampered_pair_raises_named_mismatch(self, instance4, constructions4):
        from dataclasses import replace

        pairs = [c[0] for c in constructions4]
        decomps = [c[1] for c in constructions4]
        bad = replace(pairs[0], p=pairs[1].p, q=pairs[1].q)
        with pytest.raises(SweepMismatchError) as info:
            sweep_constructed(instance4, [bad] + pairs[1:], decomps)
        assert info.value.sigma == pairs[0].sigma

    def test_demo_instance_rejected(self, arc10):
        with pytest.raises(ValueError):
            sweep_constructed(arc10, [], [])


class TestRefinedSweep:
    def test_finds_more_bends_than_plain_grid(self, instance3):
        plain = sweep_grid(instance3, F(8, 10), F(1), 48)
        refined = sweep_refined(instance3, F(8, 10), F(1), 48, 5)
        assert refined.bend_count >= plain.bend_count
        assert refined.bend_count > instance_lower_bound(instance3) == 2

    def test_lower_bound_for_demo(self, arc10):
        assert instance_lower_bound(arc10) == 2 * (10 - 3)


class TestThreadedSweep:
    def test_parallel_matches_serial(self, arc10, monkeypatch):
        serial = sweep_grid(arc10, F(3, 4), F(1), 7)
        monkeypatch.setenv("SVMPATH_THREADS", "2")
        parallel = sweep_grid(arc10, F(3, 4), F(1), 7)
        assert [r.mu for r in parallel.records] == [r.mu for r in serial.records]
        assert [r.objective for r in parallel.records] == [r.objective for r in serial.records]
        assert parallel.bend_count == serial.bend_count
