from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DEFAULT_STRETCH, default_params
from svmpath.construct import (
    CalibrationError,
    Calibration,
    StretchFactor,
    admissible_constructions,
    build_instance,
    build_p_stretched,
    build_pair,
    build_q,
    calibrate,
    choose_stretch,
    facet_strictness_check,
    generate_2d_arc_instance,
    line_point,
    mu_of_q,
    reduced_hull_segment,
    stretch,
    support_decomposition,
)
from svmpath.geometry import Vec, convex_hull_2d, solve_linear_system
from svmpath.goldfarb import (
    admissible_sign_vectors,
    cube_vertex,
    cube_vertices,
    dual_vertices,
    shadow_certificate,
    sign_vectors,
)

small_rational = st.fractions(min_value=-6, max_value=6, max_denominator=10)


class TestStretch:
    def test_factor_one_is_identity(self):
        x = Vec((F(1, 3), -2, 5, F(7, 2)))
        assert stretch(x, 1) == x

    def test_plane_points_are_fixed(self):
        x = Vec((0, 0, 0, 2, F(-5, 3)))
        for factor in (F(1, 7), 1, 20000):
            assert stretch(x, factor) == x

    def test_componentwise(self):
        assert stretch(Vec((1, 1, 1, 1)), 20000) == Vec((20000, 20000, 1, 1))

    @settings(max_examples=40)
    @given(
        st.lists(small_rational, min_size=3, max_size=6).map(Vec),
        st.fractions(min_value=F(1, 100), max_value=100, max_denominator=100).filter(lambda f: f > 0),
    )
    def test_round_trip(self, x, factor):
        assert stretch(stretch(x, factor), 1 / factor) == x

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_tightness_transfers_to_stretched_incidences(self, d):
        # w . v <= 1 is tight exactly when w(L) . v(1/L) <= 1 is
        params = default_params(d)
        L = F(17, 3)
        for w in dual_vertices(params):
            for v in cube_vertices(params):
                plain = w.coords.dot(v.coords)
                transformed = stretch(w.coords, L).dot(stretch(v.coords, 1 / L))
                assert (plain == 1) == (transformed == 1)
                assert (plain < 1) == (transformed < 1)


class TestBuildQ:
    def test_line_coordinate_and_negative_slack(self, params4):
        for sigma in admissible_sign_vectors(4):
            pair = build_pair(params4, sigma, DEFAULT_STRETCH)
            assert pair.q[-2] == 2
            assert pair.slack < 0
            assert all(c == 0 for c in pair.q[:-2])

    def test_frozen_d4_value(self, params4):
        pair = build_pair(params4, (1, 1, 1, 1), DEFAULT_STRETCH)
        assert pair.p_shadow == Vec((0, 0, F(2975, 5547), F(59, 43)))
        assert pair.q == Vec((0, 0, 2, F(1850552, 715563)))
        assert pair.slack == F(-114031355, 77280804)

    def test_independent_formula_evaluation(self, params4):
        # recompute q from the raw projection formula, bypassing build_q
        sigma = (-1, 1, 1, 1)
        cert = shadow_certificate(params4, sigma).vector
        v0 = stretch(cube_vertex(params4, sigma).coords, 0)
        slack = (cert[-2] - 2) * v0.norm_sq() / v0[-2]
        expected_q = cert - v0 * (slack / v0.norm_sq())
        q, got_slack = build_q(cert, cube_vertex(params4, sigma).coords)
        assert q == expected_q and got_slack == slack
        assert got_slack == 1 - v0.dot(q)

    def test_wrong_sign_vector_rejected(self, params4):
        with pytest.raises(ValueError):
            build_pair(params4, (1, 1, -1, 1), DEFAULT_STRETCH)


class TestBuildPStretched:
    def test_zero_inverse_factor_recovers_shadow_point(self, params4):
        for sigma in admissible_sign_vectors(4):
            pair = build_pair(params4, sigma, DEFAULT_STRETCH)
            vertex = cube_vertex(params4, sigma).coords
            assert build_p_stretched(pair.q, vertex, 0) == pair.p_shadow

    @settings(max_examples=25)
    @given(st.fractions(min_value=0, max_value=F(1, 10), max_denominator=997))
    def test_tight_for_any_inverse_factor(self, params4, ell):
        sigma = (1, -1, 1, 1)
        pair = build_pair(params4, sigma, DEFAULT_STRETCH)
        vertex = cube_vertex(params4, sigma).coords
        p = build_p_stretched(pair.q, vertex, ell)
        assert stretch(vertex, ell).dot(p) == 1

    def test_displacement_is_negative_multiple_of_stretched_vertex(self, constructions4, params4):
        ell = DEFAULT_STRETCH.inverse
        for pair, _ in constructions4:
            v_ell = stretch(cube_vertex(params4, pair.sigma).coords, ell)
            diff = pair.p - pair.q
            # diff == slack * v_ell / ||v_ell||^2 with slack < 0
            assert diff * v_ell.norm_sq() == v_ell * pair.slack


class TestFacetStrictness:
    def test_unstretched_shadow_points_pass(self, params4):
        for sigma in admissible_sign_vectors(4):
            cert = shadow_certificate(params4, sigma)
            assert facet_strictness_check(cert.vector, params4, 0, sigma)

    def test_constructed_pairs_pass_exhaustively(self, constructions4, params4):
        for pair, _ in constructions4:
            assert facet_strictness_check(pair.p, params4, DEFAULT_STRETCH.inverse, pair.sigma)

    def test_point_on_two_facets_fails(self, params4):
        # the midpoint of two vertices sharing d-1 facets lies on both
        sigma = (1, 1, 1, 1)
        neighbor = (-1, 1, 1, 1)
        duals = dual_vertices(params4)
        shared = [w.coords for w in duals if w.s == sigma[w.k - 1] and w.k != 1]
        mid = (shared[0] + shared[1]) * F(1, 2)
        assert not facet_strictness_check(mid, params4, 0, sigma)
        del neighbor


class TestSupportDecomposition:
    def test_barycenter_gives_uniform_weights(self, params4):
        sigma = (1, 1, 1, 1)
        duals = dual_vertices(params4)
        cols = [
            stretch(duals[2 * (k - 1) + 1].coords, DEFAULT_STRETCH.factor) for k in range(1, 5)
        ]
        barycenter = Vec.zero(4)
        for c in cols:
            barycenter = barycenter + c * F(1, 4)
        decomp = support_decomposition(barycenter, sigma, params4, DEFAULT_STRETCH)
        assert decomp.alphas == (F(1, 4),) * 4
        assert decomp.mu_sigma == F(1, 4)

    def test_reconstruction_exact_and_weights_positive(self, constructions4, params4):
        for pair, decomp in constructions4:
            assert sum(decomp.alphas) == 1
            assert all(a > 0 for a in decomp.alphas)
            assert decomp.mu_sigma == max(decomp.alphas) < 1

    def test_weights_witness_reduced_hull_membership(self, constructions4, instance4):
        # every breakpoint point lies in the capped hull at its own mu value:
        # max weight <= mu_bar <= mu(q_sigma)
        calib = instance4.calibration
        for pair, decomp in constructions4:
            assert decomp.mu_sigma <= calib.mu_bar <= mu_of_q(pair.q[-1], calib)


class TestCalibration:
    def test_mu_bar_floor(self, instance4):
        assert instance4.calibration.mu_bar >= F(1, 2)

    def test_right_point_span(self, instance4):
        c = instance4.calibration
        assert c.u_right[-1] - c.u_left[-1] == (c.q_max - c.q_min) / (1 - c.mu_bar)

    def test_frozen_d4_mu_bar_against_independent_solves(self, params4, constructions4):
        # independent route: raw linear solves per sigma, then the max
        duals = dual_vertices(params4)
        mus = []
        for pair, _ in constructions4:
            cols = [
                stretch(duals[2 * (k - 1) + (1 if pair.sigma[k - 1] == 1 else 0)].coords,
                        DEFAULT_STRETCH.factor)
                for k in range(1, 5)
            ]
            matrix = [[cols[j][i] for j in range(4)] for i in range(4)]
            alphas = solve_linear_system(matrix, pair.p)
            mus.append(max(alphas))
        expected = max(F(1, 2), max(mus))
        calib = calibrate([c[0] for c in constructions4], [c[1] for c in constructions4])
        assert calib.mu_bar == expected == F(9615407277421, 10027093130432)
        assert calib.q_min == F(107, 126)
        assert calib.q_max == F(130597, 32004)

    def test_coincident_positions_rejected(self, constructions4):
        pair, decomp = constructions4[0]
        with pytest.raises(CalibrationError):
            calibrate([pair, pair], [decomp, decomp])

    def test_single_pair_keeps_points_distinct(self):
        # dim 2 has a single admissible sigma; the span falls back to one unit
        params = default_params(2)
        cons = admissible_constructions(params, DEFAULT_STRETCH)
        calib = calibrate([c[0] for c in cons], [c[1] for c in cons])
        assert calib.u_left != calib.u_right
        assert mu_of_q(calib.q_min, calib) == 1


class TestMuOfQ:
    def test_endpoints(self, instance4):
        c = instance4.calibration
        assert mu_of_q(c.q_min, c) == 1
        assert mu_of_q(c.q_max, c) == c.mu_bar

    def test_midpoint_interpolates(self, instance4):
        c = instance4.calibration
        assert mu_of_q((c.q_min + c.q_max) / 2, c) == (1 + c.mu_bar) / 2

    def test_strictly_decreasing(self, instance4):
        c = instance4.calibration
        span = c.q_max - c.q_min
        values = [mu_of_q(c.q_min + span * F(i, 8), c) for i in range(9)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_out_of_range_rejected(self, instance4):
        c = instance4.calibration
        with pytest.raises(ValueError):
            mu_of_q(c.q_max + 1, c)


class TestReducedHullSegment:
    def test_full_cap_is_whole_segment(self, instance4):
        c = instance4.calibration
        assert reduced_hull_segment(c.u_left, c.u_right, 1) == (c.u_left, c.u_right)

    def test_half_cap_degenerates_to_midpoint(self, instance4):
        c = instance4.calibration
        left, right = reduced_hull_segment(c.u_left, c.u_right, F(1, 2))
        assert left == right == (c.u_left + c.u_right) * F(1, 2)

    def test_breakpoint_cap_pins_left_endpoint_at_q(self, constructions4, instance4):
        c = instance4.calibration
        for pair, _ in constructions4:
            mu = mu_of_q(pair.q[-1], c)
            left, right = reduced_hull_segment(c.u_left, c.u_right, mu)
            assert left == pair.q
            assert right == c.u_left + c.u_right - pair.q

    def test_out_of_range_rejected(self, instance4):
        c = instance4.calibration
        with pytest.raises(ValueError):
            reduced_hull_segment(c.u_left, c.u_right, F(1, 4))


class TestInstance:
    def test_point_count(self, instance4):
        assert instance4.n_points == 2 * 4 + 2

    def test_plus_class_spans_stretched_dual_cube(self, instance4, params4):
        # membership in the stretched dual cube is exactly the system
        # v_tau(1/L) . x <= 1; all plus points satisfy it, each tight somewhere
        ell = DEFAULT_STRETCH.inverse
        normals = [stretch(v.coords, ell) for v in cube_vertices(params4)]
        for pt in instance4.plus_points:
            values = [n.dot(pt) for n in normals]
            assert all(v <= 1 for v in values)
            assert any(v == 1 for v in values)

    def test_line_disjoint_from_stretched_dual_cube(self, instance4, params4):
        ell = DEFAULT_STRETCH.inverse
        normals = [stretch(v.coords, ell) for v in cube_vertices(params4)]
        probes = [instance4.calibration.u_left, instance4.calibration.u_right] + [
            line_point(4, F(t)) for t in (-50, -1, 0, 3, 50)
        ]
        for x in probes:
            assert any(n.dot(x) > 1 for n in normals)

    def test_d8_instance_builds(self):
        inst = build_instance(default_params(8), DEFAULT_STRETCH)
        assert inst.n_points == 18

    def test_q_and_p_pairwise_distinct_d6(self):
        cons = admissible_constructions(default_params(6), DEFAULT_STRETCH)
        qs = [c[0].q for c in cons]
        ps = [c[0].p for c in cons]
        assert len(set(qs)) == len(qs) == 16
        assert len(set(ps)) == len(ps) == 16


class TestChooseStretch:
    def test_default_start_passes_unchanged_d4(self, params4):
        assert choose_stretch(params4).factor == 20000

    def test_tiny_start_doubles_until_valid(self):
        params = default_params(4)
        s = choose_stretch(params, start=1)
        assert s.factor > 1
        # the returned factor passes, so restarting there is idempotent
        assert choose_stretch(params, start=s.factor).factor == s.factor

    def test_doubling_cap_raises(self, params4):
        with pytest.raises(RuntimeError):
            choose_stretch(params4, start=F(1, 10 ** 9), max_doublings=2)


class TestArcDemo:
    def test_sizes(self):
        inst = generate_2d_arc_instance(20)
        assert len(inst.plus_points) == 20
        assert len(inst.minus_points) == 2

    def test_points_in_convex_position(self):
        inst = generate_2d_arc_instance(20)
        hull = convex_hull_2d(inst.plus_points)
        assert len(hull) == 20

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            generate_2d_arc_instance(2)
