"""Scalarization values, gradients, weights, and their invariants."""

import numpy as np
import pytest

from stchopt.core import (
    IdealPoint,
    Kind,
    Preference,
    ScalarizationSpec,
    eval_ls,
    eval_stch,
    eval_tch,
    grad_stch,
    normalize,
    sample_preference,
    tch_subgradient,
)


def make_spec(kind, z_star, mu=0.1, normalization=None):
    return ScalarizationSpec(
        kind=kind, ideal=IdealPoint(np.asarray(z_star, dtype=float)), mu=mu,
        normalization=normalization,
    )


def lam(*values):
    v = np.asarray(values, dtype=float)
    return Preference(v / v.sum())


class TestPreference:
    def test_simplex_membership(self):
        p = Preference(np.array([0.3, 0.7]))
        assert p.m == 2

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Preference(np.array([-0.1, 1.1]))

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            Preference(np.array([0.5, 0.6]))

    def test_rejects_scalar(self):
        with pytest.raises(ValueError):
            Preference(np.array([1.0]))


class TestEvalLs:
    def test_equal_values(self):
        assert eval_ls([1.0, 1.0], lam(0.5, 0.5)) == 1.0

    def test_degenerate_preference(self):
        assert eval_ls([2.0, 0.0], lam(1.0, 0.0)) == 2.0

    def test_hand_dot_product(self):
        f = np.array([0.3, 0.7, 0.1])
        weights = np.array([0.2, 0.3, 0.5])
        expected = sum(w * v for w, v in zip(weights, f))
        assert eval_ls(f, Preference(weights)) == pytest.approx(expected)
        assert eval_ls(f, Preference(weights)) == pytest.approx(0.32)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            eval_ls([1.0, 2.0, 3.0], lam(0.5, 0.5))


class TestEvalTch:
    def test_single_dominating_term(self):
        value, k = eval_tch([1.0, 0.0], lam(1, 1), make_spec(Kind.TCH, [0.0, 0.0]))
        assert value == pytest.approx(0.5)
        assert k == 0

    def test_tie_breaks_to_lowest_index(self):
        value, k = eval_tch([0.0, 0.0], lam(1, 1), make_spec(Kind.TCH, [0.0, 0.0]))
        assert value == 0.0
        assert k == 0

    def test_weighted_value(self):
        # both products equal 0.36 in exact arithmetic; in floats they differ
        # by one ulp so only the value is asserted here
        spec = make_spec(Kind.TCH, [-0.1, -0.1])
        value, _ = eval_tch([0.5, 0.8], Preference(np.array([0.6, 0.4])), spec)
        assert value == pytest.approx(0.36)

    def test_weighted_tie_breaks_low(self):
        # 0.75 * 1 == 0.25 * 3 exactly in binary floating point
        spec = make_spec(Kind.TCH, [0.0, 0.0])
        value, k = eval_tch([1.0, 3.0], Preference(np.array([0.75, 0.25])), spec)
        assert value == 0.75
        assert k == 0


class TestTchSubgradient:
    def test_active_objective_zero(self):
        spec = make_spec(Kind.TCH, [0.0, 0.0])
        g = tch_subgradient([1.0, 0.0], [[2.0, 0.0], [0.0, 2.0]], lam(1, 1), spec)
        np.testing.assert_allclose(g, [1.0, 0.0])  # 0.5 * row 0

    def test_active_objective_one(self):
        spec = make_spec(Kind.TCH, [0.0, 0.0])
        g = tch_subgradient([0.0, 1.0], [[1.0, 1.0], [3.0, -1.0]], lam(1, 1), spec)
        np.testing.assert_allclose(g, [1.5, -0.5])  # 0.5 * row 1

    def test_tie_uses_row_zero(self):
        spec = make_spec(Kind.TCH, [0.0, 0.0])
        g = tch_subgradient([1.0, 1.0], [[5.0], [7.0]], lam(1, 1), spec)
        np.testing.assert_allclose(g, [2.5])


class TestEvalStch:
    def test_equal_gaps_log_m(self):
        spec = make_spec(Kind.STCH, [0.0, 0.0], mu=1.0)
        result = eval_stch([0.0, 0.0], lam(1, 1), spec)
        # y = (0, 0): value = mu * log(m); scaling of lambda is irrelevant at y=0
        assert result.value == pytest.approx(np.log(2.0))

    def test_near_max_value(self):
        spec = make_spec(Kind.STCH, [0.0, 0.0], mu=0.1)
        result = eval_stch([2.0, 0.0], lam(1, 1), spec)
        # y = (1, 0): value = 1 + 0.1 * ln(1 + e^-10)
        assert result.value == pytest.approx(1.0 + 0.1 * np.log1p(np.exp(-10.0)), abs=1e-12)
        assert result.value == pytest.approx(1.00000454, abs=1e-8)

    def test_equal_weighted_gaps_recover_preference(self):
        pref = Preference(np.array([0.3, 0.7]))
        spec = make_spec(Kind.STCH, [0.0, 0.0], mu=0.37)
        t = 1.3
        f = np.array([t / 0.3, t / 0.7])  # lambda_i * f_i equal across i
        result = eval_stch(f, pref, spec)
        np.testing.assert_allclose(result.weights / result.weights.sum(), pref.values)

    def test_huge_gap_no_overflow(self):
        spec = make_spec(Kind.STCH, [0.0, 0.0], mu=0.01)
        result = eval_stch([2e6, 0.0], lam(1, 1), spec)
        assert result.value == pytest.approx(1e6, rel=1e-15)
        assert np.isfinite(result.value)

    def test_rejects_nonpositive_mu(self):
        with pytest.raises(ValueError):
            make_spec(Kind.STCH, [0.0, 0.0], mu=0.0)

    def test_weights_nonnegative_and_normalizable(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            m = rng.integers(2, 5)
            pref = sample_preference(rng, m)
            spec = make_spec(Kind.STCH, rng.normal(size=m), mu=10 ** rng.uniform(-3, 0))
            result = eval_stch(rng.normal(size=m), pref, spec)
            assert np.all(result.weights >= 0)
            assert result.weights.sum() > 0
            assert abs(result.weights.sum() / result.weights.sum() - 1.0) < 1e-9


class TestGradStch:
    def test_symmetric_weights(self):
        spec = make_spec(Kind.STCH, [0.0, 0.0], mu=0.1)
        g = grad_stch([1.0, 1.0], np.eye(2), lam(1, 1), spec)
        np.testing.assert_allclose(g, [0.25, 0.25])

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            m, n = int(rng.integers(2, 4)), int(rng.integers(1, 5))
            A = rng.normal(size=(m, n))
            b = rng.normal(size=m)
            pref = sample_preference(rng, m)
            spec = make_spec(Kind.STCH, rng.normal(size=m) - 2.0,
                             mu=10 ** rng.uniform(-2, 0))
            x = rng.normal(size=n)

            def g_of_x(xx):
                return eval_stch(A @ xx + b, pref, spec).value

            grad = grad_stch(A @ x + b, A, pref, spec)
            h = 1e-6
            fd = np.array([
                (g_of_x(x + h * e) - g_of_x(x - h * e)) / (2 * h)
                for e in np.eye(n)
            ])
            np.testing.assert_allclose(grad, fd, rtol=1e-4, atol=1e-8)

    def test_small_mu_collapses_to_subgradient(self):
        spec_s = make_spec(Kind.STCH, [0.0, 0.0], mu=1e-6)
        spec_t = make_spec(Kind.TCH, [0.0, 0.0])
        J = np.array([[2.0, 0.0], [0.0, 2.0]])
        g = grad_stch([2.0, 0.0], J, lam(1, 1), spec_s)
        sub = tch_subgradient([2.0, 0.0], J, lam(1, 1), spec_t)
        np.testing.assert_allclose(g, sub, atol=1e-3)


class TestNormalize:
    def test_lower_bound_maps_to_zero(self):
        np.testing.assert_allclose(normalize([5.0], [5.0], [10.0]), [0.0])

    def test_upper_bound_maps_to_one(self):
        np.testing.assert_allclose(normalize([10.0], [5.0], [10.0]), [1.0])

    def test_no_clamp_above_one(self):
        np.testing.assert_allclose(normalize([12.0], [5.0], [10.0]), [1.4])

    def test_rejects_degenerate_bounds(self):
        with pytest.raises(ValueError):
            normalize([1.0], [2.0], [2.0])


class TestSamplePreference:
    def test_simplex_membership(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = sample_preference(rng, 2)
            assert np.all(p.values >= 0)
            assert p.values.sum() == pytest.approx(1.0, abs=1e-12)

    def test_floor_guarantee(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = sample_preference(rng, 3, floor=0.1)
            assert np.all(p.values >= 0.1 - 1e-12)

    def test_uniform_mean(self):
        rng = np.random.default_rng(2)
        samples = np.array([sample_preference(rng, 3).values for _ in range(100_000)])
        np.testing.assert_allclose(samples.mean(axis=0), [1 / 3] * 3, atol=0.01)

    def test_rejects_bad_floor(self):
        rng = np.random.default_rng(3)
        with pytest.raises(ValueError):
            sample_preference(rng, 3, floor=0.4)


class TestInvariants:
    def test_bounded_approximation(self):
        rng = np.random.default_rng(21)
        for _ in range(2000):
            m = int(rng.integers(2, 6))
            f = rng.normal(scale=3.0, size=m)
            pref = sample_preference(rng, m)
            z = rng.normal(size=m) - 3.0
            mu = 10 ** rng.uniform(-3, 0)
            smooth = eval_stch(f, pref, make_spec(Kind.STCH, z, mu=mu)).value
            hard, _ = eval_tch(f, pref, make_spec(Kind.TCH, z))
            assert smooth - mu * np.log(m) <= hard + 1e-12
            assert hard <= smooth + 1e-12

    def test_monotone_in_each_objective(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            m = int(rng.integers(2, 5))
            f = rng.normal(size=m)
            pref = Preference(np.full(m, 1.0 / m))
            spec = make_spec(Kind.STCH, np.zeros(m) - 1.0, mu=0.2)
            base = eval_stch(f, pref, spec).value
            for i in range(m):
                bumped = f.copy()
                bumped[i] += 0.5
                assert eval_stch(bumped, pref, spec).value > base

    def test_convex_along_segments(self):
        # affine objectives make the composition convex in x
        rng = np.random.default_rng(23)
        A = rng.normal(size=(3, 4))
        b = rng.normal(size=3)
        pref = sample_preference(rng, 3)
        spec = make_spec(Kind.STCH, np.zeros(3) - 1.0, mu=0.1)

        def g(x):
            return eval_stch(A @ x + b, pref, spec).value

        for _ in range(100):
            x, y = rng.normal(size=4), rng.normal(size=4)
            assert g((x + y) / 2) <= (g(x) + g(y)) / 2 + 1e-12

    def test_gradient_reconstructs_from_weights(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            m, n = 3, 5
            f = rng.normal(size=m)
            J = rng.normal(size=(m, n))
            pref = sample_preference(rng, m)
            spec = make_spec(Kind.STCH, np.zeros(m) - 1.0, mu=0.15)
            result = eval_stch(f, pref, spec)
            s = result.weights.sum()
            w_bar = result.weights / s
            assert s > 0
            np.testing.assert_allclose(
                grad_stch(f, J, pref, spec), s * (w_bar @ J), rtol=1e-12
            )

    def test_stability_extreme_inputs(self):
        spec = make_spec(Kind.STCH, [0.0, 0.0], mu=1e-9)
        for scale in (1e6, 1e9, 1e12):
            value = eval_stch([scale, -scale], lam(1, 1), spec).value
            assert np.isfinite(value)

    def test_mu_limit_monotone(self):
        f = np.array([0.8, 0.3, 0.5])
        pref = Preference(np.array([0.2, 0.5, 0.3]))
        z = np.array([-0.1, -0.1, -0.1])
        hard, _ = eval_tch(f, pref, make_spec(Kind.TCH, z))
        gaps = [
            eval_stch(f, pref, make_spec(Kind.STCH, z, mu=mu)).value - hard
            for mu in (1.0, 0.1, 0.01, 0.001)
        ]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert all(g >= 0 for g in gaps)

    def test_argmin_invariance_under_renormalized_preference(self):
        # lambda = (0.5, 0.5) and (1, 1)/2 are the same simplex point
        xs = np.linspace(-1.0, 2.0, 20_001)
        spec = make_spec(Kind.STCH, [-0.1, -0.1], mu=0.05)
        p1 = Preference(np.array([0.5, 0.5]))
        p2 = Preference(np.array([1.0, 1.0]) / 2.0)

        def argmin_for(pref):
            values = [
                eval_stch([x**2, (x - 1.0) ** 2], pref, spec).value for x in xs
            ]
            return int(np.argmin(values))

        assert argmin_for(p1) == argmin_for(p2)

    def test_normalization_changes_value_and_gradient_consistently(self):
        f = np.array([50.0, 0.5])
        J = np.array([[10.0, 0.0], [0.0, 0.1]])
        pref = lam(1, 1)
        f_min = np.array([0.0, 0.0])
        f_max = np.array([100.0, 1.0])
        spec_n = make_spec(Kind.STCH, [-0.1, -0.1], mu=0.1,
                           normalization=(f_min, f_max))
        spec_raw = make_spec(Kind.STCH, [-0.1, -0.1], mu=0.1)
        fh = normalize(f, f_min, f_max)
        Jh = J / (f_max - f_min)[:, None]
        assert eval_stch(f, pref, spec_n).value == pytest.approx(
            eval_stch(fh, pref, spec_raw).value
        )
        np.testing.assert_allclose(
            grad_stch(f, J, pref, spec_n), grad_stch(fh, Jh, pref, spec_raw)
        )
