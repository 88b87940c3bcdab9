import math

import numpy as np
import pytest

from nstar import (
    MeasurableFn,
    MeasureSpace,
    complementary,
    convergence_equivalence,
    delta2_solve,
    intersection_check,
    l1_embedding_bound_check,
    luxemburg_norm,
    metric,
    modular,
    modular_to_norm_bound_check,
    power_family,
    product_identity_check,
    quasi_triangle_check,
    reversed_jensen_check,
    scaled_power_family,
    simple_approximation,
    young_type_check,
)

HALF = power_family(0.5)
HALF_SCALED = scaled_power_family(0.5)
UNIT = MeasureSpace.interval(1.0, 1000)


def certified(phi, k0=8.0):
    return phi.with_delta2(delta2_solve(phi, k0, np.geomspace(1e-3, 1e3, 25)))


def p_norm(f, p, space):
    return float(np.dot(np.abs(f.values) ** p, space.masses)) ** (1.0 / p)


class TestModular:
    def test_indicator(self):
        assert modular(HALF, UNIT, MeasurableFn.constant(UNIT, 1.0)).value == pytest.approx(
            1.0, rel=1e-12
        )

    def test_identity_integral(self):
        got = modular(HALF, UNIT, MeasurableFn.identity(UNIT)).value
        assert got == pytest.approx(2.0 / 3.0, abs=1e-5)

    def test_zero(self):
        result = modular(HALF, UNIT, MeasurableFn.constant(UNIT, 0.0))
        assert result.value == 0.0
        assert result.finite

    def test_large_values_stay_finite_for_sublinear_generators(self):
        X = MeasureSpace.atomic([1.0])
        f = MeasurableFn(np.array([np.finfo(float).max]), X)
        res = modular(HALF, X, f)
        assert res.finite

    def test_overflow_is_flag_not_fault(self):
        from nstar import DensityFunction, NStarFunction

        # a synthetic evaluator that overflows (not a valid generator, but the
        # modular must report the overflow rather than raise)
        blowup = NStarFunction(
            density=DensityFunction(lambda t: np.asarray(t, float) * 0 + 1.0),
            eval_fn=lambda a: np.exp(np.asarray(a, float)) * 1e300,
            description="overflowing",
        )
        X = MeasureSpace.atomic([1.0])
        f = MeasurableFn(np.array([1e4]), X)
        res = modular(blowup, X, f)
        assert not res.finite
        assert res.value == np.inf


class TestMetric:
    def test_self_distance_zero(self):
        f = MeasurableFn.identity(UNIT)
        assert metric(HALF, UNIT, f, f) == 0.0

    def test_indicator_vs_zero(self):
        f = MeasurableFn.constant(UNIT, 1.0)
        z = MeasurableFn.constant(UNIT, 0.0)
        assert metric(HALF, UNIT, f, z) == pytest.approx(1.0, rel=1e-12)

    def test_symmetry_and_triangle_random(self):
        rng = np.random.default_rng(11)
        X = MeasureSpace.atomic(rng.uniform(0.1, 1.0, 32))
        for _ in range(50):
            f = MeasurableFn(rng.uniform(-3, 3, 32), X)
            g = MeasurableFn(rng.uniform(-3, 3, 32), X)
            h = MeasurableFn(rng.uniform(-3, 3, 32), X)
            dfg = metric(HALF, X, f, g)
            assert dfg == pytest.approx(metric(HALF, X, g, f), rel=1e-12)
            assert dfg <= metric(HALF, X, f, h) + metric(HALF, X, h, g) + 1e-9


class TestLuxemburgNorm:
    def test_power_norm_identity_for_identity_fn(self):
        got = luxemburg_norm(HALF, UNIT, MeasurableFn.identity(UNIT)).value
        want = p_norm(MeasurableFn.identity(UNIT), 0.5, UNIT)
        assert got == pytest.approx(want, rel=1e-9)
        assert got == pytest.approx(4.0 / 9.0, abs=1e-4)

    def test_single_atom_closed_form(self):
        a, c = 0.25, 3.0
        X = MeasureSpace.atomic([a])
        f = MeasurableFn(np.array([c]), X)
        want = c / float(HALF.inverse(1.0 / a))
        assert luxemburg_norm(HALF, X, f).value == pytest.approx(want, rel=1e-9)

    def test_zero_function(self):
        result = luxemburg_norm(HALF, UNIT, MeasurableFn.constant(UNIT, 0.0))
        assert result.value == 0.0
        assert result.iterations == 0

    def test_residual_within_tolerance(self):
        rng = np.random.default_rng(2)
        X = MeasureSpace.atomic(rng.uniform(0.1, 2.0, 16))
        f = MeasurableFn(rng.uniform(-5, 5, 16), X)
        res = luxemburg_norm(HALF, X, f)
        assert res.lambda_residual <= 1e-10

    def test_iteration_budget_exhaustion(self):
        from nstar import NonconvergenceError

        X = MeasureSpace.atomic([1e-12])
        f = MeasurableFn(np.array([1.0]), X)  # norm 1e-24: far from the start point
        with pytest.raises(NonconvergenceError):
            luxemburg_norm(HALF, X, f, max_iter=3)

    def test_homogeneity(self):
        rng = np.random.default_rng(21)
        X = MeasureSpace.atomic(rng.uniform(0.1, 2.0, 24))
        for p in (0.25, 0.5, 0.75):
            phi = power_family(p)
            for _ in range(25):
                f = MeasurableFn(rng.uniform(-4, 4, 24), X)
                alpha = float(rng.uniform(0.01, 100.0))
                lhs = luxemburg_norm(phi, X, alpha * f).value
                rhs = alpha * luxemburg_norm(phi, X, f).value
                assert abs(lhs - rhs) / rhs < 1e-9

    def test_unit_ball_characterization(self):
        rng = np.random.default_rng(31)
        X = MeasureSpace.atomic(rng.uniform(0.1, 2.0, 24))
        for _ in range(60):
            f = MeasurableFn(rng.uniform(-4, 4, 24), X)
            norm = luxemburg_norm(HALF, X, f).value
            rho = modular(HALF, X, f).value
            if norm <= 1.0 - 1e-9:
                assert rho <= 1.0 + 1e-8
            if rho <= 1.0 - 1e-9:
                assert norm <= 1.0 + 1e-8

    @pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
    def test_matches_p_norm_on_random_functions(self, p):
        phi = power_family(p)
        rng = np.random.default_rng(7)
        X = MeasureSpace.atomic(rng.uniform(0.05, 2.0, 40))
        for _ in range(40):
            f = MeasurableFn(rng.uniform(-3, 3, 40), X)
            got = luxemburg_norm(phi, X, f).value
            assert got == pytest.approx(p_norm(f, p, X), rel=1e-8)


class TestQuasiTriangle:
    def test_disjoint_indicators_ratio_two(self):
        X = MeasureSpace.atomic([1.0, 1.0])
        phi = certified(HALF)
        f = MeasurableFn(np.array([1.0, 0.0]), X)
        g = MeasurableFn(np.array([0.0, 1.0]), X)
        rep = quasi_triangle_check(phi, X, f, g)
        assert rep.data["ratio"] == pytest.approx(2.0, abs=1e-9)
        assert rep.passed
        assert any("fails" in note for note in rep.notes)

    def test_zero_pair_ratio_zero(self):
        X = MeasureSpace.atomic([1.0, 1.0])
        phi = certified(HALF)
        z = MeasurableFn.constant(X, 0.0)
        rep = quasi_triangle_check(phi, X, z, z)
        assert rep.data["ratio"] == 0.0
        assert rep.passed

    def test_random_pairs_below_k(self):
        phi = certified(HALF)
        rng = np.random.default_rng(13)
        X = MeasureSpace.atomic(rng.uniform(0.1, 1.0, 16))
        worst = 0.0
        for _ in range(60):
            f = MeasurableFn(rng.uniform(-2, 2, 16), X)
            g = MeasurableFn(rng.uniform(-2, 2, 16), X)
            rep = quasi_triangle_check(phi, X, f, g)
            assert rep.passed
            worst = max(worst, rep.data["ratio"])
        # the sharp power bound 2^((1-p)/p) = 2 also holds
        assert worst <= 2.0 + 1e-9


class TestYoungType:
    def test_equality_case_half_scaled(self):
        chi = MeasurableFn.constant(UNIT, 1.0)
        rep = young_type_check(HALF_SCALED, UNIT, chi, chi)
        assert rep.data["left"] == pytest.approx(2.0, rel=1e-12)
        assert rep.data["right"] == pytest.approx(2.0, rel=1e-12)
        assert abs(rep.slack_min) <= 1e-9

    def test_zero_f(self):
        z = MeasurableFn.constant(UNIT, 0.0)
        g = MeasurableFn.constant(UNIT, 2.0)
        rep = young_type_check(HALF_SCALED, UNIT, z, g)
        assert rep.data["left"] == 0.0
        assert rep.passed

    def test_random_pairs_nonnegative_slack(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            size = int(rng.integers(2, 24))
            X = MeasureSpace.atomic(rng.uniform(0.05, 1.5, size))
            p = float(rng.choice([0.25, 0.5, 0.75]))
            phi = scaled_power_family(p)
            f = MeasurableFn(rng.uniform(-3, 3, size), X)
            g = MeasurableFn(rng.uniform(-3, 3, size), X)
            rep = young_type_check(phi, X, f, g)
            assert rep.slack_min >= -1e-9


class TestReversedJensen:
    def test_identity_closed_forms(self):
        rep = reversed_jensen_check(HALF, UNIT, MeasurableFn.identity(UNIT))
        assert rep.data["phi_of_mean"] == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-3)
        assert rep.data["mean_modular"] == pytest.approx(2.0 / 3.0, abs=1e-3)
        assert rep.passed

    def test_constant_is_equality(self):
        rep = reversed_jensen_check(HALF, UNIT, MeasurableFn.constant(UNIT, 3.0))
        assert abs(rep.slack_min) <= 1e-12

    def test_random_functions(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            size = int(rng.integers(2, 32))
            X = MeasureSpace.atomic(rng.uniform(0.05, 2.0, size))
            f = MeasurableFn(rng.uniform(-4, 4, size), X)
            assert reversed_jensen_check(HALF, X, f).slack_min >= -1e-9


class TestL1Embedding:
    def test_identity_bound(self):
        rep = l1_embedding_bound_check(HALF, UNIT, MeasurableFn.identity(UNIT))
        assert rep.data["bound"] == pytest.approx(0.5, rel=1e-9)
        assert rep.data["norm"] == pytest.approx(4.0 / 9.0, abs=1e-4)
        assert rep.passed

    def test_constant_on_unit_mass_is_tight(self):
        X = MeasureSpace.atomic([1.0])
        f = MeasurableFn(np.array([3.0]), X)
        rep = l1_embedding_bound_check(HALF, X, f)
        assert rep.slack_min == pytest.approx(0.0, abs=1e-9)

    def test_random_functions(self):
        rng = np.random.default_rng(23)
        for _ in range(150):
            size = int(rng.integers(2, 24))
            X = MeasureSpace.atomic(rng.uniform(0.05, 2.0, size))
            p = float(rng.choice([0.25, 0.5, 0.75]))
            f = MeasurableFn(rng.uniform(-3, 3, size), X)
            assert l1_embedding_bound_check(power_family(p), X, f).slack_min >= -1e-9


class TestModularToNorm:
    def test_worked_instance(self):
        phi = certified(HALF)
        f = MeasurableFn.constant(UNIT, 9.0)  # modular = 3
        rep = modular_to_norm_bound_check(phi, UNIT, f, 4.0)
        assert rep.data["n0"] == 3
        assert rep.data["bound"] == pytest.approx(64.0)
        assert rep.data["norm"] == pytest.approx(9.0, rel=1e-8)
        assert rep.passed

    def test_small_c_gives_n0_one(self):
        phi = certified(HALF)
        f = MeasurableFn.constant(UNIT, 0.25)  # modular = 0.5 < 1
        rep = modular_to_norm_bound_check(phi, UNIT, f, 1.0)
        assert rep.data["n0"] == 1
        assert rep.data["bound"] == pytest.approx(4.0)

    def test_precondition_failure_skips(self):
        phi = certified(HALF)
        f = MeasurableFn.constant(UNIT, 9.0)
        rep = modular_to_norm_bound_check(phi, UNIT, f, 2.0)  # modular 3 >= 2
        assert rep.skipped
        assert rep.passed is None

    def test_random_instances(self):
        phi = certified(HALF)
        rng = np.random.default_rng(29)
        X = MeasureSpace.atomic(rng.uniform(0.1, 1.0, 12))
        for _ in range(60):
            f = MeasurableFn(rng.uniform(-6, 6, 12), X)
            c = modular(phi, X, f).value * float(rng.uniform(1.05, 5.0)) + 1e-9
            rep = modular_to_norm_bound_check(phi, X, f, c)
            assert rep.passed


class TestProductIdentity:
    def test_half_scaled_product_exact(self):
        alphas = np.geomspace(1e-3, 1e3, 17)
        hat = complementary(HALF_SCALED)
        prod = np.asarray(HALF_SCALED(alphas)) * np.asarray(hat(alphas))
        assert np.max(np.abs(prod - 2.0 * alphas) / alphas) < 1e-12

    @pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
    def test_power_product_constant(self, p):
        phi = power_family(p)
        rep = product_identity_check(phi, np.geomspace(1e-3, 1e3, 21))
        assert rep.passed
        ratio = rep.data["product"] / rep.data["alphas"]
        want = 1.0 / (p**p * (1.0 - p) ** (1.0 - p))
        assert np.max(np.abs(ratio - want)) < 1e-9

    def test_additive_counterexample_detected_without_failing(self):
        rep = product_identity_check(HALF_SCALED, np.array([100.0]))
        assert rep.passed
        assert any("additive lower bound fails" in n for n in rep.notes)
        # the additive value really is 2*sqrt(200)
        assert float(rep.data["sum"][0]) == pytest.approx(2.0 * math.sqrt(200.0), rel=1e-12)


class TestIntersection:
    def test_indicator_reaches_upper_bound(self):
        chi = MeasurableFn.constant(UNIT, 1.0)
        rep = intersection_check(HALF_SCALED, UNIT, chi)
        assert rep.data["l1"] == pytest.approx(1.0, rel=1e-12)
        assert rep.data["product_integral"] == pytest.approx(2.0, rel=1e-12)
        assert rep.passed

    def test_zero_function(self):
        z = MeasurableFn.constant(UNIT, 0.0)
        rep = intersection_check(HALF_SCALED, UNIT, z)
        assert rep.data["l1"] == 0.0
        assert rep.passed

    def test_random_sandwich(self):
        rng = np.random.default_rng(37)
        for _ in range(100):
            size = int(rng.integers(2, 24))
            X = MeasureSpace.atomic(rng.uniform(0.05, 2.0, size))
            p = float(rng.choice([0.25, 0.5, 0.75]))
            f = MeasurableFn(rng.uniform(-3, 3, size), X)
            assert intersection_check(scaled_power_family(p), X, f).slack_min >= -1e-9


class TestConvergenceEquivalence:
    def test_simple_approximation_sequence_co_vanishes(self):
        rng = np.random.default_rng(41)
        X = MeasureSpace.interval(1.0, 256)
        f = MeasurableFn(rng.uniform(0.0, 1.0, 256), X)
        seq = [simple_approximation(f, n) for n in range(1, 21)]
        rep = convergence_equivalence(HALF, X, seq, f)
        assert rep.verdict
        assert rep.metric_distances[-1] < 1e-3
        assert rep.norm_distances[-1] < 1e-3
        assert np.all(np.diff(rep.metric_distances) <= 1e-12)

    def test_constant_sequence_is_trivially_zero(self):
        f = MeasurableFn.identity(UNIT)
        rep = convergence_equivalence(HALF, UNIT, [f, f, f], f)
        assert rep.verdict
        assert np.all(rep.metric_distances == 0.0)
        assert np.all(rep.norm_distances == 0.0)

    def test_constant_offset_never_vanishes(self):
        X = MeasureSpace.interval(1.0, 64)
        f = MeasurableFn.identity(X)
        shifted = [f + MeasurableFn.constant(X, 1.0) for _ in range(5)]
        rep = convergence_equivalence(HALF, X, shifted, f)
        assert rep.verdict  # neither trajectory vanishes: verdicts agree
        assert rep.metric_distances[-1] > 0.9

    def test_cauchy_property_of_approximations(self):
        rng = np.random.default_rng(43)
        X = MeasureSpace.interval(1.0, 128)
        f = MeasurableFn(rng.uniform(0.0, 1.0, 128), X)
        approx = {n: simple_approximation(f, n) for n in range(1, 27)}
        sups = []
        for n in range(1, 23):
            sups.append(max(metric(HALF, X, approx[n], approx[m]) for m in range(n + 1, 27)))
        assert all(b <= a + 1e-12 for a, b in zip(sups, sups[1:]))
        assert sups[-1] < 1e-3

    def test_l1_convergence_implies_metric_convergence(self):
        rng = np.random.default_rng(47)
        X = MeasureSpace.interval(1.0, 128)
        f = MeasurableFn(rng.uniform(0.0, 1.0, 128), X)
        perturbations = [
            f + MeasurableFn(rng.uniform(-1.0, 1.0, 128) * 4.0**-n, X) for n in range(1, 12)
        ]
        l1 = [np.dot(np.abs((g - f).values), X.masses) for g in perturbations]
        d = [metric(HALF, X, g, f) for g in perturbations]
        assert all(b < a for a, b in zip(l1, l1[1:]))
        assert d[-1] < 1e-2
        assert all(b <= a + 1e-12 for a, b in zip(d, d[1:]))
