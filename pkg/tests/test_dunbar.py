import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dunbar_trust.dunbar import (
    DEFAULT_LAYERS,
    DEFAULT_POPULATIONS,
    Axis,
    InfeasibleLayerError,
    SweepTable,
    alpha_cutoff_curve,
    beta_independence_check,
    cutoff_for_layer,
    cutoff_vs_population,
    sweep_cutoffs,
    validate_layers,
)
from dunbar_trust.trust import power_law, uniform

# Independent quadrature + brentq values (see test_trust.py).
PL21 = {(150, 50): 0.23742950995369855, (500, 150): 0.2559842729768875,
        (1500, 150): 0.49676112458808724, (5000, 150): 0.7624204375117001}
PL21_TRUNC_5000_150 = 0.780753101128706
PL29_150_50 = 0.17596751707255398


class TestCutoffForLayer:
    @pytest.mark.parametrize(
        "n,layer,expected",
        [(150, 50, 0.6667), (5000, 150, 0.97), (150, 150, 0.0), (150, 15, 0.90), (150, 5, 0.9667)],
    )
    def test_uniform(self, n, layer, expected):
        res = cutoff_for_layer(uniform(), n, layer)
        assert res.feasible
        assert res.cutoff == pytest.approx(expected, abs=5e-5)

    @pytest.mark.parametrize("key", sorted(PL21))
    def test_power_law(self, key):
        n, layer = key
        assert cutoff_for_layer(power_law(2.1), n, layer).cutoff == pytest.approx(PL21[key], abs=1e-9)

    def test_truncated_driver(self):
        res = cutoff_for_layer(power_law(2.1, input_range="truncated"), 5000, 150)
        assert res.cutoff == pytest.approx(PL21_TRUNC_5000_150, abs=1e-9)

    def test_infeasible(self):
        res = cutoff_for_layer(uniform(), 100, 150)
        assert not res.feasible and res.cutoff is None

    @pytest.mark.parametrize("n,layer", [(1, 1), (150, 0)])
    def test_bad_args(self, n, layer):
        with pytest.raises(ValueError):
            cutoff_for_layer(uniform(), n, layer)

    @given(st.integers(2, 10_000).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))))
    def test_uniform_closed_form(self, nl):
        n, layer = nl
        assert cutoff_for_layer(uniform(), n, layer).cutoff == 1 - layer / n

    @pytest.mark.parametrize("dist", [uniform(), power_law(2.1), power_law(2.9), power_law(2.1, input_range="truncated")],
                             ids=str)
    @pytest.mark.parametrize("n", DEFAULT_POPULATIONS)
    @pytest.mark.parametrize("layer", DEFAULT_LAYERS)
    def test_round_trip(self, dist, n, layer):
        res = cutoff_for_layer(dist, n, layer)
        assert n * dist.survival_fraction(res.cutoff) == pytest.approx(layer, abs=1e-6)


class TestSweep:
    def test_grid_shape(self):
        table = sweep_cutoffs(uniform(), 150)
        assert len(table) == 101
        assert table.x[0] == 0.0 and table.x[-1] == 1.0
        assert table.axis is Axis.TRUST_CUTOFF

    def test_paper_rows(self):
        t150 = sweep_cutoffs(uniform(), 150)
        assert t150.y[90] == pytest.approx(15)
        t500 = sweep_cutoffs(uniform(), 500)
        assert t500.y[70] == pytest.approx(150)
        assert t500.y[90] == pytest.approx(50)

    @pytest.mark.parametrize("dist", [uniform(), power_law(2.1), power_law(2.9)], ids=str)
    def test_nonincreasing_and_starts_at_n(self, dist):
        table = sweep_cutoffs(dist, 1500)
        assert table.y[0] == 1500
        assert np.all(np.diff(table.y) <= 0)

    def test_irregular_step(self):
        table = sweep_cutoffs(uniform(), 10, step=0.3)
        np.testing.assert_allclose(table.x, [0.0, 0.3, 0.6, 0.9])

    @pytest.mark.parametrize("step", [0.0, 1.0, -0.1])
    def test_bad_step(self, step):
        with pytest.raises(ValueError):
            sweep_cutoffs(uniform(), 10, step=step)

    def test_table_requires_increasing_axis(self):
        with pytest.raises(ValueError):
            SweepTable(Axis.ALPHA, np.array([2.5, 2.1]), np.zeros(2), np.ones(2, dtype=bool))


class TestPopulationCurve:
    def test_paper_values(self):
        t5 = cutoff_vs_population(uniform(), 5, [150, 500])
        np.testing.assert_allclose(t5.y, [0.9667, 0.99], atol=5e-5)
        t50 = cutoff_vs_population(uniform(), 50, [150, 500])
        np.testing.assert_allclose(t50.y, [0.6667, 0.90], atol=5e-5)
        assert cutoff_vs_population(uniform(), 5, [5000]).y[0] == pytest.approx(0.999)

    @pytest.mark.parametrize("dist", [uniform(), power_law(2.1), power_law(2.5)], ids=str)
    @pytest.mark.parametrize("layer", DEFAULT_LAYERS)
    def test_strictly_increasing(self, dist, layer):
        table = cutoff_vs_population(dist, layer, DEFAULT_POPULATIONS)
        assert np.all(np.diff(table.y) > 0)

    def test_infeasible_rows_flagged(self):
        table = cutoff_vs_population(uniform(), 150, [100, 150, 500])
        assert table.feasible.tolist() == [False, True, True]
        assert np.isnan(table.y[0])
        assert table.y[1] == 0.0
        assert table.axis is Axis.POPULATION_SIZE


class TestAlphaCurve:
    def test_paper_values(self):
        table = alpha_cutoff_curve(150, 50, [2.1, 2.5, 2.9])
        assert table.y[0] == pytest.approx(PL21[(150, 50)], abs=1e-9)
        assert table.y[-1] == pytest.approx(PL29_150_50, abs=1e-9)
        assert np.all(np.diff(table.y) < 0)

    @pytest.mark.parametrize("n,layer", [(150, 50), (500, 150), (1500, 150), (5000, 150), (150, 5)])
    def test_strictly_decreasing(self, n, layer):
        alphas = np.linspace(2.05, 2.95, 19)
        table = alpha_cutoff_curve(n, layer, alphas)
        assert np.all(np.diff(table.y) < 0)

    def test_sorts_input(self):
        table = alpha_cutoff_curve(150, 50, [2.9, 2.1])
        assert table.x.tolist() == [2.1, 2.9]

    def test_infeasible(self):
        with pytest.raises(InfeasibleLayerError):
            alpha_cutoff_curve(100, 150, [2.5])

    def test_boundary_alpha_does_not_crash(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            table = alpha_cutoff_curve(150, 50, [2.0, 2.5, 3.0])
        assert np.all(np.diff(table.y) < 0)


class TestBetaIndependence:
    def test_uniform(self):
        assert beta_independence_check(uniform(), 150, 50, [0.25, 0.5])

    def test_power_law(self):
        assert beta_independence_check(power_law(2.1), 500, 150, [0.25, 0.5])

    def test_single_beta(self):
        assert beta_independence_check(power_law(2.9), 150, 5, [0.3])

    def test_small_fraction(self):
        assert beta_independence_check(uniform(), 5000, 5, [0.25, 0.5, 1.0], n_steps=5000)

    def test_r0_does_not_matter(self):
        a = cutoff_for_layer(uniform(), 500, 150).cutoff
        assert beta_independence_check(uniform(), 500, 150, [0.25, 0.5], r0=0.05)
        assert cutoff_for_layer(uniform(), 500, 150).cutoff == a

    @pytest.mark.parametrize("betas", [[], [0.0, 0.5], [-0.1]])
    def test_bad_betas(self, betas):
        with pytest.raises(ValueError):
            beta_independence_check(uniform(), 150, 50, betas)


class TestLayers:
    def test_defaults_valid(self):
        assert validate_layers(DEFAULT_LAYERS) == (5, 15, 50, 150)

    @pytest.mark.parametrize("levels", [[], [5, 5], [15, 5], [0, 5]])
    def test_invalid(self, levels):
        with pytest.raises(ValueError):
            validate_layers(levels)
