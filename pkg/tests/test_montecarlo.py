import math

import numpy as np
import pytest

from wilks.errors import InvalidScenario
from wilks.graphdata import UndirectedGraph, simulate_beta_graph
from wilks.montecarlo import (
    SimScenario,
    build_truth,
    qq_export,
    qq_table,
    quadratic_degree_stat,
    resolve_workers,
    run_power,
    run_type1,
    scenario_null,
)
from wilks.numerics import chi_square_sf


class TestScenario:
    def test_defaults(self):
        assert SimScenario(schedule="H01", n=50).r == 50
        assert SimScenario(schedule="H02", n=50).r == 25
        assert SimScenario(schedule="H03").r == 5
        assert SimScenario(schedule="H04").r == 10
        assert SimScenario(schedule="power").r == 5

    @pytest.mark.parametrize(
        "kw",
        [
            {"reps": 0},
            {"model": "p1"},
            {"schedule": "H05"},
            {"alpha_levels": (0.05, 1.0)},
            {"schedule": "H01", "n": 20, "r": 5},
            {"r": 500},
            {"k_common": 0},
            {"schedule": "H04", "null_values": (0.0,)},
            {"schedule": "H03", "r": 3, "null_values": (0.0,)},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(InvalidScenario):
            SimScenario(**kw)

    def test_bt_tested_indices_skip_reference(self):
        for schedule in ("H02", "H03", "H04", "power"):
            sc = SimScenario(model="bt", schedule=schedule, n=20)
            assert 0 not in sc.tested_indices
            assert sc.tested_indices == tuple(range(1, sc.r))
            assert 0 not in scenario_null(sc).indices


class TestBuildTruth:
    def test_h01(self):
        b = build_truth(SimScenario(schedule="H01", n=3, ln_factor=1.0))
        np.testing.assert_allclose(b, [0, math.log(3) / 2, math.log(3)])

    def test_h02_zero(self):
        np.testing.assert_array_equal(build_truth(SimScenario(schedule="H02", n=4, r=2)), 0.0)

    def test_h04_prefix_zero(self):
        b = build_truth(SimScenario(schedule="H04", n=30, ln_factor=0.2))
        assert np.all(b[:10] == 0)
        np.testing.assert_allclose(b[10:], np.arange(10, 30) * 0.2 * math.log(30) / 29)

    def test_power(self):
        b = build_truth(SimScenario(schedule="power", n=100, r=5, c=1.2))
        np.testing.assert_allclose(b[:5], [0, 0.3, 0.6, 0.9, 1.2])
        np.testing.assert_allclose(b[5:], 0.2 * np.arange(1, 96) * math.log(100) / 100)

    def test_h03_values(self):
        sc = SimScenario(schedule="H03", n=10, r=3, null_values=(0.1, 0.2, 0.3))
        np.testing.assert_allclose(build_truth(sc)[:3], [0.1, 0.2, 0.3])
        null = scenario_null(sc)
        assert null.is_specified and list(null.values) == [0.1, 0.2, 0.3]


class TestRuns:
    def test_single_rep(self):
        rep = run_type1(SimScenario(schedule="H04", n=40, reps=1, master_seed=3))
        for rate in rep.rejection_rates.values():
            assert rate in (0.0, 1.0)

    def test_monotone_in_alpha(self):
        sc = SimScenario(schedule="H04", n=40, reps=40, alpha_levels=(0.01, 0.05, 0.1, 0.5))
        rates = run_type1(sc).rejection_rates
        vals = [rates[a] for a in sorted(rates)]
        assert vals == sorted(vals)

    def test_deterministic(self):
        sc = SimScenario(schedule="H02", n=30, reps=12, master_seed=5)
        a, b = run_type1(sc), run_type1(sc)
        np.testing.assert_array_equal(a.statistics, b.statistics)
        assert a.to_csv() == b.to_csv()

    def test_workers_do_not_matter(self, monkeypatch):
        sc = SimScenario(model="bt", schedule="H04", n=25, reps=10, master_seed=2)
        monkeypatch.setenv("WILKS_THREADS", "1")
        one = run_type1(sc, workers=4)
        monkeypatch.setenv("WILKS_THREADS", "2")
        two = run_type1(sc, workers=2)
        np.testing.assert_array_equal(one.statistics, two.statistics)
        assert one.to_csv() == two.to_csv()

    def test_resolve_workers(self, monkeypatch):
        monkeypatch.setenv("WILKS_THREADS", "3")
        assert resolve_workers(8) == 3
        assert resolve_workers(2) == 2
        monkeypatch.setenv("WILKS_THREADS", "junk")
        assert resolve_workers(5) == 5

    def test_power_c0_equals_type1(self):
        sc = SimScenario(schedule="power", n=40, r=5, c=0.0, reps=20, master_seed=4)
        p = run_power(sc)
        t = run_type1(sc)
        assert p.rejection_rates == t.rejection_rates
        assert p.wald_rates is not None and t.wald_rates is None

    def test_power_requires_schedule(self):
        with pytest.raises(InvalidScenario):
            run_power(SimScenario(schedule="H04", n=30, reps=2))
        with pytest.raises(InvalidScenario):
            run_type1(SimScenario(schedule="power", n=30, c=1.0, reps=2))

    def test_nonexistence_counted(self):
        sc = SimScenario(schedule="H01", n=12, ln_factor=0.5, reps=30, master_seed=1)
        rep = run_type1(sc)
        assert 0 < rep.nonexistence_rate < 1
        assert rep.reps_effective == round(30 * (1 - rep.nonexistence_rate))

    def test_regime_and_moments(self):
        rep = run_type1(SimScenario(schedule="H01", n=60, reps=20))
        assert rep.regime == "normal" and rep.ks_distance_normal is not None
        assert rep.mean_stat == pytest.approx(np.mean(rep.statistics))
        np.testing.assert_allclose(rep.z, (rep.statistics - 60) / math.sqrt(120))

    def test_csv_and_summary(self):
        sc = SimScenario(schedule="power", n=30, r=4, c=0.5, reps=5)
        rep = run_power(sc)
        lines = rep.to_csv().splitlines()
        assert lines[0].split(",")[-4:] == ["rate", "wald_rate", "nonexistence", "reps_effective"]
        assert len(lines) == 3
        assert "wald" in rep.summary()


class TestQQ:
    def test_single_row(self):
        t = qq_table([1.5], 10)
        assert t.shape == (1, 3) and t[0, 0] == 1.5 and t[0, 1] == 0.0

    def test_synthetic_normal(self):
        rng = np.random.default_rng(0)
        for m, bound in ((200, 0.6), (20000, 0.1)):
            z = rng.standard_normal(m)
            t = qq_table(z, 50)
            core = slice(m // 100, m - m // 100)
            assert np.max(np.abs(t[core, 0] - t[core, 1])) < bound

    def test_chi2_column(self):
        t = qq_table(np.zeros(4), 8)
        for (_, _, q), p in zip(t, (0.125, 0.375, 0.625, 0.875)):
            x = q * 4 + 8
            assert 1 - chi_square_sf(x, 8) == pytest.approx(p, abs=1e-9)

    def test_export(self):
        table, rep = qq_export(SimScenario(schedule="H01", n=40, reps=15))
        assert table.shape == (rep.reps_effective, 3)
        assert np.all(np.diff(table[:, 0]) >= 0)


class TestQuadraticDegreeStat:
    def test_degenerate(self):
        g = UndirectedGraph(np.zeros((6, 6), dtype=int))
        assert quadratic_degree_stat(g, np.full(6, -50.0), 6) == pytest.approx(0.0, abs=1e-12)

    def test_zero_r(self):
        g = simulate_beta_graph(np.zeros(5), 0)
        assert quadratic_degree_stat(g, np.zeros(5), 0) == 0.0

    def test_formula(self):
        g = simulate_beta_graph(np.zeros(9), 1)
        t = quadratic_degree_stat(g, np.zeros(9), 9)
        assert t == pytest.approx(np.sum((g.degrees - 4.0) ** 2 / 2.0))
