import math

import numpy as np
import pytest
from scipy import stats

from mcrbf import figures
from mcrbf.mc import (
    McConfig,
    complex_normal,
    draw_beams,
    ks_statistic,
    simulate_max_sinr,
    simulate_sinr_samples,
    simulate_sumrate,
    simulate_trace,
    trial_stream,
)
from mcrbf.model import SystemModel
from mcrbf.rate import sumrate_closed_multicell, sumrate_closed_single


def single_system(M, eta, nt=None):
    return SystemModel(nt or M, (M,), eta * M, 1.0)


class TestStreams:
    def test_reproducible(self):
        a = trial_stream(5, 3, 1, 0).random(4)
        b = trial_stream(5, 3, 1, 0).random(4)
        assert np.array_equal(a, b)

    def test_distinct_roles_cells_trials(self):
        base = trial_stream(5, 3, 1, 0).random(4)
        for args in ((5, 3, 1, 1), (5, 3, 2, 0), (5, 4, 1, 0), (6, 3, 1, 0)):
            assert not np.array_equal(base, trial_stream(*args).random(4))

    def test_full_width_seed(self):
        trial_stream(2**64 - 1, 0, 0, 0).random()

    def test_channel_normalization(self):
        z = complex_normal(trial_stream(1, 0, 0, 1), 1_000_000)
        assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, rel=0.01)
        assert abs(np.mean(z)) < 5e-3
        assert np.var(z.real) == pytest.approx(0.5, rel=0.01)


class TestBeams:
    def test_scalar(self):
        q = draw_beams(1, 1, trial_stream(0, 0, 0, 0))
        assert q.shape == (1, 1)
        assert abs(q[0, 0]) == pytest.approx(1.0)

    @pytest.mark.parametrize("M,nt", [(2, 4), (4, 4), (3, 6)])
    def test_orthonormal(self, M, nt):
        q = draw_beams(M, nt, trial_stream(1, 2, 3, 0))
        np.testing.assert_allclose(q.conj().T @ q, np.eye(M), atol=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            draw_beams(5, 4, trial_stream(0, 0, 0, 0))

    def test_haar_isotropy(self):
        nt = 4
        h = np.zeros(nt, dtype=complex)
        h[0] = 1.0
        vals = np.array([
            abs(h.conj() @ draw_beams(1, nt, trial_stream(9, t, 0, 0))[:, 0]) ** 2 for t in range(20_000)
        ])
        assert vals.mean() == pytest.approx(1 / nt, rel=0.01 * 3)
        assert stats.kstest(vals, stats.beta(1, nt - 1).cdf).statistic < 0.015


class TestConfig:
    def test_validation(self):
        s = single_system(2, 10.0)
        with pytest.raises(ValueError):
            McConfig(s, (1, 1), 10)
        with pytest.raises(ValueError):
            McConfig(s, (0,), 10)
        with pytest.raises(ValueError):
            McConfig(s, (1,), 0)
        with pytest.raises(ValueError):
            McConfig(s, (1,), 1, workers=0)

    def test_off_cell_may_have_no_users(self):
        s = SystemModel(2, (2, 0), 10.0, 1.0, [[1, 0.3], [0.3, 1]])
        r = simulate_sumrate(McConfig(s, (3, 0), 50, 1))
        assert r[1].value == 0.0 and r[0].value > 0


class TestSimulation:
    def test_exponential_samples(self):
        x = simulate_sinr_samples(McConfig(single_system(1, 1.0), (100,), 1000, 3), 0)
        assert ks_statistic(x, stats.expon.cdf) < 0.01

    def test_exponential_rate(self):
        r = simulate_sumrate(McConfig(single_system(1, 1.0), (1,), 100_000, 4))[0]
        assert abs(r.value - 0.596347362323194 / math.log(2)) < 3 * r.error_estimate

    def test_single_cell_reference_rate(self):
        s = figures.fig2_single()
        r = simulate_sumrate(McConfig(s, (10,), 5000, 5))[0]
        closed = sumrate_closed_single(10, 3, s.snr_per_beam(0)).value
        assert abs(r.value - closed) < 3 * r.error_estimate

    def test_two_cell_reference_rate(self):
        s = figures.fig2_two_cell()
        r = simulate_sumrate(McConfig(s, (10, 10), 5000, 6))[0]
        closed = sumrate_closed_multicell(s, 0, 10).value
        assert abs(r.value - closed) < 3 * r.error_estimate

    def test_max_with_one_user_matches_samples(self):
        cfg = McConfig(figures.fig2_two_cell(), (1, 1), 300, 8)
        assert np.array_equal(simulate_max_sinr(cfg, 0), simulate_sinr_samples(cfg, 0))

    def test_max_rate_equals_sumrate(self):
        s = figures.fig2_single()
        cfg = McConfig(s, (5,), 4000, 12)
        x = simulate_max_sinr(cfg, 0)
        per_beam = 3 * np.log2(1 + x)
        r = simulate_sumrate(cfg)[0]
        se = math.hypot(r.error_estimate, per_beam.std(ddof=1) / math.sqrt(x.size))
        assert abs(per_beam.mean() - r.value) < 3 * se

    def test_scheduling_gain(self):
        s = figures.fig2_single()
        means = [simulate_max_sinr(McConfig(s, (K,), 400, 13), 0).mean() for K in (1, 2, 10, 100)]
        assert all(b >= a for a, b in zip(means, means[1:]))

    def test_fewer_users_than_beams(self):
        r = simulate_sumrate(McConfig(single_system(4, 10.0), (1,), 200, 14))[0]
        assert r.value > 0

    def test_rates_nonnegative(self):
        tr = simulate_trace(McConfig(figures.fig1_systems()[1], (5, 2, 2, 2), 50, 15))
        assert tr.rates.shape == (50, 4)
        assert np.all(tr.rates >= 0)


class TestDeterminism:
    @pytest.mark.parametrize("workers", [2, 3, 7])
    def test_workers_do_not_change_trace(self, workers):
        base = dict(system=figures.fig2_two_cell(), users=(6, 4), trials=101, master_seed=99)
        a = simulate_trace(McConfig(**base), [(0, 1)])
        b = simulate_trace(McConfig(**base, workers=workers), [(0, 1)])
        assert a.to_csv() == b.to_csv()
        assert a.samples_to_csv() == b.samples_to_csv()
        ra = simulate_sumrate(McConfig(**base), a)
        rb = simulate_sumrate(McConfig(**base, workers=workers), b)
        assert [r.value for r in ra] == [r.value for r in rb]

    def test_trials_are_prefix_stable(self):
        # trial t depends only on (seed, t): a longer run extends a shorter one
        s = figures.fig2_single()
        a = simulate_trace(McConfig(s, (3,), 20, 1)).rates
        b = simulate_trace(McConfig(s, (3,), 40, 1)).rates
        assert np.array_equal(a, b[:20])

    def test_trace_csv_format(self):
        tr = simulate_trace(McConfig(figures.fig2_single(), (2,), 3, 42), [(0, 0)])
        lines = tr.to_csv().splitlines()
        assert lines[0] == "# mcrbf trace schema_version=1 master_seed=42"
        assert lines[1] == "trial,cell,rate"
        assert len(lines) == 2 + 3
        t, c, v = lines[2].split(",")
        assert (t, c) == ("0", "0") and float(v) == pytest.approx(tr.rates[0, 0], rel=1e-11)
        slines = tr.samples_to_csv().splitlines()
        assert slines[1] == "trial,cell,beam,sinr"
        assert len(slines) == 2 + 3 * 2
