import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from mcrbf import figures
from mcrbf.mc import McConfig, simulate_max_sinr
from mcrbf.model import SystemModel
from mcrbf.sinr import (
    SinrDistribution,
    evt_constants,
    growth_function,
    sinr_cdf,
    sinr_pdf,
    sinr_tail,
)


def single(M, eta):
    return SinrDistribution(SystemModel(M, (M,), eta * M, 1.0), 0)


def single_cell_cdf(s, M, eta):
    # single-cell law written out directly
    s = np.asarray(s, dtype=float)
    return 1.0 - np.exp(-s / eta) / (1.0 + s) ** (M - 1)


def single_cell_pdf(s, M, eta):
    s = np.asarray(s, dtype=float)
    return np.exp(-s / eta) / (1.0 + s) ** M * (1.0 / eta * (1.0 + s) + M - 1)


def test_exponential_case():
    d = single(1, 1.0)
    assert sinr_cdf(d, math.log(2)) == pytest.approx(0.5)
    s = np.linspace(0, 10, 11)
    np.testing.assert_allclose(sinr_pdf(d, s), np.exp(-s), rtol=1e-15)
    np.testing.assert_allclose(growth_function(d, s), 1.0)


def test_density_at_zero():
    assert sinr_pdf(single(4, 250.0), 0.0) == pytest.approx(3.004, rel=1e-14)


def test_cdf_at_zero():
    for system in figures.fig1_systems():
        assert sinr_cdf(SinrDistribution(system, 0), 0.0) == 0.0


def test_density_normalized():
    d = SinrDistribution(figures.fig1_systems()[0], 0)
    total, _ = integrate.quad(lambda s: sinr_pdf(d, s), 0, np.inf, epsabs=0, epsrel=1e-12, limit=500)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_domain():
    d = single(2, 10.0)
    for fn in (sinr_cdf, sinr_pdf, sinr_tail, growth_function):
        with pytest.raises(ValueError):
            fn(d, -0.1)


def test_off_cell_rejected():
    with pytest.raises(ValueError):
        SinrDistribution(SystemModel(2, (0, 2), 10.0, 1.0, [[1, 0.1], [0.1, 1]]), 0)


def test_zero_coupling_equals_single_cell():
    s = np.linspace(0, 50, 501)
    multi = SinrDistribution(SystemModel(3, (3, 2), 300.0, 1.0, np.zeros((2, 2))), 0)
    np.testing.assert_allclose(sinr_cdf(multi, s), single_cell_cdf(s, 3, 100.0), rtol=1e-14, atol=1e-15)
    np.testing.assert_allclose(sinr_pdf(multi, s), single_cell_pdf(s, 3, 100.0), rtol=1e-13)


def test_interference_at_eta_matches_single_cell_with_all_beams():
    # mu_{2,1} = eta_1: interfering beams act like extra own-cell beams
    system = SystemModel(3, (3, 2), 300.0, 1.0, [[1, 0], [2 / 3, 1]])
    d = SinrDistribution(system, 0)
    assert system.inr_per_beam(1, 0) == pytest.approx(d.eta)
    s = np.linspace(0, 40, 401)
    np.testing.assert_allclose(sinr_cdf(d, s), single_cell_cdf(s, 5, 100.0), rtol=1e-13, atol=1e-15)


def test_growth_limit_and_consistency():
    d = SinrDistribution(figures.fig1_systems()[0], 0)
    eta = d.eta
    assert abs(growth_function(d, 1e6 * eta) - eta) / eta < 1e-4
    assert growth_function(d, 1.0) == pytest.approx(sinr_tail(d, 1.0) / sinr_pdf(d, 1.0), rel=1e-10)


def test_tail_no_underflow_in_log_space():
    d = single(4, 1.0)
    assert sinr_tail(d, 1e4) == 0.0
    assert sinr_cdf(d, 1e4) == 1.0


@st.composite
def systems(draw):
    C = draw(st.integers(1, 4))
    nt = draw(st.integers(1, 6))
    beams = tuple(draw(st.integers(1, nt)) for _ in range(C))
    pt = draw(st.floats(0.5, 1e4))
    g = np.array([[draw(st.floats(0, 0.95)) for _ in range(C)] for _ in range(C)])
    return SystemModel(nt, beams, pt, 1.0, g)


@settings(max_examples=50, deadline=None)
@given(systems())
def test_cdf_shape(system):
    d = SinrDistribution(system, 0)
    s = np.concatenate([np.linspace(0, 10, 200), np.logspace(1, 5, 100)])
    F = sinr_cdf(d, s)
    assert F[0] == 0.0
    assert np.all(np.diff(F) >= 0)
    assert np.all((F >= 0) & (F <= 1))
    assert sinr_cdf(d, 1e9) == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(systems())
def test_pdf_is_cdf_derivative(system):
    d = SinrDistribution(system, 0)
    # central differences need s > h, so the grid starts just above zero
    for s in np.linspace(0.0, 20.0, 41)[1:]:
        h = 1e-4 * (1 + s)
        fd = (sinr_cdf(d, s + h) - sinr_cdf(d, s - h)) / (2 * h)
        assert abs(fd - sinr_pdf(d, s)) < 1e-6


class TestEvt:
    def test_exponential_closed_form(self):
        K = round(math.exp(10))
        e = evt_constants(single(1, 1.0), K)
        assert e.location == pytest.approx(math.log(K), rel=1e-10)
        assert e.scale == pytest.approx(1.0)

    def test_location_window(self):
        d = SinrDistribution(figures.fig3_single(), 0)
        K = 10_000
        e = evt_constants(d, K)
        eta = d.eta
        lnK, llnK = math.log(K), math.log(math.log(K))
        slack = eta * math.log(llnK)
        assert eta * lnK - eta * 3 * llnK - slack < e.location < eta * lnK
        assert sinr_tail(d, e.location) == pytest.approx(1 / K, rel=1e-9)

    def test_needs_two_users(self):
        with pytest.raises(ValueError):
            evt_constants(single(2, 3.0), 1)

    def test_concentration_of_maxima(self):
        system = figures.fig3_single()
        eta = system.snr_per_beam(0)
        K, M = 10_000, 3
        lnK = math.log(K)
        llnK = math.log(lnK)
        slack = eta * math.log(llnK)
        lo = eta * lnK - eta * M * llnK - slack
        hi = eta * lnK - eta * (M - 2) * llnK + slack
        x = simulate_max_sinr(McConfig(system, (K,), 300, master_seed=17), 0)
        assert np.mean((x >= lo) & (x <= hi)) >= 0.8
