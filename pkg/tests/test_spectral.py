import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lorentzian_by_quadrature
from rtnsim.errors import ParameterError
from rtnsim.noise import RtnParams, stream
from rtnsim.spectral import (Spectrum, average_psd, fit_power_law, integrated_power,
                             lorentzian_psd)


@pytest.mark.parametrize("tau_c", [1.0, 10.0, 30.0])
@pytest.mark.parametrize("f", [0.0, 0.003, 0.02, 0.3])
def test_lorentzian_matches_quadrature_oracle(tau_c, f):
    assert lorentzian_psd(tau_c, f) == pytest.approx(lorentzian_by_quadrature(tau_c, f), rel=1e-8)


def test_lorentzian_examples():
    tau = 7.0
    assert lorentzian_psd(tau, 0.0) == tau
    assert lorentzian_psd(tau, 1 / (math.pi * tau)) == pytest.approx(tau / 2, rel=1e-15)
    f = np.array([1e3, 1e4])
    slope = np.diff(np.log(lorentzian_psd(tau, f))) / np.diff(np.log(f))
    assert slope[0] == pytest.approx(-2.0, abs=1e-6)
    assert lorentzian_psd(tau, 1e4) == pytest.approx(1 / (math.pi ** 2 * 1e8 * tau), rel=1e-6)


@pytest.fixture(scope="module")
def spectrum_tc10():
    return average_psd(RtnParams(1.0, 10.0), 2000, 0.5, 2000.0, stream(101))


def test_low_frequency_plateau(spectrum_tc10):
    assert spectrum_tc10.psd[0] == pytest.approx(10.0, rel=0.10)


def test_knee_is_half_plateau(spectrum_tc10):
    f_knee = 1 / (math.pi * 10.0)
    k = int(np.argmin(np.abs(spectrum_tc10.frequencies - f_knee)))
    assert spectrum_tc10.psd[k] == pytest.approx(5.0, rel=0.10)


def test_spectrum_invariants(spectrum_tc10):
    assert np.all(np.diff(spectrum_tc10.frequencies) > 0)
    assert spectrum_tc10.frequencies[0] == 0.0
    assert np.all(spectrum_tc10.psd >= 0)


def test_parseval_point_sampling(spectrum_tc10):
    assert integrated_power(spectrum_tc10) == pytest.approx(spectrum_tc10.mean_square, rel=0.05)


def test_single_periodogram_integrates_to_variance():
    spec = average_psd(RtnParams(1.0, 10.0), 1, 0.5, 2000.0, stream(3))
    assert integrated_power(spec) == pytest.approx(1.0, rel=0.15)


def test_duration_must_cover_fifty_correlation_times():
    with pytest.raises(ParameterError):
        average_psd(RtnParams(1.0, 10.0), 4, 0.5, 499.0, stream(0))


@pytest.mark.parametrize("kwargs", [dict(dt=0.0), dict(n_realizations=0), dict(sampling="hann")])
def test_average_psd_argument_checks(kwargs):
    args = dict(n_realizations=2, dt=0.5, duration=100.0, sampling="point")
    args.update(kwargs)
    with pytest.raises(ParameterError):
        average_psd(RtnParams(1.0, 1.0), rng=stream(0), **args)


@pytest.mark.parametrize("tau_c", [1.0, 10.0, 30.0])
def test_cell_spectrum_converges_to_lorentzian(tau_c):
    dt, duration = 0.5, 2000.0
    spec = average_psd(RtnParams(1.0, tau_c), 2000, dt, duration, stream(7, int(tau_c)),
                       sampling="cell")
    f = spec.frequencies
    band = (f >= 1 / (10 * duration)) & (f <= 1 / (4 * dt))
    z = (spec.psd[band] - lorentzian_psd(tau_c, f[band])) / spec.psd_stderr[band]
    # many bins: allow the tail a Gaussian scatter would produce
    assert np.mean(np.abs(z) <= 3) >= 0.99
    assert np.max(np.abs(z)) < 5


def test_amplitude_scales_psd_by_variance():
    a = average_psd(RtnParams(1.0, 2.0), 3, 0.5, 200.0, stream(8))
    b = average_psd(RtnParams(3.0, 2.0), 3, 0.5, 200.0, stream(8))
    np.testing.assert_allclose(b.psd, 9.0 * a.psd, rtol=1e-12)


def _power_law(c, alpha, lo=1e-3, hi=1.0, n=40):
    f = np.geomspace(lo, hi, n)
    return Spectrum(f, c / f ** alpha)


def test_fit_recovers_exact_power_law():
    fit = fit_power_law(_power_law(4e-3, 0.89), 1e-3, 1.0)
    assert fit.alpha == pytest.approx(0.89, abs=1e-10)
    assert fit.c == pytest.approx(4e-3, rel=1e-10)
    assert fit.residual < 1e-10


def test_fit_on_lorentzian_tail():
    tau = 10.0
    f = np.geomspace(1.0, 50.0, 64)  # far above the knee 1/(pi tau) ~ 0.03
    fit = fit_power_law(Spectrum(f, lorentzian_psd(tau, f)), 1.0, 50.0)
    assert fit.alpha == pytest.approx(2.0, abs=0.05)


def test_fit_constant_spectrum():
    f = np.linspace(0.1, 1.0, 20)
    fit = fit_power_law(Spectrum(f, np.full(20, 3.0)), 0.1, 1.0)
    assert fit.alpha == pytest.approx(0.0, abs=1e-12)
    assert fit.c == pytest.approx(3.0, rel=1e-12)


def test_fit_needs_eight_bins():
    f = np.linspace(0.1, 1.0, 7)
    with pytest.raises(ParameterError):
        fit_power_law(Spectrum(f, 1 / f), 0.1, 1.0)
    with pytest.raises(ParameterError):
        fit_power_law(Spectrum(f, 1 / f), 1.0, 0.1)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(-1.5, 3.0), st.floats(1e-3, 1e3))
def test_fit_scale_equivariance(c, alpha, k):
    rng = np.random.default_rng(0)
    f = np.geomspace(1e-2, 1.0, 30)
    psd = c / f ** alpha * np.exp(0.1 * rng.normal(size=f.size))
    base = fit_power_law(Spectrum(f, psd), 1e-2, 1.0)
    scaled = fit_power_law(Spectrum(f, k * psd), 1e-2, 1.0)
    assert scaled.alpha == pytest.approx(base.alpha, abs=1e-12)
    assert scaled.c == pytest.approx(k * base.c, rel=1e-12)


def test_spectrum_rejects_bad_frequencies():
    with pytest.raises(ParameterError):
        Spectrum([0.2, 0.1], [1.0, 1.0])
    with pytest.raises(ParameterError):
        Spectrum([-0.1, 0.1], [1.0, 1.0])
