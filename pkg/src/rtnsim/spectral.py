"""Power spectral density of telegraph noise.

Periodograms use the two-sided convention normalized so that summing the
PSD over all frequencies (times the bin width) returns the mean square of
the sampled signal.  For the telegraph process this makes the reference
spectrum ``tau_c / (1 + (pi f tau_c)**2)`` (times ``J0**2``) parameter-free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .noise import RtnParams, cell_averages, generate_trajectory, value_at

SAMPLING_MODES = ("point", "cell")


@dataclass(frozen=True)
class Spectrum:
    """Averaged periodogram on non-negative frequencies (two-sided values).

    ``sampling`` is ``"point"`` for instantaneous samples on the grid and
    ``"cell"`` for exact cell averages with the box-filter response divided
    out.  Point sampling folds power above Nyquist back into the band;
    cell sampling suppresses that folding by roughly ``(f dt)**4``.
    """

    frequencies: np.ndarray
    psd: np.ndarray
    n_realizations: int = 1
    dt: float = float("nan")
    duration: float = float("nan")
    psd_stderr: np.ndarray | None = None
    n_samples: int | None = None
    mean_square: float = float("nan")
    sampling: str = "point"

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        s = np.asarray(self.psd, dtype=float)
        if f.shape != s.shape or f.ndim != 1:
            raise ParameterError("frequencies and psd must be 1-D arrays of equal length")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ParameterError("frequencies must be strictly increasing")
        if f.size and f[0] < 0:
            raise ParameterError("frequencies must be non-negative")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "psd", s)


@dataclass(frozen=True)
class PowerLawFit:
    c: float
    alpha: float
    f_lo: float
    f_hi: float
    residual: float

    def as_dict(self) -> dict:
        return {"c": self.c, "alpha": self.alpha, "f_lo": self.f_lo,
                "f_hi": self.f_hi, "residual": self.residual}


def lorentzian_psd(tau_c: float, f):
    """Two-sided PSD of unit-amplitude telegraph noise: ``tau_c / (1 + (pi f tau_c)**2)``."""
    f = np.asarray(f, dtype=float)
    out = tau_c / (1.0 + (math.pi * f * tau_c) ** 2)
    return float(out) if out.ndim == 0 else out


def _periodogram(x: np.ndarray, dt: float) -> np.ndarray:
    return dt / x.size * np.abs(np.fft.rfft(x)) ** 2


def average_psd(params: RtnParams, n_realizations: int, dt: float, duration: float, rng,
                sampling: str = "point") -> Spectrum:
    """Average the periodograms of ``n_realizations`` telegraph realizations.

    The record length must be at least ``50 * tau_c``; shorter records bias
    the low-frequency plateau.
    """
    if not dt > 0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if n_realizations < 1:
        raise ParameterError("n_realizations must be >= 1")
    if duration < 50.0 * params.tau_c:
        raise ParameterError(
            f"duration {duration} ns < 50 * tau_c = {50.0 * params.tau_c} ns; estimate would be biased")
    if sampling not in SAMPLING_MODES:
        raise ParameterError(f"sampling must be one of {SAMPLING_MODES}, got {sampling!r}")
    n = int(round(duration / dt))
    if n < 16:
        raise ParameterError("duration / dt must give at least 16 samples")
    horizon = n * dt
    grid = np.arange(n) * dt
    freqs = np.fft.rfftfreq(n, d=dt)

    total = np.zeros(freqs.size)
    total_sq = np.zeros(freqs.size)
    mean_square = 0.0
    for _ in range(n_realizations):
        traj = generate_trajectory(params, horizon, rng)
        if sampling == "point":
            x = value_at(traj, grid)
        else:
            x = cell_averages(traj, dt, n)
        p = _periodogram(x, dt)
        total += p
        total_sq += p * p
        mean_square += float(np.mean(x * x))

    mean = total / n_realizations
    if sampling == "cell":
        mean = mean / np.sinc(freqs * dt) ** 2
    if n_realizations > 1:
        var = np.maximum(total_sq / n_realizations - (total / n_realizations) ** 2, 0.0)
        stderr = np.sqrt(var * n_realizations / (n_realizations - 1) / n_realizations)
        if sampling == "cell":
            stderr = stderr / np.sinc(freqs * dt) ** 2
    else:
        stderr = None
    return Spectrum(freqs, mean, n_realizations, dt, horizon, stderr, n,
                    mean_square / n_realizations, sampling)


def integrated_power(spec: Spectrum) -> float:
    """Integral of the two-sided PSD over ``[-1/(2 dt), 1/(2 dt)]``."""
    if spec.n_samples is None:
        raise ParameterError("integrated_power needs a spectrum produced by average_psd")
    weights = np.full(spec.psd.size, 2.0)
    weights[0] = 1.0
    if spec.n_samples % 2 == 0:
        weights[-1] = 1.0
    df = 1.0 / (spec.n_samples * spec.dt)
    return float(np.sum(weights * spec.psd) * df)


def fit_power_law(spec: Spectrum, f_lo: float, f_hi: float) -> PowerLawFit:
    """Least-squares fit of ``log S = log c - alpha log f`` on ``[f_lo, f_hi]``."""
    if not (0 < f_lo < f_hi):
        raise ParameterError(f"need 0 < f_lo < f_hi, got f_lo={f_lo}, f_hi={f_hi}")
    f, s = spec.frequencies, spec.psd
    sel = (f >= f_lo) & (f <= f_hi) & (s > 0)
    if np.count_nonzero(sel) < 8:
        raise ParameterError(
            f"fit band [{f_lo}, {f_hi}] holds {np.count_nonzero(sel)} positive bins; need >= 8")
    x = np.log(f[sel])
    y = np.log(s[sel])
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return PowerLawFit(c=float(np.exp(coef[0])), alpha=float(-coef[1]), f_lo=float(f_lo),
                       f_hi=float(f_hi), residual=float(np.sqrt(np.mean(resid ** 2))))
