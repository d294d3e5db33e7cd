"""Pulse schedules, concurrence maxima and parameter sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .entanglement import ddse as ddse_of
from .errors import ParameterError
from .montecarlo import EnsembleConfig, EnsembleResult, default_grid, run_ensemble
from .noise import RtnParams
from .qdyn import ControlParams, mhz_to_angular

TAU_ENT_EXP = 140.0
J12_EXP = math.pi / TAU_ENT_EXP
J1_OVER_2PI_MHZ = 280.0
J2_OVER_2PI_MHZ = 320.0
DEFAULT_ENTANGLE_DURATION = 600.0
DB_MODES = ("persistent", "off_after_prep")


@dataclass(frozen=True)
class PulsePhase:
    duration: float
    controls: ControlParams
    noise_active: bool = True

    def __post_init__(self):
        if not self.duration >= 0 or not math.isfinite(self.duration):
            raise ParameterError(f"phase duration must be finite and >= 0, got {self.duration}")


@dataclass(frozen=True)
class Protocol:
    phases: tuple

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        if not self.phases:
            raise ParameterError("a protocol needs at least one phase")
        if self.duration <= 0:
            raise ParameterError("protocol duration must be > 0")

    @property
    def duration(self) -> float:
        return float(sum(ph.duration for ph in self.phases))


@dataclass(frozen=True)
class SweepRow:
    swept_value: float
    max_concurrence: float
    t_star: float
    stderr: float


def shulman_protocol(tau_prep: float, R: float = 1.0, db_mode: str = "persistent",
                     entangle_duration: float = DEFAULT_ENTANGLE_DURATION,
                     j1_over_2pi_mhz: float = J1_OVER_2PI_MHZ,
                     j2_over_2pi_mhz: float = J2_OVER_2PI_MHZ) -> Protocol:
    """Preparation rotation followed by the entangling evolution.

    Phase 1 lasts ``tau_prep`` with only the field gradients on,
    ``dB = pi / (2 tau_prep)``, which rotates each qubit by pi/2 about x.
    Phase 2 switches on ``J1``, ``J2`` and ``J12 = R * pi / 140 ns``.  The
    gradient stays on in ``persistent`` mode and is zero in
    ``off_after_prep`` mode.  Noise acts in both phases.
    """
    if not tau_prep > 0:
        raise ParameterError(f"tau_prep must be > 0, got {tau_prep}")
    if not R > 0:
        raise ParameterError(f"R must be > 0, got {R}")
    if not entangle_duration > 0:
        raise ParameterError(f"entangle_duration must be > 0, got {entangle_duration}")
    if db_mode not in DB_MODES:
        raise ParameterError(f"db_mode must be one of {DB_MODES}, got {db_mode!r}")
    db = math.pi / (2.0 * tau_prep)
    prep = PulsePhase(tau_prep, ControlParams(db1=db, db2=db), True)
    db_ent = db if db_mode == "persistent" else 0.0
    ent = PulsePhase(entangle_duration,
                     ControlParams(j1=mhz_to_angular(j1_over_2pi_mhz),
                                   j2=mhz_to_angular(j2_over_2pi_mhz),
                                   j12=R * J12_EXP, db1=db_ent, db2=db_ent), True)
    return Protocol((prep, ent))


def max_concurrence(result: EnsembleResult, t_min: float):
    """``(t*, C*)``: earliest argmax of the concurrence over times ``>= t_min``."""
    idx = np.flatnonzero(result.times >= t_min)
    if idx.size == 0:
        raise ParameterError(f"no sample times at or after t_min={t_min}")
    k = idx[int(np.argmax(result.concurrence[idx]))]
    return float(result.times[k]), float(result.concurrence[k])


def sweep_duration(R: float) -> float:
    return max(DEFAULT_ENTANGLE_DURATION, 1.2 * 2.0 * math.pi / (R * J12_EXP))


def sweep_grid(tau_prep: float, R: float, entangle_duration: float) -> np.ndarray:
    """1 ns grid plus a fine grid over the first concurrence oscillation.

    The fine step is 1/200 of the time to the first maximum, so the peak is
    resolved even for strong coupling.
    """
    j12 = R * J12_EXP
    t_first = math.pi / j12
    fine_step = min(1.0, t_first / 200.0)
    fine_end = min(tau_prep + 2.0 * t_first, tau_prep + entangle_duration)
    fine = tau_prep + np.arange(int(math.floor((fine_end - tau_prep) / fine_step)) + 1) * fine_step
    coarse = default_grid(tau_prep + entangle_duration)
    return np.unique(np.concatenate((coarse, fine)))


def _sweep_point(tau_prep, R, noise, cfg, index, db_mode):
    duration = sweep_duration(R)
    proto = shulman_protocol(tau_prep, R, db_mode, duration)
    point_cfg = replace(cfg, master_seed=cfg.master_seed + index,
                        sample_grid=tuple(sweep_grid(tau_prep, R, duration)))
    res = run_ensemble(proto, noise, point_cfg)
    t_star, c_star = max_concurrence(res, tau_prep)
    k = int(np.searchsorted(res.times, t_star))
    return t_star, c_star, float(res.ddse_stderr[k])


def sweep_R(values: Sequence[float], tau_prep: float, noise: RtnParams, cfg: EnsembleConfig,
            db_mode: str = "persistent") -> list:
    """Maximum concurrence for each coupling ratio ``R`` (seed offset = index)."""
    values = list(values)
    if not values:
        raise ParameterError("sweep values must be non-empty")
    rows = []
    for j, R in enumerate(values):
        t_star, c_star, se = _sweep_point(tau_prep, R, noise, cfg, j, db_mode)
        rows.append(SweepRow(float(R), c_star, t_star, se))
    return rows


def sweep_prep(values: Sequence[float], R: float, noise: RtnParams, cfg: EnsembleConfig,
               db_mode: str = "persistent") -> list:
    """Maximum concurrence for each preparation time (seed offset = index)."""
    values = list(values)
    if not values:
        raise ParameterError("sweep values must be non-empty")
    rows = []
    for j, tp in enumerate(values):
        t_star, c_star, se = _sweep_point(tp, R, noise, cfg, j, db_mode)
        rows.append(SweepRow(float(tp), c_star, t_star, se))
    return rows


def envelope_decay_time(times, ddse, tau_prep: float, period: float) -> float:
    """First time the DDSE envelope drops below half its initial value.

    The envelope is sampled as the DDSE maximum over consecutive windows of
    one concurrence period starting at ``tau_prep``; the crossing is
    linearly interpolated between window maxima.  Returns ``inf`` if the
    envelope never crosses within the record.
    """
    times = np.asarray(times, dtype=float)
    ddse = np.asarray(ddse, dtype=float)
    peaks_t, peaks_v = [], []
    start = tau_prep
    while start + period <= times[-1] + 1e-9:
        sel = np.flatnonzero((times >= start) & (times < start + period))
        if sel.size:
            k = sel[int(np.argmax(ddse[sel]))]
            peaks_t.append(times[k])
            peaks_v.append(ddse[k])
        start += period
    if not peaks_v:
        raise ParameterError("record shorter than one envelope period")
    e0 = peaks_v[0]
    if e0 <= 0:
        return float(peaks_t[0])
    half = 0.5 * e0
    for k in range(1, len(peaks_v)):
        if peaks_v[k] < half:
            v0, v1 = peaks_v[k - 1], peaks_v[k]
            return float(peaks_t[k - 1] + (v0 - half) / (v0 - v1) * (peaks_t[k] - peaks_t[k - 1]))
    return math.inf


def envelope_decay_jackknife(result: EnsembleResult, tau_prep: float, period: float):
    """Decay time and its delete-one-batch jackknife standard error.

    Needs a result run with ``keep_batch_states=True``.
    """
    if result.batch_rho is None:
        raise ParameterError("jackknife needs per-batch states (keep_batch_states=True)")
    full = envelope_decay_time(result.times, result.ddse, tau_prep, period)
    n_b = result.batch_rho.shape[0]
    total = result.batch_rho.sum(axis=0)
    n_rest = result.n_trajectories - result.batch_size
    reps = np.array([
        envelope_decay_time(result.times, ddse_of((total - result.batch_rho[b]) / n_rest),
                            tau_prep, period)
        for b in range(n_b)])
    if np.all(np.isinf(reps)):
        return full, 0.0
    if np.any(np.isinf(reps)):
        return full, math.inf
    se = math.sqrt((n_b - 1) / n_b * np.sum((reps - reps.mean()) ** 2))
    return full, se
