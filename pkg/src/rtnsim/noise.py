"""Random telegraph noise (RTN).

A single fluctuator switches between ``+J0`` and ``-J0``.  Waiting times
between switches are exponential with mean ``tau_c``, which gives the
normalized autocorrelation ``exp(-2|t - t'| / tau_c)``.

Trajectories are stored as explicit lists of jump times, never sampled on a
grid, so the propagator can split time exactly at every switch.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ParameterError


class InitialSignMode(str, enum.Enum):
    FIXED_PLUS = "fixed_plus"
    RANDOM_SYMMETRIC = "random_symmetric"


@dataclass(frozen=True)
class RtnParams:
    """Telegraph process parameters.

    Parameters
    ----------
    amplitude_j0 : float
        Switching amplitude in rad/ns.
    tau_c : float
        Mean waiting time between switches, in ns.
    initial_sign_mode : InitialSignMode
        ``random_symmetric`` draws the starting sign with probability 1/2
        (stationary, zero mean); ``fixed_plus`` always starts at ``+J0``.
    """

    amplitude_j0: float
    tau_c: float
    initial_sign_mode: InitialSignMode = InitialSignMode.RANDOM_SYMMETRIC

    def __post_init__(self):
        object.__setattr__(self, "initial_sign_mode", InitialSignMode(self.initial_sign_mode))
        if not math.isfinite(self.amplitude_j0) or self.amplitude_j0 < 0:
            raise ParameterError(f"amplitude_j0 must be finite and >= 0, got {self.amplitude_j0}")
        if not (self.tau_c > 0) or not math.isfinite(self.tau_c):
            raise ParameterError(f"tau_c must be finite and > 0, got {self.tau_c}")


@dataclass(frozen=True)
class RtnTrajectory:
    """One realization of the telegraph process on ``[0, horizon]``."""

    jump_times: np.ndarray
    initial_sign: int
    amplitude_j0: float
    horizon: float

    def __post_init__(self):
        jumps = np.ascontiguousarray(self.jump_times, dtype=float)
        jumps.setflags(write=False)
        object.__setattr__(self, "jump_times", jumps)
        if self.initial_sign not in (1, -1):
            raise ParameterError(f"initial_sign must be +1 or -1, got {self.initial_sign}")
        if not self.horizon > 0:
            raise ParameterError(f"horizon must be > 0, got {self.horizon}")
        if jumps.ndim != 1:
            raise ParameterError("jump_times must be one-dimensional")
        if jumps.size:
            if np.any(np.diff(jumps) <= 0):
                raise ParameterError("jump_times must be strictly increasing")
            if jumps[0] <= 0 or jumps[-1] > self.horizon:
                raise ParameterError("jump_times must lie in (0, horizon]")

    @property
    def n_jumps(self) -> int:
        return int(self.jump_times.size)

    def sign_at(self, t):
        """Sign of the process at time(s) ``t`` (a jump at exactly ``t`` counts)."""
        flips = np.searchsorted(self.jump_times, t, side="right")
        return self.initial_sign * (1 - 2 * (flips & 1))


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent random stream for ``(master_seed, *key)``.

    Derivation goes through :class:`numpy.random.SeedSequence` spawn keys,
    so the stream depends only on the key, never on call order.
    """
    if master_seed is None:
        raise ParameterError("master_seed is required")
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def generate_trajectory(params: RtnParams, horizon: float, rng) -> RtnTrajectory:
    """Draw one telegraph realization covering ``[0, horizon]``.

    Jump times are cumulative sums of ``-tau_c * log(p)`` with ``p`` drawn
    from ``rng.random``; the first time beyond ``horizon`` is discarded.
    """
    if not horizon > 0 or not math.isfinite(horizon):
        raise ParameterError(f"horizon must be finite and > 0, got {horizon}")
    if params.initial_sign_mode is InitialSignMode.FIXED_PLUS:
        sign = 1
    else:
        sign = 1 if rng.random() < 0.5 else -1

    mean_count = horizon / params.tau_c
    block = int(mean_count + 6.0 * math.sqrt(mean_count) + 16)
    chunks = []
    t_last = 0.0
    while True:
        p = np.asarray(rng.random(block), dtype=float)
        with np.errstate(divide="ignore"):
            gaps = -params.tau_c * np.log(p)
        times = t_last + np.cumsum(gaps)
        stop = int(np.searchsorted(times, horizon, side="right"))
        chunks.append(times[:stop])
        if stop < times.size:
            break
        t_last = float(times[-1])
    jumps = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    return RtnTrajectory(jumps, sign, params.amplitude_j0, float(horizon))


def value_at(traj: RtnTrajectory, t):
    """Signed amplitude ``initial_sign * (-1)**N(t) * J0`` at time ``t``.

    ``N(t)`` counts jumps at times ``<= t``.  Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > traj.horizon) or np.any(np.isnan(t_arr)):
        raise DomainError(f"t must lie in [0, {traj.horizon}]")
    out = traj.sign_at(t_arr) * traj.amplitude_j0
    return float(out) if out.ndim == 0 else out


def empirical_autocorrelation(params: RtnParams, lags: Sequence[float], n_realizations: int,
                              horizon: float, rng, n_times: int = 64):
    """Estimate ``<J(t) J(t + lag)> / J0**2`` by averaging over realizations and ``t``.

    Each realization is evaluated at ``n_times`` evenly spaced reference times
    in ``[0, horizon - max(lags)]``.  The standard error is taken from the
    spread of per-realization means.

    Returns
    -------
    list of (lag, estimate, stderr)
    """
    lags = np.asarray(list(lags), dtype=float)
    if lags.size == 0:
        raise ParameterError("lags must be non-empty")
    if n_realizations < 2:
        raise ParameterError("n_realizations must be >= 2")
    if np.any(lags < 0) or np.any(lags >= horizon):
        raise ParameterError("lags must satisfy 0 <= lag < horizon")
    if params.amplitude_j0 == 0:
        raise ParameterError("normalized autocorrelation needs amplitude_j0 > 0")

    t_ref = np.linspace(0.0, horizon - lags.max(), n_times)
    t_shift = t_ref[None, :] + lags[:, None]
    j0_sq = params.amplitude_j0 ** 2
    per_real = np.empty((n_realizations, lags.size))
    for k in range(n_realizations):
        traj = generate_trajectory(params, horizon, rng)
        a = value_at(traj, t_ref)
        b = value_at(traj, t_shift)
        per_real[k] = (a[None, :] * b).mean(axis=1) / j0_sq
    est = per_real.mean(axis=0)
    se = per_real.std(axis=0, ddof=1) / math.sqrt(n_realizations)
    return [(float(l), float(e), float(s)) for l, e, s in zip(lags, est, se)]


def sampled_trace(traj: RtnTrajectory, step: float):
    """Evaluate a trajectory on ``0, step, 2*step, ...`` up to its horizon."""
    if not step > 0:
        raise ParameterError("step must be > 0")
    n = int(math.floor(traj.horizon / step + 1e-9))
    t = np.minimum(np.arange(n + 1) * step, traj.horizon)
    return t, value_at(traj, t)


def cell_averages(traj: RtnTrajectory, dt: float, n_cells: int) -> np.ndarray:
    """Exact mean of the process over each cell ``[k dt, (k+1) dt)``.

    Uses the running integral, which is piecewise linear with kinks at the
    jump times, so linear interpolation between knots is exact.
    """
    if n_cells * dt > traj.horizon * (1 + 1e-12):
        raise ParameterError("cells extend beyond the trajectory horizon")
    inner = traj.jump_times[traj.jump_times < traj.horizon]
    knots = np.concatenate(([0.0], inner, [traj.horizon]))
    n_seg = knots.size - 1
    seg_sign = traj.initial_sign * (1 - 2 * (np.arange(n_seg) & 1))
    integral = np.concatenate(([0.0], np.cumsum(seg_sign * np.diff(knots))))
    edges = np.arange(n_cells + 1) * dt
    cum = np.interp(edges, knots, integral)
    return traj.amplitude_j0 * np.diff(cum) / dt
