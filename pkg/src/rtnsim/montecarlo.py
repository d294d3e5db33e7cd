"""Ensemble averaging of unitary trajectories.

Every trajectory ``i`` owns the random stream derived from
``(master_seed, i)``.  Trajectories are grouped into fixed batches; batch
sums are computed independently and combined in batch order, so results are
bitwise identical for any number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .entanglement import ddse as ddse_of
from .errors import ParameterError
from .noise import RtnParams, generate_trajectory, stream
from .qdyn import _validate_grid, hamiltonian_table

PSI_UP_UP = np.array([1, 0, 0, 0], dtype=complex)


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble size, seeding and sampling.

    ``sample_grid=None`` means 1 ns spacing from 0 to the protocol end.
    ``keep_batch_states`` retains per-batch density sums (memory heavy on
    fine grids) for jackknife-style error estimates.
    """

    master_seed: int
    n_trajectories: int = 5000
    batch_size: int = 100
    sample_grid: tuple | None = None
    workers: int = 1
    backend: str | None = None
    keep_batch_states: bool = False

    def __post_init__(self):
        if self.master_seed is None:
            raise ParameterError("master_seed is required")
        if self.n_trajectories < 1:
            raise ParameterError(f"n_trajectories must be >= 1, got {self.n_trajectories}")
        if self.batch_size < 1 or self.n_trajectories % self.batch_size:
            raise ParameterError(
                f"batch_size {self.batch_size} must divide n_trajectories {self.n_trajectories}")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        if self.sample_grid is not None:
            object.__setattr__(self, "sample_grid", tuple(float(t) for t in self.sample_grid))

    @property
    def n_batches(self) -> int:
        return self.n_trajectories // self.batch_size


@dataclass(frozen=True)
class EnsembleResult:
    times: np.ndarray
    rho_avg: np.ndarray
    ddse: np.ndarray
    concurrence: np.ndarray
    ddse_stderr: np.ndarray
    batch_ddse: np.ndarray
    n_trajectories: int
    batch_size: int
    batch_rho: np.ndarray | None = None

    def purity(self) -> np.ndarray:
        return np.einsum("tij,tji->t", self.rho_avg, self.rho_avg).real


def default_grid(duration: float, step: float = 1.0) -> np.ndarray:
    n = int(math.floor(duration / step + 1e-9))
    grid = np.arange(n + 1) * step
    if duration - grid[-1] > 1e-9 * max(1.0, duration):
        grid = np.append(grid, duration)
    return grid


def _pack(trajs):
    jumps = [t.jump_times for t in trajs]
    off = np.zeros(len(trajs) + 1, dtype=np.int64)
    off[1:] = np.cumsum([j.size for j in jumps])
    flat = np.concatenate(jumps) if off[-1] else np.zeros(0)
    signs = np.array([t.initial_sign for t in trajs], dtype=np.int32)
    return np.ascontiguousarray(flat, dtype=float), off, signs


def run_ensemble(protocol, noise: RtnParams, cfg: EnsembleConfig) -> EnsembleResult:
    """Average ``|psi_i(t)><psi_i(t)|`` over trajectories started in ``|uu>``.

    Each trajectory draws two independent telegraph realizations, one per
    qubit.  DDSE and concurrence are evaluated on the averaged state; the
    DDSE standard error comes from the spread of batch-mean DDSE values.
    """
    duration = protocol.duration
    grid = default_grid(duration) if cfg.sample_grid is None else np.asarray(cfg.sample_grid)
    grid = _validate_grid(grid, duration)
    evals, evecs, ends = hamiltonian_table(protocol, noise.amplitude_j0, noise.amplitude_j0)
    ends[-1] = np.inf
    kern = _backend.get(cfg.backend)
    bs = cfg.batch_size

    def run_batch(b):
        t1, t2 = [], []
        for i in range(b * bs, (b + 1) * bs):
            rng = stream(cfg.master_seed, i)
            t1.append(generate_trajectory(noise, duration, rng))
            t2.append(generate_trajectory(noise, duration, rng))
        j1, off1, s1 = _pack(t1)
        j2, off2, s2 = _pack(t2)
        rho = np.zeros((grid.size, 4, 4), dtype=complex)
        kern.accumulate_density(evals, evecs, ends, j1, off1, s1, j2, off2, s2,
                                PSI_UP_UP, grid, rho)
        return rho

    total = np.zeros((grid.size, 4, 4), dtype=complex)
    batch_ddse = np.empty((cfg.n_batches, grid.size))
    kept = [] if cfg.keep_batch_states else None
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = pool.map(run_batch, range(cfg.n_batches))
            for b, rho_b in enumerate(results):
                total += rho_b
                batch_ddse[b] = ddse_of(rho_b / bs)
                if kept is not None:
                    kept.append(rho_b)
    else:
        for b in range(cfg.n_batches):
            rho_b = run_batch(b)
            total += rho_b
            batch_ddse[b] = ddse_of(rho_b / bs)
            if kept is not None:
                kept.append(rho_b)

    rho_avg = total / cfg.n_trajectories
    d = np.atleast_1d(ddse_of(rho_avg))
    if cfg.n_batches > 1:
        se = batch_ddse.std(axis=0, ddof=1) / math.sqrt(cfg.n_batches)
    else:
        se = np.full(grid.size, np.nan)
    return EnsembleResult(grid, rho_avg, d, np.maximum(d, 0.0), se, batch_ddse,
                          cfg.n_trajectories, bs, None if kept is None else np.stack(kept))


def convergence_report(result_n: EnsembleResult, result_2n: EnsembleResult) -> float:
    """Sup-norm DDSE difference between two ensemble sizes on the same grid."""
    if result_n.times.shape != result_2n.times.shape or np.any(result_n.times != result_2n.times):
        raise ParameterError("results must share the same time grid")
    return float(np.max(np.abs(result_n.ddse - result_2n.ddse)))


def run_convergence(protocol, noise: RtnParams, cfg: EnsembleConfig) -> float:
    """Run at ``n`` and ``2n`` trajectories and report the DDSE difference."""
    doubled = EnsembleConfig(cfg.master_seed, 2 * cfg.n_trajectories, cfg.batch_size,
                             cfg.sample_grid, cfg.workers, cfg.backend)
    return convergence_report(run_ensemble(protocol, noise, cfg),
                              run_ensemble(protocol, noise, doubled))
