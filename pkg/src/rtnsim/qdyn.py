"""Two-qubit Hamiltonians and exact piecewise-constant propagation.

Units: time in ns, angular frequencies in rad/ns, hbar = 1.  Basis order is
``(|uu>, |ud>, |du>, |dd>)`` with ``|u> = |S>`` and ``|d> = |T0>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .errors import ContractError, ParameterError

HERMITIAN_TOL = 1e-13

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY2 = np.eye(2, dtype=complex)

J0_CONVENTIONS = ("angular", "over_2pi")


def mhz_to_angular(f_mhz: float) -> float:
    """Convert a ``J/2pi`` value in MHz to rad/ns."""
    return 2.0 * math.pi * f_mhz * 1e-3


def j0_from_mhz(value_mhz: float, convention: str = "angular") -> float:
    """Noise amplitude in rad/ns from a value quoted in MHz.

    ``angular`` reads the quoted number as an angular frequency
    (``1e-3 * value`` rad/ns); ``over_2pi`` reads it as ``J0/2pi``.
    """
    if convention == "angular":
        return value_mhz * 1e-3
    if convention == "over_2pi":
        return mhz_to_angular(value_mhz)
    raise ParameterError(f"j0_convention must be one of {J0_CONVENTIONS}, got {convention!r}")


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ParameterError(f"axis must be 'x', 'y' or 'z', got {axis!r}") from None


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


SZ_I = kron(_PAULI["z"], IDENTITY2).real
I_SZ = kron(IDENTITY2, _PAULI["z"]).real
SZ_SZ = kron(_PAULI["z"], _PAULI["z"]).real
SX_I = kron(_PAULI["x"], IDENTITY2).real
I_SX = kron(IDENTITY2, _PAULI["x"]).real
SY_SY = kron(_PAULI["y"], _PAULI["y"])


@dataclass(frozen=True)
class ControlParams:
    """Hamiltonian coefficients, all in rad/ns."""

    j1: float = 0.0
    j2: float = 0.0
    j12: float = 0.0
    db1: float = 0.0
    db2: float = 0.0

    def __post_init__(self):
        for name in ("j1", "j2", "j12", "db1", "db2"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")


def build_system_hamiltonian(p: ControlParams) -> np.ndarray:
    h = (0.5 * (p.j1 * SZ_I + p.j2 * I_SZ)
         + 0.25 * p.j12 * (SZ_SZ - SZ_I - I_SZ)
         + 0.5 * (p.db1 * SX_I + p.db2 * I_SX))
    return h.astype(complex)


def build_noise_hamiltonian(v1: float, v2: float) -> np.ndarray:
    """Local telegraph terms ``v1 sz x I + v2 I x sz`` (no factor 1/2)."""
    return (v1 * SZ_I + v2 * I_SZ).astype(complex)


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h)
    if h.shape != (4, 4):
        raise ContractError(f"expected a 4x4 operator, got shape {h.shape}")
    dev = np.max(np.abs(h - h.conj().T))
    if dev > tol:
        raise ContractError(f"operator is not Hermitian (max deviation {dev:.3e})")
    return h


def segment_propagator(h, dt: float) -> np.ndarray:
    """``exp(-i h dt)`` from the spectral decomposition of ``h``."""
    if dt < 0:
        raise ParameterError(f"dt must be >= 0, got {dt}")
    h = check_hermitian(h)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * dt)) @ evecs.conj().T


def evolve_segment(psi, h, dt: float) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if dt == 0:
        return psi.copy()
    return segment_propagator(h, dt) @ psi


def _noise_signs(q: int) -> tuple[int, int]:
    return (-1 if q & 2 else 1), (-1 if q & 1 else 1)


def hamiltonian_table(protocol, j0_1: float, j0_2: float):
    """Eigensystems of every Hamiltonian a trajectory can visit.

    Within phase ``p`` and noise state ``q`` (bit 1: qubit 1 negative,
    bit 0: qubit 2 negative) the total Hamiltonian is fixed, so each of the
    ``4 * n_phases`` real-symmetric matrices is diagonalized once.

    Returns
    -------
    evals : (P, 4, 4) float array, ``evals[p, q]``
    evecs : (P, 4, 4, 4) float array, columns are eigenvectors
    phase_ends : (P,) float array, cumulative end times
    """
    phases = list(protocol.phases)
    evals = np.empty((len(phases), 4, 4))
    evecs = np.empty((len(phases), 4, 4, 4))
    for p, phase in enumerate(phases):
        h_sys = build_system_hamiltonian(phase.controls).real
        for q in range(4):
            s1, s2 = _noise_signs(q)
            if phase.noise_active:
                h = h_sys + s1 * j0_1 * SZ_I + s2 * j0_2 * I_SZ
            else:
                h = h_sys
            evals[p, q], evecs[p, q] = np.linalg.eigh(h)
    ends = np.cumsum([ph.duration for ph in phases], dtype=float)
    return evals, evecs, ends


def _validate_grid(sample_grid, duration: float) -> np.ndarray:
    grid = np.ascontiguousarray(sample_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ParameterError("sample_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) < 0):
        raise ParameterError("sample_grid must be non-decreasing")
    if grid[0] < 0 or grid[-1] > duration * (1 + 1e-12):
        raise ParameterError(f"sample_grid must lie within [0, {duration}] ns")
    return grid


def segment_boundaries(protocol, traj1, traj2, sample_grid: Sequence[float] = ()) -> np.ndarray:
    """Sorted times at which propagation splits: phase edges, jumps, samples."""
    duration = protocol.duration
    ends = np.cumsum([ph.duration for ph in protocol.phases], dtype=float)
    parts = [[0.0], ends, traj1.jump_times, traj2.jump_times, np.asarray(sample_grid, dtype=float)]
    times = np.unique(np.concatenate([np.asarray(p, dtype=float) for p in parts]))
    return times[(times >= 0) & (times <= duration)]


def propagate_trajectory(psi0, protocol, traj1, traj2, sample_grid, backend=None) -> np.ndarray:
    """States at each sample time for one pair of noise realizations.

    Time is split at every phase edge, every jump of either qubit and every
    sample point; the total Hamiltonian is constant in between and is
    applied exactly.

    Returns
    -------
    (len(sample_grid), 4) complex array
    """
    duration = protocol.duration
    for traj in (traj1, traj2):
        if traj.horizon < duration * (1 - 1e-12):
            raise ParameterError(
                f"trajectory horizon {traj.horizon} ns is shorter than the protocol ({duration} ns)")
    psi0 = np.ascontiguousarray(psi0, dtype=complex)
    if psi0.shape != (4,):
        raise ParameterError("psi0 must have 4 amplitudes")
    grid = _validate_grid(sample_grid, duration)
    evals, evecs, ends = hamiltonian_table(protocol, traj1.amplitude_j0, traj2.amplitude_j0)
    ends[-1] = np.inf
    kern = _backend.get(backend)
    return kern.propagate_states(evals, evecs, ends,
                                 traj1.jump_times, traj1.initial_sign,
                                 traj2.jump_times, traj2.initial_sign,
                                 psi0, grid)
