"""Wootters concurrence and the DDSE for two-qubit density matrices.

All functions accept a single ``(4, 4)`` matrix or a stack ``(..., 4, 4)``.
"""
from __future__ import annotations

import numpy as np

from .errors import ContractError, NumericalDegeneracyError
from .qdyn import SY_SY

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
# eigenvalues of rho at or below this are treated as exact zeros (rank cut)
RANK_TOL = 1e-13


def validate_density(rho) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return ``rho`` as an array.

    Raises :class:`ContractError` for structural violations and
    :class:`NumericalDegeneracyError` for eigenvalues below ``-PSD_TOL``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ContractError(f"expected (..., 4, 4) density matrices, got shape {rho.shape}")
    herm = np.max(np.abs(rho - np.swapaxes(rho, -1, -2).conj()))
    if herm > HERMITIAN_TOL:
        raise ContractError(f"density matrix is not Hermitian (deviation {herm:.3e})")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1.0)) > TRACE_TOL:
        raise ContractError(f"density matrix trace deviates from 1 by {np.max(np.abs(tr - 1)):.3e}")
    return rho


def time_reversed(rho) -> np.ndarray:
    """Spin-flipped state ``(sy x sy) rho* (sy x sy)``."""
    rho = validate_density(rho)
    return SY_SY @ rho.conj() @ SY_SY


def _factor(rho):
    # rho = W W^dagger with columns of W scaled by sqrt of eigenvalues
    w, v = np.linalg.eigh(rho)
    if np.min(w) < -PSD_TOL:
        raise NumericalDegeneracyError(
            f"density matrix has eigenvalue {np.min(w):.3e} below -{PSD_TOL:g}")
    w = np.where(w > RANK_TOL, w, 0.0)
    return v * np.sqrt(w)[..., None, :]


def sorted_lambdas(rho) -> np.ndarray:
    """Eigenvalues of ``R = sqrt(sqrt(rho) rho~ sqrt(rho))`` in descending order.

    With ``rho = W W^dagger`` and ``rho~ = W~ W~^dagger``, the eigenvalues
    of ``rho rho~`` equal the squared singular values of ``W^dagger W~``.
    Taking singular values directly avoids the ill-conditioned eigenproblem
    of the non-normal product when ``rho`` is (nearly) pure.
    """
    rho = validate_density(rho)
    w = _factor(rho)
    w_tilde = SY_SY @ w.conj()
    m = np.swapaxes(w, -1, -2).conj() @ w_tilde
    return np.linalg.svd(m, compute_uv=False)


def ddse(rho):
    """``l1 - l2 - l3 - l4``; negative for sufficiently mixed states."""
    lam = sorted_lambdas(rho)
    out = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return float(out) if np.ndim(out) == 0 else out


def concurrence(rho):
    out = np.maximum(0.0, ddse(rho))
    return float(out) if np.ndim(out) == 0 else out

