"""Pure-numpy propagation kernels.

Mirrors the compiled ``_kernels`` extension and is used when it is not
built.  Within a segment of constant Hamiltonian all sample points are
evaluated in one vectorized step.
"""
import numpy as np


def _run_one(evals, evecs, ends, jumps1, sign1, jumps2, sign2, psi0, grid):
    t_end = grid[-1]
    cuts = np.concatenate((jumps1, jumps2, ends[:-1]))
    cuts = np.unique(cuts[(cuts > 0) & (cuts < t_end)])
    edges = np.concatenate(([0.0], cuts, [t_end]))
    states = np.empty((grid.size, 4), dtype=complex)
    psi = np.array(psi0, dtype=complex)
    lo = 0
    n_seg = edges.size - 1
    for s in range(n_seg):
        a, b = edges[s], edges[s + 1]
        p = int(np.searchsorted(ends[:-1], a, side="right"))
        s1 = sign1 if np.searchsorted(jumps1, a, side="right") % 2 == 0 else -sign1
        s2 = sign2 if np.searchsorted(jumps2, a, side="right") % 2 == 0 else -sign2
        q = (2 if s1 < 0 else 0) + (1 if s2 < 0 else 0)
        e, v = evals[p, q], evecs[p, q]
        hi = grid.size if s == n_seg - 1 else int(np.searchsorted(grid, b, side="left"))
        c = v.T @ psi
        if hi > lo:
            phases = np.exp(-1j * np.outer(grid[lo:hi] - a, e))
            states[lo:hi] = (phases * c) @ v.T
            states[lo:hi][grid[lo:hi] == a] = psi
        lo = hi
        psi = v @ (np.exp(-1j * e * (b - a)) * c)
    return states


def propagate_states(evals, evecs, ends, jumps1, sign1, jumps2, sign2, psi0, grid):
    grid = np.asarray(grid, dtype=float)
    return _run_one(np.asarray(evals), np.asarray(evecs), np.asarray(ends),
                    np.asarray(jumps1, dtype=float), int(sign1),
                    np.asarray(jumps2, dtype=float), int(sign2), psi0, grid)


def accumulate_density(evals, evecs, ends, jumps1, off1, signs1, jumps2, off2, signs2,
                       psi0, grid, rho_out):
    evals, evecs, ends = np.asarray(evals), np.asarray(evecs), np.asarray(ends)
    grid = np.asarray(grid, dtype=float)
    for i in range(len(signs1)):
        st = _run_one(evals, evecs, ends, jumps1[off1[i]:off1[i + 1]], int(signs1[i]),
                      jumps2[off2[i]:off2[i + 1]], int(signs2[i]), psi0, grid)
        rho_out += st[:, :, None] * st[:, None, :].conj()
