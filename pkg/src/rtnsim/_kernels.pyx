# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation kernels.

Same contract as ``rtnsim._fallback``; selected at import by
``rtnsim._backend`` when the extension is built.
"""
import numpy as np

from libc.math cimport cos, sin, INFINITY


cdef inline void _to_eigenbasis(const double complex* psi, const double* v,
                                double complex* c) noexcept nogil:
    # c = V^T psi, V row-major with eigenvectors in columns
    cdef int i, j
    cdef double complex acc
    for j in range(4):
        acc = 0
        for i in range(4):
            acc = acc + v[4 * i + j] * psi[i]
        c[j] = acc


cdef inline void _from_eigenbasis(const double complex* c, const double* e, const double* v,
                                  double dt, double complex* out) noexcept nogil:
    # out = V diag(exp(-i e dt)) c
    cdef double complex d[4]
    cdef double complex acc
    cdef int i, j
    cdef double th
    for j in range(4):
        th = e[j] * dt
        d[j] = c[j] * (cos(th) - 1j * sin(th))
    for i in range(4):
        acc = 0
        for j in range(4):
            acc = acc + v[4 * i + j] * d[j]
        out[i] = acc


cdef void _run_one(const double[:, :, ::1] evals, const double[:, :, :, ::1] evecs,
                   const double[::1] ends,
                   const double[::1] j1, Py_ssize_t i1, Py_ssize_t b1, int s1,
                   const double[::1] j2, Py_ssize_t i2, Py_ssize_t b2, int s2,
                   const double complex[::1] psi0, const double[::1] grid,
                   double complex[:, ::1] states, double complex[:, :, ::1] rho,
                   bint accumulate) noexcept nogil:
    cdef double complex psi[4]
    cdef double complex c[4]
    cdef double complex out[4]
    cdef const double* e
    cdef const double* v
    cdef double t = 0.0, nb, tj1, tj2
    cdef Py_ssize_t k = 0, p = 0, n_t = grid.shape[0], n_p = ends.shape[0]
    cdef int q, a, b
    for a in range(4):
        psi[a] = psi0[a]
    while k < n_t:
        tj1 = j1[i1] if i1 < b1 else INFINITY
        tj2 = j2[i2] if i2 < b2 else INFINITY
        nb = ends[p]
        if tj1 < nb:
            nb = tj1
        if tj2 < nb:
            nb = tj2
        q = (2 if s1 < 0 else 0) + (1 if s2 < 0 else 0)
        e = &evals[p, q, 0]
        v = &evecs[p, q, 0, 0]
        # samples inside the segment are evaluated from its start state
        _to_eigenbasis(psi, v, c)
        while k < n_t and grid[k] <= nb:
            if grid[k] == t:
                for a in range(4):
                    out[a] = psi[a]
            else:
                _from_eigenbasis(c, e, v, grid[k] - t, out)
            if accumulate:
                for a in range(4):
                    for b in range(4):
                        rho[k, a, b] = rho[k, a, b] + out[a] * out[b].conjugate()
            else:
                for a in range(4):
                    states[k, a] = out[a]
            k += 1
        if k == n_t:
            break
        _from_eigenbasis(c, e, v, nb - t, psi)
        t = nb
        if tj1 == nb:
            i1 += 1
            s1 = -s1
        if tj2 == nb:
            i2 += 1
            s2 = -s2
        while p < n_p - 1 and ends[p] <= nb:
            p += 1

def propagate_states(const double[:, :, ::1] evals, const double[:, :, :, ::1] evecs,
                     const double[::1] ends,
                     const double[::1] jumps1, int sign1,
                     const double[::1] jumps2, int sign2,
                     const double complex[::1] psi0, const double[::1] grid):
    out = np.zeros((grid.shape[0], 4), dtype=np.complex128)
    cdef double complex[:, ::1] states = out
    cdef double complex[:, :, ::1] dummy = np.zeros((1, 4, 4), dtype=np.complex128)
    with nogil:
        _run_one(evals, evecs, ends, jumps1, 0, jumps1.shape[0], sign1,
                 jumps2, 0, jumps2.shape[0], sign2, psi0, grid, states, dummy, False)
    return out


def accumulate_density(const double[:, :, ::1] evals, const double[:, :, :, ::1] evecs,
                       const double[::1] ends,
                       const double[::1] jumps1, const long long[::1] off1, const int[::1] signs1,
                       const double[::1] jumps2, const long long[::1] off2, const int[::1] signs2,
                       const double complex[::1] psi0, const double[::1] grid,
                       double complex[:, :, ::1] rho_out):
    """Add ``sum_i |psi_i(t)><psi_i(t)|`` into ``rho_out`` in trajectory order."""
    cdef Py_ssize_t n = signs1.shape[0], i
    cdef double complex[:, ::1] dummy = np.zeros((1, 4), dtype=np.complex128)
    with nogil:
        for i in range(n):
            _run_one(evals, evecs, ends, jumps1, off1[i], off1[i + 1], signs1[i],
                     jumps2, off2[i], off2[i + 1], signs2[i], psi0, grid, dummy, rho_out, True)
