"""Compiled RK4 kernels for the Schrödinger and Lindblad right-hand sides.

Hamiltonians arrive as coordinate lists whose entry values rotate in time,
``H[r, c](t) = base * exp(1j * freqs[fidx] * t)``.  Collapse operators arrive as
"layers": entries sharing one column-minus-row offset ``o``, so within a layer
``L[r, r + o] = w[r]`` and ``L rho L^dagger`` reduces to contiguous row updates.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def _phases(freqs, t):
    out = np.empty(freqs.size, dtype=np.complex128)
    for k in range(freqs.size):
        out[k] = np.exp(1j * freqs[k] * t)
    return out


@njit(cache=True, fastmath=True)
def _h_values(base, fidx, freqs, t, out):
    ph = _phases(freqs, t)
    for e in range(base.size):
        out[e] = base[e] * ph[fidx[e]]


@njit(cache=True, fastmath=True)
def _schrodinger_rhs(psi, rows, cols, hv, out):
    out[:] = 0.0
    for e in range(rows.size):
        out[rows[e]] += hv[e] * psi[cols[e]]
    for i in range(out.size):
        out[i] = -1j * out[i]


@njit(cache=True, fastmath=True)
def rk4_schrodinger(psi, t0, h, nsteps, rows, cols, base, fidx, freqs):
    d = psi.size
    psi = psi.copy()
    k = np.empty(d, dtype=np.complex128)
    acc = np.empty(d, dtype=np.complex128)
    tmp = np.empty(d, dtype=np.complex128)
    hv = np.empty(base.size, dtype=np.complex128)
    for s in range(nsteps):
        t = t0 + s * h
        _h_values(base, fidx, freqs, t, hv)
        _schrodinger_rhs(psi, rows, cols, hv, k)
        for i in range(d):
            acc[i] = psi[i] + (h / 6.0) * k[i]
            tmp[i] = psi[i] + (h / 2.0) * k[i]
        _h_values(base, fidx, freqs, t + 0.5 * h, hv)
        _schrodinger_rhs(tmp, rows, cols, hv, k)
        for i in range(d):
            acc[i] += (h / 3.0) * k[i]
            tmp[i] = psi[i] + (h / 2.0) * k[i]
        _schrodinger_rhs(tmp, rows, cols, hv, k)
        for i in range(d):
            acc[i] += (h / 3.0) * k[i]
            tmp[i] = psi[i] + h * k[i]
        _h_values(base, fidx, freqs, t + h, hv)
        _schrodinger_rhs(tmp, rows, cols, hv, k)
        for i in range(d):
            psi[i] = acc[i] + (h / 6.0) * k[i]
    return psi


@njit(cache=True, fastmath=True)
def _lindblad_rhs(rho, rows, cols, hv, lrows, lcols, lvals, layer_ptr, jump_ptr, loff, lspan, wconj, A, out):
    # rho is Hermitian: -i(H rho - rho H^dag) = B + B^dag with B = -i H rho,
    # where H already carries the -i/2 sum L^dag L anti-Hermitian part.
    d = rho.shape[0]
    A[:, :] = 0.0
    for e in range(rows.size):
        r = rows[e]
        c = cols[e]
        v = hv[e]
        for j in range(d):
            A[r, j] += v * rho[c, j]
    for i in range(d):
        for j in range(d):
            out[i, j] = -1j * A[i, j] + 1j * np.conj(A[j, i])
    # L rho L^dag, layer pair (p, q): out[r1, j] += v1 * conj(w_q[j]) * rho[c1, j + o_q]
    for k in range(jump_ptr.size - 1):
        for p in range(jump_ptr[k], jump_ptr[k + 1]):
            for q in range(jump_ptr[k], jump_ptr[k + 1]):
                oq = loff[q]
                j0 = lspan[q, 0]
                j1 = lspan[q, 1]
                for e1 in range(layer_ptr[p], layer_ptr[p + 1]):
                    r1 = lrows[e1]
                    c1 = lcols[e1]
                    v1 = lvals[e1]
                    for j in range(j0, j1):
                        out[r1, j] += v1 * wconj[q, j] * rho[c1, j + oq]


@njit(cache=True, fastmath=True)
def rk4_lindblad(rho, t0, h, nsteps, rows, cols, base, fidx, freqs, lrows, lcols, lvals, layer_ptr, jump_ptr, loff, lspan, wconj):
    d = rho.shape[0]
    rho = rho.copy()
    k = np.empty((d, d), dtype=np.complex128)
    acc = np.empty((d, d), dtype=np.complex128)
    tmp = np.empty((d, d), dtype=np.complex128)
    A = np.empty((d, d), dtype=np.complex128)
    hv = np.empty(base.size, dtype=np.complex128)
    for s in range(nsteps):
        t = t0 + s * h
        _h_values(base, fidx, freqs, t, hv)
        _lindblad_rhs(rho, rows, cols, hv, lrows, lcols, lvals, layer_ptr, jump_ptr, loff, lspan, wconj, A, k)
        for i in range(d):
            for j in range(d):
                acc[i, j] = rho[i, j] + (h / 6.0) * k[i, j]
                tmp[i, j] = rho[i, j] + (h / 2.0) * k[i, j]
        _h_values(base, fidx, freqs, t + 0.5 * h, hv)
        _lindblad_rhs(tmp, rows, cols, hv, lrows, lcols, lvals, layer_ptr, jump_ptr, loff, lspan, wconj, A, k)
        for i in range(d):
            for j in range(d):
                acc[i, j] += (h / 3.0) * k[i, j]
                tmp[i, j] = rho[i, j] + (h / 2.0) * k[i, j]
        _lindblad_rhs(tmp, rows, cols, hv, lrows, lcols, lvals, layer_ptr, jump_ptr, loff, lspan, wconj, A, k)
        for i in range(d):
            for j in range(d):
                acc[i, j] += (h / 3.0) * k[i, j]
                tmp[i, j] = rho[i, j] + h * k[i, j]
        _h_values(base, fidx, freqs, t + h, hv)
        _lindblad_rhs(tmp, rows, cols, hv, lrows, lcols, lvals, layer_ptr, jump_ptr, loff, lspan, wconj, A, k)
        for i in range(d):
            for j in range(d):
                rho[i, j] = acc[i, j] + (h / 6.0) * k[i, j]
    return rho
