"""Compiled inner loops for tridiagonal time stepping."""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _recip(z):
    # pivots of 1 + i*h*H stay O(1), so the scaled division is unnecessary
    d = 1.0 / (z.real * z.real + z.imag * z.imag)
    return complex(z.real * d, -z.imag * d)


@njit(cache=True)
def _phase(psi, diag, t):
    for j in range(psi.size):
        psi[j] *= np.exp(-1j * diag[j] * t)


@njit(cache=True)
def cn_sweep(psi, diag, sx, cd, omegas, fs, dts, norm_tol):
    """Crank-Nicolson steps ``(1 + i dt H/2) psi' = (1 - i dt H/2) psi``.

    H_k = diag + omegas[k] * sx + fs[k] * cd on the lower band, conjugate on
    the upper band.  Runs of steps whose off-diagonal vanishes identically are
    merged and applied as one exact phase factor.  Stops early once | |psi|^2 - 1 | exceeds
    ``norm_tol``.  Returns (steps completed, max norm drift).
    """
    n = psi.size
    off = np.empty(n - 1, dtype=np.complex128)
    rhs = np.empty(n, dtype=np.complex128)
    cp = np.empty(n, dtype=np.complex128)
    drift = 0.0
    t_diag = 0.0
    for k in range(dts.size):
        dt = dts[k]
        h = 0.5 * dt
        nonzero = False
        for j in range(n - 1):
            off[j] = omegas[k] * sx[j] + fs[k] * cd[j]
            if off[j] != 0:
                nonzero = True
        if not nonzero:
            t_diag += dt
            if k < dts.size - 1:
                continue
            _phase(psi, diag, t_diag)
            t_diag = 0.0
        else:
            if t_diag != 0.0:
                _phase(psi, diag, t_diag)
                t_diag = 0.0
            # rhs = (1 - i h H) psi
            for j in range(n):
                rhs[j] = psi[j] * (1.0 - 1j * h * diag[j])
            for j in range(n - 1):
                rhs[j + 1] -= 1j * h * off[j] * psi[j]
                rhs[j] -= 1j * h * np.conj(off[j]) * psi[j + 1]
            # Thomas solve; A = 1 + i h H has positive-definite Hermitian part
            binv = _recip(1.0 + 1j * h * diag[0])
            cp[0] = 1j * h * np.conj(off[0]) * binv
            psi[0] = rhs[0] * binv
            for j in range(1, n):
                a = 1j * h * off[j - 1]
                binv = _recip(1.0 + 1j * h * diag[j] - a * cp[j - 1])
                if j < n - 1:
                    cp[j] = 1j * h * np.conj(off[j]) * binv
                psi[j] = (rhs[j] - a * psi[j - 1]) * binv
            for j in range(n - 2, -1, -1):
                psi[j] -= cp[j] * psi[j + 1]
        nrm = 0.0
        for j in range(n):
            nrm += psi[j].real ** 2 + psi[j].imag ** 2
        d = abs(nrm - 1.0)
        if d > drift:
            drift = d
        if drift > norm_tol:
            return k + 1, drift
    return dts.size, drift
