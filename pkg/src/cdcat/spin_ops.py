"""Collective spin operators in the maximal-spin sector S = N/2.

Every operator is Hermitian and at most tridiagonal in the S_z eigenbasis,
ordered by ascending m (index 0 is m = -N/2).  Only the diagonal and the
lower off-diagonal ``<m+1|A|m>`` are stored; the upper band is its complex
conjugate, so Hermiticity holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True, eq=False)
class SpinOperator:
    """Banded Hermitian operator over the (N+1)-dim S_z eigenbasis.

    ``diag[k] = <m_k|A|m_k>`` (real) and ``off[k] = <m_{k+1}|A|m_k>``.
    """

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = np.ascontiguousarray(self.diag, dtype=float)
        off = np.ascontiguousarray(self.off, dtype=complex)
        if diag.ndim != 1 or off.shape != (max(diag.size - 1, 0),):
            raise ValueError(
                f"band shapes {diag.shape} / {off.shape} are not tridiagonal"
            )
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "off", off)

    @property
    def dim(self) -> int:
        return self.diag.size

    @property
    def N(self) -> int:
        return self.dim - 1

    @property
    def bandwidth(self) -> int:
        return int(np.any(self.off != 0))

    @property
    def is_real(self) -> bool:
        return not np.any(self.off.imag)

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        out = self.diag * psi
        out[1:] += self.off * psi[:-1]
        out[:-1] += np.conj(self.off) * psi[1:]
        return out

    def expect(self, psi: np.ndarray) -> float:
        """Real expectation value <psi|A|psi>."""
        cross = np.vdot(psi[1:], self.off * psi[:-1])
        return float(np.dot(self.diag, np.abs(psi) ** 2) + 2.0 * cross.real)

    def to_dense(self) -> np.ndarray:
        mat = np.diag(self.diag.astype(complex))
        idx = np.arange(self.dim - 1)
        mat[idx + 1, idx] = self.off
        mat[idx, idx + 1] = np.conj(self.off)
        return mat

    def norm_max(self) -> float:
        """Largest absolute matrix element."""
        vals = [np.abs(self.diag).max(initial=0.0), np.abs(self.off).max(initial=0.0)]
        return float(max(vals))

    def __add__(self, other: SpinOperator) -> SpinOperator:
        if not isinstance(other, SpinOperator):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return SpinOperator(self.diag + other.diag, self.off + other.off)

    def __mul__(self, scalar: float) -> SpinOperator:
        scalar = float(scalar)
        return SpinOperator(scalar * self.diag, scalar * self.off)

    __rmul__ = __mul__


def _check_n(N) -> int:
    if isinstance(N, bool) or int(N) != N:
        raise TypeError(f"N must be an integer, got {N!r}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return int(N)


def m_values(N: int) -> np.ndarray:
    """Magnetic quantum numbers -N/2, ..., N/2 in basis order."""
    N = _check_n(N)
    return np.arange(N + 1) - N / 2


def _ladder(N: int) -> tuple[np.ndarray, np.ndarray]:
    # lower m of each off-diagonal pair and sqrt(S(S+1) - m(m+1))
    m = m_values(N)[:-1]
    s = N / 2
    return m, np.sqrt(s * (s + 1) - m * (m + 1))


def build_sz(N: int) -> SpinOperator:
    N = _check_n(N)
    return SpinOperator(m_values(N), np.zeros(N))


def build_sz2(N: int) -> SpinOperator:
    N = _check_n(N)
    return SpinOperator(m_values(N) ** 2, np.zeros(N))


def build_sx(N: int) -> SpinOperator:
    N = _check_n(N)
    _, c = _ladder(N)
    return SpinOperator(np.zeros(N + 1), 0.5 * c)


def build_sy(N: int) -> SpinOperator:
    N = _check_n(N)
    _, c = _ladder(N)
    # S_y = (S_+ - S_-)/(2i); <m+1|S_+|m> = c
    return SpinOperator(np.zeros(N + 1), -0.5j * c)


def build_cd_term(N: int) -> SpinOperator:
    """(S_y S_z + S_z S_y) / N, assembled from the ladder formula.

    ``<m+1|S_y S_z + S_z S_y|m> = (2m + 1) <m+1|S_y|m>``; the diagonal
    vanishes because S_y has no diagonal.
    """
    N = _check_n(N)
    m, c = _ladder(N)
    return SpinOperator(np.zeros(N + 1), -0.5j * (2 * m + 1) * c / N)


def basis_state(N: int, m: float) -> np.ndarray:
    """Normalized |m> as a complex amplitude vector."""
    N = _check_n(N)
    idx = m + N / 2
    if idx != int(idx) or not 0 <= idx <= N:
        raise ValueError(f"m={m} is not a valid projection for N={N}")
    psi = np.zeros(N + 1, dtype=complex)
    psi[int(idx)] = 1.0
    return psi


def cat_state(N: int) -> np.ndarray:
    """(|N/2> + |-N/2>)/sqrt(2)."""
    N = _check_n(N)
    psi = np.zeros(N + 1, dtype=complex)
    psi[0] = psi[-1] = np.sqrt(0.5)
    return psi


def coherent_x_state(N: int) -> np.ndarray:
    """Spin coherent state polarized along +x (S_x = N/2 eigenstate)."""
    N = _check_n(N)
    k = np.arange(N + 1)
    # sqrt(binom(N, k)) / 2^(N/2), in log space to survive N ~ 1000
    log_amp = 0.5 * (gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)) - 0.5 * N * np.log(2)
    return np.exp(log_amp).astype(complex)


def reflect(psi: np.ndarray) -> np.ndarray:
    """Parity map |m> -> |-m>."""
    return psi[::-1].copy()
