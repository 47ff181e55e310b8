"""Instantaneous eigenpairs, ground-state subspaces and S_z populations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .spin_ops import SpinOperator, m_values, reflect

EIG_TOL = 1e-12  # relative to the largest matrix element
RESIDUAL_TOL = 1e-9
DEGENERACY_FACTOR = 1e3


class EigenConvergenceError(RuntimeError):
    pass


class DegenerateGroundStateError(ValueError):
    """Ground state is (near-)degenerate; use ground_subspace instead."""


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(vec)))
    out = vec * (np.abs(vec[k]) / vec[k])
    out[k] = np.abs(vec[k])
    return out


def _gauge(h: SpinOperator) -> tuple[np.ndarray, np.ndarray]:
    # diagonal unitary D with D^dag H D real symmetric (off-diagonal |off|)
    phase = np.ones(h.dim, dtype=complex)
    mag = np.abs(h.off)
    unit = np.where(mag > 0, h.off / np.where(mag > 0, mag, 1.0), 1.0)
    phase[1:] = np.cumprod(unit)
    return phase, mag


def eigs_lowest(h: SpinOperator, k: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """The ``k`` lowest eigenpairs of a Hermitian tridiagonal operator.

    Returns (energies ascending, vectors as columns).  Each vector carries the
    phase convention of :func:`fix_phase`.
    """
    if not 1 <= k <= h.dim:
        raise ValueError(f"k must be in [1, {h.dim}], got {k}")
    phase, mag = _gauge(h)
    try:
        w, v = eigh_tridiagonal(h.diag, mag, select="i", select_range=(0, k - 1))
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"tridiagonal eigensolver failed (dim={h.dim}): {exc}") from exc
    vecs = phase[:, None] * v
    scale = max(h.norm_max(), 1.0)
    for j in range(k):
        vecs[:, j] = fix_phase(vecs[:, j])
        res = np.linalg.norm(h.matvec(vecs[:, j]) - w[j] * vecs[:, j])
        if res > RESIDUAL_TOL * scale:
            raise EigenConvergenceError(
                f"eigenpair {j} residual {res:.3g} exceeds {RESIDUAL_TOL:g}*|H| "
                f"(dim={h.dim}, energy={w[j]:.17g})"
            )
    return w, vecs


def ground_state(h: SpinOperator) -> tuple[float, np.ndarray]:
    """Unique ground state (energy, vector); refuses near-degenerate problems."""
    w, v = eigs_lowest(h, 2)
    tol = EIG_TOL * max(h.norm_max(), 1.0)
    if w[1] - w[0] < DEGENERACY_FACTOR * tol:
        raise DegenerateGroundStateError(
            f"ground-state gap {w[1] - w[0]:.3g} below {DEGENERACY_FACTOR * tol:.3g}; "
            "use ground_subspace"
        )
    return float(w[0]), v[:, 0]


def parity_expectation(vec: np.ndarray) -> float:
    """<v|R|v> for the reflection R: |m> -> |-m>."""
    return float(np.vdot(vec, reflect(vec)).real)


@dataclass(frozen=True, eq=False)
class GroundSubspace:
    """Orthonormal basis of the instantaneous ground-state subspace.

    ``vectors`` has one column (disordered phase) or two (ordered phase,
    even parity first).  ``energies`` are the matching <v|H|v>.
    """

    vectors: np.ndarray
    energies: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def projector_weight(self, psi: np.ndarray) -> float:
        return float(np.sum(np.abs(self.vectors.conj().T @ psi) ** 2))


def _parity_basis(vecs: np.ndarray) -> np.ndarray:
    refl = vecs[::-1, :]
    pmat = vecs.conj().T @ refl
    pmat = 0.5 * (pmat + pmat.conj().T)
    _, rot = np.linalg.eigh(pmat)
    out = vecs @ rot[:, ::-1]  # parity +1 first
    return np.column_stack([fix_phase(out[:, j]) for j in range(out.shape[1])])


def ground_subspace(h: SpinOperator, gamma_val: float, J: float = 1.0) -> GroundSubspace:
    """Ground state for Gamma > J; the two lowest states for Gamma <= J."""
    if gamma_val > J:
        _, v = eigs_lowest(h, 1)
    else:
        _, v = eigs_lowest(h, 2)
        v = _parity_basis(v)
    energies = np.array([h.expect(v[:, j]) for j in range(v.shape[1])])
    return GroundSubspace(v, energies)


def population_distribution(psi: np.ndarray) -> np.ndarray:
    """p(m) = |<m|psi>|^2 in ascending-m order."""
    return np.abs(np.asarray(psi)) ** 2


def distribution_rows(psi: np.ndarray) -> list[tuple[float, float]]:
    N = len(psi) - 1
    return list(zip(m_values(N).tolist(), population_distribution(psi).tolist()))
