"""Scalar diagnostics of a pure collective-spin state."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .spectrum import GroundSubspace
from .spin_ops import SpinOperator, m_values


def _moments(psi: np.ndarray) -> tuple[float, float]:
    p = np.abs(psi) ** 2
    m = m_values(len(psi) - 1)
    return float(np.dot(p, m)), float(np.dot(p, m * m))


def fidelity_to_subspace(psi: np.ndarray, sub: GroundSubspace) -> float:
    """Weight of psi in the ground-state subspace (projector expectation)."""
    return min(max(sub.projector_weight(psi), 0.0), 1.0)


def energy(psi: np.ndarray, h: SpinOperator) -> float:
    return h.expect(psi)


def residual_energy(psi_tf: np.ndarray, h_tf: SpinOperator, J: float, N: int) -> float:
    """<H(t_f)> above the ferromagnetic ground energy -JN/2."""
    return h_tf.expect(psi_tf) + 0.5 * J * N


def order_parameter(psi_tf: np.ndarray, N: int) -> float:
    _, sz2 = _moments(psi_tf)
    return math.sqrt(max(sz2, 0.0)) / (N / 2)


def incomplete_magnetization(psi_tf: np.ndarray, N: int) -> float:
    return 1.0 - order_parameter(psi_tf, N)


def qfi(psi: np.ndarray) -> float:
    """Pure-state quantum Fisher information for rotations about z: 4 Var(S_z)."""
    sz, sz2 = _moments(psi)
    return 4.0 * (sz2 - sz * sz)


def sz_mean(psi: np.ndarray) -> float:
    return _moments(psi)[0]


def standard_quantum_limit(N: int) -> float:
    return float(N)


def heisenberg_limit(N: int) -> float:
    return float(N) ** 2


def dicke_qfi(N: int) -> float:
    """QFI of the maximally spin-squeezed Dicke state, N^2/2 + N (reference line)."""
    return 0.5 * N * N + N


def is_entangled(qfi_value: float, N: int) -> bool:
    return qfi_value > standard_quantum_limit(N)


@dataclass(frozen=True)
class DiagnosticsSample:
    t: float
    s: float
    fidelity: float
    energy: float
    residual_energy: float
    order_param: float
    m_inc: float
    qfi: float

    COLUMNS = ("t", "s", "fidelity", "energy", "residual_energy", "order_param", "m_inc", "qfi")

    def row(self) -> list[float]:
        d = asdict(self)
        return [d[c] for c in self.COLUMNS]
