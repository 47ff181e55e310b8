"""Time-dependent Hamiltonian assembly and Schroedinger propagation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import spin_ops
from ._kernels import cn_sweep
from .schedules import RampSpec, ScheduleSet, f_finite, gamma
from .spectrum import ground_state
from .spin_ops import SpinOperator

NORM_TOL = 1e-9
STEPS_PER_UNIT_TIME = 10_000

# Triple-jump weights lifting a symmetric 2nd-order step to 4th order.
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1


class CdMode(str, enum.Enum):
    OFF = "off"
    ON = "on"
    AFTER_CRITICAL = "after-critical"

    @classmethod
    def coerce(cls, value) -> CdMode:
        if isinstance(value, bool):
            return cls.ON if value else cls.OFF
        if isinstance(value, str):
            value = value.replace("_", "-")
            if value == "on-after-critical":
                value = cls.AFTER_CRITICAL.value
        return cls(value)


class NormDriftError(RuntimeError):
    def __init__(self, drift, dt, t_reached):
        super().__init__(
            f"norm drift {drift:.3g} exceeds tolerance (step size {dt:.3g}, "
            f"reached t={t_reached:.6g})"
        )
        self.drift = drift
        self.dt = dt
        self.t_reached = t_reached


Controls = Callable[[np.ndarray, CdMode], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True, eq=False)
class HamiltonianAssembly:
    """H(t) = diag + Omega(t) * sx_band + f(t) * cd_band.

    ``controls(t, mode)`` returns the (Omega, f) arrays at times ``t``.
    """

    diag: np.ndarray
    sx_band: np.ndarray
    cd_band: np.ndarray
    t_f: float
    controls: Controls
    J: float = 1.0
    ramp: RampSpec | None = field(default=None)

    @property
    def N(self) -> int:
        return self.diag.size - 1

    @classmethod
    def lmg(cls, N: int, ramp: RampSpec | None = None) -> HamiltonianAssembly:
        """chi S_z^2 - 2 Gamma(t) S_x + f(t) (S_y S_z + S_z S_y)/N with chi = -2J/N."""
        ramp = ramp or RampSpec()
        if N < 2:
            raise ValueError(f"the CD schedule needs N >= 2, got {N}")
        ramp.check_crossing()
        s_cross = ramp.crossings[0] if ramp.crossings else 0.0
        J = ramp.J

        def controls(t, mode):
            s = np.clip(np.asarray(t, dtype=float) / ramp.t_f, 0.0, 1.0)
            omega = -2.0 * np.asarray(gamma(s, ramp))
            if mode is CdMode.OFF:
                f = np.zeros_like(s)
            else:
                f = np.asarray(f_finite(s, ramp, N), dtype=float)
                if mode is CdMode.AFTER_CRITICAL:
                    f = np.where(s >= s_cross, f, 0.0)
            return omega, f

        return cls(
            diag=(-2.0 * J / N) * spin_ops.build_sz2(N).diag,
            sx_band=np.asarray(spin_ops.build_sx(N).off, dtype=complex),
            cd_band=np.asarray(spin_ops.build_cd_term(N).off, dtype=complex),
            t_f=ramp.t_f,
            controls=controls,
            J=J,
            ramp=ramp,
        )

    @classmethod
    def constant(cls, op: SpinOperator, t_f: float = 1.0) -> HamiltonianAssembly:
        """Time-independent generator ``op`` (for tests and frozen runs)."""

        def controls(t, mode):
            t = np.asarray(t, dtype=float)
            return np.ones_like(t), np.zeros_like(t)

        return cls(op.diag, np.asarray(op.off, dtype=complex), np.zeros(op.dim - 1, complex),
                   t_f, controls)

    @property
    def schedule(self) -> ScheduleSet | None:
        return None if self.ramp is None else ScheduleSet(self.ramp, self.N)


def assemble_h(t: float, asm: HamiltonianAssembly, cd_enabled=True) -> SpinOperator:
    """Instantaneous H(t); beyond t_f the frozen H(t_f) is returned."""
    mode = CdMode.coerce(cd_enabled)
    omega, f = asm.controls(np.array([min(t, asm.t_f)]), mode)
    off = omega[0] * asm.sx_band + f[0] * asm.cd_band
    return SpinOperator(asm.diag, off)


def assemble_h0(t: float, asm: HamiltonianAssembly) -> SpinOperator:
    return assemble_h(t, asm, CdMode.OFF)


def initial_state(asm: HamiltonianAssembly) -> np.ndarray:
    """Ground state of H(0) (unique in the disordered phase)."""
    return ground_state(assemble_h0(0.0, asm))[1]


def default_steps(t_f: float, J: float = 1.0) -> int:
    return max(1000, math.ceil(STEPS_PER_UNIT_TIME * t_f * J))


@dataclass(frozen=True, eq=False)
class PropagationResult:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)
    step_count: int
    norm_drift: float
    dt: float

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _substeps(t0: float, h: float, n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    starts = t0 + h * np.arange(n)
    if order == 2:
        return starts + 0.5 * h, np.full(n, h)
    if order == 4:
        w = np.array([_W1, _W0, _W1])
        offsets = np.cumsum(w) - 0.5 * w
        mids = (starts[:, None] + h * offsets[None, :]).ravel()
        return mids, np.tile(h * w, n)
    raise ValueError(f"order must be 2 or 4, got {order}")


def propagate(
    psi0: np.ndarray,
    asm: HamiltonianAssembly,
    t_grid,
    steps: int,
    cd_enabled=True,
    *,
    order: int = 2,
    norm_tol: float = NORM_TOL,
) -> PropagationResult:
    """Integrate i d/dt psi = H(t) psi and sample at ``t_grid``.

    Fixed-step Crank-Nicolson with the Hamiltonian sampled at each step
    midpoint (order 2), optionally composed into a 4th-order triple jump.
    ``steps`` fixes the nominal step size (t_grid[-1] - t_grid[0]) / steps;
    each sampling interval is split into a whole number of steps no larger
    than that.  The norm is monitored, never renormalized.
    """
    mode = CdMode.coerce(cd_enabled)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(t_grid) < 0) or t_grid[0] < 0:
        raise ValueError("t_grid must be ascending and non-negative")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    psi = np.array(psi0, dtype=complex)
    if abs(np.vdot(psi, psi).real - 1.0) > NORM_TOL:
        raise ValueError("initial state is not normalized")

    span = t_grid[-1] - t_grid[0]
    dt_nominal = span / steps if span > 0 else 0.0
    states = [psi.copy()]
    drift = 0.0
    total = 0
    for a, b in zip(t_grid[:-1], t_grid[1:]):
        if b == a:
            states.append(psi.copy())
            continue
        n = max(1, math.ceil((b - a) / dt_nominal - 1e-9))
        h = (b - a) / n
        mids, dts = _substeps(a, h, n, order)
        omegas, fs = asm.controls(mids, mode)
        done, d = cn_sweep(psi, asm.diag, asm.sx_band, asm.cd_band,
                           np.ascontiguousarray(omegas, dtype=float),
                           np.ascontiguousarray(fs, dtype=float), dts, norm_tol)
        drift = max(drift, d)
        total += n
        if drift > norm_tol:
            per = len(dts) // n
            raise NormDriftError(drift, h, a + h * math.ceil(done / per))
        states.append(psi.copy())
    return PropagationResult(t_grid.copy(), np.array(states), total, float(drift), dt_nominal)


def freeze_run(
    psi_tf: np.ndarray,
    asm: HamiltonianAssembly,
    extra_duration: float,
    samples: int = 2,
    steps: int | None = None,
) -> PropagationResult:
    """Continue from t_f under the constant H(t_f) for ``extra_duration``."""
    if extra_duration < 0:
        raise ValueError("extra_duration must be non-negative")
    t_grid = asm.t_f + np.linspace(0.0, extra_duration, max(samples, 2))
    steps = steps or default_steps(extra_duration or 1.0, asm.J)
    return propagate(psi_tf, asm, t_grid, steps, CdMode.ON)
