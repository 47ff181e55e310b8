"""Control schedules: transverse-field ramp, oscillator frequencies, CD amplitudes.

Time enters as the dimensionless ``s = t / t_f``; ``t_f`` only shows up in
time derivatives, ``d/dt = (1/t_f) d/ds``.  Functions accept scalars or numpy
arrays and return the same shape (floats for scalar input).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

# Gamma(s)/J = 2 - 30 s^2 + 100 s^3 - 120 s^4 + 48 s^5, ascending powers
QUINTIC_RAMP = (2.0, 0.0, -30.0, 100.0, -120.0, 48.0)

CROSSING_SLOPE_TOL = 1e-6
POLE_TOL = 1e-14


class ScheduleDomainError(ValueError):
    """Argument outside the domain where a schedule formula is defined."""


class ScheduleConfigError(ValueError):
    """The ramp violates a condition the finite-N CD schedule relies on."""


class PoleError(ArithmeticError):
    """The thermodynamic-limit CD amplitude diverges at the critical point."""


@dataclass(frozen=True)
class RampSpec:
    """Polynomial transverse-field ramp Gamma(s) = J * sum_k coeffs[k] s^k.

    The shipped default is the quintic with Gamma(0) = 2J, Gamma(1/2) = J,
    Gamma(1) = 0 and vanishing slope at all three points.
    """

    J: float = 1.0
    t_f: float = 1.0
    coeffs: tuple[float, ...] = QUINTIC_RAMP

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError(f"J must be positive, got {self.J}")
        if not self.t_f > 0:
            raise ValueError(f"t_f must be positive, got {self.t_f}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @cached_property
    def _poly(self) -> Polynomial:
        return Polynomial(self.coeffs)

    @cached_property
    def _dpoly(self) -> Polynomial:
        return self._poly.deriv()

    @cached_property
    def crossings(self) -> tuple[float, ...]:
        """Values of s in [0, 1] where Gamma(s) = J."""
        grid = np.linspace(0.0, 1.0, 2049)
        vals = self._poly(grid) - 1.0
        roots = [float(x) for x in grid[vals == 0.0]]
        for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if fa * fb < 0:
                roots.append(brentq(lambda x: self._poly(x) - 1.0, a, b, xtol=1e-15))
        return tuple(sorted(roots))

    def check_crossing(self) -> None:
        """Raise ScheduleConfigError unless dGamma/ds vanishes at every crossing."""
        for sc in self.crossings:
            slope = abs(float(self._dpoly(sc)))
            if slope > CROSSING_SLOPE_TOL:
                raise ScheduleConfigError(
                    f"ramp crosses Gamma=J at s={sc:.6g} with dGamma/ds={slope:.3g} J; "
                    "the finite-N CD amplitude would be discontinuous there"
                )


def _as_s(s):
    arr = np.asarray(s, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ScheduleDomainError(f"s must lie in [0, 1], got {s}")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def gamma(s, spec: RampSpec):
    """Transverse field Gamma at dimensionless time s."""
    return _out(spec.J * spec._poly(_as_s(s)))


def gamma_dot(s, spec: RampSpec):
    """Physical time derivative dGamma/dt = (J/t_f) dpoly/ds."""
    return _out(spec.J / spec.t_f * spec._dpoly(_as_s(s)))


def omega_infinite(gamma_val, J: float = 1.0):
    """Bogoliubov frequency in the thermodynamic limit (zero at Gamma = J)."""
    g = np.asarray(gamma_val, dtype=float)
    if np.any(g < 0):
        raise ScheduleDomainError(f"Gamma must be non-negative, got {gamma_val}")
    rad = np.where(g >= J, g * (g - J), J * J - g * g)
    return _out(2.0 * np.sqrt(np.maximum(rad, 0.0)))


def _radicand_finite(g, J, N):
    dis = (g - 0.5 * J * (1 - 1 / N)) ** 2 - (0.5 * J) ** 2 * (1 - 0.5 / N) ** 2
    q = g * g / (2 * J)
    ord_ = (J * (1 - 1 / N) - q * (1 - 3 / N)) ** 2 - q * q * (1 - 0.5 / N) ** 2
    return np.where(g >= J, dis, ord_)


def _check_finite_n(N):
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise ValueError(f"finite-size formulas need an integer N >= 2, got {N!r}")
    return int(N)


def omega_finite(gamma_val, J: float, N: int):
    """Bogoliubov frequency with 1/N corrections.

    The disordered branch is used for Gamma >= J; both branches agree at
    Gamma = J.  A non-positive radicand means the harmonic approximation
    has broken down and raises ScheduleDomainError.
    """
    N = _check_finite_n(N)
    g = np.asarray(gamma_val, dtype=float)
    if np.any(g < 0):
        raise ScheduleDomainError(f"Gamma must be non-negative, got {gamma_val}")
    rad = _radicand_finite(g, J, N)
    if np.any(rad <= 0):
        raise ScheduleDomainError(
            f"finite-size frequency undefined for N={N}: radicand {np.min(rad):.3g} <= 0"
        )
    return _out(2.0 * np.sqrt(rad))


def f_infinite(s, spec: RampSpec, pole_tol: float = POLE_TOL):
    """Thermodynamic-limit CD amplitude; raises PoleError near Gamma = J."""
    J = spec.J
    g = spec.J * spec._poly(_as_s(s))
    gd = spec.J / spec.t_f * spec._dpoly(np.asarray(s, dtype=float))
    if np.any(np.abs(g - J) <= pole_tol * J):
        raise PoleError(f"CD amplitude diverges at the critical point (s={s})")
    with np.errstate(divide="ignore", invalid="ignore"):
        dis = -(2 * g - J) * gd / (4 * g * (g - J))
        ord_ = g * gd / (J * J - g * g)
    return _out(np.where(g > J, dis, ord_))


def f_finite(s, spec: RampSpec, N: int):
    """CD amplitude with finite-size corrections, bounded across the crossing."""
    N = _check_finite_n(N)
    spec.check_crossing()
    J = spec.J
    sv = _as_s(s)
    g = J * spec._poly(sv)
    gd = J / spec.t_f * spec._dpoly(sv)
    a = J * (1 - 1 / N)
    num_dis = -0.25 * (2 * g - a) * gd
    num_ord = (
        g * (1 - 1 / N) * (1 - 3 / N) + 5 * g**3 / (2 * J * J) * (1 / N - 7 / (4 * N * N))
    ) * gd
    num = np.where(g > J, num_dis, num_ord)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / _radicand_finite(g, J, N)
    return _out(np.where(g == J, 0.0, val))


def potential(z, gamma_val: float, J: float, N: int):
    """Semiclassical potential V(z) = -(JN/2) z^2 - Gamma N sqrt(1 - z^2)."""
    zv = np.asarray(z, dtype=float)
    if np.any(np.abs(zv) > 1):
        raise ScheduleDomainError(f"|z| must be <= 1, got {z}")
    return _out(-0.5 * J * N * zv**2 - gamma_val * N * np.sqrt(1 - zv**2))


def potential_minima(gamma_val: float, J: float) -> tuple[float, ...]:
    """Minima of the semiclassical potential: z = 0 or z = +-sqrt(1 - (Gamma/J)^2)."""
    if gamma_val >= J:
        return (0.0,)
    z = float(np.sqrt(1 - (gamma_val / J) ** 2))
    return (-z, z)


@dataclass(frozen=True)
class ScheduleSet:
    """Ramp plus CD amplitude for a given particle number (None = N -> infinity)."""

    ramp: RampSpec
    N: int | None = None

    def gamma(self, s):
        return gamma(s, self.ramp)

    def gamma_dot(self, s):
        return gamma_dot(s, self.ramp)

    def f(self, s):
        if self.N is None:
            return f_infinite(s, self.ramp)
        return f_finite(s, self.ramp, self.N)

    def omega(self, s):
        g = gamma(s, self.ramp)
        if self.N is None:
            return omega_infinite(g, self.ramp.J)
        return omega_finite(g, self.ramp.J, self.N)


def schedule_table(spec: RampSpec, Ns, grid: int) -> tuple[list[str], list[list]]:
    """Tabulate schedules on ``grid`` evenly spaced s values.

    Returns (header, rows).  ``f_infinite`` entries at the pole are ``None``;
    writers replace them with a sentinel token.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    Ns = [_check_finite_n(n) for n in Ns]
    s = np.linspace(0.0, 1.0, grid)
    g = gamma(s, spec)
    header = ["s", "gamma", "gamma_dot"]
    cols = [s, g, gamma_dot(s, spec)]
    for n in Ns:
        header.append(f"f_finite_N{n}")
        cols.append(f_finite(s, spec, n))
    for n in Ns:
        header.append(f"omega_N{n}")
        cols.append(omega_finite(g, spec.J, n))
    header += ["omega_infinite", "f_infinite"]
    cols.append(omega_infinite(g, spec.J))
    rows = []
    for i, si in enumerate(s):
        row = [float(c[i]) for c in cols]
        try:
            row.append(f_infinite(float(si), spec))
        except PoleError:
            row.append(None)
        rows.append(row)
    return header, rows
