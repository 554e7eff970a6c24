"""Josephson dipole model and its stiff-pump linearized response.

The dipole current-phase relation is truncated at second order in phase,
``I = (phi0/L_J) (phi + (c3/2) phi**2)``, with ``L_J`` the exact inverse
linear response so no separate ``c2`` appears.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import HystereticRegimeError, IdlerResonanceError, PumpPhaseWarning
from .threeport import _check_denominator, loaded_transfer

PHI0 = constants.hbar / (2.0 * constants.e)  # reduced flux quantum, Wb/rad
PHI_P_WARN = 0.5  # per loop
PHI_P_MAX = 1.0  # per loop


@dataclass(frozen=True)
class JosephsonDipole:
    """Lumped nonlinear inductor. ``n_loops`` only scales the validity bound on pump phase."""

    l_j: float
    c3: float = 0.0
    phi0: float = PHI0
    n_loops: int = 1

    def __post_init__(self):
        if not self.l_j > 0:
            raise ValueError("L_J must be positive")
        if self.n_loops < 1:
            raise ValueError("n_loops must be >= 1")

    @property
    def phi_max(self) -> float:
        """Largest total pump phase for which the cubic truncation is trusted."""
        return PHI_P_MAX * self.n_loops

    def pump_power(self, omega_p, phi_p):
        """Reactive pump power scale ``|V_J|^2 / (w_p L_J)`` for pump phase ``phi_p``."""
        return omega_p * self.phi0 ** 2 * np.abs(phi_p) ** 2 / self.l_j


@dataclass(frozen=True)
class SnailArrayParams:
    """Series array of ``m`` SNAIL loops, each ``n`` large junctions and one small one.

    ``phi_ext`` is the external flux per loop in units of the flux quantum.
    """

    m: int = 10
    n: int = 3
    ic_large: float = 10.1e-6
    ic_small: float = 0.8e-6
    phi_ext: float = 0.3

    @property
    def alpha(self) -> float:
        return self.ic_small / self.ic_large

    def with_flux(self, phi_ext: float) -> "SnailArrayParams":
        return SnailArrayParams(self.m, self.n, self.ic_large, self.ic_small, phi_ext)


@dataclass(frozen=True)
class PumpState:
    omega_p: float
    phi_p: complex
    phi0: float = PHI0

    @property
    def v_j(self) -> complex:
        """Pump voltage phasor across the dipole."""
        return 1j * self.omega_p * self.phi0 * self.phi_p


@dataclass(frozen=True)
class OperatingPoint:
    omega_s: float
    omega_p: float
    gain_target: float = 100.0

    @property
    def omega_i(self) -> float:
        return self.omega_p - self.omega_s

    def __post_init__(self):
        if not (0 < self.omega_s < self.omega_p):
            raise ValueError("need 0 < omega_s < omega_p")


def snail_potential(phi, alpha, n, phi_ext):
    """Single-loop potential in units of the large-junction Josephson energy."""
    theta = 2.0 * math.pi * phi_ext
    return -alpha * np.cos(phi) - n * np.cos((phi - theta) / n)


def _snail_minimum(alpha, n, phi_ext, tol=1e-12):
    theta = 2.0 * math.pi * phi_ext

    def du(x):
        return alpha * math.sin(x) + math.sin((x - theta) / n)

    # one full period of the potential is 2*pi*n
    grid = np.linspace(theta - n * math.pi, theta + n * math.pi, 4096)
    d = alpha * np.sin(grid) + np.sin((grid - theta) / n)
    rising = np.nonzero((d[:-1] < 0) & (d[1:] >= 0))[0]
    if len(rising) != 1:
        raise HystereticRegimeError(f"{len(rising)} potential minima per period at phi_ext={phi_ext}")
    lo, hi = grid[rising[0]], grid[rising[0] + 1]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if du(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def snail_loop_coefficients(alpha, n, phi_ext):
    """Return ``(phi_min, c2, c3_raw)``: minimum and Taylor coefficients of one loop."""
    if not (0 < alpha < 1.0 / n):
        raise HystereticRegimeError(f"alpha={alpha:.4g} must lie in (0, 1/n={1.0 / n:.4g})")
    phi_ext = phi_ext % 1.0
    theta = 2.0 * math.pi * phi_ext
    x = _snail_minimum(alpha, n, phi_ext)
    y = (x - theta) / n
    c2 = alpha * math.cos(x) + math.cos(y) / n
    c3 = -alpha * math.sin(x) - math.sin(y) / n ** 2
    return x, c2, c3


def snail_coefficients(p: SnailArrayParams, phi0: float = PHI0) -> JosephsonDipole:
    """Effective ``L_J`` and normalized ``c3`` of the SNAIL array at its flux point."""
    if p.m < 1:
        raise ValueError("need at least one SNAIL")
    _, c2, c3 = snail_loop_coefficients(p.alpha, p.n, p.phi_ext)
    l_loop = phi0 / (p.ic_large * c2)
    return JosephsonDipole(p.m * l_loop, (c3 / c2) / p.m, phi0, p.m)


def gamma3_linear(l_j, omega, z0=50.0):
    """Reflection off the bare inductance ``L_J`` at the dipole port."""
    zl = 1j * np.asarray(omega) * l_j
    return (zl - z0) / (zl + z0)


def pump_coupling_efficiency(s3_p, gamma3_p, l_j, omega_p, z0=50.0):
    """Dipole pump power scale ``|V_J|^2/(w_p L_J)`` per incident pump power ``|V_in|^2/z0``."""
    s3_p = np.asarray(s3_p)
    d = 1.0 - gamma3_p * s3_p[..., 2, 2]
    _check_denominator(d, "pump_coupling_efficiency")
    v = (1.0 + gamma3_p) * s3_p[..., 2, 1] / d
    return np.abs(v) ** 2 * z0 / (omega_p * l_j)


def check_pump_phase(d: JosephsonDipole, phi_p, stacklevel=3):
    per_loop = abs(phi_p) / d.n_loops
    if per_loop > PHI_P_WARN:
        warnings.warn(f"pump phase per loop {per_loop:.3g} exceeds {PHI_P_WARN}: cubic truncation is doubtful",
                      PumpPhaseWarning, stacklevel=stacklevel)


def cross_admittance(d: JosephsonDipole, pump: PumpState, op: OperatingPoint) -> np.ndarray:
    """2x2 matrix mapping ``(V_s, conj(V_i))`` to ``(I_s, conj(I_i))`` at the dipole."""
    check_pump_phase(d, pump.phi_p)
    a = 0.5 * d.c3 * pump.phi_p
    ws, wi = op.omega_s, op.omega_i
    return np.array([[1.0 / ws, a / (-wi)],
                     [np.conj(a) / ws, 1.0 / (-wi)]]) / (1j * d.l_j)


def y_nl_from_strength(l_j, omega_s, omega_i, strength, zth_idler):
    """Pump-induced admittance for ``strength = |c3 phi_p / 2|**2`` (vectorized in strength)."""
    zc = np.conj(zth_idler)
    den = 1j * l_j * omega_i / zc - 1.0
    if abs(den) < 1e-14:
        raise IdlerResonanceError("idler constraint is singular: j w_i L_J = conj(Z_th[w_i])")
    return np.asarray(strength) / (1j * l_j * omega_s) / den


def y_nl(d: JosephsonDipole, pump: PumpState, op: OperatingPoint, zth_idler: complex) -> complex:
    """Effective admittance added at the signal frequency by the pumped dipole.

    Obtained by eliminating the idler through its passive constraint
    ``V_i + Z_th[w_i] I_i = 0``. Amplification needs ``Re(Y) < 0``.
    """
    strength = abs(0.5 * d.c3 * pump.phi_p) ** 2
    return complex(y_nl_from_strength(d.l_j, op.omega_s, op.omega_i, strength, zth_idler))


def y_nl_negative_conductance(l_j, omega_s, strength, pq):
    """High-``pQ`` limit of :func:`y_nl` with the idler on resonance."""
    return -pq * strength / (omega_s * l_j)


def gamma3_pumped(l_j, ynl, omega_s, z0=50.0):
    y = 1.0 / (1j * np.asarray(omega_s) * l_j) + ynl
    return (1.0 - z0 * y) / (1.0 + z0 * y)


def gain(s3_s, gamma3_s):
    """Reflection power gain at the signal port."""
    return np.abs(loaded_transfer(s3_s, gamma3_s, 0, 0)) ** 2


def transmission(s3_s, gamma3_s):
    """Signal power transmitted from the signal port to the pump port."""
    return np.abs(loaded_transfer(s3_s, gamma3_s, 1, 0)) ** 2
