"""Pumped amplifier: the embedding plus a dipole, and its figures of merit."""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .dipole import (JosephsonDipole, OperatingPoint, PumpState, check_pump_phase, gamma3_linear,
                     gamma3_pumped, pump_coupling_efficiency, y_nl)
from .errors import UnreachableGainError
from .resonance import ModeSummary, find_modes
from .threeport import Embedding, dipole_wave_response, loaded_transfer

GAIN_RTOL = 1e-6
MAX_BISECT = 60
SIGNAL_DETUNING = 2.0 * math.pi * 100e3  # rad/s below half the pump frequency


@dataclass
class DesignReport:
    """Everything known about a design; pumped fields stay ``None`` until solved."""

    omega_a: float | None = None
    kappa_a: float | None = None
    p_j: float | None = None
    kappa_signal: float | None = None
    kappa_pump: float | None = None
    omega_p: float | None = None
    eta_pc: float | None = None
    leak_ratio: float | None = None
    transmission_a: float | None = None
    pump_rejection_db: float | None = None
    signal_rejection_db: float | None = None
    omega_s: float | None = None
    phi_p: float | None = None
    gain: float | None = None
    transmission: float | None = None
    p_jp_w: float | None = None
    p_pump_w: float | None = None
    leak_w: float | None = None
    leak_bound_w: float | None = None
    noise_slope: float | None = None
    eta_nl: float | None = None
    eta_p: float | None = None
    feasible: bool = True
    flags: list = field(default_factory=list)

    @property
    def q(self):
        return self.omega_a / self.kappa_a

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d


@dataclass(frozen=True)
class Amplifier:
    embedding: Embedding
    dipole: JosephsonDipole

    @property
    def z0(self):
        return self.embedding.z0

    def modes(self, window, n_grid: int = 2001) -> list[ModeSummary]:
        e = self.embedding
        return find_modes(e.zth, self.dipole.l_j, window, n_grid=n_grid, z_signal=e.z_signal, z_pump=e.z_pump)

    def mode_near(self, omega_target, window, n_grid: int = 2001) -> ModeSummary | None:
        ms = self.modes(window, n_grid)
        if not ms:
            return None
        return min(ms, key=lambda m: abs(m.omega - omega_target))

    def operating_point(self, mode: ModeSummary, detuning: float = SIGNAL_DETUNING) -> OperatingPoint:
        """Pump at twice the mode frequency, signal slightly below half the pump."""
        return OperatingPoint(mode.omega - detuning, 2.0 * mode.omega)

    # pump path, dipole held at its linear inductance
    def pump_response(self, omega_p):
        s3 = self.embedding.scattering(omega_p)
        g3 = gamma3_linear(self.dipole.l_j, omega_p, self.z0)
        return s3, g3

    def pump_efficiency(self, omega_p):
        s3, g3 = self.pump_response(omega_p)
        return float(pump_coupling_efficiency(s3, g3, self.dipole.l_j, omega_p, self.z0))

    def pump_leak_ratio(self, omega_p):
        """Pump power leaving the signal port per incident pump power."""
        s3, g3 = self.pump_response(omega_p)
        return float(np.abs(loaded_transfer(s3, g3, 0, 1)) ** 2)

    def pump_phase_direction(self, omega_p) -> complex:
        """Unit phasor of the dipole pump phase produced by a real incident pump wave."""
        s3, g3 = self.pump_response(omega_p)
        _, vj = dipole_wave_response(s3, g3, 1)
        phi = complex(vj) / (1j * omega_p * self.dipole.phi0)
        return phi / abs(phi) if phi != 0 else 1.0 + 0j

    def pump_state(self, op: OperatingPoint, magnitude: float) -> PumpState:
        return PumpState(op.omega_p, magnitude * self.pump_phase_direction(op.omega_p), self.dipole.phi0)

    # signal path with the pumped dipole
    def gamma3(self, op: OperatingPoint, pump: PumpState, omega_s=None):
        ws = op.omega_s if omega_s is None else omega_s
        op = OperatingPoint(ws, op.omega_p)
        zi = complex(self.embedding.zth_at(op.omega_i))
        return gamma3_pumped(self.dipole.l_j, y_nl(self.dipole, pump, op, zi), ws, self.z0)

    def signal_transfer(self, op: OperatingPoint, pump: PumpState, omega_s=None):
        """Loaded signal reflection ``r11`` and transmission ``t21`` amplitudes."""
        ws = op.omega_s if omega_s is None else omega_s
        g3 = self.gamma3(op, pump, ws)
        s3 = self.embedding.scattering(ws)
        return loaded_transfer(s3, g3, 0, 0), loaded_transfer(s3, g3, 1, 0)

    def gain(self, op, pump, omega_s=None) -> float:
        return float(abs(self.signal_transfer(op, pump, omega_s)[0]) ** 2)

    def transmission(self, op, pump, omega_s=None) -> float:
        return float(abs(self.signal_transfer(op, pump, omega_s)[1]) ** 2)

    def _gain_of_magnitude(self, op, mag):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return self.gain(op, self.pump_state(op, mag))

    def solve_pump_for_gain(self, op: OperatingPoint, g_target: float, phi_max: float | None = None,
                            n_scan: int = 400) -> PumpState:
        """Smallest pump phase magnitude giving reflection gain ``g_target``.

        A geometric scan brackets the first crossing below the oscillation
        threshold; bisection then refines it.
        """
        if g_target <= 1.0:
            return self.pump_state(op, 0.0)
        phi_max = self.dipole.phi_max if phi_max is None else phi_max
        grid = np.geomspace(phi_max * 1e-6, phi_max, n_scan)
        lo = 0.0
        hi = None
        for x in grid:
            g = self._gain_of_magnitude(op, x)
            if g >= g_target:
                hi = x
                break
            lo = x
        if hi is None:
            raise UnreachableGainError(
                f"gain {g_target:.4g} not reached for |phi_p| <= {phi_max:.3g}")
        for _ in range(MAX_BISECT):
            mid = 0.5 * (lo + hi)
            g = self._gain_of_magnitude(op, mid)
            if abs(g - g_target) / g_target < GAIN_RTOL:
                break
            if g < g_target:
                lo = mid
            else:
                hi = mid
        else:
            raise UnreachableGainError("pump bisection did not converge")
        pump = self.pump_state(op, mid)
        check_pump_phase(self.dipole, pump.phi_p)
        return pump

    def linear_report(self, mode: ModeSummary) -> DesignReport:
        """Mode data plus the unpumped pump-path figures at ``w_p = 2 w_a``."""
        wp = 2.0 * mode.omega
        s3 = self.embedding.scattering(mode.omega)
        g3 = gamma3_linear(self.dipole.l_j, mode.omega, self.z0)
        return DesignReport(
            omega_a=mode.omega, kappa_a=mode.kappa, p_j=mode.p_j,
            kappa_signal=mode.kappa_signal, kappa_pump=mode.kappa_pump,
            omega_p=wp, eta_pc=self.pump_efficiency(wp), leak_ratio=self.pump_leak_ratio(wp),
            transmission_a=float(abs(loaded_transfer(s3, g3, 1, 0)) ** 2))

    def figures_of_merit(self, mode: ModeSummary, g_target: float = 100.0, eta_nl: float | None = None,
                         detuning: float = SIGNAL_DETUNING, report: DesignReport | None = None) -> DesignReport:
        """Solve the pump for ``g_target`` and fill in power, leakage and noise figures."""
        r = report if report is not None else self.linear_report(mode)
        op = self.operating_point(mode, detuning)
        pump = self.solve_pump_for_gain(op, g_target)
        r.omega_s = op.omega_s
        r.omega_p = op.omega_p
        r.eta_pc = self.pump_efficiency(op.omega_p)
        r.leak_ratio = self.pump_leak_ratio(op.omega_p)
        r.phi_p = float(abs(pump.phi_p))
        r.gain = self.gain(op, pump)
        r.transmission = self.transmission(op, pump)
        r.p_jp_w = float(self.dipole.pump_power(op.omega_p, pump.phi_p))
        r.p_pump_w = r.p_jp_w / r.eta_pc
        r.leak_bound_w = r.p_pump_w
        r.leak_w = r.leak_ratio * r.p_pump_w
        r.noise_slope = 2.0 * r.transmission
        if eta_nl is None:
            r.flags.append("eta_nl missing: eta_p not reported")
        else:
            r.eta_nl = float(eta_nl)
            r.eta_p = r.eta_nl * r.eta_pc
        return r
