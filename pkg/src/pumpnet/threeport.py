"""Compose the signal-port and pump-port networks around the dipole port.

Port numbering (0-based indices in arrays): 0 = signal, 1 = pump, 2 = dipole.
The two networks meet at the dipole in series with a common ground; the
dipole voltage is taken positive on the signal-network side.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCompositionError, NearSingularWarning
from .network import INFINITE_IMPEDANCE, TwoPortResponse

SIGNAL, PUMP, DIPOLE = 0, 1, 2
SINGULAR_TOL = 1e-12


def compose_three_port(s_sig, s_pump) -> np.ndarray:
    """Effective 3x3 scattering matrix from the two 2-port S-matrices.

    Each constituent is ordered (outer port, dipole-side port), so
    ``r = S[1, 1]`` is the reflection seen from the dipole and
    ``t = S[1, 0]`` the transmission. Inputs broadcast over leading axes.
    """
    s_sig = np.asarray(s_sig, dtype=np.complex128)
    s_pump = np.asarray(s_pump, dtype=np.complex128)
    r1s, ts, rs = s_sig[..., 0, 0], s_sig[..., 1, 0], s_sig[..., 1, 1]
    r1p, tp, rp = s_pump[..., 0, 0], s_pump[..., 1, 0], s_pump[..., 1, 1]
    den = 3.0 - (rs + rp) - rs * rp
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise DegenerateCompositionError(
            f"composition denominator |3 - (rs+rp) - rs*rp| = {np.min(np.abs(den)):.3g}")
    out = np.empty(np.broadcast(rs, rp).shape + (3, 3), dtype=np.complex128)
    out[..., 0, 0] = r1s + ts * ts * (1.0 + rp) / den
    out[..., 1, 1] = r1p + tp * tp * (1.0 + rs) / den
    out[..., 1, 0] = out[..., 0, 1] = 2.0 * ts * tp / den
    out[..., 2, 0] = out[..., 0, 2] = 2.0 * (1.0 - rp) * ts / den
    # minus sign: the dipole voltage is referenced plus-on-signal-side
    out[..., 2, 1] = out[..., 1, 2] = -2.0 * (1.0 - rs) * tp / den
    out[..., 2, 2] = (1.0 + (rs + rp) - 3.0 * rs * rp) / den
    return out


def _check_denominator(d, what):
    mag = np.min(np.abs(d))
    if mag < SINGULAR_TOL:
        warnings.warn(f"{what}: |1 - Gamma3*S33| = {mag:.3g}, response diverges",
                      NearSingularWarning, stacklevel=3)


def dipole_wave_response(s3, gamma3, drive_port: int):
    """Outgoing dipole-port wave and dipole voltage per unit incident wave.

    Returns ``(v_out3, v_j)`` where ``v_out3 = S3,k / (1 - Gamma3 S33)`` and
    ``v_j = (1 + Gamma3) v_out3`` for drive at port index ``drive_port``
    (0 = signal, 1 = pump).
    """
    s3 = np.asarray(s3)
    d = 1.0 - gamma3 * s3[..., 2, 2]
    _check_denominator(d, "dipole_wave_response")
    v_out3 = s3[..., 2, drive_port] / d
    return v_out3, (1.0 + gamma3) * v_out3


def loaded_transfer(s3, gamma3, to_port: int, from_port: int):
    """Port-to-port wave transfer with the dipole port loaded by ``gamma3``."""
    s3 = np.asarray(s3)
    d = 1.0 - gamma3 * s3[..., 2, 2]
    _check_denominator(d, "loaded_transfer")
    return s3[..., to_port, from_port] + s3[..., to_port, 2] * gamma3 * s3[..., 2, from_port] / d


def impedance_from_reflection(r, z0):
    r = np.asarray(r, dtype=np.complex128)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(r == 1, INFINITE_IMPEDANCE, z0 * (1 + r) / np.where(r == 1, 0.5, 1 - r))
    return complex(z) if z.ndim == 0 else z


def thevenin_impedance(s3=None, z0: float = 50.0, *, z_signal=None, z_pump=None):
    """Impedance seen by the dipole: ``z0 (1+S33)/(1-S33)`` or ``Z(s) + Z(p)``."""
    if s3 is not None:
        return impedance_from_reflection(np.asarray(s3)[..., 2, 2], z0)
    if z_signal is None or z_pump is None:
        raise TypeError("need either s3 or both z_signal and z_pump")
    return np.asarray(z_signal) + np.asarray(z_pump)


@dataclass(frozen=True)
class Embedding:
    """The linear circuit around the dipole: two coupling networks in series."""

    signal: TwoPortResponse
    pump: TwoPortResponse

    @property
    def z0(self) -> float:
        return self.signal.z0

    def z_signal(self, s):
        return self.signal.output_impedance(s)

    def z_pump(self, s):
        return self.pump.output_impedance(s)

    def zth(self, s):
        """Thevenin impedance at complex frequency ``s`` (sum form)."""
        return self.signal.output_impedance(s) + self.pump.output_impedance(s)

    def zth_at(self, omega):
        return self.zth(1j * np.asarray(omega, dtype=float))

    def scattering(self, omega) -> np.ndarray:
        """3x3 S-matrix at real angular frequency ``omega`` (scalar or array)."""
        s = 1j * np.asarray(omega, dtype=float)
        return compose_three_port(self.signal.s_params(s), self.pump.s_params(s))
