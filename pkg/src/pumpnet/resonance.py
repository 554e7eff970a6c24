"""Eigenmodes of the dipole inductance in series with its Thevenin impedance.

A mode is a complex root ``s_a = j*omega_a - kappa_a/2`` of
``Z_th(s) + s*L_J = 0``. ``zth`` arguments are callables accepting a
complex frequency (scalar or array) and returning the impedance in ohms.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ClampWarning, FitQualityError, NonConvergenceError, NonphysicalDerivativeError

TWO_PI = 2.0 * math.pi
DEFAULT_WINDOW = (TWO_PI * 1e9, TWO_PI * 20e9)
RESIDUAL_TOL = 1e-10
DEDUP_RTOL = 1e-6
DERIV_RSTEP = 1e-6


@dataclass(frozen=True)
class ModeSummary:
    omega: float
    kappa: float
    p_j: float
    kappa_signal: float = float("nan")
    kappa_pump: float = float("nan")
    residual: float = 0.0

    @property
    def q(self) -> float:
        return self.omega / self.kappa if self.kappa > 0 else math.inf

    @property
    def s(self) -> complex:
        return complex(-0.5 * self.kappa, self.omega)


@dataclass(frozen=True)
class FosterPole:
    capacitance: float
    inductance: float
    resistance: float

    @property
    def omega(self) -> float:
        return 1.0 / math.sqrt(self.inductance * self.capacitance)

    def admittance(self, s):
        g = 0.0 if math.isinf(self.resistance) else 1.0 / self.resistance
        return s * self.capacitance + 1.0 / (s * self.inductance) + g


@dataclass(frozen=True)
class FosterFit:
    poles: tuple
    residual: float

    def impedance(self, s):
        s = np.asarray(s, dtype=np.complex128)
        return sum(1.0 / p.admittance(s) for p in self.poles)


def fourier_derivative(f: Callable, omega: float, rel_step: float = DERIV_RSTEP):
    """d f(j w)/d w by a central difference with one Richardson refinement."""
    h = abs(omega) * rel_step
    w = np.array([omega - h, omega + h, omega - 0.5 * h, omega + 0.5 * h])
    v = f(1j * w)
    d1 = (v[1] - v[0]) / (2 * h)
    d2 = (v[3] - v[2]) / h
    return (4.0 * d2 - d1) / 3.0


def _normalized(zth, l_j):
    def f(s):
        return zth(s) / (s * l_j) + 1.0
    return f


def newton_root(zth: Callable, l_j: float, s0: complex, maxiter: int = 100) -> tuple[complex, float]:
    """Damped complex Newton on ``Z_th(s)/(s L_J) + 1``.

    Returns ``(root, residual)``; raises :class:`NonConvergenceError` with the
    best point found if the residual never drops below ``RESIDUAL_TOL``.
    """
    f = _normalized(zth, l_j)
    s = complex(s0)
    fs = complex(f(s))
    best, best_res = s, abs(fs)
    for _ in range(maxiter):
        if abs(fs) < 1e-14:
            break
        h = abs(s) * DERIV_RSTEP
        df = (complex(f(s + h)) - complex(f(s - h))) / (2 * h)
        if df == 0 or not np.isfinite(df):
            break
        step = fs / df
        lam = 1.0
        while True:
            s_new = s - lam * step
            try:
                f_new = complex(f(s_new))
            except (ArithmeticError, ValueError):
                f_new = complex(math.inf)
            if np.isfinite(f_new) and abs(f_new) < abs(fs):
                break
            lam *= 0.5
            if lam < 1e-6:
                break
        if not (np.isfinite(f_new) and abs(f_new) < abs(fs)):
            break
        s, fs = s_new, f_new
        if abs(fs) < best_res:
            best, best_res = s, abs(fs)
        if abs(lam * step) < 1e-15 * abs(s):
            break
    if best_res >= RESIDUAL_TOL:
        raise NonConvergenceError(
            f"Newton did not converge from s0={s0}: best residual {best_res:.3g} at {best}",
            best=best, residual=best_res)
    return best, best_res


def crossing_seeds(zth: Callable, l_j: float, window=DEFAULT_WINDOW, n_grid: int = 2001):
    """Frequencies where ``Im Z_th + w L_J`` rises through zero on a real grid.

    Falling crossings are poles of ``Z_th`` (reactance jumps from +inf to
    -inf), not modes, and are skipped.
    """
    lo, hi = window
    w = np.geomspace(lo, hi, n_grid)
    with np.errstate(all="ignore"):
        z = np.asarray(zth(1j * w))
    g = z.imag + w * l_j
    ok = np.isfinite(g[:-1]) & np.isfinite(g[1:])
    idx = np.nonzero(ok & (g[:-1] < 0) & (g[1:] >= 0))[0]
    seeds = []
    for i in idx:
        frac = -g[i] / (g[i + 1] - g[i])
        wc = w[i] + frac * (w[i + 1] - w[i])
        slope = (g[i + 1] - g[i]) / (w[i + 1] - w[i])  # ~ L_J + Im Z'
        re = 0.5 * (z[i].real + z[i + 1].real)
        kappa0 = 2.0 * re / slope if slope > 0 else 0.0
        kappa0 = min(max(kappa0, 0.0), wc)
        seeds.append(complex(-0.5 * kappa0, wc))
    return seeds


def find_roots(zth: Callable, l_j: float, window=DEFAULT_WINDOW, n_grid: int = 2001):
    """All complex roots seeded inside ``window`` (rad/s), ascending in omega."""
    roots = []
    for s0 in crossing_seeds(zth, l_j, window, n_grid):
        try:
            s, res = newton_root(zth, l_j, s0)
        except NonConvergenceError as exc:
            warnings.warn(str(exc), RuntimeWarning, stacklevel=2)
            continue
        if not (window[0] <= s.imag <= window[1]):
            continue
        if any(abs(s - r) < DEDUP_RTOL * abs(r) for r, _ in roots):
            continue
        roots.append((s, res))
    roots.sort(key=lambda t: t[0].imag)
    return roots


def participation(dzth_imag: float, l_j: float) -> float:
    """Josephson inductive participation ``2 / (1 + Im Z_th'[w_a] / L_J)``."""
    den = 1.0 + dzth_imag / l_j
    if not den > 0:
        raise NonphysicalDerivativeError(
            f"1 + Im Z'/L_J = {den:.6g} <= 0; impedance model is not a passive reactance here")
    return 2.0 / den


def participation_at(zth: Callable, omega: float, l_j: float) -> float:
    return participation(float(np.imag(fourier_derivative(zth, omega))), l_j)


def partial_port_rates(re_z_signal: float, re_z_pump: float, p_j: float, l_j: float):
    """Split the mode damping between the ports: ``kappa_port = p_J Re Z_port / L_J``."""
    out = []
    for name, re in (("signal", re_z_signal), ("pump", re_z_pump)):
        if re < 0:
            if re < -1e-9:
                warnings.warn(f"Re Z_{name} = {re:.3g} ohm < 0 clamped to 0", ClampWarning, stacklevel=2)
            re = 0.0
        out.append(p_j * re / l_j)
    return tuple(out)


def find_modes(zth: Callable, l_j: float, window=DEFAULT_WINDOW, *, n_grid: int = 2001,
               z_signal: Callable | None = None, z_pump: Callable | None = None) -> list[ModeSummary]:
    """Locate, polish and characterize every mode in ``window``.

    When the two output impedances are supplied, per-port damping rates are
    filled in. ``p_J Re Z_port / L_J`` only sums to the exact ``kappa`` up to
    O((kappa/omega)^2), so the exact ``kappa`` is split in proportion to
    ``Re Z_port`` instead; the two agree to that order.
    """
    return [characterize(zth, l_j, s, res, z_signal=z_signal, z_pump=z_pump)
            for s, res in find_roots(zth, l_j, window, n_grid)]


def characterize(zth: Callable, l_j: float, s: complex, residual: float = 0.0, *,
                 z_signal: Callable | None = None, z_pump: Callable | None = None) -> ModeSummary:
    """Build the :class:`ModeSummary` of an already polished root ``s``."""
    omega = s.imag
    kappa = -2.0 * s.real
    p = participation_at(zth, omega, l_j)
    ks = kp = float("nan")
    if z_signal is not None and z_pump is not None:
        ks, kp = partial_port_rates(float(np.real(z_signal(1j * omega))),
                                    float(np.real(z_pump(1j * omega))), p, l_j)
        total = ks + kp
        if total > 0:
            ks, kp = kappa * ks / total, kappa * kp / total
    return ModeSummary(omega, kappa, p, ks, kp, residual)


def approx_mode_fourier(zth: Callable, l_j: float, omega_guess: float,
                        maxiter: int = 20, rtol: float = 1e-10) -> tuple[float, float]:
    """Fixed-point solution of the first-order (real-frequency) resonance conditions.

    Solves ``Im Z[w] = -(w L + (k/2) Re Z'[w])`` and
    ``Re Z[w] = (k/2)(L + Im Z'[w])`` starting from ``k = 0``.
    """
    def zw(w):
        return complex(zth(1j * w))

    def dz(w):
        return complex(fourier_derivative(zth, w))

    omega, kappa = float(omega_guess), 0.0
    for _ in range(maxiter):
        k = kappa

        def g(w):
            return zw(w).imag + w * l_j + 0.5 * k * dz(w).real

        delta = 1e-3
        while True:
            a, b = omega * (1 - delta), omega * (1 + delta)
            ga, gb = g(a), g(b)
            if ga * gb <= 0:
                break
            delta *= 2
            if delta > 0.5:
                raise NonConvergenceError(
                    f"lost the reactance crossing near {omega:.6g} rad/s; use find_modes instead",
                    best=(omega, kappa))
        w_new = brentq(g, a, b, xtol=1e-15 * omega, rtol=1e-15, maxiter=200)
        d = dz(w_new)
        den = l_j + d.imag
        if den <= 0:
            raise NonphysicalDerivativeError(f"L_J + Im Z' = {den:.3g} <= 0")
        k_new = 2.0 * zw(w_new).real / den
        done = (abs(w_new - omega) <= rtol * abs(w_new)
                and abs(k_new - kappa) <= rtol * max(abs(k_new), 1e-12 * w_new))
        omega, kappa = w_new, k_new
        if done:
            return omega, kappa
    raise NonConvergenceError(
        f"fixed point did not converge in {maxiter} iterations; use find_modes (exact root) instead",
        best=(omega, kappa))


def embedding_admittance(zth: Callable, l_j: float) -> Callable:
    """``Y(s) = 1/(s L_J) + 1/Z_th(s)`` of the dipole inductance in parallel with its embedding."""
    def y(s):
        return 1.0 / (s * l_j) + 1.0 / zth(s)
    return y


def foster_fit(y: Callable, modes: Sequence, window=None, n_grid: int = 801) -> FosterFit:
    """Local parallel-RLC fit of the admittance at each mode.

    ``modes`` holds :class:`ModeSummary` objects or ``(omega, kappa)`` pairs.
    The fitted tanks are combined in series (Foster form of ``1/Y``); the
    reported residual is ``max|Z_fit - 1/Y| / max|1/Y|`` over the window.
    """
    pairs = [(m.omega, m.kappa) if isinstance(m, ModeSummary) else (float(m[0]), float(m[1]))
             for m in modes]
    pairs.sort()
    for (w1, k1), (w2, k2) in zip(pairs, pairs[1:]):
        if w2 - w1 <= 10.0 * max(k1, k2):
            raise FitQualityError(
                f"modes at {w1:.4g} and {w2:.4g} rad/s overlap (spacing < 10 linewidths)",
                residual=math.inf)
    poles = []
    for w, _ in pairs:
        c = 0.5 * float(np.imag(fourier_derivative(y, w)))
        if not c > 0:
            raise FitQualityError(f"non-positive slope capacitance at {w:.4g} rad/s")
        g = float(np.real(y(1j * w)))
        r = 1.0 / g if g > 0 else math.inf
        poles.append(FosterPole(c, 1.0 / (w * w * c), r))
    if window is None:
        window = (0.5 * pairs[0][0], 1.5 * pairs[-1][0])
    w = np.linspace(window[0], window[1], n_grid)
    s = 1j * w
    fit = FosterFit(tuple(poles), 0.0)
    with np.errstate(all="ignore"):
        z_true = 1.0 / y(s)
        z_fit = fit.impedance(s)
    good = np.isfinite(z_true) & np.isfinite(z_fit)
    residual = float(np.max(np.abs(z_fit[good] - z_true[good])) / np.max(np.abs(z_true[good])))
    return FosterFit(tuple(poles), residual)
