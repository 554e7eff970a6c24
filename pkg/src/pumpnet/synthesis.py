"""Filter prototypes for the two coupling networks and a restarted simplex optimizer."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .amplifier import Amplifier, DesignReport
from .dipole import JosephsonDipole, SnailArrayParams, snail_coefficients
from .errors import InfeasibleDesignError, NonConvergenceError, PumpnetError
from .network import Element, Ladder, TwoPortResponse
from .resonance import characterize, newton_root
from .threeport import Embedding

TWO_PI = 2.0 * math.pi
INFEASIBLE_PENALTY = 1e6
DEFAULT_FLUX = 0.3
PERTURB = 0.2
DEFAULT_RESTARTS = 5
MIN_BUDGET = 100
WINDOW_SPAN = (0.6, 1.4)  # mode search window relative to the target frequency
BAND_POINTS = 101
SIMPLEX_STEP = 0.05  # initial simplex edge in log-parameter units


@dataclass(frozen=True)
class DesignTargets:
    omega0_target: float = TWO_PI * 5e9
    kappa0_target: float = TWO_PI * 100e6
    kappa_pump_max: float = TWO_PI * 0.5e6
    signal_band: tuple = (4.8e9, 5.2e9)
    pump_band: tuple = (9.6e9, 10.4e9)
    pump_stopband_rejection_db: float = 20.0
    signal_rejection_db: float = 20.0
    eta_floor: float = 1.0
    weights: dict = field(default_factory=lambda: dict.fromkeys(
        ("omega", "kappa", "kappa_pump", "pump_rejection", "signal_rejection", "eta"), 1.0))

    def __post_init__(self):
        (s0, s1), (p0, p1) = self.signal_band, self.pump_band
        if not (0 < s0 < s1 and 0 < p0 < p1):
            raise ValueError("bands must be increasing positive intervals")
        if s1 >= p0 and p1 >= s0:
            raise ValueError("signal and pump bands overlap")

    @property
    def window(self):
        return (WINDOW_SPAN[0] * self.omega0_target, WINDOW_SPAN[1] * self.omega0_target)


def _lowpass_stub3(p):
    z_stub, z_line, s1, t1, s2, t2, s3, t3 = p
    return [Element("open_stub", z_stub, s1), Element("tline", z_line, t1),
            Element("open_stub", z_stub, s2), Element("tline", z_line, t2),
            Element("open_stub", z_stub, s3), Element("tline", z_line, t3)]


def _bandpass_cc3(p):
    c01, c12, c23, c3d, c1, c2, c3, l_res = p
    els = [Element("series_c", c01)]
    for cr, cc in ((c1, c12), (c2, c23), (c3, c3d)):
        els += [Element("shunt_l", l_res), Element("shunt_c", cr), Element("series_c", cc)]
    return els


def _cap_line(p):
    c, z, t = p
    return [Element("series_c", c), Element("tline", z, t)]


# name -> (builder, parameter names, default lower bounds, default upper bounds)
_C = (1e-16, 1e-11)
_Z = (5.0, 200.0)
_T = (1e-13, 2e-10)
_L = (1e-11, 1e-8)
TOPOLOGIES = {
    "lowpass_stub3": (_lowpass_stub3, ("z_stub", "z_line", "stub1", "line1", "stub2", "line2", "stub3", "line3"),
                      (_Z, _Z, _T, _T, _T, _T, _T, _T)),
    "bandpass_cc3": (_bandpass_cc3, ("c01", "c12", "c23", "c3d", "c_res1", "c_res2", "c_res3", "l_res"),
                     (_C, _C, _C, _C, _C, _C, _C, _L)),
    "cap_line": (_cap_line, ("c_couple", "z_line", "delay"), (_C, _Z, _T)),
}


@dataclass(frozen=True)
class FilterPrototype:
    """A parameterized coupling network.

    ``topology`` names an entry of :data:`TOPOLOGIES`; lines and stubs take an
    impedance (ohm) and a one-way delay (s), lumped values are in SI units.
    A prototype with ``topology == "ladder"`` wraps a fixed ladder and has no
    free parameters.
    """

    topology: str
    params: tuple = ()
    lower: tuple = ()
    upper: tuple = ()
    fixed: Ladder | None = None

    def __post_init__(self):
        if self.topology == "ladder":
            if self.fixed is None or self.params:
                raise ValueError("a fixed ladder prototype takes a ladder and no parameters")
            return
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        _, names, bounds = TOPOLOGIES[self.topology]
        params = tuple(float(v) for v in self.params)
        if len(params) != len(names):
            raise ValueError(f"{self.topology} takes {len(names)} parameters {names}")
        lower = tuple(float(v) for v in self.lower) if self.lower else tuple(b[0] for b in bounds)
        upper = tuple(float(v) for v in self.upper) if self.upper else tuple(b[1] for b in bounds)
        if len(lower) != len(names) or len(upper) != len(names):
            raise ValueError("bounds must match the parameter count")
        for v, lo, hi, n in zip(params, lower, upper, names):
            if not (0 < lo <= v <= hi):
                raise ValueError(f"{self.topology}.{n} = {v:g} outside [{lo:g}, {hi:g}]")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_ladder(cls, ladder: Ladder) -> "FilterPrototype":
        return cls("ladder", fixed=ladder)

    @property
    def names(self) -> tuple:
        return () if self.topology == "ladder" else TOPOLOGIES[self.topology][1]

    @property
    def n_params(self) -> int:
        return len(self.params)

    def ladder(self) -> Ladder:
        if self.topology == "ladder":
            return self.fixed
        return Ladder(TOPOLOGIES[self.topology][0](self.params))

    def with_params(self, values) -> "FilterPrototype":
        v = np.clip(np.asarray(values, dtype=float), self.lower, self.upper)
        return replace(self, params=tuple(float(x) for x in v))


def default_dipole(flux: float = DEFAULT_FLUX) -> JosephsonDipole:
    return snail_coefficients(SnailArrayParams(phi_ext=flux))


def _band_rejection_db(net: TwoPortResponse, band_hz) -> float:
    """Worst-case (smallest) insertion loss of ``net`` over a band, in dB."""
    w = TWO_PI * np.linspace(band_hz[0], band_hz[1], BAND_POINTS)
    t = np.abs(net.s_params(1j * w)[:, 1, 0])
    return float(np.min(-20.0 * np.log10(np.maximum(t, 1e-300))))


def evaluate_design(sig: FilterPrototype, pump: FilterPrototype, dipole: JosephsonDipole,
                    targets: DesignTargets | None = None, n_grid: int = 801) -> DesignReport:
    """Linear figures of a candidate design; no pump solve.

    The mode nearest the target frequency inside the search window is used.
    Designs with no mode there, or whose response cannot be evaluated, come
    back with ``feasible=False``.
    """
    t = targets or DesignTargets()
    try:
        ns, np_ = TwoPortResponse(sig.ladder()), TwoPortResponse(pump.ladder())
        amp = Amplifier(Embedding(ns, np_), dipole)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            mode = amp.mode_near(t.omega0_target, t.window, n_grid)
            if mode is None:
                return DesignReport(feasible=False, flags=["no mode in search window"])
            r = amp.linear_report(mode)
        r.pump_rejection_db = _band_rejection_db(ns, t.pump_band)
        r.signal_rejection_db = _band_rejection_db(np_, t.signal_band)
    except (PumpnetError, ArithmeticError, ValueError) as exc:
        return DesignReport(feasible=False, flags=[f"evaluation failed: {exc}"])
    values = (r.omega_a, r.kappa_a, r.kappa_pump, r.eta_pc, r.pump_rejection_db, r.signal_rejection_db)
    if not all(np.isfinite(values)):
        r.feasible = False
        r.flags.append("non-finite report field")
    return r


def penalty_terms(r: DesignReport, t: DesignTargets) -> dict:
    """Normalized squared violations, before weighting."""
    def hinge(x):
        return max(0.0, x) ** 2

    terms = {
        "omega": ((r.omega_a - t.omega0_target) / t.omega0_target) ** 2,
        "kappa": ((r.kappa_a - t.kappa0_target) / t.kappa0_target) ** 2,
        "kappa_pump": hinge(r.kappa_pump / t.kappa_pump_max - 1.0),
        "pump_rejection": 0.0,
        "signal_rejection": 0.0,
        "eta": hinge(1.0 - r.eta_pc / t.eta_floor) if t.eta_floor > 0 else 0.0,
    }
    if t.pump_stopband_rejection_db > 0:
        terms["pump_rejection"] = hinge(1.0 - r.pump_rejection_db / t.pump_stopband_rejection_db)
    if t.signal_rejection_db > 0:
        terms["signal_rejection"] = hinge(1.0 - r.signal_rejection_db / t.signal_rejection_db)
    return terms


def objective(r: DesignReport, t: DesignTargets) -> float:
    if not r.feasible:
        return INFEASIBLE_PENALTY
    terms = penalty_terms(r, t)
    return float(sum(t.weights.get(k, 1.0) * v for k, v in terms.items()))


def meets_targets(r: DesignReport, t: DesignTargets, omega_rtol: float = 0.01, kappa_rtol: float = 0.2) -> bool:
    """Frequency, linewidth and pump-port coupling within tolerance of the targets."""
    return (r.feasible
            and abs(r.omega_a - t.omega0_target) <= omega_rtol * t.omega0_target
            and abs(r.kappa_a - t.kappa0_target) <= kappa_rtol * t.kappa0_target
            and r.kappa_pump < t.kappa_pump_max)


@dataclass
class TraceRow:
    index: int
    restart: int
    penalty: float
    params: tuple


@dataclass
class RestartResult:
    restart: int
    start: tuple
    best: tuple
    penalty: float
    evaluations: int
    meets: bool


@dataclass
class OptimizationResult:
    signal: FilterPrototype
    pump: FilterPrototype
    report: DesignReport
    penalty: float
    trace: list
    restarts: list
    meets: bool

    def trace_csv(self) -> str:
        n = len(self.trace[0].params) if self.trace else 0
        head = ["index", "restart", "penalty"] + [f"x{i}" for i in range(n)]
        lines = [",".join(head)]
        for row in self.trace:
            vals = [str(row.index), str(row.restart), f"{row.penalty:.12g}"] + [f"{v:.12g}" for v in row.params]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


class _BudgetSpent(Exception):
    pass


class _Problem:
    """Joint log-parameter space of the two prototypes with a shared evaluation trace."""

    def __init__(self, sig, pump, dipole, targets):
        self.sig, self.pump, self.dipole, self.targets = sig, pump, dipole, targets
        self.ns = sig.n_params
        self.x0 = np.array(sig.params + pump.params, dtype=float)
        self.lo = np.log(np.array(sig.lower + pump.lower, dtype=float))
        self.hi = np.log(np.array(sig.upper + pump.upper, dtype=float))
        self.trace: list[TraceRow] = []

    def simplex(self, u, step=SIMPLEX_STEP):
        # steps point inward from whichever bound is nearer
        pts = [u]
        for i in range(u.size):
            v = u.copy()
            v[i] += step if u[i] + step <= self.hi[i] else -step
            pts.append(v)
        return np.array(pts)

    def split(self, u):
        x = np.exp(np.clip(u, self.lo, self.hi))
        return self.sig.with_params(x[:self.ns]), self.pump.with_params(x[self.ns:])

    def evaluate(self, u, restart):
        s, p = self.split(u)
        pen = objective(evaluate_design(s, p, self.dipole, self.targets), self.targets)
        self.trace.append(TraceRow(len(self.trace), restart, pen, s.params + p.params))
        return pen


def optimize(sig: FilterPrototype, pump: FilterPrototype, dipole: JosephsonDipole,
             targets: DesignTargets | None = None, budget: int = 5000, seed: int = 0,
             restarts: int = DEFAULT_RESTARTS, perturb: float = PERTURB) -> OptimizationResult:
    """Restarted bounded Nelder-Mead in log-parameter space.

    The initial design is evaluated once, then each restart begins from a
    log-uniform perturbation of it by up to ``perturb``. Restarts share the
    evaluation budget in order; budget a restart leaves unused passes on to
    the next. Raises :class:`InfeasibleDesignError` carrying the best result
    when no restart meets the targets.
    """
    t = targets or DesignTargets()
    if budget < MIN_BUDGET:
        raise ValueError(f"budget must be >= {MIN_BUDGET}")
    if restarts < 1:
        raise ValueError("need at least one restart")
    prob = _Problem(sig, pump, dipole, t)
    if prob.x0.size == 0:
        raise ValueError("nothing to optimize: both networks are fixed ladders")
    rng = np.random.default_rng(seed)
    u0 = np.log(prob.x0)
    best_u, best_pen = u0, prob.evaluate(u0, -1)
    remaining = budget - 1
    results = []
    for k in range(restarts):
        start = np.clip(u0 + rng.uniform(math.log(1 - perturb), math.log(1 + perturb), u0.size), prob.lo, prob.hi)
        alloc = remaining // (restarts - k)
        used0 = len(prob.trace)
        state = {"u": start, "pen": math.inf}

        def f(u, k=k, alloc=alloc, used0=used0, state=state):
            if len(prob.trace) - used0 >= alloc:
                raise _BudgetSpent
            pen = prob.evaluate(u, k)
            if pen < state["pen"]:
                state["u"], state["pen"] = np.clip(u, prob.lo, prob.hi), pen
            return pen

        if alloc > 0:
            try:
                minimize(f, start, method="Nelder-Mead", bounds=list(zip(prob.lo, prob.hi)),
                         options={"maxfev": alloc + u0.size + 2, "xatol": 1e-7, "fatol": 1e-14, "adaptive": True,
                                  "initial_simplex": prob.simplex(start)})
            except _BudgetSpent:
                pass
        used = len(prob.trace) - used0
        remaining -= used
        s, p = prob.split(state["u"])
        rep = evaluate_design(s, p, dipole, t)
        results.append(RestartResult(k, tuple(np.exp(start)), s.params + p.params, state["pen"], used,
                                     meets_targets(rep, t)))
        if state["pen"] < best_pen:
            best_u, best_pen = state["u"], state["pen"]
    s, p = prob.split(best_u)
    rep = evaluate_design(s, p, dipole, t)
    out = OptimizationResult(s, p, rep, best_pen, prob.trace, results, meets_targets(rep, t))
    if not any(r.meets for r in results) and not out.meets:
        raise InfeasibleDesignError("no restart met the design targets", closest=out)
    return out


@dataclass(frozen=True)
class FluxPoint:
    phi_ext: float
    omega_a: float
    kappa_a: float
    p_j: float

    @property
    def is_gap(self) -> bool:
        return not math.isfinite(self.omega_a)


def flux_sweep(sig: FilterPrototype, pump: FilterPrototype, snail: SnailArrayParams, fluxes,
               targets: DesignTargets | None = None) -> list[FluxPoint]:
    """Track the target mode across external flux.

    Each point is polished from the previous root; the first point, and any
    point after a gap, is found by a window search nearest the target.
    """
    t = targets or DesignTargets()
    emb = Embedding(TwoPortResponse(sig.ladder()), TwoPortResponse(pump.ladder()))
    rows = []
    prev = None
    for phi in sorted(float(f) for f in fluxes):
        dip = snail_coefficients(snail.with_flux(phi))
        amp = Amplifier(emb, dip)
        mode = None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if prev is not None:
                try:
                    root, res = newton_root(emb.zth, dip.l_j, prev)
                    if t.window[0] <= root.imag <= t.window[1]:
                        mode = characterize(emb.zth, dip.l_j, root, res)
                except NonConvergenceError:
                    mode = None
            if mode is None:
                mode = amp.mode_near(t.omega0_target if prev is None else prev.imag, t.window)
        if mode is None:
            rows.append(FluxPoint(phi, math.nan, math.nan, math.nan))
            prev = None
        else:
            rows.append(FluxPoint(phi, mode.omega, mode.kappa, mode.p_j))
            prev = mode.s
    return rows
