"""Regenerate the shipped reference designs from hand-tuned starting points.

Run from the repository root: ``python scripts/freeze_reference.py``.
"""
import sys
from pathlib import Path

from pumpnet.designfile import DesignFile
from pumpnet.dipole import SnailArrayParams
from pumpnet.synthesis import DesignTargets, FilterPrototype, optimize

DATA = Path(__file__).resolve().parents[1] / "src" / "pumpnet" / "data"

FILTERED_START = (
    FilterPrototype("lowpass_stub3", (18.12, 117.4, 14.01e-12, 26.91e-12, 9.806e-12, 17.16e-12,
                                      29.34e-12, 4.871e-12)),
    FilterPrototype("bandpass_cc3", (18.42e-15, 87.34e-15, 28.05e-15, 547.2e-15, 484.3e-15, 480.1e-15,
                                     386.1e-15, 0.5e-9)),
)
CAPACITIVE_START = (
    FilterPrototype("cap_line", (177.5e-15, 29.77, 61.97e-12)),
    FilterPrototype("cap_line", (20.74e-15, 30.19, 17.00e-12)),
)
FILTERED_TARGETS = DesignTargets(pump_stopband_rejection_db=40.0)
CAPACITIVE_TARGETS = DesignTargets(kappa_pump_max=2 * 3.141592653589793 * 1e6, pump_stopband_rejection_db=0.0,
                                   signal_rejection_db=0.0, eta_floor=0.0)
COMMON = dict(analysis={"gain_db": 20.0, "eta_nl": 0.1},
              sweeps={"flux": {"start": 0.0, "stop": 0.5, "points": 11}, "gain": {"span_hz": 200e6, "points": 401}},
              optimizer={"seed": 0, "budget": 5000, "restarts": 5})


def freeze(name, start, targets):
    spec = SnailArrayParams()
    df = DesignFile(start[0], start[1], spec, targets, **COMMON)
    res = optimize(df.signal, df.pump, df.dipole(), targets, budget=df.budget, seed=df.seed)
    out = DesignFile(res.signal, res.pump, spec, targets, **COMMON)
    (DATA / name).write_text(out.dumps())
    r = res.report
    print(name, res.penalty, r.omega_a / 6.283185307179586e9, r.kappa_a / 6.283185307179586e6,
          r.kappa_pump / 6.283185307179586e6, r.eta_pc, file=sys.stderr)


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    freeze("filtered_reference.json", FILTERED_START, FILTERED_TARGETS)
    freeze("capacitive_reference.json", CAPACITIVE_START, CAPACITIVE_TARGETS)
