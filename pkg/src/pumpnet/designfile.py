"""JSON design files: schema, parsing and serialization."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .dipole import JosephsonDipole, SnailArrayParams, snail_coefficients
from .errors import SchemaError
from .network import _KINDS, _LINE_KINDS, Ladder
from .synthesis import DEFAULT_RESTARTS, TOPOLOGIES, DesignTargets, FilterPrototype

VERSION = "1"
TWO_PI = 2.0 * math.pi

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_BAND = {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2}


def _element_schema():
    variants = []
    for kind, (_, key) in _KINDS.items():
        props = {"kind": {"const": kind}, key: _POS}
        if kind in _LINE_KINDS:
            props["delay_s"] = {"type": "number", "minimum": 0}
        variants.append({"type": "object", "properties": props, "required": sorted(props),
                         "additionalProperties": False})
    return {"oneOf": variants}


def _strict(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_NETWORK = {"oneOf": [
    _strict({"ladder": _strict({"elements": {"type": "array", "items": _element_schema(), "minItems": 1}},
                               ["elements"])}, ["ladder"]),
    _strict({"prototype": _strict({
        "topology": {"enum": sorted(TOPOLOGIES)},
        "params": {"type": "array", "items": _POS, "minItems": 1},
        "lower": {"type": "array", "items": _POS},
        "upper": {"type": "array", "items": _POS},
    }, ["topology", "params"])}, ["prototype"]),
]}

_DIPOLE = {"oneOf": [
    _strict({"l_j_h": _POS, "c3": _NUM, "n_loops": {"type": "integer", "minimum": 1}}, ["l_j_h", "c3"]),
    _strict({"snail": _strict({
        "m": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "ic_large_a": _POS,
        "ic_small_a": _POS,
        "phi_ext": _NUM,
    }, ["m", "n", "ic_large_a", "ic_small_a", "phi_ext"])}, ["snail"]),
]}

_WEIGHT_KEYS = ("omega", "kappa", "kappa_pump", "pump_rejection", "signal_rejection", "eta")

SCHEMA = _strict({
    "version": {"const": VERSION},
    "signal": _NETWORK,
    "pump": _NETWORK,
    "dipole": _DIPOLE,
    "targets": _strict({
        "omega0_hz": _POS,
        "kappa0_hz": _POS,
        "kappa_pump_max_hz": _POS,
        "signal_band_hz": _BAND,
        "pump_band_hz": _BAND,
        "pump_stopband_rejection_db": {"type": "number", "minimum": 0},
        "signal_rejection_db": {"type": "number", "minimum": 0},
        "eta_floor": {"type": "number", "minimum": 0},
        "weights": _strict({k: {"type": "number", "minimum": 0} for k in _WEIGHT_KEYS}),
    }),
    "analysis": _strict({
        "gain_db": _NUM,
        "eta_nl": _POS,
        "window_hz": _BAND,
        "detuning_hz": _POS,
    }),
    "sweeps": _strict({
        "flux": _strict({"start": _NUM, "stop": _NUM, "points": {"type": "integer", "minimum": 2}}),
        "gain": _strict({"span_hz": _POS, "points": {"type": "integer", "minimum": 2}}),
    }),
    "optimizer": _strict({
        "seed": {"type": "integer", "minimum": 0},
        "budget": {"type": "integer", "minimum": 100},
        "restarts": {"type": "integer", "minimum": 1},
    }),
}, ["version", "signal", "pump", "dipole"])


def _network_from(d) -> FilterPrototype:
    if "ladder" in d:
        return FilterPrototype.from_ladder(Ladder.from_dict(d["ladder"]))
    p = d["prototype"]
    return FilterPrototype(p["topology"], tuple(p["params"]), tuple(p.get("lower", ())), tuple(p.get("upper", ())))


def _network_to(p: FilterPrototype) -> dict:
    if p.topology == "ladder":
        return {"ladder": p.fixed.to_dict()}
    return {"prototype": {"topology": p.topology, "params": list(p.params),
                          "lower": list(p.lower), "upper": list(p.upper)}}


def _targets_from(d) -> DesignTargets:
    kw = {}
    for key, attr, scale in (("omega0_hz", "omega0_target", TWO_PI), ("kappa0_hz", "kappa0_target", TWO_PI),
                             ("kappa_pump_max_hz", "kappa_pump_max", TWO_PI),
                             ("pump_stopband_rejection_db", "pump_stopband_rejection_db", 1.0),
                             ("signal_rejection_db", "signal_rejection_db", 1.0), ("eta_floor", "eta_floor", 1.0)):
        if key in d:
            kw[attr] = d[key] * scale
    if "signal_band_hz" in d:
        kw["signal_band"] = tuple(d["signal_band_hz"])
    if "pump_band_hz" in d:
        kw["pump_band"] = tuple(d["pump_band_hz"])
    if "weights" in d:
        w = DesignTargets().weights
        w.update(d["weights"])
        kw["weights"] = w
    return DesignTargets(**kw)


def _targets_to(t: DesignTargets) -> dict:
    return {"omega0_hz": t.omega0_target / TWO_PI, "kappa0_hz": t.kappa0_target / TWO_PI,
            "kappa_pump_max_hz": t.kappa_pump_max / TWO_PI, "signal_band_hz": list(t.signal_band),
            "pump_band_hz": list(t.pump_band), "pump_stopband_rejection_db": t.pump_stopband_rejection_db,
            "signal_rejection_db": t.signal_rejection_db, "eta_floor": t.eta_floor, "weights": dict(t.weights)}


@dataclass
class DesignFile:
    signal: FilterPrototype
    pump: FilterPrototype
    dipole_spec: JosephsonDipole | SnailArrayParams
    targets: DesignTargets = field(default_factory=DesignTargets)
    analysis: dict = field(default_factory=dict)
    sweeps: dict = field(default_factory=dict)
    optimizer: dict = field(default_factory=dict)
    version: str = VERSION

    @property
    def snail(self) -> SnailArrayParams | None:
        return self.dipole_spec if isinstance(self.dipole_spec, SnailArrayParams) else None

    def dipole(self) -> JosephsonDipole:
        if isinstance(self.dipole_spec, SnailArrayParams):
            return snail_coefficients(self.dipole_spec)
        return self.dipole_spec

    @property
    def window(self):
        if "window_hz" in self.analysis:
            lo, hi = self.analysis["window_hz"]
            return (TWO_PI * lo, TWO_PI * hi)
        return self.targets.window

    @property
    def seed(self) -> int:
        return int(self.optimizer.get("seed", 0))

    @property
    def budget(self) -> int:
        return int(self.optimizer.get("budget", 5000))

    @property
    def restarts(self) -> int:
        return int(self.optimizer.get("restarts", DEFAULT_RESTARTS))

    @classmethod
    def from_dict(cls, d) -> "DesignFile":
        try:
            jsonschema.validate(d, SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise SchemaError(f"{path}: {exc.message}") from None
        try:
            dd = d["dipole"]
            if "snail" in dd:
                s = dd["snail"]
                spec = SnailArrayParams(s["m"], s["n"], s["ic_large_a"], s["ic_small_a"], s["phi_ext"])
            else:
                spec = JosephsonDipole(dd["l_j_h"], dd["c3"], n_loops=dd.get("n_loops", 1))
            return cls(_network_from(d["signal"]), _network_from(d["pump"]), spec,
                       _targets_from(d.get("targets", {})), dict(d.get("analysis", {})),
                       json.loads(json.dumps(d.get("sweeps", {}))), dict(d.get("optimizer", {})))
        except ValueError as exc:
            raise SchemaError(str(exc)) from None

    @classmethod
    def loads(cls, text: str) -> "DesignFile":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "DesignFile":
        return cls.loads(Path(path).read_text())

    def to_dict(self) -> dict:
        if isinstance(self.dipole_spec, SnailArrayParams):
            s = self.dipole_spec
            dip = {"snail": {"m": s.m, "n": s.n, "ic_large_a": s.ic_large, "ic_small_a": s.ic_small,
                             "phi_ext": s.phi_ext}}
        else:
            dip = {"l_j_h": self.dipole_spec.l_j, "c3": self.dipole_spec.c3, "n_loops": self.dipole_spec.n_loops}
        d = {"version": self.version, "signal": _network_to(self.signal), "pump": _network_to(self.pump),
             "dipole": dip, "targets": _targets_to(self.targets)}
        for key in ("analysis", "sweeps", "optimizer"):
            if getattr(self, key):
                d[key] = getattr(self, key)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"
