"""Lumped and ideal-line two-port ladders and their ABCD/S/Z responses.

All frequencies are complex Laplace frequencies ``s = sigma + j*omega`` in
rad/s. A real-frequency evaluation is simply ``s = 1j * omega``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ConversionError, SchemaError, SingularityError

Z0_DEFAULT = 50.0

# netlist kind -> (kernel code, json value key)
_KINDS = {
    "series_l": (kernels.SERIES_L, "henries"),
    "series_c": (kernels.SERIES_C, "farads"),
    "series_r": (kernels.SERIES_R, "ohms"),
    "shunt_l": (kernels.SHUNT_L, "henries"),
    "shunt_c": (kernels.SHUNT_C, "farads"),
    "shunt_r": (kernels.SHUNT_R, "ohms"),
    "tline": (kernels.TLINE, "z0_ohm"),
    "open_stub": (kernels.OPEN_STUB, "z0_ohm"),
    "short_stub": (kernels.SHORT_STUB, "z0_ohm"),
}
_LINE_KINDS = ("tline", "open_stub", "short_stub")
ELEMENT_KINDS = tuple(_KINDS)


@dataclass(frozen=True)
class ComplexFrequency:
    """Laplace frequency split into decay (``sigma = -kappa/2``) and angular frequency."""

    sigma: float
    omega: float

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.omega)

    @classmethod
    def from_s(cls, s: complex) -> "ComplexFrequency":
        return cls(float(np.real(s)), float(np.imag(s)))


def _as_s(s):
    if isinstance(s, ComplexFrequency):
        return s.s
    return s


@dataclass(frozen=True)
class Element:
    """One ladder element.

    ``value`` is the inductance (H), capacitance (F) or resistance (ohm) for
    lumped kinds, and the characteristic impedance (ohm) for lines and stubs,
    whose one-way delay (s) goes in ``delay``.
    """

    kind: str
    value: float
    delay: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError(f"{self.kind}: value must be positive and finite, got {self.value!r}")
        if not (math.isfinite(self.delay) and self.delay >= 0):
            raise ValueError(f"{self.kind}: delay must be finite and >= 0, got {self.delay!r}")
        if self.kind not in _LINE_KINDS and self.delay != 0.0:
            raise ValueError(f"{self.kind} takes no delay")

    @property
    def code(self) -> int:
        return _KINDS[self.kind][0]

    @property
    def is_line(self) -> bool:
        return self.kind in _LINE_KINDS

    def to_dict(self) -> dict:
        key = _KINDS[self.kind][1]
        d = {"kind": self.kind, key: self.value}
        if self.is_line:
            d["delay_s"] = self.delay
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Element":
        if not isinstance(d, dict) or "kind" not in d:
            raise SchemaError(f"element must be an object with a 'kind': {d!r}")
        kind = d["kind"]
        if kind not in _KINDS:
            raise SchemaError(f"unknown element kind {kind!r}")
        key = _KINDS[kind][1]
        allowed = {"kind", key} | ({"delay_s"} if kind in _LINE_KINDS else set())
        extra = set(d) - allowed
        missing = allowed - set(d)
        if extra:
            raise SchemaError(f"{kind}: unknown keys {sorted(extra)}")
        if missing:
            raise SchemaError(f"{kind}: missing keys {sorted(missing)}")
        for k in allowed - {"kind"}:
            if isinstance(d[k], bool) or not isinstance(d[k], (int, float)):
                raise SchemaError(f"{kind}.{k} must be a number")
        try:
            return cls(kind, float(d[key]), float(d.get("delay_s", 0.0)))
        except ValueError as exc:
            raise SchemaError(str(exc)) from None


@dataclass(frozen=True)
class Ladder:
    """Ordered elements from the outer (matched) port toward the dipole side."""

    elements: tuple

    def __init__(self, elements: Iterable[Element]):
        elements = tuple(elements)
        if not elements:
            raise ValueError("a ladder needs at least one element")
        object.__setattr__(self, "elements", elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @cached_property
    def arrays(self):
        kinds = np.array([e.code for e in self.elements], dtype=np.int64)
        v1 = np.array([e.value for e in self.elements], dtype=np.float64)
        v2 = np.array([e.delay for e in self.elements], dtype=np.float64)
        return kinds, v1, v2

    def to_dict(self) -> dict:
        return {"elements": [e.to_dict() for e in self.elements]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Ladder":
        if not isinstance(d, dict) or set(d) != {"elements"}:
            raise SchemaError("netlist fragment must be an object with exactly the key 'elements'")
        if not isinstance(d["elements"], list) or not d["elements"]:
            raise SchemaError("'elements' must be a non-empty list")
        return cls(Element.from_dict(e) for e in d["elements"])

    @classmethod
    def from_json(cls, text: str) -> "Ladder":
        return cls.from_dict(json.loads(text))


def through() -> Ladder:
    """Zero-length matched line: an ideal through connection."""
    return Ladder([Element("tline", Z0_DEFAULT, 0.0)])


def abcd_of_element(e: Element, s) -> np.ndarray:
    """ABCD matrix of a single element at complex frequency ``s``."""
    s = np.asarray(_as_s(s), dtype=np.complex128)
    kinds = np.array([e.code], dtype=np.int64)
    m = kernels.ladder_abcd(kinds, np.array([e.value]), np.array([e.delay]), s.reshape(-1))
    if not np.all(np.isfinite(m)):
        raise SingularityError(f"{e.kind} is singular at s={s}", element_index=0)
    return m.reshape(s.shape + (2, 2))


def cascade(*mats) -> np.ndarray:
    """Matrix product of ABCD matrices (broadcast over leading axes)."""
    if not mats:
        raise ValueError("cascade needs at least one matrix")
    out = np.asarray(mats[0], dtype=np.complex128)
    for m in mats[1:]:
        m = np.asarray(m, dtype=np.complex128)
        if not (np.all(np.isfinite(out)) and np.all(np.isfinite(m))):
            raise ValueError("cascade of non-finite ABCD matrices")
        out = out @ m
    return out


def abcd_to_s(m, z0: float = Z0_DEFAULT) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    den = a + b / z0 + c * z0 + d
    if np.any(den == 0) or not np.all(np.isfinite(den)):
        raise ConversionError("ABCD->S denominator is zero or non-finite")
    out = np.empty_like(m)
    out[..., 0, 0] = (a + b / z0 - c * z0 - d) / den
    out[..., 0, 1] = 2.0 * (a * d - b * c) / den
    out[..., 1, 0] = 2.0 / den
    out[..., 1, 1] = (-a + b / z0 - c * z0 + d) / den
    return out


def s_to_abcd(sm, z0: float = Z0_DEFAULT) -> np.ndarray:
    sm = np.asarray(sm, dtype=np.complex128)
    s11, s12, s21, s22 = sm[..., 0, 0], sm[..., 0, 1], sm[..., 1, 0], sm[..., 1, 1]
    if np.any(s21 == 0) or not np.all(np.isfinite(s21)):
        raise ConversionError("S->ABCD needs nonzero S21")
    den = 2.0 * s21
    x = s12 * s21
    out = np.empty_like(sm)
    out[..., 0, 0] = ((1 + s11) * (1 - s22) + x) / den
    out[..., 0, 1] = z0 * ((1 + s11) * (1 + s22) - x) / den
    out[..., 1, 0] = ((1 - s11) * (1 - s22) - x) / (den * z0)
    out[..., 1, 1] = ((1 - s11) * (1 + s22) + x) / den
    return out


INFINITE_IMPEDANCE = complex(math.inf, 0.0)


@dataclass(frozen=True)
class TwoPortResponse:
    """Frequency response of a ladder referenced to ``z0``.

    Port 1 is the outer port, port 2 faces the dipole. Methods accept a
    scalar or an array of complex frequencies.
    """

    ladder: Ladder
    z0: float = Z0_DEFAULT

    def abcd(self, s) -> np.ndarray:
        s = np.asarray(_as_s(s), dtype=np.complex128)
        kinds, v1, v2 = self.ladder.arrays
        m = kernels.ladder_abcd(kinds, v1, v2, s.reshape(-1))
        if not np.all(np.isfinite(m)):
            self._raise_singular(s.reshape(-1)[~np.all(np.isfinite(m), axis=(1, 2))][0])
        return m.reshape(s.shape + (2, 2))

    def _raise_singular(self, s):
        for i, e in enumerate(self.ladder):
            try:
                abcd_of_element(e, s)
            except SingularityError:
                raise SingularityError(f"element {i} ({e.kind}) is singular at s={s}", element_index=i) from None
        raise SingularityError(f"ladder response overflows at s={s}")

    def abcd_at(self, omega) -> np.ndarray:
        return self.abcd(1j * np.asarray(omega, dtype=float))

    def s_params(self, s) -> np.ndarray:
        return abcd_to_s(self.abcd(s), self.z0)

    def output_impedance(self, s):
        return output_impedance(self, s)


def output_impedance(net: TwoPortResponse, s):
    """Impedance seen from the dipole terminal with the outer port matched to ``z0``.

    Equals ``z0 (1 + r) / (1 - r)`` with ``r = S22``; returns
    :data:`INFINITE_IMPEDANCE` where ``r == 1`` exactly.
    """
    m = net.abcd(s)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    num = b + net.z0 * d
    den = a + net.z0 * c
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(den == 0, INFINITE_IMPEDANCE, num / np.where(den == 0, 1.0, den))
    if z.ndim == 0:
        return complex(z)
    return z


def ladder_from_pairs(pairs: Sequence[tuple]) -> Ladder:
    """Build a ladder from ``(kind, value[, delay])`` tuples."""
    return Ladder(Element(*p) for p in pairs)
