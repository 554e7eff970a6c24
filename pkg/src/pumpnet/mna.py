"""Brute-force nodal analysis used as an independent oracle.

Nothing here shares code with the ABCD cascade path: lines are stamped from
their admittance parameters, stubs are real line sections with an open or
shorted far end, and ports are Norton-equivalent matched sources. The solver
is deliberately simple and dense; it is meant for tests and cross-checks.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedCircuitError
from .network import Ladder

GROUND = 0
_COND_LIMIT = 1e14


@dataclass
class Port:
    plus: int
    minus: int
    z0: float = 50.0


@dataclass
class Circuit:
    """Mutable element graph. Node 0 is ground."""

    n_nodes: int = 1
    branches: list = field(default_factory=list)  # (kind, n1, n2, value)
    lines: list = field(default_factory=list)  # (a, b, c, d, z0, delay)
    ports: list = field(default_factory=list)

    def node(self) -> int:
        self.n_nodes += 1
        return self.n_nodes - 1

    def add(self, kind: str, n1: int, n2: int, value: float):
        if kind not in ("R", "L", "C"):
            raise ValueError(kind)
        self.branches.append((kind, n1, n2, float(value)))

    def add_line(self, a, b, c, d, z0, delay):
        """Lossless line: input terminals (a, b), output terminals (c, d)."""
        self.lines.append((a, b, c, d, float(z0), float(delay)))

    def add_port(self, plus, minus=GROUND, z0=50.0) -> int:
        self.ports.append(Port(plus, minus, z0))
        return len(self.ports) - 1

    def add_ladder(self, ladder: Ladder, n_in: int) -> int:
        """Stamp a ground-referenced ladder starting at ``n_in``; returns its far node."""
        n = n_in
        for e in ladder:
            k = e.kind
            if k.startswith("series_"):
                m = self.node()
                self.add(k[-1].upper(), n, m, e.value)
                n = m
            elif k.startswith("shunt_"):
                self.add(k[-1].upper(), n, GROUND, e.value)
            elif k == "tline" and e.delay == 0.0:
                continue
            elif k == "tline":
                m = self.node()
                self.add_line(n, GROUND, m, GROUND, e.value, e.delay)
                n = m
            elif k == "open_stub" and e.delay == 0.0:
                continue
            elif k == "open_stub":
                self.add_line(n, GROUND, self.node(), GROUND, e.value, e.delay)
            elif k == "short_stub":
                self.add_line(n, GROUND, GROUND, GROUND, e.value, e.delay)
            else:  # pragma: no cover
                raise ValueError(k)
        return n


def _stamp(Y, i, j, y):
    # admittance y between nodes i and j (ground rows dropped)
    if i:
        Y[i - 1, i - 1] += y
    if j:
        Y[j - 1, j - 1] += y
    if i and j:
        Y[i - 1, j - 1] -= y
        Y[j - 1, i - 1] -= y


def _stamp_twoport(Y, nodes, y2):
    # y2 relates currents into (a, c) to port voltages (V_a - V_b, V_c - V_d)
    a, b, c, d = nodes
    pairs = ((a, b), (c, d))
    for p, (pp, pm) in enumerate(pairs):
        for q, (qp, qm) in enumerate(pairs):
            y = y2[p, q]
            for row, sr in ((pp, 1), (pm, -1)):
                for col, sc in ((qp, 1), (qm, -1)):
                    if row and col:
                        Y[row - 1, col - 1] += sr * sc * y


def nodal_matrix(circuit: Circuit, s: complex, with_ports: bool = True) -> np.ndarray:
    n = circuit.n_nodes - 1
    Y = np.zeros((n, n), dtype=np.complex128)
    for kind, n1, n2, v in circuit.branches:
        if kind == "R":
            y = 1.0 / v
        elif kind == "L":
            y = 1.0 / (s * v)
        else:
            y = s * v
        _stamp(Y, n1, n2, y)
    for a, b, c, d, z0, delay in circuit.lines:
        x = s * delay
        y11 = 1.0 / (z0 * cmath.tanh(x))
        y12 = -1.0 / (z0 * cmath.sinh(x))
        _stamp_twoport(Y, (a, b, c, d), np.array([[y11, y12], [y12, y11]]))
    if with_ports:
        for p in circuit.ports:
            _stamp(Y, p.plus, p.minus, 1.0 / p.z0)
    return Y


def _solve(Y, rhs):
    if not np.all(np.isfinite(Y)):
        raise IllConditionedCircuitError("nodal matrix has non-finite entries")
    cond = np.linalg.cond(Y)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise IllConditionedCircuitError(f"nodal matrix condition number {cond:.3g}")
    return np.linalg.solve(Y, rhs)


def _port_voltages(circuit, V):
    full = np.concatenate([[0.0], V]) if V.ndim == 1 else np.vstack([np.zeros((1, V.shape[1])), V])
    return np.array([full[p.plus] - full[p.minus] for p in circuit.ports])


def _norton_rhs(circuit, k, amplitude=1.0):
    # EMF 2a behind z0 -> current 2a/z0 into the plus node
    n = circuit.n_nodes - 1
    rhs = np.zeros(n, dtype=np.complex128)
    p = circuit.ports[k]
    i = 2.0 * amplitude / p.z0
    if p.plus:
        rhs[p.plus - 1] += i
    if p.minus:
        rhs[p.minus - 1] -= i
    return rhs


def mna_solve(circuit: Circuit, omega: float | None = None, s: complex | None = None) -> np.ndarray:
    """Full S-matrix (voltage-wave convention) of the circuit's ports."""
    if s is None:
        s = 1j * omega
    Y = nodal_matrix(circuit, s)
    nport = len(circuit.ports)
    rhs = np.stack([_norton_rhs(circuit, k) for k in range(nport)], axis=1)
    V = _solve(Y, rhs)
    S = _port_voltages(circuit, V)
    return S - np.eye(nport)


def dipole_voltage(circuit: Circuit, nodes, omega: float, drive_port: int, load_admittance=0.0) -> complex:
    """Voltage across ``nodes`` for unit incident wave at ``drive_port``.

    ``load_admittance`` is stamped between the two nodes (e.g. ``1/(j w L_J)``).
    """
    Y = nodal_matrix(circuit, 1j * omega)
    _stamp(Y, nodes[0], nodes[1], load_admittance)
    V = np.concatenate([[0.0], _solve(Y, _norton_rhs(circuit, drive_port))])
    return complex(V[nodes[0]] - V[nodes[1]])


def two_tone_solve(circuit: Circuit, nodes, l_j: float, c3: float, phi_p: complex,
                   omega_s: float, omega_i: float, drive_port: int = 0):
    """Solve the signal and conjugate-idler nodal equations jointly.

    The dipole between ``nodes`` (plus, minus) is the pumped inductance
    linearized around a fixed pump phase ``phi_p``: its small-signal
    current couples ``V_s`` and ``conj(V_i)`` through the three-wave term.
    The dipole must not also be present in ``circuit``.

    Returns ``(b_signal, b_idler)``: outgoing wave amplitudes at every port
    for a unit incident signal wave at ``drive_port``.
    """
    n = circuit.n_nodes - 1
    Ys = nodal_matrix(circuit, 1j * omega_s)
    Yi = np.conj(nodal_matrix(circuit, 1j * omega_i))
    big = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    big[:n, :n] = Ys
    big[n:, n:] = Yi
    a = 0.5 * c3 * phi_p
    # (I_s, I_i*) = 1/(jL) [[1/ws, -a/wi], [a*/ws, -1/wi]] (V_s, V_i*)
    coupling = np.array([[1.0 / omega_s, -a / omega_i],
                         [np.conj(a) / omega_s, -1.0 / omega_i]]) / (1j * l_j)
    p, m = nodes
    for bi in range(2):
        for bj in range(2):
            y = coupling[bi, bj]
            for row, sr in ((p, 1), (m, -1)):
                for col, sc in ((p, 1), (m, -1)):
                    if row and col:
                        big[bi * n + row - 1, bj * n + col - 1] += sr * sc * y
    rhs = np.concatenate([_norton_rhs(circuit, drive_port), np.zeros(n, dtype=np.complex128)])
    x = _solve(big, rhs)
    vs = _port_voltages(circuit, x[:n])
    vi = np.conj(_port_voltages(circuit, x[n:]))
    b_signal = vs - np.eye(len(circuit.ports))[drive_port]
    return b_signal, vi


def three_port_circuit(signal: Ladder, pump: Ladder, z0: float = 50.0):
    """Assemble the series-dipole embedding: returns ``(circuit, dipole_nodes)``.

    Ports 0 and 1 are the signal and pump ports. The dipole nodes are the
    far ends of the two ladders; ``dipole_nodes[0]`` is on the signal side.
    """
    c = Circuit()
    n1 = c.node()
    n2 = c.node()
    c.add_port(n1, GROUND, z0)
    c.add_port(n2, GROUND, z0)
    a = c.add_ladder(signal, n1)
    b = c.add_ladder(pump, n2)
    return c, (a, b)


def three_port_s(signal: Ladder, pump: Ladder, omega: float, z0: float = 50.0) -> np.ndarray:
    """3x3 S-matrix with the dipole terminals as port 3 (plus on the signal side)."""
    c, (a, b) = three_port_circuit(signal, pump, z0)
    c.add_port(a, b, z0)
    return mna_solve(c, omega)
