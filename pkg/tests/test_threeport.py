import math

import numpy as np
import pytest

from pumpnet.dipole import gamma3_linear
from pumpnet.errors import DegenerateCompositionError
from pumpnet.mna import dipole_voltage, three_port_circuit, three_port_s
from pumpnet.network import TwoPortResponse
from pumpnet.threeport import (Embedding, compose_three_port, dipole_wave_response, loaded_transfer,
                               thevenin_impedance)

from conftest import random_ladder

W = 2 * math.pi * 5e9
L_J = 1e-9


def embedding(sig, pump):
    return Embedding(TwoPortResponse(sig), TwoPortResponse(pump))


def test_composition_matches_nodal_oracle(rng):
    for _ in range(40):
        sig, pump = random_ladder(rng), random_ladder(rng)
        w = W * rng.uniform(0.3, 2.5)
        assert np.allclose(embedding(sig, pump).scattering(w), three_port_s(sig, pump, w), rtol=1e-9, atol=1e-9)


def test_lossless_composition_is_unitary(rng):
    for _ in range(30):
        emb = embedding(random_ladder(rng, lossless=True), random_ladder(rng, lossless=True))
        s3 = emb.scattering(W * rng.uniform(0.3, 2.5))
        assert np.allclose(s3.conj().T @ s3, np.eye(3), atol=1e-9)
        assert np.allclose(s3, s3.T)


def test_composition_broadcasts_over_frequency(rng):
    emb = embedding(random_ladder(rng), random_ladder(rng))
    w = W * np.linspace(0.5, 1.5, 7)
    batch = emb.scattering(w)
    assert batch.shape == (7, 3, 3)
    assert np.allclose(batch[3], emb.scattering(w[3]))


def test_thevenin_sum_equals_s33_form(rng):
    for _ in range(30):
        emb = embedding(random_ladder(rng), random_ladder(rng))
        w = W * rng.uniform(0.3, 2.5)
        z_sum = emb.zth_at(w)
        z_s33 = thevenin_impedance(emb.scattering(w), 50.0)
        assert z_sum == pytest.approx(z_s33, rel=1e-9)


def test_thevenin_needs_inputs():
    with pytest.raises(TypeError):
        thevenin_impedance()


@pytest.mark.parametrize("port", [0, 1])
def test_dipole_voltage_matches_nodal_oracle(rng, port):
    for _ in range(20):
        sig, pump = random_ladder(rng), random_ladder(rng)
        w = W * rng.uniform(0.3, 2.5)
        g3 = gamma3_linear(L_J, w, 50.0)
        _, v_j = dipole_wave_response(embedding(sig, pump).scattering(w), g3, port)
        c, nodes = three_port_circuit(sig, pump)
        ref = dipole_voltage(c, nodes, w, port, 1.0 / (1j * w * L_J))
        assert v_j == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_loaded_transfer_matches_nodal_oracle(rng):
    from pumpnet.mna import mna_solve
    for _ in range(20):
        sig, pump = random_ladder(rng), random_ladder(rng)
        w = W * rng.uniform(0.3, 2.5)
        s3 = embedding(sig, pump).scattering(w)
        c, (a, b) = three_port_circuit(sig, pump)
        c.add("L", a, b, L_J)
        ref = mna_solve(c, w)
        g3 = gamma3_linear(L_J, w, 50.0)
        for i in range(2):
            for j in range(2):
                assert loaded_transfer(s3, g3, i, j) == pytest.approx(ref[i, j], rel=1e-9, abs=1e-12)


def test_open_on_both_sides_is_degenerate():
    open_end = np.array([[0, 0], [0, 1]], dtype=complex)
    with pytest.raises(DegenerateCompositionError):
        compose_three_port(open_end, open_end)
