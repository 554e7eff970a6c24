import math
import warnings

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from pumpnet.amplifier import Amplifier
from pumpnet.designfile import DesignFile
from pumpnet.dipole import (PHI0, JosephsonDipole, OperatingPoint, PumpState, SnailArrayParams,
                            check_pump_phase, cross_admittance, gamma3_linear, gamma3_pumped, snail_coefficients,
                            snail_loop_coefficients, y_nl, y_nl_from_strength, y_nl_negative_conductance)
from pumpnet.errors import HystereticRegimeError, PumpPhaseWarning, UnreachableGainError
from pumpnet.mna import dipole_voltage, three_port_circuit, two_tone_solve
from pumpnet.network import Ladder, TwoPortResponse, ladder_from_pairs
from pumpnet.resonance import find_modes
from pumpnet.threeport import Embedding

from conftest import CAPACITIVE, FILTERED, TWO_PI, random_ladder

L_J = 1e-9
W = TWO_PI * 5e9


def amplifier(sig, pump, dipole):
    return Amplifier(Embedding(TwoPortResponse(sig), TwoPortResponse(pump)), dipole)


def reference(path):
    df = DesignFile.load(path)
    return df, amplifier(df.signal.ladder(), df.pump.ladder(), df.dipole())


# ---- SNAIL coefficients -------------------------------------------------

def test_snail_reference_flux_point():
    d = snail_coefficients(SnailArrayParams())
    assert d.l_j == pytest.approx(0.99892e-9, rel=1e-4)
    assert d.c3 == pytest.approx(-0.02152, rel=1e-3)
    assert d.n_loops == 10


def test_snail_inductance_span():
    p = SnailArrayParams()
    assert snail_coefficients(p.with_flux(0.0)).l_j == pytest.approx(0.790e-9, rel=2e-3)
    assert snail_coefficients(p.with_flux(0.5)).l_j == pytest.approx(1.282e-9, rel=2e-3)


@pytest.mark.parametrize("phi", [0.05, 0.17, 0.3, 0.42])
def test_snail_flux_symmetry_and_periodicity(phi):
    a, n = 0.8 / 10.1, 3
    _, c2, c3 = snail_loop_coefficients(a, n, phi)
    _, c2m, c3m = snail_loop_coefficients(a, n, 1.0 - phi)
    _, c2p, c3p = snail_loop_coefficients(a, n, phi + 1.0)
    assert c2m == pytest.approx(c2, rel=1e-10) and c3m == pytest.approx(-c3, rel=1e-8)
    assert c2p == pytest.approx(c2, rel=1e-10) and c3p == pytest.approx(c3, rel=1e-8)


@pytest.mark.parametrize("phi", [0.0, 0.5])
def test_snail_third_order_vanishes_at_symmetric_points(phi):
    assert abs(snail_coefficients(SnailArrayParams(phi_ext=phi)).c3) < 1e-12


@pytest.mark.parametrize("phi", [0.1, 0.3, 0.45])
def test_snail_array_matches_high_precision_finite_differences(phi):
    # independent oracle: minimize the summed array potential in mpmath and differentiate it
    mpmath.mp.dps = 40
    p = SnailArrayParams(phi_ext=phi)
    a, n, m = mpmath.mpf(p.alpha), p.n, p.m
    theta = 2 * mpmath.pi * mpmath.mpf(phi)

    def u_array(x):  # total phase x split evenly over m loops, energy in units of phi0*Ic_large
        y = x / m
        return m * (-a * mpmath.cos(y) - n * mpmath.cos((y - theta) / n))

    x0 = mpmath.findroot(lambda x: mpmath.diff(u_array, x), m * float(snail_loop_coefficients(p.alpha, n, phi)[0]))
    u2 = mpmath.diff(u_array, x0, 2)
    u3 = mpmath.diff(u_array, x0, 3)
    l_ref = PHI0 / (p.ic_large * float(u2))
    d = snail_coefficients(p)
    assert d.l_j == pytest.approx(l_ref, rel=1e-8)
    assert d.c3 == pytest.approx(float(u3 / u2), rel=1e-8)


def test_snail_hysteretic_regime_rejected():
    with pytest.raises(HystereticRegimeError):
        snail_coefficients(SnailArrayParams(ic_small=5e-6))


# ---- linear dipole port -------------------------------------------------

def test_gamma3_linear_limits():
    assert gamma3_linear(L_J, 1e-3) == pytest.approx(-1.0, abs=1e-9)
    assert gamma3_linear(L_J, 1e22) == pytest.approx(1.0, abs=1e-9)
    w = np.geomspace(1e6, 1e13, 50)
    assert np.allclose(np.abs(gamma3_linear(L_J, w)), 1.0)


# ---- three-wave mixing --------------------------------------------------

def test_cross_admittance_matches_harmonic_balance():
    # commensurate tones 3, 5, 8 sampled over one period; the quadratic
    # current-phase relation is exact, so FFT phasors give the bilinear map
    d = JosephsonDipole(L_J, c3=-0.07)
    w0 = TWO_PI * 0.6e9
    op = OperatingPoint(3 * w0, 8 * w0)
    phi_p = 0.3 * np.exp(0.7j)
    n = 256
    t = np.arange(n) * (TWO_PI / w0) / n
    y = cross_admittance(d, PumpState(op.omega_p, phi_p), op)
    rng = np.random.default_rng(7)
    for _ in range(3):
        phs, phi_i = 1e-3 * (rng.normal() + 1j * rng.normal()), 1e-3 * (rng.normal() + 1j * rng.normal())
        phase = np.real(phi_p * np.exp(1j * op.omega_p * t) + phs * np.exp(1j * op.omega_s * t)
                        + phi_i * np.exp(1j * op.omega_i * t))
        cur = (PHI0 / L_J) * (phase + 0.5 * d.c3 * phase ** 2)
        spec = 2 * np.fft.fft(cur) / n
        i_s, i_i = spec[3], spec[5]
        v_s, v_i = 1j * op.omega_s * PHI0 * phs, 1j * op.omega_i * PHI0 * phi_i
        got = y @ np.array([v_s, np.conj(v_i)])
        assert got[0] == pytest.approx(i_s, rel=1e-10)
        assert got[1] == pytest.approx(np.conj(i_i), rel=1e-10)


def test_cross_admittance_degenerate_tones():
    d = JosephsonDipole(L_J, c3=-0.05)
    op = OperatingPoint(W, 2 * W)
    y = cross_admittance(d, PumpState(op.omega_p, 0.2), op)
    assert y[0, 0] == pytest.approx(-y[1, 1])
    assert abs(y[0, 1]) == pytest.approx(abs(y[1, 0]))


def test_y_nl_matches_symbolic_idler_elimination():
    vs, vi, i_s, i_i, L, ws, wi, a, z = sp.symbols("V_s V_ic I_s I_ic L w_s w_i a Z_c")
    # rows of the bilinear map (conjugate idler quantities), idler closed by V_i + Z_th I_i = 0
    eqs = [sp.Eq(i_s, (vs / ws - a * vi / wi) / (sp.I * L)),
           sp.Eq(i_i, (sp.conjugate(a) * vs / ws - vi / wi) / (sp.I * L)),
           sp.Eq(vi + z * i_i, 0)]
    sol = sp.solve(eqs, [i_s, i_i, vi], dict=True)[0]
    y_total = sp.simplify(sol[i_s] / vs)
    vals = {L: 1.1e-9, ws: 0.97 * W, wi: 1.03 * W, a: 0.013 * sp.exp(sp.I * 0.4), z: 3.0 + 20.0j}
    y_ref = complex(sp.N(y_total.subs(vals))) - 1 / (1j * 1.1e-9 * 0.97 * W)
    strength = 0.013 ** 2
    got = y_nl_from_strength(1.1e-9, 0.97 * W, 1.03 * W, strength, np.conj(3.0 + 20.0j))
    assert complex(got) == pytest.approx(y_ref, rel=1e-10)


def test_y_nl_vanishes_without_pump():
    d = JosephsonDipole(L_J, c3=-0.05)
    op = OperatingPoint(0.99 * W, 2 * W)
    assert y_nl(d, PumpState(op.omega_p, 0.0), op, 5 - 30j) == 0


@pytest.mark.parametrize("r_series, max_err", [(0.1, 0.01), (3.0, 0.1)])
def test_y_nl_negative_conductance_limit(r_series, max_err):
    l_ext, c = 0.5e-9, 1e-12
    z = lambda s: r_series + s * l_ext + 1 / (s * c)
    m = find_modes(z, L_J)[0]
    pq = m.p_j * m.q
    assert pq > 100 if max_err == 0.01 else pq > 8
    w = m.omega
    got = y_nl_from_strength(L_J, w, w, 1e-4, z(1j * w))
    assert got.real < 0
    assert got.real == pytest.approx(y_nl_negative_conductance(L_J, w, 1e-4, pq), rel=max_err)


def test_y_nl_suppressed_off_idler_resonance():
    l_ext, c = 0.5e-9, 1e-12
    z = lambda s: 0.1 + s * l_ext + 1 / (s * c)
    m = find_modes(z, L_J)[0]
    on = abs(y_nl_from_strength(L_J, m.omega, m.omega, 1e-4, z(1j * m.omega)))
    wi = m.omega + 20 * m.kappa
    off = abs(y_nl_from_strength(L_J, m.omega, wi, 1e-4, z(1j * wi)))
    assert off < on / 10


def test_gamma3_pumped_example():
    # z0 * Y_total = -2 reflects with gain -3
    ws = W
    ynl = -2 / 50.0 - 1 / (1j * ws * L_J)
    assert gamma3_pumped(L_J, ynl, ws) == pytest.approx(-3.0)


@settings(max_examples=60, deadline=None)
@given(g=st.floats(-0.9, 5.0), b=st.floats(-5, 5))
def test_gamma3_pumped_exceeds_unity_only_with_negative_conductance(g, b):
    ws = W
    ynl = (g + 1j * b) / 50.0 - 1 / (1j * ws * L_J)
    mag = abs(gamma3_pumped(L_J, ynl, ws))
    if g < -1e-9:
        assert mag > 1
    elif g > 1e-9:
        assert mag < 1


def test_gamma3_pumped_grows_as_conductance_drops():
    # |Gamma| falls with conductance while g^2 < 1 + b^2
    gs = np.linspace(-0.95, 1.0, 200)
    mags = np.abs(gamma3_pumped(L_J, (gs + 0.4j) / 50.0 - 1 / (1j * W * L_J), W))
    assert np.all(np.diff(mags) < 0)


# ---- full signal path against the nodal two-tone solve ------------------

def _two_tone_case(rng, lossless):
    sig, pump = random_ladder(rng, lossless=lossless), random_ladder(rng, lossless=lossless)
    d = JosephsonDipole(rng.uniform(0.5e-9, 2e-9), c3=rng.uniform(-0.1, 0.1))
    wp = 2 * W * rng.uniform(0.6, 1.4)
    op = OperatingPoint(wp * rng.uniform(0.3, 0.48), wp)
    phi = rng.uniform(0.05, 0.8) * np.exp(1j * rng.uniform(0, TWO_PI))
    return sig, pump, d, op, PumpState(wp, phi)


def test_gain_and_transmission_match_two_tone_nodal_solve(rng):
    for _ in range(40):
        sig, pump, d, op, ps = _two_tone_case(rng, lossless=False)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r11, t21 = amplifier(sig, pump, d).signal_transfer(op, ps)
        c, nodes = three_port_circuit(sig, pump)
        b_sig, _ = two_tone_solve(c, nodes, d.l_j, d.c3, ps.phi_p, op.omega_s, op.omega_i)
        assert r11 == pytest.approx(b_sig[0], rel=1e-9, abs=1e-12)
        assert t21 == pytest.approx(b_sig[1], rel=1e-9, abs=1e-12)


def test_unpumped_lossless_power_balance(rng):
    for _ in range(30):
        sig, pump, d, op, _ = _two_tone_case(rng, lossless=True)
        amp = amplifier(sig, pump, d)
        off = PumpState(op.omega_p, 0.0)
        assert amp.gain(op, off) + amp.transmission(op, off) == pytest.approx(1.0, abs=1e-9)


def _manley_rowe_residual(sig, pump, d, op, ps):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        amp = amplifier(sig, pump, d)
        g, t = amp.gain(op, ps), amp.transmission(op, ps)
    c, nodes = three_port_circuit(sig, pump)
    _, b_idler = two_tone_solve(c, nodes, d.l_j, d.c3, ps.phi_p, op.omega_s, op.omega_i)
    # signal photons gained equal idler photons emitted
    return g + t - 1.0 - op.omega_s / op.omega_i * float(np.sum(np.abs(b_idler) ** 2)), g


def test_manley_rowe_on_random_lossless_circuits(rng):
    for _ in range(50):
        res, g = _manley_rowe_residual(*_two_tone_case(rng, lossless=True))
        assert abs(res) < 1e-9 * max(1.0, g)


@pytest.mark.parametrize("path", [FILTERED, CAPACITIVE])
def test_manley_rowe_on_reference_designs(path):
    df, amp = reference(path)
    mode = amp.mode_near(df.targets.omega0_target, df.window)
    op = amp.operating_point(mode)
    ps = amp.solve_pump_for_gain(op, 100.0)
    res, g = _manley_rowe_residual(df.signal.ladder(), df.pump.ladder(), amp.dipole, op, ps)
    assert g == pytest.approx(100.0, rel=1e-5)
    assert abs(res) < 1e-9 * g


# ---- pump path ----------------------------------------------------------

@pytest.mark.parametrize("cc", [5e-15, 20e-15, 80e-15, 300e-15, 1e-12])
def test_pump_efficiency_matches_nodal_dipole_voltage(cc):
    sig = ladder_from_pairs([("series_c", 0.3e-12), ("tline", 50.0, 20e-12)])
    pump = ladder_from_pairs([("series_c", cc)])
    wp = 2 * W
    amp = amplifier(sig, pump, JosephsonDipole(L_J, -0.05))
    c, nodes = three_port_circuit(sig, pump)
    vj = dipole_voltage(c, nodes, wp, 1, 1 / (1j * wp * L_J))
    assert amp.pump_efficiency(wp) == pytest.approx(abs(vj) ** 2 * 50.0 / (wp * L_J), rel=1e-9)


def test_pump_power_scale():
    d = JosephsonDipole(L_J)
    assert d.pump_power(2 * W, 0.1) == pytest.approx(2 * W * PHI0 ** 2 * 0.01 / L_J)


def test_pump_phase_warning_is_per_loop():
    with pytest.warns(PumpPhaseWarning):
        check_pump_phase(JosephsonDipole(L_J), 0.6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_pump_phase(JosephsonDipole(L_J, n_loops=10), 4.0)


def _simple_amp(c3=-0.05):
    df = DesignFile.load(CAPACITIVE)
    return amplifier(df.signal.ladder(), df.pump.ladder(), JosephsonDipole(df.dipole().l_j, c3, n_loops=10))


def test_solve_pump_unit_gain_needs_no_pump():
    amp = _simple_amp()
    mode = amp.modes((TWO_PI * 1e9, TWO_PI * 20e9))[0]
    assert amp.solve_pump_for_gain(amp.operating_point(mode), 1.0).phi_p == 0


def test_solve_pump_converges_within_budget():
    amp = _simple_amp()
    mode = amp.modes((TWO_PI * 1e9, TWO_PI * 20e9))[0]
    op = amp.operating_point(mode)
    calls = []
    orig = Amplifier._gain_of_magnitude

    def counting(self, op_, mag):
        calls.append(mag)
        return orig(self, op_, mag)

    Amplifier._gain_of_magnitude = counting
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ps = amp.solve_pump_for_gain(op, 100.0)
    finally:
        Amplifier._gain_of_magnitude = orig
    scan = np.geomspace(amp.dipole.phi_max * 1e-6, amp.dipole.phi_max, 400)
    n_scan = int(np.searchsorted(scan, max(calls[: len(calls)]), side="right"))
    assert len(calls) - n_scan <= 60
    assert amp.gain(op, ps) == pytest.approx(100.0, rel=1e-6)


def test_solve_pump_unreachable_without_nonlinearity():
    amp = _simple_amp(c3=0.0)
    mode = amp.modes((TWO_PI * 1e9, TWO_PI * 20e9))[0]
    with pytest.raises(UnreachableGainError):
        amp.solve_pump_for_gain(amp.operating_point(mode), 100.0)


@pytest.mark.parametrize("path", [FILTERED, CAPACITIVE])
def test_leakage_never_exceeds_bound(path):
    df, amp = reference(path)
    mode = amp.mode_near(df.targets.omega0_target, df.window)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = amp.figures_of_merit(mode, 100.0, eta_nl=0.1)
    assert 0 <= r.leak_w <= r.leak_bound_w
    assert r.eta_p == pytest.approx(0.1 * r.eta_pc)
    assert r.noise_slope == pytest.approx(2 * r.transmission)
    assert r.p_pump_w == pytest.approx(r.p_jp_w / r.eta_pc)


def test_missing_eta_nl_is_flagged():
    df, amp = reference(FILTERED)
    mode = amp.mode_near(df.targets.omega0_target, df.window)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = amp.figures_of_merit(mode, 100.0)
    assert r.eta_p is None
    assert any("eta_nl" in f for f in r.flags)
