"""Mode construction, wavepackets, null products, pairing and decay."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import companion_packet, random_packet, random_pi_minus
from volkovfp.clifford import (
    dirac_gamma,
    lightcone_operators,
    spin_inner,
    transverse_slash,
)
from volkovfp.modes import (
    GridMismatchError,
    MassFamily,
    ModeAmplitude,
    ModeParams,
    WavePacket,
    dirac_residual,
    evolve_pi_minus,
    family_from_document,
    family_to_document,
    mass_pairing_identity,
    mode_wavefunction,
    null_decay_scan,
    null_scalar_product,
    packet_from_document,
    packet_to_document,
    project_pi_minus,
    reconstruct_full,
    smooth_bump,
)
from volkovfp.potential import HarmonicPotential, PulsePotential, ZeroPotential

N_PLUS, N_MINUS, PI_PLUS, PI_MINUS = lightcone_operators()
ID4 = np.eye(4)


def random_amp(rng):
    return ModeAmplitude(random_pi_minus(rng)[0])


def random_mode(rng, u_sign=None):
    sign = u_sign if u_sign is not None else rng.choice([-1.0, 1.0])
    u = float(sign * np.exp(rng.uniform(np.log(0.1), np.log(2.0))))
    return ModeParams(k2=float(rng.normal(0, 0.7)), k3=float(rng.normal(0, 0.7)),
                      u=u, m=float(rng.uniform(0.5, 1.5)))


def test_mode_params_validation():
    with pytest.raises(ValueError):
        ModeParams(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ModeParams(0.0, 0.0, -0.5, 0.0)


def test_amplitude_must_be_pi_minus():
    vec = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    if np.linalg.norm(PI_MINUS @ vec - vec) > 1e-12:
        with pytest.raises(ValueError):
            ModeAmplitude(vec)
    amp = ModeAmplitude.from_spinor(vec)
    assert np.allclose(PI_MINUS @ amp.chi0, amp.chi0)


def test_evolution_is_pure_phase(rng):
    pot = HarmonicPotential(0.2, 1.0)
    for _ in range(20):
        mode = random_mode(rng)
        amp = random_amp(rng)
        s = float(rng.uniform(-5, 5))
        out = evolve_pi_minus(amp, mode, pot, s)
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(amp.chi0), rel=1e-14)


def test_evolution_phase_value_zero_potential():
    # k2 = k3 = 0, m = 1, u = -1/2: phase over s = pi is exp(i pi/2) = i
    mode = ModeParams(0.0, 0.0, -0.5, 1.0)
    amp = ModeAmplitude.from_spinor(np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))
    out = evolve_pi_minus(amp, mode, ZeroPotential(), np.pi)
    assert np.allclose(out, 1j * amp.chi0, atol=1e-15)


def test_evolution_group_property(rng):
    pot = HarmonicPotential(0.3, 1.0)
    mode = random_mode(rng)
    amp = random_amp(rng)
    s1, s2 = 1.3, -2.1
    direct = evolve_pi_minus(amp, mode, pot, s2)
    step1 = evolve_pi_minus(amp, mode, pot, s1)
    rebased = evolve_pi_minus(ModeAmplitude(step1), mode, pot, s2, s_from=s1)
    assert np.max(np.abs(rebased - direct)) < 1e-12


def test_reconstruct_satisfies_algebraic_constraint(rng):
    pot = HarmonicPotential(0.2, 1.0)
    worst = 0.0
    for _ in range(1000):
        mode = random_mode(rng)
        amp = random_amp(rng)
        s = float(rng.uniform(-5, 5))
        chi_minus = evolve_pi_minus(amp, mode, pot, s)
        chi = reconstruct_full(chi_minus, mode, pot, s)
        aslash = transverse_slash(mode.k2, mode.k3, float(pot.a2(s)), float(pot.a3(s)))
        resid = 2.0 * mode.u * (N_MINUS @ chi) + (aslash - mode.m * ID4) @ (PI_MINUS @ chi)
        worst = max(worst, np.linalg.norm(resid) / np.linalg.norm(chi))
        assert np.max(np.abs(PI_MINUS @ chi - chi_minus)) < 1e-13
    assert worst < 1e-13


def test_reconstruct_zero_potential_form(rng):
    mode = ModeParams(0.0, 0.0, -0.8, 1.1)
    amp = random_amp(rng)
    chi = reconstruct_full(amp.chi0, mode, ZeroPotential(), 0.0)
    # at zero transverse momentum, Pi+ part = (m/2u) N+ chi0
    expected_plus = (mode.m / (2.0 * mode.u)) * (N_PLUS @ amp.chi0)
    assert np.allclose(PI_PLUS @ chi, expected_plus, atol=1e-14)


def test_wavefunction_phases(rng):
    pot = HarmonicPotential(0.2, 1.0)
    mode = random_mode(rng)
    amp = random_amp(rng)
    s = 0.7
    at_origin = mode_wavefunction(amp, mode, pot, (s, 0.0, 0.0, 0.0))
    direct = reconstruct_full(evolve_pi_minus(amp, mode, pot, s), mode, pot, s)
    assert np.allclose(at_origin, direct, atol=1e-14)
    # l-periodicity with period 2 pi / |u|
    period = 2.0 * np.pi / abs(mode.u)
    a = mode_wavefunction(amp, mode, pot, (s, 1.2, 0.3, -0.4))
    b = mode_wavefunction(amp, mode, pot, (s, 1.2 + period, 0.3, -0.4))
    assert np.allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("pot,tol", [
    (ZeroPotential(), 1e-12),
    (HarmonicPotential(0.2, 1.0), 1e-10),
    (PulsePotential(0.2, 1.0, 3.0), 1e-8),
])
def test_dirac_residual_small(rng, pot, tol):
    for _ in range(50):
        mode = random_mode(rng)
        amp = random_amp(rng)
        point = tuple(rng.uniform(-3, 3, size=4))
        resid = dirac_residual(amp, mode, pot, point)
        norm = np.linalg.norm(mode_wavefunction(amp, mode, pot, point))
        assert resid <= tol * norm


def test_dirac_residual_finite_difference_oracle(rng):
    """Central-difference residual converges O(h^2) to the analytic one."""
    pot = HarmonicPotential(0.3, 1.0)
    mode = ModeParams(0.4, -0.2, -0.6, 1.1)
    amp = random_amp(rng)
    s0, l0 = 0.9, 0.0

    def chi_of_s(s):
        return reconstruct_full(evolve_pi_minus(amp, mode, pot, s), mode, pot, s)

    def fd_residual(h):
        dchi = (chi_of_s(s0 + h) - chi_of_s(s0 - h)) / (2.0 * h)
        chi = chi_of_s(s0)
        aslash = transverse_slash(mode.k2, mode.k3, float(pot.a2(s0)), float(pot.a3(s0)))
        resid = 2j * (N_PLUS @ dchi) + 2.0 * mode.u * (N_MINUS @ chi) \
            + (aslash - mode.m * ID4) @ chi
        return np.linalg.norm(resid)

    analytic = dirac_residual(amp, mode, pot, (s0, l0, 0.0, 0.0))
    err1 = abs(fd_residual(1e-3) - analytic)
    err2 = abs(fd_residual(5e-4) - analytic)
    # halving h divides the O(h^2) error by about 4
    assert err2 < err1 / 2.5
    assert err1 < 1e-4


def test_packet_validation(rng):
    with pytest.raises(ValueError):
        WavePacket(m=1.0, u=np.array([0.0]), k2=np.zeros(1), k3=np.zeros(1),
                   chi0=random_pi_minus(rng, 1), weights=np.ones(1, complex),
                   quad_weights=np.ones(1))
    with pytest.raises(ValueError):
        WavePacket(m=1.0, u=np.array([-0.5, -0.5]), k2=np.zeros(2), k3=np.zeros(2),
                   chi0=random_pi_minus(rng, 2), weights=np.ones(2, complex),
                   quad_weights=np.ones(2))
    raw = rng.normal(size=(1, 4)) + 0j  # not in the Pi- range
    if np.max(np.abs(raw @ PI_MINUS.T - raw)) > 1e-9:
        with pytest.raises(ValueError):
            WavePacket(m=1.0, u=np.array([-0.5]), k2=np.zeros(1), k3=np.zeros(1),
                       chi0=raw, weights=np.ones(1, complex), quad_weights=np.ones(1))


def test_null_product_invariance_and_positivity(rng):
    pot = HarmonicPotential(0.3, 1.0)
    worst = 0.0
    for _ in range(10):
        psi = random_packet(rng)
        phi = companion_packet(rng, psi)
        base = null_scalar_product(psi, phi, pot, 0.0)
        for s in np.linspace(-10, 10, 9):
            val = null_scalar_product(psi, phi, pot, float(s))
            worst = max(worst, abs(val - base) / abs(base))
        self_product = null_scalar_product(psi, psi, pot, 1.3)
        assert self_product.real > 0
        assert abs(self_product.imag) <= 1e-14 * self_product.real
        fwd = null_scalar_product(psi, phi, pot, 2.0)
        rev = null_scalar_product(phi, psi, pot, 2.0)
        assert fwd == pytest.approx(np.conj(rev), rel=1e-13)
    assert worst < 1e-10


def test_null_product_single_node_value(rng):
    # single node, unit weight, normalised chi0: product = (2 pi)^4 qw
    chi0 = random_pi_minus(rng, 1)
    qw = 0.37
    packet = WavePacket(m=1.0, u=np.array([-0.5]), k2=np.array([0.1]),
                        k3=np.array([0.0]), chi0=chi0,
                        weights=np.array([1.0 + 0j]), quad_weights=np.array([qw]))
    val = null_scalar_product(packet, packet, ZeroPotential(), 0.0)
    assert val.real == pytest.approx((2.0 * np.pi) ** 4 * qw, rel=1e-14)


def test_null_product_grid_mismatch(rng):
    psi = random_packet(rng, n_nodes=6)
    phi = random_packet(rng, n_nodes=6)
    with pytest.raises(GridMismatchError):
        null_scalar_product(psi, phi, ZeroPotential(), 0.0)


@settings(max_examples=30, deadline=None)
@given(m=st.floats(0.5, 1.5), mp=st.floats(0.5, 1.5), s=st.floats(-4.0, 4.0),
       u=st.floats(-2.0, -0.1), k2=st.floats(-1.0, 1.0))
def test_mass_pairing_identity_property(m, mp, s, u, k2):
    rng = np.random.default_rng(int(abs(hash((m, mp, s, u, k2))) % 2 ** 32))
    pot = HarmonicPotential(0.2, 1.0)
    amp_a, amp_b = random_amp(rng), random_amp(rng)
    lhs, rhs = mass_pairing_identity(amp_a, ModeParams(k2, 0.1, u, m),
                                     amp_b, ModeParams(k2, 0.1, u, mp), pot, s)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_mass_pairing_equal_mass_phase_free(rng):
    pot = HarmonicPotential(0.2, 1.0)
    mode = ModeParams(0.3, 0.0, -0.5, 1.0)
    amp_a, amp_b = random_amp(rng), random_amp(rng)
    lhs0, rhs0 = mass_pairing_identity(amp_a, mode, amp_b, mode, pot, 0.0)
    lhs5, rhs5 = mass_pairing_identity(amp_a, mode, amp_b, mode, pot, 5.0)
    assert rhs0 == pytest.approx(rhs5, rel=1e-12)  # phase factor is one
    assert lhs0 == pytest.approx(lhs5, rel=1e-12)
    assert rhs0 == pytest.approx(2.0 * mode.m * spin_inner(
        amp_a.chi0, dirac_gamma(0) @ amp_b.chi0), rel=1e-13)


def test_mass_pairing_s_dependence_is_pure_phase(rng):
    pot = HarmonicPotential(0.4, 1.0)
    amp_a, amp_b = random_amp(rng), random_amp(rng)
    m, mp, u = 1.0, 1.2, -0.5
    mode_a = ModeParams(0.3, -0.1, u, m)
    mode_b = ModeParams(0.3, -0.1, u, mp)
    lhs0, _ = mass_pairing_identity(amp_a, mode_a, amp_b, mode_b, pot, 0.0)
    s = 2.7
    lhs_s, _ = mass_pairing_identity(amp_a, mode_a, amp_b, mode_b, pot, s)
    expected = np.exp(1j * (m * m - mp * mp) * s / (4.0 * u))
    assert lhs_s / lhs0 == pytest.approx(expected, rel=1e-12)


def test_mass_pairing_requires_shared_transverse(rng):
    amp = random_amp(rng)
    with pytest.raises(ValueError):
        mass_pairing_identity(amp, ModeParams(0.1, 0.0, -0.5, 1.0),
                              amp, ModeParams(0.2, 0.0, -0.5, 1.2),
                              ZeroPotential(), 0.0)


def _gaussian_u_packet(rng, n=160, center=-1.1, sigma=0.04):
    u = np.linspace(-2.0, -0.2, n)
    chi0 = np.tile(random_pi_minus(rng)[0], (n, 1))
    weights = np.exp(-np.square((u - center) / sigma) / 2.0).astype(complex)
    du = u[1] - u[0]
    return WavePacket(m=1.0, u=u, k2=np.full(n, 0.3), k3=np.zeros(n),
                      chi0=chi0, weights=weights, quad_weights=np.full(n, du))


def test_decay_scan_smooth_weights(rng):
    packet = _gaussian_u_packet(rng)
    l_grid = np.geomspace(20.0, 200.0, 40)
    l_both = np.concatenate([l_grid, -l_grid])
    report_zero = null_decay_scan(packet, ZeroPotential(), [-5.0, 0.0, 5.0], l_both)
    assert report_zero.min_order >= 4.0
    assert not report_zero.non_decaying
    report_harm = null_decay_scan(packet, HarmonicPotential(0.2, 1.0),
                                  [-5.0, 0.0, 5.0], l_both)
    assert report_harm.min_order >= 4.0
    assert abs(report_harm.min_order - report_zero.min_order) <= 0.1 * report_zero.min_order


def test_decay_scan_flags_single_mode(rng):
    chi0 = random_pi_minus(rng, 1)
    packet = WavePacket(m=1.0, u=np.array([-0.5]), k2=np.array([0.3]),
                        k3=np.array([0.0]), chi0=chi0,
                        weights=np.array([1.0 + 0j]), quad_weights=np.array([1.0]))
    l_grid = np.geomspace(20.0, 200.0, 24)
    report = null_decay_scan(packet, ZeroPotential(), [0.0], l_grid)
    assert report.non_decaying
    assert abs(report.min_order) < 1e-6


def test_packet_json_roundtrip(rng, tmp_path):
    from volkovfp.modes import load_document, save_document

    packet = random_packet(rng, n_nodes=7)
    pot = HarmonicPotential(0.2, 1.0)
    doc = packet_to_document(packet, pot)
    clone, pot_clone = packet_from_document(doc)
    assert clone.same_grid(packet)
    assert np.allclose(clone.chi0, packet.chi0)
    assert np.allclose(clone.weights, packet.weights)
    assert pot_clone.descriptor() == pot.descriptor()

    path = tmp_path / "packet.json"
    save_document(doc, path)
    clone2, _ = packet_from_document(load_document(path))
    assert np.allclose(clone2.chi0, packet.chi0)


def test_decay_scan_needs_enough_samples(rng):
    packet = _gaussian_u_packet(rng, n=40)
    with pytest.raises(ValueError):
        null_decay_scan(packet, ZeroPotential(), [0.0], np.geomspace(20, 200, 5))
    with pytest.raises(ValueError):
        null_decay_scan(packet, ZeroPotential(), [0.0], np.array([0.0, 1.0, 2.0]))


def _small_family(rng, eta_support=None):
    interval = (0.8, 1.2)
    masses = np.linspace(0.8, 1.2, 9)
    support = eta_support or interval
    eta = smooth_bump(masses, *support)
    n = 4
    u = np.array([-0.9, -0.7, -0.5, -0.3])
    k2 = np.array([0.1, -0.2, 0.3, 0.0])
    k3 = np.zeros(4)
    chi0 = random_pi_minus(rng, n)
    packets = [WavePacket(m=float(m), u=u, k2=k2, k3=k3, chi0=chi0,
                          weights=np.ones(n, complex), quad_weights=np.full(n, 0.25))
               for m in masses]
    return MassFamily(interval=interval, masses=masses, eta=eta,
                      mass_quad_weights=np.full(9, 0.05), packets=packets)


def test_family_validation_and_roundtrip(rng):
    family = _small_family(rng)
    assert family.weights_smooth()
    doc = family_to_document(family, ZeroPotential())
    clone, pot = family_from_document(doc)
    assert np.allclose(clone.masses, family.masses)
    assert np.allclose(clone.eta, family.eta)
    assert pot.descriptor() == {"kind": "zero"}

    with pytest.raises(ValueError):
        MassFamily(interval=(0.0, 1.2), masses=family.masses, eta=family.eta,
                   mass_quad_weights=family.mass_quad_weights, packets=family.packets)


def test_smooth_bump_properties():
    x = np.linspace(0.8, 1.2, 21)
    eta = smooth_bump(x, 0.8, 1.2)
    assert eta[0] == 0.0 and eta[-1] == 0.0
    assert eta[10] == pytest.approx(1.0)
    assert np.all(eta >= 0.0)
    assert np.all(smooth_bump(np.array([0.79, 1.21]), 0.8, 1.2) == 0.0)
