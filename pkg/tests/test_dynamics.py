import numpy as np
import pytest
from scipy.linalg import expm

import sshqed as sq
from sshqed.errors import AnalysisError, DissipatorError


def test_decoupled_atom_stays_excited():
    p = sq.WaveguideParams(0.3, 10)
    atom = sq.GiantAtomSpec(0.7, (sq.CouplingNode(5, "A", 0.0),))
    h = sq.build_real_space_hamiltonian(p, [atom])
    traj = sq.evolve_full(h, sq.initial_state(h, "atom:0"), np.linspace(0, 50, 51))
    np.testing.assert_allclose(sq.atom_populations(traj)[:, 0], 1.0, atol=1e-12)


def test_full_evolution_norm_and_errors():
    p = sq.WaveguideParams(0.3, 8)
    atom = sq.two_node_atom("a", "b", 0, 4, 0.1)
    h = sq.build_real_space_hamiltonian(p, [atom])
    psi0 = sq.initial_state(h, "atom:0")
    traj = sq.evolve_full(h, psi0, np.linspace(0, 200, 101))
    norms = np.linalg.norm(traj.states, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-10)
    with pytest.raises(ValueError):
        sq.evolve_full(h, psi0[:-1], [0.0, 1.0])
    with pytest.raises(ValueError):
        sq.evolve_full(h, 2.0 * psi0, [0.0, 1.0])


def test_spectral_propagator_matches_matrix_exponential():
    # independent oracle on a small random instance (N = 6, M = 2)
    rng = np.random.default_rng(7)
    p = sq.WaveguideParams(0.25, 6)
    atoms = [sq.small_atom(1, "A", 0.2, 0.4), sq.two_node_atom("a", "b", 1, 3, 0.15, -0.3)]
    h = sq.build_real_space_hamiltonian(p, atoms)
    psi0 = rng.normal(size=h.dimension) + 1j * rng.normal(size=h.dimension)
    psi0 /= np.linalg.norm(psi0)
    times = np.array([0.0, 0.7, 3.3, 11.0])
    traj = sq.evolve_full(h, psi0, times)
    for i, t in enumerate(times):
        oracle = expm(-1j * h.matrix * t) @ psi0
        assert np.max(np.abs(traj.states[i] - oracle)) < 1e-8


def test_effective_two_level_exchange():
    j = 0.004
    jm = np.array([[0.0, j], [j, 0.0]], dtype=complex)
    times = np.linspace(0, np.pi / j, 201)
    traj = sq.evolve_effective(jm, np.array([1.0, 0.0], dtype=complex), times)
    pops = sq.atom_populations(traj)
    np.testing.assert_allclose(pops[:, 0], np.cos(j * times) ** 2, atol=1e-12)
    np.testing.assert_allclose(pops[:, 1], np.sin(j * times) ** 2, atol=1e-12)
    # full population transfer at t = pi / (2 J)
    i_half = np.argmin(np.abs(times - np.pi / (2 * j)))
    assert pops[i_half, 1] == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(traj.states[0] - np.array([1.0, 0.0]))) < 1e-15


def test_effective_against_expm_oracle_and_hermiticity_check():
    rng = np.random.default_rng(3)
    jm = np.diag(rng.normal(size=2), 1) * 0.01
    jm = jm + jm.conj().T
    jm3 = np.zeros((3, 3), dtype=complex)
    jm3[0, 1] = jm3[1, 2] = 0.01
    jm3 += jm3.conj().T
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    times = np.array([0.0, 40.0, 160.0])
    traj = sq.evolve_effective(jm3, psi0, times)
    for i, t in enumerate(times):
        assert np.max(np.abs(traj.states[i] - expm(-1j * jm3 * t) @ psi0)) < 1e-10
    with pytest.raises(ValueError):
        sq.evolve_effective(np.array([[0.0, 1.0], [0.5, 0.0]]), psi0[:2], times)


def test_lindblad_single_atom_decay():
    gamma = 0.004
    jm = np.zeros((1, 1), dtype=complex)
    gm = np.array([[gamma]], dtype=complex)
    times = np.linspace(0, 400, 81)
    traj = sq.evolve_lindblad(jm, gm, sq.excited_density_matrix(1, 0), times)
    pops = sq.atom_populations(traj)[:, 0]
    np.testing.assert_allclose(pops, np.exp(-2 * gamma * times), atol=1e-9)
    traces = np.einsum("tii->t", traj.rhos).real
    np.testing.assert_allclose(traces, 1.0, atol=1e-8)


def test_lindblad_zero_gamma_matches_unitary():
    jm = np.array([[0.0, 0.01], [0.01, 0.0]], dtype=complex)
    times = np.linspace(0, 310, 63)
    lind = sq.evolve_lindblad(jm, np.zeros((2, 2), dtype=complex),
                              sq.excited_density_matrix(2, 0), times)
    unit = sq.evolve_effective(jm, np.array([1.0, 0.0], dtype=complex), times)
    np.testing.assert_allclose(sq.atom_populations(lind), sq.atom_populations(unit), atol=1e-8)


def test_lindblad_super_and_subradiance():
    gamma = 0.003
    jm = np.zeros((2, 2), dtype=complex)
    gm = gamma * np.ones((2, 2), dtype=complex)
    times = np.linspace(0, 150, 31)
    d = 3
    for sign, rate in ((+1.0, 4 * gamma), (-1.0, 0.0)):
        rho0 = np.zeros((d, d), dtype=complex)
        vec = np.zeros(d, dtype=complex)
        vec[1], vec[2] = 1 / np.sqrt(2), sign / np.sqrt(2)
        rho0 += np.outer(vec, vec.conj())
        traj = sq.evolve_lindblad(jm, gm, rho0, times)
        stay = np.array([np.real(vec.conj() @ r @ vec) for r in traj.rhos])
        np.testing.assert_allclose(stay, np.exp(-rate * times), atol=1e-7)


def test_lindblad_rejects_unphysical_gamma():
    jm = np.zeros((2, 2), dtype=complex)
    gm = np.array([[0.001, 0.02], [0.02, 0.001]], dtype=complex)  # eigenvalue < -1e-6
    with pytest.raises(DissipatorError):
        sq.evolve_lindblad(jm, gm, sq.excited_density_matrix(2, 0), [0.0, 1.0])


def test_population_photon_budget():
    p = sq.WaveguideParams(0.2, 30)
    atom = sq.small_atom(15, "A", 0.1, 1.5)
    h = sq.build_real_space_hamiltonian(p, [atom])
    traj = sq.evolve_full(h, sq.initial_state(h, "atom:0"), np.linspace(0, 15, 16))
    nmap = sq.photon_number_map(traj)
    assert np.max(nmap[0]) == pytest.approx(0.0, abs=1e-20)
    total = nmap.sum(axis=1) + sq.atom_populations(traj)[:, 0]
    np.testing.assert_allclose(total, 1.0, atol=1e-10)


def test_photon_density_contrast_between_nodes():
    # dispersing form spreads; the interference-zero form concentrates between
    # its nodes (mean per-site density, nodes included)
    n = 101
    p = sq.WaveguideParams(0.2, n)

    def density_ratio(form, det):
        atom = sq.two_node_atom(form[0], form[1], 1, 50, 0.1, det)
        h = sq.build_real_space_hamiltonian(p, [atom])
        traj = sq.evolve_full(h, sq.initial_state(h, "atom:0"), np.array([0.0, 100.0]))
        nm = sq.photon_number_map(traj)[-1]
        sites = np.arange(2 * n)
        a, b = h.site_index(50, form[0]), h.site_index(51, form[1])
        inside = (sites >= min(a, b)) & (sites <= max(a, b))
        return (nm[inside].mean()) / (nm[~inside].mean())

    assert density_ratio("ab", 1.2) > 5.0     # trapped
    assert density_ratio("ba", 1.2) < 5.0     # radiating


def test_fidelity_basics():
    p = sq.WaveguideParams(0.3, 8)
    atom = sq.two_node_atom("a", "b", 0, 4, 0.1)
    h = sq.build_real_space_hamiltonian(p, [atom])
    psi0 = sq.initial_state(h, "atom:0")
    traj = sq.evolve_full(h, psi0, np.array([0.0, 5.0]))
    assert sq.fidelity(traj, psi0)[0] == pytest.approx(1.0, abs=1e-12)
    orth = sq.initial_state(h, "site:2:A")
    assert sq.fidelity(traj, orth)[0] == pytest.approx(0.0, abs=1e-12)


def test_transfer_metrics_on_synthetic_series():
    j = 0.005
    jm = np.array([[0.0, j], [j, 0.0]], dtype=complex)
    times = np.linspace(0, 2.2 * np.pi / j, 3001)
    traj = sq.evolve_effective(jm, np.array([1.0, 0.0], dtype=complex), times)
    m = sq.transfer_metrics(traj, 0, 1)
    assert m.peak == pytest.approx(1.0, abs=1e-4)
    assert m.period == pytest.approx(np.pi / j, rel=0.01)
    assert m.t_first_peak == pytest.approx(np.pi / (2 * j), rel=0.01)
    short = sq.evolve_effective(jm, np.array([1.0, 0.0], dtype=complex),
                                np.linspace(0, 0.3 / j, 50))
    with pytest.raises(AnalysisError):
        sq.transfer_metrics(short, 0, 1)


def test_markov_consistency_midband():
    # exact atom population tracks the exponential within 0.02 over the
    # horizon min(5/(2 gamma), half the ring recurrence)
    p = sq.WaveguideParams(0.2, 400)
    atom = sq.small_atom(200, "A", 0.1, 1.5)
    assert sq.validity_margin(atom, 1.5, p) < 0.25
    gam = sq.markov_gamma(atom, atom, 1.5, p).real
    horizon = min(5 / (2 * gam), 0.5 * sq.recurrence_time(p))
    h = sq.build_real_space_hamiltonian(p, [atom])
    times = np.linspace(0, horizon, 400)
    pops = sq.atom_populations(sq.evolve_full(h, sq.initial_state(h, "atom:0"), times))[:, 0]
    assert np.max(np.abs(pops - np.exp(-2 * gam * times))) < 0.02


def test_non_markovian_flag_near_band_edge():
    # within 5% of the outer edge the exponential picture breaks visibly
    p = sq.WaveguideParams(0.2, 300)
    det = 2.0 - 0.05 * (2.0 - 0.4)
    atom = sq.small_atom(150, "A", 0.1, det)
    gam = sq.markov_gamma(atom, atom, det, p).real
    h = sq.build_real_space_hamiltonian(p, [atom])
    times = np.linspace(0, 0.5 * sq.recurrence_time(p), 300)
    pops = sq.atom_populations(sq.evolve_full(h, sq.initial_state(h, "atom:0"), times))[:, 0]
    assert np.max(np.abs(pops - np.exp(-2 * gam * times))) > 0.05


def test_initial_state_specs():
    p = sq.WaveguideParams(0.3, 6)
    atoms = [sq.small_atom(1, "A", 0.1), sq.small_atom(4, "B", 0.1)]
    h = sq.build_real_space_hamiltonian(p, atoms)
    assert sq.initial_state(h, "atom:1")[h.atom_index(1)] == 1.0
    assert sq.initial_state(h, "site:3:B")[h.site_index(3, "B")] == 1.0
    plus = sq.initial_state(h, "plus:0,1")
    assert plus[h.atom_index(0)] == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ValueError):
        sq.initial_state(h, "bogus:1")
