import numpy as np
import pytest
from scipy.integrate import quad

import sshqed as sq
from sshqed.errors import BandEdgeError, BracketingError, GaplessLatticeError, RegimeError


def test_self_energy_small_atom_vanishes_at_zero():
    p = sq.WaveguideParams(0.3, 40)
    assert sq.self_energy(0.0, sq.small_atom(10, "A", 0.1), p) == pytest.approx(0.0, abs=1e-14)


def test_self_energy_dimer_form_values():
    atom = sq.two_node_atom("a", "b", 0, 10, 0.1)
    assert sq.self_energy(0.0, atom, sq.WaveguideParams(0.3, 40)) == pytest.approx(0.0, abs=1e-12)
    assert sq.self_energy(0.0, atom, sq.WaveguideParams(-0.3, 40)) == pytest.approx(
        -2 * 0.01 / 1.3, abs=1e-12)


def test_self_energy_against_fresh_quadrature():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.two_node_atom("a", "b", 0, 10, 0.1)
    e = -2.5

    def integrand(k):
        phi = -np.arctan2(p.j2 * np.sin(k), p.j1 + p.j2 * np.cos(k))
        w = np.sqrt(p.j1 ** 2 + p.j2 ** 2 + 2 * p.j1 * p.j2 * np.cos(k))
        pk = (0.1 + 0.1 * np.exp(1j * phi)) / np.sqrt(2)
        qk = (-0.1 + 0.1 * np.exp(1j * phi)) / np.sqrt(2)
        return (abs(pk) ** 2 / (e - w) + abs(qk) ** 2 / (e + w)).real

    oracle = quad(integrand, -np.pi, np.pi, epsabs=1e-13, limit=200)[0] / (2 * np.pi)
    assert sq.self_energy(e, atom, p) == pytest.approx(oracle, abs=1e-11)


def test_self_energy_domain_errors():
    atom = sq.two_node_atom("a", "b", 0, 10, 0.1)
    with pytest.raises(RegimeError):
        sq.self_energy(1.0, atom, sq.WaveguideParams(0.3, 40))
    with pytest.raises(GaplessLatticeError):
        sq.self_energy(0.0, atom, sq.WaveguideParams(0.0, 40))


def test_self_energy_edge_divergence_monotone():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.small_atom(10, "A", 0.1)
    vals = [abs(sq.self_energy(2.0 + d, atom, p)) for d in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_decoupled_root_is_exactly_detuning():
    # zero coupling: the equation reduces to E = detuning; bisection resolves
    # it to its residual tolerance
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.GiantAtomSpec(0.3, (sq.CouplingNode(10, "A", 0.0),))
    roots = sq.solve_bound_energies(atom, p)
    assert roots.middle == pytest.approx(0.3, abs=1e-10)
    atom = sq.GiantAtomSpec(2.5, (sq.CouplingNode(10, "A", 0.0),))
    assert sq.solve_bound_energies(atom, p).upper == pytest.approx(2.5, abs=1e-10)


def test_zero_detuning_middle_root():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.two_node_atom("a", "b", 0, 10, 0.1)
    roots = sq.solve_bound_energies(atom, p)
    assert roots.middle == pytest.approx(0.0, abs=1e-10)
    e = roots.require("middle")
    resid = abs(e - atom.detuning - sq.self_energy(e, atom, p, edge_tol=0.0))
    assert resid < 1e-10
    with pytest.raises(BracketingError):
        roots.require("lower")


def test_upper_root_matches_real_space():
    nodes = sq.two_node_atom("a", "b", 0, 0, 0.1).nodes
    for cells, tol in ((20, 1e-3), (100, 1e-5)):
        p = sq.WaveguideParams(0.3, cells)
        atom = sq.GiantAtomSpec(2.2, tuple(sq.CouplingNode(cells // 2, n.sublattice, n.strength)
                                           for n in nodes))
        root = sq.solve_bound_energies(atom, p).require("upper")
        ev = np.linalg.eigvalsh(sq.build_real_space_hamiltonian(p, [atom]).matrix)
        nearest = ev[np.argmin(np.abs(ev - root))]
        assert abs(nearest - root) < tol
    assert 2.2 < root < 2.3   # upward shift from the positive self-energy


def test_middle_root_real_space_convergence():
    for cells, tol in ((20, 1e-3), (100, 1e-5)):
        p = sq.WaveguideParams(0.3, cells)
        atom = sq.two_node_atom("a", "b", 0, cells // 2, 0.1)
        root = sq.solve_bound_energies(atom, p).require("middle")
        ev = np.linalg.eigvalsh(sq.build_real_space_hamiltonian(p, [atom]).matrix)
        assert abs(ev[np.argmin(np.abs(ev - root))] - root) < tol


def test_closed_form_entries():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.two_node_atom("a", "b", 0, 20, 0.1)
    bs = sq.bound_amplitudes_closed_form(atom, p)
    ce = bs.atom_amplitude
    assert ce > 0
    # one cell to the right on A: -(g_b/j1)(j1/j2) C_e = -(0.1/1.3) C_e
    assert bs.a_amplitudes[21] == pytest.approx(-(0.1 / 1.3) * ce, abs=1e-15)
    assert bs.a_amplitudes[20] == 0.0 and bs.b_amplitudes[20] == 0.0
    assert np.all(bs.a_amplitudes[:21] == 0.0)
    tri = sq.bound_amplitudes_closed_form(atom, sq.WaveguideParams(-0.3, 40))
    assert tri.a_amplitudes[20] == pytest.approx(-0.1 / 1.3 * tri.atom_amplitude, abs=1e-15)
    assert tri.b_amplitudes[20] == pytest.approx(-0.1 / 1.3 * tri.atom_amplitude, abs=1e-15)
    assert bs.norm == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        sq.bound_amplitudes_closed_form(sq.small_atom(10, "A", 0.1), p)


def test_numeric_amplitudes_zero_detuning_structure():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.two_node_atom("a", "b", 0, 20, 0.1)
    bs = sq.bound_amplitudes_numeric(0.0, atom, p)
    assert abs(bs.a_amplitudes[20]) < 1e-10 and abs(bs.b_amplitudes[20]) < 1e-10
    # equal strengths: reflection-symmetric magnitudes
    for r in range(1, 10):
        assert abs(bs.a_amplitudes[20 + r]) == pytest.approx(abs(bs.b_amplitudes[20 - r]), rel=1e-9)
    assert bs.norm == pytest.approx(1.0, abs=1e-10)


def test_perfect_chirality_single_sided_coupling():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.GiantAtomSpec(0.0, (sq.CouplingNode(20, "A", 0.1),))  # g_b = 0
    bs = sq.bound_amplitudes_numeric(0.0, atom, p)
    assert np.max(np.abs(bs.a_amplitudes)) < 1e-10          # no A-sublattice support
    assert np.max(np.abs(bs.b_amplitudes[20:])) < 1e-10     # nothing at or right of the emitter
    assert np.max(np.abs(bs.b_amplitudes[:20])) > 0.01


def test_exponential_localization_slope():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.two_node_atom("a", "b", 0, 20, 0.1)
    bs = sq.bound_amplitudes_numeric(0.0, atom, p)
    r = np.arange(2, 11)
    logs = np.log(np.abs(bs.a_amplitudes[20 + r]))
    slope = np.polyfit(r, logs, 1)[0]
    assert slope == pytest.approx(np.log(p.j1 / p.j2), rel=0.01)


def test_numeric_matches_closed_form():
    for delta in (0.2, -0.2, 0.3, -0.3, 0.5, -0.5):
        p = sq.WaveguideParams(delta, 40)
        atom = sq.two_node_atom("a", "b", 0, 20, 0.1)
        num = sq.bound_amplitudes_numeric(0.0, atom, p)
        ref = sq.bound_amplitudes_closed_form(atom, p)
        for got, want in ((num.a_amplitudes, ref.a_amplitudes),
                          (num.b_amplitudes, ref.b_amplitudes)):
            nz = np.abs(want) > 0
            assert np.max(np.abs(got[nz] - want[nz]) / np.abs(want[nz])) < 1e-6
            if np.any(~nz):
                assert np.max(np.abs(got[~nz])) < 1e-10


def test_amplitudes_reject_band_and_edge():
    p = sq.WaveguideParams(0.3, 40)
    atom = sq.two_node_atom("a", "b", 0, 20, 0.1)
    with pytest.raises(RegimeError):
        sq.bound_amplitudes_numeric(1.0, atom, p)
    with pytest.raises(BandEdgeError):
        sq.bound_amplitudes_numeric(0.6 - 1e-12, atom, p)


def test_spectrum_vs_detuning():
    p = sq.WaveguideParams(0.3, 12)
    atom = sq.two_node_atom("a", "b", 0, 6, 0.1)
    grid = np.linspace(-1.0, 1.0, 5)
    spec = sq.spectrum_vs_detuning(p, [atom], grid)
    assert spec.energies.shape == (5, 2 * 12 + 1)
    assert set(np.unique(spec.labels)) <= {"band", "gap_lower", "gap_middle", "gap_upper"}
    # decoupled emitter: spectrum independent of detuning except the bare line
    free = sq.GiantAtomSpec(0.0, (sq.CouplingNode(6, "A", 0.0),))
    spec0 = sq.spectrum_vs_detuning(p, [free], grid)
    for i, det in enumerate(grid):
        row = np.sort(spec0.energies[i])
        keep = row[np.argsort(np.abs(row - det))[1:]]  # drop the bare atom line
        ref = np.sort(np.linalg.eigvalsh(sq.build_real_space_hamiltonian(p).matrix))
        np.testing.assert_allclose(np.sort(keep), ref, atol=1e-9)
