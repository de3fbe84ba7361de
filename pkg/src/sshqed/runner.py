"""Experiment execution: config in, tables and metrics out.

Each experiment kind maps to one function returning Table objects; scenario
lists rerun the same kind over labeled config variants. Sweep points can be
dispatched to a process pool (--jobs); assembly order is fixed by the input
grid, so results do not depend on the worker count.
"""

from __future__ import annotations

import copy
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from .boundstates import (bound_amplitudes_numeric, classify_energy,
                          solve_bound_energies)
from .config import ConfigError, ExperimentConfig, validate_config
from .couplings import (bandgap_coupling_matrix, markov_coupling_matrices,
                        markov_gamma, sw_coupling_closed_form,
                        sw_coupling_integral, validity_margin)
from .dynamics import (atom_populations, evolve_effective, evolve_full,
                       evolve_lindblad, excited_density_matrix, fidelity,
                       initial_state, photon_number_map, transfer_metrics)
from .errors import AnalysisError, NumericalDomainError, RegimeError
from .lattice import (GiantAtomSpec, WaveguideParams, band_edges,
                      build_real_space_hamiltonian, recurrence_time)
from .manifest import Table

SUBLATTICE_OF_SITE = ("A", "B")


@dataclass
class RunResult:
    tables: List[Table] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    metrics: Dict[str, Any] = field(default_factory=dict)


def _site_cell_subl(site: int):
    return site // 2, SUBLATTICE_OF_SITE[site % 2]


def _scenario_configs(cfg: ExperimentConfig):
    for sc in cfg.scenarios():
        raw = copy.deepcopy(cfg.raw)
        raw.pop("scenarios", None)
        for key, value in (sc["set"] or {}).items():
            from .config import set_by_path
            set_by_path(raw, key, value)
        yield sc["label"], validate_config(raw, cfg.kind)


def _spectrum_point(args):
    delta, cells, nodes_list, det = args
    params = WaveguideParams(delta, cells)
    atoms = [GiantAtomSpec(det, nodes) for nodes in nodes_list]
    h = build_real_space_hamiltonian(params, atoms)
    energies = np.linalg.eigvalsh(h.matrix)
    labels = [classify_energy(e, params) for e in energies]
    return det, energies, labels


def run_spectrum(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    res = RunResult()
    table = Table("spectrum", ["label", "delta_detuning", "value", "band"])
    for label, sub in _scenario_configs(cfg):
        detunings = sub.grid("detuning")
        work = [(sub.waveguide.delta, sub.waveguide.cells,
                 [a.nodes for a in sub.atoms], float(d)) for d in detunings]
        points = _pmap(_spectrum_point, work, jobs)
        for det, energies, labels in points:
            for e, lab in zip(energies, labels):
                table.add(label, det, float(e), lab)
    res.tables.append(table)
    return res


def run_boundstate(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    res = RunResult()
    table = Table("amplitudes",
                  ["label", "delta_detuning", "gap", "cell", "sublattice",
                   "re", "im", "value"])
    energies_t = Table("energies", ["label", "delta_detuning", "gap", "value"])
    for label, sub in _scenario_configs(cfg):
        params = sub.waveguide
        if len(sub.atoms) != 1:
            raise ConfigError("atoms", "boundstate experiments use exactly one emitter")
        template = sub.atoms[0]
        for det in sub.grid("detuning", default=[template.detuning]):
            atom = GiantAtomSpec(float(det), template.nodes)
            roots = solve_bound_energies(atom, params)
            for gap, energy in roots.as_dict().items():
                if energy is None:
                    continue
                energies_t.add(label, float(det), gap, energy)
                edge_dist = float(np.min(np.abs(band_edges(params) - energy)))
                if edge_dist < 1e-7:
                    res.warnings.append(
                        f"{label or 'run'}: {gap}-gap state at detuning {det} sits "
                        f"{edge_dist:.1e} from a band edge; profile skipped")
                    continue
                if sub.disorder is None:
                    bs = bound_amplitudes_numeric(energy, atom, params)
                    rows = [(c, "A", bs.a_amplitudes[c]) for c in range(params.cells)] + \
                           [(c, "B", bs.b_amplitudes[c]) for c in range(params.cells)]
                    for cell, subl, amp in rows:
                        table.add(label, float(det), gap, cell, subl,
                                  float(np.real(amp)), float(np.imag(amp)),
                                  float(np.abs(amp) ** 2))
                    table.add(label, float(det), gap, -1, "atom",
                              bs.atom_amplitude, 0.0, bs.atom_amplitude ** 2)
                else:
                    h = build_real_space_hamiltonian(params, [atom], sub.disorder)
                    ev, vec = np.linalg.eigh(h.matrix)
                    clean = build_real_space_hamiltonian(params, [atom])
                    evc, vecc = np.linalg.eigh(clean.matrix)
                    ref = vecc[:, int(np.argmin(np.abs(evc - energy)))]
                    i = int(np.argmax(np.abs(vec.conj().T @ ref)))
                    state = vec[:, i]
                    for site in range(2 * params.cells):
                        cell, subl = _site_cell_subl(site)
                        amp = state[site]
                        table.add(label, float(det), gap, cell, subl,
                                  float(np.real(amp)), float(np.imag(amp)),
                                  float(np.abs(amp) ** 2))
                    table.add(label, float(det), gap, -1, "atom",
                              float(np.abs(state[h.atom_index(0)])), 0.0,
                              float(np.abs(state[h.atom_index(0)]) ** 2))
    res.tables.extend([table, energies_t])
    return res


def run_sw_couplings(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    res = RunResult()
    sw = cfg.section("swcouplings")
    x_min = int(sw.get("x_min", -6))
    x_max = int(sw.get("x_max", 6))
    g_a = float(sw.get("g_a", 0.1))
    g_b = float(sw.get("g_b", 0.1))
    dimerizations = sw.get("dimerizations") or [cfg.waveguide.delta]
    detuning = float(sw.get("detuning", 0.0))
    table = Table("swcouplings",
                  ["label", "dimerization", "cell", "re", "im", "value"])
    base = max(abs(x_min), abs(x_max)) + 1
    for delta in dimerizations:
        params = WaveguideParams(float(delta), cfg.waveguide.cells)
        atom_m = GiantAtomSpec(detuning, (_node(base, "A", g_a), _node(base, "B", g_b)))
        for x in range(x_min, x_max + 1):
            atom_n = GiantAtomSpec(detuning, (
                _node(base + x, "A", g_a), _node(base + x, "B", g_b)))
            val = sw_coupling_integral(atom_n, atom_m, detuning, params)
            table.add("integral", float(delta), x, float(np.real(val)),
                      float(np.imag(val)), float(np.real(val)))
            if detuning == 0.0:
                closed = sw_coupling_closed_form(x, params, g_a, g_b)
                table.add("closed_form", float(delta), x, closed, 0.0, closed)
        margin = validity_margin(atom_m, detuning, params)
        if margin >= 0.25:
            res.warnings.append(
                f"dimerization {delta}: coupling-to-edge ratio {margin:.2f} "
                "exceeds the dispersive-validity heuristic 0.25")
    res.tables.append(table)
    return res


def _node(cell, subl, strength):
    from .lattice import CouplingNode
    return CouplingNode(cell, subl, strength)


def _markov_point(args):
    delta, cells, atom_dicts, det = args
    params = WaveguideParams(delta, cells)
    atoms = [GiantAtomSpec(det, nodes) for nodes in atom_dicts]
    rows = []
    try:
        g00 = markov_gamma(atoms[0], atoms[0], det, params)
        rows.append(("gamma_00", det, float(np.real(g00))))
        rows.append(("J_00", det, float(np.imag(g00))))
        if len(atoms) > 1:
            g01 = markov_gamma(atoms[0], atoms[1], det, params)
            rows.append(("gamma_01", det, float(np.real(g01))))
            rows.append(("J_01", det, float(np.imag(g01))))
    except NumericalDomainError:
        rows.append(("skipped", det, float("nan")))
    return rows


def run_markov_scan(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    res = RunResult()
    table = Table("markovscan", ["label", "kind", "delta_detuning", "value"])
    for label, sub in _scenario_configs(cfg):
        detunings = sub.grid("detuning")
        work = [(sub.waveguide.delta, sub.waveguide.cells,
                 [a.nodes for a in sub.atoms], float(d)) for d in detunings]
        produced = 0
        for rows in _pmap(_markov_point, work, jobs):
            for kind, det, value in rows:
                if kind == "skipped":
                    res.warnings.append(f"{label or 'run'}: detuning {det} outside "
                                        "the band interior; point skipped")
                else:
                    table.add(label, kind, det, value)
                    produced += 1
        if produced == 0:
            raise RegimeError(
                f"grids.detuning: no grid point of scenario {label or 'run'!r} lies "
                "inside a band; band-regime couplings are undefined there")
    res.tables.append(table)
    return res


def _band_warnings(sub: ExperimentConfig, times) -> List[str]:
    out = []
    in_band = [a for a in sub.atoms
               if classify_energy(a.detuning, sub.waveguide) == "band"]
    if in_band:
        t_rec = recurrence_time(sub.waveguide)
        if times[-1] > 0.5 * t_rec:
            out.append(f"horizon {times[-1]:g} exceeds half the ring recurrence "
                       f"time {t_rec:g}; revivals may contaminate decay fits")
    else:
        for atom in sub.atoms:
            margin = validity_margin(atom, atom.detuning, sub.waveguide)
            if margin >= 0.25:
                out.append(f"coupling-to-edge ratio {margin:.2f} exceeds the "
                           "dispersive-validity heuristic 0.25")
                break
    return out


def _evolve_tables(label: str, sub: ExperimentConfig, want_map: bool):
    section = sub.section("evolve")
    model = section.get("model", "full")
    times = sub.grid("time")
    pop_rows, fid_rows, map_rows = [], [], []
    warnings = _band_warnings(sub, times)
    if model == "full":
        h = build_real_space_hamiltonian(sub.waveguide, sub.atoms, sub.disorder)
        psi0 = initial_state(h, section.get("initial", "atom:0"))
        traj = evolve_full(h, psi0, times)
        pops = atom_populations(traj)
        target_spec = section.get("target")
        if target_spec:
            fid = fidelity(traj, initial_state(h, target_spec))
            fid_rows = list(zip(times, fid))
        if want_map:
            nmap = photon_number_map(traj)
            for ti, t in enumerate(times):
                for site in range(2 * sub.waveguide.cells):
                    cell, subl = _site_cell_subl(site)
                    map_rows.append((t, cell, subl, float(nmap[ti, site])))
    elif model in ("effective", "lindblad"):
        if model == "effective":
            coup = bandgap_coupling_matrix(sub.atoms, sub.waveguide)
            psi0 = np.zeros(len(sub.atoms), dtype=complex)
            psi0[_initial_atom(section)] = 1.0
            traj = evolve_effective(coup.j_matrix, psi0, times)
        else:
            coup = markov_coupling_matrices(sub.atoms, sub.waveguide)
            rho0 = excited_density_matrix(len(sub.atoms), _initial_atom(section))
            traj = evolve_lindblad(coup.j_matrix, coup.gamma_matrix, rho0, times)
        pops = atom_populations(traj)
    else:
        raise ConfigError("evolve.model", f"unknown model {model!r}")
    for ti, t in enumerate(times):
        for a in range(pops.shape[1]):
            pop_rows.append((t, a, float(pops[ti, a])))
    return pop_rows, fid_rows, map_rows, warnings


def _initial_atom(section) -> int:
    spec = section.get("initial", "atom:0")
    if not spec.startswith("atom:"):
        raise ConfigError("evolve.initial", "effective models start from 'atom:<i>'")
    return int(spec.split(":", 1)[1])


def run_evolve(cfg: ExperimentConfig, jobs: int = 1, want_map: bool = False) -> RunResult:
    res = RunResult()
    pops = Table("populations", ["label", "time", "atom", "value"])
    fid = Table("fidelity", ["label", "time", "value"])
    pmap = Table("photonmap", ["label", "time", "cell", "sublattice", "value"])
    for label, sub in _scenario_configs(cfg):
        pop_rows, fid_rows, map_rows, warns = _evolve_tables(label, sub, want_map)
        res.warnings.extend(f"{label or 'run'}: {w}" for w in warns)
        for t, a, v in pop_rows:
            pops.add(label, float(t), a, v)
        for t, v in fid_rows:
            fid.add(label, float(t), float(v))
        for t, c, s, v in map_rows:
            pmap.add(label, float(t), c, s, v)
    res.tables.append(pops)
    if fid.rows:
        res.tables.append(fid)
    if pmap.rows:
        res.tables.append(pmap)
    return res


def run_photon_map(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    cfg.raw.setdefault("evolve", {"model": "full", "initial": "atom:0"})
    return run_evolve(cfg, jobs, want_map=True)


def run_transfer(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    res = RunResult()
    section = cfg.section("transfer")
    source = int(section.get("source", 0))
    destination = int(section.get("destination", 1))
    pops = Table("populations", ["label", "time", "atom", "value"])
    for label, sub in _scenario_configs(cfg):
        if len(sub.atoms) < 2:
            raise ConfigError("atoms", "transfer experiments need two emitters")
        times = sub.grid("time")
        h = build_real_space_hamiltonian(sub.waveguide, sub.atoms, sub.disorder)
        psi0 = initial_state(h, f"atom:{source}")
        traj = evolve_full(h, psi0, times)
        res.warnings.extend(f"{label or 'run'}: {w}" for w in _band_warnings(sub, times))
        p = atom_populations(traj)
        for ti, t in enumerate(times):
            for a in range(p.shape[1]):
                pops.add(label, float(t), a, float(p[ti, a]))
        key = label or "run"
        try:
            m = transfer_metrics(traj, source, destination)
            res.metrics[key] = {"peak": m.peak, "period": m.period,
                                "t_first_peak": m.t_first_peak}
        except AnalysisError as exc:
            res.warnings.append(f"{key}: {exc}")
    res.tables.append(pops)
    return res


RUNNERS = {
    "spectrum": run_spectrum,
    "boundstate": run_boundstate,
    "sw-couplings": run_sw_couplings,
    "markov-scan": run_markov_scan,
    "evolve": run_evolve,
    "photon-map": run_photon_map,
    "transfer": run_transfer,
}


def _pmap(fn, work, jobs):
    if jobs <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, work, chunksize=max(1, len(work) // (4 * jobs))))


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    return RUNNERS[cfg.kind](cfg, jobs)
