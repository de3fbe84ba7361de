"""Single-excitation dynamics: exact, effective, and dissipative.

Exact evolution uses the spectral decomposition of the time-independent
real-space Hamiltonian (dimensions stay small enough that this is both exact
and cheap). The effective spin model evolves the M-dimensional excited block
the same way. The correlated-decay master equation runs on the (M+1)-dim
emitter space with a classic 4th-order step and step-halving error control.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import AnalysisError, DissipatorError
from .lattice import RealSpaceHamiltonian


@dataclass(frozen=True)
class Trajectory:
    """Recorded evolution: pure states (kind='pure') or density matrices
    (kind='lindblad') on a monotone time grid."""

    times: np.ndarray
    states: Optional[np.ndarray]      # (T, D) amplitudes, pure evolution
    rhos: Optional[np.ndarray]        # (T, d, d), master equation
    kind: str
    n_cells: int = 0
    n_atoms: int = 0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) < 0):
            raise ValueError("times must be a monotone 1-d grid")


def _check_times(times):
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(np.diff(t) < 0):
        raise ValueError("times must be a non-empty monotone 1-d grid")
    return t


def evolve_full(h: RealSpaceHamiltonian, psi0: np.ndarray, times) -> Trajectory:
    """Exact propagation psi(t) = sum_e e^{-i E_e t} <e|psi0> |e>."""
    t = _check_times(times)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (h.dimension,):
        raise ValueError(f"state dimension {psi0.shape} != {h.dimension}")
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"initial state not normalized (|psi| = {nrm})")
    energies, vectors = h.eig
    coeff = vectors.conj().T @ psi0
    # states[t] = V @ (coeff * e^{-iEt})
    states = (vectors @ (coeff[:, None] * np.exp(-1j * np.outer(energies, t)))).T
    norms = np.linalg.norm(states, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-10:
        raise ArithmeticError("norm drifted beyond 1e-10 under closed evolution")
    return Trajectory(t, states, None, "pure", h.n_cells, h.n_atoms)


def evolve_effective(j_matrix: np.ndarray, psi0: np.ndarray, times) -> Trajectory:
    """Unitary evolution under the excited-block coupling matrix."""
    j_matrix = np.asarray(j_matrix, dtype=complex)
    if np.max(np.abs(j_matrix - j_matrix.conj().T)) > 1e-10:
        raise ValueError("coupling matrix must be Hermitian")
    t = _check_times(times)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (j_matrix.shape[0],):
        raise ValueError("state dimension does not match the coupling matrix")
    energies, vectors = np.linalg.eigh(j_matrix)
    coeff = vectors.conj().T @ psi0
    states = (vectors @ (coeff[:, None] * np.exp(-1j * np.outer(energies, t)))).T
    norms = np.linalg.norm(states, axis=1)
    if np.max(np.abs(norms - np.linalg.norm(psi0))) > 1e-10:
        raise ArithmeticError("norm drifted beyond 1e-10 under closed evolution")
    return Trajectory(t, states, None, "pure", 0, j_matrix.shape[0])


def _lindblad_superoperator(j_matrix: np.ndarray, gamma_matrix: np.ndarray) -> np.ndarray:
    """Vectorized (row-major) generator on the (M+1)-dim emitter space:
    basis index 0 is the shared ground state, 1 + n the n-th excited state."""
    m = j_matrix.shape[0]
    d = m + 1
    ident = np.eye(d, dtype=complex)
    h = np.zeros((d, d), dtype=complex)
    h[1:, 1:] = j_matrix
    sup = -1j * (np.kron(h, ident) - np.kron(ident, h.T))
    for n in range(m):
        l_n = np.zeros((d, d), dtype=complex)
        l_n[0, 1 + n] = 1.0
        for mm in range(m):
            g = gamma_matrix[n, mm]
            if g == 0.0:
                continue
            l_m = np.zeros((d, d), dtype=complex)
            l_m[0, 1 + mm] = 1.0
            anti = l_m.conj().T @ l_n
            sup += g * (2.0 * np.kron(l_n, l_m.conj())
                        - np.kron(anti, ident) - np.kron(ident, anti.T))
    return sup


def evolve_lindblad(j_matrix: np.ndarray, gamma_matrix: np.ndarray,
                    rho0: np.ndarray, times, tol: float = 1e-9) -> Trajectory:
    """Master-equation evolution with correlated decay.

    gamma_matrix must be Hermitian with eigenvalues above the -1e-10
    numerical floor; a clearly negative eigenvalue (< -1e-6) means the
    gap-regime couplings were passed in and is rejected.
    """
    j_matrix = np.asarray(j_matrix, dtype=complex)
    gamma_matrix = np.asarray(gamma_matrix, dtype=complex)
    if np.max(np.abs(gamma_matrix - gamma_matrix.conj().T)) > 1e-10:
        raise ValueError("gamma matrix must be Hermitian")
    if float(np.min(np.linalg.eigvalsh(gamma_matrix))) < -1e-6:
        raise DissipatorError("gamma matrix has a negative eigenvalue; "
                              "these are not band-regime couplings")
    t = _check_times(times)
    d = j_matrix.shape[0] + 1
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 must be {(d, d)}, got {rho0.shape}")
    if abs(np.trace(rho0) - 1.0) > 1e-8:
        raise ValueError("rho0 must have unit trace")

    sup = _lindblad_superoperator(j_matrix, gamma_matrix)

    def rhs(vec):
        return sup @ vec

    def rk4(vec, h):
        k1 = rhs(vec)
        k2 = rhs(vec + 0.5 * h * k1)
        k3 = rhs(vec + 0.5 * h * k2)
        k4 = rhs(vec + h * k3)
        return vec + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    vec = rho0.reshape(-1)
    rhos = [rho0.copy()]
    scale = max(1.0, float(np.max(np.abs(sup))) )
    h = min(0.1, 0.5 / scale)
    for i in range(len(t) - 1):
        t_now, t_next = t[i], t[i + 1]
        while t_now < t_next - 1e-15:
            step = min(h, t_next - t_now)
            full = rk4(vec, step)
            half = rk4(rk4(vec, 0.5 * step), 0.5 * step)
            err = float(np.max(np.abs(full - half))) / 15.0
            budget = tol * max(step, 1e-12)
            if err <= budget:
                vec = half + (half - full) / 15.0
                t_now += step
                h = step * min(5.0, max(0.5, 0.9 * (budget / max(err, 1e-300)) ** 0.2))
            else:
                h = step * max(0.2, 0.9 * (budget / err) ** 0.2)
        rho = vec.reshape(d, d)
        rho = 0.5 * (rho + rho.conj().T)
        if abs(np.trace(rho).real - 1.0) > 1e-8:
            raise ArithmeticError("trace drifted beyond 1e-8 in the master equation")
        rhos.append(rho.copy())
        vec = rho.reshape(-1)
    return Trajectory(t, None, np.array(rhos[:len(t)]), "lindblad", 0, d - 1)


def atom_populations(traj: Trajectory) -> np.ndarray:
    """(T, M) excited-state populations."""
    if traj.kind == "pure":
        cols = traj.states[:, traj.states.shape[1] - traj.n_atoms:]
        return np.abs(cols) ** 2
    return np.real(np.einsum("tii->ti", traj.rhos[:, 1:, 1:]))


def photon_number_map(traj: Trajectory) -> np.ndarray:
    """(T, 2N) per-site photon occupation, sites ordered (cell, A/B)."""
    if traj.kind != "pure" or traj.n_cells == 0:
        raise ValueError("photon map needs a full-model trajectory")
    return np.abs(traj.states[:, :2 * traj.n_cells]) ** 2


def fidelity(traj: Trajectory, target: np.ndarray) -> np.ndarray:
    """|<target|psi(t)>| (modulus, so the result is gauge independent)."""
    if traj.kind != "pure":
        raise ValueError("fidelity against a pure target needs a pure trajectory")
    target = np.asarray(target, dtype=complex)
    if target.shape != traj.states.shape[1:]:
        raise ValueError("target dimension mismatch")
    return np.abs(traj.states @ target.conj())


@dataclass(frozen=True)
class TransferMetrics:
    peak: float            # best destination population anywhere in the window
    period: float          # peak-to-peak time of the slow transfer envelope
    t_first_peak: float    # time of the first transfer maximum


def _refine_peak(times, values, i):
    # parabola through the discrete maximum and neighbors
    if i == 0 or i == len(values) - 1:
        return times[i], values[i]
    y0, y1, y2 = values[i - 1], values[i], values[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return times[i], values[i]
    shift = 0.5 * (y0 - y2) / denom
    dt = times[i + 1] - times[i]
    return times[i] + shift * dt, y1 - 0.25 * (y0 - y2) * shift


def transfer_metrics(traj: Trajectory, source: int, destination: int,
                     min_height: float = 0.05,
                     smooth_time: Optional[float] = None) -> TransferMetrics:
    """Peak success probability plus the envelope period of the destination
    population.

    Exact evolution superposes fast scattering-state wiggles on the slow
    transfer envelope, so peak positions are located on a boxcar-smoothed
    copy (window `smooth_time`, default 1/50 of the span) and the success
    probability is read off the raw series. Needs at least one full
    oscillation in the window.
    """
    pops = atom_populations(traj)
    series = np.asarray(pops[:, destination], dtype=float)
    t = traj.times
    span = float(t[-1] - t[0])
    if smooth_time is None:
        smooth_time = span / 50.0
    dt = span / max(len(t) - 1, 1)
    win = max(1, int(round(smooth_time / max(dt, 1e-30))))
    kernel = np.ones(win) / win
    smooth = np.convolve(series, kernel, mode="same")
    # boxcar edges are biased; keep peaks clear of half a window from the ends
    guard = win // 2 + 1
    idx = [i for i in range(max(1, guard), len(smooth) - max(1, guard))
           if smooth[i] >= smooth[i - 1] and smooth[i] > smooth[i + 1]
           and smooth[i] > min_height]
    # merge maxima closer than the smoothing window (plateau artifacts)
    merged = []
    for i in idx:
        if merged and (t[i] - t[merged[-1]]) < 2 * smooth_time:
            if smooth[i] > smooth[merged[-1]]:
                merged[-1] = i
        else:
            merged.append(i)
    if len(merged) < 2:
        raise AnalysisError("no full oscillation of the destination population "
                            "in the time window")
    t1, _ = _refine_peak(t, smooth, merged[0])
    t2, _ = _refine_peak(t, smooth, merged[1])
    # first transfer maximum from the raw series inside the first envelope hump
    trough = merged[0] + int(np.argmin(smooth[merged[0]:merged[1]]))
    i_raw = int(np.argmax(series[:trough + 1]))
    t_first, _ = _refine_peak(t, series, i_raw)
    return TransferMetrics(float(np.max(series)), float(t2 - t1), float(t_first))


def initial_state(h: RealSpaceHamiltonian, spec: str) -> np.ndarray:
    """Named initial states: 'atom:<i>', 'site:<cell>:<A|B>',
    'plus:<i>,<j>' / 'minus:<i>,<j>' (emitter superpositions)."""
    psi = np.zeros(h.dimension, dtype=complex)
    kind, _, rest = spec.partition(":")
    if kind == "atom":
        psi[h.atom_index(int(rest))] = 1.0
    elif kind == "site":
        cell, _, subl = rest.partition(":")
        psi[h.site_index(int(cell), subl or "A")] = 1.0
    elif kind in ("plus", "minus"):
        i, j = (int(x) for x in rest.split(","))
        sign = 1.0 if kind == "plus" else -1.0
        psi[h.atom_index(i)] = 1.0 / np.sqrt(2.0)
        psi[h.atom_index(j)] = sign / np.sqrt(2.0)
    else:
        raise ValueError(f"unknown initial-state spec {spec!r}")
    return psi


def atom_excited_state(n_atoms: int, which: int) -> np.ndarray:
    """Effective-model initial state on the excited block."""
    psi = np.zeros(n_atoms, dtype=complex)
    psi[which] = 1.0
    return psi


def excited_density_matrix(n_atoms: int, which: int) -> np.ndarray:
    """(M+1)-dim density matrix with emitter `which` excited."""
    rho = np.zeros((n_atoms + 1, n_atoms + 1), dtype=complex)
    rho[1 + which, 1 + which] = 1.0
    return rho
