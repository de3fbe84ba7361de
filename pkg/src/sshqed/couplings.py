"""Momentum-space coupling functions and waveguide-mediated couplings.

For an emitter with nodes at cells c_i (phase-referenced to its first node)
the band coupling amplitudes are

    p(k) = (A(k) + B(k) e^{i phi(k)}) / sqrt(2)     (upper band)
    q(k) = (-A(k) + B(k) e^{i phi(k)}) / sqrt(2)    (lower band)

with A(k) = sum over A-nodes g e^{-ik (c - ref)} and B(k) likewise over
B-nodes. Cross couplings between emitters n, m carry conj(p_n) p_m and the
inter-reference phase e^{i k x_nm}, x_nm = ref_n - ref_m; that index order is
what reproduces the chiral (one-sided) coupling of sublattice-polarized
emitters in the topological phase.

Two regimes:
  * detuning in a gap  -> dispersive dipole coupling J_nm (real), from a
    smooth zone integral or, for dimer-form emitters at zero detuning, in
    closed form;
  * detuning in a band -> complex Gamma_nm = gamma_nm + i J_nm with the
    dissipative part from the resonant momenta (residues) and the coherent
    part from a principal-value integral. gamma is normalized so a lone
    excited emitter decays as exp(-2 gamma t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (BandEdgeError, DissipatorError, ExtrapolationError,
                     GaplessLatticeError, RegimeError)
from .lattice import (GiantAtomSpec, WaveguideParams, band_edges, dispersion,
                      phase_angle)
from .quadrature import bz_mean, half_bz_mean_even


@dataclass(frozen=True)
class CouplingFunctions:
    """Evaluator for one emitter's band coupling amplitudes p(k), q(k)."""

    atom: GiantAtomSpec
    params: WaveguideParams

    def sublattice_sums(self, k):
        """A(k), B(k): node strengths with intra-emitter phases."""
        k = np.asarray(k, dtype=float)
        a = np.zeros(k.shape, dtype=complex)
        b = np.zeros(k.shape, dtype=complex)
        ref = self.atom.reference_cell
        for node in self.atom.nodes:
            term = node.strength * np.exp(-1j * k * (node.cell - ref))
            if node.sublattice == "A":
                a = a + term
            else:
                b = b + term
        return a, b

    def pq(self, k):
        a, b = self.sublattice_sums(k)
        rot = b * np.exp(1j * phase_angle(k, self.params))
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        return (a + rot) * inv_sqrt2, (-a + rot) * inv_sqrt2


def coupling_functions(atom: GiantAtomSpec, params: WaveguideParams) -> CouplingFunctions:
    return CouplingFunctions(atom, params)


def _gap_location(energy: float, params: WaveguideParams, margin: float):
    """Classify an energy against the bands; returns the gap name or raises."""
    if params.delta == 0.0:
        raise GaplessLatticeError("delta = 0: no gap anywhere")
    lo, hi = 2.0 * abs(params.delta), 2.0
    a = abs(energy)
    if min(abs(a - lo), abs(a - hi)) <= margin:
        raise BandEdgeError(f"energy {energy} is within {margin} of a band edge")
    if lo < a < hi:
        raise RegimeError(f"energy {energy} lies inside a band")
    if a < lo:
        return "middle"
    return "upper" if energy > 0 else "lower"


def _pair_integrand(atom_n, atom_m, params):
    cf_n = CouplingFunctions(atom_n, params)
    cf_m = CouplingFunctions(atom_m, params)
    x_nm = atom_n.reference_cell - atom_m.reference_cell

    def terms(k):
        p_n, q_n = cf_n.pq(k)
        p_m, q_m = cf_m.pq(k)
        phase = np.exp(1j * np.asarray(k) * x_nm)
        return np.conj(p_n) * p_m * phase, np.conj(q_n) * q_m * phase

    return terms


def sw_coupling_integral(atom_n: GiantAtomSpec, atom_m: GiantAtomSpec,
                         detuning: float, params: WaveguideParams,
                         tol: float = 1e-10) -> complex:
    """Gap-regime dipole coupling J_nm(detuning) by zone quadrature.

    Valid for detuning strictly inside a gap; pair it with validity_margin
    to know how trustworthy the second-order elimination is.
    """
    _gap_location(detuning, params, margin=1e-9)
    edge_dist = np.min(np.abs(band_edges(params) - detuning))
    terms = _pair_integrand(atom_n, atom_m, params)

    def integrand(k):
        w = dispersion(k, params)
        tp, tq = terms(k)
        return tp / (detuning - w) + tq / (detuning + w)

    cluster = 0.97 if edge_dist < 0.05 else 0.0
    return complex(bz_mean(integrand, tol=tol, cluster=cluster))


def sw_coupling_closed_form(x_nm: int, params: WaveguideParams,
                            g_a: float, g_b: float) -> float:
    """Zero-detuning dipole coupling between dimer-form emitters.

    Topological phase: 0 at x_nm = 0, else g_a g_b (-1)^x / j1 (j1/j2)^|x|.
    Trivial phase: -2 g_a g_b / j1 at x_nm = 0, else
    -g_a g_b (-1)^x / j1 (j2/j1)^|x|.
    """
    if params.delta == 0.0:
        raise GaplessLatticeError("closed form needs a gapped lattice")
    j1, j2 = params.j1, params.j2
    n = abs(int(x_nm))
    sign = -1.0 if n % 2 else 1.0
    if params.delta > 0:
        if n == 0:
            return 0.0
        return g_a * g_b * sign / j1 * (j1 / j2) ** n
    if n == 0:
        return -2.0 * g_a * g_b / j1
    return -g_a * g_b * sign / j1 * (j2 / j1) ** n


def resonant_momentum(detuning: float, params: WaveguideParams,
                      edge_margin: float = 1e-8) -> float:
    """k0 in (0, pi) with omega(k0) = |detuning|; requires a band-interior detuning."""
    j1, j2 = params.j1, params.j2
    lo, hi = 2.0 * abs(params.delta), 2.0
    a = abs(detuning)
    if a <= lo + edge_margin or a >= hi - edge_margin:
        if lo - edge_margin < a < lo + edge_margin or hi - edge_margin < a < hi + edge_margin:
            raise BandEdgeError(f"detuning {detuning} sits at a band edge")
        raise RegimeError(f"detuning {detuning} is not inside a band")
    c = (detuning * detuning - j1 * j1 - j2 * j2) / (2.0 * j1 * j2)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def markov_gamma(atom_n: GiantAtomSpec, atom_m: GiantAtomSpec,
                 detuning: float, params: WaveguideParams,
                 tol: float = 1e-10) -> complex:
    """Band-regime reservoir coupling Gamma_nm = gamma_nm + i J_nm.

    gamma: sum over the two resonant momenta +-k0 (the band is picked by the
    detuning sign), each contributing conj(p~_n) p~_m e^{i k x_nm} / (2|v_g|).
    J: principal-value zone integral, computed by subtracting the constant
    that cancels the pole and adding back the kernel's principal value,
    which reduces to a smooth integral.
    """
    k0 = resonant_momentum(detuning, params)
    j1, j2 = params.j1, params.j2
    vg = j1 * j2 * np.sin(k0) / abs(detuning)
    if vg <= 0:
        raise BandEdgeError("vanishing group velocity at the resonant momentum")

    terms = _pair_integrand(atom_n, atom_m, params)
    upper = detuning > 0

    def f_pole(k):
        tp, tq = terms(k)
        return 2.0 * np.real(tp if upper else tq)

    def f_reg(k):
        tp, tq = terms(k)
        return 2.0 * np.real(tq if upper else tp)

    tp0, tq0 = terms(np.array([k0]))
    res = complex((tp0 if upper else tq0)[0])
    gamma = float(np.real(res)) / vg

    f0 = float(f_pole(np.array([k0]))[0])
    a = abs(detuning)

    def pole_part(k):
        w = dispersion(k, params)
        num = f_pole(k) - f0
        den = (detuning - w) if upper else (detuning + w)
        out = np.where(np.abs(den) > 1e-9, num / np.where(den == 0.0, 1.0, den), 0.0)
        # removable point: limit is -f'(k0)/omega'(k0) up the branch with the pole
        bad = np.abs(den) <= 1e-9
        if np.any(bad):
            eps = 1e-6
            dfp = (f_pole(np.array([k0 + eps])) - f_pole(np.array([k0 - eps])))[0] / (2 * eps)
            dw = -j1 * j2 * np.sin(k0) / a
            sgn = -1.0 if upper else 1.0
            out = np.where(bad, sgn * dfp / dw, out)
        return out

    def smooth_part(k):
        w = dispersion(k, params)
        den = (detuning + w) if upper else (detuning - w)
        return f_reg(k) / den

    def kernel(k):
        return 1.0 / (a + dispersion(k, params))

    pv = half_bz_mean_even(pole_part, tol=tol)
    kern = half_bz_mean_even(kernel, tol=tol)
    smooth = half_bz_mean_even(smooth_part, tol=tol)
    # PV of the constant-coefficient kernel: PV int dk/(Delta -+ omega) over
    # the zone equals -+ int dk/(|Delta| + omega): the interior-pole part
    # integrates to zero exactly.
    j_part = float(pv - f0 * kern + smooth) if upper else float(pv + f0 * kern + smooth)
    return complex(gamma + 1j * 0.5 * j_part)


def markov_gamma_eta_sweep(atom_n: GiantAtomSpec, atom_m: GiantAtomSpec,
                           detuning: float, params: WaveguideParams,
                           etas: Sequence[float] = None,
                           spread_tol: float = 1e-4) -> complex:
    """Oracle for markov_gamma: eta-regularized integral, extrapolated to 0.

    Evaluates Gamma(eta) = i * mean_k of the regularized integrand at each
    eta and Richardson-extrapolates; the last two diagonal estimates must
    agree within spread_tol. The default eta ladder shrinks with the
    distance to the nearest band edge, where Gamma(eta) varies fastest.
    """
    if etas is None:
        edge_dist = float(np.min(np.abs(np.abs(band_edges(params)) - abs(detuning)))) \
            if params.delta != 0.0 else 0.1
        eta0 = min(0.08, max(edge_dist / 4.0, 1e-4))
        etas = [eta0 / 2 ** i for i in range(4)]
    etas = sorted(float(e) for e in etas)[::-1]
    if len(etas) < 2 or etas[-1] <= 0:
        raise ValueError("need at least two positive, decreasing eta values")
    terms = _pair_integrand(atom_n, atom_m, params)

    values = []
    for eta in etas:
        z = detuning + 1j * eta
        n0 = 1 << max(14, int(np.ceil(np.log2(640.0 / eta))))

        def integrand(k, z=z):
            w = dispersion(k, params)
            tp, tq = terms(k)
            return 1j * (tp / (z - w) + tq / (z + w))

        values.append(complex(bz_mean(integrand, tol=1e-12, n0=min(n0, 1 << 19),
                                      max_doublings=2)))

    # Neville table in eta toward 0; diagonal entries are the refined limits.
    tab = [list(values)]
    for level in range(1, len(etas)):
        prev = tab[-1]
        row = []
        for i in range(len(prev) - 1):
            e_lo, e_hi = etas[i + level], etas[i]
            row.append(prev[i + 1] + (prev[i + 1] - prev[i]) * e_lo / (e_hi - e_lo))
        tab.append(row)
    diag = [tab[level][0] for level in range(len(etas))]
    spread = abs(diag[-1] - diag[-2])
    if spread > spread_tol:
        raise ExtrapolationError(
            f"eta extrapolation spread {spread:.2e} exceeds {spread_tol:.0e}")
    return diag[-1]


def validity_margin(atom: GiantAtomSpec, detuning: float,
                    params: WaveguideParams) -> float:
    """max node strength / min distance of the detuning to a band edge.

    Ratios below 0.25 are treated as safely dispersive by callers; exactly
    at an edge the ratio is infinite.
    """
    g = atom.max_strength
    if g == 0.0:
        return 0.0
    dist = float(np.min(np.abs(band_edges(params) - detuning)))
    if dist == 0.0:
        return float("inf")
    return g / dist


@dataclass(frozen=True)
class EffectiveCouplings:
    """M x M coherent (j_matrix) and dissipative (gamma_matrix) couplings."""

    j_matrix: np.ndarray
    gamma_matrix: np.ndarray
    regime: str
    detuning: float

    def __post_init__(self):
        for name, m in (("j_matrix", self.j_matrix), ("gamma_matrix", self.gamma_matrix)):
            if np.max(np.abs(m - m.conj().T)) > 1e-10:
                raise ValueError(f"{name} must be Hermitian")
        d = np.real(np.diag(self.gamma_matrix))
        if np.any(d < -1e-10):
            raise DissipatorError("negative on-site dissipation rate")


def _common_detuning(atoms) -> float:
    det = {a.detuning for a in atoms}
    if len(det) != 1:
        raise ValueError("effective couplings need a common detuning; got " + str(sorted(det)))
    return det.pop()


def bandgap_coupling_matrix(atoms: Sequence[GiantAtomSpec],
                            params: WaveguideParams) -> EffectiveCouplings:
    """Dispersive-regime couplings for a set of emitters (gamma = 0)."""
    atoms = tuple(atoms)
    detuning = _common_detuning(atoms)
    m = len(atoms)
    j = np.zeros((m, m), dtype=complex)
    for n in range(m):
        j[n, n] = np.real(sw_coupling_integral(atoms[n], atoms[n], detuning, params))
        for mm in range(n + 1, m):
            val = sw_coupling_integral(atoms[n], atoms[mm], detuning, params)
            j[n, mm] = val
            j[mm, n] = np.conj(val)
    return EffectiveCouplings(j, np.zeros((m, m), dtype=complex), "bandgap", detuning)


def markov_coupling_matrices(atoms: Sequence[GiantAtomSpec],
                             params: WaveguideParams) -> EffectiveCouplings:
    """Band-regime coherent and dissipative coupling matrices."""
    atoms = tuple(atoms)
    detuning = _common_detuning(atoms)
    m = len(atoms)
    j = np.zeros((m, m), dtype=complex)
    g = np.zeros((m, m), dtype=complex)
    for n in range(m):
        for mm in range(n, m):
            val = markov_gamma(atoms[n], atoms[mm], detuning, params)
            g[n, mm], j[n, mm] = np.real(val), np.imag(val)
            g[mm, n], j[mm, n] = np.real(val), np.imag(val)
    return EffectiveCouplings(j, g, "band", detuning)
