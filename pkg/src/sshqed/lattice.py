"""Dimerized (SSH) waveguide lattice: Bloch quantities, emitters, real space.

Energies are dimensionless multiples of the mean hopping J, which never
appears as a number: the two alternating hoppings are j1 = 1 - delta
(intra-cell, A-B) and j2 = 1 + delta (inter-cell, B-A). The chain is a ring
of `cells` unit cells, each holding sublattice sites A and B. Times are in
units of 1/J.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import BandEdgeError, GaplessLatticeError

SUBLATTICES = ("A", "B")


@dataclass(frozen=True)
class WaveguideParams:
    """Ring of `cells` dimers with hopping asymmetry `delta`.

    delta > 0 (j1 < j2) is the topological phase, delta < 0 the trivial one,
    delta = 0 is gapless and rejected by every gap-dependent operation.
    """

    delta: float
    cells: int
    boundary: str = "periodic"

    def __post_init__(self):
        if not abs(self.delta) < 1.0:
            raise ValueError(f"dimerization needs |delta| < 1, got {self.delta}")
        if int(self.cells) != self.cells or self.cells < 2:
            raise ValueError(f"cells must be an integer >= 2, got {self.cells}")
        if self.boundary != "periodic":
            raise ValueError(f"only periodic boundary is supported, got {self.boundary!r}")

    @property
    def j1(self) -> float:
        return 1.0 - self.delta

    @property
    def j2(self) -> float:
        return 1.0 + self.delta


def dispersion(k, params: WaveguideParams):
    """Upper-band energy omega(k) = sqrt(j1^2 + j2^2 + 2 j1 j2 cos k) >= 0."""
    j1, j2 = params.j1, params.j2
    return np.sqrt(np.maximum(j1 * j1 + j2 * j2 + 2.0 * j1 * j2 * np.cos(k), 0.0))


def phase_angle(k, params: WaveguideParams):
    """Phase convention phi(k) with omega(k) * exp(i phi) = j1 + j2 exp(-ik).

    Continuous inside the zone; winds by 2 pi across it in the topological
    phase. This sign fixes every downstream coupling formula.
    """
    j1, j2 = params.j1, params.j2
    return -np.arctan2(j2 * np.sin(k), j1 + j2 * np.cos(k))


def dispersion_and_phase(k, params: WaveguideParams):
    return dispersion(k, params), phase_angle(k, params)


def bloch_factor(k, params: WaveguideParams):
    """f(k) = j1 + j2 exp(-ik) = omega(k) exp(i phi(k))."""
    return params.j1 + params.j2 * np.exp(-1j * np.asarray(k))


def group_velocity(k, params: WaveguideParams):
    """v_g = d omega / dk = -j1 j2 sin(k) / omega(k); antisymmetric in k."""
    w = dispersion(k, params)
    if np.any(w < 1e-12):
        raise BandEdgeError("group velocity undefined where omega(k) = 0 (delta = 0, k = pi)")
    return -params.j1 * params.j2 * np.sin(k) / w


def band_edges(params: WaveguideParams) -> np.ndarray:
    """The four band-edge energies {-2, -2|delta|, 2|delta|, 2}."""
    if params.delta == 0.0:
        raise GaplessLatticeError("delta = 0: the two bands touch and there are no gaps")
    d = abs(params.delta)
    return np.array([-2.0, -2.0 * d, 2.0 * d, 2.0])


def max_group_velocity(params: WaveguideParams, samples: int = 4097) -> float:
    k = np.linspace(1e-6, np.pi - 1e-6, samples)
    return float(np.max(np.abs(group_velocity(k, params))))


def recurrence_time(params: WaveguideParams, cells: Optional[int] = None) -> float:
    """Ring traversal time N / max|v_g|; revivals contaminate decay fits
    beyond about half of it."""
    n = params.cells if cells is None else cells
    return n / max_group_velocity(params)


@dataclass(frozen=True)
class CouplingNode:
    """One emitter attachment point: (cell, sublattice, strength)."""

    cell: int
    sublattice: str
    strength: float

    def __post_init__(self):
        object.__setattr__(self, "sublattice", str(self.sublattice).upper())
        if self.sublattice not in SUBLATTICES:
            raise ValueError(f"sublattice must be A or B, got {self.sublattice!r}")
        if self.strength < 0:
            raise ValueError(f"coupling strength must be >= 0, got {self.strength}")
        if int(self.cell) != self.cell:
            raise ValueError(f"cell index must be an integer, got {self.cell}")


@dataclass(frozen=True)
class GiantAtomSpec:
    """A (possibly multi-node) emitter: detuning plus attachment nodes.

    Nodes are kept sorted by (cell, sublattice); the first node is the
    phase-reference position for all momentum-space coupling functions.
    A single node reproduces a point-like (small) emitter.
    """

    detuning: float
    nodes: tuple

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes, key=lambda n: (n.cell, n.sublattice)))
        if not nodes:
            raise ValueError("an emitter needs at least one coupling node")
        seen = set()
        for n in nodes:
            key = (n.cell, n.sublattice)
            if key in seen:
                raise ValueError(f"duplicate coupling node at cell {n.cell} sublattice {n.sublattice}")
            seen.add(key)
        object.__setattr__(self, "nodes", nodes)

    @property
    def reference_cell(self) -> int:
        return self.nodes[0].cell

    @property
    def max_strength(self) -> float:
        return max(n.strength for n in self.nodes)


def small_atom(cell: int, sublattice: str, strength: float, detuning: float = 0.0) -> GiantAtomSpec:
    return GiantAtomSpec(detuning, (CouplingNode(cell, sublattice, strength),))


def two_node_atom(first: str, second: str, separation: int, cell: int = 0,
                  strength: float = 0.1, detuning: float = 0.0) -> GiantAtomSpec:
    """Two-node emitter: sublattice `first` at `cell`, `second` at `cell + separation`.

    The (first, second, separation) triple covers the dimer form ('a','b',0)
    and the four two-node arrangements with separated cells.
    """
    return GiantAtomSpec(detuning, (
        CouplingNode(cell, first, strength),
        CouplingNode(cell + separation, second, strength),
    ))


@dataclass(frozen=True)
class DisorderSpec:
    """Multiplicative off-diagonal disorder: every hopping scaled by
    (1 + xi) with xi uniform on [-strength, strength], from a seeded stream.
    strength = 0 reproduces the clean lattice bit-exactly."""

    strength: float
    seed: int

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError(f"disorder strength must be >= 0, got {self.strength}")


@dataclass(frozen=True)
class DisorderRealization:
    """Per-bond hoppings: j1_bonds[j] couples A_j-B_j, j2_bonds[j] couples
    B_j-A_{j+1} (wrapping at the ring)."""

    j1_bonds: np.ndarray
    j2_bonds: np.ndarray


def sample_disorder(params: WaveguideParams, spec: DisorderSpec) -> DisorderRealization:
    rng = np.random.default_rng(spec.seed)
    xi = rng.uniform(-1.0, 1.0, size=(params.cells, 2))
    j1_bonds = params.j1 * (1.0 + spec.strength * xi[:, 0])
    j2_bonds = params.j2 * (1.0 + spec.strength * xi[:, 1])
    return DisorderRealization(j1_bonds, j2_bonds)


def site_index(cell: int, sublattice: str) -> int:
    return 2 * cell + (0 if sublattice.upper() == "A" else 1)


@dataclass
class RealSpaceHamiltonian:
    """Single-excitation Hamiltonian on photon sites then atoms.

    Ordering: site (cell j, A) -> 2j, (cell j, B) -> 2j + 1, atom i -> 2N + i.
    """

    matrix: np.ndarray
    params: WaveguideParams
    atoms: tuple
    hoppings: DisorderRealization

    @property
    def n_cells(self) -> int:
        return self.params.cells

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def site_index(self, cell: int, sublattice: str) -> int:
        return site_index(cell % self.n_cells, sublattice)

    def atom_index(self, atom: int) -> int:
        return 2 * self.n_cells + atom

    @cached_property
    def eig(self):
        """Cached (eigenvalues, eigenvectors) of the Hermitian matrix."""
        return np.linalg.eigh(self.matrix)

    def photonic_block(self) -> np.ndarray:
        n = 2 * self.n_cells
        return self.matrix[:n, :n]


def build_real_space_hamiltonian(params: WaveguideParams,
                                 atoms: Sequence[GiantAtomSpec] = (),
                                 disorder: Optional[DisorderSpec] = None) -> RealSpaceHamiltonian:
    """Assemble the ring + emitters Hamiltonian (Hermitian, real entries).

    Photonic block: sum_j j1 a_j^dag b_j + j2 a_{j+1}^dag b_j + h.c. with the
    wrap-around bond B_{N-1} - A_0. Atom block carries the detunings; nodes
    couple atoms to their sites.
    """
    n = params.cells
    atoms = tuple(atoms)
    if disorder is None:
        hop = DisorderRealization(np.full(n, params.j1), np.full(n, params.j2))
    else:
        hop = sample_disorder(params, disorder)

    dim = 2 * n + len(atoms)
    h = np.zeros((dim, dim), dtype=complex)
    cells = np.arange(n)
    a_idx, b_idx = 2 * cells, 2 * cells + 1
    a_next = 2 * ((cells + 1) % n)
    h[a_idx, b_idx] += hop.j1_bonds
    h[b_idx, a_idx] += hop.j1_bonds
    h[a_next, b_idx] += hop.j2_bonds
    h[b_idx, a_next] += hop.j2_bonds

    for i, atom in enumerate(atoms):
        ai = 2 * n + i
        h[ai, ai] = atom.detuning
        for node in atom.nodes:
            if not 0 <= node.cell < n:
                raise ValueError(
                    f"atom {i} node cell {node.cell} outside lattice of {n} cells")
            s = site_index(node.cell, node.sublattice)
            h[s, ai] += node.strength
            h[ai, s] += node.strength

    return RealSpaceHamiltonian(h, params, atoms, hop)


def sublattice_parity(n_cells: int) -> np.ndarray:
    """Diagonal of the chiral operator on the photonic sites: +1 on A, -1 on B."""
    d = np.ones(2 * n_cells)
    d[1::2] = -1.0
    return d
