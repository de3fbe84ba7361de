"""Multi-node emitters coupled to a dimerized photonic waveguide."""

from .boundstates import (BoundEnergies, BoundState, DetuningSpectrum,
                          bound_amplitudes_closed_form, bound_amplitudes_numeric,
                          classify_energy, self_energy, solve_bound_energies,
                          spectrum_vs_detuning)
from .couplings import (CouplingFunctions, EffectiveCouplings,
                        bandgap_coupling_matrix, coupling_functions,
                        markov_coupling_matrices, markov_gamma,
                        markov_gamma_eta_sweep, resonant_momentum,
                        sw_coupling_closed_form, sw_coupling_integral,
                        validity_margin)
from .dynamics import (Trajectory, TransferMetrics, atom_populations,
                       evolve_effective, evolve_full, evolve_lindblad,
                       excited_density_matrix, fidelity, initial_state,
                       photon_number_map, transfer_metrics)
from .lattice import (CouplingNode, DisorderRealization, DisorderSpec,
                      GiantAtomSpec, RealSpaceHamiltonian, WaveguideParams,
                      band_edges, build_real_space_hamiltonian, dispersion,
                      dispersion_and_phase, group_velocity, max_group_velocity,
                      phase_angle, recurrence_time, sample_disorder, site_index,
                      small_atom, sublattice_parity, two_node_atom)

__version__ = "0.1.0"
