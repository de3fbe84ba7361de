import numpy as np
import pytest

import sshqed as sq


@pytest.fixture(scope="session", autouse=True)
def _warm_numerics():
    # first-call BLAS/quadrature setup costs would otherwise bill the first
    # runtime-budgeted acceptance test
    p = sq.WaveguideParams(0.3, 8)
    atom = sq.two_node_atom("a", "b", 0, 4, 0.1)
    sq.self_energy(0.0, atom, p)
    h = sq.build_real_space_hamiltonian(p, [atom])
    sq.evolve_full(h, sq.initial_state(h, "atom:0"), np.linspace(0.0, 1.0, 3))
    np.linalg.eigh(np.eye(64))
    yield
