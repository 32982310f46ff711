import math

import numpy as np
import pytest

from conftest import dense_annihilator, embed
from hfdslab import eigensolver
from hfdslab.fock import enumerate_sector
from hfdslab.models import (ALL_KINDS, CouplingDraw, ModelSpec,
                            build_hamiltonian, default_sector, draw_couplings,
                            free_ground_energy, free_orbitals, model_terms,
                            one_body_matrix)


def test_draw_determinism():
    spec = ModelSpec("syk", 6, u=1.0, seed=99)
    d1, d2 = draw_couplings(spec), draw_couplings(spec)
    for a, b in ((d1.t, d2.t), (d1.v, d2.v), (d1.j2, d2.j2), (d1.j4, d2.j4)):
        assert np.array_equal(a, b)
    d3 = draw_couplings(spec.with_seed(100))
    assert not np.array_equal(d1.j2, d3.j2)


def test_j2_hermitian_exact():
    d = draw_couplings(ModelSpec("syk", 8, seed=1))
    assert np.array_equal(d.j2, d.j2.conj().T)
    assert np.all(d.j2.diagonal().imag == 0)


def test_j4_symmetries_exact():
    j4 = draw_couplings(ModelSpec("syk", 6, seed=2)).j4
    assert np.array_equal(j4, -np.swapaxes(j4, 2, 3))
    assert np.array_equal(j4, -np.swapaxes(j4, 0, 1))
    assert np.array_equal(j4, np.conj(np.transpose(j4, (2, 3, 1, 0)).swapaxes(0, 1).swapaxes(2, 3)))
    # the hermitian pairing relation directly
    assert np.array_equal(j4, np.conj(np.transpose(j4, (2, 3, 0, 1))))


def test_unit_variance_monte_carlo():
    # sample mean of |J2_ij|^2 over many draws ~ 1 within 5%
    n = 4
    acc2, acc4, cnt2, cnt4 = 0.0, 0.0, 0, 0
    for seed in range(2500):
        d = draw_couplings(ModelSpec("syk", n, seed=seed))
        acc2 += (np.abs(d.j2) ** 2).sum()
        cnt2 += d.j2.size
        quad = np.abs(d.j4[0, 1, 0, 1]) ** 2 + np.abs(d.j4[0, 1, 2, 3]) ** 2
        acc4 += quad
        cnt4 += 2
    assert abs(acc2 / cnt2 - 1.0) < 0.05
    assert abs(acc4 / cnt4 - 1.0) < 0.05


def test_t_v_complex_normals():
    d = draw_couplings(ModelSpec("density", 6, seed=5))
    # E|t|^2 = 2 per entry (N(0,1) real and imaginary parts)
    assert abs((np.abs(d.t) ** 2).mean() - 2.0) < 0.6


HUBBARD_DIMER_E0 = {0.0: -2.0, 1.0: (1 - math.sqrt(17)) / 2,
                    8.0: (8 - math.sqrt(80)) / 2}


@pytest.mark.parametrize("u", [0.0, 1.0, 8.0])
def test_hubbard_dimer_oracle(u):
    # injected deterministic hopping [[0,1],[1,0]] with J = sqrt(2) gives an
    # effective hopping of 1: E0 = (U - sqrt(U^2 + 16)) / 2
    basis = enumerate_sector("spinful", 2, (1, 1))
    spec = ModelSpec("hubbard", 2, u=u, j=math.sqrt(2), seed=0)
    d = draw_couplings(spec)
    d = CouplingDraw(0, d.t, d.v, np.array([[0, 1], [1, 0]], dtype=complex), d.j4)
    ham = build_hamiltonian(spec, basis, draw=d)
    # independent 4x4 oracle, assembled by hand in the product basis
    # |up at 0, down at 0>, |0,1>, |1,0>, |1,1| with hopping t = 1
    t = 1.0
    hand = np.array([[u, t, t, 0], [t, 0, 0, t], [t, 0, 0, t], [0, t, t, u]],
                    dtype=complex)
    w_hand = np.linalg.eigvalsh(hand)
    gs = eigensolver.ground_state(ham)
    assert abs(gs.energy - w_hand[0]) < 1e-12
    assert abs(gs.energy - HUBBARD_DIMER_E0[u]) < 1e-10


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_hermitian_and_real_diagonal(kind):
    n = 4 if kind not in ("syk", "syk1d") else 6
    spec = ModelSpec(kind, n, u=1.7, seed=3)
    basis = default_sector(spec)
    ham = build_hamiltonian(spec, basis)
    assert ham.dim <= 500
    dense = ham.matrix.toarray()
    assert np.abs(dense - dense.conj().T).max() < 1e-12
    assert np.abs(dense.diagonal().imag).max() < 1e-12


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_dense_fock_space_oracle(kind):
    """Project the Jordan-Wigner dense construction onto the sector."""
    n = 3 if kind not in ("syk", "syk1d") else 5
    spec = ModelSpec(kind, n, u=0.9, j=0.8, seed=11)
    basis = default_sector(spec)
    ham = build_hamiltonian(spec, basis).matrix.toarray()
    n_modes = basis.n_modes
    ops = [dense_annihilator(m, n_modes) for m in range(n_modes)]
    full = np.zeros((2 ** n_modes, 2 ** n_modes), dtype=complex)
    from hfdslab.fock import CREATE

    for coeff, string in model_terms(spec):
        term = np.eye(2 ** n_modes, dtype=complex)
        for action, mode in string:
            term = term @ (ops[mode].conj().T if action == CREATE else ops[mode])
        full += coeff * term
    idx = basis.configs.astype(np.int64)
    assert np.abs(full[np.ix_(idx, idx)] - ham).max() < 1e-12


def test_density_diagonal_at_j_zero():
    spec = ModelSpec("density", 4, u=2.0, j=0.0, seed=8)
    basis = default_sector(spec)
    dense = build_hamiltonian(spec, basis).matrix.toarray()
    assert np.abs(dense - np.diag(dense.diagonal())).max() == 0.0


@pytest.mark.parametrize("kind", ["spin", "pair"])
def test_interaction_commutes_with_pairing_counter(kind):
    # at J = 0 the spin / pair interactions commute with the total
    # double-occupancy counter
    spec = ModelSpec(kind, 4, u=1.0, j=0.0, seed=4)
    basis = default_sector(spec)
    h = build_hamiltonian(spec, basis).matrix.toarray()
    n = basis.n_sites
    up = basis.configs & np.uint64((1 << n) - 1)
    down = basis.configs >> np.uint64(n)
    docc = np.bitwise_count(up & down).astype(float)
    x = np.diag(docc)
    assert np.abs(h @ x - x @ h).max() < 1e-12


def test_syk_free_limit_matches_one_body():
    spec = ModelSpec("syk", 8, u=0.0, j=1.0, seed=3)
    basis = default_sector(spec)
    gs = eigensolver.ground_state(build_hamiltonian(spec, basis))
    assert abs(gs.energy - free_ground_energy(spec, 4)) < 1e-10


def test_syk1d_locality():
    spec = ModelSpec("syk1d", 8, u=1.0, j=1.0, seed=6)
    for coeff, string in model_terms(spec):
        modes = [m for _, m in string]
        if len(string) == 2:
            assert abs(modes[0] - modes[1]) <= 1
        else:
            assert max(modes) - min(modes) <= 4


def test_sector_mismatch_raises():
    spec = ModelSpec("hubbard", 4, seed=0)
    with pytest.raises(ValueError):
        build_hamiltonian(spec, enumerate_sector("spinless", 4, 2))


def test_free_orbitals_reproduce_sector_ground_state():
    spec = ModelSpec("density", 4, u=0.0, seed=9)
    basis = default_sector(spec)
    gs = eigensolver.ground_state(build_hamiltonian(spec, basis))
    assert abs(gs.energy - free_ground_energy(spec, (2, 2))) < 1e-10
    phi = free_orbitals(spec, (2, 2))
    h = one_body_matrix(spec)
    # columns are eigenvectors of the one-body matrix
    res = h @ phi - phi @ (phi.conj().T @ h @ phi)
    assert np.abs(res).max() < 1e-10
