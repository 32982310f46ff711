import math
from itertools import combinations

import numpy as np
import pytest

from hfdslab.fock import (ANNIHILATE, CREATE, Spin, apply_string,
                          enumerate_sector, mode_id, occupation_vector,
                          sector_dimension)


def test_spinless_enumeration_matches_example():
    basis = enumerate_sector("spinless", 4, 2)
    assert basis.dim == 6
    assert [int(c) for c in basis.configs] == [0b0011, 0b0101, 0b0110,
                                               0b1001, 0b1010, 0b1100]


@pytest.mark.parametrize("n_up,n_down,dim", [(4, 4, 4900), (3, 3, 3136)])
def test_spinful_enumeration_sizes(n_up, n_down, dim):
    basis = enumerate_sector("spinful", 8, (n_up, n_down))
    assert basis.dim == dim == sector_dimension("spinful", 8, (n_up, n_down))


def test_enumeration_counts_match_binomials():
    for n_sites in range(1, 13):
        for n in range(n_sites + 1):
            basis = enumerate_sector("spinless", n_sites, n)
            assert basis.dim == math.comb(n_sites, n)
            assert np.all(np.diff(basis.configs.astype(np.int64)) > 0)
            assert np.all(np.bitwise_count(basis.configs) == n)


def test_spinful_per_spin_popcounts():
    basis = enumerate_sector("spinful", 5, (3, 2))
    up = basis.configs & np.uint64((1 << 5) - 1)
    down = basis.configs >> np.uint64(5)
    assert np.all(np.bitwise_count(up) == 3)
    assert np.all(np.bitwise_count(down) == 2)
    assert np.all(np.diff(basis.configs.astype(np.int64)) > 0)


def test_invalid_counts_raise():
    with pytest.raises(ValueError):
        enumerate_sector("spinless", 4, 5)
    with pytest.raises(ValueError):
        enumerate_sector("spinful", 4, (5, 1))
    with pytest.raises(ValueError):
        enumerate_sector("bogus", 4, 2)


def test_index_lookup_bijective():
    basis = enumerate_sector("spinful", 4, (2, 2))
    for i, c in enumerate(basis.configs):
        assert basis.index(int(c)) == i
    with pytest.raises(KeyError):
        basis.index(0)  # zero particles, not in this sector


# hand-evaluated Jordan-Wigner examples (parity over strictly lower modes,
# right-to-left application)
def test_apply_string_examples():
    assert apply_string(0b0011, [(CREATE, 2), (ANNIHILATE, 0)]) == (0b0110, -1)
    assert apply_string(0b0011, [(ANNIHILATE, 2)]) is None
    assert apply_string(0b0101, [(CREATE, 1), (ANNIHILATE, 1)]) is None


def test_number_operator_identity():
    for n_modes in (3, 4, 5):
        for config in range(1 << n_modes):
            for m in range(n_modes):
                if not (config >> m) & 1:
                    continue
                res = apply_string(config, [(CREATE, m), (ANNIHILATE, m)])
                assert res == (config, 1)


def test_creation_anticommutation_exhaustive():
    # c_i^dag c_j^dag = -c_j^dag c_i^dag for i != j, every config, N_S <= 4
    for n_modes in (2, 3, 4):
        for config in range(1 << n_modes):
            for i in range(n_modes):
                for j in range(n_modes):
                    if i == j:
                        continue
                    r1 = apply_string(config, [(CREATE, i), (CREATE, j)])
                    r2 = apply_string(config, [(CREATE, j), (CREATE, i)])
                    if r1 is None:
                        assert r2 is None
                    else:
                        assert r1[0] == r2[0] and r1[1] == -r2[1]


def test_double_creation_annihilates():
    assert apply_string(0b0001, [(CREATE, 0)]) is None
    assert apply_string(0b0000, [(CREATE, 1), (CREATE, 1)]) is None


def test_occupation_vector_examples():
    assert np.array_equal(occupation_vector(0b0011, 4), [1.0, 1.0, -1.0, -1.0])
    assert np.array_equal(occupation_vector(0b0000, 4), [-1.0] * 4)
    assert np.array_equal(occupation_vector(0b1111, 4), [1.0] * 4)


def test_mode_flattening():
    assert mode_id(2, Spin.SPINLESS, 6) == 2
    assert mode_id(2, Spin.UP, 6) == 2
    assert mode_id(2, Spin.DOWN, 6) == 8


def test_occupied_modes_table():
    basis = enumerate_sector("spinless", 5, 2)
    occ = basis.occupied_modes()
    for row, config in zip(occ, basis.configs):
        assert [m for m in range(5) if (int(config) >> m) & 1] == list(row)
