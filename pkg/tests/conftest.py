import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_orbitals(rng, n_modes, n):
    g = rng.normal(size=(n_modes, n, 2))
    return (g[..., 0] + 1j * g[..., 1]) / np.sqrt(n_modes)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


# -- dense full-Fock-space oracles (independent of the package's sign code) --

_ANNIHILATE = np.array([[0.0, 1.0], [0.0, 0.0]])
_PARITY = np.diag([1.0, -1.0])
_ID2 = np.eye(2)


def dense_annihilator(mode, n_modes):
    """Jordan-Wigner annihilation operator on the full 2**n_modes space.

    Full-space index = sum_m n_m 2**m, parity string over modes below.
    """
    op = np.array([[1.0]])
    for m in range(n_modes):  # kron builds bit m as the fastest index
        if m < mode:
            factor = _PARITY
        elif m == mode:
            factor = _ANNIHILATE
        else:
            factor = _ID2
        op = np.kron(factor, op)
    return op


def embed(v, basis):
    """Sector vector -> full 2**n_modes vector."""
    w = np.zeros(2 ** basis.n_modes, dtype=np.complex128)
    w[basis.configs.astype(np.int64)] = v
    return w


def dense_mode_swap(p, n_modes):
    """Fermionic swap of adjacent modes p, p+1 on the full space."""
    dim = 2 ** n_modes
    mat = np.zeros((dim, dim))
    for idx in range(dim):
        np_bit = (idx >> p) & 1
        nq_bit = (idx >> (p + 1)) & 1
        out = (idx & ~((1 << p) | (1 << (p + 1)))) | (nq_bit << p) | (np_bit << (p + 1))
        mat[out, idx] = -1.0 if (np_bit and nq_bit) else 1.0
    return mat
