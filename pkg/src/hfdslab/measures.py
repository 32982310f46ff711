"""Complexity diagnostics of sector state vectors.

All entropies use the natural logarithm. The Born entropy bounds every
basis-compatible bipartition entanglement entropy from above; the unit-trace
one-particle reduced density matrix entropy is bounded from below by log(N),
attained exactly on Slater determinants.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .fock import SectorBasis, Spin, mode_id

SPECTRUM_FLOOR = 1e-14


class MeasureError(RuntimeError):
    pass


def _check_normalized(v: np.ndarray) -> None:
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > 1e-8:
        raise MeasureError(f"state vector norm {nrm} is not 1")


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-(p * np.log(p)).sum())


def born_entropy(v: np.ndarray) -> float:
    """Shannon entropy of the Born distribution |psi(n)|^2 (natural log)."""
    _check_normalized(v)
    return _entropy(np.abs(v) ** 2)


def one_rdm(v: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """gamma[i, j] = <v| c_j^dag c_i |v>; trace equals the particle number."""
    _check_normalized(v)
    gamma = kernels.one_rdm_accumulate(basis.configs,
                                       np.asarray(v, dtype=np.complex128),
                                       basis.n_modes)
    trace = float(np.trace(gamma).real)
    if abs(trace - basis.n_particles) > 1e-8:
        raise MeasureError(
            f"1-RDM trace {trace} deviates from N = {basis.n_particles}")
    return gamma


def rdm_entropy(gamma: np.ndarray) -> float:
    """von Neumann entropy of gamma normalized to unit trace.

    Slater determinants give exactly log(N); eigenvalues within -1e-12 of
    zero are clamped.
    """
    trace = float(np.trace(gamma).real)
    lam = np.linalg.eigvalsh(gamma / trace)
    if lam.min() < -1e-10:
        raise MeasureError(f"1-RDM eigenvalue {lam.min()} below zero")
    return _entropy(np.clip(lam, 0.0, None))


def site_cut_modes(basis: SectorBasis, sites) -> list[int]:
    """Flattened modes of a site subset; both spins of a site travel together."""
    sites = list(sites)
    if basis.spinful:
        return [mode_id(s, Spin.UP, basis.n_sites) for s in sites] + \
               [mode_id(s, Spin.DOWN, basis.n_sites) for s in sites]
    return sites


def spin_cut_modes(basis: SectorBasis) -> list[int]:
    """The up block; the bipartition between the two spin sectors."""
    if not basis.spinful:
        raise MeasureError("spin-sector cut needs a spinful basis")
    return list(range(basis.n_sites))


def default_site_cut(basis: SectorBasis) -> list[int]:
    """First ceil(n_sites/2) sites."""
    return site_cut_modes(basis, range((basis.n_sites + 1) // 2))


def _amplitude_matrix(v: np.ndarray, basis: SectorBasis, a_modes) -> np.ndarray:
    a_mask = 0
    for m in a_modes:
        a_mask |= 1 << int(m)
    configs = basis.configs
    a_part = configs & np.uint64(a_mask)
    b_part = configs & ~np.uint64(a_mask)
    ua, ia = np.unique(a_part, return_inverse=True)
    ub, ib = np.unique(b_part, return_inverse=True)
    signs = kernels.crossing_signs(configs, a_mask, basis.n_modes)
    mat = np.zeros((ua.size, ub.size), dtype=np.complex128)
    mat[ia, ib] = signs * np.asarray(v)
    return mat


def entanglement(v: np.ndarray, basis: SectorBasis, a_modes):
    """(entropy, descending spectrum) of the bipartition A = a_modes.

    The amplitude matrix indexed by (A-subconfiguration, B-subconfiguration)
    carries the fermionic reordering signs of the mode ordering; spectrum
    entries below 1e-14 are discarded from the report (not from the entropy,
    where they are negligible anyway).
    """
    _check_normalized(v)
    mat = _amplitude_matrix(v, basis, a_modes)
    xi = np.linalg.svd(mat, compute_uv=False) ** 2
    entropy = _entropy(xi)
    spectrum = np.sort(xi[xi >= SPECTRUM_FLOOR])[::-1]
    return entropy, spectrum


def reduced_density_matrix(v: np.ndarray, basis: SectorBasis, a_modes) -> np.ndarray:
    """rho_A over the 2^|A| subconfigurations of the chosen modes."""
    mat = _amplitude_matrix(v, basis, a_modes)
    return mat @ mat.conj().T


def mutual_information(v: np.ndarray, basis: SectorBasis,
                       i: int, spin_i: Spin, j: int, spin_j: Spin) -> float:
    """I = S(rho_i) + S(rho_j) - S(rho_ij) for two single-fermion orbitals."""
    pi = mode_id(i, spin_i, basis.n_sites)
    pj = mode_id(j, spin_j, basis.n_sites)
    if pi == pj:
        raise MeasureError("mutual information needs two distinct orbitals")
    _check_normalized(v)

    def orbital_entropy(modes):
        rho = reduced_density_matrix(v, basis, modes)
        lam = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
        return _entropy(lam)

    return orbital_entropy([pi]) + orbital_entropy([pj]) - orbital_entropy([pi, pj])


def x_observable(v: np.ndarray, basis: SectorBasis) -> float:
    """Mean of (1/N_S) sum_i (1 + 2 n_iu n_id - n_iu - n_id).

    0 when every site is singly occupied, 1 when every fermion is paired.
    """
    if not basis.spinful:
        raise MeasureError("x observable is defined for spinful states")
    _check_normalized(v)
    n = basis.n_sites
    configs = basis.configs
    up = configs & np.uint64((1 << n) - 1)
    down = configs >> np.uint64(n)
    n_up = np.bitwise_count(up).astype(np.float64)
    n_down = np.bitwise_count(down).astype(np.float64)
    n_pair = np.bitwise_count(up & down).astype(np.float64)
    x_diag = (n + 2.0 * n_pair - n_up - n_down) / n
    return float(np.sum((np.abs(v) ** 2) * x_diag))
