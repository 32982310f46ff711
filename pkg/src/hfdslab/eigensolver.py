"""Exact ground states of sparse Hermitian sector Hamiltonians.

Dense Hermitian solve below the crossover dimension, Lanczos with full
reorthogonalization above it. Deterministic: the Lanczos start vector is
seeded, and the returned ground vector has its largest-magnitude amplitude
rotated to the positive real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .models import HamiltonianMatrix

DENSE_CROSSOVER = 4096
LANCZOS_MAX_ITER = 600
LANCZOS_SEED = 0x1A2C05


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class GroundStateResult:
    energy: float
    vector: np.ndarray = field(repr=False)
    gap: float
    degenerate: bool
    residual: float
    method: str

    @property
    def dim(self) -> int:
        return int(self.vector.size)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    z = v[k]
    if z == 0:
        return v
    v = v * (np.conj(z) / abs(z))
    return v / np.linalg.norm(v)


def _lanczos_lowest(mat: sp.csr_matrix, k: int, tol: float):
    dim = mat.shape[0]
    rng = np.random.Generator(np.random.Philox(key=np.uint64(LANCZOS_SEED)))
    q = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    q /= np.linalg.norm(q)
    basis = [q]
    alphas: list[float] = []
    betas: list[float] = []
    max_iter = min(dim, LANCZOS_MAX_ITER)
    evals = evecs = None
    for it in range(max_iter):
        w = mat @ basis[-1]
        a = float(np.real(np.vdot(basis[-1], w)))
        alphas.append(a)
        w = w - a * basis[-1]
        if len(basis) > 1:
            w = w - betas[-1] * basis[-2]
        # full reorthogonalization, twice for stability
        for _ in range(2):
            for qv in basis:
                w = w - np.vdot(qv, w) * qv
        b = float(np.linalg.norm(w))
        m = len(alphas)
        if m >= max(k, 2) and (it % 5 == 0 or b < 1e-13 or it == max_iter - 1):
            evals, evecs = sla.eigh_tridiagonal(np.array(alphas), np.array(betas))
            resid = abs(b * evecs[-1, : min(k, m)])
            if np.all(resid < tol) or b < 1e-13:
                break
        if b < 1e-13:
            break
        betas.append(b)
        basis.append(w / b)
    if evals is None:
        evals, evecs = sla.eigh_tridiagonal(np.array(alphas), np.array(betas))
    q_mat = np.stack(basis[: len(alphas)], axis=1)
    n_found = min(k, evals.size)
    vectors = q_mat @ evecs[:, :n_found]
    return evals[:n_found], vectors, len(alphas)


def ground_state(ham: HamiltonianMatrix, k: int = 2) -> GroundStateResult:
    """Lowest eigenpair of `ham` plus the gap to the next level.

    k >= 2 is required to report a gap; dim-1 sectors get gap = +inf.
    """
    mat = ham.matrix
    dim = mat.shape[0]
    h_max = ham.norm_max()
    if dim == 1:
        v = np.ones(1, dtype=np.complex128)
        e0 = float(np.real(mat[0, 0]))
        return GroundStateResult(e0, v, math.inf, False, 0.0, "dense")
    if dim <= DENSE_CROSSOVER:
        k_eff = min(k, dim)
        evals, evecs = sla.eigh(mat.toarray(), subset_by_index=[0, k_eff - 1])
        v = evecs[:, 0].astype(np.complex128)
        method = "dense"
        e0 = float(evals[0])
        e1 = float(evals[1]) if k_eff >= 2 else math.inf
    else:
        tol = 1e-11 * max(1.0, h_max) * math.sqrt(dim)
        evals, evecs, iters = _lanczos_lowest(mat, max(k, 2), tol)
        if evals.size < 2:
            raise SolverError(f"Lanczos found {evals.size} pairs in {iters} iterations")
        v = evecs[:, 0]
        method = "lanczos"
        e0 = float(evals[0])
        e1 = float(evals[1])
    v = _fix_phase(v)
    resid = float(np.linalg.norm(mat @ v - e0 * v))
    bound = 1e-10 * max(h_max, 1e-300) * math.sqrt(dim)
    if resid >= bound and h_max > 0:
        raise SolverError(
            f"{method} residual {resid:.3e} exceeds bound {bound:.3e} (dim={dim})")
    gap = e1 - e0
    degenerate = bool(gap < 1e-10 * max(1.0, abs(e0)))
    return GroundStateResult(e0, v, gap, degenerate, resid, method)


def dense_spectrum(ham: HamiltonianMatrix) -> np.ndarray:
    """Full spectrum (ascending); only sensible at desk-scale dimensions."""
    return sla.eigh(ham.matrix.toarray(), eigvals_only=True)
