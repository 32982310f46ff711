"""Random fermionic Hamiltonians on a sector basis.

Six models are provided, all built from one seeded coupling draw:

* ``syk``     - spinless all-to-all two- plus four-fermion couplings,
                prefactors J/sqrt(2*N_S) and U/sqrt(2*N_S)**3.
* ``hubbard`` - spinful random hermitian hopping J/sqrt(N_S) plus on-site U.
* ``density`` - random hopping (upper triangle + h.c.) plus random
                density-density couplings U/(4*sqrt(N_S)), both with "+h.c."
                applied to the whole sum (real diagonal pieces double).
* ``pair``    - random hopping plus pair-exchange U/sqrt(N_S) + h.c.
* ``spin``    - random hopping plus spin-flip exchange U/sqrt(N_S) + h.c.
* ``syk1d``   - spinless chain variant: pairs at most one site apart with
                prefactor J/2, quadruples spanning at most four sites with
                prefactor U/sqrt(8)**3; open boundary.

Reproducibility: couplings come from a counter-based Philox generator keyed
by the seed; normal variates are produced by the inverse-CDF transform
(scipy.special.ndtri) of Philox uniforms, so draws are bit-stable across
platforms. The draw order is t, v, J2, J4 (each in the canonical index order
documented in ``draw_couplings``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.special import ndtri

from . import kernels
from .fock import ANNIHILATE, CREATE, SectorBasis, enumerate_sector, half_filling_counts

SPINLESS_KINDS = ("syk", "syk1d")
SPINFUL_KINDS = ("hubbard", "density", "pair", "spin")
ALL_KINDS = SPINLESS_KINDS + SPINFUL_KINDS

_U64 = np.uint64


def default_j(kind: str) -> float:
    return 0.0 if kind == "syk" else 1.0


@dataclass(frozen=True)
class ModelSpec:
    """Which Hamiltonian to build, at which couplings, from which seed."""

    kind: str
    n_sites: int
    u: float = 1.0
    j: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.j is None:
            object.__setattr__(self, "j", default_j(self.kind))

    @property
    def spinful(self) -> bool:
        return self.kind in SPINFUL_KINDS

    @property
    def sector_kind(self) -> str:
        return "spinful" if self.spinful else "spinless"

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites if self.spinful else self.n_sites

    def with_seed(self, seed: int) -> "ModelSpec":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n_sites": self.n_sites, "u": self.u,
                "j": self.j, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(**d)


@dataclass(frozen=True)
class CouplingDraw:
    """One seeded realization of all random couplings a model can use."""

    seed: int
    t: np.ndarray = field(repr=False)   # complex (n_sites, n_sites), N(0,1)+iN(0,1)
    v: np.ndarray = field(repr=False)   # same distribution as t
    j2: np.ndarray = field(repr=False)  # hermitian, E|J2_ij|^2 = 1
    j4: np.ndarray = field(repr=False)  # rank 4, antisymmetric pairs, E|.|^2 = 1


def _normals(seed: int, count: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    u = gen.random(count)
    # random() returns [0, 1); keep ndtri finite at the (measure-zero) endpoint
    np.clip(u, 2.0**-54, 1.0 - 2.0**-54, out=u)
    return ndtri(u)


def draw_couplings(spec: ModelSpec) -> CouplingDraw:
    """Deterministic couplings for a spec (depends on seed and n_sites only).

    Canonical independent sets and mirroring:
      * t, v: all n_sites**2 entries row-major, Re then Im per entry.
      * J2: diagonal i ascending (real, variance 1), then i<j row-major as
        (g1+i*g2)/sqrt(2) with J2[j,i] the conjugate.
      * J4: site pairs P = {(i,j): i<j} in row-major order; canonical
        couplings are (p, q) in P x P with index(p) <= index(q); p == q gives
        a real variate, p < q a complex one; the tensor is completed with
        J4[i,j,l,k] = -J4[i,j,k,l], J4[j,i,k,l] = -J4[i,j,k,l] and
        J4[k,l,i,j] = conj(J4[i,j,k,l]).
    """
    n = spec.n_sites
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    n_pairs = len(pairs)
    n_t = 2 * n * n
    n_j2 = n + 2 * (n_pairs)
    n_j4 = n_pairs + 2 * (n_pairs * (n_pairs - 1) // 2)
    g = _normals(spec.seed, 2 * n_t + n_j2 + n_j4)
    pos = 0

    def take(k):
        nonlocal pos
        out = g[pos:pos + k]
        pos += k
        return out

    t = take(n_t).reshape(n, n, 2)
    t = t[..., 0] + 1j * t[..., 1]
    v = take(n_t).reshape(n, n, 2)
    v = v[..., 0] + 1j * v[..., 1]

    j2 = np.zeros((n, n), dtype=np.complex128)
    j2[np.arange(n), np.arange(n)] = take(n)
    off = take(2 * n_pairs).reshape(n_pairs, 2)
    for (i, j), (g1, g2) in zip(pairs, off):
        z = (g1 + 1j * g2) / math.sqrt(2.0)
        j2[i, j] = z
        j2[j, i] = np.conj(z)

    j4 = np.zeros((n, n, n, n), dtype=np.complex128)
    for a, p in enumerate(pairs):
        for b in range(a, n_pairs):
            q = pairs[b]
            if a == b:
                z = complex(take(1)[0])
            else:
                g1, g2 = take(2)
                z = (g1 + 1j * g2) / math.sqrt(2.0)
            i, j = p
            k, l = q
            for (ii, jj, s1) in ((i, j, 1.0), (j, i, -1.0)):
                for (kk, ll, s2) in ((k, l, 1.0), (l, k, -1.0)):
                    j4[ii, jj, kk, ll] = s1 * s2 * z
                    j4[kk, ll, ii, jj] = s1 * s2 * np.conj(z)
    assert pos == g.size
    return CouplingDraw(spec.seed, t, v, j2, j4)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Sparse Hermitian operator on a sector basis."""

    spec: ModelSpec
    basis: SectorBasis
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return 0.0 if d.nnz == 0 else float(np.abs(d.data).max())

    def norm_max(self) -> float:
        return 0.0 if self.matrix.nnz == 0 else float(np.abs(self.matrix.data).max())


def _up(site: int, n_sites: int) -> int:
    return site


def _down(site: int, n_sites: int) -> int:
    return n_sites + site


def model_terms(spec: ModelSpec, draw: CouplingDraw | None = None):
    """The literal term list (coeff, ops) of the model's second-quantized sums."""
    if draw is None:
        draw = draw_couplings(spec)
    n = spec.n_sites
    j, u = float(spec.j), float(spec.u)
    terms: list[tuple[complex, list[tuple[int, int]]]] = []

    def add(coeff, ops):
        if coeff != 0:
            terms.append((complex(coeff), ops))

    if spec.kind in ("syk", "syk1d"):
        if spec.kind == "syk":
            kin = j / math.sqrt(2 * n)
            quart = u / math.sqrt(2 * n) ** 3
            pair_ok = lambda i, jj: True
            quad_ok = lambda idx: True
        else:
            kin = j / 2.0
            quart = u / math.sqrt(8) ** 3
            pair_ok = lambda i, jj: abs(i - jj) <= 1
            quad_ok = lambda idx: max(idx) - min(idx) <= 4
        for i in range(n):
            for jj in range(n):
                if pair_ok(i, jj):
                    add(kin * draw.j2[i, jj], [(CREATE, i), (ANNIHILATE, jj)])
        for i in range(n):
            for jj in range(n):
                for k in range(n):
                    for l in range(n):
                        if i == jj or k == l or not quad_ok((i, jj, k, l)):
                            continue
                        add(quart * draw.j4[i, jj, k, l],
                            [(CREATE, i), (CREATE, jj), (ANNIHILATE, l), (ANNIHILATE, k)])
        return terms

    spins = (_up, _down)
    if spec.kind == "hubbard":
        kin = j / math.sqrt(n)
        for i in range(n):
            for jj in range(n):
                for s in spins:
                    add(kin * draw.j2[i, jj], [(CREATE, s(i, n)), (ANNIHILATE, s(jj, n))])
        for i in range(n):
            add(u, [(CREATE, _up(i, n)), (ANNIHILATE, _up(i, n)),
                    (CREATE, _down(i, n)), (ANNIHILATE, _down(i, n))])
        return terms

    # density / pair / spin share the i<=j random hopping + h.c.
    kin = j / math.sqrt(n)
    for i in range(n):
        for jj in range(i, n):
            for s in spins:
                add(kin * draw.t[i, jj], [(CREATE, s(i, n)), (ANNIHILATE, s(jj, n))])
                add(kin * np.conj(draw.t[i, jj]), [(CREATE, s(jj, n)), (ANNIHILATE, s(i, n))])

    if spec.kind == "density":
        w = u / (4 * math.sqrt(n))
        for i in range(n):
            for jj in range(i, n):
                for s1 in spins:
                    for s2 in spins:
                        ni = [(CREATE, s1(i, n)), (ANNIHILATE, s1(i, n))]
                        nj = [(CREATE, s2(jj, n)), (ANNIHILATE, s2(jj, n))]
                        add(w * draw.v[i, jj], ni + nj)
                        add(w * np.conj(draw.v[i, jj]), nj + ni)
    elif spec.kind == "pair":
        w = u / math.sqrt(n)
        for i in range(n):
            for jj in range(i, n):
                add(w * draw.v[i, jj],
                    [(CREATE, _up(i, n)), (CREATE, _down(i, n)),
                     (ANNIHILATE, _down(jj, n)), (ANNIHILATE, _up(jj, n))])
                add(w * np.conj(draw.v[i, jj]),
                    [(CREATE, _up(jj, n)), (CREATE, _down(jj, n)),
                     (ANNIHILATE, _down(i, n)), (ANNIHILATE, _up(i, n))])
    elif spec.kind == "spin":
        w = u / math.sqrt(n)
        for i in range(n):
            for jj in range(i, n):
                add(w * draw.v[i, jj],
                    [(CREATE, _up(i, n)), (ANNIHILATE, _down(i, n)),
                     (CREATE, _down(jj, n)), (ANNIHILATE, _up(jj, n))])
                add(w * np.conj(draw.v[i, jj]),
                    [(CREATE, _up(jj, n)), (ANNIHILATE, _down(jj, n)),
                     (CREATE, _down(i, n)), (ANNIHILATE, _up(i, n))])
    else:  # pragma: no cover
        raise ValueError(spec.kind)
    return terms


def pack_terms(terms):
    """Pack a (coeff, ops) list into the flat arrays the kernels consume."""
    n_terms = len(terms)
    max_len = max((len(ops) for _, ops in terms), default=0)
    coeffs = np.zeros(n_terms, dtype=np.complex128)
    ops_create = np.zeros((n_terms, max_len), dtype=np.uint8)
    ops_mode = np.zeros((n_terms, max_len), dtype=np.uint8)
    ops_len = np.zeros(n_terms, dtype=np.int64)
    for t, (coeff, ops) in enumerate(terms):
        coeffs[t] = coeff
        ops_len[t] = len(ops)
        for k, (action, mode) in enumerate(ops):
            ops_create[t, k] = action
            ops_mode[t, k] = mode
    return coeffs, ops_create, ops_mode, ops_len


def build_hamiltonian(spec: ModelSpec, basis: SectorBasis,
                      draw: CouplingDraw | None = None,
                      terms=None) -> HamiltonianMatrix:
    """Assemble the model's sparse Hermitian matrix on `basis`.

    `draw`/`terms` may be injected for deterministic wiring tests.
    """
    if basis.spinful != spec.spinful:
        raise ValueError(f"{spec.kind} needs a {spec.sector_kind} sector")
    if basis.n_sites != spec.n_sites:
        raise ValueError("basis/spec site count mismatch")
    if terms is None:
        terms = model_terms(spec, draw)
    coeffs, ops_create, ops_mode, ops_len = pack_terms(terms)
    rows, cols, vals = kernels.build_term_entries(
        basis.configs, coeffs, ops_create, ops_mode, ops_len)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
    return HamiltonianMatrix(spec, basis, mat.tocsr())


def one_body_matrix(spec: ModelSpec, draw: CouplingDraw | None = None) -> np.ndarray:
    """The quadratic part of the model as a (n_modes, n_modes) matrix."""
    if draw is None:
        draw = draw_couplings(spec)
    n = spec.n_sites
    j = float(spec.j)
    if spec.kind == "syk":
        return (j / math.sqrt(2 * n)) * draw.j2
    if spec.kind == "syk1d":
        band = np.zeros((n, n), dtype=np.complex128)
        for i in range(n):
            for jj in range(n):
                if abs(i - jj) <= 1:
                    band[i, jj] = draw.j2[i, jj]
        return (j / 2.0) * band
    if spec.kind == "hubbard":
        h_site = (j / math.sqrt(n)) * draw.j2
    else:
        upper = np.triu(draw.t)
        h_site = (j / math.sqrt(n)) * (upper + upper.conj().T)
    h = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    h[:n, :n] = h_site
    h[n:, n:] = h_site
    return h


def default_sector(spec: ModelSpec, counts=None) -> SectorBasis:
    """The sector a model runs in; half filling unless counts is given."""
    if counts is None:
        counts = half_filling_counts(spec.sector_kind, spec.n_sites)
    return enumerate_sector(spec.sector_kind, spec.n_sites, counts)


def free_orbitals(spec: ModelSpec, counts, draw: CouplingDraw | None = None) -> np.ndarray:
    """Lowest one-body orbitals of the model's quadratic part, per spin block.

    Columns form the U=0 ground Slater determinant of the sector: the
    canonical warm start for the visible orbital block.
    """
    h = one_body_matrix(spec, draw)
    n = spec.n_sites
    if spec.spinful:
        n_up, n_down = int(counts[0]), int(counts[1])
        _, u = np.linalg.eigh(h[:n, :n])
        phi = np.zeros((2 * n, n_up + n_down), dtype=np.complex128)
        phi[:n, :n_up] = u[:, :n_up]
        phi[n:, n_up:] = u[:, :n_down]
        return phi
    n_part = int(counts) if np.isscalar(counts) else int(counts[0])
    _, u = np.linalg.eigh(h)
    return u[:, :n_part].astype(np.complex128)


def free_ground_energy(spec: ModelSpec, counts, draw: CouplingDraw | None = None) -> float:
    """Sum of the occupied one-body levels (exact at U = 0)."""
    h = one_body_matrix(spec, draw)
    n = spec.n_sites
    if spec.spinful:
        w = np.linalg.eigvalsh(h[:n, :n])
        return float(w[: int(counts[0])].sum() + w[: int(counts[1])].sum())
    n_part = int(counts) if np.isscalar(counts) else int(counts[0])
    return float(np.linalg.eigvalsh(h)[:n_part].sum())
