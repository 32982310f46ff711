"""Occupation-number bases for fixed-particle-number fermion sectors.

Mode ordering
-------------
Spinless systems have one mode per site, flattened id = site. Spinful systems
use spin-block ordering: modes [0, n_sites) are the up block, modes
[n_sites, 2*n_sites) the down block, ascending site within a block. A
configuration is a uint64 bitmask over flattened mode ids, so the bipartition
between the two spin sectors is a contiguous bit split.

Sign convention
---------------
Jordan-Wigner parity counted over occupied modes with strictly lower
flattened id, evaluated on the intermediate configuration after each operator
of a string; strings are applied right-to-left as written.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import kernels

CREATE = 1
ANNIHILATE = 0


class Spin(Enum):
    UP = "up"
    DOWN = "down"
    SPINLESS = "spinless"


@dataclass(frozen=True)
class ModeIndex:
    """A (site, spin) pair with its flattened mode id."""

    site: int
    spin: Spin = Spin.SPINLESS

    def flat(self, n_sites: int) -> int:
        if self.spin is Spin.DOWN:
            return n_sites + self.site
        return self.site


def mode_id(site: int, spin: Spin, n_sites: int) -> int:
    return ModeIndex(site, spin).flat(n_sites)


@dataclass(frozen=True)
class SectorBasis:
    """Enumerated sector of fixed particle numbers, sorted by bitmask value.

    Attributes
    ----------
    spinful : whether modes split into up/down blocks
    n_sites : number of lattice sites
    counts  : (n,) for spinless, (n_up, n_down) for spinful
    configs : uint64 array of all configurations, ascending
    """

    spinful: bool
    n_sites: int
    counts: tuple
    configs: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites if self.spinful else self.n_sites

    @property
    def n_particles(self) -> int:
        return int(sum(self.counts))

    @property
    def dim(self) -> int:
        return int(self.configs.size)

    def index(self, config: int) -> int:
        """Position of `config` in the basis; raises KeyError if absent."""
        i = int(np.searchsorted(self.configs, np.uint64(config)))
        if i >= self.dim or self.configs[i] != np.uint64(config):
            raise KeyError(f"configuration {config:#x} not in sector")
        return i

    def occupied_modes(self) -> np.ndarray:
        """(dim, n_particles) mode ids of the occupied modes, ascending."""
        occ = np.nonzero(kernels.occupation_matrix(self.configs, self.n_modes) > 0)
        return occ[1].reshape(self.dim, self.n_particles)

    def occupation_matrix(self) -> np.ndarray:
        """(dim, n_modes) array of +/-1 network inputs."""
        return kernels.occupation_matrix(self.configs, self.n_modes)


def enumerate_sector(kind: str, n_sites: int, counts) -> SectorBasis:
    """Enumerate a particle-number (and magnetization) sector.

    kind is "spinless" or "spinful"; counts is N or (N_up, N_down).
    Deterministic: configurations come out ascending by bitmask value.
    """
    if kind == "spinless":
        n = int(counts) if np.isscalar(counts) else int(counts[0])
        if not 0 <= n <= n_sites:
            raise ValueError(f"particle count {n} outside [0, {n_sites}]")
        configs = kernels.enumerate_masks(n_sites, n)
        return SectorBasis(False, n_sites, (n,), configs)
    if kind == "spinful":
        n_up, n_down = int(counts[0]), int(counts[1])
        if not (0 <= n_up <= n_sites and 0 <= n_down <= n_sites):
            raise ValueError(f"counts {counts} outside [0, {n_sites}]")
        ups = kernels.enumerate_masks(n_sites, n_up)
        downs = kernels.enumerate_masks(n_sites, n_down)
        # down block in the high bits keeps ascending overall order
        configs = ((downs[:, None] << np.uint64(n_sites)) | ups[None, :]).ravel()
        return SectorBasis(True, n_sites, (n_up, n_down), configs)
    raise ValueError(f"unknown sector kind {kind!r}")


def half_filling_counts(kind: str, n_sites: int):
    if kind == "spinless":
        return n_sites // 2
    return (n_sites // 2, n_sites // 2)


def sector_dimension(kind: str, n_sites: int, counts) -> int:
    if kind == "spinless":
        n = int(counts) if np.isscalar(counts) else int(counts[0])
        return math.comb(n_sites, n)
    return math.comb(n_sites, int(counts[0])) * math.comb(n_sites, int(counts[1]))


def apply_string(config: int, ops: Sequence[tuple], n_modes: int | None = None):
    """Apply a second-quantized operator string to a configuration.

    ops is a list of (CREATE/ANNIHILATE, flat mode id) in the order written in
    the Hamiltonian; application runs right-to-left. Returns
    (new_config, sign) or None when the string annihilates the state.
    """
    mask = int(config)
    parity = 0
    for action, mode in reversed(ops):
        bit = 1 << int(mode)
        occupied = bool(mask & bit)
        if action == CREATE:
            if occupied:
                return None
        else:
            if not occupied:
                return None
        parity += (mask & (bit - 1)).bit_count()
        mask ^= bit
    return mask, (-1 if parity & 1 else 1)


def occupation_vector(config: int, n_modes: int) -> np.ndarray:
    """+/-1 vector over modes; +1 on occupied modes."""
    return kernels.occupation_matrix(np.array([config], dtype=np.uint64), n_modes)[0]


def config_bits(config: int, n_modes: int) -> list[int]:
    """Occupied flat mode ids, ascending."""
    return [m for m in range(n_modes) if (int(config) >> m) & 1]


def string_from_modes(pairs: Iterable[tuple]) -> list[tuple]:
    """Convenience: [(CREATE, m1), (ANNIHILATE, m2), ...] pass-through with checks."""
    out = []
    for action, mode in pairs:
        if action not in (CREATE, ANNIHILATE):
            raise ValueError(f"bad action {action}")
        out.append((action, int(mode)))
    return out
