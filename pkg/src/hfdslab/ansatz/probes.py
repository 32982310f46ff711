"""Baseline and diagnostic trial states.

* :class:`GutzwillerState` - Slater determinant times per-site
  double-occupancy suppression factors exp(-sum_i lambda_i n_i_up n_i_down).
* :class:`PhaseProbeState` - the phase of a trainable Slater determinant glued
  to the fixed amplitude magnitudes of a target state; isolates how hard the
  sign structure is. Discontinuous where the determinant crosses zero; at an
  exact zero the phase factor is defined as 1 and the event is logged.
* :class:`AmplitudeProbeState` - a real selu network (4 * n_sites neurons per
  hidden layer) for the log-amplitude, glued to the target's exact phases;
  isolates amplitude learning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from .mlp import RealMlp, slot_grad
from .state import (TrialState, cached_inverse_t, det_factor, occupied_modes,
                    scatter_rows)

log = logging.getLogger(__name__)


def _double_occupancy(configs: np.ndarray, n_sites: int) -> np.ndarray:
    """(batch, n_sites) 0/1 indicator of doubly occupied sites."""
    up = configs[:, None] >> np.arange(n_sites, dtype=np.uint64)[None, :]
    down = configs[:, None] >> np.arange(n_sites, 2 * n_sites, dtype=np.uint64)[None, :]
    return ((up & down) & np.uint64(1)).astype(np.float64)


@dataclass
class GutzwillerState(TrialState):
    n_modes: int
    n_sites: int
    n_visible: int
    phi: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)

    @classmethod
    def init(cls, n_sites: int, n_visible: int, seed: int,
             phi0: np.ndarray | None = None, noise: float = 0.01) -> "GutzwillerState":
        n_modes = 2 * n_sites
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        if phi0 is None:
            phi0 = np.eye(n_modes, n_visible, dtype=np.complex128)
        g = rng.normal(size=(n_modes, n_visible, 2))
        phi = phi0 + noise * (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)
        return cls(n_modes, n_sites, n_visible, phi.astype(np.complex128),
                   np.zeros(n_sites))

    def param_complex_arrays(self):
        return [self.phi]

    def param_real_arrays(self):
        return [self.lam]

    def forward(self, configs: np.ndarray):
        occ = occupied_modes(configs, self.n_modes, self.n_visible)
        a = self.phi[occ]
        docc = _double_occupancy(configs, self.n_sites)
        dlog, fctx = det_factor(a)
        logpsi = dlog - docc @ self.lam
        return logpsi, {"occ": occ, "docc": docc, "dlog": dlog,
                        "fctx": fctx, "logpsi": logpsi, "inv_t": None,
                        "ridge_events": 0}

    def backward(self, cache, weights: np.ndarray) -> np.ndarray:
        cof = weights[:, None, None] * cached_inverse_t(cache)
        alpha_phi = scatter_rows(cof, cache["occ"], self.n_modes)
        grad_lam = -(weights @ cache["docc"])
        return np.concatenate([slot_grad(alpha_phi, 0), grad_lam])


@dataclass
class PhaseProbeState(TrialState):
    n_modes: int
    n_visible: int
    phi: np.ndarray = field(repr=False)
    basis_configs: np.ndarray = field(repr=False)
    log_target_abs: np.ndarray = field(repr=False)
    zero_phase_events: int = 0

    @classmethod
    def init(cls, basis, target_vector: np.ndarray, seed: int,
             phi0: np.ndarray | None = None, noise: float = 0.01) -> "PhaseProbeState":
        n_modes, n = basis.n_modes, basis.n_particles
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        if phi0 is None:
            phi0 = np.eye(n_modes, n, dtype=np.complex128)
        g = rng.normal(size=(n_modes, n, 2))
        phi = phi0 + noise * (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(target_vector))
        return cls(n_modes, n, phi.astype(np.complex128),
                   basis.configs.copy(), log_abs)

    def param_complex_arrays(self):
        return [self.phi]

    def _target_rows(self, configs):
        return np.searchsorted(self.basis_configs, configs)

    def forward(self, configs: np.ndarray):
        occ = occupied_modes(configs, self.n_modes, self.n_visible)
        a = self.phi[occ]
        slog, fctx = det_factor(a)
        zero = ~np.isfinite(slog.real)
        if zero.any():
            self.zero_phase_events += int(zero.sum())
            log.info("phase probe: %d determinant zeros, phase factor set to 1",
                     int(zero.sum()))
        phase = np.where(zero, 0.0, slog.imag)
        logpsi = self.log_target_abs[self._target_rows(configs)] + 1j * phase
        return logpsi, {"occ": occ, "slog": slog, "zero": zero,
                        "fctx": fctx, "inv_t": None, "ridge_events": 0}

    def backward(self, cache, weights: np.ndarray) -> np.ndarray:
        w = np.where(cache["zero"], 0.0, weights)
        cof = cached_inverse_t(cache)
        occ = cache["occ"]
        x1 = scatter_rows(w[:, None, None] * cof, occ, self.n_modes)
        x2 = scatter_rows(w[:, None, None] * np.conj(cof), occ, self.n_modes)
        out = np.empty(2 * self.phi.size, dtype=np.complex128)
        out[0::2] = ((x1 - x2) / 2.0).ravel()
        out[1::2] = (1j * (x1 + x2) / 2.0).ravel()
        return out


@dataclass
class AmplitudeProbeState(TrialState):
    n_modes: int
    net: RealMlp = field(repr=False)
    basis_configs: np.ndarray = field(repr=False)
    target_angle: np.ndarray = field(repr=False)

    @classmethod
    def init(cls, basis, target_vector: np.ndarray, depth: int,
             seed: int) -> "AmplitudeProbeState":
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        net = RealMlp.init(basis.n_modes, 4 * basis.n_sites, depth, rng)
        return cls(basis.n_modes, net, basis.configs.copy(),
                   np.angle(target_vector))

    def param_real_arrays(self):
        return self.net.param_arrays()

    def forward(self, configs: np.ndarray):
        x = kernels.occupation_matrix(configs, self.n_modes)
        out, rc = self.net.forward(x)
        idx = np.searchsorted(self.basis_configs, configs)
        logpsi = out + 1j * self.target_angle[idx]
        return logpsi, {"net": rc, "logpsi": logpsi, "ridge_events": 0}

    def backward(self, cache, weights: np.ndarray) -> np.ndarray:
        return self.net.backward(cache["net"], weights)
