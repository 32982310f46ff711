"""Hidden-fermion determinant states.

The amplitude of a configuration n with occupied modes m_1 < ... < m_N is the
determinant of an (N+M) x (N+M) matrix: the top N rows are the rows of the
visible orbital blocks [Phi_v | Chi_v] selected at the occupied modes; each of
the bottom M rows is an independent network fed with the +/-1 occupation
vector of n (selu on Re/Im in the hidden layers, exp on the output layer).
M = 0 reduces exactly to a bare Slater determinant on Phi_v.

Real parameter count (the scaling analyses count real degrees of freedom):

    2 * [ n_modes*N + n_modes*M + M * sum_l (out_l * in_l + out_l) ]

with layer widths from :func:`hfdslab.ansatz.mlp.hidden_widths` and a final
(N+M)-wide output layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from .mlp import ComplexMlp, slot_grad
from .state import (TrialState, cached_inverse_t, det_factor, occupied_modes,
                    scatter_rows)


@dataclass
class HfdsState(TrialState):
    n_modes: int
    n_visible: int
    m_hidden: int
    phi_v: np.ndarray = field(repr=False)  # complex (n_modes, N)
    chi_v: np.ndarray = field(repr=False)  # complex (n_modes, M)
    rows: list = field(repr=False)         # M ComplexMlp instances

    @property
    def block_size(self) -> int:
        return self.n_visible + self.m_hidden

    @classmethod
    def init(cls, n_modes: int, n_visible: int, m_hidden: int, depth: int,
             seed: int, phi0: np.ndarray | None = None,
             noise: float = 0.01) -> "HfdsState":
        """Seeded initialization.

        phi0 warm-starts the visible orbitals (noise of rms `noise` is added);
        without it the first N unit vectors are used. Network weights are
        complex Gaussian with E|w|^2 = 1/fan_in, biases zero.
        """
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        if phi0 is None:
            phi0 = np.eye(n_modes, n_visible, dtype=np.complex128)
        g = rng.normal(size=(n_modes, n_visible, 2))
        phi_v = phi0 + noise * (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)
        g = rng.normal(size=(n_modes, m_hidden, 2))
        chi_v = (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0 * n_modes)
        k = n_visible + m_hidden
        rows = [ComplexMlp.init(n_modes, k, m_hidden, depth, rng)
                for _ in range(m_hidden)]
        return cls(n_modes, n_visible, m_hidden, phi_v.astype(np.complex128),
                   chi_v.astype(np.complex128), rows)

    def param_complex_arrays(self):
        arrays = [self.phi_v, self.chi_v]
        for net in self.rows:
            arrays.extend(net.param_arrays())
        return arrays

    def _basis_arrays(self, configs: np.ndarray):
        """occ/occupation-vector tables, memoized on the configs object."""
        memo = getattr(self, "_memo", None)
        if memo is not None and memo[0] is configs:
            return memo[1], memo[2]
        occ = occupied_modes(configs, self.n_modes, self.n_visible)
        x = kernels.occupation_matrix(configs, self.n_modes) if self.m_hidden else None
        self._memo = (configs, occ, x)
        return occ, x

    def forward(self, configs: np.ndarray):
        n, m = self.n_visible, self.m_hidden
        occ, x = self._basis_arrays(configs)
        row_caches = []
        hidden = None
        if m:
            hidden = np.empty((m, len(configs), n + m), dtype=np.complex128)
            for r, net in enumerate(self.rows):
                out, rc = net.forward(x)
                hidden[r] = out
                row_caches.append(rc)
        a = kernels.assemble_det_matrices(self.phi_v, self.chi_v, occ, hidden)
        logpsi, fctx = det_factor(a)
        return logpsi, {"occ": occ, "rows": row_caches, "fctx": fctx,
                        "logpsi": logpsi, "inv_t": None, "ridge_events": 0}

    def backward(self, cache, weights: np.ndarray) -> np.ndarray:
        n, m = self.n_visible, self.m_hidden
        g_a = weights[:, None, None] * cached_inverse_t(cache)
        occ = cache["occ"]
        top = scatter_rows(g_a[:, :n, :], occ, self.n_modes)
        parts = [slot_grad(top[:, :n], 0)]
        if m:
            parts.append(slot_grad(top[:, n:], 0))
            for r, net in enumerate(self.rows):
                parts.append(net.backward(cache["rows"][r], g_a[:, n + r, :]))
        else:
            parts.append(slot_grad(np.zeros_like(self.chi_v), 0))
        return np.concatenate(parts)


def slater(n_modes: int, n_visible: int, seed: int,
           phi0: np.ndarray | None = None, noise: float = 0.01) -> HfdsState:
    """Bare Slater determinant: the M = 0 hidden-fermion state."""
    return HfdsState.init(n_modes, n_visible, 0, 0, seed, phi0, noise)
