"""Shared trial-state plumbing: flat parameter views, determinant helpers.

Every trial state exposes its parameters as one flat float64 vector (complex
parameters appear as interleaved Re/Im slots, trailing real parameters as
themselves), a batched ``forward(configs) -> (log_amplitudes, cache)`` and a
``backward(cache, weights)`` returning sum_n w_n * d log psi_n / d p_k as a
complex vector over the real slots. ``weights`` may be any complex vector;
the training loss assembles its exact gradient from two such reductions.
"""

from __future__ import annotations

import numpy as np

from .. import kernels

LOG_TINY = -690.0  # ln(1e-300), the conditioning threshold for determinants
RIDGE = 1e-12


class ConditioningError(RuntimeError):
    """|det| fell below the representable floor; caller should skip or ridge."""


class TrialState:
    n_modes: int

    # -- parameter vector ---------------------------------------------------
    def param_complex_arrays(self) -> list:
        return []

    def param_real_arrays(self) -> list:
        return []

    @property
    def n_params(self) -> int:
        n = sum(2 * a.size for a in self.param_complex_arrays())
        return n + sum(a.size for a in self.param_real_arrays())

    def get_params(self) -> np.ndarray:
        parts = [np.ascontiguousarray(a).ravel().view(np.float64)
                 for a in self.param_complex_arrays()]
        parts += [np.asarray(a, dtype=np.float64).ravel()
                  for a in self.param_real_arrays()]
        return np.concatenate(parts) if parts else np.empty(0)

    def set_params(self, vec: np.ndarray) -> None:
        pos = 0
        for a in self.param_complex_arrays():
            k = 2 * a.size
            a[...] = vec[pos:pos + k].view(np.complex128).reshape(a.shape)
            pos += k
        for a in self.param_real_arrays():
            k = a.size
            a[...] = vec[pos:pos + k].reshape(a.shape)
            pos += k
        if pos != vec.size:
            raise ValueError(f"parameter vector length {vec.size}, expected {pos}")

    # -- evaluation ---------------------------------------------------------
    def forward(self, configs: np.ndarray):
        raise NotImplementedError

    def backward(self, cache, weights: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_amplitudes(self, configs: np.ndarray) -> np.ndarray:
        return self.forward(configs)[0]

    def amplitudes(self, configs: np.ndarray) -> np.ndarray:
        logpsi = self.log_amplitudes(configs)
        out = np.zeros(logpsi.shape, dtype=np.complex128)
        finite = np.isfinite(logpsi.real)
        out[finite] = np.exp(logpsi[finite])
        return out

    def log_gradient(self, config) -> np.ndarray:
        """d log psi / d p at one configuration; raises ConditioningError
        when the determinant magnitude is below 1e-300."""
        configs = np.array([config], dtype=np.uint64)
        logpsi, cache = self.forward(configs)
        if logpsi[0].real < LOG_TINY:
            raise ConditioningError(
                "log|psi| below the 1e-300 floor; skip this configuration or "
                "let the training path apply its LU ridge")
        return self.backward(cache, np.ones(1, dtype=np.complex128))


def occupied_modes(configs: np.ndarray, n_modes: int, n_particles: int) -> np.ndarray:
    """(batch, n_particles) ascending mode ids of the occupied modes."""
    occ = kernels.occupation_matrix(configs, n_modes) > 0
    rows, cols = np.nonzero(occ)
    return cols.reshape(len(configs), n_particles)


def det_factor(a: np.ndarray):
    """(log det, inverse context) for a (batch, k, k) stack."""
    return kernels.det_factor(a, RIDGE)


def det_batch(a: np.ndarray) -> np.ndarray:
    """Complex log det of a (batch, k, k) stack; Re part -inf on singular."""
    return kernels.logdet_batch(a)


def cached_inverse_t(cache) -> np.ndarray:
    """Transposed ridged inverses for a cache holding a det_factor context.

    (A^-1)^T is the adjoint seed of log det A, so every consumer wants this
    layout directly.
    """
    if cache["inv_t"] is None:
        cache["inv_t"], cache["ridge_events"] = kernels.det_inverse_t(cache["fctx"])
    return cache["inv_t"]


def scatter_rows(values: np.ndarray, row_ids: np.ndarray, n_rows: int) -> np.ndarray:
    """sum_b values[b, r, :] into out[row_ids[b, r], :] (complex)."""
    return kernels.scatter_rows(values, row_ids, n_rows)
