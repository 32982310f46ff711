"""Exact-overlap training of trial states against an ED target.

The loss is delta_O = 1 - |<target|psi>|^2 / <psi|psi> with the target
normalized, evaluated by contracting over every configuration of the sector
(no sampling noise). Gradients are assembled from two weighted reductions of
the per-configuration log-derivatives, so one forward pass and two backward
passes per step. Optimization is plain ADAM on the interleaved Re/Im
parameter slots; training stops at max_steps or when the best loss seen
stopped improving (relatively) over a trailing window.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np


class DegenerateStateError(RuntimeError):
    """The trial state vanished on the whole sector."""


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_steps: int = 5000
    patience: int = 500        # trailing window W of the stop rule
    threshold: float = 1e-4    # relative flattening threshold tau

    def to_dict(self) -> dict:
        return {"lr": self.lr, "beta1": self.beta1, "beta2": self.beta2,
                "eps": self.eps, "max_steps": self.max_steps,
                "patience": self.patience, "threshold": self.threshold}

    @classmethod
    def from_dict(cls, d: dict) -> "AdamConfig":
        return cls(**d)


@dataclass(frozen=True)
class LossSnapshot:
    step: int
    delta_o: float
    grad_norm: float
    wall_ms: float


@dataclass
class TrainRecord:
    """Outcome of one training run; the unit of persistence."""

    seed: int
    n_params: int
    steps_run: int
    best_delta_o: float
    best_step: int
    stop_reason: str
    wall_ms: float
    ridge_events: int
    loss_trace: list = field(repr=False)
    adam: AdamConfig = field(default_factory=AdamConfig)

    def payload(self) -> dict:
        return {
            "seed": self.seed,
            "n_params": self.n_params,
            "steps_run": self.steps_run,
            "best_delta_o": self.best_delta_o,
            "best_step": self.best_step,
            "stop_reason": self.stop_reason,
            "ridge_events": self.ridge_events,
            "adam": self.adam.to_dict(),
            "loss_first": self.loss_trace[0] if self.loss_trace else None,
            "loss_last": self.loss_trace[-1] if self.loss_trace else None,
        }


def _configs_of(basis) -> np.ndarray:
    return basis.configs if hasattr(basis, "configs") else np.asarray(basis)


def evaluate_loss(state, target: np.ndarray, basis):
    """(delta_O, gradient over real slots, ridge event count)."""
    configs = _configs_of(basis)
    logpsi, cache = state.forward(configs)
    finite = np.isfinite(logpsi.real)
    if not finite.any():
        raise DegenerateStateError("trial state is zero on every configuration")
    shift = logpsi.real[finite].max()
    psi = np.zeros(len(configs), dtype=np.complex128)
    psi[finite] = np.exp(logpsi[finite] - shift)
    o = np.vdot(target, psi)
    s = float(np.vdot(psi, psi).real)
    if s == 0.0:
        raise DegenerateStateError("trial state has zero norm")
    fidelity = (o.real**2 + o.imag**2) / s
    r1 = state.backward(cache, np.conj(target) * psi)
    r2 = state.backward(cache, (psi.real**2 + psi.imag**2).astype(np.complex128))
    dfid = (2.0 * np.real(np.conj(o) * r1) * s
            - (o.real**2 + o.imag**2) * 2.0 * np.real(r2)) / s**2
    return 1.0 - fidelity, -dfid, cache["ridge_events"]


def train(state, target: np.ndarray, basis, config: AdamConfig = AdamConfig(),
          seed: int = 0, trace_snapshots: bool = False) -> TrainRecord:
    """Run ADAM until max_steps or the flattening stop rule fires.

    The state is left holding the best parameters seen. Deterministic given
    the state's initialization and `seed` (recorded, not consumed: all
    randomness lives in the initialization).
    """
    configs = _configs_of(basis)
    t0 = time.perf_counter()
    p = state.get_params()
    m = np.zeros_like(p)
    v = np.zeros_like(p)
    trace: list = []
    snapshots: list[LossSnapshot] = []
    best_val = np.inf
    best_step = 0
    best_params = p.copy()
    best_series: list[float] = []
    ridge_total = 0
    stop_reason = "max_steps"
    steps_run = 0
    for step in range(config.max_steps + 1):
        delta_o, grad, ridge = evaluate_loss(state, target, configs)
        ridge_total += ridge
        trace.append(delta_o)
        if trace_snapshots:
            snapshots.append(LossSnapshot(
                step, delta_o, float(np.linalg.norm(grad)),
                (time.perf_counter() - t0) * 1e3))
        if delta_o < best_val:
            best_val = delta_o
            best_step = step
            best_params = p.copy()
        best_series.append(best_val)
        steps_run = step
        if step == config.max_steps:
            break
        w = config.patience
        if step >= w:
            ref = best_series[step - w]
            if ref - best_val < config.threshold * max(ref, 1e-300):
                stop_reason = "flattened"
                break
        t = step + 1
        m = config.beta1 * m + (1.0 - config.beta1) * grad
        v = config.beta2 * v + (1.0 - config.beta2) * grad * grad
        m_hat = m / (1.0 - config.beta1**t)
        v_hat = v / (1.0 - config.beta2**t)
        p = p - config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
        state.set_params(p)
    state.set_params(best_params)
    rec = TrainRecord(
        seed=seed, n_params=state.n_params, steps_run=steps_run,
        best_delta_o=float(best_val), best_step=best_step,
        stop_reason=stop_reason, wall_ms=(time.perf_counter() - t0) * 1e3,
        ridge_events=ridge_total, loss_trace=trace, adam=config)
    rec.snapshots = snapshots
    return rec
