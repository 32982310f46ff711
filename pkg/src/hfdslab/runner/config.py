"""Experiment configuration: strict JSON schema, canonical hashing.

A config fully determines every payload byte of a run. Unknown keys are
rejected at every nesting level (silent typos in sweep axes are the costliest
failure mode). The config hash covers exactly the semantically meaningful
fields; output paths and worker counts stay out of it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..models import ALL_KINDS
from ..training import AdamConfig

ANSATZE = ("hfds", "slater", "gutzwiller", "phase_probe", "amplitude_probe")
MEASURES = ("born_entropy", "rdm_entropy", "entanglement_half",
            "entanglement_spin", "x_observable", "mutual_information",
            "spectrum_half", "spectrum_spin")

_TOP_KEYS = {"name", "model", "sweep", "filling", "seeds", "ansatze", "adam",
             "measures", "train", "fit"}
_MODEL_KEYS = {"kind", "n_sites", "u", "j"}
_SWEEP_KEYS = {"u", "n_sites", "m_hidden", "depth", "ju"}
_ADAM_KEYS = {"lr", "beta1", "beta2", "eps", "max_steps", "patience", "threshold"}
_FIT_KEYS = {"target", "family", "exclude_m0"}


class ConfigError(ValueError):
    pass


def _check_keys(d: dict, allowed: set, where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; "
                          f"allowed: {sorted(allowed)}")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    model_kind: str
    n_sites_values: tuple
    u_values: tuple
    j: float | None
    ju_pairs: tuple | None          # overrides u/j when present
    m_values: tuple
    depth_values: tuple
    filling: object                 # "half" | [n_up, n_down] | n
    seeds: tuple
    ansatze: tuple
    adam: AdamConfig
    measures: tuple
    train: bool
    fit: dict | None = None

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "model": {"kind": self.model_kind, "j": self.j},
            "sweep": {"n_sites": list(self.n_sites_values),
                      "u": list(self.u_values),
                      "m_hidden": list(self.m_values),
                      "depth": list(self.depth_values)},
            "filling": self.filling,
            "seeds": list(self.seeds),
            "ansatze": list(self.ansatze),
            "adam": self.adam.to_dict(),
            "measures": list(self.measures),
            "train": self.train,
            "fit": self.fit,
        }
        if self.ju_pairs is not None:
            d["sweep"]["ju"] = [list(p) for p in self.ju_pairs]
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True,
                          separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def parse_config(raw: dict) -> ExperimentConfig:
    _check_keys(raw, _TOP_KEYS, "config")
    model = dict(raw.get("model") or {})
    _check_keys(model, _MODEL_KEYS, "model")
    kind = model.get("kind")
    if kind not in ALL_KINDS:
        raise ConfigError(f"model.kind must be one of {ALL_KINDS}, got {kind!r}")
    sweep = dict(raw.get("sweep") or {})
    _check_keys(sweep, _SWEEP_KEYS, "sweep")

    n_sites_values = sweep.get("n_sites")
    if n_sites_values is None:
        if "n_sites" not in model:
            raise ConfigError("need model.n_sites or sweep.n_sites")
        n_sites_values = [model["n_sites"]]
    u_values = sweep.get("u")
    if u_values is None:
        u_values = [model.get("u", 1.0)]
    ju = sweep.get("ju")
    ju_pairs = tuple(tuple(float(x) for x in p) for p in ju) if ju else None

    adam_raw = dict(raw.get("adam") or {})
    _check_keys(adam_raw, _ADAM_KEYS, "adam")
    fit = raw.get("fit")
    if fit is not None:
        fit = dict(fit)
        _check_keys(fit, _FIT_KEYS, "fit")
        fit.setdefault("family", "algebraic")
        fit.setdefault("exclude_m0", True)
        if "target" not in fit:
            raise ConfigError("fit needs a target error")

    ansatze = tuple(raw.get("ansatze") or (("hfds",) if raw.get("train", True) else ()))
    for a in ansatze:
        if a not in ANSATZE:
            raise ConfigError(f"unknown ansatz {a!r}; allowed {ANSATZE}")
    meas = tuple(raw.get("measures") or ())
    for m in meas:
        if m not in MEASURES:
            raise ConfigError(f"unknown measure {m!r}; allowed {MEASURES}")
    seeds = tuple(int(s) for s in (raw.get("seeds") or [0]))
    if not seeds:
        raise ConfigError("seeds must not be empty")

    return ExperimentConfig(
        name=str(raw.get("name", "unnamed")),
        model_kind=kind,
        n_sites_values=tuple(int(n) for n in n_sites_values),
        u_values=tuple(float(u) for u in u_values),
        j=None if model.get("j") is None else float(model["j"]),
        ju_pairs=ju_pairs,
        m_values=tuple(int(m) for m in (sweep.get("m_hidden") or [1])),
        depth_values=tuple(int(d) for d in (sweep.get("depth") or [0])),
        filling=raw.get("filling", "half"),
        seeds=seeds,
        ansatze=ansatze,
        adam=AdamConfig(**adam_raw),
        measures=meas,
        train=bool(raw.get("train", True)),
        fit=fit,
    )


def load_config(path) -> ExperimentConfig:
    with Path(path).open(encoding="utf-8") as fh:
        return parse_config(json.load(fh))
