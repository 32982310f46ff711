"""Sweep orchestration: expand a config, run every point, persist records.

Each sweep point is (n_sites, couplings, seed, ansatz, M, depth). A point
draws couplings, builds the Hamiltonian, solves the ground state, optionally
trains every requested ansatz against it, and measures both the exact and
trained states. Fits run after the sweep when the config asks for them.

Runs resume: completed (config_hash, point) pairs found in the record log are
skipped. Points may execute on a process pool; records are appended by the
parent in submission order, so payload bytes do not depend on the worker
count.
"""

from __future__ import annotations

import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import eigensolver, measures, models, training
from ..ansatz import (AmplitudeProbeState, GutzwillerState, HfdsState,
                      PhaseProbeState, slater)
from ..fock import Spin, half_filling_counts, sector_dimension
from ..scaling import CurvePoint, fit_both, global_invert, piecewise_invert
from .config import ExperimentConfig
from .records import RecordWriter, point_key

try:  # keep BLAS from fighting the numba thread pool on small boxes
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    threadpool_limits = None


def _counts_for(config: ExperimentConfig, spec: models.ModelSpec):
    filling = config.filling
    if filling == "half":
        return half_filling_counts(spec.sector_kind, spec.n_sites)
    if spec.spinful:
        return (int(filling[0]), int(filling[1]))
    return int(filling) if np.isscalar(filling) else int(filling[0])


def expand_points(config: ExperimentConfig) -> list[dict]:
    """The deterministic sweep grid, in record order."""
    pts = []
    if config.ju_pairs is not None:
        couplings = [(j, u) for (j, u) in config.ju_pairs]
    else:
        couplings = [(config.j, u) for u in config.u_values]
    for n_sites in config.n_sites_values:
        for (j, u) in couplings:
            for seed in config.seeds:
                pts.append({"kind": config.model_kind, "n_sites": n_sites,
                            "u": u, "j": j, "seed": seed})
    return pts


def _make_state(name: str, basis, spec, counts, m_hidden, depth, seed, target):
    phi0 = models.free_orbitals(spec, counts)
    n = basis.n_particles
    if name == "hfds":
        return HfdsState.init(basis.n_modes, n, m_hidden, depth, seed, phi0=phi0)
    if name == "slater":
        return slater(basis.n_modes, n, seed, phi0=phi0)
    if name == "gutzwiller":
        if not basis.spinful:
            raise ValueError("gutzwiller needs a spinful sector")
        return GutzwillerState.init(basis.n_sites, n, seed, phi0=phi0)
    if name == "phase_probe":
        return PhaseProbeState.init(basis, target, seed, phi0=phi0)
    if name == "amplitude_probe":
        return AmplitudeProbeState.init(basis, target, depth, seed)
    raise ValueError(f"unknown ansatz {name!r}")


def _measure_payload(v, basis, which) -> dict:
    out = {}
    if "born_entropy" in which:
        out["born_entropy"] = measures.born_entropy(v)
    if "rdm_entropy" in which:
        out["rdm_entropy"] = measures.rdm_entropy(measures.one_rdm(v, basis))
    if "entanglement_half" in which or "spectrum_half" in which:
        ent, spec_xi = measures.entanglement(v, basis, measures.default_site_cut(basis))
        out["entanglement_half"] = ent
        if "spectrum_half" in which:
            out["spectrum_half"] = [float(x) for x in spec_xi]
    if basis.spinful and ("entanglement_spin" in which or "spectrum_spin" in which):
        ent, spec_xi = measures.entanglement(v, basis, measures.spin_cut_modes(basis))
        out["entanglement_spin"] = ent
        if "spectrum_spin" in which:
            out["spectrum_spin"] = [float(x) for x in spec_xi]
    if basis.spinful and "x_observable" in which:
        out["x_observable"] = measures.x_observable(v, basis)
    if basis.spinful and "mutual_information" in which:
        mi_same = np.zeros((basis.n_sites, basis.n_sites))
        mi_opp = np.zeros((basis.n_sites, basis.n_sites))
        for i in range(basis.n_sites):
            for j in range(basis.n_sites):
                if i != j:
                    mi_same[i, j] = measures.mutual_information(
                        v, basis, i, Spin.UP, j, Spin.UP)
                mi_opp[i, j] = measures.mutual_information(
                    v, basis, i, Spin.UP, j, Spin.DOWN)
        out["mutual_information_same"] = mi_same.tolist()
        out["mutual_information_opposite"] = mi_opp.tolist()
    return out


def run_point(config: ExperimentConfig, point: dict) -> list[tuple]:
    """All (kind, point, payload, wall_ms) rows of one sweep point."""
    t0 = time.perf_counter()
    rows = []
    spec = models.ModelSpec(config.model_kind, point["n_sites"],
                            u=point["u"], j=point["j"], seed=point["seed"])
    counts = _counts_for(config, spec)
    basis = models.default_sector(spec, counts)
    ham = models.build_hamiltonian(spec, basis)
    gs = eigensolver.ground_state(ham)
    solve_info = {"energy": gs.energy, "gap": gs.gap,
                  "degenerate": gs.degenerate, "residual": gs.residual,
                  "method": gs.method, "dim": basis.dim}

    if config.measures:
        payload = {"state": "exact", "status": "ok", **solve_info,
                   **_measure_payload(gs.vector, basis, config.measures)}
        rows.append(("measure", {**point, "state": "exact"}, payload,
                     (time.perf_counter() - t0) * 1e3))

    if not config.train:
        return rows

    for ansatz_name in config.ansatze:
        for m_hidden in config.m_values:
            for depth in config.depth_values:
                tag = {**point, "ansatz": ansatz_name, "m_hidden": m_hidden,
                       "depth": depth}
                t1 = time.perf_counter()
                try:
                    state = _make_state(ansatz_name, basis, spec, counts,
                                        m_hidden, depth, point["seed"], gs.vector)
                    rec = training.train(state, gs.vector, basis, config.adam,
                                         seed=point["seed"])
                    payload = {"status": "ok", "dim": basis.dim, **rec.payload()}
                    rows.append(("train", tag, payload,
                                 (time.perf_counter() - t1) * 1e3))
                    if config.measures:
                        v = state.amplitudes(basis.configs)
                        nrm = np.linalg.norm(v)
                        if nrm > 0:
                            v = v / nrm
                            mp = {"state": "trained", "status": "ok",
                                  "delta_o": rec.best_delta_o,
                                  **_measure_payload(v, basis, config.measures)}
                            rows.append(("measure", {**tag, "state": "trained"},
                                         mp, (time.perf_counter() - t1) * 1e3))
                except Exception as exc:  # failed row, sweep continues
                    rows.append(("train", tag,
                                 {"status": "failed", "error": f"{type(exc).__name__}: {exc}",
                                  "trace": traceback.format_exc(limit=3)},
                                 (time.perf_counter() - t1) * 1e3))
    return rows


def fit_rows(config: ExperimentConfig, train_records: list[dict]) -> list[tuple]:
    """Scaling-fit rows from this config's finished train records."""
    if not config.fit:
        return []
    fit = config.fit
    pts_by_size: dict[int, list[CurvePoint]] = {}
    for rec in train_records:
        if rec["payload"].get("status") != "ok":
            continue
        pt, pl = rec["point"], rec["payload"]
        delta_o = pl["best_delta_o"]
        if not 0.0 < delta_o <= 1.0:
            delta_o = min(max(delta_o, 1e-300), 1.0)
        pts_by_size.setdefault(pt["n_sites"], []).append(CurvePoint(
            params=pl["n_params"], delta_o=delta_o, n_sites=pt["n_sites"],
            seed=pt["seed"], m_hidden=pt["m_hidden"], depth=pt["depth"]))
    rows = []
    estimates = {"piecewise": [], "global": []}
    for n_sites in sorted(pts_by_size):
        pts = pts_by_size[n_sites]
        for method, invert in (("piecewise", piecewise_invert),
                               ("global", global_invert)):
            tag = {"kind": config.model_kind, "n_sites": n_sites,
                   "method": method, "family": fit["family"],
                   "target": fit["target"]}
            try:
                if method == "global":
                    est = invert(pts, fit["target"], fit["family"],
                                 exclude_m0=fit["exclude_m0"])
                else:
                    est = invert(pts, fit["target"], fit["family"])
                estimates[method].append(est)
                rows.append(("fit", tag,
                             {"status": "ok", "params": est.value, "sem": est.sem,
                              "n_seeds": est.n_seeds,
                              "underdetermined": est.underdetermined}, 0.0))
            except Exception as exc:
                rows.append(("fit", tag,
                             {"status": "failed",
                              "error": f"{type(exc).__name__}: {exc}"}, 0.0))
    sector_kind = ("spinless" if config.model_kind in models.SPINLESS_KINDS
                   else "spinful")
    dims = {}
    for n_sites in sorted(pts_by_size):
        counts = (half_filling_counts(sector_kind, n_sites)
                  if config.filling == "half" else config.filling)
        dims[n_sites] = sector_dimension(sector_kind, n_sites, counts)
    for method, ests in estimates.items():
        usable = [e for e in ests if e.sem]
        if len(usable) >= 3:
            both = fit_both(usable, dims)
            for hyp, res in both.items():
                rows.append(("fit", {"kind": config.model_kind,
                                     "method": method, "hypothesis": hyp,
                                     "target": fit["target"],
                                     "family": fit["family"]},
                             {"status": "ok", "exponent": res.exponent,
                              "prefactor": res.prefactor, "rme": res.rme,
                              "weighting": res.weighting}, 0.0))
    return rows


def _point_worker(config_dict: dict, point: dict):
    from .config import parse_config

    cfg = parse_config(config_dict)
    if threadpool_limits is not None:
        with threadpool_limits(limits=1):
            return run_point(cfg, point)
    return run_point(cfg, point)


def run(config: ExperimentConfig, out_dir, workers: int = 1,
        log=print) -> list[dict]:
    """Execute a config; returns the records appended in this call."""
    out_dir = Path(out_dir)
    writer = RecordWriter(out_dir / "records.jsonl")
    chash = config.config_hash()
    done = writer.completed_keys()
    points = expand_points(config)
    todo = [p for p in points if not _point_done(done, chash, config, p)]
    log(f"{config.name}: {len(points)} points, {len(points) - len(todo)} already done")
    appended = []
    if workers > 1 and len(todo) > 1:
        cfg_dict = config.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_point_worker, cfg_dict, p) for p in todo]
            for fut in futures:  # submission order: deterministic record order
                for kind, tag, payload, wall in fut.result():
                    appended.append(writer.append(kind, chash, tag, payload, wall))
    else:
        for p in todo:
            for kind, tag, payload, wall in run_point(config, p):
                appended.append(writer.append(kind, chash, tag, payload, wall))
    if config.fit:
        from .records import read_records

        train_recs = [r for r in read_records(writer.path)
                      if r["kind"] == "train" and r["config_hash"] == chash]
        existing_fits = {point_key("fit", r["point"]) for r in read_records(writer.path)
                         if r["kind"] == "fit" and r["config_hash"] == chash}
        for kind, tag, payload, wall in fit_rows(config, train_recs):
            if point_key("fit", tag) not in existing_fits:
                appended.append(writer.append(kind, chash, tag, payload, wall))
    return appended


def _point_done(done: set, chash: str, config: ExperimentConfig, point: dict) -> bool:
    """A point counts as done when every row it would emit exists."""
    keys = []
    if config.measures:
        keys.append(point_key("measure", {**point, "state": "exact"}))
    if config.train:
        for a in config.ansatze:
            for m in config.m_values:
                for d in config.depth_values:
                    keys.append(point_key(
                        "train", {**point, "ansatz": a, "m_hidden": m, "depth": d}))
    if not keys:
        return True
    return all((chash, k) in done for k in keys)
