"""Command-line interface.

Subcommands: gen, solve, train, measure, fit, run, export. Output root
defaults to $HFDSLAB_OUTPUT or ./runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .. import __version__, eigensolver, measures, models, training
from ..fock import half_filling_counts, sector_dimension
from ..scaling import CurvePoint, fit_both, global_invert, piecewise_invert
from .config import load_config, parse_config
from .records import RecordWriter, export, read_records
from .recipes import RECIPES, recipe
from .run import run as run_config


def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get("HFDSLAB_OUTPUT", "runs"))


def _add_model_args(p):
    p.add_argument("--model", required=True, choices=models.ALL_KINDS)
    p.add_argument("--sites", type=int, required=True)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--j", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--filling", type=int, nargs="+", default=None,
                   help="N (spinless) or N_up N_down (spinful); default half")


def _spec_and_basis(args):
    spec = models.ModelSpec(args.model, args.sites, u=args.u, j=args.j,
                            seed=args.seed)
    counts = args.filling
    if counts is not None:
        counts = counts[0] if not spec.spinful else tuple(counts)
    basis = models.default_sector(spec, counts)
    return spec, basis


def cmd_gen(args) -> int:
    spec, basis = _spec_and_basis(args)
    ham = models.build_hamiltonian(spec, basis)
    h1 = models.one_body_matrix(spec)
    w = np.linalg.eigvalsh(h1)
    print(f"model={spec.kind} n_sites={spec.n_sites} u={spec.u} j={spec.j} "
          f"seed={spec.seed}")
    print(f"sector dim={basis.dim} modes={basis.n_modes} counts={basis.counts}")
    print(f"nnz={ham.matrix.nnz} |H|_max={ham.norm_max():.6g} "
          f"hermiticity_defect={ham.hermiticity_defect():.3e}")
    print(f"one-body levels: min={w[0]:.6g} max={w[-1]:.6g}")
    return 0


def cmd_solve(args) -> int:
    spec, basis = _spec_and_basis(args)
    ham = models.build_hamiltonian(spec, basis)
    gs = eigensolver.ground_state(ham)
    print(f"E0={gs.energy:.12g} gap={gs.gap:.6g} degenerate={gs.degenerate} "
          f"residual={gs.residual:.3e} method={gs.method}")
    return 0


def cmd_train(args) -> int:
    spec, basis = _spec_and_basis(args)
    ham = models.build_hamiltonian(spec, basis)
    gs = eigensolver.ground_state(ham)
    from .run import _make_state

    counts = basis.counts
    state = _make_state(args.ansatz, basis, spec, counts, args.m, args.depth,
                        args.seed, gs.vector)
    cfg = training.AdamConfig(lr=args.lr, max_steps=args.steps)
    rec = training.train(state, gs.vector, basis, cfg, seed=args.seed)
    print(f"params={rec.n_params} steps={rec.steps_run} "
          f"best_delta_o={rec.best_delta_o:.6e} at step {rec.best_step} "
          f"({rec.stop_reason}, {rec.wall_ms:.0f} ms)")
    return 0


def cmd_measure(args) -> int:
    spec, basis = _spec_and_basis(args)
    ham = models.build_hamiltonian(spec, basis)
    gs = eigensolver.ground_state(ham)
    v = gs.vector
    out = {
        "energy": gs.energy, "gap": gs.gap, "degenerate": gs.degenerate,
        "born_entropy": measures.born_entropy(v),
        "rdm_entropy": measures.rdm_entropy(measures.one_rdm(v, basis)),
        "entanglement_half": measures.entanglement(
            v, basis, measures.default_site_cut(basis))[0],
    }
    if basis.spinful:
        out["entanglement_spin"] = measures.entanglement(
            v, basis, measures.spin_cut_modes(basis))[0]
        out["x_observable"] = measures.x_observable(v, basis)
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_fit(args) -> int:
    records = read_records(args.records)
    pts = []
    for r in records:
        if r["kind"] != "train" or r["payload"].get("status") != "ok":
            continue
        pt, pl = r["point"], r["payload"]
        pts.append(CurvePoint(pl["n_params"], min(max(pl["best_delta_o"], 1e-300), 1.0),
                              pt["n_sites"], pt["seed"], pt["m_hidden"],
                              pt.get("depth", 0)))
    if not pts:
        print("no usable train records", file=sys.stderr)
        return 1
    by_size: dict[int, list] = {}
    for p in pts:
        by_size.setdefault(p.n_sites, []).append(p)
    ests = []
    for n_sites in sorted(by_size):
        try:
            if args.method == "global":
                est = global_invert(by_size[n_sites], args.target, args.family)
            else:
                est = piecewise_invert(by_size[n_sites], args.target, args.family)
            ests.append(est)
            print(f"n_sites={n_sites}: params@{args.target}={est.value:.1f} "
                  f"sem={est.sem if est.sem is not None else 'undefined'}")
        except Exception as exc:
            print(f"n_sites={n_sites}: {type(exc).__name__}: {exc}")
    usable = [e for e in ests if e.sem]
    if len(usable) >= 3:
        kind = records[0]["point"]["kind"]
        sector = "spinless" if kind in models.SPINLESS_KINDS else "spinful"
        dims = {e.n_sites: sector_dimension(
            sector, e.n_sites, half_filling_counts(sector, e.n_sites))
            for e in usable}
        for hyp, res in fit_both(usable, dims).items():
            print(f"{hyp}: exponent={res.exponent:.3f} rme={res.rme:.3f}")
    return 0


def cmd_run(args) -> int:
    out = _out_root(args)
    if args.target in RECIPES:
        raws = recipe(args.target)
    else:
        raws = [json.loads(Path(args.target).read_text())]
    for raw in raws:
        if args.sites:
            raw.setdefault("sweep", {})["n_sites"] = args.sites
            raw.get("model", {}).pop("n_sites", None)
        if args.seeds is not None:
            raw["seeds"] = list(range(args.seeds))
        cfg = parse_config(raw)
        run_config(cfg, out / cfg.name, workers=args.workers)
    return 0


def cmd_export(args) -> int:
    records = read_records(args.records)
    if not records:
        print("no records found", file=sys.stderr)
        return 1
    for path in export(records, args.format, args.out or "."):
        print(path)
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="hfdslab",
        description="hidden-fermion determinant state laboratory")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="draw couplings and dump a Hamiltonian summary")
    _add_model_args(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("solve", help="exact ground state of one model instance")
    _add_model_args(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("train", help="train one ansatz against the ED ground state")
    _add_model_args(p)
    p.add_argument("--ansatz", default="hfds",
                   choices=("hfds", "slater", "gutzwiller", "phase_probe",
                            "amplitude_probe"))
    p.add_argument("--m", type=int, default=1, help="hidden particles")
    p.add_argument("--depth", type=int, default=0, help="hidden layers")
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=5000)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("measure", help="complexity measures of the exact ground state")
    _add_model_args(p)
    p.set_defaults(fn=cmd_measure)

    p = sub.add_parser("fit", help="invert error curves from train records")
    p.add_argument("--records", required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--family", default="algebraic",
                   choices=("algebraic", "exponential"))
    p.add_argument("--method", default="global", choices=("global", "piecewise"))
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("run", help="run a named recipe or a config file")
    p.add_argument("target", help=f"recipe ({', '.join(sorted(RECIPES))}) or config path")
    p.add_argument("--out", default=None, help="output root (default $HFDSLAB_OUTPUT or ./runs)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sites", type=int, nargs="+", default=None,
                   help="override the size sweep")
    p.add_argument("--seeds", type=int, default=None,
                   help="override: use seeds 0..N-1")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("export", help="export a record log to flat files")
    p.add_argument("--records", required=True)
    p.add_argument("--format", default="csv", choices=("jsonl", "csv"))
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_export)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
