"""Built-in experiment recipes.

A recipe expands to one config per model kind involved (the runner executes
them in order into one record log). Settings encode the default surveys:
entropy-vs-size panels, error-vs-parameter-count curves with interpolation
targets, interaction sweeps for the entropy scatters, the pairing-observable
ratio scan, the area-law contrast, the probe states, orbital correlation
maps, and the away-from-half-filling variant. Sizes are the full survey
sizes; override with --sites/--seeds for a quick desk pass.
"""

from __future__ import annotations

_U_SWEEP = [round(0.1 * 10 ** (i / 7), 4) for i in range(17)]  # 0.1 .. ~23
_RATIOS = [10.0 ** e for e in (-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0)]
_SIX_SEEDS = list(range(6))
_M_SWEEP = [0, 1, 2, 4, 8, 16]
_SPINFUL = ("hubbard", "density", "pair", "spin")
_BASE_MEASURES = ["born_entropy", "rdm_entropy", "entanglement_half"]


def _entropy_survey() -> list[dict]:
    cfgs = [{
        "name": "fig1-syk",
        "model": {"kind": "syk", "u": 3.0, "j": 0.0},
        "sweep": {"n_sites": [12, 14, 16, 18, 20]},
        "seeds": _SIX_SEEDS,
        "train": False,
        "measures": _BASE_MEASURES,
    }]
    for kind in _SPINFUL:
        cfgs.append({
            "name": f"fig1-{kind}",
            "model": {"kind": kind, "u": 3.0, "j": 1.0},
            "sweep": {"n_sites": [6, 8, 10, 12]},
            "seeds": _SIX_SEEDS,
            "train": False,
            "measures": _BASE_MEASURES + ["entanglement_spin"],
        })
    return cfgs


def _scaling_curves_syk() -> list[dict]:
    return [{
        "name": "fig3-syk",
        "model": {"kind": "syk", "u": 3.0, "j": 0.0},
        "sweep": {"n_sites": [12, 14, 16, 18, 20], "m_hidden": _M_SWEEP,
                  "depth": [2]},
        "seeds": _SIX_SEEDS,
        "ansatze": ["hfds"],
        "measures": _BASE_MEASURES,
        "adam": {"max_steps": 20000},
        "fit": {"target": 0.05, "family": "exponential"},
    }]


def _scaling_curves_models() -> list[dict]:
    return [{
        "name": f"fig3-{kind}",
        "model": {"kind": kind, "u": 3.0, "j": 1.0},
        "sweep": {"n_sites": [6, 8, 10, 12], "m_hidden": _M_SWEEP, "depth": [0]},
        "seeds": _SIX_SEEDS,
        "ansatze": ["hfds"],
        "measures": _BASE_MEASURES,
        "adam": {"max_steps": 20000},
        "fit": {"target": 0.05, "family": "algebraic"},
    } for kind in _SPINFUL]


def _interaction_sweep() -> list[dict]:
    return [{
        "name": "fig4",
        "model": {"kind": "hubbard", "n_sites": 8, "j": 1.0},
        "sweep": {"u": _U_SWEEP, "m_hidden": [1], "depth": [0]},
        "seeds": _SIX_SEEDS,
        "ansatze": ["hfds"],
        "measures": _BASE_MEASURES + ["entanglement_spin", "x_observable"],
        "adam": {"max_steps": 8000},
    }]


def _correlation_sweep() -> list[dict]:
    pairs = [[round(1.0 - u, 4), round(u, 4)]  # fixed total coupling j + u = 1
             for u in [0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95]]
    return [{
        "name": "fig5",
        "model": {"kind": "syk", "n_sites": 14},
        "sweep": {"ju": pairs, "m_hidden": [1], "depth": [0, 1, 2]},
        "seeds": _SIX_SEEDS,
        "ansatze": ["hfds"],
        "measures": _BASE_MEASURES,
        "adam": {"max_steps": 8000},
    }]


def _pairing_scan() -> list[dict]:
    return [{
        "name": f"fig6-{kind}",
        "model": {"kind": kind, "n_sites": 8, "u": 1.0},
        "sweep": {"ju": [[round(r, 6), 1.0] for r in _RATIOS]},
        "seeds": _SIX_SEEDS,
        "train": False,
        "measures": ["born_entropy", "rdm_entropy", "x_observable"],
    } for kind in ("density", "spin", "pair")]


def _area_law() -> list[dict]:
    return [{
        "name": "appD-arealaw",
        "model": {"kind": "syk1d", "u": 1.0, "j": 0.0},
        "sweep": {"n_sites": [6, 8, 10], "m_hidden": [0, 1, 2, 3, 4, 6],
                  "depth": [0]},
        "seeds": _SIX_SEEDS,
        "ansatze": ["hfds"],
        "measures": _BASE_MEASURES,
        "adam": {"max_steps": 8000},
        "fit": {"target": 0.05, "family": "algebraic"},
    }]


def _probes() -> list[dict]:
    return [{
        "name": "appE-probes",
        "model": {"kind": "syk", "j": 1.0},
        "sweep": {"n_sites": [8, 10, 12], "u": _U_SWEEP, "depth": [1]},
        "seeds": list(range(10)),
        "ansatze": ["phase_probe", "amplitude_probe"],
        "measures": ["rdm_entropy"],
        "adam": {"max_steps": 6000},
    }]


def _mutual_information() -> list[dict]:
    return [{
        "name": "appF-mutualinfo",
        "model": {"kind": "hubbard", "n_sites": 8, "j": 1.0},
        "sweep": {"u": [1.0, 3.0, 8.0, 20.0]},
        "seeds": _SIX_SEEDS,
        "train": False,
        "measures": ["mutual_information", "spectrum_half", "spectrum_spin",
                     "entanglement_half", "entanglement_spin"],
    }]


def _doped() -> list[dict]:
    return [{
        "name": "appG-doped",
        "model": {"kind": "hubbard", "n_sites": 8, "j": 1.0},
        "sweep": {"u": _U_SWEEP, "m_hidden": [1], "depth": [0]},
        "filling": [3, 3],
        "seeds": _SIX_SEEDS,
        "ansatze": ["hfds", "gutzwiller"],
        "measures": ["born_entropy", "rdm_entropy"],
        "adam": {"max_steps": 8000},
    }]


RECIPES = {
    "fig1": _entropy_survey,
    "fig3-syk": _scaling_curves_syk,
    "fig3-models": _scaling_curves_models,
    "fig4": _interaction_sweep,
    "fig5": _correlation_sweep,
    "fig6": _pairing_scan,
    "appD-arealaw": _area_law,
    "appE-probes": _probes,
    "appF-mutualinfo": _mutual_information,
    "appG-doped": _doped,
}


def recipe(name: str) -> list[dict]:
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; have {sorted(RECIPES)}")
    return RECIPES[name]()
