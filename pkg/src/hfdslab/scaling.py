"""Parameter-scaling analysis: invert error curves, fit scaling hypotheses.

A curve is a set of (parameter count, delta_O) points per system size, several
seeds deep. Two inversion routes estimate the parameters needed to reach a
target error without extrapolating: a piecewise route through the two
seed-averaged points bracketing the target, and a global per-seed
least-squares route. The per-size estimates then feed weighted fits of
P = A * N_S^m (polynomial in size) and P = A * dim^m (exponential in size),
scored by the SEM-rescaled root mean error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FAMILIES = ("algebraic", "exponential")
HYPOTHESES = ("polynomial", "exponential")


class BracketingError(RuntimeError):
    pass


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class CurvePoint:
    params: int
    delta_o: float
    n_sites: int
    seed: int
    m_hidden: int
    depth: int = 0

    def __post_init__(self):
        if self.params <= 0:
            raise ValueError("params must be positive")
        if not 0.0 < self.delta_o <= 1.0:
            raise ValueError("delta_o must lie in (0, 1]")


@dataclass(frozen=True)
class ParamsEstimate:
    n_sites: int
    value: float
    sem: float | None       # None: undefined (single seed)
    method: str
    family: str
    n_seeds: int
    underdetermined: bool = False


@dataclass(frozen=True)
class FitResult:
    hypothesis: str
    exponent: float
    prefactor: float
    rme: float
    estimates: tuple = field(repr=False)
    underdetermined: bool = False
    weighting: str = "1/sem^2 in log space"


def _family_invert(family: str, x1, y1, x2, y2, target):
    """Parameters at `target` for the 2-point family fit, with the
    first-order sensitivities to (ln y1, ln y2)."""
    l1, l2, lt = math.log(y1), math.log(y2), math.log(target)
    if family == "algebraic":
        x1l, x2l = math.log(x1), math.log(x2)
        d = l2 - l1
        if d == 0:
            raise FitError("flat bracketing pair")
        lnx = x1l - (l1 - lt) * (x2l - x1l) / d
        dl1 = -(x2l - x1l) * (l2 - lt) / d**2
        dl2 = (x2l - x1l) * (l1 - lt) / d**2
        x_star = math.exp(lnx)
        return x_star, x_star * dl1, x_star * dl2
    if family == "exponential":
        e = l1 - l2
        if e == 0:
            raise FitError("flat bracketing pair")
        x_star = x1 + (l1 - lt) * (x2 - x1) / e
        dl1 = (x2 - x1) * (lt - l2) / e**2
        dl2 = (x2 - x1) * (l1 - lt) / e**2
        return x_star, dl1, dl2
    raise ValueError(f"unknown family {family!r}")


def _grouped_means(points):
    """Seed-averaged (params, mean, sem, count) sorted by params."""
    by_params: dict[int, list[float]] = {}
    for p in points:
        by_params.setdefault(p.params, []).append(p.delta_o)
    out = []
    for params in sorted(by_params):
        vals = np.array(by_params[params])
        sem = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        out.append((params, float(vals.mean()), sem, vals.size))
    return out


def piecewise_invert(points, target: float, family: str) -> ParamsEstimate:
    """Invert between the two seed-averaged neighbors bracketing the target.

    Never extrapolates: a target outside the range of the means raises
    BracketingError. The SEMs of the two bracketing means propagate through
    the inversion to first order.
    """
    groups = _grouped_means(points)
    if len(groups) < 2:
        raise BracketingError("need at least two parameter counts")
    pair = None
    for a, b in zip(groups[:-1], groups[1:]):
        if (a[1] - target) * (b[1] - target) <= 0:
            pair = (a, b)
            break
    if pair is None:
        raise BracketingError(
            f"target {target} outside the mean range "
            f"[{min(g[1] for g in groups)}, {max(g[1] for g in groups)}]")
    (x1, y1, s1, k1), (x2, y2, s2, k2) = pair
    x_star, d1, d2 = _family_invert(family, x1, y1, x2, y2, target)
    var = 0.0
    if s1 > 0:
        var += (d1 * s1 / y1) ** 2
    if s2 > 0:
        var += (d2 * s2 / y2) ** 2
    n_sites = points[0].n_sites
    n_seeds = len({p.seed for p in points})
    return ParamsEstimate(n_sites, float(x_star), math.sqrt(var),
                          "piecewise", family, n_seeds)


def _lstsq_family(family: str, xs, ys):
    """(lnA, m) of y = A x^-m (algebraic) or y = A e^-mx (exponential)."""
    ys = np.log(np.asarray(ys, dtype=float))
    t = np.log(xs) if family == "algebraic" else np.asarray(xs, dtype=float)
    a = np.stack([np.ones_like(t), -t], axis=1)
    coef, *_ = np.linalg.lstsq(a, ys, rcond=None)
    return float(coef[0]), float(coef[1])


def _family_solve(family: str, ln_a: float, m: float, target: float) -> float:
    if m == 0:
        raise FitError("zero decay rate, cannot invert")
    if family == "algebraic":
        return math.exp((ln_a - math.log(target)) / m)
    return (ln_a - math.log(target)) / m


def global_invert(points, target: float, family: str,
                  exclude_m0: bool = True) -> ParamsEstimate:
    """Least-squares fit per seed over all points, inverted and aggregated.

    M = 0 points are excluded by default but retained when fewer than two
    points would remain; the aggregate is the seed mean with the
    sample-variance SEM. A single seed leaves the SEM undefined (None), never
    silently zero.
    """
    by_seed: dict[int, list[CurvePoint]] = {}
    for p in points:
        by_seed.setdefault(p.seed, []).append(p)
    per_seed = []
    underdetermined = False
    for seed in sorted(by_seed):
        pts = sorted(by_seed[seed], key=lambda p: p.params)
        if exclude_m0:
            kept = [p for p in pts if p.m_hidden != 0]
            if len(kept) < 2:
                kept = pts
        else:
            kept = pts
        if len(kept) < 2:
            raise FitError(f"seed {seed}: need at least two points, got {len(kept)}")
        if len(kept) == 2:
            underdetermined = True
        ln_a, m = _lstsq_family(family, [p.params for p in kept],
                                [p.delta_o for p in kept])
        per_seed.append(_family_solve(family, ln_a, m, target))
    vals = np.array(per_seed)
    sem = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else None
    return ParamsEstimate(points[0].n_sites, float(vals.mean()), sem,
                          "global", family, vals.size,
                          underdetermined=underdetermined)


def hypothesis_fit(estimates, hypothesis: str, dims=None) -> FitResult:
    """Weighted fit of per-size estimates against one scaling hypothesis.

    estimates: ParamsEstimate list (>= 2 sizes; 2 gives an exact,
    underdetermined fit with RME 0). `dims` maps each estimate's system size
    to its sector dimension and is required for the exponential hypothesis.
    RME = sqrt(mean(((P_fit - P)/SEM)^2)).
    """
    if hypothesis not in HYPOTHESES:
        raise ValueError(f"unknown hypothesis {hypothesis!r}")
    if len(estimates) < 2:
        raise FitError("need at least two system sizes")
    if hypothesis == "polynomial":
        xs = np.array([e.n_sites for e in estimates], dtype=float)
    else:
        if dims is None:
            raise FitError("exponential hypothesis needs sector dimensions")
        xs = np.array([float(dims[e.n_sites]) for e in estimates])
    ps = np.array([e.value for e in estimates])
    sems = np.array([e.sem if e.sem else 0.0 for e in estimates])
    ln_x = np.log(xs)
    ln_p = np.log(ps)
    if np.all(sems > 0):
        w = (ps / sems) ** 2   # delta method: var(ln P) = (sem/P)^2
        weighting = "1/sem^2 in log space"
    else:
        w = np.ones_like(ps)
        weighting = "unweighted (missing SEMs)"
    a = np.stack([np.ones_like(ln_x), ln_x], axis=1)
    wa = a * np.sqrt(w)[:, None]
    coef, *_ = np.linalg.lstsq(wa, ln_p * np.sqrt(w), rcond=None)
    ln_a, m = float(coef[0]), float(coef[1])
    p_fit = np.exp(ln_a + m * ln_x)
    if np.all(sems > 0):
        rme = float(np.sqrt(np.mean(((p_fit - ps) / sems) ** 2)))
    else:
        rme = float("nan")
    return FitResult(hypothesis, m, math.exp(ln_a), rme, tuple(estimates),
                     underdetermined=(len(estimates) == 2), weighting=weighting)


def fit_both(estimates, dims) -> dict:
    """Both scaling hypotheses side by side, as the comparison plots need."""
    return {h: hypothesis_fit(estimates, h, dims) for h in HYPOTHESES}


def family_value(family: str, prefactor: float, m: float, x: float) -> float:
    """Forward evaluation of a fitted family at x."""
    if family == "algebraic":
        return prefactor * x ** (-m)
    return prefactor * math.exp(-m * x)
