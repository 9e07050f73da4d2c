"""Critical exponent of modulus decay along a sequence of approximations.

For each exponent ``p`` the modulus of a fixed curve family is computed
on levels ``k`` of a graph approximation; the per-level geometric rate is
fitted on the finest levels.  ``p`` counts as decaying when that rate is
below ``1 - eps_rate``, and the crossover is located by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .approx import generate
from .errors import BadExponent, Inconclusive, TooFewLevels, ZeroModulus
from .modulus import family_from_recipe, solve_modulus

DEFAULT_EPS_RATE = 0.05
MAX_STEPS = 12
COARSE_POINTS = 5


@dataclass
class DecaySeries:
    """Modulus values of one exponent across levels, sorted by level."""

    p: float
    entries: list
    fitted_rate: float | None = None

    def __post_init__(self):
        self.entries = sorted((int(k), float(v)) for k, v in self.entries)
        for k, v in self.entries:
            if not v >= 0 or not math.isfinite(v):
                raise ValueError(f"modulus at level {k} must be finite and >= 0, got {v}")

    @property
    def has_zero(self):
        return any(v == 0 for _, v in self.entries)

    def to_dict(self):
        return {"p": self.p, "entries": [list(e) for e in self.entries], "fitted_rate": self.fitted_rate}


def _tail_rate(series: DecaySeries):
    if len(series.entries) < 3:
        raise TooFewLevels(f"need at least 3 levels, got {len(series.entries)}")
    tail = series.entries[-math.ceil(len(series.entries) / 2):]
    if any(v == 0 for _, v in tail):
        raise ZeroModulus("modulus vanishes on a fitted level")
    ks = np.array([k for k, _ in tail], dtype=np.float64)
    logs = np.log([v for _, v in tail])
    slope = np.polyfit(ks, logs, 1)[0]
    return float(np.exp(slope))


def fit_decay_rate(series: DecaySeries):
    """Per-level ratio from a least-squares fit of ``log value`` against ``k``.

    Only the last ``ceil(n/2)`` entries are used.  A vanishing modulus on
    a fitted level counts as rate 0.
    """
    try:
        rate = _tail_rate(series)
    except ZeroModulus:
        rate = 0.0
    series.fitted_rate = rate
    return rate


@dataclass
class CrossoverEstimate:
    p_star: float
    bracket: tuple
    rates: dict
    decaying: dict
    table: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    steps: int = 0
    eps_rate: float = DEFAULT_EPS_RATE

    def to_dict(self):
        return {
            "p_star": self.p_star,
            "bracket": list(self.bracket),
            "eps_rate": self.eps_rate,
            "steps": self.steps,
            "rates": {repr(p): r for p, r in sorted(self.rates.items())},
            "decaying": {repr(p): d for p, d in sorted(self.decaying.items())},
            "warnings": list(self.warnings),
        }


class ModulusSeries:
    """Callable ``p -> [(k, Mod_p)]`` over fixed levels, with a row log.

    Graphs and families are built once per level; the generation solver
    is warm-started from the active curves of the previous exponent.
    """

    def __init__(self, space_tag, levels, family_recipe, tol=1e-4, method="auto"):
        self.space_tag = space_tag
        self.levels = list(levels)
        self.family_recipe = family_recipe
        self.tol = tol
        self.method = method
        self.rows = []
        self._graphs = {}
        self._warm = {}

    def _graph(self, k):
        if k not in self._graphs:
            g = generate(self.space_tag, k)
            self._graphs[k] = (g, family_from_recipe(g, self.family_recipe))
        return self._graphs[k]

    def __call__(self, p):
        out = []
        for k in self.levels:
            g, fam = self._graph(k)
            res = solve_modulus(g, fam, p, self.tol, method=self.method, warm_start=self._warm.get(k))
            if res.method == "generation":
                self._warm[k] = res.active_curves
            self.rows.append({
                "space": self.space_tag,
                "k": k,
                "p": p,
                "family": self.family_recipe,
                "value": res.value,
                "iterations": res.iterations,
                "converged": res.converged,
            })
            out.append((k, res.value))
        return out


def estimate_confdim(space_tag=None, k_range=range(1, 6), p_lo=1.1, p_hi=4.0, family_recipe="f0",
                     eps_rate=DEFAULT_EPS_RATE, *, steps=MAX_STEPS, series_fn=None, tol=1e-4,
                     coarse_points=COARSE_POINTS, method="auto"):
    """Bisect for the exponent where the fitted modulus rate drops below ``1 - eps_rate``.

    ``series_fn(p)`` may replace the modulus computation (it must return
    ``(k, value)`` pairs); otherwise ``space_tag``, ``k_range`` and
    ``family_recipe`` define the series.  A coarse grid of
    ``coarse_points`` exponents is classified first; a decaying exponent
    followed by a non-decaying one raises ``Inconclusive`` with the
    offending values, as does a grid with no crossover.
    """
    if not p_lo > 1:
        raise BadExponent(f"p_lo must exceed 1, got {p_lo}")
    if not p_hi > p_lo:
        raise BadExponent(f"need p_lo < p_hi, got {p_lo}, {p_hi}")
    if not 0 <= steps <= MAX_STEPS:
        raise ValueError(f"steps must lie in [0, {MAX_STEPS}]")
    if coarse_points < 2:
        raise ValueError("coarse grid needs at least 2 points")
    log = None
    if series_fn is None:
        if len(list(k_range)) < 3:
            raise TooFewLevels("k_range must contain at least 3 levels")
        series_fn = log = ModulusSeries(space_tag, k_range, family_recipe, tol=tol, method=method)

    rates, decaying = {}, {}

    def classify(p):
        rate = fit_decay_rate(DecaySeries(p, series_fn(p)))
        rates[p] = rate
        decaying[p] = rate < 1.0 - eps_rate
        return decaying[p]

    grid = [float(x) for x in np.linspace(p_lo, p_hi, coarse_points)]
    flags = [classify(p) for p in grid]
    for a, b, fa, fb in zip(grid, grid[1:], flags, flags[1:]):
        if fa and not fb:
            raise Inconclusive(
                f"decay at p={a} but not at p={b}; classification is not monotone in p",
                offending=[a, b],
            )
    if not any(flags) or all(flags):
        state = "decays" if all(flags) else "does not decay"
        raise Inconclusive(f"modulus {state} on the whole range [{p_lo}, {p_hi}]", offending=[p_lo, p_hi])
    i = flags.index(True)
    lo, hi = grid[i - 1], grid[i]
    done = 0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if classify(mid):
            hi = mid
        else:
            lo = mid
        done += 1

    warnings = []
    ps = sorted(rates)
    for a, b in zip(ps, ps[1:]):
        if rates[b] > rates[a]:
            warnings.append(f"rate increases from {rates[a]:.6g} at p={a:.6g} to {rates[b]:.6g} at p={b:.6g}")
    return CrossoverEstimate(
        p_star=0.5 * (lo + hi),
        bracket=(lo, hi),
        rates=rates,
        decaying=decaying,
        table=log.rows if log is not None else [],
        warnings=warnings,
        steps=done,
        eps_rate=eps_rate,
    )
