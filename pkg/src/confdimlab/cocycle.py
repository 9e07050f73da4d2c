"""Shells of the regular elementary polygonal complex and cocycle energies.

Conventions
-----------
Angles are kept in turns (1 turn = 2*pi) as exact rationals ``j / M``.
Shell ``n >= 0`` of the planar collapse has ``M_n = m (m-1)**n`` black
edges.  Black edge ``j`` of shell ``n`` owns the arc ``[j/M_n, (j+1)/M_n]``
and carries the two ideal angles at its ends; angle 0 sits at the start
of the first arc of the base cell.  Attaching cells to shell ``n``
splits every arc into ``m - 1`` equal sub-arcs, so the parent of arc
``j`` at shell ``n + 1`` is ``j // (m - 1)``.

The ideal points met at *depth* ``d >= 1`` are the arc ends of shell
``d - 1``: there are ``m (m-1)**(d-1)`` of them, equally spaced, and a
depth-``d`` arc has width ``1 / (m (m-1)**(d-1))`` turns.

In the thick complex every black edge lies on ``k`` cells, so each
planar shell-``n`` edge has ``(k-1)**n`` preimages with identical ideal
angles; shell energies factor as ``(k-1)**n`` times the planar energy.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .closed_forms import elementary_exponent
from .errors import BadExponent, BadParams, DepthTooLarge, LipschitzViolated, SameArc

PLANAR_CAP = 10**8
EXPLICIT_MAX_DEPTH = 3
VERDICT_EPS = 0.02
CHUNK = 1 << 22
# float angles near 2*pi carry an absolute error of a few ulps, which is
# not small next to the arc width at deep shells
ANGLE_ROUNDING = 8.0 * math.pi * np.finfo(np.float64).eps


@dataclass(frozen=True)
class ShellComplex:
    """Planar shells ``0..N`` of the regular complex with parameters ``(m, k)``."""

    m: int
    k: int
    N: int

    def planar_count(self, n):
        """Black edges of the planar collapse at shell ``n``."""
        return self.m * (self.m - 1) ** n

    def thick_count(self, n):
        """Frontier black edges of the thick complex at shell ``n``."""
        return self.planar_count(n) * (self.k - 1) ** n

    def multiplicity(self, n):
        return (self.k - 1) ** n

    def arc(self, n, j):
        """Exact arc ``(start, end)`` in turns of black edge ``j`` at shell ``n``."""
        M = self.planar_count(n)
        if not 0 <= j < M:
            raise BadParams(f"shell {n} has {M} black edges; no edge {j}")
        return Fraction(j, M), Fraction(j + 1, M)

    def arc_width(self, n):
        return Fraction(1, self.planar_count(n))

    def ideal_points(self, depth):
        """Exact ideal angles (turns) met at ``depth >= 1``."""
        M = self.planar_count(depth - 1)
        return [Fraction(j, M) for j in range(M)]

    def parent(self, n, j):
        """Index of the shell-``n - 1`` arc containing arc ``j`` of shell ``n``."""
        if n == 0:
            return None
        return j // (self.m - 1)

    def ancestor(self, depth, j, target_depth):
        """Depth-``target_depth`` arc containing depth-``depth`` arc ``j``."""
        if not 1 <= target_depth <= depth:
            raise BadParams("target depth must lie in [1, depth]")
        return j // (self.m - 1) ** (depth - target_depth)

    def subdivide(self, n):
        """Shell ``n + 1`` arc starts, built from shell ``n`` by splitting each arc.

        Returns exact numerators over ``planar_count(n + 1)``.
        """
        starts = np.arange(self.planar_count(n), dtype=np.int64)
        split = np.arange(self.m - 1, dtype=np.int64)
        return (starts[:, None] * (self.m - 1) + split[None, :]).ravel()

    def check_invariants(self, max_shell=None):
        """Exact count and spacing checks; returns the number of shells checked."""
        top = self.N if max_shell is None else min(self.N, max_shell)
        for n in range(top + 1):
            if self.thick_count(n) != self.m * (self.m - 1) ** n * (self.k - 1) ** n:
                raise AssertionError(f"thick count wrong at shell {n}")
            if n < top:
                children = self.subdivide(n)
                expected = np.arange(self.planar_count(n + 1), dtype=np.int64)
                if children.size != self.planar_count(n + 1) or not np.array_equal(children, expected):
                    raise AssertionError(f"subdivision of shell {n} is not uniform")
        return top + 1

    def to_dict(self):
        return {
            "m": self.m,
            "k": self.k,
            "N": self.N,
            "planar_counts": [self.planar_count(n) for n in range(self.N + 1)],
            "thick_counts": [self.thick_count(n) for n in range(self.N + 1)],
        }


def build_shell_complex(m, k, N):
    if isinstance(m, bool) or not isinstance(m, int) or m < 3:
        raise BadParams(f"m must be an integer >= 3, got {m!r}")
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise BadParams(f"k must be an integer >= 2, got {k!r}")
    if isinstance(N, bool) or not isinstance(N, int) or N < 0:
        raise BadParams(f"depth must be a non-negative integer, got {N!r}")
    if m * (m - 1) ** N > PLANAR_CAP:
        raise DepthTooLarge(f"m (m-1)^N = {m * (m - 1) ** N} exceeds {PLANAR_CAP}")
    return ShellComplex(m, k, N)


@dataclass
class CocycleReport:
    m: int
    k: int
    p: float
    lipschitz: float
    threshold: float
    expected_ratio: float
    energies: list
    ratios: list
    fitted_ratio: float
    verdict: str
    max_df: list = field(default_factory=list)
    max_df_over_bound: float = 0.0

    def to_dict(self):
        return {
            "m": self.m,
            "k": self.k,
            "p": self.p,
            "threshold": self.threshold,
            "energies": self.energies,
            "ratios": self.ratios,
            "fitted_ratio": self.fitted_ratio,
            "expected_ratio": self.expected_ratio,
            "verdict": self.verdict,
            "max_df_over_bound": self.max_df_over_bound,
        }


def _edge_jumps(u, M, start, stop):
    """``|u(theta_j) - u(theta_{j+1})|`` for edges ``start..stop-1`` out of ``M``."""
    j = np.arange(start, stop + 1, dtype=np.float64)
    theta = 2.0 * math.pi * (j / M)
    vals = np.asarray(u(theta), dtype=np.float64)
    return np.abs(np.diff(vals))


def fitted_ratio(energies):
    """Geometric per-shell ratio from the last half of the energies (0 if any vanish)."""
    tail = energies[-math.ceil(len(energies) / 2):]
    if len(tail) < 2:
        raise BadParams("need at least two shells to fit a ratio")
    if any(e == 0 for e in tail):
        return 0.0
    n = np.arange(len(tail), dtype=np.float64)
    return float(np.exp(np.polyfit(n, np.log(tail), 1)[0]))


def verdict_for(ratio, eps=VERDICT_EPS):
    if ratio < 1.0 - eps:
        return "converges"
    if ratio > 1.0 + eps:
        return "diverges"
    return "borderline"


def cocycle_energy(u, C, sc: ShellComplex, p):
    """Per-shell l^p energies of the cocycle induced by a circle function.

    ``u`` maps an array of angles (radians) to values and is Lipschitz
    with constant ``C``.  Every black edge of shell ``n`` is checked
    against ``|df| <= C * 2*pi / M_n``, up to the rounding of the float
    angles; a failure raises ``LipschitzViolated`` with the edge as witness.
    """
    if not p > 1:
        raise BadExponent(f"p must exceed 1, got {p}")
    if not C >= 0:
        raise BadParams(f"Lipschitz constant must be >= 0, got {C}")
    p = float(p)
    energies, max_df = [], []
    worst = 0.0
    for n in range(sc.N + 1):
        M = sc.planar_count(n)
        bound = C * 2.0 * math.pi / M
        total = 0.0
        shell_max = 0.0
        for start in range(0, M, CHUNK):
            stop = min(M, start + CHUNK)
            jumps = _edge_jumps(u, M, start, stop)
            big = np.flatnonzero(jumps > bound + C * ANGLE_ROUNDING)
            if big.size:
                j = start + int(big[0])
                raise LipschitzViolated(
                    f"|df| = {jumps[big[0]]:.6g} exceeds {bound:.6g} on shell {n} edge {j}",
                    witness={"shell": n, "edge": j, "arc": [str(a) for a in sc.arc(n, j)]},
                )
            shell_max = max(shell_max, float(jumps.max()))
            total += float(np.sum(jumps**p))
        max_df.append(shell_max)
        if bound > 0:
            worst = max(worst, shell_max / bound)
        energies.append(sc.multiplicity(n) * total)
    ratios = [b / a if a > 0 else math.nan for a, b in zip(energies, energies[1:])]
    rate = fitted_ratio(energies)
    return CocycleReport(
        m=sc.m,
        k=sc.k,
        p=p,
        lipschitz=float(C),
        threshold=elementary_exponent(sc.m, sc.k),
        expected_ratio=(sc.m - 1) ** (1.0 - p) * (sc.k - 1),
        energies=energies,
        ratios=ratios,
        fitted_ratio=rate,
        verdict=verdict_for(rate),
        max_df=max_df,
        max_df_over_bound=worst,
    )


def partial_sums(report: CocycleReport, n_max):
    """Cumulative energies up to shell ``n_max``, extended past the computed
    shells with the fitted ratio."""
    e = list(report.energies)
    r = report.fitted_ratio
    while len(e) <= n_max:
        e.append(e[-1] * r)
    return np.cumsum(e[: n_max + 1]).tolist()


# -- explicit thick complex -----------------------------------------------------


def build_explicit(m, k, N):
    """Frontier black edges of the thick complex, shell by shell.

    Each edge is ``(arc index, branch word)``; the branch word records
    which of the ``k - 1`` cells was chosen at every attachment.  Only
    feasible for small depth.
    """
    if N > EXPLICIT_MAX_DEPTH:
        raise DepthTooLarge(f"explicit build is limited to depth {EXPLICIT_MAX_DEPTH}")
    build_shell_complex(m, k, N)
    shells = [[(j, ()) for j in range(m)]]
    for _ in range(N):
        nxt = []
        for j, word in shells[-1]:
            for b in range(k - 1):
                for i in range(m - 1):
                    nxt.append((j * (m - 1) + i, word + (b,)))
        shells.append(nxt)
    return shells


def check_factorization(m, k, N, u=None, p=2.0):
    """Compare the explicit build with the planar count times ``(k-1)**n``.

    Returns per-shell dicts with exact counts and, if ``u`` is given, the
    explicit and factorised energies.
    """
    sc = build_shell_complex(m, k, N)
    out = []
    for n, edges in enumerate(build_explicit(m, k, N)):
        mult = Counter(j for j, _ in edges)
        row = {
            "shell": n,
            "explicit_count": len(edges),
            "thick_count": sc.thick_count(n),
            "uniform_multiplicity": set(mult.values()) == {sc.multiplicity(n)}
            and sorted(mult) == list(range(sc.planar_count(n))),
            "distinct_words": len(set(edges)) == len(edges),
        }
        if u is not None:
            M = sc.planar_count(n)
            jumps = _edge_jumps(u, M, 0, M)
            row["explicit_energy"] = float(sum(jumps[j] ** p for j, _ in edges))
            row["factorised_energy"] = sc.multiplicity(n) * float(np.sum(jumps**p))
        out.append(row)
    return out


# -- separating functions -------------------------------------------------------


@dataclass
class SeparationWitness:
    arc1: tuple
    arc2: tuple
    support: tuple
    amplitude: float
    lipschitz: float
    owners: tuple
    values: tuple
    u: object = field(repr=False, default=None)

    def to_dict(self):
        return {
            "arc1": list(self.arc1),
            "arc2": list(self.arc2),
            "support_turns": [str(a) for a in self.support],
            "amplitude": self.amplitude,
            "lipschitz": self.lipschitz,
            "owner_turns": [str(a) for a in self.owners],
            "values": list(self.values),
        }


def _owner(sc, depth, j):
    """Ideal angle of the frontier tree owning a depth-``depth`` arc: its first
    interior subdivision point."""
    a, b = sc.arc(depth - 1, j)
    return a + (b - a) / (sc.m - 1)


def separation_witness(sc: ShellComplex, arc1, arc2, amplitude=1.0):
    """Bump ``u`` on ``arc1`` separating the frontier trees that own two arcs.

    Arcs are ``(depth, index)`` with ``1 <= depth <= N + 1``.  ``u`` is
    ``amplitude * sin^2`` rescaled to the closure of ``arc1`` and zero
    elsewhere; its Lipschitz constant is ``amplitude * pi / width`` with the
    width measured in radians.
    """
    (d1, j1), (d2, j2) = arc1, arc2
    if d1 != d2:
        raise BadParams("both arcs must lie at the same depth")
    if not 1 <= d1 <= sc.N + 1:
        raise BadParams(f"depth must lie in [1, {sc.N + 1}]")
    if j1 == j2:
        raise SameArc(f"arc {j1} given twice")
    a, b = sc.arc(d1 - 1, j1)
    sc.arc(d2 - 1, j2)
    lo, hi = float(a), float(b)
    width = hi - lo

    def u(theta):
        t = np.mod(np.asarray(theta, dtype=np.float64) / (2.0 * math.pi), 1.0)
        inside = (t >= lo) & (t <= hi)
        return np.where(inside, amplitude * np.sin(math.pi * (t - lo) / width) ** 2, 0.0)

    owners = (_owner(sc, d1, j1), _owner(sc, d2, j2))
    values = tuple(float(u(2.0 * math.pi * float(o))) for o in owners)
    # u is a function of turns scaled by 2*pi, so the slope in radians is
    # amplitude * pi / (2*pi*width)
    lipschitz = amplitude * math.pi / (2.0 * math.pi * width)
    return SeparationWitness(
        arc1=(d1, j1),
        arc2=(d2, j2),
        support=(a, b),
        amplitude=amplitude,
        lipschitz=lipschitz,
        owners=owners,
        values=values,
        u=u,
    )
