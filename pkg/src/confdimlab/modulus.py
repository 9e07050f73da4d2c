"""Combinatorial p-modulus of curve families on approximation graphs.

``solve_modulus`` minimises ``sum rho**p`` over densities whose length is
at least 1 on every curve of the family.  Two methods are available:

* curve generation: the restricted problem over the active curves is
  solved on its dual by exact cyclic coordinate ascent, finished by a
  bound-constrained quasi-Newton run, and a vertex-weighted shortest path
  finds the most violated curve of the full family;
* potentials (connector families): admissibility is rewritten with one
  distance potential per endpoint pair, which gives a conic program of
  size linear in the graph, solved by an interior-point method.

Both report a bracket: the dual value below and the rescaled primal
``M(rho) / L_min**p`` above, where ``L_min`` comes from the full
separation oracle.

``brute_force_modulus`` is the independent check for small graphs: it
enumerates every simple curve and solves the full program by projected
gradient on the dual followed by a Newton polish, and certifies the
answer with an explicit KKT residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import clarabel
from scipy import optimize, sparse

from . import _kernels
from .approx import ApproxGraph, generate
from .errors import BadExponent, Disconnected, NoConvergence, ParseError, TooLarge, UnknownCell

MAX_OUTER = 100_000
MAX_SWEEPS = 200_000
BRUTE_FORCE_MAX_CELLS = 12
CA_BURST = 4
LOOSE_INNER_TOL = 1e-2
AUTO_GENERATION_MAX_CELLS = 64


@dataclass
class CurveFamilySpec:
    """Either an explicit list of vertex paths or a union of connector families.

    ``pairs`` holds ``(A, B)`` cell-id sets; the family is every path from
    a cell of A to a cell of B, united over the pairs.
    """

    kind: str
    curves: list = field(default_factory=list)
    pairs: list = field(default_factory=list)
    label: str = ""

    @classmethod
    def explicit(cls, curves, label="explicit"):
        return cls("explicit", curves=[list(map(int, c)) for c in curves], label=label)

    @classmethod
    def connector(cls, A, B, label="connector"):
        return cls("connector", pairs=[(sorted(set(map(int, A))), sorted(set(map(int, B))))], label=label)

    @classmethod
    def union(cls, pairs, label="union"):
        return cls(
            "connector",
            pairs=[(sorted(set(map(int, A))), sorted(set(map(int, B)))) for A, B in pairs],
            label=label,
        )


@dataclass
class ModulusResult:
    value: float
    rho_star: np.ndarray
    active_curves: list
    duals: dict
    iterations: int
    sweeps: int
    max_violation: float
    lower_bound: float
    upper_bound: float
    converged: bool
    p: float
    empty_family: bool = False
    qn_iterations: int = 0
    method: str = "generation"

    def sparse_rho(self, tol=1e-12):
        nz = np.flatnonzero(self.rho_star > tol)
        return {int(i): float(self.rho_star[i]) for i in nz}

    def to_dict(self, rho_tol=1e-12):
        return {
            "value": self.value,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "p": self.p,
            "iterations": self.iterations,
            "sweeps": self.sweeps,
            "qn_iterations": self.qn_iterations,
            "method": self.method,
            "max_violation": self.max_violation,
            "converged": self.converged,
            "empty_family": self.empty_family,
            "n_active_curves": len(self.active_curves),
            "rho": {str(k): v for k, v in self.sparse_rho(rho_tol).items()},
        }


def rho_length(rho, curve):
    """Sum of rho over the distinct cells met by ``curve``."""
    rho = np.asarray(rho, dtype=np.float64)
    cells = np.unique(np.asarray(curve, dtype=np.int64))
    if cells.size == 0:
        raise UnknownCell("empty curve")
    if cells[0] < 0 or cells[-1] >= rho.size:
        raise UnknownCell(f"curve visits a cell outside [0, {rho.size})")
    return float(rho[cells].sum())


def p_mass(rho, p):
    if not p > 1:
        raise BadExponent(f"p must exceed 1, got {p}")
    rho = np.asarray(rho, dtype=np.float64)
    return float(np.sum(rho**p))


def _mask(n, cells):
    m = np.zeros(n, dtype=np.bool_)
    cells = np.asarray(cells, dtype=np.int64)
    if cells.size and (cells.min() < 0 or cells.max() >= n):
        raise UnknownCell(f"cell id outside [0, {n})")
    m[cells] = True
    return m


def _trace(pred, t):
    path = [int(t)]
    while pred[path[-1]] >= 0:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return path


def _shortest(graph, w, src, tgt):
    t, dist, pred = _kernels.vertex_dijkstra(graph.indptr, graph.indices, w, src, tgt)
    if t < 0:
        return None, math.inf
    return _trace(pred, t), float(dist[t])


def shortest_curve(graph: ApproxGraph, rho, A, B):
    """Path from A to B of minimal rho-length (both endpoints counted)."""
    w = np.ascontiguousarray(rho, dtype=np.float64)
    if w.size != graph.n_cells:
        raise UnknownCell("density size does not match the graph")
    if len(A) == 0 or len(B) == 0:
        raise Disconnected("empty endpoint set")
    path, _ = _shortest(graph, w, _mask(graph.n_cells, A), _mask(graph.n_cells, B))
    if path is None:
        raise Disconnected("no path joins A to B")
    return path


class _Oracle:
    """Most violated curves of a family under a density."""

    def __init__(self, graph, family):
        self.graph = graph
        n = graph.n_cells
        if family.kind == "explicit":
            curves = []
            for c in family.curves:
                if not c:
                    raise UnknownCell("empty explicit curve")
                _mask(n, c)
                for a, b in zip(c, c[1:]):
                    if b not in graph.neighbors(a):
                        raise ParseError(f"explicit curve steps between non-adjacent cells {a}, {b}")
                curves.append(c)
            self.curves = curves
            cells = [np.unique(np.asarray(c, dtype=np.int64)) for c in curves]
            self.ptr = np.zeros(len(cells) + 1, dtype=np.int64)
            self.ptr[1:] = np.cumsum([len(c) for c in cells])
            self.idx = np.concatenate(cells) if cells else np.zeros(0, dtype=np.int64)
            self.pairs = []
        elif family.kind == "connector":
            self.curves = None
            self.pairs = [(_mask(n, A), _mask(n, B)) for A, B in family.pairs if len(A) and len(B)]
        else:
            raise ParseError(f"unknown family kind {family.kind!r}")

    def query(self, rho):
        """List of (length, path), one per sub-family, excluding empty ones."""
        w = np.ascontiguousarray(rho, dtype=np.float64)
        if self.curves is not None:
            if not self.curves:
                return []
            lengths = _kernels.curve_lengths(self.ptr, self.idx, w)
            i = int(np.argmin(lengths))
            return [(float(lengths[i]), self.curves[i])]
        out = []
        for src, tgt in self.pairs:
            path, length = _shortest(self.graph, w, src, tgt)
            if path is not None:
                out.append((length, path))
        return out


class _ActiveSet:
    def __init__(self, n):
        self.n = n
        self.paths = []
        self.cells = []
        self.keys = set()
        self.ptr = np.zeros(1, dtype=np.int64)
        self.idx = np.zeros(0, dtype=np.int64)
        self.lam = np.zeros(0)

    def add(self, path):
        cells = np.unique(np.asarray(path, dtype=np.int64))
        key = cells.tobytes()
        if key in self.keys:
            return False
        self.keys.add(key)
        self.paths.append(list(path))
        self.cells.append(cells)
        self.ptr = np.append(self.ptr, self.ptr[-1] + len(cells))
        self.idx = np.concatenate([self.idx, cells])
        self.lam = np.append(self.lam, 0.0)
        return True

    def loads(self):
        return np.bincount(self.idx, weights=np.repeat(self.lam, np.diff(self.ptr)), minlength=self.n)


def _rho_from_loads(s, p):
    return (np.maximum(s, 0.0) / p) ** (1.0 / (p - 1.0))


def _violation(active, rho):
    L = _kernels.curve_lengths(active.ptr, active.idx, rho)
    under = float(np.max(1.0 - L)) if L.size else 0.0
    pos = active.lam > 0
    over = float(np.max(L[pos] - 1.0)) if pos.any() else 0.0
    return max(under, over, 0.0)


def _restricted_dual(active, p):
    """Negated dual of the restricted program and its gradient, for a minimiser."""
    n_curves = len(active.paths)
    rows = np.repeat(np.arange(n_curves), np.diff(active.ptr))
    A = sparse.csr_matrix((np.ones(active.idx.size), (rows, active.idx)), shape=(n_curves, active.n))
    AT = A.T.tocsr()

    def fun(lam):
        rho = _rho_from_loads(AT @ lam, p)
        value = lam.sum() - (p - 1.0) * np.sum(rho**p)
        return -value, A @ rho - 1.0

    return fun


def _inner_solve(active, p, tol_in, sweep_budget):
    """Approximately maximise the restricted dual.

    Short bursts of exact coordinate ascent alternate with a bound-constrained
    quasi-Newton run; coordinate ascent alone crawls when many active curves
    share cells.  Returns ``(sweeps, quasi_newton_iterations, violation)``.
    """
    sweeps = qn_iters = 0
    viol = math.inf
    while sweeps < sweep_budget:
        s = active.loads()
        for _ in range(min(CA_BURST, sweep_budget - sweeps)):
            _kernels.dual_sweep(active.ptr, active.idx, active.lam, s, p)
            sweeps += 1
            viol = _violation(active, _rho_from_loads(s, p))
            if viol < tol_in:
                return sweeps, qn_iters, viol
        res = optimize.minimize(
            _restricted_dual(active, p),
            active.lam,
            jac=True,
            method="L-BFGS-B",
            bounds=[(0.0, None)] * len(active.paths),
            options={"maxiter": 20 * len(active.paths) + 200, "ftol": 1e-16, "gtol": tol_in / 4, "maxcor": 30},
        )
        qn_iters += int(res.nit)
        active.lam = np.maximum(res.x, 0.0)
        viol = _violation(active, _rho_from_loads(active.loads(), p))
        if viol < tol_in:
            break
    return sweeps, qn_iters, viol


def solve_modulus(graph: ApproxGraph, family: CurveFamilySpec, p, tol=1e-6, *, method="auto",
                  warm_start=None, max_outer=MAX_OUTER, max_sweeps=MAX_SWEEPS):
    """Mod_p of ``family`` on ``graph`` to within ``tol * (1 + value)``.

    ``method`` is ``"generation"`` (curve generation with dual coordinate
    ascent), ``"potential"`` (connector families only: the exact
    reformulation through distance potentials, solved as a conic program)
    or ``"auto"``, which uses generation on explicit families and on
    graphs with at most ``AUTO_GENERATION_MAX_CELLS`` cells.

    ``warm_start`` may hold vertex paths (e.g. the active curves of a
    previous solve at a nearby exponent); those that belong to the family
    seed the generation method's active set.  Returns a ``ModulusResult``
    whose ``lower_bound``/``upper_bound`` bracket the true modulus.
    """
    if not p > 1:
        raise BadExponent(f"p must exceed 1, got {p}")
    if not 0 < tol <= 1e-3:
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol}")
    if method not in ("auto", "generation", "potential"):
        raise ParseError(f"unknown method {method!r}; expected auto, generation or potential")
    p = float(p)
    n = graph.n_cells
    oracle = _Oracle(graph, family)
    first = oracle.query(np.ones(n))
    if not first:
        return ModulusResult(0.0, np.zeros(n), [], {}, 0, 0, 0.0, 0.0, 0.0, True, p, empty_family=True)
    if method == "auto":
        small = n <= AUTO_GENERATION_MAX_CELLS
        method = "generation" if family.kind == "explicit" or small else "potential"
    if method == "potential":
        if family.kind != "connector":
            raise ParseError("the potential method needs a connector family")
        return _solve_potential(graph, oracle, p, tol)

    active = _ActiveSet(n)
    for _, path in first:
        active.add(path)
    if warm_start:
        for path in warm_start:
            if _in_family(graph, family, path):
                active.add(path)

    tol_curve = tol / (2.0 * p)
    tol_in = tol_curve / 10.0
    # inexact early solves: the restricted problem only needs to be solved to
    # a fraction of the current oracle violation until the curve set settles
    tol_work = max(tol_in, LOOSE_INNER_TOL)
    sweeps_total = qn_total = 0
    lower = 0.0
    upper = math.inf
    for outer in range(1, max_outer + 1):
        sweeps, qn, viol = _inner_solve(active, p, tol_work, max_sweeps)
        sweeps_total += sweeps
        qn_total += qn
        rho = _rho_from_loads(active.loads(), p)
        mass = float(np.sum(rho**p))
        lower = max(lower, float(active.lam.sum()) - (p - 1.0) * mass)
        found = oracle.query(rho)
        L_min = min(length for length, _ in found)
        if L_min > 0:
            upper = min(upper, mass / L_min**p)
        if L_min >= 1.0 - tol_curve and upper - lower <= tol * (1.0 + mass):
            return _result(active, rho, mass, outer, sweeps_total, viol, lower, upper, True, p, qn_total)
        added = False
        for length, path in found:
            if length < 1.0 - tol_curve:
                added |= active.add(path)
        if added:
            tol_work = max(tol_in, min(tol_work, 0.1 * (1.0 - L_min)))
        elif tol_work > tol_in:
            tol_work = tol_in
        else:
            # gap comes from the inner solve, not from missing curves
            shortest = min(found, key=lambda t: t[0])[1]
            if not active.add(shortest):
                tol_in /= 10.0
                tol_work = tol_in
                if tol_in < 1e-15:
                    break
    raise NoConvergence(f"no convergence after {max_outer} outer iterations", lower=lower, upper=upper)


def _potential_program(graph, oracle, p):
    """Conic data for min sum rho^p over (t, rho, phi_1..phi_P).

    ``phi_i`` is a lower bound for the rho-distance from ``A_i``:
    ``phi_i <= rho`` on ``A_i``, ``phi_i(v) <= phi_i(u) + rho(v)`` on every
    directed edge and ``phi_i >= 1`` on ``B_i``.  Such a potential exists
    exactly when every ``A_i``-to-``B_i`` path has rho-length at least 1.
    Each ``t_v >= rho_v^p`` is a 3-dimensional power cone.
    """
    n = graph.n_cells
    n_pairs = len(oracle.pairs)
    e = graph.edges
    tail = np.concatenate([e[:, 0], e[:, 1]])
    head = np.concatenate([e[:, 1], e[:, 0]])
    n_var = n * (2 + n_pairs)
    T, R = 0, n

    rows, cols, vals = [], [], []
    b = []
    r0 = 0

    def add(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(np.broadcast_to(np.asarray(v, dtype=np.float64), r.shape))

    cells = np.arange(n)
    add(r0 + cells, R + cells, -1.0)  # rho >= 0
    b.append(np.zeros(n))
    r0 += n
    for i, (src, tgt) in enumerate(oracle.pairs):
        P = n * (2 + i)
        m = tail.size
        er = r0 + np.arange(m)
        add(er, P + head, 1.0)
        add(er, P + tail, -1.0)
        add(er, R + head, -1.0)
        b.append(np.zeros(m))
        r0 += m
        A = np.flatnonzero(src)
        add(r0 + np.arange(A.size), P + A, 1.0)
        add(r0 + np.arange(A.size), R + A, -1.0)
        b.append(np.zeros(A.size))
        r0 += A.size
        B = np.flatnonzero(tgt)
        add(r0 + np.arange(B.size), P + B, -1.0)
        b.append(-np.ones(B.size))
        r0 += B.size
    n_nonneg = r0
    # power cones (t_v, 1, rho_v), interleaved per cell
    add(r0 + 3 * cells, T + cells, -1.0)
    add(r0 + 3 * cells + 2, R + cells, -1.0)
    cone_b = np.zeros(3 * n)
    cone_b[1::3] = 1.0
    b.append(cone_b)
    r0 += 3 * n

    A_mat = sparse.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(r0, n_var)
    )
    c = np.zeros(n_var)
    c[T:T + n] = 1.0
    cones = [clarabel.NonnegativeConeT(n_nonneg)] + [clarabel.PowerConeT(1.0 / p)] * n
    return sparse.csc_matrix((n_var, n_var)), c, A_mat, np.concatenate(b), cones


def _solve_potential(graph, oracle, p, tol):
    P, c, A_mat, b, cones = _potential_program(graph, oracle, p)
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_threads = 1
    sol = clarabel.DefaultSolver(P, c, A_mat, b, cones, settings).solve()
    status = str(sol.status)
    n = graph.n_cells
    if "Solved" not in status:
        raise NoConvergence(f"conic solver stopped with status {status}", lower=math.nan, upper=math.nan)
    rho = np.maximum(np.asarray(sol.x[n:2 * n]), 0.0)
    mass = float(np.sum(rho**p))
    found = oracle.query(rho)
    L_min = min(length for length, _ in found)
    upper = mass / L_min**p if L_min > 0 else math.inf
    lower = min(float(sol.obj_val_dual), upper)
    tol_curve = tol / (2.0 * p)
    converged = L_min >= 1.0 - tol_curve and upper - lower <= tol * (1.0 + mass)
    if not converged:
        raise NoConvergence(
            f"potential solve not certified: shortest curve {L_min:.3g}, bracket [{lower:.6g}, {upper:.6g}]",
            lower=lower,
            upper=upper,
        )
    res = ModulusResult(
        value=mass,
        rho_star=rho,
        active_curves=[list(path) for _, path in found],
        duals={},
        iterations=1,
        sweeps=0,
        max_violation=max(0.0, 1.0 - L_min),
        lower_bound=lower,
        upper_bound=upper,
        converged=True,
        p=p,
        qn_iterations=int(sol.iterations),
        method="potential",
    )
    return res


def _in_family(graph, family, path):
    if not path:
        return False
    for a, b in zip(path, path[1:]):
        if b not in graph.neighbors(a):
            return False
    if family.kind == "explicit":
        key = sorted(set(path))
        return any(sorted(set(c)) == key for c in family.curves)
    return any(path[0] in A and path[-1] in B for A, B in family.pairs)


def _result(active, rho, mass, outer, sweeps, viol, lower, upper, converged, p, qn_iterations=0):
    duals = {tuple(path): float(l) for path, l in zip(active.paths, active.lam)}
    return ModulusResult(
        value=mass,
        rho_star=rho,
        active_curves=[list(c) for c in active.paths],
        duals=duals,
        iterations=outer,
        sweeps=sweeps,
        max_violation=viol,
        lower_bound=lower,
        upper_bound=upper,
        converged=converged,
        p=p,
        qn_iterations=qn_iterations,
    )


# -- brute force oracle -------------------------------------------------------


def enumerate_simple_paths(graph: ApproxGraph, A, B):
    """Vertex sets of all simple A-to-B paths that contain no smaller such set."""
    A = set(map(int, A))
    B = set(map(int, B))
    found = set()

    def dfs(v, path, on):
        if v in B:
            found.add(frozenset(path))
            return
        for x in graph.neighbors(v):
            x = int(x)
            if x not in on:
                on.add(x)
                path.append(x)
                dfs(x, path, on)
                path.pop()
                on.remove(x)

    for a in sorted(A):
        dfs(a, [a], {a})
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    minimal = []
    for s in ordered:
        if not any(m <= s for m in minimal):
            minimal.append(s)
    return [sorted(s) for s in minimal]


def _family_cell_sets(graph, family):
    if family.kind == "explicit":
        sets = {frozenset(c) for c in family.curves}
        ordered = sorted(sets, key=lambda s: (len(s), sorted(s)))
        minimal = []
        for s in ordered:
            if not any(m <= s for m in minimal):
                minimal.append(s)
        return [sorted(s) for s in minimal]
    out = []
    seen = set()
    for A, B in family.pairs:
        for s in enumerate_simple_paths(graph, A, B):
            if frozenset(s) not in seen:
                seen.add(frozenset(s))
                out.append(s)
    ordered = sorted(out, key=lambda s: (len(s), s))
    minimal = []
    for s in ordered:
        if not any(set(m) <= set(s) for m in minimal):
            minimal.append(s)
    return minimal


def kkt_residual(Amat, lam, rho, p):
    """Max violation of the KKT conditions of min sum rho^p s.t. A rho >= 1."""
    L = Amat @ rho
    s = Amat.T @ lam
    stat = np.abs(p * rho ** (p - 1.0) - s)
    return max(
        float(np.max(np.maximum(0.0, 1.0 - L))),
        float(np.max(np.maximum(0.0, -lam))),
        float(np.max(np.abs(lam * (L - 1.0)))),
        float(np.max(stat)),
    )


def _polish(Amat, lam, p):
    """Newton on the active curves' equations A_act rho(A_act^T mu) = 1."""
    q = 1.0 / (p - 1.0)
    lam = lam.copy()
    for _ in range(6):
        act = lam > 1e-10 * max(lam.max(), 1e-300)
        if not act.any():
            return lam
        Aa = Amat[act]
        mu = lam[act]
        for _ in range(60):
            s = Aa.T @ mu
            rho = (np.maximum(s, 0) / p) ** q
            F = Aa @ rho - 1.0
            if np.max(np.abs(F)) < 1e-15:
                break
            with np.errstate(divide="ignore", invalid="ignore"):
                drho = np.where(s > 0, q / p * (np.maximum(s, 0) / p) ** (q - 1.0), 0.0)
            J = (Aa * drho) @ Aa.T
            step = np.linalg.lstsq(J, F, rcond=None)[0]
            t = 1.0
            while np.any(mu - t * step <= 0) and t > 1e-12:
                t *= 0.5
            mu = mu - t * step
        if np.all(mu > 0):
            out = np.zeros_like(lam)
            out[act] = mu
            return out
        lam[act] = np.maximum(mu, 0.0)
    return lam


def _brute_force_details(graph, family, p, max_iter=10**6):
    if graph.n_cells > BRUTE_FORCE_MAX_CELLS:
        raise TooLarge(f"brute force is limited to {BRUTE_FORCE_MAX_CELLS} cells")
    if not p > 1:
        raise BadExponent(f"p must exceed 1, got {p}")
    sets = _family_cell_sets(graph, family)
    n = graph.n_cells
    if not sets:
        return {"value": 0.0, "rho": np.zeros(n), "kkt": 0.0, "iterations": 0, "curves": 0}
    Amat = np.zeros((len(sets), n))
    for i, s in enumerate(sets):
        Amat[i, s] = 1.0
    q = 1.0 / (p - 1.0)

    def rho_of(lam):
        return (np.maximum(Amat.T @ lam, 0.0) / p) ** q

    def g(lam):
        return lam.sum() - (p - 1.0) * np.sum(rho_of(lam) ** p)

    lam = np.zeros(len(sets))
    step = 1.0
    best = (math.inf, lam, rho_of(lam))
    gl = g(lam)
    for it in range(1, max_iter + 1):
        grad = 1.0 - Amat @ rho_of(lam)
        while True:
            cand = np.maximum(lam + step * grad, 0.0)
            gc = g(cand)
            d = cand - lam
            if gc >= gl + np.dot(grad, d) - np.dot(d, d) / (2.0 * step) or step < 1e-14:
                break
            step *= 0.5
        lam, gl = cand, gc
        step *= 1.5
        if it % 50 == 0 or it == max_iter:
            pol = _polish(Amat, lam, p)
            rho = rho_of(pol)
            res = kkt_residual(Amat, pol, rho, p)
            if res < best[0]:
                best = (res, pol, rho)
            if res < 1e-10:
                break
    res, lam, rho = best
    return {
        "value": float(np.sum(rho**p)),
        "rho": rho,
        "lam": lam,
        "kkt": res,
        "iterations": it,
        "curves": len(sets),
        "A": Amat,
    }


def brute_force_modulus(graph: ApproxGraph, family: CurveFamilySpec, p, max_iter=10**6):
    """Reference Mod_p over all simple curves; certified by KKT residual < 1e-8."""
    out = _brute_force_details(graph, family, p, max_iter=max_iter)
    if out["kkt"] >= 1e-8:
        raise NoConvergence(f"brute force KKT residual {out['kkt']:.3g} >= 1e-8")
    return out["value"]


# -- families on the unit square ----------------------------------------------

_EPS = 1e-12
SIDES = ("left", "right", "bottom", "top")
CORNERS = ("bl", "br", "tl", "tr")
CORNER_SIZE = 0.25
F0_PAIRS = (("left", "right"), ("bottom", "top"), ("bl", "tr"), ("br", "tl"))


def region_cells(graph: ApproxGraph, name):
    """Cells touching a side of the unit square, or meeting a corner square of side 1/4."""
    if graph.centers is None:
        raise ParseError("region selection needs cell centers")
    x, y = graph.centers[:, 0], graph.centers[:, 1]
    h = graph.scale / 2.0
    masks = {
        "left": x - h <= _EPS,
        "right": x + h >= 1.0 - _EPS,
        "bottom": y - h <= _EPS,
        "top": y + h >= 1.0 - _EPS,
    }
    lo_x, hi_x = x - h < CORNER_SIZE - _EPS, x + h > 1.0 - CORNER_SIZE + _EPS
    lo_y, hi_y = y - h < CORNER_SIZE - _EPS, y + h > 1.0 - CORNER_SIZE + _EPS
    masks.update({"bl": lo_x & lo_y, "br": hi_x & lo_y, "tl": lo_x & hi_y, "tr": hi_x & hi_y})
    if name not in masks:
        raise ParseError(f"unknown region {name!r}; expected one of {SIDES + CORNERS}")
    return np.flatnonzero(masks[name]).tolist()


def family_from_recipe(graph: ApproxGraph, recipe):
    """``crossing:SIDE1,SIDE2`` or ``f0`` (union of the four crossing families)."""
    if recipe == "f0":
        pairs = [(region_cells(graph, a), region_cells(graph, b)) for a, b in F0_PAIRS]
        return CurveFamilySpec.union(pairs, label="f0")
    kind, _, rest = recipe.partition(":")
    if kind != "crossing" or rest.count(",") != 1:
        raise ParseError(f"bad family recipe {recipe!r}; use crossing:SIDE1,SIDE2 or f0")
    a, b = rest.split(",")
    return CurveFamilySpec.connector(region_cells(graph, a), region_cells(graph, b), label=recipe)


SWEEP_COLUMNS = ("space", "k", "p", "family", "value", "iterations", "converged")


def iter_modulus_sweep(space_tag, levels, p_grid, family_recipe, tol=1e-4):
    """Yield one row per (k, p), warm-starting each level across exponents."""
    for k in levels:
        graph = generate(space_tag, k)
        family = family_from_recipe(graph, family_recipe)
        warm = None
        for p in p_grid:
            row = {"space": space_tag, "k": k, "p": p, "family": family_recipe}
            try:
                res = solve_modulus(graph, family, p, tol, warm_start=warm)
                warm = res.active_curves
                row.update(value=res.value, iterations=res.iterations, converged=res.converged,
                           lower_bound=res.lower_bound, upper_bound=res.upper_bound)
            except (NoConvergence, Disconnected) as exc:
                row.update(value=math.nan, iterations=0, converged=False, error=str(exc))
            yield row


def modulus_sweep(space_tag, levels, p_grid, family_recipe, tol=1e-4):
    return list(iter_modulus_sweep(space_tag, levels, p_grid, family_recipe, tol))
