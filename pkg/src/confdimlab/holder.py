"""Hölder functions constant on well-separated sets.

Given sets ``C`` of a bounded metric space whose pairwise relative
distance is at least ``D``, ``build_holder`` produces ``u = sum_k v_k``
where each correction layer ``v_k`` makes the partial sum constant on the
sets whose diameter lies in ``(2**-(k+1), 2**-k]``.  Every layer is a
truncated McShane extension, and everything the construction promises is
measured afterwards and stored in a ``HolderCertificate``.

All measurements are taken in the unit-diameter normalisation of the
input space.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    DTooSmall,
    NotLipschitz,
    NotUnitScale,
    RetryExhausted,
    SamePointClass,
    SeparationTooSmall,
)
from .metric import SetCollection, min_pairwise_separation, rescale_to_unit_diameter

LAMBDA = 4.0
MAX_ATTEMPTS = 8
# slack on measured-versus-promised comparisons; the promises are exact
# inequalities, the measurements carry float rounding
_RTOL = 1e-9


@dataclass(frozen=True)
class HolderParams:
    alpha: float
    D: float
    Lambda: float
    n: int
    lam: float

    def L(self, j):
        """Feasible Lipschitz sequence: exp(lam*j) for j >= -1, else 0."""
        return math.exp(self.lam * j) if j >= -1 else 0.0

    def L_hat(self, k):
        """sum_{j>=1} L_{k - j n}; finite because L vanishes below -1."""
        total = 0.0
        j = 1
        while k - j * self.n >= -1:
            total += self.L(k - j * self.n)
            j += 1
        return total

    def feasible_up_to(self, k_max):
        return all(self.L_hat(k) <= self.L(k) for k in range(k_max + 1))


def _min_feasible_n(alpha):
    n = 1
    while n * (1.0 - alpha) <= 1.0:
        n += 1
    return n


def min_separation(alpha):
    """Smallest D accepted by ``choose_parameters`` at this alpha."""
    return 24.0 * 2 ** _min_feasible_n(alpha)


def choose_parameters(alpha, D):
    """Pick Lambda, n and lambda for Hölder exponent ``alpha`` and separation ``D``.

    Lambda is fixed at 4, ``n = floor(log2(D / 24))`` and lambda is the
    midpoint of ``(ln2 / n, (1 - alpha) ln2)``, which is nonempty exactly
    when ``n (1 - alpha) > 1``.
    """
    if not 0.0 < alpha < 1.0:
        raise DTooSmall(f"alpha must lie in (0, 1), got {alpha}")
    need = min_separation(alpha)
    if not D > 8.0:
        raise DTooSmall(f"D={D} must exceed 8; alpha={alpha} needs D >= {need}", min_D=need)
    n = 0
    while 24.0 * 2.0 ** (n + 1) <= D:
        n += 1
    if n < 1 or n * (1.0 - alpha) <= 1.0:
        raise DTooSmall(
            f"D={D} gives n={n}; alpha={alpha} needs n > {1.0 / (1.0 - alpha):.6g}, i.e. D >= {need}",
            min_D=need,
        )
    lo = math.log(2.0) / n
    hi = (1.0 - alpha) * math.log(2.0)
    lam = 0.5 * (lo + hi)
    params = HolderParams(alpha=alpha, D=float(D), Lambda=LAMBDA, n=n, lam=lam)
    assert math.exp(-lam * n) < 0.5
    assert math.exp(lam) * 2.0 ** (alpha - 1.0) < 1.0
    return params


def bucketize(c: SetCollection, space=None):
    """Map bucket index k to the indices of sets with diam in (2**-(k+1), 2**-k]."""
    space = c.space if space is None else space
    if space.diam > 1.0:
        raise NotUnitScale(f"space diameter {space.diam} exceeds 1")
    buckets = {}
    for i, d in enumerate(c.diameters):
        if d <= 0:
            raise NotUnitScale(f"set {i} has zero diameter")
        k = max(0, int(math.floor(-math.log2(d))))
        while d > 2.0 ** -k:
            k -= 1
        while d <= 2.0 ** -(k + 1):
            k += 1
        buckets.setdefault(k, []).append(i)
    return dict(sorted(buckets.items()))


def mcshane_extend(partial, L, space):
    """Extend ``{point: value}`` to all points as min_w (f(w) + L d(x, w)).

    Raises ``NotLipschitz`` with a witness pair if ``partial`` is not
    L-Lipschitz on its domain.
    """
    if not partial:
        raise NotLipschitz("empty domain")
    w_idx = np.fromiter(partial.keys(), dtype=np.int64)
    vals = np.fromiter(partial.values(), dtype=np.float64)
    u = np.zeros(space.n)
    u[w_idx] = vals
    lip, i, j = _kernels.pair_ratio_max(u, space.dist, w_idx, w_idx, 1.0)
    if lip > L * (1.0 + _RTOL):
        raise NotLipschitz(f"Lipschitz constant {lip:.6g} exceeds {L:.6g}", witness=(i, j))
    f = _kernels.mcshane(vals, space.dist, w_idx, float(L))
    f[w_idx] = vals
    return f


@dataclass
class LayerRecord:
    k: int
    n_sets: int
    r: float
    L: float
    L_hat: float
    lipschitz_used: float
    sup_norm: float
    lipschitz: float
    ok: bool


@dataclass
class HolderCertificate:
    alpha: float
    holder_seminorm: float
    bound: float
    constancy: bool
    injective_on_sets: bool
    separates: bool
    layers: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    params: dict | None = None
    seed: int | None = None

    @property
    def passed(self):
        return (
            self.holder_seminorm <= self.bound
            and self.constancy
            and self.injective_on_sets
            and self.separates
            and all(layer.ok for layer in self.layers)
        )

    def to_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _unit_fraction(index, seed):
    digest = hashlib.blake2b(f"{index}:{seed}".encode(), digest_size=8).digest()
    return (int.from_bytes(digest, "little") + 0.5) / 2.0**64


def _check_support_separation(c, buckets, params):
    """Assert the bucket-gap property on every pair of sets in different buckets."""
    where = {i: k for k, members in buckets.items() for i in members}
    need = math.log2(params.D / (6.0 * params.Lambda))
    D = c.space.dist
    idx = sorted(where)
    for a_pos, a in enumerate(idx):
        for b in idx[a_pos + 1:]:
            i, j = where[a], where[b]
            if i == j:
                continue
            gap = D[np.ix_(c.sets[a], c.sets[b])].min()
            reach = params.Lambda * (2.0 ** -i + 2.0 ** -j) + 2.0 ** -(max(i, j) + 1)
            if gap <= reach and abs(i - j) < need:
                raise AssertionError(f"support separation fails for sets {a}, {b} in buckets {i}, {j}")


def _build_once(space, c, params, buckets, z1, z2, seed, seed_fn):
    n = space.n
    D = space.dist
    everyone = np.arange(n, dtype=np.int64)
    layers = []
    if seed_fn:
        L_m1 = params.L(-1)
        u = L_m1 * D[:, z1].copy()
        layers.append(LayerRecord(-1, 0, 2.0, L_m1, 0.0, L_m1, float(np.abs(u).max()), L_m1, True))
    else:
        u = np.zeros(n)
    set_value = {}
    k_max = max(buckets) if buckets else -1
    for k in range(k_max + 1):
        members = buckets.get(k, [])
        if not members:
            continue
        r = 2.0 ** -k
        L_k = params.L(k)
        L_hat = params.L_hat(k)
        near = np.zeros(n, dtype=bool)
        in_sets = np.zeros(n, dtype=bool)
        vbar = np.zeros(n)
        targets = {}
        for i in members:
            C = c.sets[i]
            near |= space.dist[:, C].min(axis=1) < params.Lambda * r
            in_sets[C] = True
            p_C = int(C[0])
            t = _unit_fraction(i, seed)
            u_C = u[p_C] + (2.0 * t - 1.0) * L_hat * r / 2.0
            targets[i] = u_C
            vbar[C] = u_C - u[C]
        W = np.flatnonzero(~near | in_sets)
        S = np.flatnonzero(in_sets)
        M = float(np.abs(vbar[S]).max())
        lip_bar, _, _ = _kernels.pair_ratio_max(vbar, D, S, W, 1.0)
        L_used = max(L_hat, lip_bar)
        if M > 0.0:
            v = _kernels.mcshane(vbar[W], D, W, float(L_used))
            np.clip(v, -M, M, out=v)
            v[W] = vbar[W]
        else:
            v = np.zeros(n)
        u = u + v
        for i in members:
            u[c.sets[i]] = targets[i]
            set_value[i] = targets[i]
        v_eff = v
        supp = np.flatnonzero(v_eff != 0.0)
        if supp.size:
            lip_v, _, _ = _kernels.pair_ratio_max(v_eff, D, supp, everyone, 1.0)
        else:
            lip_v = 0.0
        sup = float(np.abs(v_eff).max())
        ok = sup <= 2.0 * L_k * r * (1 + _RTOL) and lip_v <= L_k * (1 + _RTOL)
        layers.append(LayerRecord(k, len(members), r, L_k, L_hat, float(L_used), sup, float(lip_v), bool(ok)))
    return u, layers


def build_holder(space, c: SetCollection, alpha, z1, z2, seed=0):
    """Build a Hölder function constant on each set of ``c`` with ``u(z1) != u(z2)``.

    Returns ``(u, certificate)`` where ``u`` is an array over the points of
    ``space``.  The seed drives the choice of each set's value inside its
    admissible window; up to ``MAX_ATTEMPTS`` consecutive seeds are tried.
    """
    z1, z2 = int(z1), int(z2)
    if z1 == z2:
        raise SamePointClass("z1 and z2 must be distinct points")
    for i, C in enumerate(c.sets):
        if z1 in C and z2 in C:
            raise SamePointClass(f"z1 and z2 both lie in set {i}")
    unit, _ = rescale_to_unit_diameter(space)
    cu = SetCollection(unit, [s.tolist() for s in c.sets])
    if len(cu) >= 2:
        sep = min_pairwise_separation(cu)
        try:
            params = choose_parameters(alpha, sep)
        except DTooSmall as exc:
            raise SeparationTooSmall(
                f"measured separation {sep:.6g} < required {exc.min_D}", measured=sep, required=exc.min_D
            ) from exc
    else:
        params = choose_parameters(alpha, min_separation(alpha))
    buckets = bucketize(cu)
    k_max = max(buckets) if buckets else 0
    if not params.feasible_up_to(k_max):
        raise AssertionError("Lipschitz sequence not feasible")
    _check_support_separation(cu, buckets, params)

    seed_fn = len(cu) == 0
    last = None
    for attempt in range(MAX_ATTEMPTS):
        s = seed + attempt
        u, layers = _build_once(unit, cu, params, buckets, z1, z2, s, seed_fn)
        cert = verify_certificate(u, unit, cu, alpha, z1, z2)
        cert.layers = layers
        cert.params = asdict(params)
        cert.seed = s
        if cert.passed:
            return u, cert
        last = cert
        if not cert.separates:
            seed_fn = True
    raise RetryExhausted(f"no seed in [{seed}, {seed + MAX_ATTEMPTS}) produced a passing certificate: {last.witnesses}")


def verify_certificate(u, space, c: SetCollection, alpha, z1, z2):
    """Exhaustively check constancy, injectivity, separation and the Hölder bound."""
    unit, _ = rescale_to_unit_diameter(space)
    u = np.asarray(u, dtype=np.float64)
    everyone = np.arange(unit.n, dtype=np.int64)
    semi, i, j = _kernels.pair_ratio_max(u, unit.dist, everyone, everyone, float(alpha))
    witnesses = {"holder": [int(i), int(j)]}
    constancy = True
    values = []
    for idx, C in enumerate(c.sets):
        vals = u[C]
        if not np.all(vals == vals[0]):
            constancy = False
            bad = int(C[np.flatnonzero(vals != vals[0])[0]])
            witnesses.setdefault("constancy", [idx, int(C[0]), bad])
        values.append((float(vals[0]), idx))
    injective = True
    values.sort()
    for (a, ia), (b, ib) in zip(values, values[1:]):
        if a == b:
            injective = False
            witnesses["injectivity"] = [ia, ib]
            break
    separates = bool(u[z1] != u[z2])
    if not separates:
        witnesses["separation"] = [int(z1), int(z2)]
    return HolderCertificate(
        alpha=float(alpha),
        holder_seminorm=float(semi),
        bound=10.0 * 2.0**alpha,
        constancy=constancy,
        injective_on_sets=injective,
        separates=separates,
        witnesses=witnesses,
    )
