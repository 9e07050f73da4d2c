"""Command-line interface.

Every command builds a JSON-able payload ``{"command", "params", "version",
"result"}`` and renders it as JSON, CSV or a text table.  With a cache
directory (``--cache-dir`` or ``CONFDIMLAB_CACHE``) payloads are stored
under a hash of the command, its parameters (including the contents of
input files) and the package version.

Exit codes: 0 success, 2 usage error, 3 precondition or hypothesis
failure, 4 solver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfdimError, NoConvergence, NoRoot, PreconditionError, RetryExhausted

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_SOLVER = 4

CACHE_ENV = "CONFDIMLAB_CACHE"


class UsageError(Exception):
    pass


# -- argument types -------------------------------------------------------------


def _level_range(text):
    if ".." in text:
        a, _, b = text.partition("..")
        lo, hi = int(a), int(b)
    else:
        lo = hi = int(text)
    if lo > hi or lo < 0:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}")
    return list(range(lo, hi + 1))


def _float_list(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty number list")
    return vals


def _space_arg(text):
    if text in ("grid", "carpet") or text.startswith("file:"):
        return text
    raise argparse.ArgumentTypeError("space must be grid, carpet or file:PATH")


# -- commands -------------------------------------------------------------------


def cmd_elementary(a):
    from .closed_forms import elementary_exponent

    return {"value": elementary_exponent(a.m, a.k)}


def cmd_interval(a):
    from .closed_forms import elementary_exponent_interval

    low, high = elementary_exponent_interval(a.m1, a.m2, a.k1, a.k2)
    return {"low": low, "high": high}


def cmd_building(a):
    from .closed_forms import building_confdim

    value, x, residual = building_confdim(a.m, a.k, a.l)
    return {"value": value, "x": x, "residual": residual}


def cmd_coxeter(a):
    from .closed_forms import CoxeterGraph, coxeter_global_bound, coxeter_local_bound

    g = CoxeterGraph.from_json(a.file)
    report = coxeter_local_bound(g) if a.local else coxeter_global_bound(g)
    return report.to_dict()


def cmd_polygonal(a):
    from .closed_forms import polygonal_bound

    dim = a.k if a.cube_link == -1 else a.cube_link
    out = polygonal_bound(a.n, a.k, a.triangle_free, dim).to_dict()
    if "bracket" in out:
        out["bracket_low"], out["bracket_high"] = out["bracket"]
    return out


def _graph_for(space, level):
    from .approx import generate, load_approximation

    if space.startswith("file:"):
        return load_approximation(space[5:])
    return generate(space, level)


def cmd_modulus(a):
    from .modulus import family_from_recipe, solve_modulus

    rows = []
    single = len(a.level) == 1 and len(a.p) == 1
    for k in a.level:
        g = _graph_for(a.space, k)
        fam = family_from_recipe(g, a.family)
        warm = None
        for p in a.p:
            res = solve_modulus(g, fam, p, a.tol, method=a.method, warm_start=warm)
            if res.method == "generation":
                warm = res.active_curves
            if single:
                out = res.to_dict()
                out.update(space=a.space, k=k, family=a.family)
                return out
            rows.append({
                "space": a.space, "k": k, "p": p, "family": a.family, "value": res.value,
                "iterations": res.iterations, "converged": res.converged,
            })
    return {"rows": rows}


def cmd_confdim(a):
    from .confdim import estimate_confdim

    if a.space.startswith("file:"):
        raise UsageError("confdim needs a generated space (grid or carpet)")
    est = estimate_confdim(
        a.space, a.levels, a.plo, a.phi, a.family, a.eps_rate, steps=a.steps, tol=a.tol, method=a.method
    )
    out = est.to_dict()
    out["rows"] = est.table
    return out


def cmd_holder(a):
    from .holder import build_holder
    from .metric import FiniteMetricSpace, SetCollection

    space = FiniteMetricSpace.from_json(a.space)
    sets = SetCollection.from_json(space, a.sets)
    u, cert = build_holder(space, sets, a.alpha, a.z1, a.z2, seed=a.seed)
    out = cert.to_dict()
    out["u"] = u.tolist()
    return out


CIRCLE_FUNCTIONS = {"sin": (np.sin, 1.0), "cos": (np.cos, 1.0), "sin2": (lambda t: np.sin(2.0 * t), 2.0)}


def cmd_cocycle(a):
    from .cocycle import build_shell_complex, cocycle_energy

    sc = build_shell_complex(a.m, a.k, a.depth)
    sc.check_invariants()
    u, C = CIRCLE_FUNCTIONS[a.function]
    out = cocycle_energy(u, C, sc, a.p).to_dict()
    out["function"] = a.function
    out["planar_counts"] = [sc.planar_count(n) for n in range(a.depth + 1)]
    out["thick_counts"] = [sc.thick_count(n) for n in range(a.depth + 1)]
    return out


COMMANDS = {
    "elementary": cmd_elementary,
    "interval": cmd_interval,
    "building": cmd_building,
    "coxeter": cmd_coxeter,
    "polygonal": cmd_polygonal,
    "modulus": cmd_modulus,
    "confdim": cmd_confdim,
    "holder": cmd_holder,
    "cocycle": cmd_cocycle,
}

# parameters that change the output only through files they name
FILE_PARAMS = {"coxeter": ("file",), "holder": ("space", "sets"), "modulus": ("space",)}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None,
                        help="output format (default: csv for sweeps, json otherwise)")
    common.add_argument("--out", type=Path, help="write the output here instead of stdout")
    common.add_argument("--cache-dir", type=Path, help=f"result cache directory (env {CACHE_ENV})")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="confdimlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("elementary", parents=[common], help="critical exponent 1 + ln(k-1)/ln(m-1)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("interval", parents=[common], help="range of critical exponents")
    for name in ("--m1", "--m2", "--k1", "--k2"):
        p.add_argument(name, type=int, required=True)

    p = sub.add_parser("building", parents=[common], help="solve the building dimension equation")
    for name in ("--m", "--k", "--l"):
        p.add_argument(name, type=int, required=True)

    p = sub.add_parser("coxeter", parents=[common], help="bounds from a Coxeter defining graph")
    p.add_argument("--file", type=Path, required=True)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--global", dest="local", action="store_false")
    which.add_argument("--local", dest="local", action="store_true")

    p = sub.add_parser("polygonal", parents=[common], help="bounds for polygonal complexes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--triangle-free", action="store_true")
    p.add_argument("--cube-link", type=int, nargs="?", const=-1, default=None, metavar="DIM",
                   help="links are cube 1-skeletons (dimension defaults to k)")

    p = sub.add_parser("modulus", parents=[common], help="combinatorial p-modulus")
    p.add_argument("--space", type=_space_arg, required=True)
    p.add_argument("--level", type=_level_range, default=[0], help="K or A..B")
    p.add_argument("--p", type=_float_list, required=True, help="P or P1,P2,...")
    p.add_argument("--family", default="crossing:left,right")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--method", choices=("auto", "generation", "potential"), default="auto")

    p = sub.add_parser("confdim", parents=[common], help="critical exponent of modulus decay")
    p.add_argument("--space", type=_space_arg, required=True)
    p.add_argument("--levels", type=_level_range, required=True, help="A..B")
    p.add_argument("--plo", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--family", default="f0")
    p.add_argument("--eps-rate", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--method", choices=("auto", "generation", "potential"), default="auto")

    p = sub.add_parser("holder", parents=[common], help="Hölder function constant on separated sets")
    p.add_argument("--space", type=Path, required=True)
    p.add_argument("--sets", type=Path, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--z1", type=int, required=True)
    p.add_argument("--z2", type=int, required=True)

    p = sub.add_parser("cocycle", parents=[common], help="shell energies of the polygonal cocycle")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--function", choices=sorted(CIRCLE_FUNCTIONS), default="sin")
    return parser


# -- payloads, cache, rendering ---------------------------------------------------


def _clean(obj):
    """JSON-safe copy: tuples to lists, numpy scalars to Python, NaN/inf to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _params(args):
    skip = {"command", "format", "out", "cache_dir"}
    return {k: _clean(v) for k, v in sorted(vars(args).items()) if k not in skip}


def _file_digests(args):
    out = {}
    for name in FILE_PARAMS.get(args.command, ()):
        value = str(getattr(args, name))
        path = value[5:] if value.startswith("file:") else value
        if name == "space" and args.command == "modulus" and not value.startswith("file:"):
            continue
        try:
            out[name] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        except OSError:
            out[name] = None
    return out


def cache_key(args):
    blob = json.dumps(
        {"command": args.command, "params": _params(args), "files": _file_digests(args), "version": __version__},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def _cache_dir(args):
    if args.cache_dir is not None:
        return args.cache_dir
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(payload):
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def compute_payload(args):
    result = COMMANDS[args.command](args)
    return _clean({"command": args.command, "params": _params(args), "version": __version__, "result": result})


def cached_payload(args):
    cdir = _cache_dir(args)
    if cdir is None:
        return compute_payload(args)
    path = cdir / f"{cache_key(args)}.json"
    if path.exists():
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            pass
    payload = compute_payload(args)
    _atomic_write(path, dumps(payload))
    return payload


def _rows(result):
    if isinstance(result.get("rows"), list) and result["rows"]:
        return result["rows"]
    if "energies" in result:
        return [
            {"shell": n, "energy": e, "ratio": result["ratios"][n - 1] if n else None}
            for n, e in enumerate(result["energies"])
        ]
    return [{k: v for k, v in result.items() if not isinstance(v, (dict, list))}]


# Row dicts read back from the cache have sorted keys, so column order
# must not depend on dict order: known columns first, the rest sorted.
COLUMN_ORDER = ("space", "k", "p", "family", "value", "iterations", "converged", "shell", "energy", "ratio")


def _columns(rows):
    present = set().union(*rows) if rows else set()
    known = [c for c in COLUMN_ORDER if c in present]
    return known + sorted(present - set(known))


def render_csv(payload):
    rows = _rows(payload["result"])
    cols = _columns(rows)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: ("" if row.get(c) is None else row.get(c)) for c in cols})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_text(payload):
    result = payload["result"]
    lines = [f"{payload['command']} (confdimlab {payload['version']})"]
    scalars = {k: v for k, v in result.items() if not isinstance(v, (dict, list))}
    width = max((len(k) for k in scalars), default=0)
    for k in sorted(scalars):
        lines.append(f"  {k.ljust(width)}  {_fmt(scalars[k])}")
    rows = _rows(result) if ("rows" in result or "energies" in result) else []
    if rows:
        cols = _columns(rows)
        cells = [[_fmt(r.get(c)) if r.get(c) is not None else "" for c in cols] for r in rows]
        widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
        lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        for r in cells:
            lines.append("  " + "  ".join(x.ljust(w) for x, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def render(payload, fmt):
    if fmt == "csv":
        return render_csv(payload)
    if fmt == "text":
        return render_text(payload)
    return dumps(payload)


def _default_format(args):
    if args.format:
        return args.format
    sweep = args.command == "modulus" and (len(args.level) > 1 or len(args.p) > 1)
    return "csv" if sweep else "json"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(Path(out), text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        payload = cached_payload(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"confdimlab: error: {exc}\n")
        return EXIT_USAGE
    except PreconditionError as exc:
        sys.stdout.write(dumps(_clean(exc.to_dict())))
        sys.stderr.write(f"confdimlab: {type(exc).__name__}: {exc}\n")
        return EXIT_PRECONDITION
    except (NoConvergence, NoRoot, RetryExhausted) as exc:
        err = exc.to_dict()
        err["kind"] = "non-convergence"
        sys.stdout.write(dumps(_clean(err)))
        sys.stderr.write(f"confdimlab: {type(exc).__name__}: {exc}\n")
        return EXIT_SOLVER
    except ConfdimError as exc:  # pragma: no cover - every library error is classified above
        sys.stderr.write(f"confdimlab: {exc}\n")
        return EXIT_SOLVER
    _emit(render(payload, _default_format(args)), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
