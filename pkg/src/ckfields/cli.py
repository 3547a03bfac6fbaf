"""Command-line front end.

Exit codes: 0 constant (or battery passed), 1 non-constant (or battery
failed), 2 inconclusive, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .catalog import (
    battery_entries,
    build_pair,
    catalog_listing,
    product_cases,
)
from .decomposition import HomogeneousPair
from .errors import CKError, PreconditionError
from .lie_core import MatrixLieAlgebra
from .orbit import is_elliptic, open_orbit_check, parabolic_profile
from .verifier import (
    CONSTANT,
    INCONCLUSIVE,
    NON_CONSTANT,
    VerifyConfig,
    carryover_check,
    equivalence_check,
    product_conditions,
    single_factor_constancy,
    verify_constant_length,
)

SCHEMA_VERSION = 1
EXIT = {CONSTANT: 0, NON_CONSTANT: 1, INCONCLUSIVE: 2}
EXIT_INPUT = 3


class InputError(Exception):
    pass


def jsonable(obj):
    """Recursively convert numpy values; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from exc


def _add_run_options(p):
    p.add_argument("--xi", help="JSON file with {\"coords\": [...]} or {\"matrix\": [[...]]}")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--radius", type=_float_list, default=(0.5, 1.0, 2.0), help="comma-separated radii")
    p.add_argument("--word-length", type=int, default=3)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=_float_list, default=None,
                   help="constant threshold, optionally followed by the non-constant threshold")
    p.add_argument("--precision", choices=("auto", "double", "extended"), default="auto")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--carryover", action="store_true", help="also compare with the compact dual")


def build_parser():
    parser = argparse.ArgumentParser(prog="ckfields", description="Constant-length Killing field workbench")
    parser.add_argument("--version", action="version", version=f"ckfields {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list catalog entries")
    p.add_argument("--format", choices=("text", "json"), default="text")

    for name, helptext in (("verify", "verify a catalog entry"),
                           ("falsify", "verify with a search-heavy configuration (10x iterations)")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("entry")
        p.add_argument("--params", type=_int_list, default=None)
        _add_run_options(p)

    p = sub.add_parser("check-pair", help="verify a user-supplied pair from JSON basis files")
    p.add_argument("g_file")
    p.add_argument("h_file")
    p.add_argument("xi_file")
    _add_run_options(p)

    p = sub.add_parser("battery", help="run the classification and product batteries")
    p.add_argument("scope", choices=("simple", "products", "all"), nargs="?", default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def config_from_args(args, heavy=False):
    if args.samples < 1:
        raise InputError("--samples must be positive")
    if args.word_length < 1:
        raise InputError("--word-length must be positive")
    if not args.radius or any(r <= 0 or not math.isfinite(r) for r in args.radius):
        raise InputError("--radius values must be positive")
    kw = {"n_samples": args.samples, "radii": tuple(args.radius), "word_length": args.word_length,
          "seed": args.seed, "precision": args.precision}
    if args.tol:
        if len(args.tol) > 2 or any(t <= 0 for t in args.tol):
            raise InputError("--tol takes one or two positive numbers")
        kw["const_tol"] = args.tol[0]
        kw["nonconst_tol"] = args.tol[1] if len(args.tol) == 2 else max(100 * args.tol[0], 1e-5)
    try:
        cfg = VerifyConfig(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if heavy:
        cfg = replace(cfg, search_iterations=10 * cfg.search_iterations, step_shrink=cfg.step_shrink ** 0.1)
    return cfg


# ---------------------------------------------------------------------------
# JSON input files


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _matrices(entries, n, what):
    out = []
    for k, m in enumerate(entries):
        a = np.asarray(m, dtype=float)
        if a.size != n * n:
            raise InputError(f"{what} basis entry {k} has {a.size} numbers, expected {n * n}")
        out.append(a.reshape(n, n))
    return np.array(out).reshape(-1, n, n)


def load_algebra(path):
    data = _load_json(path)
    if not isinstance(data, dict) or "basis" not in data or "n" not in data:
        raise InputError(f"{path}: expected an object with 'n' and 'basis'")
    n = int(data["n"])
    basis = _matrices(data["basis"], n, "g")
    return MatrixLieAlgebra(data.get("name", "g"), basis)


def load_subalgebra(path, g):
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "coords" in data:
        H = np.asarray(data["coords"], dtype=float).reshape(-1, g.dim).T
    else:
        mats = _matrices(data.get("basis", []), g.n, "h")
        H = g.coords_of(mats).T if len(mats) else np.zeros((g.dim, 0))
    return H, data.get("name", "h")


def load_xi(path, g):
    data = _load_json(path)
    if "coords" in data:
        x = np.asarray(data["coords"], dtype=float)
        if x.shape != (g.dim,):
            raise InputError(f"xi has {x.size} coordinates, algebra has dimension {g.dim}")
        return x
    if "matrix" in data:
        return g.coords_of(np.asarray(data["matrix"], dtype=float).reshape(g.n, g.n))
    raise InputError(f"{path}: expected 'coords' or 'matrix'")


# ---------------------------------------------------------------------------
# pipeline


def run_pipeline(pair, x, cfg, carryover=False):
    if not np.any(x):
        raise InputError("xi must be nonzero")
    ell = is_elliptic(pair, x)
    defect = verify_constant_length(pair, x, cfg)
    out = {
        "ellipticity": {"elliptic": ell.elliptic, "semisimple": ell.semisimple,
                        "pure_imaginary": ell.pure_imaginary,
                        "eigenvalues": [[z.real, z.imag] for z in ell.eigenvalues]},
        "defect": defect.to_dict(),
    }
    if not ell.elliptic:
        out["warning"] = "xi is not elliptic; the run is exploratory"
    if ell.elliptic:
        out["open_orbit"] = open_orbit_check(pair, x).to_dict()
        out["parabolic_profile"] = list(parabolic_profile(pair, x).as_tuple())
    else:
        out["open_orbit"] = None
        out["parabolic_profile"] = None
    if carryover:
        try:
            out["carryover"] = carryover_check(pair, x, cfg).to_dict()
        except CKError as exc:
            out["carryover"] = {"error": f"{type(exc).__name__}: {exc}"}
    return defect.verdict, out


def envelope(entry_meta, x, body, expected=None):
    env = {"schema_version": SCHEMA_VERSION, "tool": "ckfields", "version": __version__,
           "entry": entry_meta, "xi": x}
    env.update(body)
    if expected is not None:
        verdict = body["defect"]["verdict"]
        env["expected_verdict"] = expected
        env["match"] = verdict == (CONSTANT if expected == "group-manifold" else expected)
    return jsonable(env)


def pair_meta(pair, **extra):
    d = pair.summary()
    d.update(extra)
    return d


def _format_text(env):
    e = env["entry"]
    d = env["defect"]
    lines = [
        f"pair        {e.get('id', e['name'])} {e.get('params', '')}".rstrip(),
        f"dims        g={e['dim_g']} h={e['dim_h']} m={e['dim_m']}  signature(b|m)={tuple(e['signature_m'])}",
        f"elliptic    {env['ellipticity']['elliptic']}",
        f"verdict     {d['verdict']}  defect={_num(d['defect'])}  tolerance={d['tolerance_used']:g}  seed={d['seed']}",
        f"f range     [{_num(d['min_f'])}, {_num(d['max_f'])}]  baseline={_num(d['baseline'])}",
        f"search      {d['n_samples']} samples, {d['search_iterations']} search iterations",
    ]
    if env.get("open_orbit"):
        o = env["open_orbit"]
        lines.append(f"open orbit  {o['open']}  (dim l={o['dim_l']}, dim l^h={o['dim_l_cap_h']})")
    if env.get("parabolic_profile"):
        lines.append(f"profile     (Im<0, Im=0, Im>0) = {tuple(env['parabolic_profile'])}")
    if "carryover" in env:
        c = env["carryover"]
        if "error" in c:
            lines.append(f"carryover   error: {c['error']}")
        else:
            lines.append(f"carryover   {c['noncompact']['verdict']} vs dual {c['compact']['verdict']}"
                         f"  agree={c['agree']} flagged={c['flagged']}")
            if c["note"]:
                lines.append(f"            {c['note']}")
    if "expected_verdict" in env:
        lines.append(f"expected    {env['expected_verdict']}  match={env['match']}")
    if "warning" in env:
        lines.append(f"warning     {env['warning']}")
    return "\n".join(lines)


def _num(v):
    return "nan" if v is None else f"{v:.6g}"


def _emit(env, fmt, out):
    if fmt == "json":
        out.write(json.dumps(env, indent=2) + "\n")
    else:
        out.write(_format_text(env) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_catalog(args, out):
    listing = catalog_listing()
    if args.format == "json":
        out.write(json.dumps({"schema_version": SCHEMA_VERSION, "entries": listing}, indent=2) + "\n")
    else:
        for e in listing:
            params = ",".join(e["params"]) or "-"
            out.write(f"{e['id']:30s} params={params:6s} default={e['default_params']} "
                      f"expected={e['expected_verdict']:14s} {e['citation']}\n")
    return 0


def cmd_verify(args, out, heavy=False):
    cfg = config_from_args(args, heavy)
    entry = build_pair(args.entry, args.params)
    pair = entry.pair
    x = load_xi(args.xi, pair.g) if args.xi else entry.canonical_xi.coords
    verdict, body = run_pipeline(pair, x, cfg, args.carryover)
    meta = pair_meta(pair, id=entry.id, params=list(entry.params), citation=entry.citation)
    if entry.notes:
        meta["notes"] = entry.notes
    expected = entry.expected_verdict if not args.xi else None
    env = envelope(meta, x, body, expected)
    _emit(env, args.format, out)
    return EXIT[verdict]


def cmd_check_pair(args, out):
    cfg = config_from_args(args)
    g = load_algebra(args.g_file)
    H, hname = load_subalgebra(args.h_file, g)
    pair = HomogeneousPair.build(g, H, name=f"{g.name}/{hname}")
    x = load_xi(args.xi_file, g)
    verdict, body = run_pipeline(pair, x, cfg, False)
    env = envelope(pair_meta(pair), x, body)
    _emit(env, args.format, out)
    return EXIT[verdict]


def battery_simple(cfg):
    rows = []
    for eid, params in battery_entries():
        entry = build_pair(eid, params)
        row = {"id": eid, "params": list(params), "expected": entry.expected_verdict}
        if entry.pair.is_group_manifold:
            rep = verify_constant_length(entry.pair, entry.canonical_xi, cfg)
            row.update(verdict=rep.verdict, defect=rep.defect, agree=None)
        else:
            eq = equivalence_check(entry.pair, entry.canonical_xi, cfg)
            row.update(verdict=eq.verdict, defect=eq.defect.defect, l_orbit_open=eq.l_orbit_open,
                       h_orbit_open=eq.h_orbit_open, agree=eq.agree)
        expected = CONSTANT if entry.expected_verdict == "group-manifold" else entry.expected_verdict
        row["match"] = row["verdict"] == expected
        row["pass"] = row["match"] and row["agree"] is not False
        rows.append(row)
    return rows


def battery_products(cfg):
    rows = []
    for case in product_cases():
        row = {"id": case.name, "expected": case.expected}
        if case.single_factor:
            try:
                product_conditions(case.product, case.xi_parts, cfg)
                row["precondition_rejected"] = False
            except PreconditionError:
                row["precondition_rejected"] = True
            rep = single_factor_constancy(case.product, case.xi_parts, cfg)
            row.update(verdict=rep.verdict, defect=rep.defect)
            row["pass"] = row["precondition_rejected"] and rep.verdict == CONSTANT
        else:
            pc = product_conditions(case.product, case.xi_parts, cfg)
            got = {k: getattr(pc, k) for k in ("cond1", "cond2", "cond3", "cond4")}
            row.update(got, implications_ok=pc.implications_ok)
            row["pass"] = bool(pc.implications_ok) and all(got[k] == v for k, v in case.expected.items())
        rows.append(row)
    return rows


def cmd_battery(args, out):
    if args.samples < 1:
        raise InputError("--samples must be positive")
    cfg = VerifyConfig(seed=args.seed, n_samples=args.samples)
    result = {"schema_version": SCHEMA_VERSION, "seed": args.seed, "tolerance_used": cfg.const_tol}
    if args.scope in ("simple", "all"):
        result["simple"] = battery_simple(cfg)
    if args.scope in ("products", "all"):
        result["products"] = battery_products(cfg)
    rows = result.get("simple", []) + result.get("products", [])
    result["passed"] = all(r["pass"] for r in rows)
    if args.format == "json":
        out.write(json.dumps(jsonable(result), indent=2) + "\n")
    else:
        for r in result.get("simple", []):
            out.write(f"{'PASS' if r['pass'] else 'FAIL'}  {r['id']:28s} {str(tuple(r['params'])):8s} "
                      f"verdict={r['verdict']:13s} expected={r['expected']:14s} defect={_num(r['defect'])}"
                      f" criteria_agree={r['agree']}\n")
        for r in result.get("products", []):
            if "cond1" in r:
                detail = " ".join(f"{k}={r[k]}" for k in ("cond1", "cond2", "cond3", "cond4"))
                detail += f" implications_ok={r['implications_ok']}"
            else:
                detail = f"rejected_by_hypotheses={r['precondition_rejected']} verdict={r['verdict']}"
            out.write(f"{'PASS' if r['pass'] else 'FAIL'}  {r['id']:28s} {detail}\n")
        out.write(f"battery {'passed' if result['passed'] else 'FAILED'} (seed {args.seed})\n")
    return 0 if result["passed"] else 1


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        if args.command == "catalog":
            return cmd_catalog(args, out)
        if args.command == "verify":
            return cmd_verify(args, out)
        if args.command == "falsify":
            return cmd_verify(args, out, heavy=True)
        if args.command == "check-pair":
            return cmd_check_pair(args, out)
        if args.command == "battery":
            return cmd_battery(args, out)
    except (InputError, CKError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    return EXIT_INPUT  # pragma: no cover

