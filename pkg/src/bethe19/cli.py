"""Command-line front end: ``bethe19 check|solve|verify``."""

from __future__ import annotations

import argparse
import csv
import enum
import hashlib
import io
import json
import math
import os
import re
import sys
from dataclasses import asdict

import numpy as np

from . import __version__, aba, verification
from .solver import RootSearchConfig, RootSet, multi_start
from .weights import ModelParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMPLEX_FIELDS = ("eta", "xi_minus", "xi_plus", "beta_minus", "beta_plus")
GRID_FIELDS = ("re_min", "re_max", "im_min", "im_max", "step")
CONFIG_FIELDS = ("model", *COMPLEX_FIELDS, "epsilon", "length", "n", "newton_tol", "eigen_tol",
                 "seed", *GRID_FIELDS, "format", "output")
STAGES = (*verification.ALGEBRA_STAGES, *verification.K_STAGES, "global_rtt", "global_reflection",
          "vacuum", "commuting_family", "full")

_COMPLEX_RE = re.compile(r"^[+-]?[0-9.eE+-]*[ij]?$")


class UsageError(Exception):
    pass


def parse_complex(text) -> complex:
    """Parse literals such as ``0.43+0.17i``, ``-0.2j`` or ``1``."""
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, dict) and set(text) == {"re", "im"}:
        return complex(float(text["re"]), float(text["im"]))
    s = str(text).strip()
    if not s or " " in s or not _COMPLEX_RE.match(s):
        raise UsageError(f"malformed complex literal {text!r}")
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"malformed complex literal {text!r}") from exc


# serialization ------------------------------------------------------------------------

def to_jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _num(x.real), "im": _num(x.imag)}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _num(x)
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in x]
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _num(v) -> float | None:
    v = float(v)
    return v if math.isfinite(v) else None


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2) + "\n"


def fingerprint(params: ModelParams) -> str:
    blob = json.dumps(to_jsonable(params.as_dict()), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def report_doc(rep: verification.CheckReport, timings: bool = False) -> dict:
    out = {"stage": rep.name, "kind": rep.kind, "pass": rep.passed, "skipped": rep.skipped,
           "max_residual": rep.max_residual, "mean_residual": rep.mean_residual,
           "tolerance": rep.tolerance, "samples": rep.samples, "residuals": rep.residuals,
           "details": rep.details}
    if timings:
        out["wall_time"] = rep.wall_time
    return out


def rootset_doc(rs: RootSet) -> dict:
    d = asdict(rs)
    d["rapidities"] = list(rs.rapidities)
    return d


def rootset_from_doc(d: dict) -> RootSet:
    return RootSet(
        rapidities=tuple(parse_complex(z) for z in d["rapidities"]),
        residuals=tuple(float(r) for r in d["residuals"]),
        converged=bool(d["converged"]),
        iterations=int(d["iterations"]),
        jacobian_cond=float("nan") if d["jacobian_cond"] is None else float(d["jacobian_cond"]),
        flags=tuple(d.get("flags", ())),
    )


# configuration ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--model", choices=("zf", "ik"))
    for f in COMPLEX_FIELDS:
        p.add_argument("--" + f.replace("_", "-"), dest=f, help="complex literal, e.g. 0.43+0.17i")
    p.add_argument("--epsilon", type=int, choices=(1, -1))
    p.add_argument("--length", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--newton-tol", dest="newton_tol", type=float)
    p.add_argument("--eigen-tol", dest="eigen_tol", type=float)
    for f in GRID_FIELDS:
        p.add_argument("--" + f.replace("_", "-"), dest=f, type=float)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--output", "-o", help="output path (default: stdout)")
    p.add_argument("--timings", action="store_true", help="include wall times (breaks byte-identity)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bethe19", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run the verification suite or one stage")
    _common(c)
    c.add_argument("--stage", choices=STAGES, default="full")
    s = sub.add_parser("solve", help="solve the Bethe equations")
    _common(s)
    s.add_argument("--n", type=int)
    s.add_argument("--allow-conjectural", action="store_true")
    s.add_argument("--lambda-points", type=int, default=5)
    v = sub.add_parser("verify", help="check eigenstates built from a roots file")
    _common(v)
    v.add_argument("roots_file")
    return ap


def merge_config(args: argparse.Namespace, base: dict | None = None) -> dict:
    """Defaults < base (roots file) < --config JSON < explicit flags; seed falls back to BETHE19_SEED."""
    cfg = dict(base or {})
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(doc) - set(CONFIG_FIELDS)
        if unknown:
            raise UsageError(f"unknown config fields: {sorted(unknown)}")
        cfg.update(doc)
    for f in CONFIG_FIELDS:
        val = getattr(args, f, None)
        if val is not None:
            cfg[f] = val
    if cfg.get("seed") is None:
        env = os.environ.get("BETHE19_SEED")
        try:
            cfg["seed"] = int(env) if env is not None else 0
        except ValueError as exc:
            raise UsageError(f"BETHE19_SEED must be an integer, got {env!r}") from exc
    return cfg


def params_from_config(cfg: dict) -> ModelParams:
    kw = {f: parse_complex(cfg[f]) for f in COMPLEX_FIELDS if cfg.get(f) is not None}
    for f in ("epsilon", "length"):
        if cfg.get(f) is not None:
            kw[f] = int(cfg[f])
    if cfg.get("n") is not None and int(cfg["n"]) < 0:
        raise UsageError("n must be non-negative")
    try:
        return ModelParams(kind=cfg.get("model", "zf"), **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def search_from_config(cfg: dict) -> RootSearchConfig:
    kw = {f: float(cfg[f]) for f in GRID_FIELDS if cfg.get(f) is not None}
    if cfg.get("newton_tol") is not None:
        kw["newton_tol"] = float(cfg["newton_tol"])
    try:
        return RootSearchConfig(seed=int(cfg["seed"]), **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def config_echo(cfg: dict) -> dict:
    out = {k: cfg[k] for k in CONFIG_FIELDS if k in cfg and k not in ("output", "format")}
    for f in COMPLEX_FIELDS:
        if f in out:
            out[f] = parse_complex(out[f])
    return out


# output -------------------------------------------------------------------------------

def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(doc: dict, cfg: dict, csv_rows: tuple[list, list[str]]):
    text = _csv(*csv_rows) if cfg.get("format") == "csv" else dumps(doc)
    _write(text, cfg.get("output"))


def _stage_rows(reports):
    rows = [[r.name, r.passed, r.skipped, r.max_residual, r.mean_residual, r.tolerance] for r in reports]
    return rows, ["stage", "pass", "skipped", "max_residual", "mean_residual", "tolerance"]


# commands -----------------------------------------------------------------------------

def run_stage(params: ModelParams, stage: str, seed: int) -> list[verification.CheckReport]:
    if stage == "full":
        return verification.full_suite(params, seed=seed)
    if stage in verification.ALGEBRA_STAGES + verification.K_STAGES:
        return [verification.check_algebra(params, stage, seed=seed)]
    if stage in ("global_rtt", "global_reflection"):
        return [verification.check_global(params, stage, seed=seed)]
    pts = verification.sample_points(params, 10, seed)
    if stage == "vacuum":
        return [verification.check_vacuum(params, pts)]
    return [verification.check_commuting_family(params, pts)]


def cmd_check(args) -> int:
    cfg = merge_config(args)
    params = params_from_config(cfg)
    reports = run_stage(params, args.stage, int(cfg["seed"]))
    doc = {"tool_version": __version__, "config_echo": config_echo(cfg), "fingerprint": fingerprint(params),
           "stages": [report_doc(r, args.timings) for r in reports], "roots": []}
    _emit(doc, cfg, _stage_rows(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_solve(args) -> int:
    cfg = merge_config(args)
    params = params_from_config(cfg)
    search = search_from_config(cfg)
    n = int(cfg.get("n") or 1)
    if n > aba.MAX_N and not args.allow_conjectural:
        raise UsageError(f"n={n} is conjectural beyond n={aba.MAX_N}; pass --allow-conjectural to proceed")
    sets = multi_start(params, n, search, allow_conjectural=args.allow_conjectural)
    roots = []
    for rs in sets:
        pts = verification.sample_points(params, args.lambda_points, int(cfg["seed"]), avoid=rs.rapidities)
        d = rootset_doc(rs)
        d["lambda_samples"] = [{"u": u, "lambda": aba.lambda_eigenvalue(params, u, rs.rapidities)} for u in pts]
        roots.append(d)
    doc = {"tool_version": __version__, "config_echo": config_echo(cfg), "fingerprint": fingerprint(params),
           "model": params.kind.value, "n": n, "stages": [], "roots": roots}
    rows = [[i, k, z.real, z.imag, rs.residuals[k], rs.converged]
            for i, rs in enumerate(sets) for k, z in enumerate(rs.rapidities)]
    _emit(doc, cfg, (rows, ["root_set", "index", "re", "im", "residual", "converged"]))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.roots_file) as fh:
            roots_doc = json.load(fh)
        base = dict(roots_doc.get("config_echo", {}))
        file_model = roots_doc["model"]
        sets = [rootset_from_doc(d) for d in roots_doc["roots"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"unreadable roots file {args.roots_file}: {exc}") from exc
    for k in ("format", "output"):
        base.pop(k, None)
    cfg = merge_config(args, base)
    if cfg.get("model", "zf") != file_model:
        raise UsageError(f"model {cfg.get('model')!r} does not match roots file model {file_model!r}")
    params = params_from_config(cfg)
    tol = float(cfg.get("eigen_tol") or verification.EIGEN_TOL)
    drift = fingerprint(params) != roots_doc.get("fingerprint")
    reports, stale = [], []
    for i, rs in enumerate(sets):
        res = np.abs(aba.bethe_residuals(params, rs.rapidities)) if rs.n else np.zeros(0)
        if res.size and res.max() >= 1e-10:
            stale.append({"root_set": i, "max_residual": float(res.max())})
            continue
        pts = verification.sample_points(params, 5, int(cfg["seed"]) + 3, avoid=rs.rapidities)
        rep = verification.check_eigenstate(params, rs, pts, tol=tol)
        rep.name = f"eigenstate_{i}"
        reports.append(rep)
        if rs.n == 1:
            reports.append(verification.fit_g(params, rs, pts))
        elif rs.n == 2 and params.length >= 2:
            reports.append(verification.fit_g_coefficients_n2(params, rs, pts))
    doc = {"tool_version": __version__, "config_echo": config_echo(cfg), "fingerprint": fingerprint(params),
           "parameter_drift": drift, "stale_roots": stale,
           "stages": [report_doc(r, args.timings) for r in reports],
           "roots": [rootset_doc(rs) for rs in sets]}
    rows = []
    for r in reports:
        if "per_u" in r.details:
            for u, res, rq in zip(r.samples, r.details["per_u"], r.details["rayleigh_delta"]):
                rows.append([r.name, u.real, u.imag, res, rq])
    _emit(doc, cfg, (rows, ["stage", "u_re", "u_im", "residual", "rayleigh_delta"]))
    if stale:
        print(f"bethe19: {len(stale)} stale root set(s) no longer satisfy the Bethe equations", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bethe19: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
