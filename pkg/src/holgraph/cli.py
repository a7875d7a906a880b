"""Command-line front end: run experiment configs and write JSON/CSV reports.

Usage::

    holgraph list [--json]
    holgraph run CONFIG [--seed N] [--out DIR] [--format json|csv|both] [--jobs N]

Exit status is 2 for configuration or parameter-range errors, 1 when any
inequality is falsified (a report with status ``fail``) and 0 otherwise;
an unmet hypothesis is recorded in the report and still exits 0.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import certifier as C
from . import constants as K
from . import funcmodel as fm
from . import transcendence as T
from .geometry import GeometryError
from .reports import CertReport, jsonable, make_report

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """The config could not be parsed or names an invalid parameter."""


@dataclass(frozen=True)
class Experiment:
    name: str
    runner: Callable[[dict, dict, int], dict]
    functions: tuple[str, ...]
    required: tuple[str, ...]
    optional: tuple[str, ...]
    tags: tuple[str, ...]
    summary: str
    uses_t: bool = True
    defaults: dict = field(default_factory=dict)

    def describe(self) -> dict:
        return {"name": self.name, "functions": list(self.functions),
                "required": list(self.required), "optional": list(self.optional),
                "paper_tags": list(self.tags), "summary": self.summary}


# ------------------------------------------------------------------ runners

def _pq(p: dict):
    return tuple(p["pq"]) if p.get("pq") is not None else None


def _run_te1(fn: dict, p: dict, seed: int) -> dict:
    f, g = fn["f"], fn["g"]
    reps = list(C.certify_te1(f, g, p["r"], p["t"], tol=p.get("tol", 1e-9),
                              budgets=p.get("budgets"), pq=_pq(p)))
    homogeneous = isinstance(f, fm.Poly) and f.is_homogeneous and f.degree >= 1
    if homogeneous and p["t"] == 9:
        reps += C.certify_example_ex1(f, g, p["r"], p.get("k"), p.get("l"),
                                      tol=p.get("tol", 1e-9), budgets=p.get("budgets"))
    if p.get("sharpness") and homogeneous:
        reps.append(C.sharpness_witness(f.degree, f.nvars, p["r"], f=f))
    return {"reports": reps}


def _run_corollaries(fn: dict, p: dict, seed: int) -> dict:
    extra = {k: p[k] for k in ("budgets", "pq", "s_values", "remez_center", "remez_s")
             if p.get(k) is not None}
    if "omega_side" in p:
        n = fn["f"].nvars
        s = p.get("remez_s", p["r"])
        extra["omega"] = C.grid_cells_in_ball(n, s, p["omega_side"], center=p.get("remez_center"))
    return {"reports": C.certify_corollaries(fn["f"], fn["g"], p["r"], p["t"], extra,
                                             tol=p.get("tol", 1e-9))}


def _run_te12(fn: dict, p: dict, seed: int) -> dict:
    reps = C.certify_te12(fn["f_list"], fn["g"], p["r"], p["t"], budgets=p.get("budgets"),
                          tol=p.get("tol", 1e-9), other_w_points=p.get("other_w_points", 4))
    return {"reports": list(reps)}


def _run_te13(fn: dict, p: dict, seed: int) -> dict:
    kw = {k: p[k] for k in ("tol", "budgets", "r_grid", "c1", "c3") if k in p}
    if p.get("pq") is not None:
        kw["pq"] = _pq(p)
    reps = C.certify_te13_instance(fn["f"], fn["g"], p["n_j"], p["r_j"], p["eps_j"],
                                   p["rho"], p["C_rho"], **kw)
    return {"reports": list(reps)}


def _run_te14(fn: dict, p: dict, seed: int) -> dict:
    rho = p["rho"] if p["rho"] is not None else math.inf
    return {"probes": [C.probe_te14_condition(fn["f"], rho, p["t_grid"])]}


def _run_te2(fn: dict, p: dict, seed: int) -> dict:
    F = fn["F"]
    try:
        reps, w = C.certify_te2_instance(F, p["t"], p.get("M"), complex(p.get("y", 0.0)),
                                         p.get("s"), p.get("rouche_samples", 20), seed)
    except GeometryError as exc:
        rep = make_report("te2_separation", "te2", math.nan, math.nan, 0.0, status="fail",
                          params={"F": fm.to_dict(F), "t": p["t"]},
                          notes=[str(exc)], witnesses=[jsonable(exc.payload)])
        return {"reports": [rep]}
    return {"reports": reps, "data": {"witness": w.to_dict()}}


def _run_cartan(fn: dict, p: dict, seed: int) -> dict:
    f = fn["f"]
    reps = C.certify_cartan(f, p["r"], p["t"], p.get("H"), p.get("samples", 4096))
    if "R" in p:
        reps.append(C.certify_cartan_cover(f, p["R"], p["alpha"], p["beta"],
                                           p.get("H_general", p.get("H", 0.5)),
                                           p.get("d_exp", 1.0), p.get("samples", 4096)))
    return {"reports": reps}


def _run_markov(fn: dict, p: dict, seed: int) -> dict:
    rep = C.certify_markov(fn["h"], p["R"], p["t"], p.get("v"), tol=p.get("tol", 1e-9),
                           line_budget=p.get("line_budget", 8))
    return {"reports": [rep]}


def _run_transcendence(fn: dict, p: dict, seed: int) -> dict:
    f = fn["f"]
    ks = list(p["k_range"]) if "k_range" in p else [p["k"]]
    data = T.tau_bounds(f, ks, p.get("n"), tol=p.get("trend_tol", 0.05),
                        budget=p.get("budget", 8), seed=seed)
    if not data.per_k:
        rep = make_report("transcendence", "e136", math.nan, math.nan, 0.0,
                          status="diagnostic", notes=list(data.notes))
        return {"reports": [rep], "data": data.to_dict()}
    reps = []
    for row in data.per_k:
        k = row["k"]
        dim = make_report(f"flat_kernel_k{k}", "e754", float(row["d_pk_n"]),
                          float(row["d_k_np1"]), 0.0, scale="count", params={"k": k})
        if not row["d_pk_n"] < row["d_k_np1"]:
            dim.passed, dim.status = False, "fail"
        flat = make_report(f"flatness_k{k}", "e754", row["flatness_residual"],
                           T.FLATNESS_TOL, 0.0, scale="value", params={"k": k})
        # mk_lower carries ln r = 1 at r = e, so it doubles as p_k + 1
        mk = make_report(f"mk_lower_k{k}", "e136", row["mk_lower"], row["mk"], 1e-9,
                         params={"k": k, "p_k": row["p_k"], "mk_lower": row["mk_lower"],
                                 "mk_flat": row["mk_flat"], "mk_sampled": row["mk_sampled"]},
                         sub_reports=[dim, flat])
        if not (dim.passed and flat.passed):
            mk.passed, mk.status = False, "fail"
        reps.append(mk)
    worst = min(v for _, v in data.tau_lower_trend)
    reps.append(make_report("trend", "c14", data.trend_target - p.get("trend_tol", 0.05),
                            worst, 0.0, scale="value",
                            params={"trend": data.tau_lower_trend, "target": data.trend_target}))
    return {"reports": reps, "data": data.to_dict()}


EXPERIMENTS: dict[str, Experiment] = {e.name: e for e in [
    Experiment("te1", _run_te1, ("f", "g"), ("r", "t"),
               ("tol", "budgets", "pq", "k", "l", "sharpness"),
               ("e15", "e18", "e15'", "e18'", "eq21", "eq22", "q24"),
               "growth bounds for g(z, f(z)); adds the explicit t = 9 constant when f is "
               "a homogeneous polynomial"),
    Experiment("corollaries", _run_corollaries, ("f", "g"), ("r", "t"),
               ("tol", "budgets", "pq", "s_values", "remez_center", "remez_s", "omega_side"),
               ("e110", "e111", "e112", "e113"),
               "Bernstein, Markov, Remez and Jensen consequences"),
    Experiment("te12", _run_te12, ("f_list", "g"), ("r", "t"),
               ("tol", "budgets", "other_w_points"), ("e118",),
               "chain bound for g(z, f_1(z), ..., f_k(z))"),
    Experiment("te13_instance", _run_te13, ("f", "g"),
               ("n_j", "r_j", "eps_j", "rho", "C_rho"),
               ("tol", "budgets", "pq", "r_grid", "c1", "c3"),
               ("te13a", "te13b", "te13c", "te13d", "te13e", "te13f"),
               "one finite instance of the growth sequence statements", uses_t=False),
    Experiment("te14_probe", _run_te14, ("f",), ("rho", "t_grid"), (), ("te14",),
               "sampled growth-regularity conditions (diagnostic)", uses_t=False),
    Experiment("te2_geometry", _run_te2, ("F",), ("t",),
               ("M", "y", "s", "rouche_samples"), ("te2", "le1", "e213", "e214"),
               "separated intersections of a line with the graph of F"),
    Experiment("cartan", _run_cartan, ("f",), ("r", "t"),
               ("H", "samples", "R", "alpha", "beta", "H_general", "d_exp"),
               ("ca4", "cart2", "ca6", "cart3", "ca1", "cart1"),
               "Cartan lower bounds off exceptional disks and a good circle"),
    Experiment("markov", _run_markov, ("h",), ("R", "t"), ("v", "tol", "line_budget"),
               ("e32", "kap1", "iter"), "Markov inequality with kappa(d; t)"),
    Experiment("transcendence", _run_transcendence, ("f",), (),
               ("k", "k_range", "n", "trend_tol", "budget"), ("e754", "e136", "c14"),
               "flat polynomials and the m_k(e, f) lower bound", uses_t=False),
]}


# ------------------------------------------------------------ config parsing

def _load_function(source: Any, base: Path) -> fm.Expr:
    if isinstance(source, str):
        path = (base / source) if not os.path.isabs(source) else Path(source)
        if not path.is_file():
            raise ConfigError(f"function file not found: {source}")
        try:
            return fm.load(path)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot parse function file {source}: {exc}") from exc
    if isinstance(source, dict):
        try:
            return fm.from_dict(source)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot parse inline function: {exc}") from exc
    raise ConfigError(f"function must be a file path or an object, got {type(source).__name__}")


def _check_ranges(exp: Experiment, p: dict) -> None:
    if exp.uses_t and "t" in p:
        K._check_t(p["t"])
    for key in ("r", "R", "r_j"):
        if key in p and not (isinstance(p[key], (int, float)) and p[key] > 0):
            raise K.ParameterRangeError(f"{key} must be a positive number, got {p[key]!r}")
    if exp.name == "transcendence":
        ks = p.get("k_range", [p["k"]] if "k" in p else None)
        if not ks:
            raise ConfigError("transcendence needs k or k_range")
        if any(not isinstance(k, int) or k < 1 for k in ks):
            raise K.ParameterRangeError("k values must be positive integers")
    if exp.name == "te13_instance":
        if not 0 < p["eps_j"] < 1:
            raise K.ParameterRangeError("eps_j must lie in (0, 1)")


def parse_entry(entry: dict, base: Path) -> tuple[Experiment, dict, dict]:
    """Validate one experiment entry; return ``(experiment, functions, params)``."""
    if not isinstance(entry, dict):
        raise ConfigError("each experiment entry must be an object")
    name = entry.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    exp = EXPERIMENTS[name]
    params = dict(entry.get("params", {}))
    for k, v in entry.items():
        if k not in ("experiment", "label", "params") and k not in exp.functions:
            params[k] = v
    allowed = set(exp.required) | set(exp.optional)
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"{name}: unknown parameters {sorted(unknown)}")
    missing = [k for k in exp.required if k not in params]
    missing += [k for k in exp.functions if k not in entry]
    if missing:
        raise ConfigError(f"{name}: missing {missing}")
    funcs = {}
    for key in exp.functions:
        source = entry[key]
        if key == "f_list":
            if not isinstance(source, list) or not source:
                raise ConfigError("f_list must be a non-empty list")
            funcs[key] = [_load_function(s, base) for s in source]
        else:
            funcs[key] = _load_function(source, base)
    _check_ranges(exp, params)
    return exp, funcs, params


def load_config(path: str | Path) -> tuple[list[dict], int | None, Path]:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    entries = raw["experiments"] if "experiments" in raw else [raw]
    if not isinstance(entries, list) or not entries:
        raise ConfigError("experiments must be a non-empty list")
    seed = raw.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return entries, seed, path.parent


# ---------------------------------------------------------------- execution

def _execute(job: tuple[dict, str, int, int]) -> dict:
    entry, base, seed, index = job
    exp, funcs, params = parse_entry(entry, Path(base))
    out = exp.runner(funcs, params, seed)
    return {
        "index": index,
        "experiment": exp.name,
        "label": entry.get("label", f"{exp.name}-{index}"),
        "params": jsonable(params),
        "reports": [r.to_dict() for r in out.get("reports", [])],
        "probes": [r.to_dict() for r in out.get("probes", [])],
        "data": jsonable(out.get("data", {})),
    }


def _statuses(results: list[dict]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for res in results:
        for rep in res["reports"] + res["probes"]:
            counts[rep["status"]] = counts.get(rep["status"], 0) + 1
    return dict(sorted(counts.items()))


def run_config(path: str | Path, seed: int | None = None, jobs: int = 1) -> dict:
    """Run every experiment in a config and return the assembled report.

    Parsing happens up front, so a bad entry fails before any work starts.
    Experiments run in worker processes when ``jobs > 1``; the report keeps
    config order either way.
    """
    entries, cfg_seed, base = load_config(path)
    seed = seed if seed is not None else (cfg_seed if cfg_seed is not None else 0)
    for e in entries:
        parse_entry(e, base)
    work = [(e, str(base), seed, i) for i, e in enumerate(entries)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            results = list(pool.map(_execute, work))
    else:
        results = [_execute(w) for w in work]
    counts = _statuses(results)
    return {
        "schema_version": SCHEMA_VERSION,
        "config": Path(path).name,
        "seed": seed,
        "experiments": results,
        "summary": {"status_counts": counts, "exit_code": 1 if counts.get("fail") else 0},
    }


def _csv_rows(report: dict):
    def walk(rep: dict, exp: str, prefix: str):
        name = prefix + rep["name"]
        yield [exp, name, rep["paper_tag"], rep["status"], rep["scale"],
               rep["lhs_log"], rep["rhs_log"], rep["margin_log"]]
        for sub in rep.get("sub_reports", []):
            yield from walk(sub, exp, name + "/")

    for res in report["experiments"]:
        for rep in res["reports"]:
            yield from walk(rep, res["label"], "")


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "name", "paper_tag", "status", "scale", "lhs_log", "rhs_log",
                "margin"])
    for row in _csv_rows(report):
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def write_outputs(report: dict, out: Path, stem: str, fmt: str) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        p = out / f"{stem}.report.json"
        p.write_text(to_json(report), encoding="utf-8")
        written.append(p)
    if fmt in ("csv", "both"):
        p = out / f"{stem}.report.csv"
        p.write_text(to_csv(report), encoding="utf-8")
        written.append(p)
    return written


# --------------------------------------------------------------------- main

def list_experiments(as_json: bool = False) -> str:
    rows = [e.describe() for e in EXPERIMENTS.values()]
    if as_json:
        return json.dumps(rows, indent=1, sort_keys=True)
    lines = []
    for r in rows:
        lines.append(f"{r['name']}: {r['summary']}")
        lines.append(f"    functions: {', '.join(r['functions'])}")
        lines.append(f"    required:  {', '.join(r['required']) or '-'}")
        lines.append(f"    tags:      {', '.join(r['paper_tags'])}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holgraph",
                                 description="Certify growth inequalities for g(z, f(z)).")
    sub = ap.add_subparsers(dest="command", required=True)
    lp = sub.add_parser("list", help="list experiments, their parameters and tags")
    lp.add_argument("--json", action="store_true", help="machine-readable output")
    rp = sub.add_parser("run", help="run an experiment config")
    rp.add_argument("config")
    rp.add_argument("--seed", type=int, default=None)
    rp.add_argument("--out", default="reports")
    rp.add_argument("--format", choices=("json", "csv", "both"), default="both")
    rp.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                    help="worker processes (experiments run concurrently)")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "list":
        print(list_experiments(args.json))
        return 0
    try:
        report = run_config(args.config, args.seed, max(1, args.jobs))
    except (ConfigError, K.ParameterRangeError) as exc:
        print(f"holgraph: error: {exc}", file=sys.stderr)
        return 2
    files = write_outputs(report, Path(args.out), Path(args.config).stem, args.format)
    s = report["summary"]
    counts = ", ".join(f"{k}={v}" for k, v in s["status_counts"].items())
    print(f"{args.config}: {counts}")
    for p in files:
        print(f"wrote {p}")
    return s["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
