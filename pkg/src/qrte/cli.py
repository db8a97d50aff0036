"""Command-line front end.

Subcommands ``run``, ``analytic``, ``compare``, ``shots-study`` and
``gate-count``. Profiles are CSV with header ``x,I_plus,I_minus``; run
metadata goes to ``manifest.json``. Exit codes: 0 success, 2 usage/config,
3 domain, 4 numeric.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .analytic import evaluate, solve_steady
from .circuits import QubitLayout, build_step, compute_lcu_params, gate_count
from .errors import ConfigError, QrteError
from .field import EXACT, SAMPLED, LatticeField, RteConfig, SourceSpec
from .rte import loglog_slope, run_classical, run_quantum, shots_study

OUT_DIR_ENV = "QRTE_OUT_DIR"
DEFAULT_OUT_DIR = "qrte_out"
CSV_HEADER = ("x", "I_plus", "I_minus")
MODES = ("classical", "quantum-exact", "quantum-sampled")

PHYSICS_KEYS = ("kappa", "sigma", "mu", "c", "n", "dt", "t_final", "steps", "source")
RUN_KEYS = ("mode", "shots", "seed", "snapshots", "every")

log = logging.getLogger("qrte")


class UsageError(ConfigError):
    pass


# CSV ---------------------------------------------------------------------

def write_profile(path: Path, x, I_plus, I_minus) -> None:
    # repr() gives the shortest round-tripping decimal, independent of locale
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in zip(x, I_plus, I_minus):
            w.writerow([repr(float(v)) for v in row])


def read_profile(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_HEADER:
            raise UsageError(f"{path}: expected header {','.join(CSV_HEADER)}, got {header}")
        rows = [[float(v) for v in r] for r in reader if r]
    data = np.array(rows, dtype=float).reshape(-1, 3)
    return {k: data[:, j] for j, k in enumerate(CSV_HEADER)}


# Config assembly ---------------------------------------------------------

def load_config_file(path: str) -> dict:
    """Key/value settings from a manifest, a JSON object, or ``key = value`` lines."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict):
        if "config" in data:  # a manifest from a previous run
            out = dict(data["config"])
            for k in RUN_KEYS:
                if data.get(k) is not None:
                    out[k] = data[k]
            out.pop("t_final", None)
            return out
        return {k.replace("-", "_"): v for k, v in data.items()}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        k, v = (p.strip() for p in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _merged(args: argparse.Namespace, keys: Sequence[str]) -> dict:
    file_vals = load_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for k in keys:
        flag = getattr(args, k, None)
        if flag is not None:
            merged[k] = flag
        elif k in file_vals:
            merged[k] = file_vals[k]
    return merged


def _as(kind, value, name):
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--{name.replace('_', '-')}: cannot parse {value!r}") from exc


def build_config(settings: dict, mode: str = EXACT) -> RteConfig:
    kw: dict = {}
    for k in ("kappa", "sigma", "mu", "c", "dt"):
        if settings.get(k) is not None:
            kw[k] = _as(float, settings[k], k)
    if settings.get("n") is not None:
        kw["n"] = _as(int, settings["n"], "n")
    if settings.get("source") is not None:
        src = settings["source"]
        kw["source"] = src if isinstance(src, SourceSpec) else SourceSpec.parse(str(src))
    for k in ("shots", "seed"):
        if settings.get(k) is not None:
            kw[k] = _as(int, settings[k], k)
    kw["mode"] = mode
    cfg = RteConfig(**kw)
    steps = settings.get("steps")
    t_final = settings.get("t_final")
    if steps is not None:
        steps = _as(int, steps, "steps")
        if t_final is not None and abs(steps * cfg.dt - float(t_final)) > 1e-9 * max(1.0, float(t_final)):
            raise UsageError(f"--steps {steps} and --t-final {t_final} disagree (dt = {cfg.dt!r})")
    elif t_final is not None:
        t_final = _as(float, t_final, "t_final")
        steps = int(round(t_final / cfg.dt))
        if abs(steps * cfg.dt - t_final) > 1e-9 * max(1.0, t_final):
            raise UsageError(f"--t-final {t_final} is not a whole number of steps of dt = {cfg.dt!r}")
    if steps is not None:
        cfg = cfg.with_(steps=steps)
    return cfg


def _snapshot_steps(settings: dict, steps: int) -> list[int]:
    snaps, every = settings.get("snapshots"), settings.get("every")
    if snaps is not None and every is not None:
        raise UsageError("--snapshots and --every are mutually exclusive")
    if every is not None:
        every = _as(int, every, "every")
        if every < 1:
            raise UsageError("--every must be >= 1")
        out = list(range(0, steps + 1, every))
        if out[-1] != steps:
            out.append(steps)
        return out
    if snaps is None:
        return [steps]
    if isinstance(snaps, str):
        snaps = [s for s in snaps.split(",") if s.strip()]
    out = sorted({_as(int, s, "snapshots") for s in snaps})
    bad = [s for s in out if not 0 <= s <= steps]
    if bad:
        raise UsageError(f"snapshot steps {bad} outside 0..{steps}")
    return out


def _out_dir(args) -> Path:
    d = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)
    d.mkdir(parents=True, exist_ok=True)
    return d


# Subcommands -------------------------------------------------------------

def cmd_run(args) -> int:
    settings = _merged(args, PHYSICS_KEYS + RUN_KEYS)
    mode = settings.get("mode") or "classical"
    if mode not in MODES:
        raise UsageError(f"--mode must be one of {', '.join(MODES)}")
    cfg = build_config(settings, SAMPLED if mode == "quantum-sampled" else EXACT)
    snaps = _snapshot_steps(settings, cfg.steps)
    out = _out_dir(args)

    t0 = time.perf_counter()
    diagnostics = []
    if mode == "classical":
        fields = run_classical(cfg)
    else:
        run = run_quantum(cfg)
        fields = run.fields
        diagnostics = [
            {"step": d.step, "success_probability": d.success_probability, "norm_phi": d.norm_phi}
            for d in run.diagnostics
        ]
    wall = time.perf_counter() - t0

    files = []
    for s in snaps:
        f: LatticeField = fields[s]
        path = out / f"profile_{s}.csv"
        write_profile(path, cfg.x, f.I_plus, f.I_minus)
        files.append(path.name)
    manifest = {
        "tool": "qrte",
        "version": __version__,
        "command": "run",
        "mode": mode,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "snapshots": snaps,
        "files": files,
        "diagnostics": diagnostics,
        "wall_time_s": wall,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(json.dumps({"out_dir": str(out), "files": files, "steps": cfg.steps, "wall_time_s": wall}))
    return 0


def cmd_analytic(args) -> int:
    settings = _merged(args, PHYSICS_KEYS)
    cfg = build_config(settings)
    sol = solve_steady(cfg.kappa, cfg.sigma, cfg.mu, cfg.source)
    ip, im = evaluate(sol, cfg.x)
    out = _out_dir(args)
    path = out / (args.output or "analytic.csv")
    write_profile(path, cfg.x, ip, im)
    print(json.dumps({"file": str(path), "omega": sol.omega, "plateau": sol.particular}))
    return 0


def compare_profiles(a: dict, b: dict) -> dict:
    if len(a["x"]) != len(b["x"]):
        raise UsageError(f"row counts differ: {len(a['x'])} vs {len(b['x'])}")
    if len(a["x"]) == 0:
        raise UsageError("profiles are empty")
    if np.max(np.abs(a["x"] - b["x"])) > 1e-12:
        raise UsageError("x grids differ by more than 1e-12")

    def norms(d):
        return {
            "linf": float(np.max(np.abs(d))),
            "l2": float(np.sqrt(np.sum(d * d))),
            "rms": float(np.sqrt(np.mean(d * d))),
        }

    dp, dm = a["I_plus"] - b["I_plus"], a["I_minus"] - b["I_minus"]
    report = norms(np.concatenate([dp, dm]))
    report["I_plus"] = norms(dp)
    report["I_minus"] = norms(dm)
    return report


def cmd_compare(args) -> int:
    report = compare_profiles(read_profile(Path(args.file_a)), read_profile(Path(args.file_b)))
    text = json.dumps(report, indent=2)
    print(text)
    if args.json:
        Path(args.json).write_text(text)
    return 0


def cmd_shots_study(args) -> int:
    settings = _merged(args, PHYSICS_KEYS + ("seed",))
    cfg = build_config(settings)
    shot_list = [_as(int, s, "shot_list") for s in args.shot_list.split(",") if s.strip()]
    if not shot_list:
        raise UsageError("--shot-list is empty")
    seed = _as(int, settings.get("seed", 0), "seed")
    rows = shots_study(cfg, shot_list, replicas=args.replicas, seed=seed)
    out = _out_dir(args)
    path = out / "shots_study.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["shots", "rms_error", "rms_std", "replicas"])
        for r in rows:
            w.writerow([r["shots"], repr(r["rms_error"]), repr(r["rms_std"]), r["replicas"]])
    summary = {"file": str(path), "rows": rows}
    if len(rows) >= 2:
        summary["loglog_slope"] = loglog_slope(rows)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_gate_count(args) -> int:
    settings = _merged(args, PHYSICS_KEYS)
    cfg = build_config(settings)
    params = compute_lcu_params(cfg.kappa, cfg.sigma, cfg.dt)
    report = gate_count(build_step(QubitLayout(cfg.n), params))
    report["num_qubits"] = cfg.n + 5
    print(json.dumps(report, indent=2))
    return 0


# Parser ------------------------------------------------------------------

def _physics(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("physics")
    g.add_argument("--kappa", type=float, help="extinction coefficient (default 2.5)")
    g.add_argument("--sigma", type=float, help="isotropic scattering gain (default 0.5)")
    g.add_argument("--mu", type=float, help="direction cosine (default 1)")
    g.add_argument("--c", type=float, help="propagation speed (default 1)")
    g.add_argument("--n", type=int, help="lattice qubits, M = 2**n sites (default 5)")
    g.add_argument("--dt", type=float, help="time step (default 1/(c*mu*2**n))")
    g.add_argument("--t-final", dest="t_final", type=float, help="final time; sets steps = t_final/dt")
    g.add_argument("--steps", type=int, help="number of time steps (default 64)")
    g.add_argument("--source", help="segments lo:hi:val[,...] (default 0.25:0.75:1)")
    g.add_argument("--config", help="config file: key = value lines, JSON, or a previous manifest.json")
    p.add_argument("--out-dir", dest="out_dir", help=f"output directory (default ${OUT_DIR_ENV} or {DEFAULT_OUT_DIR})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrte", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qrte {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="time-step the lattice and write profile CSVs")
    _physics(p)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--shots", type=int, help="shots per step in quantum-sampled mode")
    p.add_argument("--seed", type=int)
    p.add_argument("--snapshots", help="comma-separated step indices to write (default: last)")
    p.add_argument("--every", type=int, help="write every k-th step (and the last)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analytic", help="steady-state analytic profile at the cell centres")
    _physics(p)
    p.add_argument("--output", help="file name inside the output directory (default analytic.csv)")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("compare", help="error norms between two profile CSVs")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--json", help="also write the report to this path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("shots-study", help="sampled-mode error against exact mode per shot count")
    _physics(p)
    p.add_argument("--shot-list", dest="shot_list", default="1000,100000,1000000")
    p.add_argument("--replicas", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_shots_study)

    p = sub.add_parser("gate-count", help="as-built gate counts of one time step")
    _physics(p)
    p.set_defaults(func=cmd_gate_count)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except QrteError as exc:
        print(f"qrte {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"qrte {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
