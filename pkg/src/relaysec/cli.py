"""Command-line front end.

Every command resolves its parameters as: command-line flag, then
``--config`` file, then the built-in default (the default seed may come
from ``RELAYSEC_SEED``). Commands that write ``--output`` also write
``<output>.manifest.json``; ``relaysec replay`` re-runs a manifest.

Exit codes: 0 success, 1 validation failure, 2 domain or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import closedform as cf
from .cellular import CellScenario, row_seed, sweep_direct_outage
from .errors import RelaySecError
from .geometry import FourNodeLayout, Point2D, PowerPair, Strategy, distances_from_layout
from .montecarlo import McConfig, mc_cellular_relay, mc_df_outage, mc_direct_outage, mc_rf_outage
from .optimizer import (OptimizerConfig, SearchRegion, fournode_objective,
                        optimize_cellular_relay, optimize_relay_fournode,
                        point_a_direct_baseline, sweep_eavesdropper_distance)
from .validation import SUITES, run_suite

SEED_ENV = "RELAYSEC_SEED"

EXIT_OK, EXIT_VALIDATION, EXIT_DOMAIN = 0, 1, 2


class ConfigError(RelaySecError):
    pass


# -- value parsing ---------------------------------------------------------

def parse_floats(text) -> list[float]:
    """``"2,3,4"`` or ``"start:stop:num"`` (inclusive linspace)."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return [float(v) for v in np.linspace(float(start), float(stop), int(num))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


def parse_ints(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer list {text!r}") from exc


def parse_point(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(text[0]), float(text[1])]
    p = Point2D.parse(str(text))
    return [p.x, p.y]


def _to_int(text) -> int:
    try:
        return int(float(text)) if "e" in str(text).lower() else int(text)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {text!r}") from exc


def _to_float(text) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {text!r}") from exc


def _to_optional_float(text):
    if text is None or str(text).lower() in ("", "none"):
        return None
    return _to_float(text)


def _default_seed() -> int:
    return _to_int(os.environ.get(SEED_ENV, "0"))


# name -> (converter, default, help). Defaults may be callables.
MC_OPTIONS = {
    "trials": (_to_int, 1_000_000, "Monte Carlo trials per estimate"),
    "seed": (_to_int, _default_seed, f"64-bit seed (default from ${SEED_ENV} or 0)"),
    "chunk_size": (_to_int, 10_000, "trials per reproducibility chunk"),
    "workers": (_to_int, 1, "concurrent chunk workers (does not change results)"),
}
OUTPUT_OPTIONS = {
    "output": (str, None, "output file"),
    "format": (str, "csv", "output format: csv or json"),
}

COMMANDS = {
    "eval": {
        "help": "evaluate closed-form outages for one four-node layout",
        "options": {
            "source": (parse_point, [0.0, 0.0], "source x,y"),
            "relay": (parse_point, [0.4551, -0.0987], "relay x,y"),
            "destination": (parse_point, [1.0, 0.0], "destination x,y"),
            "eavesdropper": (parse_point, [0.0, 1.0], "eavesdropper x,y"),
            "alpha": (_to_float, 4.0, "path-loss exponent"),
            "strategy": (str, "all", "df, rf, direct or all"),
            "ratio": (_to_optional_float, None, "DF power ratio p_r/p_s (default: optimal)"),
            "trials": (_to_int, 0, "Monte Carlo cross-check trials (0 disables)"),
            "seed": MC_OPTIONS["seed"],
            "chunk_size": MC_OPTIONS["chunk_size"],
            "workers": MC_OPTIONS["workers"],
            **OUTPUT_OPTIONS,
        },
    },
    "fig2": {
        "help": "DF/RF outage heatmap over relay positions plus the refined optima",
        "options": {
            "alpha": (_to_float, 4.0, "path-loss exponent"),
            "resolution": (_to_int, 101, "grid points per axis"),
            "region": (parse_floats, [-0.5, 1.5, -0.5, 1.5], "x_min,x_max,y_min,y_max"),
            "source": (parse_point, [0.0, 0.0], "source x,y"),
            "destination": (parse_point, [1.0, 0.0], "destination x,y"),
            "eavesdropper": (parse_point, [0.0, 1.0], "eavesdropper x,y"),
            **OUTPUT_OPTIONS,
        },
    },
    "fig3": {
        "help": "minimal outage vs eavesdropper distance for direct, DF and RF",
        "options": {
            "alpha": (parse_floats, [2.0, 3.0, 4.0], "path-loss exponents"),
            "eav_distances": (parse_floats, [1, 2, 5, 10, 20, 50, 100],
                              "eavesdropper heights above the S-D midpoint"),
            "resolution": (_to_int, 64, "optimizer grid points per axis"),
            **OUTPUT_OPTIONS,
        },
    },
    "fig5": {
        "help": "cellular direct outage vs normalized BS-MU distance",
        "options": {
            "x_grid": (parse_floats, [round(0.05 * k, 2) for k in range(1, 21)],
                       "normalized distances"),
            "alpha": (parse_floats, [2.0, 3.0, 4.0], "path-loss exponents"),
            "eves": (parse_ints, [1, 2, 4, 8], "eavesdropper counts"),
            **MC_OPTIONS,
            **OUTPUT_OPTIONS,
        },
    },
    "fig6": {
        "help": "optimized sector relay vs path-loss exponent at point A",
        "options": {
            "alpha": (parse_floats, [2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0],
                      "path-loss exponents"),
            "sectors": (_to_int, 6, "sectors per cell"),
            "eves": (_to_int, 1, "eavesdroppers in the Monte Carlo cross-check"),
            "ratio_cap": (_to_float, 1.0, "relay power cap p_r/p_s"),
            "resolution": (_to_int, 64, "optimizer grid points per axis"),
            **MC_OPTIONS,
            "trials": (_to_int, 100_000, "Monte Carlo cross-check trials (0 disables)"),
            **OUTPUT_OPTIONS,
        },
    },
    "validate": {
        "help": "run property suites and report pass/fail",
        "options": {
            "suite": (str, "all", "one of " + ", ".join(SUITES)),
            "geometries": (_to_int, 10_000, "random geometries for analytic suites"),
            "configs": (_to_int, 100, "oracle configurations"),
            **MC_OPTIONS,
            **OUTPUT_OPTIONS,
        },
    },
}


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Dashes in keys become underscores."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(command: str, cli_values: dict, config: dict) -> dict:
    params = {}
    for name, (conv, default, _) in COMMANDS[command]["options"].items():
        if cli_values.get(name) is not None:
            value = conv(cli_values[name])
        elif name in config:
            value = conv(config[name])
        else:
            value = default() if callable(default) else default
        params[name] = value
    return params


# -- output ----------------------------------------------------------------

def fmt_csv(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        return None if not math.isfinite(v) else float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: _json_value(r.get(c)) for c in columns} for r in rows], indent=1) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt_csv(r.get(c)) for c in columns])
    return buf.getvalue()


def p6(v) -> str:
    return format(float(v), ".6g")


def _mc_config(params) -> McConfig:
    return McConfig(trials=params["trials"], seed=params["seed"],
                    chunk_size=params["chunk_size"], workers=params["workers"])


# -- commands --------------------------------------------------------------
# Each handler returns (exit_code, rows, columns, stdout_text).

def cmd_eval(p):
    layout = FourNodeLayout(*(Point2D(*p[k]) for k in ("source", "relay", "destination",
                                                       "eavesdropper")))
    dist = distances_from_layout(layout)
    alpha = p["alpha"]
    want = p["strategy"]
    if want not in ("df", "rf", "direct", "all"):
        raise ConfigError(f"unknown strategy {want!r}")
    rows = []
    lines = []
    strategies = ("direct", "df", "rf") if want == "all" else (want,)
    cfg = _mc_config(p) if p["trials"] > 0 else None
    for s in strategies:
        row = {"strategy": s, "alpha": alpha}
        if s == "direct":
            row["outage"] = cf.direct_outage(dist.d_sd, dist.d_se, alpha)
            est = mc_direct_outage(dist.d_sd, dist.d_se, alpha, cfg) if cfg else None
        elif s == "df":
            opt = cf.df_optimal_power_ratio(dist, alpha)
            ratio = opt if p["ratio"] is None else p["ratio"]
            row.update(outage=cf.df_outage_general(dist, alpha, ratio), power_ratio=ratio,
                       optimal_power_ratio=opt, optimal_outage=cf.df_outage_optimal(dist, alpha),
                       identity_residual=cf.df_rf_identity_residual(dist, alpha))
            est = mc_df_outage(dist, alpha, PowerPair(1.0, ratio), cfg) if cfg else None
        else:
            row["outage"] = cf.rf_outage(dist, alpha)
            est = mc_rf_outage(dist, alpha, cfg) if cfg else None
        if est is not None:
            row.update(mc_outage=est.p_hat, mc_std_error=est.std_error)
        rows.append(row)
        text = f"{s}: outage={p6(row['outage'])}"
        if s == "df":
            text += (f" power_ratio={p6(row['power_ratio'])} optimal_ratio={p6(opt)}"
                     f" identity_residual={row['identity_residual']:.3g}")
        if est is not None:
            text += f" mc={p6(est.p_hat)}±{est.std_error:.2g}"
        lines.append(text)
    columns = ["strategy", "alpha", "outage", "power_ratio", "optimal_power_ratio",
               "optimal_outage", "identity_residual", "mc_outage", "mc_std_error"]
    return EXIT_OK, rows, columns, "\n".join(lines)


def cmd_fig2(p):
    alpha = p["alpha"]
    s, d, e = (Point2D(*p[k]) for k in ("source", "destination", "eavesdropper"))
    if len(p["region"]) != 4:
        raise ConfigError("region needs x_min,x_max,y_min,y_max")
    region = SearchRegion(*p["region"])
    n = p["resolution"]
    if n < 2:
        raise ConfigError("resolution must be >= 2")
    xs = np.linspace(region.x_min, region.x_max, n)
    ys = np.linspace(region.y_min, region.y_max, n)
    grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    p_df = fournode_objective(s, d, e, alpha, Strategy.DF)(grid)
    p_rf = fournode_objective(s, d, e, alpha, Strategy.RF)(grid)
    rows = []
    for i in range(n):
        for j in range(n):
            rows.append({"kind": "grid", "x": xs[i], "y": ys[j],
                         "p_df": p_df[i, j] if math.isfinite(p_df[i, j]) else math.nan,
                         "p_rf": p_rf[i, j] if math.isfinite(p_rf[i, j]) else math.nan})
    cfg = OptimizerConfig(grid_points_per_axis=max(n, 8))
    lines = []
    for strat in (Strategy.DF, Strategy.RF):
        res = optimize_relay_fournode(s, d, e, alpha, strat, region, cfg)
        dist = distances_from_layout(FourNodeLayout(s, res.argmin, d, e))
        rows.append({"kind": f"optimum_{strat.value}", "x": res.argmin.x, "y": res.argmin.y,
                     "p_df": cf.df_outage_optimal(dist, alpha), "p_rf": cf.rf_outage(dist, alpha)})
        lines.append(f"{strat.value}: optimum=({p6(res.argmin.x)}, {p6(res.argmin.y)}) "
                     f"outage={p6(res.f_min)}")
    lines.append(f"direct: outage={p6(cf.direct_outage(s.distance_to(d), s.distance_to(e), alpha))}")
    return EXIT_OK, rows, ["kind", "x", "y", "p_df", "p_rf"], "\n".join(lines)


def cmd_fig3(p):
    source, dest = Point2D(0.0, 0.0), Point2D(1.0, 0.0)
    path = [Point2D(0.5, h) for h in p["eav_distances"]]
    rows = sweep_eavesdropper_distance(source, dest, path, p["alpha"],
                                       cfg=OptimizerConfig(grid_points_per_axis=p["resolution"]))
    columns = ["eav_distance", "alpha", "strategy", "optimal_relay_x", "optimal_relay_y", "outage"]
    return EXIT_OK, rows, columns, f"{len(rows)} rows"


def cmd_fig5(p):
    rows = sweep_direct_outage(p["x_grid"], p["alpha"], p["eves"], _mc_config(p))
    columns = ["x", "alpha", "n_eves", "value", "method", "upper_bound"]
    return EXIT_OK, rows, columns, f"{len(rows)} rows"


def cmd_fig6(p):
    cfg = OptimizerConfig(grid_points_per_axis=p["resolution"])
    rows, lines = [], []
    for k, alpha in enumerate(p["alpha"]):
        scen = CellScenario(sectors_M=p["sectors"], eavesdroppers_N=p["eves"], alpha=alpha,
                            power_ratio_cap=p["ratio_cap"], power_ratio=p["ratio_cap"])
        baseline = point_a_direct_baseline(scen)
        for j, strat in enumerate((Strategy.RF, Strategy.DF)):
            res = optimize_cellular_relay(scen, strat, cfg)
            row = {"alpha": alpha, "strategy": strat.value, "optimal_dbr_over_R": res.argmin,
                   "power_ratio": res.power_ratio if res.power_ratio is not None else math.nan,
                   "outage": res.f_min, "direct_baseline": baseline}
            if p["trials"] > 0:
                placed = scen.with_relay(res.argmin * scen.radius_R, res.power_ratio)
                mc_cfg = McConfig(p["trials"], row_seed(p["seed"], 2 * k + j),
                                  p["chunk_size"], p["workers"])
                est = mc_cellular_relay(placed, strat, cfg=mc_cfg)
                row.update(mc_outage=est.p_hat, mc_std_error=est.std_error)
            rows.append(row)
            lines.append(f"alpha={p6(alpha)} {strat.value}: d_br/R={p6(res.argmin)} "
                         f"outage={p6(res.f_min)} direct={p6(baseline)}")
    columns = ["alpha", "strategy", "optimal_dbr_over_R", "power_ratio", "outage",
               "direct_baseline", "mc_outage", "mc_std_error"]
    return EXIT_OK, rows, columns, "\n".join(lines)


def cmd_validate(p):
    if p["suite"] not in SUITES:
        raise ConfigError(f"unknown suite {p['suite']!r}; choose from {', '.join(SUITES)}")
    results = run_suite(p["suite"], _mc_config(p), p["geometries"], p["configs"])
    rows = [{"suite": r.suite, "property": r.name, "passed": r.passed, "measured": r.measured,
             "threshold": r.threshold, "detail": r.detail} for r in results]
    code = EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION
    return code, rows, ["suite", "property", "passed", "measured", "threshold", "detail"], \
        "\n".join(r.line() for r in results)


HANDLERS = {"eval": cmd_eval, "fig2": cmd_fig2, "fig3": cmd_fig3, "fig5": cmd_fig5,
            "fig6": cmd_fig6, "validate": cmd_validate}


# -- manifest and dispatch -------------------------------------------------

def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def execute(command: str, params: dict, manifest_path=None) -> int:
    started = _now()
    code, rows, columns, text = HANDLERS[command](params)
    if text:
        print(text)
    outputs = {}
    output = params.get("output")
    if output:
        payload = render(rows, columns, params.get("format", "csv"))
        Path(output).write_text(payload, encoding="utf-8", newline="")
        outputs[str(output)] = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        manifest_path = manifest_path or f"{output}.manifest.json"
    if manifest_path:
        manifest = {
            "command": command,
            "parameters": params,
            "seed": params.get("seed"),
            "tool": "relaysec",
            "version": __version__,
            "started_at": started,
            "finished_at": _now(),
            "outputs": outputs,
        }
        Path(manifest_path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return code


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaysec", description="Secure-connection outage and relay placement toolkit.")
    parser.add_argument("--version", action="version", version=f"relaysec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in COMMANDS.items():
        sp = sub.add_parser(name, help=spec["help"])
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--manifest", help="manifest path (default: <output>.manifest.json)")
        for opt, (_, default, help_) in spec["options"].items():
            shown = "env/0" if callable(default) else default
            sp.add_argument(_flag(opt), dest=opt, default=None, help=f"{help_} [{shown}]")
    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest_file")
    rp.add_argument("--output", help="write to this path instead of the recorded one")
    rp.add_argument("--workers", type=int, help="override the worker count")
    rp.add_argument("--manifest", help="manifest path for the replay")
    return parser


def replay(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest_file).read_text())
        command, params = manifest["command"], dict(manifest["parameters"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"unreadable manifest {args.manifest_file}: {exc}") from exc
    if command not in HANDLERS:
        raise ConfigError(f"manifest names unknown command {command!r}")
    params = resolve(command, {}, {k: v for k, v in params.items() if v is not None})
    if args.output:
        params["output"] = args.output
    if args.workers is not None and "workers" in params:
        params["workers"] = args.workers
    return execute(command, params, args.manifest)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return replay(args)
        config = read_config(args.config) if args.config else {}
        cli_values = {k: v for k, v in vars(args).items() if k in COMMANDS[args.command]["options"]}
        params = resolve(args.command, cli_values, config)
        return execute(args.command, params, args.manifest)
    except RelaySecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
