# src/rgbose/cli.py
import io
import csv
import sys
import json
import math
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import jsonschema
import numpy as np

from . import config
from .lab import flows, powercount, propagators, quadrature, thermo, trees, ward
from .lab.errors import ConfigError, RGBoseError
from .lab.model import ModelParams, Momentum, floor_hbar_scale

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_STRICT = 3

SWEEP_NAMES = {"lambda": "lam", "gamma": "gamma", "rho0": "rho0", "R0": "R0", "vhat0": "vhat0"}
THERMO_OBSERVABLES = ("energy", "mu", "depletion", "dispersion", "doublewell")
JSON_DEFAULT_COMMANDS = ("ward", "fixedpoint")


@dataclass
class SweepSpec:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in SWEEP_NAMES:
            raise ConfigError(f"Cannot sweep '{self.name}', expected one of {sorted(SWEEP_NAMES)}")
        if self.count < 1:
            raise ConfigError(f"Sweep over {self.name} is empty (count={self.count})")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        """NAME:START:STOP:COUNT."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"Sweep must be NAME:START:STOP:COUNT, got '{text}'")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as e:
            raise ConfigError(f"Malformed sweep '{text}': {e}")

    def values(self) -> List[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


@dataclass
class RunConfig:
    """Everything one invocation needs: parameters, command, sweep and output options."""
    params: ModelParams
    subcommand: str
    sweep: Optional[SweepSpec] = None
    out: Optional[str] = None
    tol: float = config.DEFAULT_TOL
    format: str = "csv"
    strict: bool = False
    options: Dict[str, Any] = field(default_factory=dict)

    @property
    def quad_spec(self) -> quadrature.QuadratureSpec:
        return quadrature.QuadratureSpec(rel_tol=self.tol)


@dataclass
class CommandResult:
    rows: List[Dict[str, Any]]
    breaches: List[str] = field(default_factory=list)


# --- configuration -------------------------------------------------------------------

def load_config_document(path: str) -> Dict[str, Any]:
    """
    Read and validate a JSON run configuration.

    Raises:
        ConfigError: if the file is unreadable or fails schema validation
    """
    try:
        with open(path) as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config {path}: {e}")
    with open(config.RUN_CONFIG_SCHEMA_PATH) as f:
        schema = json.load(f)
    try:
        jsonschema.validate(instance=document, schema=schema)
    except jsonschema.exceptions.ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {e.message}")
    return document


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config document with command-line overrides."""
    document = load_config_document(args.config) if args.config else {}
    params_doc = dict(document.get("params", {}))
    overrides = {"lambda": args.lam, "gamma": args.gamma, "d": args.d, "rho0": args.rho0,
                 "R0": args.R0, "vhat0": args.vhat0}
    params_doc.update({k: v for k, v in overrides.items() if v is not None})
    if args.cutoff:
        params_doc["cutoff"] = {"kind": args.cutoff}
    try:
        params = ModelParams.from_dict(params_doc)
    except RGBoseError as e:
        raise ConfigError(str(e))

    sweep = None
    if args.sweep:
        sweep = SweepSpec.parse(args.sweep)
    elif getattr(args, "lambda_sweep", None):
        sweep = SweepSpec.parse("lambda:" + args.lambda_sweep)
    elif "sweep" in document:
        sweep = SweepSpec(**document["sweep"])

    tol = args.tol if args.tol is not None else document.get("tol", config.DEFAULT_TOL)
    if not tol > 0:
        raise ConfigError(f"Tolerance must be positive, got {tol}")
    fmt = args.format or document.get("format")
    if fmt is None:
        fmt = "json" if args.command in JSON_DEFAULT_COMMANDS else "csv"

    options = {k: v for k, v in vars(args).items()
               if k not in ("config", "lam", "gamma", "d", "rho0", "R0", "vhat0", "cutoff", "sweep",
                            "lambda_sweep", "tol", "format", "out", "strict", "command")}
    return RunConfig(params=params, subcommand=args.command, sweep=sweep,
                     out=args.out or document.get("out"), tol=tol, format=fmt,
                     strict=args.strict, options=options)


# --- subcommands ---------------------------------------------------------------------

def cmd_thermo(cfg: RunConfig, params: ModelParams) -> CommandResult:
    observable = cfg.options["observable"]
    spec = cfg.quad_spec
    row: Dict[str, Any] = {"lambda": params.lam, "rho0": params.rho0, "d": params.d, "observable": observable}
    if observable == "energy":
        result = thermo.ground_state_energy(params, spec)
        row.update({"value": result.value, "error": result.error, **result.terms})
        if params.d == 3:
            row["lhy_closed_form"] = thermo.lhy_closed_form(params)
    elif observable == "mu":
        row["leading"] = thermo.chemical_potential(params, "leading")
        row["value"] = thermo.chemical_potential(params, "corrected", spec)
    elif observable == "depletion":
        beta = cfg.options.get("beta")
        cutoff = cfg.options.get("ir_cutoff") or 0.0
        if beta:
            row["value"] = thermo.finite_T_depletion(params, beta, cutoff, spec)
        else:
            row["value"] = thermo.depletion(params, ir_cutoff=cutoff, quad_spec=spec)
    elif observable == "dispersion":
        rows = []
        for k in np.linspace(cfg.options["k_max"] / cfg.options["points"], cfg.options["k_max"],
                             cfg.options["points"]):
            rows.append({**row, "k": float(k), "value": float(thermo.dispersion(float(k), params)),
                         "sound_speed": thermo.sound_speed(params)})
        return CommandResult(rows)
    else:
        row.update(thermo.double_well_minimum(params))
    return CommandResult([row])


def cmd_betas(cfg: RunConfig, params: ModelParams) -> CommandResult:
    gamma = params.gamma
    profile = cfg.options.get("profile") or "sharp"
    rows, breaches = [], []
    for n in range(4):
        numeric = quadrature.beta_tilde_2d(n, gamma, profile, cfg.quad_spec)
        exact = quadrature.beta_tilde_closed_form(n, gamma)
        rows.append({"quantity": f"beta_tilde_{n}_2d", "gamma": gamma, "profile": profile,
                     "quadrature": numeric, "closed_form": exact, "rel_err": abs(numeric / exact - 1.0)})
    numeric = quadrature.beta2_3d(gamma, profile, cfg.quad_spec)
    exact = quadrature.beta2_3d_closed_form(gamma)
    rows.append({"quantity": "beta2_3d", "gamma": gamma, "profile": profile,
                 "quadrature": numeric, "closed_form": exact, "rel_err": abs(numeric / exact - 1.0)})
    if profile == "sharp":
        breaches = [f"{r['quantity']} rel_err {r['rel_err']:.2e}" for r in rows if r["rel_err"] > 1e-6]
    return CommandResult(rows, breaches)


def _monotone(values: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.all(np.diff(values) >= -tol))


def cmd_flow2d(cfg: RunConfig, params: ModelParams) -> CommandResult:
    params = params.with_updates(d=2)
    opts = cfg.options
    betas = flows.beta_table(params.gamma, params.cutoff, limit=opts.get("limit_betas", False))
    if opts.get("mode") == "ode":
        traj = flows.flow2d_ode(params.lam, 0.0, t_max=opts["t_max"], betas=betas)
        key = "t"
    else:
        traj = flows.flow2d_recursion(params.lam, 0.0, params.gamma, betas, opts["steps"],
                                      printed_sign=opts.get("printed_sign", False))
        key = "h"
    rows = [{key: getattr(s, key), "x": s.x, "y": s.y, "z": s.y / s.x ** 2} for s in traj.states]
    breaches = []
    if not (_monotone(traj.column("x")) and _monotone(traj.column("y"))):
        breaches.append("x or y is not monotone along the flow")
    return CommandResult(rows, breaches)


def cmd_flow3d(cfg: RunConfig, params: ModelParams) -> CommandResult:
    params = params.with_updates(d=3)
    traj, summary = flows.trajectory_3d(params, cfg.options["steps"], variant=cfg.options["variant"])
    h_bar = traj.meta["hbar"]
    closed = flows.Z_closed_form(params, np.array([s.h - h_bar for s in traj.states]), traj.meta["beta2"])
    rows = []
    for s, z_closed in zip(traj.states, closed):
        rows.append({"h": s.h, "Z": s.Z, "Z_closed_form": float(z_closed), "lambda_h": s.lam, "mu_h": s.mu,
                     "E": s.E, "B": s.B, "A": s.A, "c_squared": summary["c_squared"]})
    breaches = []
    if not np.all(np.diff(traj.column("Z")) < 0):
        breaches.append("Z is not decreasing")
    deviation = float(np.max(np.abs(traj.column("Z") / closed - 1.0)))
    band = 3.0 * params.lam * math.sqrt(params.epsilon)
    if deviation > band:
        breaches.append(f"Z deviates from the closed form by {deviation:.2e} > {band:.2e}")
    return CommandResult(rows, breaches)


def cmd_fixedpoint(cfg: RunConfig, params: ModelParams) -> CommandResult:
    opts = cfg.options
    betas = flows.beta_table(params.gamma, params.cutoff, limit=opts.get("limit_betas", False))
    report = flows.fixed_point_2d(betas, mode=opts.get("mode") or "ode", x0=params.lam, gamma=params.gamma,
                                  steps=opts["steps"], t_max=opts["t_max"])
    return CommandResult([report])


def cmd_counterterm(cfg: RunConfig, params: ModelParams) -> CommandResult:
    params = params.with_updates(d=3)
    steps = cfg.options["steps"]
    traj = flows.flow3d_Z(params, steps)
    h_bar = traj.states[0].h
    window = (h_bar - steps, h_bar)
    constant = cfg.options.get("constant_beta")
    if constant is not None:
        def hook(j, nu):
            return constant
    else:
        hook = flows.oneloop_nu_hook(traj, params)
    result = flows.nu_fixed_point(hook, params, window, tol=min(cfg.tol, 1e-10))
    rows = [{"h": h, "nu": result["nu"][h], "iterations": result["iterations"],
             "contraction_ratio": result["contraction_ratio"]} for h in sorted(result["nu"], reverse=True)]
    return CommandResult(rows)


def _fraction_text(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(value)


def cmd_powercount(cfg: RunConfig, params: ModelParams) -> CommandResult:
    rows, breaches = [], []
    source = cfg.options.get("input")
    if source:
        try:
            entries = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read power-counting input {source}: {e}")
        with open(config.POWERCOUNT_INPUT_SCHEMA_PATH) as f:
            schema = json.load(f)
        try:
            jsonschema.validate(instance=entries, schema=schema)
        except jsonschema.exceptions.ValidationError as e:
            raise ConfigError(f"Invalid power-counting input {source}: {e.message}")
        for entry in entries:
            ext = powercount.DiagramExternals(**entry["ext"])
            regime = powercount.Regime(entry["regime"]["d"], entry["regime"]["region"])
            info = powercount.classify(ext, regime)
            rows.append({**entry["ext"], "d": regime.d, "region": regime.region, "kind": info["kind"],
                         "delta": str(info["delta"]), "z": info["z"],
                         "effective_delta": _fraction_text(info["effective_delta"]),
                         "vanishes_by_parity": info["vanishes_by_parity"]})
        return CommandResult(rows)

    for name, table in powercount.FIGURE_TABLES.items():
        misprints = powercount.FIGURE_MISPRINTS.get(name, {})
        for legs, printed in table["values"].items():
            computed = powercount.figure_value(name, legs)
            rows.append({"figure": name, "n_l": legs[0], "n_t": legs[1], "printed": str(printed),
                         "computed": str(computed), "agrees": computed == printed})
            if computed != printed:
                breaches.append(f"{name}{legs}: printed {printed}, computed {computed}")
        for legs, printed in misprints.items():
            computed = powercount.figure_value(name, legs)
            rows.append({"figure": name, "n_l": legs[0], "n_t": legs[1], "printed": str(printed),
                         "computed": str(computed), "agrees": False})
    return CommandResult(rows, breaches)


def cmd_trees(cfg: RunConfig, params: ModelParams) -> CommandResult:
    max_n = cfg.options["max_n"]
    a = cfg.options["a"]
    h_range = range(-1, cfg.options["h_min"] - 1, -1)
    rows, breaches, all_trees = [], [], []
    for n in range(1, max_n + 1):
        shapes = trees.enumerate_unlabeled(n)
        all_trees.extend(shapes)
        expected = trees.count_series_reduced(n)
        rows.append({"n": n, "enumerated": len(shapes), "recursion": expected})
        if len(shapes) != expected:
            breaches.append(f"n={n}: enumerated {len(shapes)}, recursion {expected}")
    fit = trees.fit_tree_constant(all_trees, params.gamma, a, h_range)
    for row in rows:
        row["sup_scale_sum"] = fit["per_n"].get(row["n"])
        row["fitted_C"] = fit["C"]
    return CommandResult(rows, breaches)


def cmd_ward(cfg: RunConfig, params: ModelParams) -> CommandResult:
    h = cfg.options["h"]
    if params.d == 2:
        betas = flows.beta_table(params.gamma, params.cutoff)
        traj = flows.trajectory_2d(params, steps=cfg.options["steps"], betas=betas)
        reports = ward.run_ward_suite(params, h, betas=betas, traj=traj)
    else:
        traj, _ = flows.trajectory_3d(params, cfg.options["steps"])
        reports = ward.run_ward_suite(params, h, traj=traj)
        for p0 in (0.0, 0.3, 0.6):
            reports.append(ward.wi_A_quadrature(Momentum(p0, 0.2), h, params))
    rows = [r.to_dict() for r in reports]
    breaches = [r.name for r in reports if not r.passed]
    return CommandResult(rows, breaches)


def cmd_propagator_bounds(cfg: RunConfig, params: ModelParams) -> CommandResult:
    opts = cfg.options
    h_list = opts.get("h_list") or [floor_hbar_scale(params) - i for i in range(1, 6)]
    rows = propagators.propagator_bound_rows(params, h_list, opts["N_list"], opts["radius"], opts["pair"])
    breaches = [f"h={r['h']} N={r['N']} violation {r['max_violation']:.2f}"
                for r in rows if r["max_violation"] > propagators.BOUND_STABILITY]
    return CommandResult(rows, breaches)


COMMANDS: Dict[str, Callable[[RunConfig, ModelParams], CommandResult]] = {
    "thermo": cmd_thermo,
    "betas": cmd_betas,
    "flow2d": cmd_flow2d,
    "flow3d": cmd_flow3d,
    "fixedpoint": cmd_fixedpoint,
    "counterterm": cmd_counterterm,
    "powercount": cmd_powercount,
    "trees": cmd_trees,
    "ward": cmd_ward,
    "propagator-bounds": cmd_propagator_bounds,
}


# --- output ----------------------------------------------------------------------------

def format_value(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{config.CSV_SIGNIFICANT_DIGITS}g")
    if isinstance(value, (list, dict)):
        return json.dumps(value, default=str)
    return value


def render(rows: Sequence[Dict[str, Any]], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(list(rows), indent=2, default=str) + "\n"
    columns: List[str] = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: format_value(v) for k, v in row.items()})
    return buffer.getvalue()


def write_output(text: str, out: Optional[str]) -> None:
    if not out:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as e:
        raise ConfigError(f"Cannot write output {out}: {e}")
    logger.info(f"Wrote {out}")


# --- run ---------------------------------------------------------------------------------

def run(cfg: RunConfig) -> int:
    """Execute one configured run and emit its rows; returns the exit status."""
    command = COMMANDS[cfg.subcommand]
    logger.info(f"Running {cfg.subcommand}")
    if cfg.sweep is None:
        results = [(None, command(cfg, cfg.params))]
    else:
        field_name = SWEEP_NAMES[cfg.sweep.name]
        points = [cfg.params.with_updates(**{field_name: v}) for v in cfg.sweep.values()]
        with ThreadPoolExecutor(max_workers=config.THREADS) as pool:
            outputs = list(pool.map(lambda p: command(cfg, p), points))
        results = list(zip(cfg.sweep.values(), outputs))

    rows, breaches = [], []
    for value, result in results:
        for row in result.rows:
            rows.append(row if value is None else {cfg.sweep.name: value, **row})
        breaches.extend(result.breaches)
    write_output(render(rows, cfg.format), cfg.out)
    logger.info(f"{cfg.subcommand} finished with {len(rows)} rows")

    if breaches:
        for breach in breaches:
            logger.warning(f"Acceptance breach: {breach}")
        if cfg.strict:
            return EXIT_STRICT
    return EXIT_OK


def _int_list(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--strict", action="store_true", help="Exit with status 3 on acceptance breaches")
    common.add_argument("--tol", type=float, help="Relative quadrature tolerance")
    common.add_argument("--out", help="Output file (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--lambda", dest="lam", type=float, help="Interaction intensity")
    common.add_argument("--gamma", type=float, help="Scale ratio")
    common.add_argument("--d", type=int, choices=(1, 2, 3), help="Spatial dimension")
    common.add_argument("--rho0", type=float)
    common.add_argument("--R0", type=float)
    common.add_argument("--vhat0", type=float)
    common.add_argument("--cutoff", choices=("sharp", "smooth"))
    common.add_argument("--sweep", help="NAME:START:STOP:COUNT")

    parser = argparse.ArgumentParser(prog="rg-bose", description="Renormalization-group laboratory for the Bose gas")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    p = subparsers.add_parser("thermo", parents=[common], help="Bogoliubov thermodynamics")
    p.add_argument("--observable", choices=THERMO_OBSERVABLES, default="energy")
    p.add_argument("--lambda-sweep", dest="lambda_sweep", help="START:STOP:COUNT")
    p.add_argument("--beta", type=float, help="Inverse temperature for the depletion")
    p.add_argument("--ir-cutoff", dest="ir_cutoff", type=float)
    p.add_argument("--k-max", dest="k_max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=40)

    p = subparsers.add_parser("betas", parents=[common], help="One-loop beta integrals")
    p.add_argument("--profile", choices=("sharp", "smooth"), default="sharp")

    p = subparsers.add_parser("flow2d", parents=[common], help="2d (x, y) flow")
    p.add_argument("--mode", choices=flows.FIXED_POINT_MODES, default="recursion")
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--t-max", dest="t_max", type=float, default=40.0)
    p.add_argument("--limit-betas", dest="limit_betas", action="store_true")
    p.add_argument("--printed-sign", dest="printed_sign", action="store_true")

    p = subparsers.add_parser("flow3d", parents=[common], help="3d Z flow with WI-fixed couplings")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--variant", choices=flows.B_VARIANTS, default="propWI")

    p = subparsers.add_parser("fixedpoint", parents=[common], help="2d fixed point")
    p.add_argument("--mode", choices=flows.FIXED_POINT_MODES, default="ode")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--t-max", dest="t_max", type=float, default=40.0)
    p.add_argument("--limit-betas", dest="limit_betas", action="store_true")

    p = subparsers.add_parser("counterterm", parents=[common], help="Chemical-potential counterterm")
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--constant-beta", dest="constant_beta", type=float)

    p = subparsers.add_parser("powercount", parents=[common], help="Power counting")
    p.add_argument("--input", help="JSON list of {ext, regime} entries")

    p = subparsers.add_parser("trees", parents=[common], help="Tree counts and scale sums")
    p.add_argument("--max-n", dest="max_n", type=int, default=8)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--h-min", dest="h_min", type=int, default=-20)

    p = subparsers.add_parser("ward", parents=[common], help="Ward identity suite")
    p.add_argument("--h", type=int, default=-5)
    p.add_argument("--steps", type=int, default=100)

    p = subparsers.add_parser("propagator-bounds", parents=[common], help="Single-scale propagator bounds")
    p.add_argument("--h-list", dest="h_list", type=_int_list,
                   help="Scales to sample (default: five scales below the crossover)")
    p.add_argument("--N-list", dest="N_list", type=_int_list, default=[1, 2, 3])
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--pair", default="tt")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    try:
        cfg = build_run_config(args)
        return run(cfg)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except RGBoseError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
