"""Command-line front end: tabulate analytics, optimize, simulate, compare.

Every command emits CSV (stdout, or a file via --output). The file starts
with comment rows that echo the full merged run specification, so a run
can be reproduced from its own header: strip the leading "# " from each
header line, save the result as a config file, and re-invoke the recorded
command with --config pointing at it.

Parameter precedence is flag > config file > built-in default, where the
defaults are the reference operating point of :class:`SystemParams`.
Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace

from . import __version__
from .analytic import (
    avg_downlink_aoi,
    avg_uplink_aoi,
    data_rates,
    ts_equivalent_rho,
    weighted_sum_aoi,
)
from .model import SystemParams, derive_constants
from .optimizer import OptOptions, sweep_w
from .simulator import SimConfig, run_power_splitting, run_time_splitting

__all__ = ["main", "RunSpec", "build_parser", "load_config"]

_PARAM_KEYS = [f.name for f in fields(SystemParams)]
_FLOAT_KEYS = set(_PARAM_KEYS) | {"gen_prob", "tol", "boundary_eps", "rho_init"}
_INT_KEYS = {"num_blocks", "seed", "warmup_blocks", "replications", "max_iters"}
_STR_KEYS = {"snr_mode", "scheme"}
_GRID_KEYS = {"rho_grid", "w_grid", "p_grid"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS | _GRID_KEYS


@dataclass(frozen=True)
class RunSpec:
    """Fully merged inputs of one command invocation."""

    command: str
    params: SystemParams
    rho_grid: tuple[float, ...]
    w_grid: tuple[float, ...]
    p_grid: tuple[float, ...]
    num_blocks: int
    seed: int
    warmup_blocks: int
    snr_mode: str
    replications: int
    scheme: str
    gen_prob: float | None
    opt: OptOptions
    output: str | None


class _ValidationError(ValueError):
    pass


def _parse_scalar(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise _ValidationError(f"invalid value for {key}: {raw!r}") from None
    return raw


def _parse_grid(key: str, raw: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise _ValidationError(f"invalid value for {key}: {raw!r}") from None
    if not values:
        raise _ValidationError(f"{key} must contain at least one value")
    return values


def load_config(path: str) -> dict:
    """Parse a flat ``key = value`` config file; '#' starts a comment line."""
    merged = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise _ValidationError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in _ALL_KEYS:
                raise _ValidationError(f"{path}:{lineno}: unknown key {key!r}")
            merged[key] = _parse_grid(key, raw) if key in _GRID_KEYS else _parse_scalar(key, raw)
    return merged


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twoway-aoi",
        description="Age-of-information analytics, optimization, and simulation "
                    "for the power-splitting two-way exchange link.")
    parser.add_argument("--version", action="version", version=f"twoway-aoi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("analytic", "tabulate closed-form ages and rates over (rho, w) grids"),
        ("optimize", "optimal split ratio per weight over a w grid"),
        ("simulate", "Monte Carlo run of one scheme"),
        ("compare", "time-splitting vs power-splitting over a p grid"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="flat key = value config file")
        cmd.add_argument("--output", help="CSV output path (default: stdout)")
        for key in _PARAM_KEYS:
            cmd.add_argument(f"--{key.replace('_', '-')}", type=float, dest=key)
        for key in sorted(_GRID_KEYS):
            cmd.add_argument(f"--{key.replace('_', '-')}", dest=key,
                             help="comma-separated values")
        cmd.add_argument("--num-blocks", type=int, dest="num_blocks")
        cmd.add_argument("--seed", type=int, dest="seed")
        cmd.add_argument("--warmup-blocks", type=int, dest="warmup_blocks")
        cmd.add_argument("--snr-mode", choices=("exact", "linear"), dest="snr_mode")
        cmd.add_argument("--replications", type=int, dest="replications")
        cmd.add_argument("--scheme", choices=("power_split", "time_split"), dest="scheme")
        cmd.add_argument("--gen-prob", type=float, dest="gen_prob")
        cmd.add_argument("--rho-init", type=float, dest="rho_init")
        cmd.add_argument("--max-iters", type=int, dest="max_iters")
        cmd.add_argument("--tol", type=float, dest="tol")
        cmd.add_argument("--boundary-eps", type=float, dest="boundary_eps")
    return parser


_DEFAULTS = {
    "rho_grid": (0.5,),
    "w_grid": (0.5,),
    "p_grid": (0.01,),
    "num_blocks": 1_000_000,
    "seed": 0,
    "warmup_blocks": None,
    "snr_mode": "linear",
    "replications": 1,
    "scheme": "power_split",
    "gen_prob": None,
    "rho_init": 0.5,
    "max_iters": 100,
    "tol": 1e-12,
    "boundary_eps": 1e-4,
}


def merge_spec(args: argparse.Namespace) -> RunSpec:
    merged = dict(_DEFAULTS)
    merged.update({k: None for k in _PARAM_KEYS})
    if args.config:
        merged.update(load_config(args.config))
    for key in _ALL_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = _parse_grid(key, flag_value) if key in _GRID_KEYS and isinstance(flag_value, str) else flag_value

    param_overrides = {k: merged[k] for k in _PARAM_KEYS if merged[k] is not None}
    params = SystemParams(**param_overrides)
    opt = OptOptions(rho_init=merged["rho_init"], max_iters=merged["max_iters"],
                     tol=merged["tol"], boundary_eps=merged["boundary_eps"])
    num_blocks = merged["num_blocks"]
    warmup = merged["warmup_blocks"]
    if warmup is None:
        warmup = num_blocks // 100
    return RunSpec(
        command=args.command,
        params=params,
        rho_grid=tuple(merged["rho_grid"]),
        w_grid=tuple(merged["w_grid"]),
        p_grid=tuple(merged["p_grid"]),
        num_blocks=num_blocks,
        seed=merged["seed"],
        warmup_blocks=warmup,
        snr_mode=merged["snr_mode"],
        replications=merged["replications"],
        scheme=merged["scheme"],
        gen_prob=merged["gen_prob"],
        opt=opt,
        output=args.output,
    )


# ---------------------------------------------------------------------------
# output formatting


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _spec_header(spec: RunSpec) -> list[str]:
    lines = [f"## twoway-aoi {__version__}", f"## command: {spec.command}"]
    for key in _PARAM_KEYS:
        lines.append(f"# {key} = {getattr(spec.params, key)!r}")
    for key, grid in [("rho_grid", spec.rho_grid), ("w_grid", spec.w_grid),
                      ("p_grid", spec.p_grid)]:
        lines.append(f"# {key} = {','.join(repr(v) for v in grid)}")
    lines.append(f"# num_blocks = {spec.num_blocks}")
    lines.append(f"# seed = {spec.seed}")
    lines.append(f"# warmup_blocks = {spec.warmup_blocks}")
    lines.append(f"# snr_mode = {spec.snr_mode}")
    lines.append(f"# replications = {spec.replications}")
    lines.append(f"# scheme = {spec.scheme}")
    if spec.gen_prob is not None:
        lines.append(f"# gen_prob = {spec.gen_prob!r}")
    lines.append(f"# rho_init = {spec.opt.rho_init!r}")
    lines.append(f"# max_iters = {spec.opt.max_iters}")
    lines.append(f"# tol = {spec.opt.tol!r}")
    lines.append(f"# boundary_eps = {spec.opt.boundary_eps!r}")
    return lines


def _emit(spec: RunSpec, columns: list[str], rows: list[list]) -> None:
    lines = _spec_header(spec)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if spec.output is None:
        sys.stdout.write(text)
    else:
        try:
            with open(spec.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise _IoError(str(exc)) from exc


class _IoError(Exception):
    pass


def _hist_cell(hist: dict[int, int]) -> str:
    return "|".join(f"{j}:{c}" for j, c in sorted(hist.items()))


# ---------------------------------------------------------------------------
# commands


def cmd_analytic(spec: RunSpec) -> int:
    columns = ["rho", "w", "dl_aoi", "ul_aoi_renewal", "ul_aoi_literal",
               "weighted", "dl_rate", "ul_rate"]
    rows = []
    eta = spec.params.harvest_eff
    for rho in spec.rho_grid:
        loads = derive_constants(spec.params, rho)
        dl = avg_downlink_aoi(loads.dl_load)
        ul_renewal = avg_uplink_aoi(loads.ul_load, eta, "renewal")
        ul_literal = avg_uplink_aoi(loads.ul_load, eta, "literal")
        dl_rate, ul_rate = data_rates(spec.params, rho)
        for w in spec.w_grid:
            weighted = weighted_sum_aoi(spec.params, rho, w).weighted
            rows.append([rho, w, dl, ul_renewal, ul_literal, weighted, dl_rate, ul_rate])
    _emit(spec, columns, rows)
    return 0


def cmd_optimize(spec: RunSpec) -> int:
    points = sweep_w(spec.params, sorted(spec.w_grid), spec.opt)
    columns = ["w", "rho_star", "aoi_star", "method", "iterations"]
    rows = [[pt.w, pt.result.rho_star, pt.result.aoi_star, pt.result.method,
             pt.result.iterations] for pt in points]
    _emit(spec, columns, rows)
    failed = [pt.w for pt in points if not pt.result.converged]
    if failed:
        print(f"optimization failed to converge at w = {failed}", file=sys.stderr)
        return 2
    return 0


def _sim_config(spec: RunSpec, scheme: str, gen_prob: float | None) -> SimConfig:
    return SimConfig(
        num_blocks=spec.num_blocks,
        seed=spec.seed,
        warmup_blocks=spec.warmup_blocks,
        snr_mode=spec.snr_mode,
        replications=spec.replications,
        scheme=scheme,
        gen_prob=gen_prob,
    )


_SIM_COLUMNS = [
    "replication", "mean_dl_aoi", "mean_ul_aoi", "weighted_aoi", "dl_rate",
    "ul_rate", "std_error_dl_aoi", "std_error_ul_aoi", "blocks_simulated",
    "energy_block_fraction", "final_buffer_joules",
    "dl_service_hist", "ul_service_hist", "harvest_slot_hist",
]


def _sim_rows(spec: RunSpec, report) -> list[list]:
    w = spec.params.weight_uplink
    rows = []
    for i, rep in enumerate(report.per_replication):
        weighted = (1.0 - w) * rep.mean_dl_aoi + w * rep.mean_ul_aoi
        rows.append([i, rep.mean_dl_aoi, rep.mean_ul_aoi, weighted, rep.dl_rate,
                     rep.ul_rate, None, None, spec.num_blocks,
                     rep.energy_block_fraction, rep.final_buffer_joules,
                     None, None, None])
    rows.append(["aggregate", report.mean_dl_aoi, report.mean_ul_aoi,
                 report.weighted_aoi, report.dl_rate, report.ul_rate,
                 report.std_error_dl_aoi, report.std_error_ul_aoi,
                 report.blocks_simulated, report.energy_block_fraction, None,
                 _hist_cell(report.dl_service_hist),
                 _hist_cell(report.ul_service_hist),
                 _hist_cell(report.harvest_slot_hist)])
    return rows


def cmd_simulate(spec: RunSpec) -> int:
    if spec.scheme == "time_split":
        if spec.gen_prob is None:
            raise _ValidationError("gen_prob is required when scheme = time_split")
        report = run_time_splitting(
            spec.params, spec.gen_prob, _sim_config(spec, "time_split", spec.gen_prob))
    else:
        report = run_power_splitting(
            spec.params, spec.params.split_ratio, _sim_config(spec, "power_split", None))
    _emit(spec, _SIM_COLUMNS, _sim_rows(spec, report))
    return 0


def cmd_compare(spec: RunSpec) -> int:
    theta = spec.params.theta
    w = spec.params.weight_uplink
    columns = ["p", "rho_ts", "R_ps", "R_ts", "aoi_ps", "aoi_ts"]
    rows = []
    for p in spec.p_grid:
        rho_ts = ts_equivalent_rho(p, theta)
        ts = run_time_splitting(spec.params, p, _sim_config(spec, "time_split", p))
        ps_params = replace(spec.params, split_ratio=rho_ts)
        ps = run_power_splitting(ps_params, rho_ts, _sim_config(spec, "power_split", None))
        r_ps = (1.0 - w) * ps.dl_rate + w * ps.ul_rate
        r_ts = (1.0 - w) * ts.dl_rate + w * ts.ul_rate
        rows.append([p, rho_ts, r_ps, r_ts, ps.weighted_aoi, ts.weighted_aoi])
    _emit(spec, columns, rows)
    return 0


_COMMANDS = {
    "analytic": cmd_analytic,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = merge_spec(args)
        return _COMMANDS[args.command](spec)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (_ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
