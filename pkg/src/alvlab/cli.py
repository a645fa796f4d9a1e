"""Command-line driver.

Subcommands: payoffs, stability, trajectory, phase, simulate, oracle.
Exit codes: 0 success, 1 validation/usage error, 2 numerical-contract
breach. Parameter precedence: flags > config file > defaults; every run
echoes its effective configuration (to a JSON sidecar next to --out, or to
stdout for print-only commands). Randomized commands require an explicit
--seed; nothing falls back to wall-clock entropy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import agentsim, dynamics, master, networks, phase
from ._kernels import BACKEND
from .quantum import GAMMA_MAX, PayoffTable, Strategy, payoff_matrix_from_circuit
from .rng import derive_seed

PAYOFF_DEVIATION_LIMIT = 1e-8
TOPOLOGIES = ("lattice", "smallworld", "er")
_SERIES_STREAM = 3  # decorrelates the optional series run from scan seeds

_REQUIRED = object()


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract reserves 2 for
    numerical breaches, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _p(name, typ, default, help_text, choices=None):
    return {"name": name, "type": typ, "default": default,
            "help": help_text, "choices": choices}


_TABLE_PARAMS = [
    _p("r", float, None, "one-parameter family: T=1+r, R=1, P=0, S=-r"),
    _p("T", float, None, "temptation payoff (use with --R --P --S)"),
    _p("R", float, None, "reward payoff"),
    _p("P", float, None, "punishment payoff"),
    _p("S", float, None, "sucker payoff"),
]

PARAMS = {
    "payoffs": [
        _p("gamma", float, _REQUIRED, "entanglement angle in [0, pi/2]"),
        *_TABLE_PARAMS,
    ],
    "stability": [
        _p("gamma", float, _REQUIRED, "entanglement angle in [0, pi/2]"),
        *_TABLE_PARAMS,
        _p("temp", float, dynamics.DEFAULT_TEMP, "selection temperature"),
    ],
    "trajectory": [
        _p("gamma", float, _REQUIRED, "entanglement angle in [0, pi/2]"),
        *_TABLE_PARAMS,
        _p("rho0", str, "1/3,1/3,1/3", "initial densities rho_C,rho_D,rho_Q"),
        _p("temp", float, dynamics.DEFAULT_TEMP, "selection temperature"),
        _p("t_end", float, dynamics.DEFAULT_T_END, "integration horizon"),
        _p("dt", float, dynamics.DEFAULT_DT, "RK4 step"),
        _p("record_stride", int, 1, "record every k-th step"),
        _p("out", str, _REQUIRED, "trajectory CSV path"),
    ],
    "phase": [
        _p("gamma_min", float, 0.0, "gamma axis start"),
        _p("gamma_max", float, 0.78, "gamma axis end"),
        _p("gamma_steps", int, 61, "gamma axis points"),
        _p("r_min", float, 0.05, "r axis start (must be > 0)"),
        _p("r_max", float, 3.0, "r axis end"),
        _p("r_steps", int, 61, "r axis points"),
        _p("rho0", str, "1/3,1/3,1/3", "initial densities per cell"),
        _p("temp", float, dynamics.DEFAULT_TEMP, "selection temperature"),
        _p("t_end", float, dynamics.DEFAULT_T_END, "integration horizon"),
        _p("dt", float, dynamics.DEFAULT_DT, "RK4 step"),
        _p("workers", int, None, "process count (default: cpu count)"),
        _p("out", str, _REQUIRED, "phase grid CSV path"),
    ],
    "simulate": [
        _p("topology", str, _REQUIRED, "network kind", choices=TOPOLOGIES),
        _p("side", int, 50, "lattice/smallworld side length"),
        _p("nodes", int, 2500, "er node count"),
        _p("rewire_p", float, 0.01, "smallworld rewiring probability"),
        _p("avg_degree", float, 4.0, "er average degree"),
        *_TABLE_PARAMS,
        _p("gamma_min", float, 0.3, "gamma axis start"),
        _p("gamma_max", float, 1.0, "gamma axis end"),
        _p("gamma_steps", int, 15, "gamma axis points"),
        _p("temp", float, dynamics.DEFAULT_TEMP, "selection temperature"),
        _p("steps", int, 10_000, "sweeps per run"),
        _p("replicates", int, 3, "independent runs per gamma"),
        _p("measure_window", int, 1_000, "tail sweeps averaged"),
        _p("payoff_mode", str, "sum", "neighbor payoff aggregation",
           choices=agentsim.PAYOFF_MODES),
        _p("rho0", str, "1/3,1/3,1/3", "initial strategy fractions"),
        _p("seed", int, _REQUIRED, "base seed (runs are deterministic)"),
        _p("workers", int, None, "process count (default: cpu count)"),
        _p("out", str, _REQUIRED, "scan CSV path"),
        _p("series_out", str, None, "optional per-sweep series CSV"),
        _p("series_gamma", float, None, "gamma for the series run"),
    ],
    "oracle": [
        _p("N", int, _REQUIRED, "population size (1..40)"),
        _p("gamma", float, _REQUIRED, "entanglement angle in [0, pi/2]"),
        *_TABLE_PARAMS,
        _p("temp", float, dynamics.DEFAULT_TEMP, "selection temperature"),
        _p("t_end", float, 5.0, "master-equation horizon (fast time units)"),
        _p("dt", float, None, "RK4 step (default: auto from max outflow)"),
        _p("record_stride", int, 10, "record every k-th step"),
        _p("init", str, None, "initial configuration n_C,n_D,n_Q "
                              "(default: balanced split)"),
        _p("out", str, _REQUIRED, "mean-occupation CSV path"),
    ],
}


def build_parser() -> _Parser:
    parser = _Parser(prog="alvlab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    descriptions = {
        "payoffs": "compare the circuit payoff matrix with its closed form",
        "stability": "classify the three vertex fixed points",
        "trajectory": "integrate one mean-field trajectory to CSV",
        "phase": "sweep the (gamma, r) phase diagram to CSV + boundary JSON",
        "simulate": "agent-based bifurcation scan on a network",
        "oracle": "exact master-equation run + mean-field dominance verdict",
    }
    for command, entries in PARAMS.items():
        sp = sub.add_parser(command, help=descriptions[command])
        sp.add_argument("--config", type=str, default=None,
                        help="key=value file; flags take precedence")
        for p in entries:
            flag = "--" + p["name"].replace("_", "-")
            sp.add_argument(flag, dest=p["name"], type=p["type"],
                            default=None, choices=p["choices"], help=p["help"])
    return parser


def _load_config_file(path) -> dict:
    if not os.path.exists(path):
        raise ValueError(f"config file not found: {path}")
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _effective_config(command: str, args) -> dict:
    file_values = _load_config_file(args.config) if args.config else {}
    cfg = {}
    for p in PARAMS[command]:
        name, typ = p["name"], p["type"]
        flag_value = getattr(args, name)
        if flag_value is not None:
            file_values.pop(name, None)  # flag wins over the file value
            cfg[name] = flag_value
        elif name in file_values:
            raw = file_values.pop(name)
            try:
                value = typ(raw)
            except ValueError:
                raise ValueError(
                    f"config key {name}: cannot parse {raw!r} as {typ.__name__}")
            if p["choices"] and value not in p["choices"]:
                raise ValueError(
                    f"config key {name}: {value!r} not in {p['choices']}")
            cfg[name] = value
        elif p["default"] is _REQUIRED:
            raise ValueError(f"{command} requires --{name.replace('_', '-')}")
        else:
            cfg[name] = p["default"]
    if file_values:
        unknown = ", ".join(sorted(file_values))
        raise ValueError(f"config keys not used by {command}: {unknown}")
    return cfg


def _resolve_table(cfg) -> PayoffTable:
    trps = [cfg.get(k) for k in ("T", "R", "P", "S")]
    given = [v is not None for v in trps]
    if any(given):
        if not all(given):
            raise ValueError("provide all of --T --R --P --S together")
        if cfg.get("r") is not None:
            raise ValueError("--r conflicts with an explicit --T --R --P --S table")
        return PayoffTable(T=trps[0], R=trps[1], P=trps[2], S=trps[3])
    if cfg.get("r") is None:
        raise ValueError("provide --r or all of --T --R --P --S")
    return phase.GameFamily(cfg["r"]).table


def _parse_one_fraction(piece: str) -> float:
    if "/" in piece:
        num, den = piece.split("/", 1)
        return float(num) / float(den)
    return float(piece)


def _parse_fractions(text: str, what: str) -> np.ndarray:
    try:
        parts = [_parse_one_fraction(p) for p in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{what} must be three comma-separated numbers, got {text!r}")
    if len(parts) != 3:
        raise ValueError(f"{what} must have three components, got {text!r}")
    return np.asarray(parts, dtype=float)


def _effective_workers(cfg) -> int:
    w = cfg.get("workers")
    if w is None:
        w = os.cpu_count() or 1
    if w < 1:
        raise ValueError(f"workers must be >= 1, got {w}")
    return w


def _echo_config(command: str, cfg: dict) -> None:
    payload = {"command": command, "backend": BACKEND}
    payload.update({k: v for k, v in sorted(cfg.items())})
    out = cfg.get("out")
    if out:
        sidecar = os.path.splitext(out)[0] + ".config.json"
        with open(sidecar, "w", newline="") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    else:
        print("effective-config: " + json.dumps(payload, sort_keys=True))


_NAMES = ("C", "D", "Q")


def _print_matrix(title: str, m: np.ndarray) -> None:
    print(title)
    print("        " + "".join(f"{n:>18}" for n in _NAMES))
    for i, n in enumerate(_NAMES):
        print(f"  vs {n}  " + "".join(f"{m[i, k]:18.12f}" for k in range(3)))


def cmd_payoffs(cfg) -> int:
    table = _resolve_table(cfg)
    circuit = payoff_matrix_from_circuit(cfg["gamma"], table)
    analytic = phase.effective_payoff_matrix(table, cfg["gamma"])
    deviation = float(np.max(np.abs(circuit - analytic)))
    _echo_config("payoffs", cfg)
    _print_matrix("circuit payoff matrix (row = own strategy):", circuit)
    _print_matrix("closed-form payoff matrix:", analytic)
    print(f"max deviation: {deviation:.3e}")
    if deviation >= PAYOFF_DEVIATION_LIMIT:
        print(f"error: circuit deviates from the closed form by {deviation:.3e} "
              f">= {PAYOFF_DEVIATION_LIMIT:.0e}", file=sys.stderr)
        return 2
    return 0


def cmd_stability(cfg) -> int:
    table = _resolve_table(cfg)
    payoff_fn = phase.meanfield_dynamics(table, cfg["gamma"])
    _echo_config("stability", cfg)
    for report in dynamics.classify_fixed_points(payoff_fn, cfg["temp"]):
        e = report.eigenvalues
        print(f"vertex {report.vertex.name}: eigenvalues "
              f"({e[0]:+.6f}, {e[1]:+.6f}, {e[2]:+.6f}) -> {report.classification}")
    return 0


def cmd_trajectory(cfg) -> int:
    table = _resolve_table(cfg)
    rho0 = _parse_fractions(cfg["rho0"], "rho0")
    result = dynamics.integrate(
        rho0, phase.meanfield_dynamics(table, cfg["gamma"]), temp=cfg["temp"],
        t_end=cfg["t_end"], dt=cfg["dt"], record_stride=cfg["record_stride"])
    dynamics.write_trajectory_csv(cfg["out"], result)
    _echo_config("trajectory", cfg)
    rho = result.final_state
    print(f"wrote {cfg['out']} ({len(result.t)} rows)")
    print(f"stopped at t={result.t[-1]:.6g} ({result.reason}); final state "
          f"rho=({rho[0]:.6f}, {rho[1]:.6f}, {rho[2]:.6f})")
    return 0


def cmd_phase(cfg) -> int:
    for key in ("gamma_steps", "r_steps"):
        if cfg[key] < 1:
            raise ValueError(f"{key} must be >= 1, got {cfg[key]}")
    if cfg["r_min"] <= 0:
        raise ValueError(f"r_min must be > 0, got {cfg['r_min']}")
    gamma_axis = np.linspace(cfg["gamma_min"], cfg["gamma_max"], cfg["gamma_steps"])
    r_axis = np.linspace(cfg["r_min"], cfg["r_max"], cfg["r_steps"])
    grid = phase.sweep_phase_diagram(
        gamma_axis, r_axis, rho0=_parse_fractions(cfg["rho0"], "rho0"),
        temp=cfg["temp"], t_end=cfg["t_end"], dt=cfg["dt"],
        workers=_effective_workers(cfg))
    phase.write_phase_csv(cfg["out"], grid)
    boundary_path = os.path.splitext(cfg["out"])[0] + "_boundary.json"
    omitted = phase.write_boundary_json(boundary_path, gamma_axis)
    _echo_config("phase", cfg)
    n_cells = grid.converged.size
    print(f"wrote {cfg['out']} ({n_cells} cells, "
          f"{int(grid.converged.sum())} converged)")
    note = f", {omitted} gamma values >= pi/4 omitted" if omitted else ""
    print(f"wrote {boundary_path}{note}")
    return 0


def _net_builder(cfg):
    topology = cfg["topology"]
    if topology == "lattice":
        return lambda seed: networks.build_square_lattice(cfg["side"])
    if topology == "smallworld":
        return lambda seed: networks.build_small_world(
            cfg["side"], cfg["rewire_p"], seed)
    if topology == "er":
        return lambda seed: networks.build_erdos_renyi(
            cfg["nodes"], cfg["avg_degree"], seed)
    raise ValueError(f"unknown topology {topology!r}; choose from {TOPOLOGIES}")


def cmd_simulate(cfg) -> int:
    table = _resolve_table(cfg)
    builder = _net_builder(cfg)
    rho0 = _parse_fractions(cfg["rho0"], "rho0")
    if cfg["gamma_steps"] < 1:
        raise ValueError(f"gamma_steps must be >= 1, got {cfg['gamma_steps']}")
    gamma_axis = np.linspace(cfg["gamma_min"], cfg["gamma_max"], cfg["gamma_steps"])
    params = agentsim.SimParams(
        table=table, gamma=float(gamma_axis[0]), temp=cfg["temp"],
        steps=cfg["steps"], payoff_mode=cfg["payoff_mode"],
        measure_window=cfg["measure_window"])
    scan = agentsim.bifurcation_scan(
        builder, params, gamma_axis, cfg["replicates"], cfg["seed"],
        rho0_fractions=rho0, workers=_effective_workers(cfg))
    agentsim.write_scan_csv(cfg["out"], scan)
    _echo_config("simulate", cfg)
    print(f"wrote {cfg['out']} ({len(gamma_axis)} gamma points x "
          f"{cfg['replicates']} replicates)")
    if scan.gamma_hat is None:
        print("crossing: no crossing (sign of rho_Q - rho_D never changes)")
    else:
        print(f"crossing: gamma_hat = {scan.gamma_hat:.6f}")

    if cfg["series_out"]:
        if cfg["series_gamma"] is None:
            raise ValueError("--series-out requires --series-gamma")
        from dataclasses import replace
        net = builder(derive_seed(cfg["seed"], 1, 0))
        result = agentsim.run_experiment(
            net, replace(params, gamma=cfg["series_gamma"]), rho0,
            derive_seed(cfg["seed"], _SERIES_STREAM))
        agentsim.write_series_csv(cfg["series_out"], result)
        print(f"wrote {cfg['series_out']} ({params.steps + 1} rows)")
    return 0


def _balanced_configuration(n_total: int) -> tuple[int, int, int]:
    base, rem = divmod(n_total, 3)
    return (base + (1 if rem > 0 else 0), base + (1 if rem > 1 else 0), base)


def cmd_oracle(cfg) -> int:
    table = _resolve_table(cfg)
    n_total = cfg["N"]
    if cfg["init"] is not None:
        counts = tuple(int(v) for v in cfg["init"].split(","))
        if len(counts) != 3:
            raise ValueError(f"init must be n_C,n_D,n_Q, got {cfg['init']!r}")
    else:
        counts = _balanced_configuration(n_total)
    q0 = master.point_distribution(n_total, counts)
    traj = master.evolve_distribution(
        q0, n_total, table, cfg["gamma"], temp=cfg["temp"],
        t_end=cfg["t_end"], dt=cfg["dt"], record_stride=cfg["record_stride"])
    master.write_occupation_csv(cfg["out"], traj)
    _echo_config("oracle", cfg)

    final_mean = traj.mean_trajectory()[-1]
    dominant = Strategy(int(np.argmax(final_mean)))
    meanfield = dynamics.integrate(
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        phase.meanfield_dynamics(table, cfg["gamma"]), temp=cfg["temp"])
    mf_dominant = Strategy(int(np.argmax(meanfield.final_state)))
    print(f"wrote {cfg['out']} ({len(traj.t)} rows)")
    print(f"final mean occupation: ({final_mean[0]:.6f}, {final_mean[1]:.6f}, "
          f"{final_mean[2]:.6f})")
    if dominant == mf_dominant:
        print(f"verdict: {dominant.name} dominant, agrees with mean field")
        return 0
    print(f"verdict: {dominant.name} dominant, mean field predicts "
          f"{mf_dominant.name}", file=sys.stderr)
    return 2


DISPATCH = {
    "payoffs": cmd_payoffs,
    "stability": cmd_stability,
    "trajectory": cmd_trajectory,
    "phase": cmd_phase,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _effective_config(args.command, args)
        return DISPATCH[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (dynamics.IntegrationError, master.ProbabilityLeakError) as exc:
        print(f"numerical contract breach: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
