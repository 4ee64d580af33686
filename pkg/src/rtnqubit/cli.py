"""Command-line front end: figure data, parameter sweeps, MC validation.

Every command writes CSV payloads (17 significant digits, so the binary
doubles round-trip exactly) plus a JSON manifest recording the resolved
configuration, RNG algorithm, seed and SHA-256 checksums of the outputs.
Numeric payloads are byte-identical across reruns with the same seed and
across thread counts.

Configuration precedence: command-line flags override values from the
INI-style ``--config`` file (section ``[common]`` plus one section per
command), which override built-in defaults mirroring the figure
parameters.  Exit codes: 0 success, 1 invalid configuration, 2
validation failure.  Setting ``RTNQUBIT_SINGLE_THREAD=1`` forces
single-threaded execution regardless of ``--threads``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .dynamics import (
    RateGrid,
    negativity_bell_closed_form,
    revival_scan,
)
from .errors import HorizonError, ParameterError, StateError
from .montecarlo import (
    RNG_ALGORITHM,
    TrajectoryConfig,
    available_backends,
    mc_characteristic,
)
from .noise import EnvironmentTopology, SwitchingRates, lambda_unbalanced
from .nonmarkov import TimeGrid, nm_surface
from .teleport import (
    InputPureState,
    average_fidelity_one_sided,
    average_fidelity_profile,
    dephasing_factor,
    fidelity_advantage_region,
    fidelity_closed_form,
    output_fidelity,
    sphere_average_fidelity,
    teleport_protocol_oracle,
)

_DEFAULTS: dict[str, dict] = {
    "common": {
        "out": "out",
        "seed": 12345,
        "threads": 1,
        "backend": "",
        "grid_step": 0.05,
        "grid_min": 0.05,
        "grid_max": 10.0,
        "horizon": 20.0,
        "time_step": 0.01,
    },
    "lambda": {"n": 2.0, "gamma0": 1.0, "gamma1": 1.0, "balanced": False},
    "negativity": {"topology": "both", "gamma0_presets": "0.1,1,10"},
    "revivals": {},
    "nonmarkov": {"end": 10.0, "time_step": 1e-3},
    "teleport": {"gamma0_presets": "0.1,1,10,30", "two_sided": False},
    "validate": {
        "draws": 100,
        "trajectories": 100000,
        "neg_draws": 200,
        "teleport_draws": 50,
        "quadrature_draws": 3,
        "inject_lambda_offset": 0.0,
    },
}

_BOOL_KEYS = {"balanced", "two_sided"}
_INT_KEYS = {"seed", "threads", "draws", "trajectories", "neg_draws",
             "teleport_draws", "quadrature_draws"}
_STR_KEYS = {"out", "backend", "topology", "gamma0_presets"}


def _coerce(key: str, raw):
    if key in _BOOL_KEYS:
        if isinstance(raw, bool):
            return raw
        return str(raw).strip().lower() in ("1", "true", "yes", "on")
    if key in _INT_KEYS:
        return int(float(raw))
    if key in _STR_KEYS:
        return str(raw)
    return float(raw)


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config-file values and CLI flags (flags win)."""
    merged = dict(_DEFAULTS["common"])
    merged.update(_DEFAULTS.get(command, {}))
    path = getattr(args, "config", None)
    if path:
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise ParameterError(f"config: cannot read file {path!r}")
        for section in ("common", command):
            if parser.has_section(section):
                for key, raw in parser.items(section):
                    key = key.replace("-", "_")
                    if key not in merged:
                        raise ParameterError(f"config: unknown key {key!r} in [{section}]")
                    try:
                        merged[key] = _coerce(key, raw)
                    except ValueError:
                        raise ParameterError(
                            f"config: bad value {raw!r} for key {key!r}"
                        ) from None
    for key in merged:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = _coerce(key, value)
    _validate_config(command, merged)
    return merged


def _validate_config(command: str, cfg: dict) -> None:
    def positive(key):
        if not (math.isfinite(cfg[key]) and cfg[key] > 0):
            raise ParameterError(f"{key} must be positive, got {cfg[key]}")

    for key in ("grid_step", "grid_min", "grid_max", "horizon", "time_step"):
        positive(key)
    if cfg["grid_max"] < cfg["grid_min"]:
        raise ParameterError("grid_max must not be smaller than grid_min")
    if cfg["threads"] < 1:
        raise ParameterError(f"threads must be at least 1, got {cfg['threads']}")
    if cfg["backend"] and cfg["backend"] not in available_backends():
        raise ParameterError(
            f"backend must be one of {available_backends()}, got {cfg['backend']!r}"
        )
    if command == "lambda":
        if cfg["gamma0"] < 0 or cfg["gamma1"] < 0 or cfg["gamma0"] + cfg["gamma1"] == 0:
            raise ParameterError("gamma0/gamma1 must be nonnegative, not both zero")
        if cfg["balanced"] and cfg["gamma0"] != cfg["gamma1"]:
            raise ParameterError("balanced requires gamma0 == gamma1")
    if command == "negativity" and cfg["topology"] not in ("ie", "ce", "both"):
        raise ParameterError(f"topology must be ie, ce or both, got {cfg['topology']!r}")
    if command == "nonmarkov":
        positive("end")
    if command == "validate":
        for key in ("draws", "trajectories", "neg_draws", "teleport_draws"):
            if cfg[key] < 1:
                raise ParameterError(f"{key} must be at least 1, got {cfg[key]}")


def _effective_threads(cfg: dict) -> int:
    if os.environ.get("RTNQUBIT_SINGLE_THREAD", "") not in ("", "0"):
        return 1
    return cfg["threads"]


def _fmt_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _rate_tag(value: float) -> str:
    text = format(float(value), "g").replace("-", "m").replace(".", "p")
    return text


class OutputWriter:
    """Collects CSV outputs and finalizes them into a manifest."""

    def __init__(self, command: str, cfg: dict):
        self.command = command
        self.cfg = cfg
        self.outdir = cfg["out"]
        self.started = datetime.datetime.now(datetime.timezone.utc)
        self.outputs: list[str] = []
        os.makedirs(self.outdir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.outdir, name)

    def write_csv(self, name: str, header: list[str], rows) -> str:
        path = self.path(name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt_value(v) for v in row])
        self.outputs.append(name)
        return path

    def write_text(self, name: str, text: str) -> str:
        path = self.path(name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        self.outputs.append(name)
        return path

    def finalize(self, backend: str, threads: int) -> str:
        entries = []
        for name in self.outputs:
            payload = open(self.path(name), "rb").read()
            entries.append(
                {
                    "path": name,
                    "sha256": hashlib.sha256(payload).hexdigest(),
                    "bytes": len(payload),
                }
            )
        manifest = {
            "tool": "rtnqubit",
            "version": __version__,
            "command": self.command,
            "config": {k: self.cfg[k] for k in sorted(self.cfg)},
            "trajectory_rng": RNG_ALGORITHM,
            "parameter_rng": "numpy-pcg64",
            "backend": backend,
            "threads": threads,
            "started_utc": self.started.isoformat(),
            "finished_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "outputs": entries,
        }
        path = self.path(f"manifest_{self.command}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
        return path


def _tau_grid(horizon: float, step: float) -> np.ndarray:
    n = int(math.floor(horizon / step + 1e-9)) + 1
    return step * np.arange(n)


def _rate_grid(cfg: dict) -> RateGrid:
    return RateGrid(cfg["grid_min"], cfg["grid_max"], cfg["grid_step"])


def _presets(cfg: dict) -> list[float]:
    try:
        values = [float(tok) for tok in str(cfg["gamma0_presets"]).split(",") if tok.strip()]
    except ValueError:
        raise ParameterError(
            f"gamma0_presets: bad list {cfg['gamma0_presets']!r}"
        ) from None
    if not values or any(v <= 0 for v in values):
        raise ParameterError("gamma0_presets must be a comma list of positive rates")
    return values


def cmd_lambda(cfg: dict) -> int:
    out = OutputWriter("lambda", cfg)
    rates = SwitchingRates(cfg["gamma0"], cfg["gamma1"])
    taus = _tau_grid(cfg["horizon"], cfg["time_step"])
    values = lambda_unbalanced(cfg["n"], rates, taus)
    name = (
        f"lambda_n{_rate_tag(cfg['n'])}"
        f"_g0{_rate_tag(cfg['gamma0'])}_g1{_rate_tag(cfg['gamma1'])}.csv"
    )
    rows = zip(taus, values.real, values.imag, np.abs(values))
    out.write_csv(name, ["tau", "re_lambda", "im_lambda", "abs_lambda"], rows)
    out.finalize(backend="-", threads=1)
    return 0


def cmd_negativity(cfg: dict) -> int:
    out = OutputWriter("negativity", cfg)
    taus = _tau_grid(cfg["horizon"], cfg["time_step"])
    gamma1s = _rate_grid(cfg).values
    topologies = {
        "ie": EnvironmentTopology.INDEPENDENT,
        "ce": EnvironmentTopology.COMMON,
    }
    wanted = ("ie", "ce") if cfg["topology"] == "both" else (cfg["topology"],)
    for tag in wanted:
        topo = topologies[tag]
        for g0 in _presets(cfg):
            def rows():
                for g1 in gamma1s:
                    curve = negativity_bell_closed_form(
                        topo, SwitchingRates(g0, g1), taus
                    )
                    yield from zip(taus, np.full_like(taus, g1), curve)

            out.write_csv(
                f"fig1_{tag}_g0{_rate_tag(g0)}.csv",
                ["tau", "gamma1", "negativity"],
                rows(),
            )
    out.finalize(backend="-", threads=_effective_threads(cfg))
    return 0


def cmd_revivals(cfg: dict) -> int:
    out = OutputWriter("revivals", cfg)
    threads = _effective_threads(cfg)
    grid = _rate_grid(cfg)
    ie = revival_scan(
        EnvironmentTopology.INDEPENDENT,
        grid,
        horizon=cfg["horizon"],
        time_step=cfg["time_step"],
        threads=threads,
    )
    ce = revival_scan(
        EnvironmentTopology.COMMON,
        grid,
        horizon=cfg["horizon"],
        time_step=cfg["time_step"],
        threads=threads,
    )
    gammas = grid.values

    def rows():
        for i, g0 in enumerate(gammas):
            for j, g1 in enumerate(gammas):
                yield g0, g1, ie.flags[i, j], ce.flags[i, j]

    out.write_csv(
        "fig2_revivals.csv", ["gamma0", "gamma1", "ie_revival", "ce_revival"], rows()
    )
    out.finalize(backend="-", threads=threads)
    return 0


def cmd_nonmarkov(cfg: dict) -> int:
    out = OutputWriter("nonmarkov", cfg)
    threads = _effective_threads(cfg)
    gammas = _rate_grid(cfg).values
    surface = nm_surface(gammas, end=cfg["end"], step=cfg["time_step"], threads=threads)

    def rows():
        for i, g0 in enumerate(gammas):
            for j, g1 in enumerate(gammas):
                yield g0, g1, surface[i, j]

    out.write_csv("fig3_nonmarkov.csv", ["gamma0", "gamma1", "nm"], rows())
    out.finalize(backend="-", threads=threads)
    return 0


def cmd_teleport(cfg: dict) -> int:
    out = OutputWriter("teleport", cfg)
    taus = _tau_grid(cfg["horizon"], cfg["time_step"])
    gamma1s = _rate_grid(cfg).values
    two_sided = bool(cfg["two_sided"])
    for g0 in _presets(cfg):
        fid = np.stack(
            [
                average_fidelity_profile(SwitchingRates(g0, g1), taus, two_sided)
                for g1 in gamma1s
            ]
        )
        advantage = fidelity_advantage_region(g0, gamma1s, taus, two_sided)

        def surface_rows(table):
            for i, g1 in enumerate(gamma1s):
                for j, tau in enumerate(taus):
                    yield tau, g1, table[i, j]

        tag = _rate_tag(g0)
        out.write_csv(
            f"fig4_fid_g0{tag}.csv", ["tau", "gamma1", "f_av"], surface_rows(fid)
        )
        out.write_csv(
            f"fig4_adv_g0{tag}.csv",
            ["tau", "gamma1", "advantage"],
            surface_rows(advantage),
        )
    out.finalize(backend="-", threads=_effective_threads(cfg))
    return 0


def _run_validation(cfg: dict) -> tuple[str, bool]:
    """Randomized differential checks; returns (report text, all passed)."""
    threads = _effective_threads(cfg)
    backend = cfg["backend"] or None
    rng = np.random.default_rng(cfg["seed"])
    offset = float(cfg["inject_lambda_offset"])
    lines = [
        f"rtnqubit validation report (version {__version__})",
        f"seed = {cfg['seed']}",
        f"trajectory_rng = {RNG_ALGORITHM}",
        f"backend = {cfg['backend'] or 'auto'}",
        "",
    ]
    all_ok = True

    # closed form vs Monte-Carlo characteristic function
    draws = cfg["draws"]
    trajectories = cfg["trajectories"]
    required = draws - max(1, draws // 100)
    passed = 0
    for i in range(draws):
        n = float(rng.choice([2.0, 4.0]))
        g0, g1 = rng.uniform(0.1, 10.0, size=2)
        tau = rng.uniform(0.1, 5.0)
        rates = SwitchingRates(g0, g1)
        analytic = lambda_unbalanced(n, rates, tau) + offset
        config = TrajectoryConfig(trajectories, int(rng.integers(2**63)), tau)
        estimate, se = mc_characteristic(
            n, rates, tau, config, threads=threads, backend=backend
        )
        ok = abs(analytic - estimate) <= 3.0 * se
        passed += ok
        lines.append(
            f"check=mc_lambda draw={i:03d} n={n:g} g0={g0:.6f} g1={g1:.6f} "
            f"tau={tau:.6f} diff={abs(analytic - estimate):.6e} "
            f"limit={3.0 * se:.6e} {'pass' if ok else 'FAIL'}"
        )
    ok = passed >= required
    all_ok &= ok
    lines.append(
        f"check=mc_lambda passed={passed}/{draws} required={required} "
        f"{'PASS' if ok else 'FAIL'}"
    )
    lines.append("")

    # negativity: eigen-decomposition vs closed form
    from .dynamics import BellMixture, evolve_state, negativity

    worst = 0.0
    topologies = list(EnvironmentTopology)
    for i in range(cfg["neg_draws"]):
        rates = SwitchingRates(*rng.uniform(0.1, 10.0, size=2))
        tau = rng.uniform(0.0, 5.0)
        topo = topologies[i % len(topologies)]
        k = int(rng.integers(4))
        rho = evolve_state(BellMixture.bell(k), topo, rates, tau)
        closed = negativity_bell_closed_form(topo, rates, tau, k)
        worst = max(worst, abs(negativity(rho) - closed))
    ok = worst <= 1e-10
    all_ok &= ok
    lines.append(
        f"check=negativity_eigen draws={cfg['neg_draws']} max_err={worst:.6e} "
        f"tol=1e-10 {'PASS' if ok else 'FAIL'}"
    )

    # teleportation: three-qubit oracle vs closed-form fidelity
    worst = 0.0
    for _ in range(cfg["teleport_draws"]):
        state = InputPureState(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        rates = SwitchingRates(*rng.uniform(0.1, 10.0, size=2))
        tau = rng.uniform(0.0, 5.0)
        rho = teleport_protocol_oracle(state, rates, tau)
        lam = complex(dephasing_factor(rates, tau))
        worst = max(worst, abs(output_fidelity(state, rho) - fidelity_closed_form(state.theta, lam)))
    ok = worst <= 1e-10
    all_ok &= ok
    lines.append(
        f"check=teleport_oracle draws={cfg['teleport_draws']} max_err={worst:.6e} "
        f"tol=1e-10 {'PASS' if ok else 'FAIL'}"
    )

    state = InputPureState(1.234, 2.345)
    noiseless = teleport_protocol_oracle(state, SwitchingRates(1.0, 3.0), 0.0)
    err = abs(output_fidelity(state, noiseless) - 1.0)
    ok = err <= 1e-12
    all_ok &= ok
    lines.append(f"check=teleport_noiseless err={err:.6e} tol=1e-12 {'PASS' if ok else 'FAIL'}")

    worst = 0.0
    for _ in range(cfg["quadrature_draws"]):
        rates = SwitchingRates(*rng.uniform(0.1, 10.0, size=2))
        tau = rng.uniform(0.1, 3.0)
        quad = sphere_average_fidelity(rates, tau)
        worst = max(worst, abs(quad - average_fidelity_one_sided(rates, tau).value))
    ok = worst <= 1e-8
    all_ok &= ok
    lines.append(
        f"check=teleport_quadrature draws={cfg['quadrature_draws']} "
        f"max_err={worst:.6e} tol=1e-8 {'PASS' if ok else 'FAIL'}"
    )
    lines.append("")
    lines.append(f"overall {'PASS' if all_ok else 'FAIL'}")
    lines.append("")
    return "\n".join(lines), all_ok


def cmd_validate(cfg: dict) -> int:
    out = OutputWriter("validate", cfg)
    report, all_ok = _run_validation(cfg)
    out.write_text("validation_report.txt", report)
    out.finalize(backend=cfg["backend"] or "auto", threads=_effective_threads(cfg))
    sys.stdout.write(report)
    return 0 if all_ok else 2


_COMMANDS = {
    "lambda": cmd_lambda,
    "negativity": cmd_negativity,
    "revivals": cmd_revivals,
    "nonmarkov": cmd_nonmarkov,
    "teleport": cmd_teleport,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rtnqubit",
        description="Telegraph-noise qubit dephasing: figure data and validation runs.",
    )
    parser.add_argument("--version", action="version", version=f"rtnqubit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="INI file with [common] and per-command sections")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, help="master seed (default: 12345)")
        p.add_argument("--threads", type=int, help="worker threads (default: 1)")
        p.add_argument("--backend", help="trajectory backend: compiled or python")
        p.add_argument("--grid-step", dest="grid_step", type=float, help="rate-grid step")
        p.add_argument("--grid-min", dest="grid_min", type=float, help="rate-grid minimum")
        p.add_argument("--grid-max", dest="grid_max", type=float, help="rate-grid maximum")
        p.add_argument("--horizon", type=float, help="time horizon")
        p.add_argument("--time-step", dest="time_step", type=float, help="time-grid step")

    p = sub.add_parser("lambda", help="decoherence factor vs time")
    add_common(p)
    p.add_argument("--n", type=float, help="phase multiplier (default 2)")
    p.add_argument("--gamma0", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--balanced", action="store_const", const=True, default=None)

    p = sub.add_parser("negativity", help="Bell-state negativity surfaces")
    add_common(p)
    p.add_argument("--topology", help="ie, ce or both")
    p.add_argument("--gamma0-presets", dest="gamma0_presets")

    p = sub.add_parser("revivals", help="entanglement-revival region map")
    add_common(p)

    p = sub.add_parser("nonmarkov", help="backflow-measure surface")
    add_common(p)
    p.add_argument("--end", type=float, help="integration end time (default 10)")

    p = sub.add_parser("teleport", help="average-fidelity surfaces and advantage maps")
    add_common(p)
    p.add_argument("--gamma0-presets", dest="gamma0_presets")
    p.add_argument("--two-sided", dest="two_sided", action="store_const", const=True, default=None)

    p = sub.add_parser("validate", help="closed-form vs oracle differential checks")
    add_common(p)
    p.add_argument("--draws", type=int, help="MC comparison draws (default 100)")
    p.add_argument("--trajectories", type=int, help="trajectories per draw (default 1e5)")
    p.add_argument("--neg-draws", dest="neg_draws", type=int)
    p.add_argument("--teleport-draws", dest="teleport_draws", type=int)
    p.add_argument("--quadrature-draws", dest="quadrature_draws", type=int)
    p.add_argument(
        "--inject-lambda-offset",
        dest="inject_lambda_offset",
        type=float,
        help=argparse.SUPPRESS,
    )
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on its own for --help/--version (code 0) and for
        # usage errors; fold the latter into the invalid-config code 1
        return 0 if exc.code in (0, None) else 1
    try:
        cfg = resolve_config(args.command, args)
        return _COMMANDS[args.command](cfg)
    except (ParameterError, HorizonError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
