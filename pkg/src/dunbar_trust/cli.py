"""Command-line front end.

Settings are merged in increasing priority: built-in defaults, a
``key = value`` config file (``--config``), ``DUNBAR_TRUST_<FLAG>``
environment variables, and finally command-line flags.

Exit codes: 0 success, 2 invalid configuration, 3 infeasible analysis target,
4 output could not be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dunbar, dynamics, montecarlo
from .svgplot import line_chart
from .trust import InputRange, power_law, uniform

ENV_PREFIX = "DUNBAR_TRUST_"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

COMMANDS = ("trajectory", "sweep", "layers", "alpha-curve", "population-curve", "montecarlo")


class UsageError(Exception):
    pass


class InfeasibleTarget(Exception):
    pass


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _choice(*options):
    def conv(text: str) -> str:
        text = text.strip().lower()
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return conv


# name -> (converter, help)
OPTIONS = {
    "n": (int, "population size N"),
    "dist": (_choice("uniform", "powerlaw"), "trust distribution"),
    "tc": (float, "trust cutoff T_c in [0, 1]"),
    "beta": (float, "transmission probability per unit time"),
    "r0": (float, "initial transmitter fraction (default 1/N)"),
    "alpha": (float, "power-law exponent"),
    "lo": (float, "lower trust bound"),
    "hi": (float, "upper trust bound"),
    "input_range": (_choice("full", "truncated"), "power-law driver range: [0,1] or [0.1,1]"),
    "step": (float, "trust-cutoff grid increment"),
    "alphas": (_float_list, "comma-separated exponents"),
    "populations": (_int_list, "comma-separated population sizes"),
    "layers": (_int_list, "comma-separated Dunbar layers"),
    "layer": (int, "target Dunbar layer"),
    "dt": (float, "RK4 step"),
    "t_end": (float, "final time"),
    "runs": (int, "Monte Carlo runs"),
    "seed": (int, "random seed"),
    "workers": (int, "parallel workers for Monte Carlo runs"),
    "output": (str, "output path (stdout if omitted)"),
    "format": (_choice("csv", "svg", "both"), "output format"),
}

DEFAULTS = {
    "n": 150,
    "dist": "uniform",
    "beta": 0.25,
    "alpha": 2.1,
    "input_range": "full",
    "step": 0.01,
    "alphas": [2.1, 2.2, 2.3, 2.4, 2.5, 2.6, 2.7, 2.8, 2.9],
    "populations": list(dunbar.DEFAULT_POPULATIONS),
    "layers": list(dunbar.DEFAULT_LAYERS),
    "dt": dynamics.DEFAULT_DT,
    "t_end": dynamics.DEFAULT_T_END,
    "runs": 100,
    "seed": 0,
    "workers": 1,
    "format": "csv",
}

REQUIRED = {
    "trajectory": ("tc",),
    "montecarlo": ("tc",),
    "alpha-curve": ("layer",),
    "population-curve": ("layer",),
}


@dataclass
class RunConfig:
    command: str
    n: int = 150
    dist: str = "uniform"
    tc: float | None = None
    beta: float = 0.25
    r0: float | None = None
    alpha: float = 2.1
    lo: float | None = None
    hi: float | None = None
    input_range: str = "full"
    step: float = 0.01
    alphas: list = field(default_factory=list)
    populations: list = field(default_factory=list)
    layers: list = field(default_factory=list)
    layer: int | None = None
    dt: float = dynamics.DEFAULT_DT
    t_end: float = dynamics.DEFAULT_T_END
    runs: int = 100
    seed: int = 0
    workers: int = 1
    output: str | None = None
    format: str = "csv"

    def distribution(self):
        if self.dist == "uniform":
            return uniform(0.0 if self.lo is None else self.lo, 1.0 if self.hi is None else self.hi)
        return power_law(
            self.alpha,
            0.1 if self.lo is None else self.lo,
            1.0 if self.hi is None else self.hi,
            InputRange(self.input_range),
        )

    def params(self) -> dynamics.ModelParams:
        return dynamics.ModelParams(self.n, self.beta, self.tc, self.distribution(), self.r0)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dunbar-trust",
        description="Trust-gated information diffusion across Dunbar layers.",
        epilog=f"Every flag can also be set through {ENV_PREFIX}<FLAG> (e.g. {ENV_PREFIX}T_END).",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for cmd in COMMANDS:
        p = sub.add_parser(cmd, help=f"run the {cmd} analysis")
        p.add_argument("--config", help="key = value config file")
        for name, (_, help_text) in OPTIONS.items():
            default = DEFAULTS.get(name)
            suffix = f" (default: {default})" if default is not None and not isinstance(default, list) else ""
            flags = [_flag(name)] + (["-o"] if name == "output" else [])
            p.add_argument(*flags, dest=name, default=None, metavar=name.upper(), help=help_text + suffix)
    return parser


def _convert(name: str, raw: str, source: str):
    conv = OPTIONS[name][0]
    try:
        return conv(raw)
    except ValueError as exc:
        raise UsageError(f"invalid value {raw!r} for {_flag(name)} ({source}): {exc}") from None


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_config(argv, environ=None) -> RunConfig:
    """Build a validated :class:`RunConfig`; raises :class:`UsageError` on bad input."""
    environ = os.environ if environ is None else environ
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise UsageError("invalid command line") from None

    merged = dict(DEFAULTS)
    if ns.config:
        for key, raw in read_config_file(ns.config).items():
            merged[key] = _convert(key, raw, f"config {ns.config}")
    for key in OPTIONS:
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            merged[key] = _convert(key, raw, ENV_PREFIX + key.upper())
    for key in OPTIONS:
        raw = getattr(ns, key)
        if raw is not None:
            merged[key] = _convert(key, raw, "command line")

    for key in REQUIRED.get(ns.command, ()):
        if merged.get(key) is None:
            raise UsageError(f"{ns.command} requires {_flag(key)}")
    cfg = RunConfig(command=ns.command, **merged)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    def bad(name, why):
        raise UsageError(f"invalid value for {_flag(name)}: {why}")

    if cfg.n <= 1:
        bad("n", "must be > 1")
    if cfg.tc is not None and not (0.0 <= cfg.tc <= 1.0):
        bad("tc", f"{cfg.tc} outside [0, 1]")
    if not (0.0 <= cfg.beta <= 1.0):
        bad("beta", f"{cfg.beta} outside [0, 1]")
    if cfg.r0 is not None and not (0.0 < cfg.r0 < 1.0):
        bad("r0", f"{cfg.r0} outside (0, 1)")
    if not (0.0 < cfg.step < 1.0):
        bad("step", f"{cfg.step} outside (0, 1)")
    if cfg.dt <= 0:
        bad("dt", "must be positive")
    if cfg.t_end <= 0 or (cfg.command == "trajectory" and cfg.t_end < cfg.dt):
        bad("t_end", "must be positive and at least dt")
    if cfg.runs < 1:
        bad("runs", "must be >= 1")
    if cfg.workers < 1:
        bad("workers", "must be >= 1")
    if cfg.layer is not None and cfg.layer < 1:
        bad("layer", "must be >= 1")
    if not cfg.alphas or any(a == 1.0 for a in cfg.alphas):
        bad("alphas", "need at least one exponent, none equal to 1")
    if len(set(cfg.alphas)) != len(cfg.alphas):
        bad("alphas", "duplicate exponent")
    try:
        dunbar.validate_layers(cfg.layers)
    except ValueError as exc:
        bad("layers", str(exc))
    pops = cfg.populations
    if not pops or any(p <= 1 for p in pops) or any(b <= a for a, b in zip(pops, pops[1:])):
        bad("populations", "must be strictly increasing integers > 1")
    if cfg.format == "both" and not cfg.output:
        bad("format", "'both' needs --output")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            cfg.distribution()
        except ValueError as exc:
            bad("dist", str(exc))


# -- table production --------------------------------------------------------


@dataclass
class Table:
    header: list
    rows: list
    series: dict
    title: str
    xlabel: str
    ylabel: str


def _trajectory(cfg):
    traj = dynamics.integrate(cfg.params(), cfg.dt, cfg.t_end)
    rows = list(zip(traj.times, traj.i, traj.s, traj.r, traj.informed))
    return Table(
        ["t", "i", "s", "r", "informed"], rows,
        {"informed": (traj.times, traj.informed)},
        f"N={cfg.n}, {cfg.distribution().label()}, tc={cfg.tc:g}, beta={cfg.beta:g}",
        "t", "total informed",
    )


def _sweep(cfg):
    table = dunbar.sweep_cutoffs(cfg.distribution(), cfg.n, cfg.step)
    return Table(
        ["tc", "informed"], list(zip(table.x, table.y)),
        {"informed": (table.x, table.y)},
        f"N={cfg.n}, {cfg.distribution().label()}", "trust cutoff", "asymptotic informed",
    )


def _layers(cfg):
    dist = cfg.distribution()
    results = [dunbar.cutoff_for_layer(dist, cfg.n, L) for L in cfg.layers]
    bad = [r.layer for r in results if not r.feasible]
    if bad:
        raise InfeasibleTarget(f"layers {bad} exceed population n={cfg.n}")
    rows = [(r.layer, r.cutoff, r.feasible) for r in results]
    return Table(
        ["layer", "cutoff", "feasible"], rows,
        {"cutoff": ([r.layer for r in results], [r.cutoff for r in results])},
        f"N={cfg.n}, {dist.label()}", "Dunbar layer", "trust cutoff",
    )


def _alpha_curve(cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            table = dunbar.alpha_cutoff_curve(
                cfg.n, cfg.layer, cfg.alphas,
                0.1 if cfg.lo is None else cfg.lo, 1.0 if cfg.hi is None else cfg.hi,
                cfg.input_range,
            )
        except dunbar.InfeasibleLayerError as exc:
            raise InfeasibleTarget(str(exc)) from None
    rows = [(a, c, a * c) for a, c in zip(table.x, table.y)]
    return Table(
        ["alpha", "cutoff", "alpha_times_cutoff"], rows,
        {f"layer {cfg.layer}": (table.x, table.y)},
        f"N={cfg.n}, layer={cfg.layer}", "power-law exponent alpha", "trust cutoff",
    )


def _population_curve(cfg):
    table = dunbar.cutoff_vs_population(cfg.distribution(), cfg.layer, cfg.populations)
    if not table.feasible.all():
        bad = table.x[~table.feasible].tolist()
        raise InfeasibleTarget(f"layer {cfg.layer} exceeds populations {bad}")
    return Table(
        ["n", "cutoff"], list(zip(table.x, table.y)),
        {f"layer {cfg.layer}": (table.x, table.y)},
        f"{cfg.distribution().label()}, layer={cfg.layer}", "population size N", "trust cutoff",
    )


def _montecarlo(cfg):
    params = cfg.params()
    ens = montecarlo.simulate_ensemble(params, cfg.runs, cfg.t_end, cfg.seed, workers=cfg.workers)
    exact = dynamics.closed_form_r(ens.times, params.ignorant_fraction, params.r0, params.beta)
    return Table(
        ["t", "mean_r", "std_r"], list(zip(ens.times, ens.mean_r, ens.std_r)),
        {"ensemble mean": (ens.times, ens.mean_r), "mean field": (ens.times, exact)},
        f"N={cfg.n}, tc={cfg.tc:g}, beta={cfg.beta:g}, runs={cfg.runs}",
        "t", "transmitter fraction r",
    )


PRODUCERS = {
    "trajectory": _trajectory,
    "sweep": _sweep,
    "layers": _layers,
    "alpha-curve": _alpha_curve,
    "population-curve": _population_curve,
    "montecarlo": _montecarlo,
}


# -- serialisation -----------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not np.isfinite(v):
        return ""
    if v == 0:
        return "0"
    return np.format_float_positional(v, precision=6, unique=False, fractional=False, trim="-")


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_svg(table: Table) -> str:
    return line_chart(table.series, table.title, table.xlabel, table.ylabel)


def write_atomic(files: dict) -> None:
    """Write every ``path -> text`` pair, or none of them."""
    staged = []
    try:
        for path, text in files.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def output_files(cfg: RunConfig, table: Table) -> dict:
    out = Path(cfg.output)
    if cfg.format == "csv":
        return {out: render_csv(table)}
    if cfg.format == "svg":
        return {out: render_svg(table)}
    stem = out.with_suffix("") if out.suffix in (".csv", ".svg") else out
    return {
        stem.with_name(stem.name + ".csv"): render_csv(table),
        stem.with_name(stem.name + ".svg"): render_svg(table),
    }


def execute(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    start = time.perf_counter()
    try:
        table = PRODUCERS[cfg.command](cfg)
    except (InfeasibleTarget, dynamics.InfeasibleStateError, dynamics.UnreachableLevelError) as exc:
        print(f"dunbar-trust {cfg.command}: infeasible: {exc}", file=stderr)
        return EXIT_INFEASIBLE

    if cfg.output is None:
        stdout.write(render_svg(table) if cfg.format == "svg" else render_csv(table))
        dest, summary_stream = "stdout", stderr
    else:
        try:
            files = output_files(cfg, table)
            write_atomic(files)
        except OSError as exc:
            print(f"dunbar-trust {cfg.command}: cannot write output: {exc}", file=stderr)
            return EXIT_IO
        dest, summary_stream = ", ".join(str(p) for p in files), stdout
    elapsed = time.perf_counter() - start
    print(f"{cfg.command}: {len(table.rows)} rows written to {dest} in {elapsed:.3f}s", file=summary_stream)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"dunbar-trust: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
