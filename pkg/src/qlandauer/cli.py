"""Command-line experiments writing CSV or JSON tables.

Exit codes: 0 success, 2 invalid configuration, 3 output I/O failure.
"""

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from qlandauer import analysis, engine
from qlandauer.model import InteractionModel, ModelKind, SystemStateParams, max_coherence

EXIT_CONFIG = 2
EXIT_IO = 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    model: str = "xx"
    alpha_sq: float = 0.0
    w: float | None = None
    delta: float | None = None
    beta: float = 1.0
    j: float = 1.0
    jy: float | None = None
    jz: float | None = None
    j_max: float = 1.0
    t_max: float | None = None
    steps: int | None = None
    t_eval: float | None = None
    grid: int = 200
    beta_min: float = 0.1
    beta_max: float = 10.0
    samples: int | None = None
    random_states: int | None = None
    seed: int = 0
    out: str = "-"
    format: str = "csv"
    threads: int | None = None

    @classmethod
    def from_args(cls, ns):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in vars(ns).items() if k in names})

    def validate(self):
        if self.model not in {k.value for k in ModelKind}:
            raise ConfigError(f"--model must be one of xx, ising, generic (got {self.model!r})")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ConfigError("--beta must be finite and > 0")
        if not 0.0 <= self.alpha_sq <= 1.0:
            raise ConfigError("--alpha-sq must lie in [0, 1]")
        if self.w is not None and self.delta is not None:
            raise ConfigError("--w and --delta are mutually exclusive")
        if self.w is not None and not 0.0 <= self.w <= 1.0:
            raise ConfigError("--w must lie in [0, 1]")
        if self.delta is not None:
            cap = max_coherence(self.alpha_sq)
            if not 0.0 <= self.delta <= cap + 1e-15:
                raise ConfigError(f"--delta must lie in [0, {cap:.6g}] for this --alpha-sq")
        if self.j_max <= 0:
            raise ConfigError("--j-max must be > 0")
        if self.t_max is not None and self.t_max < 0:
            raise ConfigError("--t-max must be >= 0")
        if self.steps is not None and self.steps < 1:
            raise ConfigError("--steps must be >= 1")
        if self.t_eval is not None and self.t_eval <= 0:
            raise ConfigError("--t-eval must be > 0")
        if self.grid < 2:
            raise ConfigError("--grid must be >= 2")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("--samples must be >= 1")
        if self.random_states is not None and self.random_states < 1:
            raise ConfigError("--random-states must be >= 1")
        if not 0 < self.beta_min <= self.beta_max:
            raise ConfigError("need 0 < --beta-min <= --beta-max")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        return self

    def system_params(self):
        if self.delta is not None:
            return SystemStateParams.from_delta(self.alpha_sq, self.delta)
        return SystemStateParams(self.alpha_sq, 0.0 if self.w is None else self.w)

    def interaction(self):
        return InteractionModel.from_kind(self.model, self.j, self.jy, self.jz)

    def worker_count(self):
        return self.threads or os.cpu_count() or 1


# -- output ----------------------------------------------------------------

def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x) + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0


def _json_value(x):
    if isinstance(x, (str, bool)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x) + 0.0


def render(header, rows, fmt):
    if fmt == "json":
        objs = [{h: _json_value(v) for h, v in zip(header, row)} for row in rows]
        return json.dumps(objs, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_output(text, path):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- commands --------------------------------------------------------------

def cmd_evolve(cfg):
    model = cfg.interaction()
    times = engine.default_times(model, cfg.t_max, cfg.steps)
    rec = engine.bounds_series(model, cfg.system_params().state(), cfg.beta, times)
    return ["t", "beta_q", "delta_s", "thermo_b"], rec.rows().tolist()


def cmd_maxpoint(cfg):
    if cfg.model != ModelKind.XX.value:
        raise ConfigError("maxpoint needs --model xx (the swap time only exists for XX)")
    if cfg.j <= 0:
        raise ConfigError("--j must be > 0 for maxpoint")
    params = cfg.system_params()
    model = InteractionModel.xx(cfg.j)
    closed = analysis.max_point(params.alpha_sq, params.w, cfg.beta)
    timed = engine.bounds_at(model, params.state(), cfg.beta, model.swap_time())
    diff = max(
        abs(closed.beta_q_max - timed.beta_q),
        abs(closed.ds_max - timed.delta_s),
        abs(closed.b_max - timed.thermo_b),
    )
    header = ["alpha_sq", "w", "beta", "beta_q_max", "ds_max", "b_max",
              "beta_q_max_time", "ds_max_time", "b_max_time", "abs_diff"]
    row = [params.alpha_sq, params.w, cfg.beta, closed.beta_q_max, closed.ds_max, closed.b_max,
           timed.beta_q, timed.delta_s, timed.thermo_b, diff]
    return header, [row]


def _state_points(cfg):
    if cfg.random_states:
        return analysis.sample_states(cfg.random_states, cfg.seed)
    return analysis.admissible_grid(cfg.grid)


def region_labels(cfg, a2, d):
    """RegionLabel strings for states (a2, d); closed form for XX, averages otherwise."""
    if cfg.model == ModelKind.XX.value:
        w = analysis.w_from_delta(a2, d)
        return analysis.max_point_labels(a2, w, cfg.beta)
    ens = analysis.CouplingEnsemble(
        cfg.model,
        cfg.j_max,
        cfg.samples or analysis.DEFAULT_SAMPLES,
        cfg.t_eval or analysis.LONG_T_EVAL,
        cfg.seed,
    )

    def chunk(sl):
        q, ds, b = ens.averages_for(a2[sl], d[sl], cfg.beta)
        return analysis.classify_values(q, ds, b)

    return analysis.map_chunks(chunk, a2.size, cfg.worker_count())


def cmd_regions(cfg):
    a2, d = _state_points(cfg)
    labels = region_labels(cfg, a2, d)
    return ["alpha_sq", "delta", "label"], [[x, y, str(lab)] for x, y, lab in zip(a2, d, labels)]


def cmd_surface(cfg):
    a2 = np.linspace(0.0, 1.0, cfg.grid)
    betas = np.linspace(cfg.beta_min, cfg.beta_max, cfg.grid)
    A, B = np.meshgrid(a2, betas, indexing="ij")
    v_z = 1.0 - 2.0 * A
    q_max = analysis.beta_q_max(v_z, B) / B
    b_over = analysis.b_max(v_z, B) / B
    ds_over = analysis.ds_max(np.abs(v_z), B)[0] / B
    cols = [A.ravel(), B.ravel(), q_max.ravel(), b_over.ravel(), ds_over.ravel()]
    header = ["alpha_sq", "beta", "q_max", "b_max_over_beta", "ds_max_over_beta"]
    return header, np.stack(cols, axis=-1).tolist()


def cmd_average(cfg):
    params = cfg.system_params()
    n = cfg.samples or analysis.DEFAULT_SAMPLES
    t_eval = cfg.t_eval or analysis.SHORT_T_EVAL
    rec = analysis.averaged_bounds(cfg.model, params, cfg.beta, cfg.j_max, n, t_eval, cfg.seed)
    header = ["alpha_sq", "w", "beta", "j_max", "n", "t_eval", "seed",
              "mean_beta_q", "mean_ds", "mean_b"]
    row = [params.alpha_sq, params.w, cfg.beta, cfg.j_max, rec.n_samples, rec.t_eval, rec.seed,
           rec.mean_beta_q, rec.mean_ds, rec.mean_b]
    return header, [row]


def cmd_boundary(cfg):
    curve = analysis.boundary_curve(cfg.beta, np.linspace(0.0, 1.0, cfg.grid))
    if curve.missing.size:
        print(f"boundary: no root for {curve.missing.size} of {cfg.grid} alpha_sq values",
              file=sys.stderr)
    return ["alpha_sq", "delta"], curve.points.tolist()


COMMANDS = {
    "evolve": (cmd_evolve, "time series of beta<Q>, Delta S and B"),
    "maxpoint": (cmd_maxpoint, "closed-form vs time-domain values at the XX swap time"),
    "regions": (cmd_regions, "region labels over the admissible (alpha_sq, delta) grid"),
    "surface": (cmd_surface, "<Q>_max, B_max/beta and DeltaS_max/beta over (alpha_sq, beta), w = 0"),
    "average": (cmd_average, "coupling-averaged bounds for one state"),
    "boundary": (cmd_boundary, "states where B_max = DeltaS_max"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="xx", help="xx | ising | generic")
    common.add_argument("--alpha-sq", type=float, default=0.0, help="ground-state population")
    common.add_argument("--w", type=float, default=None, help="coherence fraction in [0, 1]")
    common.add_argument("--delta", type=float, default=None, help="coherence (alternative to --w)")
    common.add_argument("--beta", type=float, default=1.0, help="environment inverse temperature")
    common.add_argument("--j", type=float, default=1.0, help="coupling (jx for generic)")
    common.add_argument("--jy", type=float, default=None, help="generic model jy (default --j)")
    common.add_argument("--jz", type=float, default=None, help="generic model jz (default --j)")
    common.add_argument("--j-max", type=float, default=1.0, help="upper end of the coupling range")
    common.add_argument("--t-max", type=float, default=None, help="end of the time window")
    common.add_argument("--steps", type=int, default=None, help="number of time points")
    common.add_argument("--t-eval", type=float, default=None, help="evaluation time for averages")
    common.add_argument("--grid", type=int, default=200, help="grid resolution per axis")
    common.add_argument("--beta-min", type=float, default=0.1)
    common.add_argument("--beta-max", type=float, default=10.0)
    common.add_argument("--samples", type=int, default=None, help="coupling samples")
    common.add_argument("--random-states", type=int, default=None,
                        help="use this many seeded random states instead of a grid")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--format", default="csv", choices=["csv", "json"])
    common.add_argument("--threads", type=int, default=None, help="worker threads")

    parser = argparse.ArgumentParser(prog="qlandauer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def run(cfg):
    header, rows = COMMANDS[cfg.command][0](cfg)
    return render(header, rows, cfg.format)


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = ExperimentConfig.from_args(ns).validate()
        text = run(cfg)
    except ConfigError as exc:
        print(f"qlandauer {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"qlandauer {ns.command}: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        write_output(text, cfg.out)
    except OSError as exc:
        print(f"qlandauer {ns.command}: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
