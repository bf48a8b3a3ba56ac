"""Experiment harness: seeded Monte-Carlo trials over graph families,
aggregation, growth-model fitting, and CSV/config round-tripping.

Every trial derives its own seed from the master seed and the trial identity
(family, size, protocol, index), so results are reproducible run-to-run and
independent of execution order or worker count.  Random graph families draw
a fresh graph per trial; deterministic families share one immutable graph.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, FitError, GenerationFailureError, InvalidParameterError
from .graphs import (Graph, generate_clique_path, generate_complete,
                     generate_cycle, generate_cycle_stars_cliques,
                     generate_double_star, generate_heavy_binary_tree,
                     generate_random_regular, generate_siamese_trees,
                     generate_star)
from .protocols import (AgentConfig, run_meet_exchange, run_push,
                        run_push_pull, run_r_visit_exchange,
                        run_shared_visit_meet, run_t_visit_exchange,
                        run_visit_exchange)
from .rng import SimRng, derive_seed

__all__ = [
    "ExperimentConfig",
    "TrialRow",
    "ExperimentResult",
    "RatioPoint",
    "ComparisonPoint",
    "DominationRow",
    "GrowthFit",
    "ModelFit",
    "PROTOCOLS",
    "FAMILIES",
    "GROWTH_MODELS",
    "CSV_HEADER",
    "build_graph",
    "resolve_source",
    "run_trials",
    "result_to_csv",
    "sweep_ratio",
    "fit_growth",
    "fit_growth_points",
    "empirical_min",
    "compare_visitx_meetx",
    "shared_walk_domination",
    "parse_config",
    "parse_config_file",
    "format_config",
]

PROTOCOLS = ("push", "push-pull", "visit-exchange", "meet-exchange",
             "t-visit-exchange", "r-visit-exchange")

FAMILIES = ("star", "double-star", "heavy-tree", "siamese",
            "cycle-stars-cliques", "regular", "clique-path",
            "complete", "cycle")

RANDOM_FAMILIES = ("regular",)

SOURCE_RULES = ("center", "leaf", "uniform")

CSV_HEADER = ("family,n,protocol,alpha,lazy,trials,incomplete,"
              "mean,median,q05,q95,min,max,seed")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of a sweep; see ``parse_config`` for the
    flat key=value file format."""
    family: str
    protocols: tuple
    sweep: tuple
    trials: int
    seed: int
    alpha: float = 1.0
    agents: int | None = None
    placement: str = "stationary"
    lazy: bool = False
    source: str = "0"
    d: str | None = None
    gamma: float | None = None
    floor: float | None = None
    round_cap: int | None = None
    jobs: int = 1
    bootstrap: int = 1000

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if not self.protocols:
            raise ConfigError("at least one protocol is required")
        for p in self.protocols:
            if p not in PROTOCOLS:
                raise ConfigError(f"unknown protocol {p!r}")
        if not self.sweep:
            raise ConfigError("sweep must list at least one size")
        if any(int(s) < 1 for s in self.sweep):
            raise ConfigError("sweep sizes must be positive")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if not (self.source in SOURCE_RULES or _is_int(self.source)):
            raise ConfigError(f"source must be an id or one of {SOURCE_RULES}, "
                              f"got {self.source!r}")
        if "t-visit-exchange" in self.protocols and self.gamma is None:
            raise ConfigError("t-visit-exchange requires gamma")
        if self.family in ("regular", "clique-path") and self.d is None:
            raise ConfigError(f"family {self.family!r} requires d")


def _is_int(s: str) -> bool:
    try:
        int(s)
        return True
    except (TypeError, ValueError):
        return False


def _resolve_d(d_spec: str | None, size: int) -> int:
    if d_spec == "log2ceil":
        return max(1, math.ceil(math.log2(max(size, 2))))
    return int(d_spec)


def build_graph(family: str, size: int, d_spec: str | None, seed: int) -> Graph:
    """Instantiate one graph of the family at the given sweep size."""
    if family == "star":
        return generate_star(size)
    if family == "double-star":
        return generate_double_star(size)
    if family == "heavy-tree":
        return generate_heavy_binary_tree(size)
    if family == "siamese":
        return generate_siamese_trees(size)
    if family == "cycle-stars-cliques":
        return generate_cycle_stars_cliques(size)
    if family == "regular":
        return generate_random_regular(size, _resolve_d(d_spec, size), seed)
    if family == "clique-path":
        return generate_clique_path(size, _resolve_d(d_spec, size))
    if family == "complete":
        return generate_complete(size)
    if family == "cycle":
        return generate_cycle(size)
    raise InvalidParameterError(f"unknown family {family!r}")


def resolve_source(rule: str, graph: Graph, gen: np.random.Generator) -> int:
    """Map a source rule to a vertex: canonical center (vertex 0), the last
    vertex (always a leaf in the leafy families), uniform, or a fixed id."""
    if rule == "center":
        return 0
    if rule == "leaf":
        return graph.n - 1
    if rule == "uniform":
        return int(gen.integers(0, graph.n))
    v = int(rule)
    if not (0 <= v < graph.n):
        raise InvalidParameterError(f"source {v} out of range for n={graph.n}")
    return v


def _agent_config(cfg: ExperimentConfig, graph: Graph) -> AgentConfig:
    count = cfg.agents if cfg.agents is not None else round(cfg.alpha * graph.n)
    return AgentConfig(count=count, placement=cfg.placement, lazy=cfg.lazy)


def _run_protocol(protocol: str, graph: Graph, source: int,
                  cfg: ExperimentConfig, rng: SimRng):
    cap = cfg.round_cap
    if protocol == "push":
        return run_push(graph, source, rng, cap)
    if protocol == "push-pull":
        return run_push_pull(graph, source, rng, cap)
    acfg = _agent_config(cfg, graph)
    if protocol == "visit-exchange":
        return run_visit_exchange(graph, source, acfg, rng, cap)
    if protocol == "meet-exchange":
        return run_meet_exchange(graph, source, acfg, rng, cap)
    if protocol == "t-visit-exchange":
        return run_t_visit_exchange(graph, source, acfg, cfg.gamma, rng, cap)
    if protocol == "r-visit-exchange":
        return run_r_visit_exchange(graph, source, acfg, rng, cap, cfg.floor)
    raise InvalidParameterError(f"unknown protocol {protocol!r}")


def _trial_graph(cfg: ExperimentConfig, size: int, trial: int,
                 shared: Graph | None) -> Graph:
    if shared is not None:
        return shared
    gseed = derive_seed(cfg.seed, "graph", cfg.family, size, trial)
    return build_graph(cfg.family, size, cfg.d, gseed)


def _execute_trial(cfg: ExperimentConfig, size: int, protocol: str,
                   trial: int, shared: Graph | None):
    """Returns (vertex_count, broadcast_time_or_None)."""
    graph = _trial_graph(cfg, size, trial, shared)
    rng = SimRng(derive_seed(cfg.seed, "run", cfg.family, size, protocol, trial))
    source = resolve_source(cfg.source, graph, rng.stream("source"))
    res = _run_protocol(protocol, graph, source, cfg, rng)
    return graph.n, res.broadcast_time


def _pool_trial(payload):
    cfg, size, protocol, trial = payload
    try:
        return _execute_trial(cfg, size, protocol, trial, None)
    except GenerationFailureError:
        return None, None


@dataclass(frozen=True)
class TrialRow:
    """Aggregated statistics for one (size, protocol) cell.

    ``values`` keeps the per-trial broadcast times of completed trials in
    trial order so downstream bootstrap resampling can reuse them.
    Incomplete trials (round cap, generation failure) are counted but do not
    enter the moments.
    """
    family: str
    n: int
    size: int
    protocol: str
    alpha: float
    lazy: bool
    trials: int
    incomplete: int
    values: tuple
    seed: int
    mean: float | None
    median: float | None
    q05: float | None
    q95: float | None
    min: float | None
    max: float | None


def _make_row(cfg: ExperimentConfig, n: int, size: int, protocol: str,
              values: list, incomplete: int) -> TrialRow:
    arr = np.asarray(values, dtype=np.float64)
    stats = {k: None for k in ("mean", "median", "q05", "q95", "min", "max")}
    if arr.size:
        stats = {
            "mean": float(arr.mean()),
            "median": float(np.median(arr)),
            "q05": float(np.quantile(arr, 0.05)),
            "q95": float(np.quantile(arr, 0.95)),
            "min": float(arr.min()),
            "max": float(arr.max()),
        }
    return TrialRow(family=cfg.family, n=n, size=size, protocol=protocol,
                    alpha=cfg.alpha, lazy=cfg.lazy, trials=cfg.trials,
                    incomplete=incomplete, values=tuple(values),
                    seed=cfg.seed, **stats)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list

    def row(self, size: int, protocol: str) -> TrialRow:
        for r in self.rows:
            if r.size == size and r.protocol == protocol:
                return r
        raise KeyError((size, protocol))

    def rows_for(self, protocol: str) -> list:
        return [r for r in self.rows if r.protocol == protocol]


def run_trials(config: ExperimentConfig) -> ExperimentResult:
    """Run the full sweep.  Trials are seeded by identity, so the result is
    byte-identical regardless of ``jobs``."""
    rows = []
    for size in config.sweep:
        shared = None
        if config.family not in RANDOM_FAMILIES:
            shared = build_graph(config.family, size, config.d,
                                 derive_seed(config.seed, "graph",
                                             config.family, size, 0))
        for protocol in config.protocols:
            values: list = []
            incomplete = 0
            n_seen = shared.n if shared is not None else None
            if config.jobs > 1 and shared is None:
                payloads = [(config, size, protocol, i)
                            for i in range(config.trials)]
                with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                    outcomes = list(pool.map(_pool_trial, payloads, chunksize=4))
            else:
                outcomes = []
                for i in range(config.trials):
                    try:
                        outcomes.append(_execute_trial(config, size, protocol,
                                                       i, shared))
                    except GenerationFailureError:
                        outcomes.append((None, None))
            for n_i, bt in outcomes:
                if n_i is not None:
                    n_seen = n_i
                if bt is None:
                    incomplete += 1
                else:
                    values.append(int(bt))
            if n_seen is None:
                raise GenerationFailureError(
                    f"all {config.trials} generations failed for "
                    f"{config.family} size {size}")
            rows.append(_make_row(config, n_seen, size, protocol,
                                  values, incomplete))
    return ExperimentResult(config=config, rows=rows)


# -- CSV ------------------------------------------------------------------------

def _csv_num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return repr(x)


def result_to_csv(result: ExperimentResult) -> str:
    """Stable text form: same config and seed always yield identical bytes."""
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(",".join([
            r.family, str(r.n), r.protocol, _csv_num(float(r.alpha)),
            "true" if r.lazy else "false", str(r.trials), str(r.incomplete),
            _csv_num(r.mean), _csv_num(r.median), _csv_num(r.q05),
            _csv_num(r.q95), _csv_num(r.min), _csv_num(r.max), str(r.seed),
        ]))
    return "\n".join(lines) + "\n"


# -- comparisons -------------------------------------------------------------------

@dataclass(frozen=True)
class RatioPoint:
    size: int
    n: int
    ratio: float
    ci_low: float
    ci_high: float


def _bootstrap(gen, values: np.ndarray, resamples: int, stat) -> np.ndarray:
    out = np.empty(resamples)
    k = values.shape[0]
    for i in range(resamples):
        out[i] = stat(values[gen.integers(0, k, size=k)])
    return out


def sweep_ratio(result, protocol_a: str, protocol_b: str,
                resamples: int | None = None) -> list:
    """Per-size ratio of median broadcast times, with a bootstrap CI.

    Accepts either a finished ExperimentResult containing both protocols or
    an ExperimentConfig to run first.
    """
    if isinstance(result, ExperimentConfig):
        result = run_trials(result)
    if resamples is None:
        resamples = result.config.bootstrap
    points = []
    for size in result.config.sweep:
        ra = result.row(size, protocol_a)
        rb = result.row(size, protocol_b)
        if not ra.values or not rb.values:
            raise InvalidParameterError(
                f"no completed trials to compare at size {size}")
        va = np.asarray(ra.values, dtype=np.float64)
        vb = np.asarray(rb.values, dtype=np.float64)
        ratio = float(np.median(va) / np.median(vb))
        gen = np.random.Generator(np.random.PCG64(
            derive_seed(result.config.seed, "bootstrap-ratio", size,
                        protocol_a, protocol_b)))
        if protocol_a == protocol_b:
            # the ratio of a sample to itself is identically one
            samples = np.ones(resamples)
        else:
            med_a = _bootstrap(gen, va, resamples, np.median)
            med_b = _bootstrap(gen, vb, resamples, np.median)
            samples = med_a / med_b
        points.append(RatioPoint(size=size, n=ra.n, ratio=ratio,
                                 ci_low=float(np.quantile(samples, 0.025)),
                                 ci_high=float(np.quantile(samples, 0.975))))
    return points


@dataclass(frozen=True)
class ComparisonPoint:
    size: int
    n: int
    median_visitx: float
    median_meetx: float
    diff: float
    ci_low: float
    ci_high: float


def compare_visitx_meetx(config: ExperimentConfig) -> list:
    """Median meet-exchange minus median visit-exchange per size, with CI."""
    cfg = replace(config, protocols=("visit-exchange", "meet-exchange"))
    result = run_trials(cfg)
    points = []
    for size in cfg.sweep:
        rv = result.row(size, "visit-exchange")
        rm = result.row(size, "meet-exchange")
        if not rv.values or not rm.values:
            raise InvalidParameterError(
                f"no completed trials to compare at size {size}")
        vv = np.asarray(rv.values, dtype=np.float64)
        vm = np.asarray(rm.values, dtype=np.float64)
        gen = np.random.Generator(np.random.PCG64(
            derive_seed(cfg.seed, "bootstrap-diff", size)))
        diffs = (_bootstrap(gen, vm, cfg.bootstrap, np.median)
                 - _bootstrap(gen, vv, cfg.bootstrap, np.median))
        points.append(ComparisonPoint(
            size=size, n=rv.n,
            median_visitx=float(np.median(vv)),
            median_meetx=float(np.median(vm)),
            diff=float(np.median(vm) - np.median(vv)),
            ci_low=float(np.quantile(diffs, 0.025)),
            ci_high=float(np.quantile(diffs, 0.975))))
    return points


@dataclass(frozen=True)
class DominationRow:
    size: int
    n: int
    trials: int
    completed: int
    holds: int
    violations: tuple


def shared_walk_domination(config: ExperimentConfig) -> list:
    """Per-trial check that, over shared walks, visit-exchange informs all
    agents no later than meet-exchange completes."""
    rows = []
    for size in config.sweep:
        shared = None
        if config.family not in RANDOM_FAMILIES:
            shared = build_graph(config.family, size, config.d,
                                 derive_seed(config.seed, "graph",
                                             config.family, size, 0))
        completed = holds = 0
        violations = []
        n_seen = shared.n if shared is not None else 0
        for i in range(config.trials):
            try:
                graph = _trial_graph(config, size, i, shared)
            except GenerationFailureError:
                continue
            n_seen = graph.n
            rng = SimRng(derive_seed(config.seed, "run", config.family, size,
                                     "shared", i))
            source = resolve_source(config.source, graph, rng.stream("source"))
            out = run_shared_visit_meet(graph, source, _agent_config(config, graph),
                                        rng, config.round_cap)
            if out.meetx.complete and out.visitx_agents_round is not None:
                completed += 1
                if out.visitx_agents_round <= out.meetx.broadcast_time:
                    holds += 1
                else:
                    violations.append((i, out.visitx_agents_round,
                                       out.meetx.broadcast_time))
        rows.append(DominationRow(size=size, n=n_seen, trials=config.trials,
                                  completed=completed, holds=holds,
                                  violations=tuple(violations)))
    return rows


# -- growth-model fitting -----------------------------------------------------------

GROWTH_MODELS = {
    "log n": lambda n: np.log2(n),
    "n": lambda n: np.asarray(n, dtype=np.float64),
    "n log n": lambda n: n * np.log2(n),
    "n^(2/3)": lambda n: np.asarray(n, dtype=np.float64) ** (2.0 / 3.0),
}


@dataclass(frozen=True)
class ModelFit:
    intercept: float
    slope: float
    rss: float
    r2: float


@dataclass(frozen=True)
class GrowthFit:
    points: tuple
    fits: dict
    best_model: str


def fit_growth_points(points, models=None) -> GrowthFit:
    """Least-squares fit of y = a + b * f(n) for each candidate model.

    ``points`` is a sequence of (n, y) pairs; the best model minimizes the
    residual sum of squares.  Degenerate inputs (fewer than 3 points, or no
    variation) raise FitError.
    """
    models = dict(models or GROWTH_MODELS)
    pts = sorted((int(n), float(y)) for n, y in points)
    if len(pts) < 3:
        raise FitError(f"need at least 3 sweep points, got {len(pts)}")
    ns = np.array([p[0] for p in pts], dtype=np.float64)
    ys = np.array([p[1] for p in pts], dtype=np.float64)
    if np.unique(ns).shape[0] < 3:
        raise FitError("need at least 3 distinct sizes")
    tss = float(((ys - ys.mean()) ** 2).sum())
    if tss == 0.0:
        raise FitError("degenerate sweep: constant medians")
    fits = {}
    for name, f in models.items():
        x = np.asarray(f(ns), dtype=np.float64)
        design = np.column_stack([np.ones_like(x), x])
        coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
        resid = ys - design @ coef
        rss = float((resid ** 2).sum())
        fits[name] = ModelFit(intercept=float(coef[0]), slope=float(coef[1]),
                              rss=rss, r2=1.0 - rss / tss)
    best = min(fits, key=lambda name: fits[name].rss)
    return GrowthFit(points=tuple(pts), fits=fits, best_model=best)


def fit_growth(result: ExperimentResult, protocol: str,
               models=None) -> GrowthFit:
    """Fit the per-size median broadcast times of one protocol."""
    rows = result.rows_for(protocol)
    pts = [(r.n, r.median) for r in rows if r.median is not None]
    if len(pts) < 3:
        raise FitError(f"protocol {protocol!r} has {len(pts)} usable sweep "
                       "points; need at least 3")
    return fit_growth_points(pts, models)


def empirical_min(result: ExperimentResult) -> dict:
    """Minimum completed broadcast time per (n, protocol) cell."""
    return {(r.n, r.protocol): (min(r.values) if r.values else None)
            for r in result.rows}


# -- flat config files ----------------------------------------------------------------

_CONFIG_KEYS = ("family", "protocols", "sweep", "trials", "seed", "alpha",
                "agents", "placement", "lazy", "source", "d", "gamma",
                "floor", "round_cap", "jobs", "bootstrap")


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config format.

    Blank lines and ``#`` comments are ignored; keys may appear once.
    Errors carry the offending line number.
    """
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = (value, lineno)

    def take(key, conv, default=None, required=False):
        if key not in raw:
            if required:
                raise ConfigError(f"missing required key {key!r}")
            return default
        value, lineno = raw[key]
        try:
            return conv(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc

    def to_bool(v: str) -> bool:
        if v.lower() in ("true", "yes", "1"):
            return True
        if v.lower() in ("false", "no", "0"):
            return False
        raise ValueError(f"expected true/false, got {v!r}")

    def to_list(v: str) -> tuple:
        return tuple(part.strip() for part in v.split(",") if part.strip())

    def to_int_list(v: str) -> tuple:
        return tuple(int(part) for part in to_list(v))

    try:
        return ExperimentConfig(
            family=take("family", str, required=True),
            protocols=take("protocols", to_list, required=True),
            sweep=take("sweep", to_int_list, required=True),
            trials=take("trials", int, required=True),
            seed=take("seed", int, required=True),
            alpha=take("alpha", float, default=1.0),
            agents=take("agents", int),
            placement=take("placement", str, default="stationary"),
            lazy=take("lazy", to_bool, default=False),
            source=take("source", str, default="0"),
            d=take("d", str),
            gamma=take("gamma", float),
            floor=take("floor", float),
            round_cap=take("round_cap", int),
            jobs=take("jobs", int, default=1),
            bootstrap=take("bootstrap", int, default=1000),
        )
    except ConfigError:
        raise
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config_file(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


def format_config(cfg: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config`: parse(format(cfg)) == cfg."""
    def num(x):
        return repr(float(x)) if isinstance(x, float) else str(x)

    lines = [
        f"family = {cfg.family}",
        f"protocols = {', '.join(cfg.protocols)}",
        f"sweep = {', '.join(str(s) for s in cfg.sweep)}",
        f"trials = {cfg.trials}",
        f"seed = {cfg.seed}",
        f"alpha = {num(cfg.alpha)}",
    ]
    if cfg.agents is not None:
        lines.append(f"agents = {cfg.agents}")
    lines.append(f"placement = {cfg.placement}")
    lines.append(f"lazy = {'true' if cfg.lazy else 'false'}")
    lines.append(f"source = {cfg.source}")
    if cfg.d is not None:
        lines.append(f"d = {cfg.d}")
    if cfg.gamma is not None:
        lines.append(f"gamma = {num(cfg.gamma)}")
    if cfg.floor is not None:
        lines.append(f"floor = {num(cfg.floor)}")
    if cfg.round_cap is not None:
        lines.append(f"round_cap = {cfg.round_cap}")
    lines.append(f"jobs = {cfg.jobs}")
    lines.append(f"bootstrap = {cfg.bootstrap}")
    return "\n".join(lines) + "\n"
