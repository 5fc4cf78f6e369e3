"""Declarative Monte Carlo experiment runner with deterministic aggregation.

A :class:`ScenarioSpec` describes a synthetic experiment (distribution, shape,
center pattern, sizes, replication counts, seed); the ``run_*`` operations
execute it and return a :class:`MetricsTable`.  Per-replication seeds derive
from (scenario seed, replication index), estimator and bootstrap substreams
derive further, so methods compared "on the same sample" truly share the
sample and reruns reproduce every statistic bit-for-bit.

Replications may run on several worker threads; results land in arrays
indexed by replication, and aggregation is a deterministic fold over index
order, so the worker count never affects the output.

Defaults are desk scale (500 replications, 200 bootstrap replicates); pass
``replications=2500, B=400`` for full-scale runs.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .bootstrap import bootstrap_mean, bootstrap_spatial_median, quantile
from .data import ar1_shape
from .errors import GeomedianError, InvalidScenario
from .estimator import SolverConfig, spatial_median
from .inference import bh_fdr, global_test_cq, global_test_wpl, marginal_stats
from .simdata import (
    MODEL_GAUSSIAN,
    MODELS,
    T_MODE_SCALE,
    DistributionSpec,
    ThetaPattern,
    draw,
    theta_vector,
)
from .streams import NS_HARNESS, child_seed

EXPERIMENT_COVERAGE = "coverage"
EXPERIMENT_SIZE_POWER = "size_power"
EXPERIMENT_FDR = "fdr"
EXPERIMENT_ARE = "are"
EXPERIMENTS = (EXPERIMENT_COVERAGE, EXPERIMENT_SIZE_POWER, EXPERIMENT_FDR, EXPERIMENT_ARE)

# The documented report schema.  Key columns first, then metrics.
COLUMNS = (
    "scenario",
    "experiment",
    "model",
    "rho",
    "n",
    "p",
    "level",
    "method",
    "kappa",
    "coverage",
    "median_length",
    "size",
    "power",
    "fdr",
    "fdr_power",
    "are_ratio",
    "mc_stderr",
    "runtime_seconds",
)

_UNIT = ("coverage", "size", "power", "fdr", "fdr_power")


@dataclass(frozen=True)
class ScenarioSpec:
    """A synthetic experiment description; serializable to/from JSON."""

    experiment: str
    model: str = MODEL_GAUSSIAN
    rho: float = 0.0
    df: float | None = None
    # published benchmark tables behave like the classical scale-matrix t
    t_mode: str = T_MODE_SCALE
    n: int = 100
    p: int = 100
    theta: ThetaPattern = field(default_factory=lambda: ThetaPattern("zero"))
    replications: int = 500
    B: int = 200
    levels: tuple = (0.9,)
    seed: int = 0
    name: str = ""
    # experiment-specific knobs (harness ops also accept them as arguments)
    kappa_grid: tuple | None = None
    c0: float = 0.5
    methods: tuple = ("median", "mean", "wpl")
    p_grid: tuple | None = None
    n_grid: tuple | None = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidScenario(f"unknown experiment {self.experiment!r}")
        if self.model not in MODELS:
            raise InvalidScenario(f"unknown model {self.model!r}")
        if self.replications < 1:
            raise InvalidScenario("replications must be >= 1")
        if self.B < 1:
            raise InvalidScenario("B must be >= 1")
        if not self.levels or not all(0.0 < lv < 1.0 for lv in self.levels):
            raise InvalidScenario("levels must all lie in (0, 1)")

    def label(self) -> str:
        if self.name:
            return self.name
        tag = f"{self.model}-rho{self.rho:g}-n{self.n}-p{self.p}"
        return tag if self.df is None else f"{tag}-df{self.df:g}"


class MetricsTable:
    """Row container with the fixed :data:`COLUMNS` schema."""

    def __init__(self, rows: list[dict] | None = None):
        self.rows: list[dict] = []
        for row in rows or []:
            self.append(**row)

    def append(self, **values):
        row = {col: values.get(col) for col in COLUMNS}
        for col in _UNIT:
            v = row[col]
            if v is not None and not 0.0 <= v <= 1.0:
                raise InvalidScenario(f"{col}={v} outside [0, 1]")
        if row["mc_stderr"] is not None and row["mc_stderr"] < 0:
            raise InvalidScenario("mc_stderr must be >= 0")
        self.rows.append(row)

    def extend(self, other: "MetricsTable"):
        self.rows.extend(other.rows)

    def __len__(self):
        return len(self.rows)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(table: MetricsTable, format: str = "csv") -> str:
    """Serialize a metrics table to csv, json, or markdown text."""
    if format == "csv":
        lines = [",".join(COLUMNS)]
        lines += [",".join(_format_cell(row[c]) for c in COLUMNS) for row in table.rows]
        return "\n".join(lines) + "\n"
    if format == "json":
        return json.dumps(table.rows, indent=2) + "\n"
    if format == "markdown":
        head = "| " + " | ".join(COLUMNS) + " |"
        rule = "|" + "|".join(" --- " for _ in COLUMNS) + "|"
        body = ["| " + " | ".join(_format_cell(row[c]) for c in COLUMNS) + " |" for row in table.rows]
        return "\n".join([head, rule, *body]) + "\n"
    raise InvalidScenario(f"unknown report format {format!r}")


def _bernoulli_stderr(rate: float, m: int) -> float:
    return float(np.sqrt(rate * (1.0 - rate) / m))


def _distribution(spec: ScenarioSpec, theta: np.ndarray, p: int | None = None) -> DistributionSpec:
    shape = ar1_shape(p or spec.p, spec.rho)
    return DistributionSpec(model=spec.model, theta=theta, shape=shape, df=spec.df, t_mode=spec.t_mode)


def _run_replications(spec: ScenarioSpec, reps: int, worker, workers: int | None = None):
    """Run ``worker(r)`` for r in range(reps), optionally on several threads."""
    count = workers if workers is not None else spec.workers

    def guarded(r):
        try:
            worker(r)
        except GeomedianError as err:
            raise GeomedianError(
                f"scenario {spec.label()!r} replication {r}: {err}"
            ) from err

    if count <= 1:
        for r in range(reps):
            guarded(r)
        return
    with ThreadPoolExecutor(max_workers=count) as pool:
        for future in [pool.submit(guarded, r) for r in range(reps)]:
            future.result()


def run_coverage(spec: ScenarioSpec, workers: int | None = None, include_runtime: bool = False) -> MetricsTable:
    """Simultaneous-interval coverage and width, spatial-median and mean methods.

    Both methods are evaluated on the same sample in every replication.
    """
    if spec.experiment != EXPERIMENT_COVERAGE:
        raise InvalidScenario(f"run_coverage needs a coverage scenario, got {spec.experiment!r}")
    start = time.perf_counter()
    theta = theta_vector(spec.theta, spec.p, spec.n)
    dist = _distribution(spec, theta)
    cfg = SolverConfig()
    m, n_levels = spec.replications, len(spec.levels)
    root_n = np.sqrt(spec.n)
    covered = np.zeros((m, n_levels, 2), dtype=bool)
    widths = np.zeros((m, n_levels, 2))

    def one(r):
        rep_seed = child_seed(spec.seed, NS_HARNESS, r)
        sample = draw(dist, spec.n, rep_seed)
        fit = spatial_median(sample, cfg)
        draws_med = bootstrap_spatial_median(sample, fit, spec.B, rep_seed, cfg)
        center_mean = sample.values.mean(axis=0)
        draws_mean = bootstrap_mean(sample, spec.B, rep_seed)
        err_med = np.abs(fit.theta_hat - theta).max()
        err_mean = np.abs(center_mean - theta).max()
        for li, level in enumerate(spec.levels):
            for mi, (draws, err) in enumerate(((draws_med, err_med), (draws_mean, err_mean))):
                q = quantile(draws, level)
                covered[r, li, mi] = err <= q / root_n
                widths[r, li, mi] = 2.0 * q / root_n

    _run_replications(spec, m, one, workers)
    runtime = time.perf_counter() - start if include_runtime else None
    table = MetricsTable()
    for li, level in enumerate(spec.levels):
        for mi, method in enumerate(("median", "mean")):
            rate = float(covered[:, li, mi].mean())
            table.append(
                scenario=spec.label(),
                experiment=spec.experiment,
                model=spec.model,
                rho=spec.rho,
                n=spec.n,
                p=spec.p,
                level=level,
                method=method,
                coverage=rate,
                median_length=float(np.median(widths[:, li, mi])),
                mc_stderr=_bernoulli_stderr(rate, m),
                runtime_seconds=runtime,
            )
    return table


def run_size_power(
    spec: ScenarioSpec,
    kappa_grid=None,
    c0: float | None = None,
    methods=None,
    workers: int | None = None,
    include_runtime: bool = False,
) -> MetricsTable:
    """Rejection frequency of the global tests along a signal-strength grid.

    Signal vectors put ``kappa * sqrt(log(p)/n)`` on the first
    ``floor(c0 * log p)`` coordinates; ``kappa = 0`` rows report size, others
    power.  All requested tests see the same sample in each replication.
    """
    if spec.experiment != EXPERIMENT_SIZE_POWER:
        raise InvalidScenario(f"run_size_power needs a size_power scenario, got {spec.experiment!r}")
    start = time.perf_counter()
    grid = tuple(kappa_grid if kappa_grid is not None else (spec.kappa_grid or (0.0,)))
    c0 = spec.c0 if c0 is None else c0
    methods = tuple(methods if methods is not None else spec.methods)
    unknown = set(methods) - {"median", "mean", "wpl", "cq"}
    if unknown:
        raise InvalidScenario(f"unknown test methods {sorted(unknown)}")
    cfg = SolverConfig()
    theta0 = np.zeros(spec.p)
    m, n_levels = spec.replications, len(spec.levels)
    root_n = np.sqrt(spec.n)
    reject = {meth: np.zeros((len(grid), m, n_levels), dtype=bool) for meth in methods}

    for ki, kappa in enumerate(grid):
        pattern = ThetaPattern("log_sparse", kappa=kappa, c0=c0)
        theta = theta_vector(pattern, spec.p, spec.n)
        dist = _distribution(spec, theta)

        def one(r, ki=ki, dist=dist):
            rep_seed = child_seed(spec.seed, NS_HARNESS, ki, r)
            sample = draw(dist, spec.n, rep_seed)
            if "median" in methods:
                fit = spatial_median(sample, cfg)
                stat = root_n * np.abs(fit.theta_hat - theta0).max()
                draws = bootstrap_spatial_median(sample, fit, spec.B, rep_seed, cfg)
                for li, tau in enumerate(spec.levels):
                    reject["median"][ki, r, li] = stat > quantile(draws, 1.0 - tau)
            if "mean" in methods:
                stat = root_n * np.abs(sample.values.mean(axis=0) - theta0).max()
                draws = bootstrap_mean(sample, spec.B, rep_seed)
                for li, tau in enumerate(spec.levels):
                    reject["mean"][ki, r, li] = stat > quantile(draws, 1.0 - tau)
            if "wpl" in methods:
                for li, tau in enumerate(spec.levels):
                    reject["wpl"][ki, r, li] = global_test_wpl(sample, theta0, tau).reject
            if "cq" in methods:
                for li, tau in enumerate(spec.levels):
                    reject["cq"][ki, r, li] = global_test_cq(sample, theta0, tau).reject

        _run_replications(spec, m, one, workers)

    runtime = time.perf_counter() - start if include_runtime else None
    table = MetricsTable()
    for ki, kappa in enumerate(grid):
        for li, tau in enumerate(spec.levels):
            for meth in methods:
                rate = float(reject[meth][ki, :, li].mean())
                table.append(
                    scenario=spec.label(),
                    experiment=spec.experiment,
                    model=spec.model,
                    rho=spec.rho,
                    n=spec.n,
                    p=spec.p,
                    level=tau,
                    method=meth,
                    kappa=kappa,
                    size=rate if kappa == 0 else None,
                    power=None if kappa == 0 else rate,
                    mc_stderr=_bernoulli_stderr(rate, m),
                    runtime_seconds=runtime,
                )
    return table


def run_fdr(spec: ScenarioSpec, workers: int | None = None, include_runtime: bool = False) -> MetricsTable:
    """False-discovery proportion and power of the step-up screening.

    The spatial-median route uses studentized marginal statistics; the
    mean-based baseline uses ordinary t-statistics with normal p-values.
    ``spec.levels`` supplies the nominal FDR levels.
    """
    if spec.experiment != EXPERIMENT_FDR:
        raise InvalidScenario(f"run_fdr needs an fdr scenario, got {spec.experiment!r}")
    start = time.perf_counter()
    theta = theta_vector(spec.theta, spec.p, spec.n)
    signal = theta != 0.0
    n_signal = int(signal.sum())
    dist = _distribution(spec, theta)
    cfg = SolverConfig()
    theta0 = np.zeros(spec.p)
    m, n_levels = spec.replications, len(spec.levels)
    root_n = np.sqrt(spec.n)
    fdp = np.zeros((m, n_levels, 2))
    tpp = np.zeros((m, n_levels, 2))

    def screen(p_values, alpha):
        sel = bh_fdr(p_values, alpha)
        hits = signal[sel.rejected].sum() if sel.k_hat else 0
        false = sel.k_hat - hits
        prop_false = false / max(sel.k_hat, 1)
        prop_hit = hits / n_signal if n_signal else np.nan
        return prop_false, prop_hit

    def one(r):
        rep_seed = child_seed(spec.seed, NS_HARNESS, r)
        sample = draw(dist, spec.n, rep_seed)
        fit = spatial_median(sample, cfg)
        t_med = marginal_stats(sample, fit, theta0)
        pv_med = 2.0 * ndtr(-np.abs(t_med))
        xbar = sample.values.mean(axis=0)
        sd = sample.values.std(axis=0, ddof=1)
        t_mean = root_n * xbar / sd
        pv_mean = 2.0 * ndtr(-np.abs(t_mean))
        for li, alpha in enumerate(spec.levels):
            fdp[r, li, 0], tpp[r, li, 0] = screen(pv_med, alpha)
            fdp[r, li, 1], tpp[r, li, 1] = screen(pv_mean, alpha)

    _run_replications(spec, m, one, workers)
    runtime = time.perf_counter() - start if include_runtime else None
    table = MetricsTable()
    for li, alpha in enumerate(spec.levels):
        for mi, method in enumerate(("median", "mean")):
            mean_tpp = float(np.nanmean(tpp[:, li, mi])) if n_signal else None
            table.append(
                scenario=spec.label(),
                experiment=spec.experiment,
                model=spec.model,
                rho=spec.rho,
                n=spec.n,
                p=spec.p,
                level=alpha,
                method=method,
                fdr=float(fdp[:, li, mi].mean()),
                fdr_power=mean_tpp,
                mc_stderr=float(np.sqrt(fdp[:, li, mi].var(ddof=1) / m)) if m > 1 else 0.0,
                runtime_seconds=runtime,
            )
    return table


def _jackknife_ratio_stderr(x: np.ndarray, y: np.ndarray) -> float:
    """Delete-one stderr of var(x)/var(y) for paired series x, y."""
    m = x.size
    if m < 3:
        return 0.0

    def loo_var(series):
        s1, s2 = series.sum(), (series**2).sum()
        return ((s2 - series**2) - (s1 - series) ** 2 / (m - 1)) / (m - 2)

    ratios = loo_var(x) / loo_var(y)
    return float(np.sqrt((m - 1) / m * ((ratios - ratios.mean()) ** 2).sum()))


def run_are(
    spec: ScenarioSpec,
    p_grid=None,
    n_grid=None,
    workers: int | None = None,
    include_runtime: bool = False,
) -> MetricsTable:
    """Monte Carlo max-norm variance ratio of the mean to the spatial median.

    For every (n, p) pair, the ratio var|xbar - theta|_inf / var|theta_hat -
    theta|_inf is taken across replications.
    """
    if spec.experiment != EXPERIMENT_ARE:
        raise InvalidScenario(f"run_are needs an are scenario, got {spec.experiment!r}")
    start = time.perf_counter()
    p_values = tuple(p_grid if p_grid is not None else (spec.p_grid or (spec.p,)))
    n_values = tuple(n_grid if n_grid is not None else (spec.n_grid or (spec.n,)))
    if any(n < 2 for n in n_values):
        raise InvalidScenario("relative-efficiency runs need n >= 2 (variance of a single estimate is undefined)")
    if spec.replications < 2:
        raise InvalidScenario("relative-efficiency runs need >= 2 replications")
    cfg = SolverConfig()
    m = spec.replications
    table = MetricsTable()
    for ni, n in enumerate(n_values):
        for pi, p in enumerate(p_values):
            theta = theta_vector(spec.theta, p, n)
            dist = _distribution(spec, theta, p=p)
            med_stat = np.zeros(m)
            mean_stat = np.zeros(m)

            def one(r, ni=ni, pi=pi, n=n, dist=dist, theta=theta, med_stat=med_stat, mean_stat=mean_stat):
                rep_seed = child_seed(spec.seed, NS_HARNESS, ni, pi, r)
                sample = draw(dist, n, rep_seed)
                fit = spatial_median(sample, cfg)
                med_stat[r] = np.abs(fit.theta_hat - theta).max()
                mean_stat[r] = np.abs(sample.values.mean(axis=0) - theta).max()

            _run_replications(spec, m, one, workers)
            table.append(
                scenario=spec.label(),
                experiment=spec.experiment,
                model=spec.model,
                rho=spec.rho,
                n=n,
                p=p,
                method="mc_ratio",
                are_ratio=float(mean_stat.var(ddof=1) / med_stat.var(ddof=1)),
                mc_stderr=_jackknife_ratio_stderr(mean_stat, med_stat),
                runtime_seconds=(time.perf_counter() - start) if include_runtime else None,
            )
    return table


_RUNNERS = {
    EXPERIMENT_COVERAGE: run_coverage,
    EXPERIMENT_SIZE_POWER: run_size_power,
    EXPERIMENT_FDR: run_fdr,
    EXPERIMENT_ARE: run_are,
}


def run_scenario(spec: ScenarioSpec, workers: int | None = None, include_runtime: bool = False) -> MetricsTable:
    """Dispatch a scenario to its experiment runner."""
    return _RUNNERS[spec.experiment](spec, workers=workers, include_runtime=include_runtime)


def scenario_from_json(obj: dict) -> ScenarioSpec:
    """Build a :class:`ScenarioSpec` from its JSON object form."""
    if "experiment" not in obj:
        raise InvalidScenario("scenario JSON needs an 'experiment' field")
    if "seed" not in obj:
        raise InvalidScenario("scenario JSON needs a 'seed' field (no silent entropy)")
    theta_obj = obj.get("theta", {"kind": "zero"})
    pattern = ThetaPattern(
        kind=theta_obj.get("kind", "zero"),
        kappa=float(theta_obj.get("kappa", 0.0)),
        c0=float(theta_obj.get("c0", 0.5)),
        scale=float(theta_obj.get("scale", 2.0)),
    )
    known = {
        "experiment", "model", "rho", "df", "t_mode", "n", "p", "replications",
        "B", "levels", "seed", "name", "kappa_grid", "c0", "methods", "p_grid",
        "n_grid", "workers",
    }
    unknown = set(obj) - known - {"theta"}
    if unknown:
        raise InvalidScenario(f"unknown scenario fields {sorted(unknown)}")
    kwargs = {k: obj[k] for k in known if k in obj}
    for tup in ("levels", "kappa_grid", "methods", "p_grid", "n_grid"):
        if kwargs.get(tup) is not None:
            kwargs[tup] = tuple(kwargs[tup])
    return ScenarioSpec(theta=pattern, **kwargs)
