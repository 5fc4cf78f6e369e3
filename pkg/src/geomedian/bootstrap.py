"""Multiplier bootstrap for the max-norm of re-solved location estimates.

Each replicate multiplies the centered observations by independent random
signs and records the scaled max-norm of the re-estimated center (spatial
median target) or of the perturbed average (mean target).  Replicate b draws
its signs from a counter-based substream keyed by (seed, namespace, b), so any
subset of replicates can run anywhere, in any order, and the full vector of
statistics is reproduced bit-for-bit.

Replicates are solved in fixed-size batches (a constant independent of the
worker count) so the arithmetic performed for a given (inputs, seed) never
depends on scheduling.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Sample, write_csv
from .errors import DidNotConverge, InvalidLevel, InvalidScenario, TooFewDraws
from .estimator import SolverConfig, SpatialMedianFit, _data_scale, _weiszfeld_batch
from .streams import NS_BOOT_MEAN, NS_BOOT_MEDIAN, rademacher, substream

# Batch of replicates solved together.  Fixed: batching must not change with
# the worker count, or results would depend on scheduling.
_BATCH = 256

RADEMACHER = "rademacher"
MULTIPLIER_SCHEMES = (RADEMACHER,)


@dataclass(frozen=True)
class BootstrapDraws:
    """Replicate max-norm statistics plus the seed that produced them.

    ``vectors`` optionally holds the full replicate center vectors (B x p),
    for callers that need more than the max-norms.
    """

    stats: np.ndarray
    B: int
    seed: int
    target: str  # "spatial_median" | "mean"
    n_obs: int
    vectors: np.ndarray | None = None

    def __post_init__(self):
        if self.stats.shape != (self.B,):
            raise InvalidScenario("stats length must equal B")
        if self.vectors is not None and self.vectors.shape[0] != self.B:
            raise InvalidScenario("vectors must have one row per replicate")


def _chunks(B: int):
    return [(lo, min(lo + _BATCH, B)) for lo in range(0, B, _BATCH)]


def _run_chunks(worker, B: int, workers: int):
    spans = _chunks(B)
    if workers <= 1 or len(spans) <= 1:
        for span in spans:
            worker(span)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for future in [pool.submit(worker, span) for span in spans]:
            future.result()


def bootstrap_spatial_median(
    sample: Sample,
    fit: SpatialMedianFit,
    B: int,
    seed: int,
    config: SolverConfig | None = None,
    workers: int = 1,
    keep_vectors: bool = False,
) -> BootstrapDraws:
    """Re-solve the spatial median of sign-multiplied residuals, B times.

    Replicate b minimizes sum_i ||Z_i (X_i - theta_hat) - beta|| with fresh
    random signs Z and records sqrt(n) * max|beta|.  A replicate that fails to
    converge raises DidNotConverge carrying its index.
    """
    if B < 1:
        raise InvalidScenario("B must be >= 1")
    cfg = config or SolverConfig()
    residuals = sample.values - fit.theta_hat
    n = sample.n
    scale = _data_scale(residuals)
    root_n = np.sqrt(n)
    stats = np.empty(B)
    vectors = np.empty((B, sample.p)) if keep_vectors else None

    def solve_span(span):
        lo, hi = span
        signs = np.empty((hi - lo, n))
        for j in range(hi - lo):
            signs[j] = rademacher(substream(seed, NS_BOOT_MEDIAN, lo + j), n)
        try:
            # replicates start at the origin, the center of the sign-symmetric
            # replicate law; each replicate warm-starts only its own iterations
            beta, _, _, _ = _weiszfeld_batch(
                residuals, signs, cfg, scale, init=np.zeros((hi - lo, residuals.shape[1]))
            )
        except DidNotConverge as err:
            raise DidNotConverge(
                err.iterations, err.grad_norm, replicate=lo + (err.replicate or 0)
            ) from err
        stats[lo:hi] = root_n * np.abs(beta).max(axis=1)
        if vectors is not None:
            vectors[lo:hi] = beta

    _run_chunks(solve_span, B, workers)
    stats.flags.writeable = False
    if vectors is not None:
        vectors.flags.writeable = False
    return BootstrapDraws(
        stats=stats, B=B, seed=seed, target="spatial_median", n_obs=n, vectors=vectors
    )


def bootstrap_mean(
    sample: Sample, B: int, seed: int, workers: int = 1, keep_vectors: bool = False
) -> BootstrapDraws:
    """Multiplier bootstrap for the sample mean.

    Replicate b records sqrt(n) * max|mean_i Z_i (X_i - xbar)|.
    """
    if B < 1:
        raise InvalidScenario("B must be >= 1")
    centered = sample.values - sample.values.mean(axis=0)
    n = sample.n
    root_n = np.sqrt(n)
    stats = np.empty(B)
    vectors = np.empty((B, sample.p)) if keep_vectors else None

    def solve_span(span):
        lo, hi = span
        signs = np.empty((hi - lo, n))
        for j in range(hi - lo):
            signs[j] = rademacher(substream(seed, NS_BOOT_MEAN, lo + j), n)
        averages = (signs @ centered) / n
        stats[lo:hi] = root_n * np.abs(averages).max(axis=1)
        if vectors is not None:
            vectors[lo:hi] = averages

    _run_chunks(solve_span, B, workers)
    stats.flags.writeable = False
    if vectors is not None:
        vectors.flags.writeable = False
    return BootstrapDraws(stats=stats, B=B, seed=seed, target="mean", n_obs=n, vectors=vectors)


def quantile(draws: BootstrapDraws, level: float) -> float:
    """Smallest replicate value whose empirical CDF reaches ``level``.

    Uses the ceiling order statistic, i.e. the inverse empirical CDF; exact
    under enumeration and never undershoots the requested coverage.
    """
    if not 0.0 < level < 1.0:
        raise InvalidLevel(f"level must lie in (0, 1), got {level}")
    k = int(np.ceil(level * draws.B))
    k = min(max(k, 1), draws.B)
    return float(np.partition(draws.stats, k - 1)[k - 1])


def conditional_variance(draws: BootstrapDraws) -> float:
    """Unbiased variance of the un-normalized replicate max-norms.

    Replicate statistics carry a sqrt(n) factor; it is removed before taking
    the variance.
    """
    if draws.B < 2:
        raise TooFewDraws("need at least two replicates for a variance")
    return float(np.var(draws.stats / np.sqrt(draws.n_obs), ddof=1))


def write_stats_csv(draws: BootstrapDraws, path) -> None:
    """Dump raw replicate statistics, one value per line under a 'stat' header."""
    write_csv(path, draws.stats.reshape(-1, 1), header=["stat"])
