"""Consumer-facing procedures: simultaneous intervals, global tests, FDR, ARE.

All bootstrap-calibrated procedures share the convention that a test at
significance ``alpha`` compares its statistic with the ``1 - alpha`` replicate
quantile, and that a simultaneous confidence set at level ``level`` uses the
``level`` quantile, so interval membership and test rejection are exact duals
when both consume the same replicate draws.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, ndtr, ndtri

from .bootstrap import (
    BootstrapDraws,
    bootstrap_mean,
    bootstrap_spatial_median,
    conditional_variance,
    quantile,
)
from .data import Sample, validate_vector
from .errors import (
    DimensionMismatch,
    InvalidAlpha,
    InvalidDf,
    InvalidLevel,
    InvalidScenario,
    TooFewDraws,
    ZeroScale,
    ZeroVariance,
)
from .estimator import SolverConfig, SpatialMedianFit, spatial_median

METHOD_MEDIAN = "median"
METHOD_MEAN = "mean"
METHOD_WPL = "wpl"
METHOD_CQ = "cq"


@dataclass(frozen=True)
class SciResult:
    """Simultaneous confidence intervals with a common half-width."""

    lower: np.ndarray
    upper: np.ndarray
    level: float
    q_boot: float
    method: str

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "q_boot": self.q_boot,
            "method": self.method,
            "intervals": [[float(lo), float(hi)] for lo, hi in zip(self.lower, self.upper)],
        }


@dataclass(frozen=True)
class GlobalTestResult:
    statistic: float
    critical_value: float
    p_value: float
    reject: bool
    method: str

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": self.reject,
        }


@dataclass(frozen=True)
class FdrResult:
    """Marginal statistics, p-values, and the step-up selection they produce."""

    t_stats: np.ndarray
    p_values: np.ndarray
    k_hat: int
    rejected: np.ndarray
    threshold_p: float
    alpha: float

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "k_hat": self.k_hat,
            "threshold_p": self.threshold_p,
            "rejected": [int(j) for j in self.rejected],
            "p_values": [float(v) for v in self.p_values],
        }


@dataclass(frozen=True)
class AreReport:
    """Max-norm efficiency of the spatial median relative to the mean."""

    are_estimate: float
    are_analytic: float | None
    model: str

    def to_json(self) -> dict:
        return {
            "are_estimate": self.are_estimate,
            "are_analytic": self.are_analytic,
            "model": self.model,
        }


def sci(
    sample: Sample,
    level: float,
    B: int,
    seed: int,
    method: str = METHOD_MEDIAN,
    config: SolverConfig | None = None,
    workers: int = 1,
) -> SciResult:
    """Simultaneous confidence intervals for every coordinate of the center.

    Fits the chosen center, calibrates the max-norm by the matching multiplier
    bootstrap, and returns center -/+ q/sqrt(n) per coordinate.
    """
    if not 0.0 < level < 1.0:
        raise InvalidLevel(f"level must lie in (0, 1), got {level}")
    if sample.n < 2:
        raise InvalidScenario("need n >= 2 observations for interval calibration")
    if method == METHOD_MEDIAN:
        fit = spatial_median(sample, config)
        center = fit.theta_hat
        draws = bootstrap_spatial_median(sample, fit, B, seed, config, workers)
    elif method == METHOD_MEAN:
        center = sample.values.mean(axis=0)
        draws = bootstrap_mean(sample, B, seed, workers)
    else:
        raise InvalidScenario(f"unknown SCI method {method!r}")
    q = quantile(draws, level)
    half = q / np.sqrt(sample.n)
    return SciResult(lower=center - half, upper=center + half, level=level, q_boot=q, method=method)


def _bootstrap_p_value(draws: BootstrapDraws, statistic: float) -> float:
    return float((1 + int((draws.stats >= statistic).sum())) / (draws.B + 1))


def global_test_median(
    sample: Sample,
    theta0,
    level: float = 0.05,
    B: int = 400,
    seed: int = 0,
    config: SolverConfig | None = None,
    workers: int = 1,
) -> GlobalTestResult:
    """Max-norm test of a hypothesised center, spatial-median version.

    ``level`` is the significance level; the critical value is the
    ``1 - level`` quantile of the bootstrap replicates.
    """
    theta0 = _check_theta0(theta0, sample.p)
    fit = spatial_median(sample, config)
    statistic = float(np.sqrt(sample.n) * np.abs(fit.theta_hat - theta0).max())
    draws = bootstrap_spatial_median(sample, fit, B, seed, config, workers)
    critical = quantile(draws, 1.0 - level)
    return GlobalTestResult(
        statistic=statistic,
        critical_value=critical,
        p_value=_bootstrap_p_value(draws, statistic),
        reject=statistic > critical,
        method=METHOD_MEDIAN,
    )


def global_test_mean(
    sample: Sample,
    theta0,
    level: float = 0.05,
    B: int = 400,
    seed: int = 0,
    workers: int = 1,
) -> GlobalTestResult:
    """Max-norm test of a hypothesised center, sample-mean version."""
    theta0 = _check_theta0(theta0, sample.p)
    statistic = float(np.sqrt(sample.n) * np.abs(sample.values.mean(axis=0) - theta0).max())
    draws = bootstrap_mean(sample, B, seed, workers)
    critical = quantile(draws, 1.0 - level)
    return GlobalTestResult(
        statistic=statistic,
        critical_value=critical,
        p_value=_bootstrap_p_value(draws, statistic),
        reject=statistic > critical,
        method=METHOD_MEAN,
    )


def global_test_wpl(sample: Sample, theta0, level: float = 0.05) -> GlobalTestResult:
    """Pairwise sign inner-product test (an L2-norm style baseline).

    The statistic sums W_i' W_j over pairs i > j of residual directions at the
    hypothesised center.  Its null variance n(n-1)/2 * tr(B^2), B the second
    moment of the directions, is estimated by the pair-exclusive plug-in
    tr(B^2) ~ mean of (W_i' W_j)^2 over i != j; keeping the self-pairs would
    add a 1/n term that dominates tr(B^2) whenever p >> n and would drive the
    size to zero.  Rejection uses an upper-tail normal cutoff.
    """
    theta0 = _check_theta0(theta0, sample.p)
    n = sample.n
    if n < 2:
        raise InvalidScenario("pairwise statistic needs n >= 2")
    centered = sample.values - theta0
    norms = np.linalg.norm(centered, axis=1)
    directions = np.zeros_like(centered)
    nz = norms > 0
    directions[nz] = centered[nz] / norms[nz, None]
    gram = directions @ directions.T
    diag = np.diag(gram)
    statistic = float((gram.sum() - diag.sum()) / 2.0)
    trace_b_sq = float((gram**2).sum() - (diag**2).sum()) / (n * (n - 1))
    sd = float(np.sqrt(n * (n - 1) / 2.0 * trace_b_sq))
    return _normal_calibrated(statistic, sd, level, METHOD_WPL)


def global_test_cq(sample: Sample, theta0, level: float = 0.05) -> GlobalTestResult:
    """Mean-based pairwise inner-product baseline with plug-in variance.

    Sums (X_i - theta0)'(X_j - theta0) over ordered pairs i != j; the null
    variance 2 n(n-1) tr(Sigma^2) is estimated by the pairwise second moment
    of the same inner products.  Provided for comparison only.
    """
    theta0 = _check_theta0(theta0, sample.p)
    n = sample.n
    if n < 2:
        raise InvalidScenario("pairwise statistic needs n >= 2")
    centered = sample.values - theta0
    gram = centered @ centered.T
    diag = np.diag(gram)
    statistic = float(gram.sum() - diag.sum())
    pair_sq = float((gram**2).sum() - (diag**2).sum())
    trace_sq_hat = pair_sq / (n * (n - 1))
    sd = float(np.sqrt(2.0 * n * (n - 1) * trace_sq_hat))
    return _normal_calibrated(statistic, sd, level, METHOD_CQ)


def _normal_calibrated(statistic, sd, level, method) -> GlobalTestResult:
    if not 0.0 < level < 1.0:
        raise InvalidLevel(f"level must lie in (0, 1), got {level}")
    z = float(ndtri(1.0 - level))
    critical = z * sd
    if sd > 0:
        p_value = float(ndtr(-statistic / sd))
    else:
        p_value = 1.0 if statistic <= 0 else 0.0
    return GlobalTestResult(
        statistic=statistic,
        critical_value=critical,
        p_value=p_value,
        reject=statistic > critical,
        method=method,
    )


def _check_theta0(theta0, p) -> np.ndarray:
    v = np.asarray(theta0, dtype=np.float64).reshape(-1)
    if v.size != p:
        raise DimensionMismatch(f"hypothesised center has length {v.size}, expected {p}")
    return validate_vector(v)


def marginal_stats(sample: Sample, fit: SpatialMedianFit, theta0) -> np.ndarray:
    """Per-coordinate studentized statistics sqrt(n)(theta_hat_j - theta0_j)/s_j.

    The marginal scale is s_j = sqrt(b_diag_hat_j) / zeta1_hat.
    """
    theta0 = _check_theta0(theta0, sample.p)
    b_diag = fit.b_diag_hat
    if not np.isfinite(fit.zeta1_hat) or fit.zeta1_hat <= 0 or not np.isfinite(b_diag).all():
        raise ZeroScale(0)
    zero = np.nonzero(b_diag <= 0)[0]
    if zero.size:
        raise ZeroScale(int(zero[0]))
    scale = np.sqrt(b_diag) / fit.zeta1_hat
    return np.sqrt(sample.n) * (fit.theta_hat - theta0) / scale


@dataclass(frozen=True)
class BhSelection:
    k_hat: int
    rejected: np.ndarray
    threshold_p: float


def bh_fdr(p_values, alpha: float) -> BhSelection:
    """Step-up selection: reject the k smallest p-values, k the largest j with
    P_(j) <= alpha * j / p.  Ties at the threshold share its fate."""
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1), got {alpha}")
    pv = np.asarray(p_values, dtype=np.float64).reshape(-1)
    if pv.size == 0 or (pv < 0).any() or (pv > 1).any() or not np.isfinite(pv).all():
        raise InvalidAlpha("p-values must lie in [0, 1]")
    p = pv.size
    ordered = np.sort(pv)
    passing = np.nonzero(ordered <= alpha * np.arange(1, p + 1) / p)[0]
    if passing.size == 0:
        return BhSelection(k_hat=0, rejected=np.empty(0, dtype=np.int64), threshold_p=0.0)
    k_hat = int(passing[-1]) + 1
    threshold = float(ordered[k_hat - 1])
    rejected = np.nonzero(pv <= threshold)[0]
    return BhSelection(k_hat=k_hat, rejected=rejected, threshold_p=threshold)


def fdr_screen(
    sample: Sample, theta0, alpha: float, config: SolverConfig | None = None
) -> FdrResult:
    """Coordinate-wise two-sided screening with step-up FDR control.

    Studentized spatial-median statistics get two-sided normal p-values which
    feed the step-up rule.
    """
    fit = spatial_median(sample, config)
    t_stats = marginal_stats(sample, fit, theta0)
    p_values = 2.0 * ndtr(-np.abs(t_stats))
    selection = bh_fdr(p_values, alpha)
    return FdrResult(
        t_stats=t_stats,
        p_values=p_values,
        k_hat=selection.k_hat,
        rejected=selection.rejected,
        threshold_p=selection.threshold_p,
        alpha=alpha,
    )


def are_bootstrap(
    sample: Sample,
    B: int,
    seed: int,
    config: SolverConfig | None = None,
    workers: int = 1,
) -> AreReport:
    """Bootstrap estimate of the mean-vs-median max-norm variance ratio.

    Both multiplier bootstraps run on the same sample with independent
    substream families derived from the one seed.
    """
    if sample.n < 2:
        raise InvalidScenario("need n >= 2 observations")
    if B < 2:
        raise TooFewDraws("need B >= 2 replicates")
    fit = spatial_median(sample, config)
    draws_median = bootstrap_spatial_median(sample, fit, B, seed, config, workers)
    draws_mean = bootstrap_mean(sample, B, seed, workers)
    var_median = conditional_variance(draws_median)
    var_mean = conditional_variance(draws_mean)
    if var_median == 0.0:
        raise ZeroVariance("median-target replicate variance is zero")
    return AreReport(
        are_estimate=var_mean / var_median,
        are_analytic=None,
        model=f"bootstrap(n={sample.n},p={sample.p},B={B})",
    )


def are_analytic(model: str, p: int, df: float | None = None) -> float:
    """Closed-form large-p efficiency ratio for spherical reference models.

    ``model`` is "gaussian" or "student_t" (the latter needs df > 2).
    Evaluated in log-gamma space.
    """
    if p < 2:
        raise InvalidScenario("p must be >= 2")
    half = p / 2.0
    log_core = np.log(p) + 2.0 * (gammaln(half - 0.5) - gammaln(half)) - np.log(2.0)
    if model == "gaussian":
        return float(np.exp(log_core))
    if model == "student_t":
        if df is None or df <= 2:
            raise InvalidDf(f"degrees of freedom must exceed 2, got {df}")
        v = df / 2.0
        log_t = np.log(2.0) - np.log(df - 2.0) + 2.0 * (gammaln(v + 0.5) - gammaln(v))
        return float(np.exp(log_core + log_t))
    raise InvalidScenario(f"unknown model {model!r}")
