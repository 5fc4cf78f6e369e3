"""Spatial median, geometric median-of-means, and plug-in scale estimates.

The solver is a modified Weiszfeld iteration with the Vardi-Zhang correction
for iterates that land on a data point, which keeps the scheme globally
convergent on the convex objective.  The same core solves many sign-multiplied
problems at once (one per bootstrap replicate) by carrying a batch dimension;
distances are evaluated through the inner-product expansion
``||z*x - b||^2 = ||x||^2 - 2 z <x, b> + ||b||^2`` (valid because z = +-1) so
each iteration is two matrix products.  Entries too small for the expansion to
resolve are recomputed directly before they feed the weights.
"""

from dataclasses import dataclass

import numpy as np

from .data import Sample, validate_vector
from .errors import (
    DegenerateRemainder,
    DegenerateSample,
    DidNotConverge,
    InvalidScenario,
)
from .streams import NS_BLOCKS, substream

# Distances below this multiple of the data scale are recomputed directly:
# the expansion's cancellation noise sits near sqrt(eps) * scale.
_REPAIR_REL = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    """Weiszfeld solver knobs.

    ``tol`` bounds the relative iterate change, ``grad_tol`` the per-observation
    estimating-equation residual; both must hold to declare convergence.
    ``anchor_eps`` is relative to the data scale: points within that radius of
    the iterate are treated as coincident with it.

    The iteration budget allows for the near-vertex regime, where an optimum
    sitting close to (but not at) a data point slows the contraction to
    1 - O(gap); a budget of 1000 demonstrably strands such solves.
    """

    tol: float = 1e-10
    max_iter: int = 5000
    anchor_eps: float = 1e-12
    grad_tol: float = 1e-7

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1 or self.anchor_eps <= 0 or self.grad_tol <= 0:
            raise InvalidScenario("tol, max_iter, anchor_eps and grad_tol must be positive")


@dataclass(frozen=True)
class SpatialMedianFit:
    """Fitted spatial median with solver diagnostics and plug-in scales.

    ``zeta1_hat`` is the mean inverse residual norm and ``b_diag_hat`` the
    diagonal of the mean outer product of residual directions, both computed
    over observations whose residual norm exceeds the anchor radius (the
    divisor shrinks accordingly).  When every residual is zero both are NaN.
    """

    theta_hat: np.ndarray
    iterations: int
    objective: float
    grad_norm: float
    zeta1_hat: float
    b_diag_hat: np.ndarray


def spatial_sign(x) -> np.ndarray:
    """Unit direction x/||x||, or the zero vector when x = 0."""
    v = np.asarray(x, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return np.zeros_like(v)
    return v / norm


def _weiszfeld_batch(points, signs, config, scale, collect_objective=False, init=None):
    """Minimize sum_i ||signs[b, i] * points[i] - beta_b|| for every batch row b.

    Starts from the coordinate-wise median of each row's multiplied points
    unless ``init`` supplies starting values.  Returns (beta, iterations,
    grad_norm, objective_history); the history holds per-iteration total
    distances when requested (meaningful for single-row batches).  Raises
    DidNotConverge (with the offending batch row in ``replicate``) if a row
    exhausts ``config.max_iter``.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    signs = np.ascontiguousarray(signs, dtype=np.float64)
    n, p = points.shape
    m = signs.shape[0]
    sq_norms = np.einsum("ij,ij->i", points, points)
    eps_anchor = config.anchor_eps * scale
    repair_floor = max(_REPAIR_REL * scale, eps_anchor)
    grad_bound = n * config.grad_tol

    if init is not None:
        beta = np.array(init, dtype=np.float64)
    else:
        beta = np.empty((m, p))
        for b in range(m):
            beta[b] = np.median(signs[b, :, None] * points, axis=0)

    iterations = np.zeros(m, dtype=np.int64)
    grad_norm = np.zeros(m)
    active = np.ones(m, dtype=bool)
    history: list[float] = []

    def vertex_solution(row, k):
        """If multiplied point k is the minimizer for batch row, return it.

        A data point is optimal exactly when the summed directions of the
        other points, evaluated at it, have norm at most its multiplicity.
        Weiszfeld contracts only linearly into such a vertex, so detecting
        optimality directly avoids a stall.
        """
        vertex = signs[row, k] * points[k]
        diff = signs[row][:, None] * points - vertex
        dnorm = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        at_vertex = dnorm <= eps_anchor
        pull = (diff[~at_vertex] / dnorm[~at_vertex, None]).sum(axis=0)
        if np.linalg.norm(pull) <= at_vertex.sum():
            return vertex
        return None

    def newton_polish(row, start):
        """Damped Newton finish for a row whose fixed-point iteration crawls.

        An optimum a small distance from a data point slows the fixed-point
        contraction to 1 - O(distance); the objective is smooth there, so a
        few backtracking Newton steps finish the job.  Returns (beta,
        grad_norm) on success, None when no descent is possible.
        """
        mul = signs[row][:, None] * points
        beta_r = start.copy()

        def distances(b):
            diff = mul - b
            return diff, np.sqrt(np.einsum("ij,ij->i", diff, diff))

        diff, d = distances(beta_r)
        value = d.sum()
        for _ in range(60):
            if d.min() <= eps_anchor:
                snapped = vertex_solution(row, int(d.argmin()))
                if snapped is not None:
                    return snapped, 0.0
                return None
            w = 1.0 / d
            grad = -(w[:, None] * diff).sum(axis=0)
            gnorm = float(np.linalg.norm(grad))
            if gnorm <= grad_bound:
                return beta_r, gnorm
            unit = diff * w[:, None]
            hess = w.sum() * np.eye(p) - unit.T @ (w[:, None] * unit)
            hess[np.diag_indices_from(hess)] += 1e-12 * w.sum()
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                return None
            slope = float(grad @ step)
            if slope >= 0:
                return None
            t_bt = 1.0
            for _ in range(80):
                cand = beta_r + t_bt * step
                diff_c, d_c = distances(cand)
                if d_c.sum() <= value + 1e-4 * t_bt * slope:
                    beta_r, diff, d, value = cand, diff_c, d_c, d_c.sum()
                    break
                t_bt *= 0.5
            else:
                return None
        return None

    for t in range(1, config.max_iter + 1):
        if t % 256 == 0:
            # anything still active this late is likely in the near-vertex
            # crawl; a second-order finish costs less than more sweeps
            for row in np.nonzero(active)[0]:
                out = newton_polish(row, beta[row])
                if out is not None:
                    beta[row], grad_norm[row] = out
                    iterations[row] = t
                    active[row] = False
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        za = signs[idx]
        ba = beta[idx]
        prod = ba @ points.T
        d2 = sq_norms[None, :] - 2.0 * za * prod + np.einsum("ij,ij->i", ba, ba)[:, None]
        np.maximum(d2, 0.0, out=d2)
        dist = np.sqrt(d2)

        low = dist < repair_floor
        if low.any():
            rb, ri = np.nonzero(low)
            diff = za[rb, ri, None] * points[ri] - ba[rb]
            dist[rb, ri] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        if not np.isfinite(dist).all():
            raise DegenerateSample("non-finite distances encountered")

        if t % 4 == 0:
            near = dist.min(axis=1) < 0.02 * scale
            for j in np.nonzero(near)[0]:
                snapped = vertex_solution(idx[j], int(dist[j].argmin()))
                if snapped is not None:
                    ba[j] = snapped
                    diff = za[j][:, None] * points - snapped
                    dist[j] = np.sqrt(np.einsum("ij,ij->i", diff, diff))

        anchored = dist <= eps_anchor
        weights = np.divide(1.0, dist, out=np.zeros_like(dist), where=~anchored)
        denom = weights.sum(axis=1)
        numer = (weights * za) @ points
        resid = numer - denom[:, None] * ba
        resid_norm = np.sqrt(np.einsum("ij,ij->i", resid, resid))
        eta = anchored.sum(axis=1).astype(np.float64)

        target = np.divide(numer, denom[:, None], out=ba.copy(), where=denom[:, None] > 0)
        lam = np.zeros(idx.size)
        at_anchor = eta > 0
        with np.errstate(divide="ignore"):
            lam[at_anchor] = np.minimum(
                1.0, eta[at_anchor] / np.where(resid_norm[at_anchor] > 0, resid_norm[at_anchor], np.inf)
            )
        lam[at_anchor & (resid_norm == 0)] = 1.0
        new = (1.0 - lam[:, None]) * target + lam[:, None] * ba

        if collect_objective:
            history.append(float(dist[0].sum()))

        step = np.sqrt(np.einsum("ij,ij->i", new - ba, new - ba))
        denom_change = np.maximum(1.0, np.sqrt(np.einsum("ij,ij->i", ba, ba)))
        grad_ok = (resid_norm <= grad_bound) | (resid_norm <= eta)
        done = (step / denom_change < config.tol) & grad_ok

        beta[idx] = new
        iterations[idx] = t
        grad_norm[idx] = resid_norm
        active[idx[done]] = False

    if active.any():
        row = int(np.nonzero(active)[0][0])
        raise DidNotConverge(config.max_iter, grad_norm[row], replicate=row)
    return beta, iterations, grad_norm, history


def _data_scale(values) -> float:
    peak = float(np.abs(values).max()) if values.size else 0.0
    return max(1.0, peak)


def spatial_median(sample: Sample, config: SolverConfig | None = None) -> SpatialMedianFit:
    """Minimize the total Euclidean distance to the observations.

    Initialization is the coordinate-wise median.  Residual-based quantities
    in the returned fit exclude observations coincident with the solution
    (residual norm below the anchor radius), with the divisor reduced.

    Uniqueness requires the observations not to be collinear when p > 2; for
    collinear inputs the solver simply reports the minimizer it reaches.
    """
    cfg = config or SolverConfig()
    x = sample.values
    n, p = x.shape
    scale = _data_scale(x)
    ones = np.ones((1, n))
    beta, iters, _, _ = _weiszfeld_batch(x, ones, cfg, scale)
    theta = beta[0]

    residuals = x - theta
    norms = np.linalg.norm(residuals, axis=1)
    nonzero = norms > cfg.anchor_eps * scale
    k = int(nonzero.sum())
    if k:
        directions = residuals[nonzero] / norms[nonzero, None]
        grad = float(np.linalg.norm(directions.sum(axis=0)))
        zeta1 = float((1.0 / norms[nonzero]).mean())
        b_diag = (directions**2).sum(axis=0) / k
    else:
        grad = 0.0
        zeta1 = float("nan")
        b_diag = np.full(p, np.nan)
    objective = float(norms.sum() - np.linalg.norm(x, axis=1).sum())
    theta.flags.writeable = False
    b_diag.flags.writeable = False
    return SpatialMedianFit(
        theta_hat=theta,
        iterations=int(iters[0]),
        objective=objective,
        grad_norm=grad,
        zeta1_hat=zeta1,
        b_diag_hat=b_diag,
    )


def gmom(sample: Sample, k_blocks: int, config: SolverConfig | None = None, seed: int = 0) -> np.ndarray:
    """Geometric median-of-means: spatial median of disjoint-block means.

    Rows are permuted by a stream keyed by ``seed``, then split into
    ``k_blocks`` contiguous groups whose sizes differ by at most one.
    """
    n = sample.n
    if not 1 <= k_blocks <= n:
        raise InvalidScenario(f"k_blocks must lie in [1, {n}], got {k_blocks}")
    cfg = config or SolverConfig()
    perm = substream(seed, NS_BLOCKS).permutation(n)
    means = np.stack([sample.values[rows].mean(axis=0) for rows in np.array_split(perm, k_blocks)])
    scale = _data_scale(means)
    beta, _, _, _ = _weiszfeld_batch(means, np.ones((1, k_blocks)), cfg, scale)
    return beta[0]


def bahadur_remainder(sample: Sample, theta_true, fit: SpatialMedianFit) -> float:
    """Max-norm gap between the scaled estimation error and its linear term.

    The linear term is the scaled sum of residual directions at the true
    center, divided by the fitted mean inverse residual norm.
    """
    theta = validate_vector(theta_true, sample.p)
    if not np.isfinite(fit.zeta1_hat) or fit.zeta1_hat <= 0:
        raise DegenerateRemainder("mean inverse residual norm is undefined for this fit")
    n = sample.n
    centered = sample.values - theta
    norms = np.linalg.norm(centered, axis=1)
    nz = norms > 0
    signs = np.zeros_like(centered)
    signs[nz] = centered[nz] / norms[nz, None]
    linear = signs.sum(axis=0) / (fit.zeta1_hat * np.sqrt(n))
    return float(np.abs(np.sqrt(n) * (fit.theta_hat - theta) - linear).max())
