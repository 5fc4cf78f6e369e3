"""Global tests of a hypothesised center, max-norm versus L2-flavored.

The max-norm statistics (spatial-median and mean versions, bootstrap
calibrated) shine against sparse alternatives: a couple of strong coordinates
push the max far out while barely moving pairwise-sum statistics.
"""

import numpy as np

from geomedian import (
    ar1_shape,
    global_test_cq,
    global_test_mean,
    global_test_median,
    global_test_wpl,
)
from geomedian.simdata import DistributionSpec, ThetaPattern, draw, theta_vector

p, n = 200, 80
theta0 = np.zeros(p)

for kappa in (0.0, 1.8):
    truth = theta_vector(ThetaPattern("log_sparse", kappa=kappa, c0=0.5), p, n)
    spec = DistributionSpec("gaussian", truth, ar1_shape(p, 0.0))
    sample = draw(spec, n, seed=31)
    verdicts = {
        "median": global_test_median(sample, theta0, 0.05, B=400, seed=8),
        "mean": global_test_mean(sample, theta0, 0.05, B=400, seed=8),
        "wpl": global_test_wpl(sample, theta0, 0.05),
        "cq": global_test_cq(sample, theta0, 0.05),
    }
    label = "null (kappa=0)" if kappa == 0 else f"sparse signal (kappa={kappa:g})"
    print(f"--- {label}: {int((truth != 0).sum())} nonzero coordinates ---")
    for name, res in verdicts.items():
        print(f"  {name:6s} p-value={res.p_value:8.4f} reject={res.reject}")
    print()
