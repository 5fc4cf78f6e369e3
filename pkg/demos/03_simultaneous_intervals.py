"""Simultaneous confidence intervals for every coordinate of the center.

The band center -/+ q/sqrt(n) uses the bootstrap quantile q of the replicate
max-norms, so all p intervals cover jointly at the nominal level.  On
heavy-tailed data the median-based band is visibly narrower than the
mean-based one at the same level.
"""

from geomedian import ar1_shape, sci
from geomedian.simdata import DistributionSpec, ThetaPattern, draw, theta_vector

p, n = 40, 120
truth = theta_vector(ThetaPattern("sparse3"), p, n)
spec = DistributionSpec("student_t", truth, ar1_shape(p, 0.0), df=3.0, t_mode="scale")
sample = draw(spec, n, seed=21)

band_median = sci(sample, level=0.90, B=400, seed=5, method="median")
band_mean = sci(sample, level=0.90, B=400, seed=5, method="mean")

w_med = band_median.upper[0] - band_median.lower[0]
w_mean = band_mean.upper[0] - band_mean.lower[0]
print(f"90% simultaneous half-width: median {w_med/2:.3f} vs mean {w_mean/2:.3f}")
print(f"width ratio mean/median: {w_mean / w_med:.2f}")

covered = ((truth >= band_median.lower) & (truth <= band_median.upper)).all()
print(f"median-based band covers the whole true center: {covered}")

print("\nfirst five median-based intervals:")
for j in range(5):
    marker = "*" if not band_median.lower[j] <= 0.0 <= band_median.upper[j] else " "
    print(f"  coord {j}: [{band_median.lower[j]:7.3f}, {band_median.upper[j]:7.3f}] {marker}")
print("(* = interval excludes zero; exactly the three planted signals)")
