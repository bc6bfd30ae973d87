"""
Logarithmic entanglement from an AdS schedule
=============================================

Rates that fall from the critical value towards zero reproduce the hyperbolic
plane; the final profile then grows as alpha ln|A| with alpha increasing in
the AdS radius, and I3 of quarters tracks -2 ln2 alpha.
"""

import numpy as np

from measgeom.experiments import ads_i3, ads_profile

L = 64
radii = [2.0, 4.0, 8.0]
prof = ads_profile(L, radii, samples=30, master_seed=5)
for l, a, e, rr in zip(radii, prof.alpha, prof.alpha_err, prof.rel_rms):
    print(f"l={l:4.1f}  alpha = {a:.3f} +- {e:.3f}  relative RMS {rr:.3f}")
fit = prof.alpha_fit
print(f"alpha = {fit.slope:.3f} l + {fit.intercept:.3f}  (R2 = {fit.r_squared:.3f})")

i3 = ads_i3(L, radii, 30, runs=prof.runs, alpha_fit=fit)
print("I3:", np.round(i3.i3, 2).tolist())
print(f"-2 ln2 a / a' = {i3.ratio:.2f} (1 for an ideal geometric state)")
