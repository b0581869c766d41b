"""Training the performance surrogate.

Space-filling samples of the design space are filtered to the feasible
set, evaluated with the wave-resistance code, and fitted with an
anisotropic Gaussian process.  The holdout report says how much to trust
the predictions; the learned length scales say which latent directions
matter for performance.
"""

import numpy as np

from hullspace.generator import DIM_ROLES
from hullspace.surrogate import train_surrogate_pipeline

model, report = train_surrogate_pipeline(600, seed=3)
print(f"training samples : {report.n_train}")
print(f"holdout samples  : {report.n_holdout}")
print(f"holdout RMSE     : {report.rmse:.3e}")
print(f"holdout R^2      : {report.r2:.4f}")

print("\nlearned kernel length scales (short = influential):")
order = np.argsort(model.hyper.length_scales)
for d in order[:8]:
    print(f"  {model.hyper.length_scales[d]:8.3f}  {DIM_ROLES[d]}")

print("\nlearning curve (median RMSE over 3 seeds):")
for n in (100, 200, 400):
    rmses = [train_surrogate_pipeline(n, seed=s)[1].rmse for s in (0, 1, 2)]
    print(f"  n={n:4d}  rmse={np.median(rmses):.3e}")

probe = np.full(20, 0.5)
prediction = model.predict(probe)
print(f"\nprediction at the space centre: mean={prediction.mean:.5f} "
      f"std={np.sqrt(prediction.variance):.2e}")
