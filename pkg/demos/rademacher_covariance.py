"""Bernstein certificate for a Rademacher covariance, checked by simulation.

With x uniform on {-1, +1}^d, the matrix X = x x^T - I has E[X] = 0,
lambda_max(X) = d - 1 and E[X^2] = (d - 1) I, so the Bernstein parameters
are known exactly: b = sigma2 = d - 1 and intrinsic dimension k = d.
"""

import numpy as np

from mtails import bounds
from mtails.harness import CertSpec, RademacherOuter, mc_validate

d, n = 4, 100
ens = RademacherOuter(d)
params = bounds.params_from_moments(d - 1, ens.exact_moments().second, n)
print(f"d = {d}, n = {n}: b = {params.b_bar}, sigma2 = {params.sigma2_bar}, k = {params.k_bar}")

for t in (4.0, 6.0, 8.0):
    cert = bounds.bernstein_tail(params, t)
    rep = mc_validate(ens, CertSpec("bernstein", n, t), trials=20000, seed=1)
    ratio = "inf" if rep.ratio is None else f"{rep.ratio:.1f}"
    print(f"t = {t}: Pr[lambda_max > {cert.deviation:.4f}] <= {cert.probability.value:.4g};"
          f" observed {rep.empirical:.5f} (bound / observed = {ratio})")

# The certificate at a chosen confidence level.
c = bounds.bernstein_deviation_at_confidence(params, 0.01)
print(f"\nwith probability >= 0.99, lambda_max(mean of X_i) <= {c.deviation:.4f} (t = {c.t:.4f})")
