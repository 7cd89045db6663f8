"""Sampled matrix product with a certified spectral-norm error.

Columns are drawn with probability proportional to ||a_i|| ||b_i||. The
number of draws needed for relative error eps depends on the stable ranks of
A and B rather than on the number of columns.
"""

import math

import numpy as np

from mtails import rmm, specmat

rng = np.random.default_rng(0)
m = 2000
# Low stable rank: a few strong directions plus weak noise.
A = rng.standard_normal((30, 3)) @ rng.standard_normal((3, m)) + 0.05 * rng.standard_normal((30, m))
B = rng.standard_normal((20, 3)) @ rng.standard_normal((3, m)) + 0.05 * rng.standard_normal((20, m))

plan = rmm.build_plan(A, B)
print(f"m = {m} columns, stable ranks {plan.stable_rank_a:.3f} and {plan.stable_rank_b:.3f}")

eps, delta = 0.5, 0.1
n = rmm.sample_size(plan.stable_rank_a, plan.stable_rank_b, eps, delta)
print(f"columns needed for eps = {eps}, delta = {delta}: n = {n}")

exact = A @ B.T
scale = specmat.spectral_norm(A) * specmat.spectral_norm(B)
errs = [specmat.spectral_norm(rmm.approx_product(A, B, plan, n, seed) - exact) / scale for seed in range(200)]
print(f"relative error over 200 seeds: median {np.median(errs):.4f}, max {np.max(errs):.4f}")

prec = rmm.certificate_precise(A, B, n, math.log(1 / delta))
simp = rmm.certificate_simplified_for(A, B, n, math.log(1 / delta))
print(f"precise certificate:    {prec.relative_deviation:.4f} w.p. <= {prec.probability.value:.4g}")
print(f"simplified certificate: {simp.relative_deviation:.4f} w.p. <= {simp.probability.value:.4g}")
# The precise multiplier grows with Z / (||A|| ||B||); when it is large the
# precise form needs a bigger t, while the simplified form folds it into log(4 sqrt(rA rB)).
print(f"precise multiplier k = {prec.k_coeff:.2f}")
