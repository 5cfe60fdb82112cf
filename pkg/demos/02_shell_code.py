"""The shell construction: buckets of points near a random center.

A bucket collects the points that agree with a random binary center in
exactly d0-1 or d0 coordinates.  Everything about this code is exactly
computable: the per-bucket inclusion probability p_star, the capture
probability S_m of a planted pair at Hamming distance m, the Chebyshev
repeat count T that guarantees success 1 - 2*eps, and the resulting
success probability S.  A Monte Carlo run confirms the formulas.
"""

import numpy as np

from bucketing import (
    bernoulli_matrix,
    code_success_exact,
    run_experiment,
    shell_analytics,
    shell_code,
)
from bucketing.simharness import exponent_table

d, d0, p, eps = 12, 7, 0.9, 0.1
sa = shell_analytics(d, d0, p, eps)
print(f"shell code at d={d}, d0={d0}, p={p}, eps={eps}:")
print(f"  bucket probability p_star = {sa.p_star:.6f}  (1716/4096)")
print(f"  set size n = floor(1/p_star) = {sa.n}")
print(f"  repeat count T = {sa.T}")
print(f"  analytic success S = {sa.S:.6f}  (guaranteed >= {1 - 2 * eps})")

code = shell_code(d, d0, sa.T, seed=42)
exact = code_success_exact(code, bernoulli_matrix(p))
print(f"  exact S for one sampled center set = {exact:.6f}")

res = run_experiment(code, bernoulli_matrix(p), d, sa.n, sa.n, 5000, seed=7)
print(f"  empirical S over 5000 trials = {res.empirical_S:.4f} "
      f"+- {res.ci:.4f}")
print(f"  mean comparisons {res.mean_comparisons:.2f} vs work proxy "
      f"W = {res.predicted_W:.2f}")

print("""
Why bother?  The classical approach (bucket on k random coordinates,
retry) costs about n^log2(2/p) comparisons; the shell family drives the
exponent toward 1/p as d grows.  The exact finite-d exponents converge
slowly (the O(log d) terms in ln n and ln T fade like log d / d), but the
trend toward the limit is visible already at desk scale:
""")
print("   d    d0    ln T / ln n    family limit")
rows = exponent_table(0.9, [50, 100, 200, 400], rho=0.1)
for r in rows:
    print(f" {r.d:>4}  {r.d0:>4}      {r.ratio:.4f}        "
          f"{r.limit_ln_T_over_d / r.limit_ln_n_over_d:.4f}")
print(f"\nclassical exponent at p=0.9: {np.log2(2 / 0.9):.4f}; "
      f"the family limit beats it.")
