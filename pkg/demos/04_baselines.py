"""Baseline algorithms: exponents, Cauchy projections, sparse bits.

Known work exponents for the symmetric Bernoulli planted-pair problem,
the sign-agreement probability of Cauchy random projections (the reason
they hash related sparse points together only 2/3 of the time per bit),
and a head-to-head run of the first-k-ones hash against the Cauchy sign
hash on sparse data.
"""

import math

from bucketing import baseline_exponents, cauchy_baseline
from bucketing.simharness import sparse_hash_experiment

print("work exponents (W ~ n^x) at several agreement probabilities:")
print("   p    classical  improved  Indyk-Motwani  MNP lower bound")
for p in (0.6, 0.75, 0.9):
    rec = baseline_exponents(p)
    print(f" {p:.2f}    {rec['classical']:.4f}    {rec['improved']:.4f}"
          f"      {rec['indyk_motwani']:.4f}         {rec['mnp_lower']:.4f}")

print("""
The improved exponent 1/p sits strictly below the classical log2(2/p)
for every p in (1/2, 1) and below the Indyk-Motwani worst-case rate.

Cauchy projections: two related sparse points share a Cauchy sum C1 and
differ by independent sums C2, C3, so the per-bit collision probability is
Prob{sign(C1+C2) = sign(C1+C3)} = 2/3 exactly:
""")
freq = cauchy_baseline(10**5, seed=3)
print(f"empirical over 10^5 triples: {freq:.4f}  (2/3 = {2 / 3:.4f})")

print("""
With k = log2(n) sign bits per bucket the planted pair survives all k
bits with probability (2/3)^k, so the work blows up to ~ n^log2(3).
The plain first-k-ones hash does better on sparse data:
""")
rep = sparse_hash_experiment(eps=0.05, k=2, n=32, trials=400, seed=11)
for method in ("first_k_ones", "cauchy"):
    r = rep[method]
    print(f"  {method:>13}: success/try = {r['success']:.3f}, "
          f"comparisons/try = {r['mean_comparisons']:.1f}, "
          f"work exponent ~ {r['work_exponent']:.2f}")
pred = rep["predicted_exponents"]
print(f"  analytic targets: first_k_ones ~ {pred['first_k_ones']:.2f}, "
      f"cauchy ~ {pred['cauchy']:.2f} (= log2 3 = {math.log2(3):.2f})")
