"""Work lower bounds from sub-conjugate exponent pairs.

A pair (lambda0, lambda1) with lambda0, lambda1 <= 1 <= lambda0 + lambda1
is sub-conjugate for P when K(Q||P) >= lambda0 K(Q_row) + lambda1 K(Q_col)
for every Q, i.e. I(P, lambda0, lambda1, 1) = 0.  Every such pair yields
W >= S * n0^lambda0 * n1^lambda1 for any bucketing code, and a second
bound optimizes lambda0 ln n0 + lambda1 ln n1 + mu ln S - d * I over the
whole (lambda, mu) region.  Both are checked here against the actual work
of a concrete shell code.
"""

import math

from bucketing import (
    bernoulli_matrix,
    code_success_exact,
    code_work,
    direct_lower_bound,
    is_subconjugate,
    shell_code,
    subconjugate_frontier,
    work_lower_bound,
)

P = bernoulli_matrix(0.9)

print("sub-conjugacy for P = bernoulli(0.9):")
for l0, l1 in ((1.0, 0.0), (0.5, 0.5), (0.5556, 0.5556), (1.0, 1.0)):
    flag, _, value = is_subconjugate(P, l0, l1)
    print(f"  ({l0}, {l1}): {'yes' if flag else 'no'}"
          + ("" if flag else f"  (violated by {value:.4f} nats)"))

l0, l1 = subconjugate_frontier(P, (1.0, 1.0))[:2]
print(f"\ndiagonal frontier point: ({l0:.5f}, {l1:.5f});"
      f" 1/(2p) = {1 / 1.8:.5f}")

print("""
For an independent P the unit corner (1,1) itself is sub-conjugate
(K(Q||P) = K(Q_row) + K(Q_col) + I(Q) when P is a product), which is why
no bucketing code can beat brute force when the planted pair carries no
correlation.
""")

d, n = 12, 4
code = shell_code(12, 7, 13, seed=42)
s = code_success_exact(code, P)
w = code_work(code, n, n)
direct = direct_lower_bound(P, n, n, s, n_directions=64)
wb = work_lower_bound([P] * d, n, n, s, n_starts=8)
print(f"shell code instance: S = {s:.4f}, W = {w:.3f}")
print(f"  frontier bound:  W >= {direct:.3f}")
print(f"  exponent bound:  ln W >= {wb.ln_w:.3f}  "
      f"(ln W = {math.log(w):.3f}), attained at "
      f"(l0, l1, mu) = ({wb.lambda0:.2f}, {wb.lambda1:.2f}, {wb.mu:.2f})")
