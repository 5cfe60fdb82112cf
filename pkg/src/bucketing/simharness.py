"""Monte Carlo validation of the code analytics, plus baseline comparisons.

Experiments sample fresh planted-pair datasets, push every point through a
code's bucket predicates, and compare the observed success frequency and
operation counts against the exact formulas.  Success means capturing the
planted pair; spurious near pairs do not count.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .codes import BucketingCode, code_success_exact, shell_analytics
from .errors import DimensionMismatch, DomainError, TooLarge
from .probmodel import ProbabilityMatrix, generate_dataset, make_matrix
from .rng import derive_rng

CSV_FIELDS = [
    "experiment_id", "kind", "d", "d0", "p", "n0", "n1", "T", "trials",
    "empirical_S", "ci", "predicted_S", "mean_comparisons", "predicted_W",
    "seed",
]


@dataclass(frozen=True)
class ExperimentResult:
    """Aggregate of a seeded batch of planted-pair trials."""

    trials: int
    successes: int
    empirical_S: float
    ci: float  # 95% halfwidth, normal approximation with continuity floor
    mean_comparisons: float
    mean_lookups: float
    predicted_S: float  # exact S when computable, else nan
    predicted_W: float
    seed: int


@dataclass(frozen=True)
class ExponentRow:
    """One row of a shell-family exponent sweep at fixed rho = 2*d0/d - 1."""

    d: int
    d0: int
    ln_n_over_d: float
    ln_T_over_d: float
    ratio: float  # ln T / ln n, the work exponent of the family member
    rho: float
    limit_ln_n_over_d: float
    limit_ln_T_over_d: float


def _trial_seed(seed: int, t: int) -> int:
    return int(derive_rng(seed, "trial", t).integers(1 << 62))


def run_experiment(
    code: BucketingCode,
    p: ProbabilityMatrix,
    d: int,
    n0: int,
    n1: int,
    trials: int,
    seed: int,
) -> ExperimentResult:
    """Estimate S and operation counts over `trials` independent datasets.

    Each trial draws a fresh dataset from its own derived sub-stream, so the
    result is a pure function of the arguments.  Lookups count bucket
    memberships over all points; comparisons count co-bucketed point pairs
    summed over buckets.
    """
    if trials < 1:
        raise DomainError(f"trials={trials} must be >= 1")
    if d != code.d:
        raise DimensionMismatch(f"dataset d={d} but code has d={code.d}")
    successes = 0
    comparisons = 0.0
    lookups = 0.0
    for t in range(trials):
        ds = generate_dataset(p, d, n0, n1, _trial_seed(seed, t))
        sets0 = code.assign(ds.x0_points, 0)
        sets1 = code.assign(ds.x1_points, 1)
        lookups += sum(len(s) for s in sets0) + sum(len(s) for s in sets1)
        c0 = Counter()
        for ids in sets0:
            c0.update(ids)
        c1 = Counter()
        for ids in sets1:
            c1.update(ids)
        comparisons += sum(c0[b] * c1[b] for b in c0.keys() & c1.keys())
        i0, i1 = ds.planted
        if set(sets0[i0]) & set(sets1[i1]):
            successes += 1
    phat = successes / trials
    var = max(phat * (1.0 - phat), 0.25 / trials)
    try:
        predicted = code_success_exact(code, p)
    except TooLarge:
        predicted = math.nan
    return ExperimentResult(
        trials=trials,
        successes=successes,
        empirical_S=phat,
        ci=1.96 * math.sqrt(var / trials),
        mean_comparisons=comparisons / trials,
        mean_lookups=lookups / trials,
        predicted_S=predicted,
        predicted_W=code.work(n0, n1),
        seed=seed,
    )


def baseline_exponents(p: float) -> dict:
    """Work exponents of the known algorithms at agreement probability p.

    classical: bucket by k = log2 n coordinates and retry, W ~ n^log2(2/p);
    improved: the shell-family limit W ~ n^(1/p);
    indyk_motwani: W ~ n^(3-2p);
    mnp_lower: the cell-probe lower bound n^(2/(1+e^(2p-2))).
    """
    if not 0.5 < p < 1.0:
        raise DomainError(f"p={p} must lie strictly inside (1/2, 1)")
    return {
        "classical": math.log2(2.0 / p),
        "improved": 1.0 / p,
        "indyk_motwani": 3.0 - 2.0 * p,
        "mnp_lower": 2.0 / (1.0 + math.exp(2.0 * p - 2.0)),
    }


def _binary_entropy_shift(q: float) -> float:
    """I(q) = q ln 2q + (1-q) ln 2(1-q); the exponent rate function."""
    out = 0.0
    if q > 0:
        out += q * math.log(2.0 * q)
    if q < 1:
        out += (1.0 - q) * math.log(2.0 * (1.0 - q))
    return out


def exponent_table(p: float, d_list, rho: float,
                   epsilon: float = 0.1) -> list:
    """Exact shell exponents ln T / ln n along a fixed-rho family.

    d0 = round((1+rho)d/2); ln n = -ln p_star (the continuum set size, not
    its floor); ln T from the Chebyshev repeat count.  Each row also carries
    the d -> infinity limits I((1+rho)/2) and p*I((1+rho/p)/2) for reference.
    """
    if not 0.5 < p < 1.0:
        raise DomainError(f"p={p} must lie strictly inside (1/2, 1)")
    if not 0.0 <= rho < p:
        raise DomainError(f"need 0 <= rho < p, got rho={rho}")
    limit_n = _binary_entropy_shift((1.0 + rho) / 2.0)
    limit_t = p * _binary_entropy_shift((1.0 + rho / p) / 2.0)
    rows = []
    for d in d_list:
        d0 = round((1.0 + rho) * d / 2.0)
        if not 1 <= d0 <= d:
            raise DomainError(f"d0={d0} outside [1, {d}] at d={d}, rho={rho}")
        sa = shell_analytics(d, d0, p, epsilon)
        ln_n = -math.log(sa.p_star)
        ln_t = math.log(sa.T)
        rows.append(
            ExponentRow(
                d=d, d0=d0,
                ln_n_over_d=ln_n / d,
                ln_T_over_d=ln_t / d,
                ratio=ln_t / ln_n,
                rho=2.0 * d0 / d - 1.0,
                limit_ln_n_over_d=limit_n,
                limit_ln_T_over_d=limit_t,
            )
        )
    return rows


def cauchy_baseline(samples: int, seed: int) -> float:
    """Empirical Prob{sign(C1+C2) = sign(C1+C3)} for i.i.d. standard Cauchy.

    Cauchy variates come from the inverse CDF tan(pi*(u - 1/2)); the exact
    value of the probability is 2/3.
    """
    if samples < 10**4:
        raise DomainError(f"samples={samples} below the 10^4 floor")
    u = derive_rng(seed, "cauchy-triples").uniform(size=(samples, 3))
    c = np.tan(np.pi * (u - 0.5))
    agree = np.sign(c[:, 0] + c[:, 1]) == np.sign(c[:, 0] + c[:, 2])
    return float(agree.mean())


def sparse_matrix(eps: float) -> ProbabilityMatrix:
    """The sparse-bits coordinate distribution [[1-3e, e], [e, e]]."""
    if not 0.0 < eps < 1.0 / 3.0:
        raise DomainError(f"eps={eps} outside (0, 1/3)")
    return make_matrix([[1.0 - 3.0 * eps, eps], [eps, eps]])


def _first_ones_key(x: np.ndarray, order: np.ndarray, k: int):
    ones = order[x[order] == 1]
    if len(ones) < k:
        return None
    return tuple(ones[:k].tolist())


def sparse_hash_experiment(eps: float, k: int, n: int, trials: int,
                           seed: int) -> dict:
    """Compare two hashes on sparse-bits data: first k ones vs Cauchy signs.

    The first-k-ones hash keys each point by the coordinate positions of its
    first k ones under a random coordinate order.  The Cauchy hash keys each
    point by ceil(log2 n) projection sign bits.  For each method the report
    carries the per-try planted-pair collision frequency, the mean number of
    candidate comparisons, and the implied work exponent
    ln(mean_comparisons / success) / ln(n); the analytic targets are
    1 + ln3/ln(1/2*eps) and log2(3).
    """
    if trials < 1 or n < 2 or k < 1:
        raise DomainError(f"need trials >= 1, n >= 2, k >= 1")
    p = sparse_matrix(eps)
    d = max(int(math.ceil(2.0 * k / eps)), 4 * k)
    bits = max(1, math.ceil(math.log2(n)))
    tallies = {
        name: {"hits": 0, "comparisons": 0.0}
        for name in ("first_k_ones", "cauchy")
    }

    def record(name, keys0, keys1, planted):
        c0 = Counter(kk for kk in keys0 if kk is not None)
        c1 = Counter(kk for kk in keys1 if kk is not None)
        tallies[name]["comparisons"] += sum(
            c0[b] * c1[b] for b in c0.keys() & c1.keys()
        )
        i0, i1 = planted
        if keys0[i0] is not None and keys0[i0] == keys1[i1]:
            tallies[name]["hits"] += 1

    for t in range(trials):
        ds = generate_dataset(p, d, n, n, _trial_seed(seed, t))
        rng = derive_rng(seed, "sparse-hash", t)
        order = rng.permutation(d)
        record(
            "first_k_ones",
            [_first_ones_key(x, order, k) for x in ds.x0_points],
            [_first_ones_key(x, order, k) for x in ds.x1_points],
            ds.planted,
        )
        proj = np.tan(np.pi * (rng.uniform(size=(bits, d)) - 0.5))
        s0 = np.sign(ds.x0_points.astype(float) @ proj.T)
        s1 = np.sign(ds.x1_points.astype(float) @ proj.T)
        record(
            "cauchy",
            [tuple(row.tolist()) for row in s0],
            [tuple(row.tolist()) for row in s1],
            ds.planted,
        )

    out = {"eps": eps, "k": k, "n": n, "d": d, "trials": trials, "seed": seed}
    for name, tally in tallies.items():
        success = tally["hits"] / trials
        mean_cmp = tally["comparisons"] / trials
        if success > 0 and mean_cmp > 0:
            exponent = math.log(mean_cmp / success) / math.log(n)
        else:
            exponent = math.inf
        out[name] = {
            "success": success,
            "mean_comparisons": mean_cmp,
            "work_exponent": exponent,
        }
    out["predicted_exponents"] = {
        "first_k_ones": 1.0 + math.log(3.0) / math.log(1.0 / (2.0 * eps)),
        "cauchy": math.log2(3.0),
    }
    return out


def result_row(experiment_id: str, code: BucketingCode, p_value,
               n0: int, n1: int, result: ExperimentResult) -> dict:
    """Flatten one experiment into the CSV schema."""
    desc = code.descriptor()
    return {
        "experiment_id": experiment_id,
        "kind": desc["kind"],
        "d": code.d,
        "d0": desc.get("params", {}).get("d0", ""),
        "p": p_value,
        "n0": n0,
        "n1": n1,
        "T": code.T,
        "trials": result.trials,
        "empirical_S": repr(result.empirical_S),
        "ci": repr(result.ci),
        "predicted_S": repr(result.predicted_S),
        "mean_comparisons": repr(result.mean_comparisons),
        "predicted_W": repr(result.predicted_W),
        "seed": result.seed,
    }


def write_csv(rows, out=None) -> str:
    """Serialize experiment rows; returns the CSV text (and writes `out`)."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text
