"""Bucketing-code constructions and their exact success/work analytics.

A bucketing code is a data-independent family of T bucket pairs
(B0_t, B1_t); a candidate point pair is compared iff some bucket contains
both sides.  Buckets are kept as predicates plus analytically known
inclusion probabilities and are never materialized as point sets -- for
moderate dimension the array-of-lists representation would not fit in
memory, and everything needed (work, success, simulation) follows from the
predicates and the probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DimensionMismatch, DomainError, RoundingInfeasible, TooLarge
from .probmodel import ProbabilityMatrix
from .rng import derive_rng

ENUMERATION_GUARD = 1 << 26  # max b0^d * b1^d pair states for exact success
BUCKET_INDEX_GUARD = 1 << 20  # max materialized bucket count / DP table size


def _comb0(n: int, k: int) -> int:
    """Binomial coefficient that is 0 outside 0 <= k <= n."""
    if k < 0 or k > n or n < 0:
        return 0
    return comb(n, k)


class BucketingCode:
    """Base interface: dimension, bucket count, membership, probabilities."""

    d: int
    seed: int

    @property
    def T(self) -> int:
        raise NotImplementedError

    def side0_probs(self) -> np.ndarray:
        """Per-bucket marginal measure of B0_t (length T)."""
        raise NotImplementedError

    def side1_probs(self) -> np.ndarray:
        raise NotImplementedError

    def assign(self, points: np.ndarray, side: int) -> list:
        """Bucket ids containing each point; a list of sorted int lists."""
        raise NotImplementedError

    def contains(self, t: int, x: np.ndarray, side: int) -> bool:
        sets = self.assign(np.asarray(x, dtype=np.uint8)[None, :], side)
        return t in sets[0]

    def work(self, n0: float, n1: float) -> float:
        """W = sum_t max(n0 p0_t, n1 p1_t, n0 p0_t n1 p1_t)."""
        a = self.side0_probs()
        b = self.side1_probs()
        return float(np.sum(np.maximum(np.maximum(n0 * a, n1 * b), n0 * a * n1 * b)))

    def success_exact(self, p: ProbabilityMatrix):
        """Closed-form planted-pair success probability, or None."""
        return None

    def descriptor(self) -> dict:
        raise NotImplementedError


class FullSpaceCode(BucketingCode):
    """A single bucket pair covering both full spaces (S = 1, W = n0*n1)."""

    def __init__(self, d: int, seed: int = 0):
        self.d = d
        self.seed = seed

    @property
    def T(self) -> int:
        return 1

    def side0_probs(self) -> np.ndarray:
        return np.ones(1)

    def side1_probs(self) -> np.ndarray:
        return np.ones(1)

    def assign(self, points, side):
        return [[0] for _ in range(len(points))]

    def success_exact(self, p):
        return 1.0

    def descriptor(self):
        return {"kind": "full_space", "d": self.d, "T": 1, "seed": self.seed,
                "params": {}}


class EmptyCode(BucketingCode):
    """A code with no buckets (S = 0, W = 0)."""

    def __init__(self, d: int, seed: int = 0):
        self.d = d
        self.seed = seed

    @property
    def T(self) -> int:
        return 0

    def side0_probs(self) -> np.ndarray:
        return np.zeros(0)

    def side1_probs(self) -> np.ndarray:
        return np.zeros(0)

    def assign(self, points, side):
        return [[] for _ in range(len(points))]

    def success_exact(self, p):
        return 0.0

    def descriptor(self):
        return {"kind": "empty", "d": self.d, "T": 0, "seed": self.seed,
                "params": {}}


class ClassicalCode(BucketingCode):
    """Agreement on k random coordinates, repeated over independent draws.

    Binary alphabet with uniform marginals.  Each draw t picks a sorted
    k-subset of coordinates and partitions each side into 2^k pattern
    buckets; bucket id = draw * 2^k + pattern.  Every bucket has side
    probability 2^-k on both sides.
    """

    def __init__(self, d: int, k: int, draws: int, seed: int):
        if not 1 <= k <= d:
            raise DomainError(f"need 1 <= k <= d, got k={k}, d={d}")
        if k > 62:
            raise TooLarge(f"k={k} exceeds the 62-bit pattern guard")
        self.d = d
        self.k = k
        self.draws = draws
        self.seed = seed
        self.coords = np.stack(
            [
                np.sort(derive_rng(seed, "classical-draw", t).choice(d, k, replace=False))
                for t in range(draws)
            ]
        ) if draws else np.zeros((0, k), dtype=int)
        self._weights = (1 << np.arange(k, dtype=np.int64))

    @property
    def T(self) -> int:
        return self.draws << self.k

    def side0_probs(self) -> np.ndarray:
        if self.T > BUCKET_INDEX_GUARD:
            raise TooLarge(f"{self.T} buckets exceed the materialization guard")
        return np.full(self.T, 2.0**-self.k)

    side1_probs = side0_probs

    def bucket_keys(self, points: np.ndarray) -> np.ndarray:
        """(n, draws) bucket id of each point under each draw."""
        pts = np.asarray(points, dtype=np.int64)
        patterns = pts[:, self.coords.reshape(-1)].reshape(
            len(pts), self.draws, self.k
        )
        ids = patterns @ self._weights
        ids += (np.arange(self.draws, dtype=np.int64) << self.k)[None, :]
        return ids

    def assign(self, points, side):
        keys = self.bucket_keys(points)
        return [sorted(row.tolist()) for row in keys]

    def work(self, n0, n1):
        per = max(n0 * 2.0**-self.k, n1 * 2.0**-self.k, n0 * n1 * 4.0**-self.k)
        return self.draws * (1 << self.k) * per

    def descriptor(self):
        return {"kind": "classical", "d": self.d, "T": self.T, "seed": self.seed,
                "params": {"k": self.k, "draws": self.draws}}


class ShellCode(BucketingCode):
    """Agreement with a random center in exactly d0-1 or d0 coordinates.

    Binary alphabet with uniform marginals; every bucket has side
    probability p_star = [C(d,d0-1) + C(d,d0)] 2^-d on both sides.
    """

    def __init__(self, d: int, d0: int, T: int, seed: int):
        if not 1 <= d0 <= d:
            raise DomainError(f"need 1 <= d0 <= d, got d0={d0}, d={d}")
        self.d = d
        self.d0 = d0
        self._T = T
        self.seed = seed
        self.centers = derive_rng(seed, "shell-centers").integers(
            0, 2, size=(T, d), dtype=np.uint8
        )
        self.p_star = (_comb0(d, d0 - 1) + _comb0(d, d0)) / (1 << d)

    @property
    def T(self) -> int:
        return self._T

    def side0_probs(self) -> np.ndarray:
        return np.full(self._T, self.p_star)

    side1_probs = side0_probs

    def agreement_counts(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.uint8)
        return (pts[:, None, :] == self.centers[None, :, :]).sum(axis=2)

    def assign(self, points, side):
        agree = self.agreement_counts(points)
        member = (agree == self.d0 - 1) | (agree == self.d0)
        return [np.nonzero(row)[0].tolist() for row in member]

    def descriptor(self):
        return {"kind": "shell", "d": self.d, "T": self._T, "seed": self.seed,
                "params": {"d0": self.d0}}


@dataclass(frozen=True)
class ShellAnalytics:
    """Exact analytics of the shell construction at given (d, d0, p, eps).

    capture[m] is the probability S_m that one random center captures a
    planted pair disagreeing in exactly m coordinates; T is chosen so the
    Chebyshev argument guarantees success probability S >= 1 - 2*eps.
    """

    d: int
    d0: int
    p_star: float
    capture: tuple
    n: int
    T: int
    S: float
    epsilon: float


def shell_capture_probability(d: int, d0: int, m: int) -> float:
    """S_m: both points of a distance-m pair agree with a random center in
    exactly d0-1 or d0 coordinates.  Exact integer arithmetic."""
    num = _comb0(m, m // 2) * (
        _comb0(d - m, d0 - (m + 1) // 2) + _comb0(d - m, d0 - (m + 2) // 2)
    )
    return num / (1 << d)


def shell_analytics(d: int, d0: int, p: float, epsilon: float) -> ShellAnalytics:
    """Success/work analytics for the shell code under bernoulli(p) data."""
    if not 1 <= d0 <= d:
        raise DomainError(f"need 1 <= d0 <= d, got d0={d0}, d={d}")
    if not 0.5 < p < 1.0:
        raise DomainError(f"p={p} must lie strictly inside (1/2, 1)")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon={epsilon} outside (0, 1)")
    capture = tuple(shell_capture_probability(d, d0, m) for m in range(d + 1))
    p_star = (_comb0(d, d0 - 1) + _comb0(d, d0)) / (1 << d)
    width = math.sqrt(p * (1 - p) * d / epsilon)
    center = (1 - p) * d
    window = [m for m in range(d + 1) if abs(m - center) < width]
    floor_sm = min(capture[m] for m in window)
    if floor_sm <= 0:
        raise DomainError(
            f"capture probability vanishes inside the Chebyshev window "
            f"(d={d}, d0={d0}, p={p}, eps={epsilon})"
        )
    t_count = math.ceil(-math.log(epsilon) / floor_sm)
    s_total = 0.0
    for m in range(d + 1):
        # binomial weight in log space; C(d, m) alone can overflow a float
        weight = math.exp(
            math.lgamma(d + 1) - math.lgamma(m + 1) - math.lgamma(d - m + 1)
            + (d - m) * math.log(p) + m * math.log(1 - p)
        )
        if capture[m] >= 1.0:
            hit = 1.0
        else:
            hit = -math.expm1(t_count * math.log1p(-capture[m]))
        s_total += weight * hit
    n = int(1.0 / p_star)
    return ShellAnalytics(
        d=d, d0=d0, p_star=p_star, capture=capture, n=n, T=t_count,
        S=s_total, epsilon=epsilon,
    )


def classical_code(d: int, k: int, T: int = 1, seed: int = 0) -> ClassicalCode:
    return ClassicalCode(d, k, T, seed)


def shell_code(d: int, d0: int, T: int, seed: int = 0) -> ShellCode:
    return ShellCode(d, d0, T, seed)


def full_space_code(d: int) -> FullSpaceCode:
    return FullSpaceCode(d)


def empty_code(d: int) -> EmptyCode:
    return EmptyCode(d)


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Apportion `total` units proportionally; each |count - w*total| < 1.

    Ties between equal fractional parts break by flat (block, row, col)
    index order.
    """
    scaled = weights * total
    base = np.floor(scaled).astype(int)
    short = total - int(base.sum())
    if short < 0 or short > weights.size:
        raise RoundingInfeasible(
            f"cannot apportion {total} units over {weights.size} cells"
        )
    frac = scaled - base
    order = np.lexsort((np.arange(weights.size), -frac))
    base[order[:short]] += 1
    return base


def _log_multinomial(counts) -> float:
    c = [int(x) for x in counts]
    return math.lgamma(sum(c) + 1) - sum(math.lgamma(x + 1) for x in c)


def _log_type_probability(counts: np.ndarray, probs: np.ndarray) -> float:
    """ln P[multinomial sample realizes exactly `counts`] over probs."""
    counts = counts.ravel()
    probs = probs.ravel()
    if np.any((counts > 0) & (probs <= 0)):
        return -math.inf
    mask = counts > 0
    return _log_multinomial(counts) + float(
        np.sum(counts[mask] * np.log(probs[mask]))
    )


class TypeClassCode(BucketingCode):
    """Type-class buckets: fixed per-block symbol-count compositions.

    Block i occupies a contiguous run of d_{i,**} coordinates (after a
    per-bucket random permutation); side 0 requires exactly d_{i,j*}
    occurrences of symbol j in block i, side 1 the column counts d_{i,*k}.
    Bucket 0 uses the identity permutation, buckets 1..T-1 independent
    uniform permutations.
    """

    def __init__(self, p: ProbabilityMatrix, d: int, r_blocks, seed: int,
                 T: int | None = None):
        blocks = np.stack([np.asarray(getattr(b, "entries", b), float)
                           for b in r_blocks])
        if np.any(blocks < 0):
            raise DomainError("block masses must be nonnegative")
        if abs(blocks.sum() - 1.0) > 1e-9:
            raise DomainError(f"blocks have total mass {blocks.sum()}, expected 1")
        self.p = p
        self.d = d
        self.seed = seed
        self.block_counts = _largest_remainder(blocks.reshape(-1), d).reshape(
            blocks.shape
        )
        if np.any(np.abs(self.block_counts - blocks * d) >= 1.0):
            raise RoundingInfeasible("apportionment drifted a full unit")
        self.row_counts = self.block_counts.sum(axis=2)  # d_{i,j*}
        self.col_counts = self.block_counts.sum(axis=1)  # d_{i,*k}
        self.block_sizes = self.block_counts.sum(axis=(1, 2))  # d_{i,**}
        self.boundaries = np.concatenate([[0], np.cumsum(self.block_sizes)])

        self._p0 = math.exp(
            sum(
                _log_type_probability(self.row_counts[i], p.row_marginals)
                for i in range(len(blocks))
            )
        )
        self._p1 = math.exp(
            sum(
                _log_type_probability(self.col_counts[i], p.col_marginals)
                for i in range(len(blocks))
            )
        )
        ln_u = _log_type_probability(self.block_counts.sum(axis=0), p.entries)
        ln_v = sum(
            _log_type_probability(self.block_counts[i], p.entries)
            for i in range(len(blocks))
        )
        if not math.isfinite(ln_u) or not math.isfinite(ln_v):
            raise DomainError("block counts put mass outside the support of P")
        self.U = math.exp(ln_u)
        self.V = math.exp(ln_v)
        self._T = T if T is not None else max(1, math.ceil(math.exp(ln_u - ln_v)))
        perms = [np.arange(d)]
        for t in range(1, self._T):
            perms.append(derive_rng(seed, "typeclass-perm", t).permutation(d))
        self.perms = np.stack(perms)

    @property
    def T(self) -> int:
        return self._T

    def side0_probs(self) -> np.ndarray:
        return np.full(self._T, self._p0)

    def side1_probs(self) -> np.ndarray:
        return np.full(self._T, self._p1)

    def success_lower_bound(self) -> float:
        """E[S] >= U (1 - (1 - V/U)^T) over the permutation randomness."""
        ratio = min(self.V / self.U, 1.0) if self.U > 0 else 0.0
        return self.U * -math.expm1(self._T * math.log1p(-ratio)) if ratio < 1 \
            else self.U

    def _member(self, x: np.ndarray, perm: np.ndarray, side: int) -> bool:
        targets = self.row_counts if side == 0 else self.col_counts
        width = targets.shape[1]
        for i in range(len(self.block_sizes)):
            seg = x[perm[self.boundaries[i]:self.boundaries[i + 1]]]
            if not np.array_equal(np.bincount(seg, minlength=width), targets[i]):
                return False
        return True

    def assign(self, points, side):
        pts = np.asarray(points, dtype=np.int64)
        return [
            [t for t in range(self._T) if self._member(x, self.perms[t], side)]
            for x in pts
        ]

    def descriptor(self):
        return {
            "kind": "typeclass", "d": self.d, "T": self._T, "seed": self.seed,
            "params": {
                "matrix": self.p.entries.tolist(),
                "block_counts": self.block_counts.tolist(),
            },
        }


def typeclass_code(p: ProbabilityMatrix, d: int, r_blocks, seed: int = 0,
                   T: int | None = None) -> TypeClassCode:
    return TypeClassCode(p, d, r_blocks, seed, T)


class TensorPowerCode(BucketingCode):
    """k-fold tensor power: composite buckets indexed lazily by k-tuples.

    Dimension k*d; bucket (t_1..t_k) contains a point iff every block
    belongs to its component bucket; side probabilities multiply.  The
    T^k buckets are never materialized.
    """

    def __init__(self, base: BucketingCode, k: int):
        if k < 1:
            raise DomainError(f"tensor power k={k} must be >= 1")
        self.base = base
        self.k = k
        self.d = base.d * k
        self.seed = base.seed

    @property
    def T(self) -> int:
        return self.base.T**self.k

    def side0_probs(self) -> np.ndarray:
        if self.T > BUCKET_INDEX_GUARD:
            raise TooLarge(f"{self.T} composite buckets exceed the guard")
        probs = self.base.side0_probs()
        out = np.ones(1)
        for _ in range(self.k):
            out = np.multiply.outer(out, probs).reshape(-1)
        return out

    def side1_probs(self) -> np.ndarray:
        if self.T > BUCKET_INDEX_GUARD:
            raise TooLarge(f"{self.T} composite buckets exceed the guard")
        probs = self.base.side1_probs()
        out = np.ones(1)
        for _ in range(self.k):
            out = np.multiply.outer(out, probs).reshape(-1)
        return out

    def assign(self, points, side):
        pts = np.asarray(points)
        base_t = self.base.T
        out = []
        for x in pts:
            per_block = [
                self.base.assign(
                    x[i * self.base.d:(i + 1) * self.base.d][None, :], side
                )[0]
                for i in range(self.k)
            ]
            count = 1
            for ids in per_block:
                count *= len(ids)
                if count > BUCKET_INDEX_GUARD:
                    raise TooLarge("composite bucket list exceeds the guard")
            composite = [0]
            for ids in per_block:
                composite = [c * base_t + t for c in composite for t in ids]
            out.append(sorted(composite))
        return out

    def work(self, n0, n1):
        a = self.base.side0_probs()
        b = self.base.side1_probs()
        pairs: dict[tuple, float] = {(1.0, 1.0): 1.0}
        base_pairs: dict[tuple, float] = {}
        for ai, bi in zip(a, b):
            key = (float(ai), float(bi))
            base_pairs[key] = base_pairs.get(key, 0.0) + 1.0
        for _ in range(self.k):
            nxt: dict[tuple, float] = {}
            for (pa, pb), c in pairs.items():
                for (qa, qb), m in base_pairs.items():
                    key = (pa * qa, pb * qb)
                    nxt[key] = nxt.get(key, 0.0) + c * m
            if len(nxt) > BUCKET_INDEX_GUARD:
                raise TooLarge("work accumulation table exceeds the guard")
            pairs = nxt
        return float(
            sum(
                c * max(n0 * pa, n1 * pb, n0 * pa * n1 * pb)
                for (pa, pb), c in pairs.items()
            )
        )

    def success_exact(self, p):
        base_s = code_success_exact(self.base, p)
        return base_s**self.k

    def descriptor(self):
        return {"kind": "tensor_power", "d": self.d, "T": self.T,
                "seed": self.seed,
                "params": {"k": self.k, "base": self.base.descriptor()}}


class ConcatenatedCode(BucketingCode):
    """Disjoint union of two codes' bucket lists (T = T1 + T2).

    mode="blocks": dimensions add and each code acts on its own coordinate
    block.  mode="union": both codes act on the same coordinates (equal
    dimensions required).
    """

    def __init__(self, c1: BucketingCode, c2: BucketingCode, mode: str = "blocks"):
        if mode not in ("blocks", "union"):
            raise DomainError(f"unknown concatenation mode {mode!r}")
        if mode == "union" and c1.d != c2.d:
            raise DimensionMismatch(
                f"union mode needs equal dimensions, got {c1.d} and {c2.d}"
            )
        self.c1 = c1
        self.c2 = c2
        self.mode = mode
        self.d = c1.d + c2.d if mode == "blocks" else c1.d
        self.seed = c1.seed

    @property
    def T(self) -> int:
        return self.c1.T + self.c2.T

    def side0_probs(self) -> np.ndarray:
        return np.concatenate([self.c1.side0_probs(), self.c2.side0_probs()])

    def side1_probs(self) -> np.ndarray:
        return np.concatenate([self.c1.side1_probs(), self.c2.side1_probs()])

    def assign(self, points, side):
        pts = np.asarray(points)
        if self.mode == "blocks":
            first = self.c1.assign(pts[:, :self.c1.d], side)
            second = self.c2.assign(pts[:, self.c1.d:], side)
        else:
            first = self.c1.assign(pts, side)
            second = self.c2.assign(pts, side)
        off = self.c1.T
        return [
            sorted(list(f) + [off + t for t in s])
            for f, s in zip(first, second)
        ]

    def success_exact(self, p):
        if self.mode != "blocks":
            return None
        s1 = code_success_exact(self.c1, p)
        s2 = code_success_exact(self.c2, p)
        # blocks are disjoint coordinates, so failures are independent
        return 1.0 - (1.0 - s1) * (1.0 - s2)

    def descriptor(self):
        return {"kind": "concatenate", "d": self.d, "T": self.T,
                "seed": self.seed,
                "params": {"mode": self.mode,
                           "first": self.c1.descriptor(),
                           "second": self.c2.descriptor()}}


def tensor_power(code: BucketingCode, k: int) -> BucketingCode:
    if k == 1:
        return code
    return TensorPowerCode(code, k)


def concatenate(c1: BucketingCode, c2: BucketingCode,
                mode: str = "blocks") -> ConcatenatedCode:
    return ConcatenatedCode(c1, c2, mode)


def code_work(code: BucketingCode, n0: float, n1: float) -> float:
    """Work of a code at (possibly non-integer) expected set sizes."""
    if n0 <= 0 or n1 <= 0:
        raise DomainError(f"set sizes must be positive, got {n0}, {n1}")
    return code.work(n0, n1)


def _enumerate_states(b: int, d: int) -> np.ndarray:
    """All b^d points as a (b^d, d) array, row-major (first coord slowest)."""
    n = b**d
    idx = np.arange(n)
    cols = []
    for i in range(d):
        cols.append((idx // b ** (d - 1 - i)) % b)
    return np.stack(cols, axis=1).astype(np.uint8)


def _membership_matrix(code: BucketingCode, points: np.ndarray,
                       side: int) -> np.ndarray:
    if code.T > BUCKET_INDEX_GUARD:
        raise TooLarge(f"{code.T} buckets exceed the enumeration guard")
    m = np.zeros((len(points), code.T), dtype=bool)
    for i, ids in enumerate(code.assign(points, side)):
        m[i, list(ids)] = True
    return m


def code_success_exact(code: BucketingCode, p: ProbabilityMatrix) -> float:
    """Exact planted-pair success probability S.

    Uses the code's closed form when available, otherwise sweeps the full
    (x0, x1) state space (guarded at 2^26 pair states) and sums the product
    measure over co-bucketed pairs.
    """
    closed = code.success_exact(p)
    if closed is not None:
        return float(closed)
    d = code.d
    b0, b1 = p.rows, p.cols
    if b0**d * b1**d > ENUMERATION_GUARD:
        raise TooLarge(
            f"{b0}^{d} * {b1}^{d} pair states exceed the enumeration guard"
        )
    pts0 = _enumerate_states(b0, d)
    pts1 = _enumerate_states(b1, d)
    m0 = _membership_matrix(code, pts0, 0)
    m1 = _membership_matrix(code, pts1, 1)
    joint = np.ones((1, 1))
    for _ in range(d):
        joint = np.kron(joint, p.entries)
    co = (m0.astype(np.float32) @ m1.astype(np.float32).T) > 0
    return float(joint[co].sum())


_CODE_KINDS = {}


def code_from_descriptor(desc: dict) -> BucketingCode:
    """Rebuild a bit-identical code from its JSON descriptor."""
    kind = desc["kind"]
    params = desc.get("params", {})
    if kind == "full_space":
        return FullSpaceCode(desc["d"], desc.get("seed", 0))
    if kind == "empty":
        return EmptyCode(desc["d"], desc.get("seed", 0))
    if kind == "classical":
        return ClassicalCode(desc["d"], params["k"], params["draws"], desc["seed"])
    if kind == "shell":
        return ShellCode(desc["d"], params["d0"], desc["T"], desc["seed"])
    if kind == "typeclass":
        from .probmodel import make_matrix

        counts = np.asarray(params["block_counts"], dtype=float)
        return TypeClassCode(
            make_matrix(params["matrix"]), desc["d"],
            counts / counts.sum(), desc["seed"], desc["T"],
        )
    if kind == "tensor_power":
        return TensorPowerCode(code_from_descriptor(params["base"]), params["k"])
    if kind == "concatenate":
        return ConcatenatedCode(
            code_from_descriptor(params["first"]),
            code_from_descriptor(params["second"]),
            params["mode"],
        )
    raise DomainError(f"unknown code kind {kind!r}")
