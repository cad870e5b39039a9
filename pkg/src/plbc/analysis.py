"""Weight distributions and masking-failure probabilities.

All probabilities are exact :class:`fractions.Fraction` values unless a
floating-point input forces a float result.  Binomials at n = 1023 run to
hundreds of digits, so nothing here goes through floats until display.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

from . import kernels
from .algebra import BitMatrix, null_space, row_basis
from .errors import InvariantViolation, UnsupportedComputation

ENUMERATION_LIMIT = 22

EXACT_PROVENANCES = ("exhaustive", "macwilliams")
PROVENANCES = EXACT_PROVENANCES + ("approx",)

Number = Union[Fraction, float]


@dataclass(frozen=True)
class WeightDistribution:
    """Counts ``A_0..A_n`` of a binary linear code of length ``n`` and dimension ``dim``."""

    n: int
    dim: int
    counts: tuple[int, ...]
    provenance: str = "exhaustive"

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) != self.n + 1:
            raise ValueError(f"expected {self.n + 1} counts, got {len(self.counts)}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.counts[0] != 1:
            raise ValueError("A_0 must be 1")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        if self.exact and sum(self.counts) != 1 << self.dim:
            raise ValueError(f"counts sum to {sum(self.counts)}, not 2^{self.dim}")

    @property
    def exact(self) -> bool:
        return self.provenance in EXACT_PROVENANCES

    @property
    def min_distance(self) -> Optional[int]:
        for w in range(1, self.n + 1):
            if self.counts[w]:
                return w
        return None

    def __getitem__(self, w: int) -> int:
        return self.counts[w]

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "dim": self.dim,
                "counts": [str(c) for c in self.counts],
                "provenance": self.provenance,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "WeightDistribution":
        obj = json.loads(text)
        return cls(obj["n"], obj["dim"], tuple(int(c) for c in obj["counts"]), obj["provenance"])


@dataclass(frozen=True)
class BoundReport:
    u: int
    kind: str  # exact-zero | estimate | upper-bound
    value: Fraction

    @property
    def value_float(self) -> float:
        return float(self.value)

    def csv_row(self) -> str:
        v = Fraction(self.value)
        return f"{self.u},{self.kind},{v.numerator},{v.denominator},{format_float(float(v))}"


BOUND_CSV_HEADER = "u,kind,value_num,value_den,value_float"


def format_float(x: float) -> str:
    return format(x, ".15g")


@dataclass(frozen=True)
class RankDistribution:
    """Probability of each rank deficiency ``j = u - rank(G0 restricted to the defects)``."""

    u: int
    probs: Mapping[int, Number] = field(default_factory=dict)
    counts: Optional[Mapping[int, int]] = None
    exact: bool = False

    def __getitem__(self, j: int) -> Number:
        return self.probs.get(j, 0)


# ---------------------------------------------------------------------------
# weight distributions
# ---------------------------------------------------------------------------


def weight_distribution_exhaustive(generator: BitMatrix, limit: int = ENUMERATION_LIMIT) -> WeightDistribution:
    """Exact weight distribution of the row space of ``generator`` by enumeration."""
    basis = row_basis(generator)
    dim = basis.nrows
    if dim > limit:
        raise UnsupportedComputation(
            f"code dimension {dim} exceeds the enumeration limit {limit}"
        )
    n = generator.cols
    hist = kernels.weight_histogram(kernels.pack(basis.rows, n), n)
    return WeightDistribution(n, dim, tuple(int(c) for c in hist), "exhaustive")


def krawtchouk_column(n: int, i: int) -> list[int]:
    """K_j(i) for j = 0..n via the three-term recurrence."""
    out = [1]
    if n >= 1:
        out.append(n - 2 * i)
    for j in range(1, n):
        nxt = (n - 2 * i) * out[j] - (n - j + 1) * out[j - 1]
        q, r = divmod(nxt, j + 1)
        if r:  # pragma: no cover - the recurrence is exact
            raise InvariantViolation("Krawtchouk recurrence left a remainder")
        out.append(q)
    return out


def macwilliams_transform(wd: WeightDistribution) -> WeightDistribution:
    """Weight distribution of the dual code, B_j = 2^-dim * sum_i A_i K_j(i)."""
    if not wd.exact:
        raise ValueError("MacWilliams transform needs an exact distribution")
    n = wd.n
    acc = [0] * (n + 1)
    for i, a in enumerate(wd.counts):
        if not a:
            continue
        col = krawtchouk_column(n, i)
        for j in range(n + 1):
            acc[j] += a * col[j]
    scale = 1 << wd.dim
    counts = []
    for j, s in enumerate(acc):
        q, r = divmod(s, scale)
        if r or q < 0:
            raise InvariantViolation(f"non-integer dual count at weight {j}; bad input distribution")
        counts.append(q)
    return WeightDistribution(n, n - wd.dim, tuple(counts), "macwilliams")


def weight_distribution_approx(n: int, dim: int, d0: int) -> WeightDistribution:
    """Binomial approximation A_w = round(C(n, w) 2^(dim - n)) for w >= d0, zero below.

    Rounds half up, in exact integer arithmetic.
    """
    if not 0 <= dim <= n:
        raise ValueError("dimension must lie in [0, n]")
    shift = n - dim
    counts = [1]
    for w in range(1, n + 1):
        if w < d0:
            counts.append(0)
        elif shift == 0:
            counts.append(math.comb(n, w))
        else:
            counts.append((math.comb(n, w) + (1 << (shift - 1))) >> shift)
    return WeightDistribution(n, dim, tuple(counts), "approx")


def dual_distribution(G0: BitMatrix, limit: int = ENUMERATION_LIMIT) -> WeightDistribution:
    """Weight distribution of ``{c : G0 c^T = 0}``.

    Enumerates that code directly when its dimension is within ``limit``,
    otherwise enumerates the row space of ``G0`` and applies MacWilliams.
    """
    n = G0.cols
    l = row_basis(G0).nrows
    if n - l <= limit:
        return weight_distribution_exhaustive(null_space(G0), limit)
    if l <= limit:
        return macwilliams_transform(weight_distribution_exhaustive(G0, limit))
    raise UnsupportedComputation(
        f"both the code (dim {n - l}) and its dual (dim {l}) exceed the enumeration "
        f"limit {limit}; use the binomial approximation (--approx)"
    )


# ---------------------------------------------------------------------------
# bounds and estimates
# ---------------------------------------------------------------------------


def covering_count(wd: WeightDistribution, u: int) -> int:
    """sum_{w=1}^{u} A_w C(n-w, u-w): u-subsets holding a codeword support, with repeats."""
    n = wd.n
    if not 0 <= u <= n:
        raise ValueError(f"u={u} outside [0, {n}]")
    return sum(wd.counts[w] * math.comb(n - w, u - w) for w in range(1, u + 1) if wd.counts[w])


def rank_deficiency_bound(wd: WeightDistribution, u: int) -> Fraction:
    """Upper bound on Pr(rank < u) for a uniformly random u-subset, clamped at 1."""
    value = Fraction(covering_count(wd, u), math.comb(wd.n, u))
    return min(value, Fraction(1))


def masking_failure_upper_bound(wd: WeightDistribution, u: int) -> BoundReport:
    return BoundReport(u, "upper-bound", rank_deficiency_bound(wd, u))


def estimate_range(d0: int) -> tuple[int, int]:
    return d0, d0 + (d0 - 1) // 2


def masking_failure_estimate(wd: WeightDistribution, u: int, d0: int) -> BoundReport:
    """Half the covering ratio; exact for d0 <= u <= d0 + floor((d0-1)/2)."""
    lo, hi = estimate_range(d0)
    if not lo <= u <= hi:
        raise ValueError(f"estimate defined only for {lo} <= u <= {hi}, got u={u}")
    return BoundReport(u, "estimate", Fraction(covering_count(wd, u), 2 * math.comb(wd.n, u)))


def masking_failure_piecewise(wd: WeightDistribution, u: int, d0: int) -> BoundReport:
    lo, hi = estimate_range(d0)
    if u < lo:
        return BoundReport(u, "exact-zero", Fraction(0))
    if u <= hi:
        return masking_failure_estimate(wd, u, d0)
    return masking_failure_upper_bound(wd, u)


def lemma2_failure_from_rank(rd: RankDistribution, tol: float = 1e-9) -> Number:
    """Failure probability of a full solve under uniform data: sum_j (1 - 2^-j) Pr(j)."""
    total = sum(rd.probs.values())
    if abs(float(total) - 1.0) > tol:
        raise ValueError(f"rank distribution sums to {float(total)}, not 1")
    out: Number = Fraction(0)
    for j, p in sorted(rd.probs.items()):
        if j < 0:
            raise ValueError("negative rank deficiency")
        if j == 0 or not p:
            continue
        out = out + Fraction((1 << j) - 1, 1 << j) * p
    return out


def _as_fraction(eps) -> Optional[Fraction]:
    if isinstance(eps, Fraction):
        return eps
    if isinstance(eps, int) and not isinstance(eps, bool):
        return Fraction(eps)
    if isinstance(eps, str):
        return Fraction(eps)
    return None


def covering_counts_all(wd: WeightDistribution) -> list[int]:
    """covering_count(wd, u) for every u = 0..n (incremental binomials)."""
    n = wd.n
    out = [0] * (n + 1)
    for w in range(1, n + 1):
        a = wd.counts[w]
        if not a:
            continue
        c = 1  # C(n-w, j)
        m = n - w
        for j in range(m + 1):
            out[w + j] += a * c
            c = c * (m - j) // (j + 1)
    return out


def binomial_mixture_bound(wd: WeightDistribution, n: int, epsilon, d0: int) -> Number:
    """Upper bound on masking failure when each cell is a defect with probability epsilon.

    sum_{u >= d0} eps^u (1-eps)^(n-u) min(covering_count(u), C(n, u)).  Exact
    when ``epsilon`` is a Fraction, int or "a/b" string; compensated float
    summation otherwise.
    """
    if wd.n != n:
        raise ValueError("distribution length does not match n")
    s = covering_counts_all(wd)
    start = max(d0, 0)
    exact = _as_fraction(epsilon)
    if exact is not None:
        if not 0 <= exact <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        a, b = exact.numerator, exact.denominator
        num = 0
        for u in range(start, n + 1):
            term = min(s[u], math.comb(n, u))
            if term:
                num += a**u * (b - a) ** (n - u) * term
        return Fraction(num, b**n)
    eps = float(epsilon)
    if not 0.0 <= eps <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    terms = []
    for u in range(start, n + 1):
        term = min(s[u], math.comb(n, u))
        if term:
            log_p = _log_pow(eps, u) + _log_pow(1.0 - eps, n - u)
            if log_p == -math.inf:
                continue
            terms.append(math.exp(log_p + math.log(term)))
    return math.fsum(terms)


def _log_pow(x: float, k: int) -> float:
    if k == 0:
        return 0.0
    if x == 0.0:
        return -math.inf
    return k * math.log(x)


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------


def normal_decoding_failure(u: int, d: int) -> Fraction:
    """Pr(Binomial(u, 1/2) > floor((d-1)/2)): bounded-distance decoding blind to defects."""
    t = (d - 1) // 2
    return Fraction(sum(math.comb(u, i) for i in range(t + 1, u + 1)), 1 << u)


def erasure_decoding_failure(u: int, d: int) -> Fraction:
    return Fraction(1 if u >= d else 0)


def one_step_failure(u: int, d0: int) -> Fraction:
    """Masking failure of the one-step encoder with uniform stuck values.

    The d0 - 1 selected defects are always masked; each remaining one matches
    its stuck value with probability 1/2, independently.
    """
    if u < d0:
        return Fraction(0)
    return 1 - Fraction(1, 1 << (u - d0 + 1))


def _binomial_mix(n: int, epsilon, per_u) -> Number:
    exact = _as_fraction(epsilon)
    if exact is not None:
        a, b = exact.numerator, exact.denominator
        total = Fraction(0)
        for u in range(n + 1):
            f = per_u(u)
            if f:
                total += Fraction(math.comb(n, u) * a**u * (b - a) ** (n - u), b**n) * f
        return total
    eps = float(epsilon)
    terms = []
    for u in range(n + 1):
        f = per_u(u)
        if f:
            log_p = math.lgamma(n + 1) - math.lgamma(u + 1) - math.lgamma(n - u + 1)
            log_p += _log_pow(eps, u) + _log_pow(1.0 - eps, n - u)
            if log_p != -math.inf:
                terms.append(math.exp(log_p) * float(f))
    return math.fsum(terms)


def comparison_curves(n: int, d: int, u: Optional[int] = None, epsilon=None) -> dict[str, Number]:
    """Failure probabilities of the BCH baselines (and one-step masking) at matched distance ``d``.

    Give exactly one of ``u`` (fixed defect count) or ``epsilon`` (binomial
    defect count over ``n`` cells).
    """
    if d < 1:
        raise ValueError("distance must be at least 1")
    if (u is None) == (epsilon is None):
        raise ValueError("give exactly one of u or epsilon")
    if u is not None:
        return {
            "normal-bch": normal_decoding_failure(u, d),
            "erasure-bch": erasure_decoding_failure(u, d),
            "one-step": one_step_failure(u, d),
        }
    return {
        "normal-bch": _binomial_mix(n, epsilon, lambda k: normal_decoding_failure(k, d)),
        "erasure-bch": _binomial_mix(n, epsilon, lambda k: erasure_decoding_failure(k, d)),
        "one-step": _binomial_mix(n, epsilon, lambda k: one_step_failure(k, d)),
    }
