"""Monte Carlo simulation of the stuck-at channel.

Every trial ``t`` reads a fixed-size block of 64-bit words from a Philox
stream keyed by the seed and advanced to ``t * blocks_per_trial``.  Trials
therefore never share random numbers, and any chunking or thread schedule
produces the same report.  The same trial index under the same seed sees
the same message and defects whatever the scheme, so scheme comparisons
are paired.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import codec, kernels
from .algebra import BitVector
from .analysis import RankDistribution, format_float
from .code import PlbcCode

CHUNK = 2048
EXACT_SUBSETS_LIMIT = 10**6
Z99 = NormalDist().inv_cdf(0.995)

ENCODER_SCHEMES = ("optimal", "one-step", "two-step")
BASELINE_SCHEMES = ("normal-bch", "erasure-bch")
SCHEMES = ENCODER_SCHEMES + BASELINE_SCHEMES

SIM_CSV_HEADER = "scheme,n,k,l,u_or_eps,trials,failures,rate,ci_low,ci_high,seed"

_M64 = (1 << 64) - 1


@dataclass(frozen=True)
class ChannelParams:
    epsilon: Union[Fraction, float] = 0
    p: Union[Fraction, float] = 0

    def __post_init__(self):
        for name in ("epsilon", "p"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name}={v} outside [0, 1]")


@dataclass(frozen=True)
class SimConfig:
    """One simulation point.

    Exactly one of ``u`` (fixed defect count) and ``epsilon`` (each cell
    defective independently) is set.
    """

    trials: int
    seed: int
    scheme: str = "two-step"
    u: Optional[int] = None
    epsilon: Optional[Union[Fraction, float]] = None
    p: Union[Fraction, float] = 0
    track_rank: bool = False
    selection: str = "descending"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 <= self.seed <= _M64:
            raise ValueError("seed must be a 64-bit unsigned value")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if (self.u is None) == (self.epsilon is None):
            raise ValueError("set exactly one of u and epsilon")
        if self.u is not None and self.u < 0:
            raise ValueError("u must be non-negative")
        ChannelParams(self.epsilon or 0, self.p)
        if self.selection not in ("descending", "random"):
            raise ValueError("selection must be 'descending' or 'random'")

    @property
    def point(self) -> str:
        if self.u is not None:
            return str(self.u)
        return _format_prob(self.epsilon)


def _format_prob(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return format_float(float(x))


@dataclass(frozen=True)
class SimReport:
    scheme: str
    n: int
    k: int
    l: int
    point: str
    trials: int
    failures: int
    seed: int
    deficiency_counts: Optional[dict] = field(default=None, compare=True)

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)

    @property
    def ci_low(self) -> float:
        return self.ci[0]

    @property
    def ci_high(self) -> float:
        return self.ci[1]

    @property
    def stderr(self) -> float:
        p = self.rate
        return math.sqrt(p * (1 - p) / self.trials)

    def csv_row(self) -> str:
        lo, hi = self.ci
        return ",".join(
            [
                self.scheme,
                str(self.n),
                str(self.k),
                str(self.l),
                self.point,
                str(self.trials),
                str(self.failures),
                format_float(self.rate),
                format_float(lo),
                format_float(hi),
                str(self.seed),
            ]
        )


def wilson_interval(failures: int, trials: int, z: float = Z99) -> tuple[float, float]:
    """Wilson score interval (99% by default)."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = failures / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = max(0.0, centre - half)
    hi = min(1.0, centre + half)
    # keep the point estimate inside the interval despite rounding
    return min(lo, p), max(hi, p)


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------


def probability_threshold(x) -> tuple[int, int]:
    """(threshold, always): a uniform 64-bit word w fires when ``always`` or w < threshold."""
    frac = Fraction(x)
    if frac >= 1:
        return 0, 1
    return (frac.numerator << 64) // frac.denominator, 0


@dataclass(frozen=True)
class StreamLayout:
    """Offsets (in 64-bit words) of each random section within a trial block."""

    n: int
    k: int
    fixed_u: Optional[int]
    noise: bool

    @property
    def msg(self) -> int:
        return 0

    @property
    def msg_words(self) -> int:
        return (self.k + 63) // 64

    @property
    def pos(self) -> int:
        return self.msg_words

    @property
    def pos_words(self) -> int:
        return self.fixed_u if self.fixed_u is not None else self.n

    @property
    def stuck(self) -> int:
        return self.pos + self.pos_words

    @property
    def nw(self) -> int:
        return (self.n + 63) // 64

    @property
    def data(self) -> int:
        return self.stuck + self.nw

    @property
    def select(self) -> int:
        return self.data + self.nw

    @property
    def noise_off(self) -> int:
        return self.select + 1

    @property
    def used(self) -> int:
        return self.noise_off + (self.n if self.noise else 0)

    @property
    def blocks(self) -> int:
        """Philox counter increments per trial (4 words each)."""
        return (self.used + 3) // 4

    @property
    def words(self) -> int:
        return 4 * self.blocks


def layout_for(code: PlbcCode, config: SimConfig) -> StreamLayout:
    if config.u is not None and config.u > code.n:
        raise ValueError(f"u={config.u} exceeds n={code.n}")
    return StreamLayout(code.n, code.k, config.u, bool(config.p))


def trial_words(seed: int, start: int, count: int, layout: StreamLayout) -> np.ndarray:
    """Random words for trials ``start .. start+count-1``, one row per trial."""
    bg = np.random.Philox(key=seed)
    bg.advance(start * layout.blocks)
    raw = bg.random_raw(count * layout.words)
    return np.asarray(raw, dtype=np.uint64).reshape(count, layout.words)


class TrialStream:
    """Decodes one trial's words into message, defects, noise and stored data."""

    def __init__(self, words: Sequence[int], layout: StreamLayout):
        self.words = [int(w) for w in words]
        self.layout = layout

    def _bits(self, offset: int, nbits: int) -> int:
        v = 0
        for i in range((nbits + 63) // 64):
            v |= self.words[offset + i] << (64 * i)
        return v & ((1 << nbits) - 1)

    def message(self) -> BitVector:
        lay = self.layout
        return BitVector(lay.k, self._bits(lay.msg, lay.k))

    def data(self) -> BitVector:
        return BitVector(self.layout.n, self._bits(self.layout.data, self.layout.n))

    def selection_rng(self) -> random.Random:
        return random.Random(self.words[self.layout.select])

    def defect_positions(self, epsilon=None) -> list[int]:
        lay = self.layout
        n = lay.n
        if lay.fixed_u is not None:
            perm = list(range(n))
            for i in range(lay.fixed_u):
                j = i + ((self.words[lay.pos + i] * (n - i)) >> 64)
                perm[i], perm[j] = perm[j], perm[i]
            return sorted(perm[: lay.fixed_u])
        thr, always = probability_threshold(epsilon)
        return [i for i in range(n) if always or self.words[lay.pos + i] < thr]


def sample_defects(n: int, mode, stream: TrialStream) -> codec.DefectVector:
    """Defects for one trial.

    ``mode`` is ``("fixed", u)`` for a uniform u-subset or ``("binomial", eps)``
    for independent defects; stuck values are uniform either way.
    """
    kind, value = mode
    if stream.layout.n != n:
        raise ValueError("stream layout length mismatch")
    if kind == "fixed":
        if stream.layout.fixed_u != value:
            raise ValueError("stream layout was built for a different u")
        psi = stream.defect_positions()
    elif kind == "binomial":
        psi = stream.defect_positions(value)
    else:
        raise ValueError(f"unknown defect mode {kind!r}")
    stuck = stream._bits(stream.layout.stuck, n)
    mask = 0
    for i in psi:
        mask |= 1 << i
    return codec.DefectVector(n, mask, stuck & mask)


def sample_noise(n: int, p, stream: TrialStream, defects: Optional[codec.DefectVector] = None) -> BitVector:
    """Independent bit flips with probability p on the non-defective cells."""
    lay = stream.layout
    if not p:
        return BitVector.zeros(n)
    if not lay.noise:
        raise ValueError("stream layout has no noise section")
    thr, always = probability_threshold(p)
    skip = defects.mask if defects is not None else 0
    bits = 0
    for i in range(n):
        if (skip >> i) & 1:
            continue
        if always or stream.words[lay.noise_off + i] < thr:
            bits |= 1 << i
    return BitVector(n, bits)


# ---------------------------------------------------------------------------
# trial execution
# ---------------------------------------------------------------------------

_KERNEL_SCHEMES = {
    "one-step": kernels.SCHEME_ONE_STEP,
    "two-step": kernels.SCHEME_TWO_STEP,
    "normal-bch": kernels.SCHEME_NONE,
    "erasure-bch": kernels.SCHEME_NONE,
}


def _python_trial(code: PlbcCode, config: SimConfig, stream: TrialStream, scheme: str) -> list[int]:
    """One trial through the codec module; returns a kernel-style stats row."""
    n = code.n
    mode = ("fixed", config.u) if config.u is not None else ("binomial", config.epsilon)
    s = sample_defects(n, mode, stream)
    w = stream.message()
    z = sample_noise(n, config.p, stream, s)
    data = stream.data()
    rng = stream.selection_rng() if config.selection == "random" else None
    row = [0] * 6
    row[kernels.COL_U] = s.u
    row[kernels.COL_DEFECT_ERRORS] = ((s.values ^ data.bits) & s.mask).bit_count()
    row[kernels.COL_NOISE] = z.weight()
    if scheme in ENCODER_SCHEMES:
        if scheme == "optimal":
            res = codec.encode_optimal(code, w, s)
        elif scheme == "one-step":
            res = codec.encode_one_step(code, w, s, rng)
        else:
            res = codec.encode_two_step(code, w, s, rng)
        row[kernels.COL_UNMASKED] = res.unmasked
        row[kernels.COL_STEP] = {"trivial": 0, "step1": 1, "step2": 2, "one-step": 3}.get(res.step, 0)
    if config.track_rank or scheme == "two-step":
        from .algebra import rank_of_rows

        psi = s.positions()
        row[kernels.COL_DEFICIENCY] = len(psi) - rank_of_rows(code.g0_cols[i] for i in psi)
    return row


def _chunk_stats(code: PlbcCode, config: SimConfig, scheme: str, layout: StreamLayout,
                 start: int, count: int, use_kernel: bool, packed) -> np.ndarray:
    words = trial_words(config.seed, start, count, layout)
    if use_kernel:
        g0p, g1p = packed
        eps_thr, eps_all = probability_threshold(config.epsilon if config.epsilon is not None else 0)
        p_thr, p_all = probability_threshold(config.p)
        return kernels.masking_trials(
            g0p, g1p, code.n, code.k, code.d0, _KERNEL_SCHEMES[scheme],
            -1 if config.u is None else config.u,
            eps_thr, eps_all, p_thr, p_all,
            layout.msg, layout.pos, layout.stuck, layout.data, layout.noise_off,
            int(config.track_rank), words,
        )
    rows = [_python_trial(code, config, TrialStream(row, layout), scheme) for row in words.tolist()]
    return np.asarray(rows, dtype=np.int32).reshape(count, 6)


def packed_columns(code: PlbcCode):
    key = ("packed-columns",)
    if key not in code._cache:
        code._cache[key] = (kernels.pack(code.g0_cols, code.l), kernels.pack(code.g1_cols, code.k))
    return code._cache[key]


def trial_stats(code: PlbcCode, config: SimConfig, scheme: Optional[str] = None,
                threads: int = 1, force_python: bool = False) -> np.ndarray:
    """Per-trial statistics rows (see ``kernels.COL_*``) for every trial of ``config``."""
    scheme = scheme or config.scheme
    layout = layout_for(code, config)
    use_kernel = (
        not force_python and scheme != "optimal" and config.selection == "descending"
    )
    packed = packed_columns(code) if use_kernel else None
    starts = list(range(0, config.trials, CHUNK))

    def job(start: int) -> np.ndarray:
        count = min(CHUNK, config.trials - start)
        return _chunk_stats(code, config, scheme, layout, start, count, use_kernel, packed)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, starts))
    else:
        parts = [job(s) for s in starts]
    return np.concatenate(parts, axis=0)


def _deficiency_counts(stats: np.ndarray) -> dict[int, int]:
    vals, counts = np.unique(stats[:, kernels.COL_DEFICIENCY], return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def run_masking_trials(code: PlbcCode, config: SimConfig, threads: int = 1,
                       force_python: bool = False) -> SimReport:
    """Fraction of trials where the encoder leaves at least one defect unmasked."""
    if config.scheme not in ENCODER_SCHEMES:
        raise ValueError(f"{config.scheme!r} is not an encoder scheme")
    stats = trial_stats(code, config, threads=threads, force_python=force_python)
    failures = int(np.count_nonzero(stats[:, kernels.COL_UNMASKED]))
    deficiency = _deficiency_counts(stats) if config.track_rank else None
    return SimReport(config.scheme, code.n, code.k, code.l, config.point, config.trials,
                     failures, config.seed, deficiency)


def failure_indicators(code: PlbcCode, scheme: str, stats: np.ndarray,
                       baseline_d: Optional[int] = None) -> np.ndarray:
    """Per-trial decoding failure under each scheme's success criterion.

    Baselines use bounded-distance criteria at distance ``baseline_d``
    (default: the code's d0, i.e. the BCH code of matched redundancy).
    """
    d = code.d0 if baseline_d is None else baseline_d
    u = stats[:, kernels.COL_U]
    noise = stats[:, kernels.COL_NOISE]
    if scheme == "normal-bch":
        return stats[:, kernels.COL_DEFECT_ERRORS] + noise > (d - 1) // 2
    if scheme == "erasure-bch":
        return 2 * noise + u >= d
    errors = stats[:, kernels.COL_UNMASKED] + noise
    if code.r == 0 or code.d1 == 0:
        return errors > 0
    return errors > (code.d1 - 1) // 2


def run_decoding_comparison(code: PlbcCode, config: SimConfig, schemes: Iterable[str],
                            baseline_d: Optional[int] = None, threads: int = 1,
                            force_python: bool = False) -> dict[str, SimReport]:
    """Decoding-failure rates of the requested schemes on the same trials."""
    out = {}
    baseline_stats = None
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        if scheme in BASELINE_SCHEMES:
            if baseline_stats is None:
                baseline_stats = trial_stats(code, config, "normal-bch", threads, force_python)
            stats = baseline_stats
        else:
            stats = trial_stats(code, config, scheme, threads, force_python)
        failures = int(np.count_nonzero(failure_indicators(code, scheme, stats, baseline_d)))
        out[scheme] = SimReport(scheme, code.n, code.k, code.l, config.point, config.trials,
                                failures, config.seed)
    return out


def rank_distribution(code: PlbcCode, u: int, trials: int = 100_000, seed: int = 0,
                      exact: Optional[bool] = None, threads: int = 1) -> RankDistribution:
    """Distribution of u - rank of the G0 columns at a uniformly random u-subset.

    Enumerates every subset when there are at most 10^6 of them (exact
    Fractions); otherwise samples ``trials`` subsets.
    """
    if not 0 <= u <= code.n:
        raise ValueError(f"u={u} outside [0, {code.n}]")
    total = math.comb(code.n, u)
    if exact is None:
        exact = total <= EXACT_SUBSETS_LIMIT
    if exact:
        g0p, _ = packed_columns(code)
        counts = kernels.subset_deficiency_counts(g0p, u)
        cmap = {j: int(c) for j, c in enumerate(counts) if c}
        probs = {j: Fraction(c, total) for j, c in cmap.items()}
        _check_rank_support(code, u, cmap)
        return RankDistribution(u, probs, cmap, exact=True)
    config = SimConfig(trials=trials, seed=seed, scheme="normal-bch", u=u, track_rank=True)
    stats = trial_stats(code, config, threads=threads)
    cmap = _deficiency_counts(stats)
    _check_rank_support(code, u, cmap)
    probs = {j: c / trials for j, c in cmap.items()}
    return RankDistribution(u, probs, cmap, exact=False)


def _check_rank_support(code: PlbcCode, u: int, counts: dict[int, int]) -> None:
    # rank can never exceed min(u, l)
    floor_j = u - min(u, code.l)
    bad = [j for j, c in counts.items() if c and j < floor_j]
    if bad:  # pragma: no cover
        raise AssertionError(f"rank above min(u, l) observed: {bad}")


def run_point(code: PlbcCode, config: SimConfig, schemes: Sequence[str], metric: str = "masking",
              baseline_d: Optional[int] = None, threads: int = 1) -> list[SimReport]:
    """One report per scheme at a single sweep point, all on the same trials.

    Encoder schemes count masking failures (``unmasked > 0``) when ``metric``
    is ``"masking"`` and decoding failures when it is ``"decoding"``; the BCH
    baselines always count decoding failures.
    """
    if metric not in ("masking", "decoding"):
        raise ValueError("metric must be 'masking' or 'decoding'")
    cache: dict[str, np.ndarray] = {}
    reports = []
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        key = "baseline" if scheme in BASELINE_SCHEMES else scheme
        if key not in cache:
            cache[key] = trial_stats(code, config, "normal-bch" if key == "baseline" else scheme, threads)
        stats = cache[key]
        if scheme in ENCODER_SCHEMES and metric == "masking":
            fail = stats[:, kernels.COL_UNMASKED] > 0
        else:
            fail = failure_indicators(code, scheme, stats, baseline_d)
        deficiency = _deficiency_counts(stats) if config.track_rank else None
        reports.append(SimReport(scheme, code.n, code.k, code.l, config.point, config.trials,
                                 int(np.count_nonzero(fail)), config.seed, deficiency))
    return reports
