"""Stuck-at channel, masking encoders and PLBC / partitioned-cyclic decoders."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .algebra import BinaryPolynomial, BitVector, mask_divmod, parity, popcount, solve_rows
from .code import PbchSpec, PlbcCode
from .errors import DecodeFailure, InvariantViolation, UnsupportedComputation

OPTIMAL_MAX_L = 20
COSET_TABLE_MAX_R = 16

STEPS = ("step1", "step2", "trivial", "exhaustive", "one-step")


@dataclass(frozen=True)
class DefectVector:
    """Per-cell defect state as two aligned masks.

    Cell ``i`` is stuck when bit ``i`` of ``mask`` is set, at the value of
    bit ``i`` of ``values``; otherwise it is a normal cell.
    """

    length: int
    mask: int = 0
    values: int = 0

    def __post_init__(self):
        if self.mask >> self.length or self.mask < 0:
            raise ValueError("defect mask exceeds length")
        if self.values & ~self.mask:
            raise ValueError("stuck values set outside the defect mask")

    @classmethod
    def none(cls, length: int) -> "DefectVector":
        return cls(length)

    @classmethod
    def from_pairs(cls, length: int, pairs) -> "DefectVector":
        mask = values = 0
        for i, v in pairs:
            if not 0 <= i < length:
                raise ValueError(f"defect index {i} out of range for length {length}")
            if v not in (0, 1):
                raise ValueError(f"stuck value must be 0 or 1, got {v!r}")
            if (mask >> i) & 1:
                raise ValueError(f"defect index {i} given twice")
            mask |= 1 << i
            values |= v << i
        return cls(length, mask, values)

    @classmethod
    def parse(cls, length: int, text: str) -> "DefectVector":
        """Parse ``"2:1 5:0"`` (index:value pairs); the empty string means no defects."""
        pairs = []
        for tok in text.split():
            idx, sep, val = tok.partition(":")
            if not sep:
                raise ValueError(f"malformed defect token {tok!r}; expected index:value")
            try:
                pairs.append((int(idx), int(val)))
            except ValueError:
                raise ValueError(f"malformed defect token {tok!r}") from None
        return cls.from_pairs(length, pairs)

    def __str__(self) -> str:
        return " ".join(f"{i}:{(self.values >> i) & 1}" for i in self.positions())

    @property
    def u(self) -> int:
        return popcount(self.mask)

    def positions(self) -> list[int]:
        return [i for i in range(self.length) if (self.mask >> i) & 1]

    def stuck_value(self, i: int) -> int:
        return (self.values >> i) & 1


@dataclass(frozen=True)
class EncodeResult:
    codeword: BitVector
    d: BitVector
    unmasked: int
    step: str

    def csv_row(self) -> str:
        return f"{self.codeword},{self.d},{self.unmasked},{self.step}"


ENCODE_CSV_HEADER = "codeword,d,unmasked,step"


def apply_defects(x: BitVector, s: DefectVector, z: Optional[BitVector] = None) -> BitVector:
    """y = (x o s) + z: stuck cells read their stuck value, then the error is added."""
    if x.length != s.length or (z is not None and z.length != x.length):
        raise ValueError("x, s and z must have equal lengths")
    bits = (x.bits & ~s.mask) | s.values
    if z is not None:
        bits ^= z.bits
    return BitVector(x.length, bits)


def unmasked_count(c: BitVector, s: DefectVector) -> int:
    """Defect positions whose stuck value differs from the codeword."""
    if c.length != s.length:
        raise ValueError("length mismatch")
    return popcount((c.bits ^ s.values) & s.mask)


def select_locations(psi: Sequence[int], m: int, rng: Optional[random.Random] = None) -> list[int]:
    """The ``m`` largest indices of ``psi`` in descending order.

    With ``rng`` given, a uniformly random m-subset instead (still listed in
    descending order); only meant for sensitivity checks.
    """
    if m > len(psi) or m < 0:
        raise ValueError(f"cannot select {m} locations out of {len(psi)}")
    if rng is not None:
        return sorted(rng.sample(list(psi), m), reverse=True)
    return sorted(psi, reverse=True)[:m]


def _masking_system(code: PlbcCode, w: BitVector, s: DefectVector, locations: Sequence[int]):
    """Rows are the G0 columns at the locations; rhs bit i is (w G1)_i xor s_i."""
    rows = [code.g0_cols[i] for i in locations]
    rhs = 0
    for pos, i in enumerate(locations):
        if parity(w.bits & code.g1_cols[i]) ^ s.stuck_value(i):
            rhs |= 1 << pos
    return rows, rhs


def _check_inputs(code: PlbcCode, w: BitVector, s: DefectVector) -> None:
    if w.length != code.k:
        raise ValueError(f"message length {w.length} != k = {code.k}")
    if s.length != code.n:
        raise ValueError(f"defect vector length {s.length} != n = {code.n}")


def _result(code: PlbcCode, w: BitVector, d_bits: int, s: DefectVector, step: str) -> EncodeResult:
    d = BitVector(code.l, d_bits)
    c = code.encode_raw(w, d)
    return EncodeResult(c, d, unmasked_count(c, s), step)


def encode_optimal(code: PlbcCode, w: BitVector, s: DefectVector) -> EncodeResult:
    """Exhaustive search over all 2^l choices of d; ties go to the smallest d."""
    _check_inputs(code, w, s)
    if code.l > OPTIMAL_MAX_L:
        raise UnsupportedComputation(f"exhaustive encoding needs l <= {OPTIMAL_MAX_L}, got {code.l}")
    base = code.G1.vecmul(w).bits ^ s.values
    mask = s.mask
    g0 = code.G0.rows
    best_res = popcount(base & mask)
    best_d = 0
    c = base
    d = 0
    for i in range(1, 1 << code.l):
        bit = (i & -i).bit_length() - 1
        c ^= g0[bit]
        d ^= 1 << bit
        res = popcount(c & mask)
        if res < best_res or (res == best_res and d < best_d):
            best_res, best_d = res, d
    return _result(code, w, best_d, s, "exhaustive")


def _solve_at(code: PlbcCode, w: BitVector, s: DefectVector, locations: Sequence[int]) -> Optional[int]:
    rows, rhs = _masking_system(code, w, s, locations)
    return solve_rows(rows, rhs, code.l)


def encode_one_step(
    code: PlbcCode, w: BitVector, s: DefectVector, rng: Optional[random.Random] = None
) -> EncodeResult:
    """Mask m = min(d0 - 1, u) selected defects by solving a linear system."""
    _check_inputs(code, w, s)
    psi = s.positions()
    m = min(code.d0 - 1, len(psi))
    locations = select_locations(psi, m, rng)
    d = _solve_at(code, w, s, locations)
    if d is None:
        raise InvariantViolation(
            f"{m} columns of G0 are dependent although d0 = {code.d0}; d0 metadata is wrong"
        )
    return _result(code, w, d, s, "one-step")


def encode_two_step(
    code: PlbcCode, w: BitVector, s: DefectVector, rng: Optional[random.Random] = None
) -> EncodeResult:
    """Try to mask every defect; on an inconsistent system fall back to one-step."""
    _check_inputs(code, w, s)
    psi = s.positions()
    d = _solve_at(code, w, s, psi)
    if d is not None:
        return _result(code, w, d, s, "trivial" if len(psi) < code.d0 else "step1")
    fallback = encode_one_step(code, w, s, rng)
    return EncodeResult(fallback.codeword, fallback.d, fallback.unmasked, "step2")


ENCODERS = {
    "optimal": encode_optimal,
    "one-step": encode_one_step,
    "two-step": encode_two_step,
}


def encode(code: PlbcCode, w: BitVector, s: DefectVector, scheme: str = "two-step") -> EncodeResult:
    try:
        enc = ENCODERS[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {sorted(ENCODERS)}") from None
    return enc(code, w, s)


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def syndrome(code: PlbcCode, y: BitVector) -> int:
    """Packed y H^T (bit i = parity check i)."""
    out = 0
    for i, h in enumerate(code.H.rows):
        if parity(y.bits & h):
            out |= 1 << i
    return out


def coset_leaders(code: PlbcCode) -> dict[int, int]:
    """Minimum-weight error per syndrome, ties to the smallest integer encoding (cached)."""
    key = ("coset-leaders",)
    table = code._cache.get(key)
    if table is not None:
        return table
    if code.r > COSET_TABLE_MAX_R:
        raise UnsupportedComputation(f"coset-leader table needs r <= {COSET_TABLE_MAX_R}, got {code.r}")
    h_cols = code.H.columns()
    table = {0: 0}
    total = 1 << code.r
    weight = 0
    while len(table) < total:
        weight += 1
        if weight > code.n:  # pragma: no cover - H has full rank
            raise InvariantViolation("syndromes not reachable; H is rank deficient")
        level: dict[int, int] = {}
        for support in combinations(range(code.n), weight):
            syn = 0
            z = 0
            for i in support:
                syn ^= h_cols[i]
                z |= 1 << i
            if syn in table:
                continue
            prev = level.get(syn)
            if prev is None or z < prev:
                level[syn] = z
        table.update(level)
    code._cache[key] = table
    return table


def decode_plbc(code: PlbcCode, y: BitVector) -> tuple[BitVector, BitVector]:
    """Syndrome decoding followed by message recovery w = c G1_inv^T."""
    if y.length != code.n:
        raise ValueError(f"received length {y.length} != n = {code.n}")
    if code.r == 0:
        z_hat = 0
    else:
        z_hat = coset_leaders(code)[syndrome(code, y)]
    c_hat = BitVector(code.n, y.bits ^ z_hat)
    w_hat = code.G1_inv.apply(c_hat)
    return w_hat, BitVector(code.n, z_hat)


def decode_pcc(spec: PbchSpec, code: PlbcCode, y: BitVector) -> BitVector:
    """Polynomial decoding: w(x) = ((y(x) - z(x)) mod g0(x)) / g1(x)."""
    _, z_hat = decode_plbc(code, y)
    c = y.bits ^ z_hat.bits
    _, rem = mask_divmod(c, spec.g0.mask)
    q, r = mask_divmod(rem, spec.g1.mask)
    if r:
        raise DecodeFailure("corrected word is not a codeword: division by g1 is inexact")
    if q >> spec.k:  # pragma: no cover - deg(rem) < deg(g0)
        raise DecodeFailure("quotient exceeds the message length")
    return BitVector(spec.k, q)


def message_polynomial(w: BitVector) -> BinaryPolynomial:
    return BinaryPolynomial(w.bits)
