"""[n, k, l] partitioned linear block codes and their cyclic (PBCH) family."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from . import analysis
from .algebra import (
    BinaryPolynomial,
    BitMatrix,
    BitVector,
    FieldGF2m,
    bch_bound,
    bch_generator,
    null_space,
    parity,
    rref,
    x_pow_n_plus_1,
)
from .errors import InvalidCode, InvalidSpec, InvariantViolation, UnsupportedComputation

ENUMERATION_LIMIT = analysis.ENUMERATION_LIMIT

D0_PROVENANCES = ("exhaustive", "designed-distance", "user-supplied")


@dataclass(frozen=True)
class PbchSpec:
    """Generator polynomials of a partitioned BCH code, g1 | g0 | x^n + 1."""

    n: int
    m: int
    g1: BinaryPolynomial
    g0: BinaryPolynomial
    field: FieldGF2m

    def __post_init__(self):
        if self.n != (1 << self.m) - 1:
            raise InvalidSpec(f"n={self.n} is not 2^{self.m} - 1")
        if self.g1.is_zero() or self.g0.is_zero():
            raise InvalidSpec("generator polynomials must be nonzero")
        if not (self.g0 % self.g1).is_zero():
            raise InvalidSpec(f"g1 = {self.g1} does not divide g0 = {self.g0}")
        if not (x_pow_n_plus_1(self.n) % self.g0).is_zero():
            raise InvalidSpec(f"g0 = {self.g0} does not divide x^{self.n} + 1")

    @property
    def r(self) -> int:
        return self.g1.degree

    @property
    def k(self) -> int:
        return self.g0.degree - self.g1.degree

    @property
    def l(self) -> int:
        return self.n - self.g0.degree

    @classmethod
    def from_hex(cls, n: int, g1: str, g0: str, primitive: Optional[str] = None) -> "PbchSpec":
        m = (n + 1).bit_length() - 1
        if (1 << m) - 1 != n:
            raise InvalidSpec(f"n={n} is not of the form 2^m - 1")
        try:
            fld = FieldGF2m.build(m, None if primitive is None else int(primitive, 16))
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from exc
        return cls(n, m, BinaryPolynomial.from_hex(g1), BinaryPolynomial.from_hex(g0), fld)


def pbch_r0(n: int, designed_distance: int, primitive: Optional[int] = None) -> PbchSpec:
    """PBCH code with r = 0 whose G0-checked code is the narrow-sense BCH code of the given designed distance.

    The checked code is the dual of the cyclic code generated by g0, so g0 is
    (x^n + 1) divided by the reciprocal of the BCH generator.
    """
    m = (n + 1).bit_length() - 1
    if (1 << m) - 1 != n:
        raise InvalidSpec(f"n={n} is not of the form 2^m - 1")
    fld = FieldGF2m.build(m, primitive)
    g_bch = bch_generator(fld, n, designed_distance)
    g0, rem = divmod(x_pow_n_plus_1(n), g_bch.reciprocal())
    if not rem.is_zero():  # pragma: no cover
        raise InvariantViolation("reciprocal BCH generator does not divide x^n + 1")
    return PbchSpec(n, m, BinaryPolynomial(1), g0, fld)


@dataclass(frozen=True)
class PlbcCode:
    """An [n, k, l] partitioned linear block code.

    ``G1`` carries the message, ``G0`` the masking freedom, ``H`` (r x n) is a
    parity-check matrix of C1 + C0 and ``G1_inv`` recovers the message:
    G1 G1_inv^T = I_k, G0 G1_inv^T = 0.
    """

    n: int
    k: int
    l: int
    r: int
    G1: BitMatrix
    G0: BitMatrix
    H: BitMatrix
    G1_inv: BitMatrix
    d1: int
    d0: int
    t0: int
    d0_provenance: str
    d1_provenance: str = "exhaustive"
    spec: Optional[PbchSpec] = None
    g0_cols: tuple[int, ...] = field(default=(), repr=False, compare=False)
    g1_cols: tuple[int, ...] = field(default=(), repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def summary(self) -> str:
        return (
            f"n={self.n} k={self.k} l={self.l} r={self.r} d1={self.d1} d0={self.d0} "
            f"t0={self.t0} d0_provenance={self.d0_provenance}"
        )

    def encode_raw(self, w: BitVector, d: BitVector) -> BitVector:
        """c = w G1 + d G0."""
        return self.G1.vecmul(w) ^ self.G0.vecmul(d)

    def dual_distribution(self, approx: bool = False) -> "analysis.WeightDistribution":
        """Weight distribution of the G0-checked code (cached)."""
        key = ("approx" if approx else "exact",)
        if key not in self._cache:
            if approx:
                wd = analysis.weight_distribution_approx(self.n, self.n - self.l, self.d0)
            else:
                wd = analysis.dual_distribution(self.G0)
            self._cache[key] = wd
        return self._cache[key]


def _checked_distribution(M: BitMatrix) -> Optional["analysis.WeightDistribution"]:
    """Weight distribution of {c : M c^T = 0}, or None when too large to enumerate."""
    try:
        return analysis.dual_distribution(M)
    except UnsupportedComputation:
        return None


def plbc_from_generators(
    G1: BitMatrix,
    G0: BitMatrix,
    d0: Optional[int] = None,
    d1: Optional[int] = None,
    spec: Optional[PbchSpec] = None,
    check: bool = True,
) -> PlbcCode:
    """Assemble and validate a PLBC from its two generator matrices.

    ``d0``/``d1`` are used only when the exact value cannot be enumerated; a
    supplied ``d0`` is then recorded as user-supplied (unverified).
    """
    if G1.cols != G0.cols:
        raise InvalidCode("G1 and G0 must have the same number of columns")
    n, k, l = G1.cols, G1.nrows, G0.nrows
    if k < 1 or l < 1:
        raise InvalidCode("both G1 and G0 need at least one row")
    G = G1.stack(G0)
    # row-reduce [G | I] so the row operations are tracked above bit n
    tracked = [row | (1 << (n + i)) for i, row in enumerate(G.rows)]
    reduced, pivots = rref(tracked, n)
    if len(pivots) != k + l:
        raise InvalidCode(f"rank of [G1; G0] is {len(pivots)} < k + l = {k + l}: C1 and C0 intersect")
    r = n - k - l
    coeff_mask = (1 << n) - 1
    # solution of G x^T = e_i with free variables zero: x = sum_p T[p][i] e_{pivot_p}
    inv_rows = []
    for i in range(k):
        x = 0
        for row, col in zip(reduced, pivots):
            if (row >> (n + i)) & 1:
                x |= 1 << col
        inv_rows.append(x)
    G1_inv = BitMatrix(n, tuple(inv_rows))
    H = null_space(BitMatrix(n, tuple(row & coeff_mask for row in reduced)))

    if d0 is not None and d0 < 1:
        raise ValueError("d0 must be positive")
    wd0 = _checked_distribution(G0)
    if wd0 is not None:
        d0_val, d0_prov = wd0.min_distance or n + 1, "exhaustive"
    elif spec is not None:
        d0_val, d0_prov = _designed_d0(spec), "designed-distance"
    elif d0 is not None:
        d0_val, d0_prov = d0, "user-supplied"
    else:
        raise UnsupportedComputation(
            f"d0 needs enumeration beyond dimension {ENUMERATION_LIMIT}; supply d0 explicitly"
        )

    if r == 0:
        d1_val, d1_prov = 0, "exhaustive"
    else:
        wd1 = _checked_distribution(H)
        if wd1 is not None:
            d1_val, d1_prov = wd1.min_distance or n + 1, "exhaustive"
        elif spec is not None:
            d1_val, d1_prov = bch_bound(spec.field, spec.g1), "designed-distance"
        elif d1 is not None:
            d1_val, d1_prov = d1, "user-supplied"
        else:
            raise UnsupportedComputation(
                f"d1 needs enumeration beyond dimension {ENUMERATION_LIMIT}; supply d1 explicitly"
            )

    code = PlbcCode(
        n=n,
        k=k,
        l=l,
        r=r,
        G1=G1,
        G0=G0,
        H=H,
        G1_inv=G1_inv,
        d1=d1_val,
        d0=d0_val,
        t0=(d0_val - 1) // 2,
        d0_provenance=d0_prov,
        d1_provenance=d1_prov,
        spec=spec,
        g0_cols=tuple(G0.columns()),
        g1_cols=tuple(G1.columns()),
    )
    if wd0 is not None:
        code._cache[("exact",)] = wd0
    if check:
        check_invariants(code)
    return code


def check_invariants(code: PlbcCode) -> None:
    """Raise InvariantViolation unless the stated matrix identities hold."""
    for name, M in (("G1", code.G1), ("G0", code.G0)):
        for row in M.rows:
            for h in code.H.rows:
                if parity(row & h):
                    raise InvariantViolation(f"{name} H^T != 0")
    if code.H.nrows != code.r:
        raise InvariantViolation("rank(H) != r")
    for i, row in enumerate(code.G1.rows):
        for j, inv in enumerate(code.G1_inv.rows):
            if parity(row & inv) != (i == j):
                raise InvariantViolation("G1 G1_inv^T != I")
    for row in code.G0.rows:
        for inv in code.G1_inv.rows:
            if parity(row & inv):
                raise InvariantViolation("G0 G1_inv^T != 0")
    if code.t0 != (code.d0 - 1) // 2:
        raise InvariantViolation("t0 != floor((d0 - 1) / 2)")


def _designed_d0(spec: PbchSpec) -> int:
    """BCH bound of the cyclic code dual to <g0>, generated by the reciprocal of (x^n+1)/g0."""
    h0 = x_pow_n_plus_1(spec.n) // spec.g0
    return bch_bound(spec.field, h0.reciprocal())


def pbch_build(spec: PbchSpec, check: bool = True) -> PlbcCode:
    """Generator matrices from shifts of g1 (k rows) and g0 (l rows)."""
    n = spec.n
    g1_rows = tuple(spec.g1.mask << i for i in range(spec.k))
    g0_rows = tuple(spec.g0.mask << i for i in range(spec.l))
    if spec.k < 1 or spec.l < 1:
        raise InvalidSpec(f"degenerate partition k={spec.k}, l={spec.l}")
    return plbc_from_generators(BitMatrix(n, g1_rows), BitMatrix(n, g0_rows), spec=spec, check=check)


def min_distances(code: PlbcCode) -> tuple[int, int]:
    return code.d1, code.d0


def capability(code_or_d: Any, u: int, t: int, d1: Optional[int] = None) -> bool:
    """Whether u defects and t random errors are always handled.

    Accepts a PlbcCode or explicit ``(d0, d1)``: ``capability(d0, u, t, d1=...)``.
    With t = 0 and u < d0 the answer is yes even when d1 = 0 (r = 0 codes).
    """
    if isinstance(code_or_d, PlbcCode):
        d0, d1 = code_or_d.d0, code_or_d.d1
    else:
        d0 = int(code_or_d)
        d1 = 0 if d1 is None else d1
    if u < d0:
        return t == 0 or 2 * t < d1
    return 2 * (u + t + 1 - d0) < d1


# ---------------------------------------------------------------------------
# code-spec files
# ---------------------------------------------------------------------------


def code_from_dict(obj: dict) -> PlbcCode:
    kind = obj.get("type")
    if kind == "pbch":
        n = int(obj["n"])
        if "designed_d0" in obj:
            prim = obj.get("primitive")
            spec = pbch_r0(n, int(obj["designed_d0"]), None if prim is None else int(prim, 16))
        else:
            spec = PbchSpec.from_hex(n, obj["g1"], obj["g0"], obj.get("primitive"))
            if "m" in obj and int(obj["m"]) != spec.m:
                raise InvalidSpec(f"m={obj['m']} inconsistent with n={n}")
        return pbch_build(spec)
    if kind == "plbc":
        G1 = BitMatrix.from_strs(obj["g1_rows"])
        G0 = BitMatrix.from_strs(obj["g0_rows"])
        return plbc_from_generators(G1, G0, d0=obj.get("d0"), d1=obj.get("d1"))
    raise InvalidSpec(f"unknown code type {kind!r}")


def code_to_dict(code: PlbcCode) -> dict:
    if code.spec is not None:
        s = code.spec
        return {
            "type": "pbch",
            "n": s.n,
            "m": s.m,
            "primitive": s.field.primitive.to_hex(),
            "g1": s.g1.to_hex(),
            "g0": s.g0.to_hex(),
        }
    out: dict[str, Any] = {
        "type": "plbc",
        "g1_rows": code.G1.to_strs(),
        "g0_rows": code.G0.to_strs(),
    }
    if code.d0_provenance == "user-supplied":
        out["d0"] = code.d0
    if code.d1_provenance == "user-supplied":
        out["d1"] = code.d1
    return out


def load_code(path: str) -> PlbcCode:
    with open(path) as fh:
        return code_from_dict(json.load(fh))


def save_code(code: PlbcCode, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(code_to_dict(code), fh, indent=2)
        fh.write("\n")
