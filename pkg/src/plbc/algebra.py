"""GF(2) vectors, matrices and polynomials, plus GF(2^m) tables for BCH design.

Vectors and matrix rows are packed into Python integers: bit ``i`` of the
integer is coordinate ``i`` (and, for polynomials, the coefficient of
``x**i``).  Everything here is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class DimensionError(ValueError):
    """Operand shapes do not match."""


popcount = int.bit_count


def parity(x: int) -> int:
    return popcount(x) & 1


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BitVector:
    """A length-``length`` vector over GF(2) packed into ``bits``."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits 0x{self.bits:x} do not fit in length {self.length}")

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> "BitVector":
        return cls(length, (1 << length) - 1)

    @classmethod
    def from_str(cls, text: str) -> "BitVector":
        """Parse a string of '0'/'1' characters, index 0 first."""
        text = text.strip()
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r} in {text!r}")
        return cls(len(text), bits)

    @classmethod
    def from_bits(cls, values: Iterable[int]) -> "BitVector":
        values = list(values)
        bits = 0
        for i, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError(f"bit values must be 0 or 1, got {v!r}")
            if v:
                bits |= 1 << i
        return cls(len(values), bits)

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BitVector":
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise IndexError(f"index {i} out of range for length {length}")
            bits |= 1 << i
        return cls(length, bits)

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self):
        return (((self.bits >> i) & 1) for i in range(self.length))

    def _check(self, other: "BitVector") -> None:
        if self.length != other.length:
            raise DimensionError(f"length mismatch: {self.length} vs {other.length}")

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.length, self.bits ^ other.bits)

    # subtraction and addition coincide over GF(2)
    __add__ = __xor__
    __sub__ = __xor__

    def __and__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.length, self.bits & other.bits)

    def dot(self, other: "BitVector") -> int:
        self._check(other)
        return parity(self.bits & other.bits)

    def support(self) -> list[int]:
        return [i for i in range(self.length) if (self.bits >> i) & 1]

    def weight(self) -> int:
        return popcount(self.bits)


def weight(v: BitVector) -> int:
    """Hamming weight of ``v``."""
    return popcount(v.bits)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix.  Row ``i`` is the packed integer ``rows[i]``."""

    cols: int
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        limit = 1 << self.cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row 0x{r:x} does not fit in {self.cols} columns")

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], cols: Optional[int] = None) -> "BitMatrix":
        if cols is None:
            if not vectors:
                raise ValueError("column count needed for an empty matrix")
            cols = vectors[0].length
        for v in vectors:
            if v.length != cols:
                raise DimensionError("all rows must have the same length")
        return cls(cols, tuple(v.bits for v in vectors))

    @classmethod
    def from_strs(cls, rows: Sequence[str], cols: Optional[int] = None) -> "BitMatrix":
        return cls.from_vectors([BitVector.from_str(r) for r in rows], cols)

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls(size, tuple(1 << i for i in range(size)))

    @classmethod
    def zeros(cls, nrows: int, cols: int) -> "BitMatrix":
        return cls(cols, (0,) * nrows)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.cols

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.rows[i])

    def column(self, j: int) -> int:
        """Column ``j`` packed as an integer with bit ``i`` = entry (i, j)."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                out |= 1 << i
        return out

    def columns(self) -> list[int]:
        return list(self.transpose().rows)

    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for i, r in enumerate(self.rows):
            bit = 1 << i
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= bit
                r ^= low
        return BitMatrix(len(self.rows), tuple(out))

    def vecmul(self, v: BitVector) -> BitVector:
        """Row vector times matrix, ``v @ self``."""
        if v.length != len(self.rows):
            raise DimensionError(f"vector length {v.length} != rows {len(self.rows)}")
        acc = 0
        bits = v.bits
        i = 0
        while bits:
            if bits & 1:
                acc ^= self.rows[i]
            bits >>= 1
            i += 1
        return BitVector(self.cols, acc)

    def apply(self, v: BitVector) -> BitVector:
        """Matrix times column vector, ``self @ v^T``."""
        if v.length != self.cols:
            raise DimensionError(f"vector length {v.length} != cols {self.cols}")
        out = 0
        for i, r in enumerate(self.rows):
            if popcount(r & v.bits) & 1:
                out |= 1 << i
        return BitVector(len(self.rows), out)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        rows = []
        for r in self.rows:
            rows.append(other.vecmul(BitVector(self.cols, r)).bits)
        return BitMatrix(other.cols, tuple(rows))

    def stack(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.cols:
            raise DimensionError("column counts differ")
        return BitMatrix(self.cols, self.rows + other.rows)

    def select_columns(self, indices: Sequence[int]) -> "BitMatrix":
        """Submatrix keeping ``indices`` in the given order."""
        rows = []
        for r in self.rows:
            out = 0
            for pos, j in enumerate(indices):
                if (r >> j) & 1:
                    out |= 1 << pos
            rows.append(out)
        return BitMatrix(len(indices), tuple(rows))

    def to_strs(self) -> list[str]:
        return [str(self.row(i)) for i in range(len(self.rows))]

    def __str__(self) -> str:
        return "\n".join(self.to_strs())


def rref(rows: Sequence[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of packed rows.

    Pivots are taken in increasing column order among columns ``< ncols``;
    bits at or above ``ncols`` ride along (useful for tracking row operations
    or an augmented right-hand side).  Returns the reduced pivot rows, in
    pivot order, and the pivot columns.
    """
    limit = 1 << ncols
    work = [r for r in rows if r & (limit - 1)]
    pivots: list[int] = []
    out: list[int] = []
    while work:
        low = min(r & -r for r in work)
        for idx, r in enumerate(work):
            if r & low:
                pivot = work.pop(idx)
                break
        work = [r ^ pivot if r & low else r for r in work]
        out = [r ^ pivot if r & low else r for r in out]
        out.append(pivot)
        pivots.append(low.bit_length() - 1)
        work = [r for r in work if r & (limit - 1)]
    return out, pivots


def rank_of_rows(rows: Iterable[int]) -> int:
    """GF(2) rank of packed rows (xor basis by leading bit)."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = r
                break
            r ^= b
    return len(basis)


def rank(M: BitMatrix) -> int:
    """GF(2) row rank of ``M``."""
    return rank_of_rows(M.rows)


def solve_rows(rows: Sequence[int], rhs: int, ncols: int) -> Optional[int]:
    """Solve ``A x = b`` with ``A`` given as packed rows and ``b`` packed in ``rhs``.

    Returns the packed solution with every free variable set to zero, or None
    when the system is inconsistent.
    """
    aug_bit = 1 << ncols
    aug = [r | (aug_bit if (rhs >> i) & 1 else 0) for i, r in enumerate(rows)]
    reduced, pivots = rref(aug, ncols + 1)
    x = 0
    for r, col in zip(reduced, pivots):
        if col == ncols:
            return None
        if r & aug_bit:
            x |= 1 << col
    return x


def solve_consistent(A: BitMatrix, b: BitVector) -> Optional[BitVector]:
    """Solve ``A x^T = b^T`` over GF(2).

    The solution is read off the reduced row echelon form with free variables
    set to zero, so it is unique for a given system.  Returns None when
    ``rank(A|b) > rank(A)``.
    """
    if A.nrows != b.length:
        raise DimensionError(f"A has {A.nrows} rows but b has length {b.length}")
    x = solve_rows(A.rows, b.bits, A.cols)
    if x is None:
        return None
    return BitVector(A.cols, x)


def null_space(M: BitMatrix) -> BitMatrix:
    """Basis (as rows) of ``{x : M x^T = 0}``."""
    reduced, pivots = rref(M.rows, M.cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        x = 1 << free
        for r, col in zip(reduced, pivots):
            if (r >> free) & 1:
                x |= 1 << col
        basis.append(x)
    return BitMatrix(M.cols, tuple(basis))


def row_basis(M: BitMatrix) -> BitMatrix:
    reduced, _ = rref(M.rows, M.cols)
    return BitMatrix(M.cols, tuple(reduced))


# ---------------------------------------------------------------------------
# Polynomials over GF(2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BinaryPolynomial:
    """Polynomial over GF(2); bit ``i`` of ``mask`` is the coefficient of x^i.

    The zero polynomial has degree -1.
    """

    mask: int = 0

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("coefficient mask must be non-negative")

    @classmethod
    def from_hex(cls, text: str) -> "BinaryPolynomial":
        return cls(int(text, 16))

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> "BinaryPolynomial":
        mask = 0
        for e in exponents:
            mask ^= 1 << e
        return cls(mask)

    @classmethod
    def one(cls) -> "BinaryPolynomial":
        return cls(1)

    def to_hex(self) -> str:
        return f"0x{self.mask:x}"

    @property
    def degree(self) -> int:
        return self.mask.bit_length() - 1

    def is_zero(self) -> bool:
        return self.mask == 0

    def coeff(self, i: int) -> int:
        return (self.mask >> i) & 1

    def __str__(self) -> str:
        if not self.mask:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            if (self.mask >> i) & 1:
                terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
        return "+".join(terms)

    def __add__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        return BinaryPolynomial(self.mask ^ other.mask)

    __sub__ = __add__

    def __mul__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        return BinaryPolynomial(clmul(self.mask, other.mask))

    def __divmod__(self, other: "BinaryPolynomial"):
        return poly_divmod(self, other)

    def __floordiv__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        return poly_divmod(self, other)[0]

    def __mod__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        return poly_divmod(self, other)[1]

    def shift(self, k: int) -> "BinaryPolynomial":
        return BinaryPolynomial(self.mask << k)

    def reciprocal(self) -> "BinaryPolynomial":
        """x^deg * p(1/x); the zero polynomial maps to itself."""
        if not self.mask:
            return self
        d = self.degree
        out = 0
        for i in range(d + 1):
            if (self.mask >> i) & 1:
                out |= 1 << (d - i)
        return BinaryPolynomial(out)

    def to_vector(self, length: int) -> BitVector:
        return BitVector(length, self.mask)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two coefficient masks."""
    if a.bit_length() > b.bit_length():
        a, b = b, a
    out = 0
    while a:
        if a & 1:
            out ^= b
        a >>= 1
        b <<= 1
    return out


def mask_divmod(f: int, g: int) -> tuple[int, int]:
    if g == 0:
        raise ZeroDivisionError("polynomial division by zero")
    dg = g.bit_length() - 1
    q = 0
    while f and f.bit_length() - 1 >= dg:
        shift = f.bit_length() - 1 - dg
        q |= 1 << shift
        f ^= g << shift
    return q, f


def poly_divmod(f: BinaryPolynomial, g: BinaryPolynomial) -> tuple[BinaryPolynomial, BinaryPolynomial]:
    """Long division over GF(2): returns (q, rem) with f = q*g + rem, deg rem < deg g."""
    q, rem = mask_divmod(f.mask, g.mask)
    return BinaryPolynomial(q), BinaryPolynomial(rem)


def poly_gcd(a: BinaryPolynomial, b: BinaryPolynomial) -> BinaryPolynomial:
    x, y = a.mask, b.mask
    while y:
        x, y = y, mask_divmod(x, y)[1]
    return BinaryPolynomial(x)


def poly_lcm(a: BinaryPolynomial, b: BinaryPolynomial) -> BinaryPolynomial:
    if a.is_zero() or b.is_zero():
        return BinaryPolynomial(0)
    return (a * b) // poly_gcd(a, b)


def x_pow_n_plus_1(n: int) -> BinaryPolynomial:
    return BinaryPolynomial((1 << n) | 1)


def is_irreducible(p: BinaryPolynomial) -> bool:
    """Trial division by every polynomial of degree 1..deg(p)//2."""
    d = p.degree
    if d < 1:
        return False
    for q in range(2, 1 << (d // 2 + 1)):
        if mask_divmod(p.mask, q)[1] == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# GF(2^m)
# ---------------------------------------------------------------------------

DEFAULT_PRIMITIVES = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


@dataclass(frozen=True)
class FieldGF2m:
    """GF(2^m) built from a primitive polynomial, with log/antilog tables.

    ``antilog[i] = alpha**i`` for ``0 <= i < 2**m - 1`` and ``log[alpha**i] = i``.
    ``log[0]`` is unused and stored as -1.
    """

    m: int
    primitive: BinaryPolynomial
    log: tuple[int, ...] = field(repr=False, compare=False, default=())
    antilog: tuple[int, ...] = field(repr=False, compare=False, default=())

    @classmethod
    def build(cls, m: int, primitive: Optional[BinaryPolynomial | int] = None) -> "FieldGF2m":
        if m < 1:
            raise ValueError("extension degree must be at least 1")
        if primitive is None:
            if m not in DEFAULT_PRIMITIVES:
                raise ValueError(f"no default primitive polynomial for m={m}")
            primitive = DEFAULT_PRIMITIVES[m]
        if isinstance(primitive, int):
            primitive = BinaryPolynomial(primitive)
        if primitive.degree != m:
            raise ValueError(f"primitive polynomial {primitive} does not have degree {m}")
        if not is_irreducible(primitive):
            raise ValueError(f"{primitive} is not irreducible over GF(2)")
        order = (1 << m) - 1
        antilog = []
        log = [-1] * (1 << m)
        e = 1
        for i in range(order):
            if i and e == 1:
                raise ValueError(f"{primitive} is not primitive: x has order {i}")
            antilog.append(e)
            log[e] = i
            e <<= 1
            if e >> m:
                e ^= primitive.mask
        if e != 1:  # pragma: no cover - irreducible implies x^(2^m-1) = 1
            raise ValueError(f"{primitive} is not primitive")
        return cls(m, primitive, tuple(log), tuple(antilog))

    @property
    def order(self) -> int:
        return (1 << self.m) - 1

    def alpha_pow(self, e: int) -> int:
        return self.antilog[e % self.order]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.antilog[(self.log[a] + self.log[b]) % self.order]

    def eval_poly(self, p: BinaryPolynomial, x: int) -> int:
        """Evaluate a GF(2)-coefficient polynomial at the field element ``x`` (Horner)."""
        acc = 0
        for i in range(p.degree, -1, -1):
            acc = self.mul(acc, x) ^ ((p.mask >> i) & 1)
        return acc

    def cyclotomic_coset(self, exponent: int) -> list[int]:
        n = self.order
        e = exponent % n
        coset = []
        while e not in coset:
            coset.append(e)
            e = (2 * e) % n
        return coset


def minimal_polynomial(field: FieldGF2m, exponent: int) -> BinaryPolynomial:
    """Minimal polynomial of ``alpha**exponent`` over GF(2).

    Expands the product of (x - alpha^j) over the cyclotomic coset of the
    exponent and checks that every coefficient lands in GF(2).
    """
    coeffs = [1]  # field elements, index i = coefficient of x^i
    for j in field.cyclotomic_coset(exponent):
        root = field.alpha_pow(j)
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] ^= c
            nxt[i] ^= field.mul(c, root)
        coeffs = nxt
    mask = 0
    for i, c in enumerate(coeffs):
        if c not in (0, 1):
            raise ArithmeticError(f"coefficient of x^{i} not in GF(2)")
        mask |= c << i
    return BinaryPolynomial(mask)


def bch_generator(field: FieldGF2m, n: int, designed_distance: int) -> BinaryPolynomial:
    """Narrow-sense BCH generator: lcm of minimal polynomials of alpha^1..alpha^(delta-1)."""
    if n != field.order:
        raise ValueError(f"block length {n} must equal 2^{field.m} - 1 = {field.order}")
    if designed_distance < 2:
        raise ValueError("designed distance must be at least 2")
    g = BinaryPolynomial(1)
    seen: set[int] = set()
    for e in range(1, designed_distance):
        e %= n
        if e in seen:
            continue
        coset = field.cyclotomic_coset(e)
        seen.update(coset)
        g = g * minimal_polynomial(field, e)
    if not (x_pow_n_plus_1(n) % g).is_zero():  # pragma: no cover
        raise ArithmeticError("BCH generator does not divide x^n + 1")
    return g


def bch_bound(field: FieldGF2m, g: BinaryPolynomial) -> int:
    """BCH lower bound on the minimum distance of the cyclic code generated by ``g``.

    Finds the longest run of consecutive exponents j (cyclically) with
    g(alpha^j) = 0 and returns run + 1.
    """
    n = field.order
    zeros = [field.eval_poly(g, field.alpha_pow(j)) == 0 for j in range(n)]
    if all(zeros):
        return n + 1
    best = 0
    start = zeros.index(False)
    run = 0
    for step in range(1, n + 1):
        if zeros[(start + step) % n]:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best + 1
