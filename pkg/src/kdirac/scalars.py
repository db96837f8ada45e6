"""Exact arithmetic in Q(sqrt(m)) and dense exact linear algebra.

Values are ``a + b*sqrt(m)`` with rational ``a`` and ``b``.  The radicand is
carried by every value and checked on each binary operation, so values from
different contexts can never be silently combined.

Rank is computed by Gaussian elimination over the field.  Large matrices with
purely rational entries are handed to FLINT, which does the same job in C.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from numbers import Rational
from typing import Iterable, Sequence

import flint

__all__ = [
    "FieldScalar",
    "ExactMatrix",
    "MixedRadicandError",
    "exact_rank",
    "scalar_arith",
    "parse_rational",
]

# above this many entries exact_rank uses the FLINT route
FLINT_THRESHOLD = 400


class MixedRadicandError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


@lru_cache(maxsize=None)
def _is_square(m: int) -> bool:
    r = isqrt(m)
    return r * r == m


_ZERO = Fraction(0)


def _raw(a: Fraction, b: Fraction, m: int) -> "FieldScalar":
    # trusted constructor for results of field operations
    if b and _is_square(m):
        return FieldScalar(a, b, m)
    s = object.__new__(FieldScalar)
    s.a = a
    s.b = b
    s.m = m
    return s


class FieldScalar:
    """Element ``a + b*sqrt(m)``; treated as immutable and hashable."""

    __slots__ = ("a", "b", "m")

    def __init__(self, a=0, b=0, m: int = 2):
        if m <= 0:
            raise ValueError(f"radicand must be positive, got {m}")
        a = Fraction(a)
        b = Fraction(b)
        if b and _is_square(m):
            # sqrt(m) is rational here; fold it so equality stays structural
            a += b * isqrt(m)
            b = Fraction(0)
        self.a = a
        self.b = b
        self.m = int(m)

    @classmethod
    def sqrt_m(cls, m: int) -> "FieldScalar":
        return cls(0, 1, m)

    def _coerce(self, other) -> "FieldScalar":
        if isinstance(other, FieldScalar):
            if other.m != self.m:
                raise MixedRadicandError(
                    f"cannot combine sqrt({self.m}) and sqrt({other.m}) values"
                )
            return other
        if isinstance(other, (int, Rational)):
            return FieldScalar(other, 0, self.m)
        return NotImplemented

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _raw(self.a + o.a, self.b + o.b, self.m)

    __radd__ = __add__

    def __neg__(self):
        return _raw(-self.a, -self.b, self.m)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _raw(self.a - o.a, self.b - o.b, self.m)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.b and not o.b:
            return _raw(self.a * o.a, _ZERO, self.m)
        return _raw(
            self.a * o.a + self.m * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.m,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "FieldScalar":
        return _raw(self.a, -self.b, self.m)

    def norm(self) -> Fraction:
        return self.a * self.a - self.m * self.b * self.b

    def inverse(self) -> "FieldScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(sqrt(m))")
        nrm = self.norm()
        return _raw(self.a / nrm, -self.b / nrm, self.m)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            raise ZeroDivisionError("division by zero in Q(sqrt(m))")
        if not o.b:
            return _raw(self.a / o.a, self.b / o.a, self.m)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.m == other.m and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Rational)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.m))

    def __repr__(self):
        return f"FieldScalar({self.a}, {self.b}, m={self.m})"

    def __str__(self):
        if not self.b:
            return str(self.a)
        rad = f"{self.b}*sqrt({self.m})"
        if not self.a:
            return rad
        return f"{self.a} + {rad}"

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "m": self.m}

    @classmethod
    def from_json(cls, data: dict) -> "FieldScalar":
        return cls(Fraction(data["a"]), Fraction(data["b"]), int(data["m"]))


def scalar_arith(op: str, x: FieldScalar, y: FieldScalar | None = None):
    """Dispatch by name; mirrors the operator overloads."""
    if op == "neg":
        return -x
    if op == "is_zero":
        return x.is_zero()
    if y is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def _to_fmpq(q: Fraction) -> flint.fmpq:
    return flint.fmpq(q.numerator, q.denominator)


class ExactMatrix:
    """Dense matrix over Q(sqrt(m)), stored as two rational FLINT matrices.

    The matrix is ``ra + rb*sqrt(m)``; ``rb`` is ``None`` when every entry
    is rational.
    """

    __slots__ = ("rows", "cols", "m", "ra", "rb")

    def __init__(self, rows: int, cols: int, m: int, ra=None, rb=None):
        self.rows = rows
        self.cols = cols
        self.m = m
        self.ra = ra if ra is not None else flint.fmpq_mat(rows, cols)
        self.rb = rb

    @classmethod
    def zeros(cls, rows: int, cols: int, m: int) -> "ExactMatrix":
        return cls(rows, cols, m)

    @classmethod
    def identity(cls, size: int, m: int) -> "ExactMatrix":
        ra = flint.fmpq_mat(size, size)
        for i in range(size):
            ra[i, i] = 1
        return cls(size, size, m, ra)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], m: int) -> "ExactMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        avals, bvals = [], []
        irrational = False
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for x in row:
                if isinstance(x, FieldScalar):
                    if x.m != m:
                        raise MixedRadicandError(f"entry has m={x.m}, matrix has m={m}")
                    avals.append(_to_fmpq(x.a))
                    bvals.append(_to_fmpq(x.b))
                    irrational = irrational or bool(x.b)
                else:
                    avals.append(_to_fmpq(Fraction(x)))
                    bvals.append(flint.fmpq(0))
        ra = flint.fmpq_mat(nrows, ncols, avals)
        rb = flint.fmpq_mat(nrows, ncols, bvals) if irrational else None
        return cls(nrows, ncols, m, ra, rb)

    @classmethod
    def from_rational(cls, rows: int, cols: int, flat: Iterable, m: int) -> "ExactMatrix":
        """Build from a row-major iterable of rationals."""
        vals = [_to_fmpq(Fraction(x)) if not isinstance(x, (int, flint.fmpq)) else x for x in flat]
        return cls(rows, cols, m, flint.fmpq_mat(rows, cols, vals))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_rational(self) -> bool:
        return self._rb_zero()

    def _rb_zero(self) -> bool:
        if self.rb is None:
            return True
        return all(x == 0 for x in self.rb.entries())

    def __getitem__(self, idx) -> FieldScalar:
        i, j = idx
        a = self.ra[i, j]
        b = self.rb[i, j] if self.rb is not None else 0
        return FieldScalar(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)) if b else 0, self.m)

    def to_rows(self) -> list[list[FieldScalar]]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def _check(self, other: "ExactMatrix"):
        if other.m != self.m:
            raise MixedRadicandError(f"matrices over sqrt({self.m}) and sqrt({other.m})")

    def _rb_or_zero(self):
        return self.rb if self.rb is not None else flint.fmpq_mat(self.rows, self.cols)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.rb is None and other.rb is None:
            rb = None
        else:
            rb = self._rb_or_zero() + other._rb_or_zero()
        return ExactMatrix(self.rows, self.cols, self.m, self.ra + other.ra, rb)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols, self.m, -self.ra, None if self.rb is None else -self.rb)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ra = self.ra * other.ra
        rb = None
        if self.rb is not None and other.rb is not None:
            ra = ra + self.rb * other.rb * self.m
        if self.rb is not None or other.rb is not None:
            rb = flint.fmpq_mat(self.rows, other.cols)
            if other.rb is not None:
                rb = rb + self.ra * other.rb
            if self.rb is not None:
                rb = rb + self.rb * other.ra
        return ExactMatrix(self.rows, other.cols, self.m, ra, rb)

    def scale(self, c: FieldScalar | Fraction | int) -> "ExactMatrix":
        if not isinstance(c, FieldScalar):
            c = FieldScalar(c, 0, self.m)
        elif c.m != self.m:
            raise MixedRadicandError(f"scalar over sqrt({c.m}), matrix over sqrt({self.m})")
        a, b = _to_fmpq(c.a), _to_fmpq(c.b)
        rb_self = self._rb_or_zero()
        ra = self.ra * a + rb_self * (b * self.m)
        rb = None
        if b or self.rb is not None:
            rb = self.ra * b + rb_self * a
        return ExactMatrix(self.rows, self.cols, self.m, ra, rb)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols, self.rows, self.m, self.ra.transpose(),
            None if self.rb is None else self.rb.transpose(),
        )

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.ra.entries()) and self._rb_zero()

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.m == other.m and self.shape == other.shape and (self - other).is_zero()

    __hash__ = None

    def nonzero_entries(self) -> list[tuple[int, int, FieldScalar]]:
        out = []
        for i in range(self.rows):
            for j in range(self.cols):
                x = self[i, j]
                if not x.is_zero():
                    out.append((i, j, x))
        return out

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, m={self.m})"


def stack_blocks(blocks: Sequence[Sequence[ExactMatrix | None]], row_sizes, col_sizes, m: int) -> ExactMatrix:
    """Assemble a block matrix; ``None`` blocks are zero."""
    rows, cols = sum(row_sizes), sum(col_sizes)
    irrational = any(b is not None and b.rb is not None for row in blocks for b in row)
    ra = [[0] * cols for _ in range(rows)]
    rb = [[0] * cols for _ in range(rows)] if irrational else None
    r0 = 0
    for bi, row in enumerate(blocks):
        c0 = 0
        for bj, blk in enumerate(row):
            if blk is not None:
                if blk.shape != (row_sizes[bi], col_sizes[bj]):
                    raise ValueError("block shape mismatch")
                vals = blk.ra.entries()
                for i in range(blk.rows):
                    ra[r0 + i][c0:c0 + blk.cols] = vals[i * blk.cols:(i + 1) * blk.cols]
                if rb is not None and blk.rb is not None:
                    vals = blk.rb.entries()
                    for i in range(blk.rows):
                        rb[r0 + i][c0:c0 + blk.cols] = vals[i * blk.cols:(i + 1) * blk.cols]
            c0 += col_sizes[bj]
        r0 += row_sizes[bi]
    fa = flint.fmpq_mat(rows, cols, [x for row in ra for x in row])
    fb = flint.fmpq_mat(rows, cols, [x for row in rb for x in row]) if rb is not None else None
    return ExactMatrix(rows, cols, m, fa, fb)


def _gauss_rank(rows: list[list[FieldScalar]]) -> int:
    """Row reduction with the first nonzero entry of each column as pivot."""
    work = [list(r) for r in rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if not work[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = work[rank][col].inverse()
        prow = [x * inv for x in work[rank]]
        work[rank] = prow
        for r in range(rank + 1, nrows):
            factor = work[r][col]
            if factor.is_zero():
                continue
            work[r] = [x - factor * p for x, p in zip(work[r], prow)]
        rank += 1
        if rank == nrows:
            break
    return rank


def exact_rank(A: ExactMatrix) -> int:
    """Rank over Q(sqrt(m)).

    Small matrices go through the pure Python elimination above.  Larger ones
    use FLINT: directly for rational matrices, otherwise on the rational
    2x2-block form ``[[ra, m*rb], [rb, ra]]`` whose rank is twice the rank
    over the quadratic field.
    """
    if A.rows == 0 or A.cols == 0:
        return 0
    if A.rows * A.cols <= FLINT_THRESHOLD:
        return _gauss_rank(A.to_rows())
    if A._rb_zero():
        return A.ra.rank()
    top = [A.ra, A.rb * A.m]
    bottom = [A.rb, A.ra]
    real = stack_blocks(
        [[ExactMatrix(A.rows, A.cols, A.m, blk) for blk in top],
         [ExactMatrix(A.rows, A.cols, A.m, blk) for blk in bottom]],
        [A.rows, A.rows], [A.cols, A.cols], A.m,
    )
    return real.ra.rank() // 2
