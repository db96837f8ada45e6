"""Clifford algebra R_n with Euclidean form, coefficients in Q(sqrt(m)).

Blades are bit masks: bit ``a-1`` set means generator ``e_a`` is present.
Generators square to -1, so ``e_a e_b + e_b e_a = -2 delta_ab``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import flint

from .scalars import ExactMatrix, FieldScalar, MixedRadicandError

__all__ = [
    "CliffordElement",
    "TensorSlot",
    "blade_sign",
    "blade_mul",
    "vector_of",
    "merge_slots",
    "split_spinor_twistor",
    "spinor_embedding",
    "left_mul_matrix",
]


def _reorder_parity(a: int, b: int) -> int:
    # transpositions needed to sort the concatenated blade a*b
    swaps = 0
    a >>= 1
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return swaps


def blade_sign(a: int, b: int) -> int:
    """Sign of ``e_A e_B = sign * e_{A xor B}`` with e_a^2 = -1."""
    parity = _reorder_parity(a, b) + bin(a & b).count("1")
    return -1 if parity & 1 else 1


@lru_cache(maxsize=None)
def _sign_table(n: int) -> tuple[tuple[int, ...], ...]:
    size = 1 << n
    return tuple(tuple(blade_sign(a, b) for b in range(size)) for a in range(size))


def _signs(n: int):
    if n <= 8:
        return _sign_table(n)
    return None


class CliffordElement:
    """Finite combination of blades with FieldScalar coefficients."""

    __slots__ = ("n", "m", "terms")

    def __init__(self, n: int, m: int, terms: Mapping[int, FieldScalar] | None = None):
        self.n = n
        self.m = m
        clean = {}
        if terms:
            limit = 1 << n
            for blade, c in terms.items():
                if not 0 <= blade < limit:
                    raise ValueError(f"blade {blade:b} outside R_{n}")
                if not isinstance(c, FieldScalar):
                    c = FieldScalar(c, 0, m)
                elif c.m != m:
                    raise MixedRadicandError(f"coefficient over sqrt({c.m}) in R_{n} over sqrt({m})")
                if not c.is_zero():
                    clean[blade] = c
        self.terms = clean

    @classmethod
    def _wrap(cls, n: int, m: int, terms: dict) -> "CliffordElement":
        el = object.__new__(cls)
        el.n = n
        el.m = m
        el.terms = terms
        return el

    @classmethod
    def zero(cls, n: int, m: int) -> "CliffordElement":
        return cls._wrap(n, m, {})

    @classmethod
    def scalar(cls, c, n: int, m: int) -> "CliffordElement":
        return cls(n, m, {0: c})

    @classmethod
    def one(cls, n: int, m: int) -> "CliffordElement":
        return cls.scalar(1, n, m)

    @classmethod
    def generator(cls, alpha: int, n: int, m: int) -> "CliffordElement":
        """``e_alpha`` for 1 <= alpha <= n."""
        if not 1 <= alpha <= n:
            raise ValueError(f"generator index {alpha} outside 1..{n}")
        return cls(n, m, {1 << (alpha - 1): 1})

    @classmethod
    def blade(cls, indices: Iterable[int], n: int, m: int) -> "CliffordElement":
        """Ordered product ``e_i1 e_i2 ...``."""
        out = cls.one(n, m)
        for a in indices:
            out = out * cls.generator(a, n, m)
        return out

    def _same(self, other: "CliffordElement"):
        if self.n != other.n:
            raise ValueError(f"mismatched algebras R_{self.n} and R_{other.n}")
        if self.m != other.m:
            raise MixedRadicandError(f"mixed radicands {self.m} and {other.m}")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, blade: int) -> FieldScalar:
        return self.terms.get(blade, FieldScalar(0, 0, self.m))

    def scalar_part(self) -> FieldScalar:
        return self.coefficient(0)

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._same(other)
        out = dict(self.terms)
        for blade, c in other.terms.items():
            s = out.get(blade)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(blade, None)
            else:
                out[blade] = s
        return CliffordElement._wrap(self.n, self.m, out)

    def __neg__(self) -> "CliffordElement":
        return CliffordElement._wrap(self.n, self.m, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return self + (-other)

    def scale(self, c) -> "CliffordElement":
        if not isinstance(c, FieldScalar):
            c = FieldScalar(c, 0, self.m)
        if c.is_zero():
            return CliffordElement.zero(self.n, self.m)
        return CliffordElement._wrap(self.n, self.m, {b: x * c for b, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            return blade_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def left_generator(self, alpha: int) -> "CliffordElement":
        """``e_alpha * self``, cheaper than a full product."""
        bit = 1 << (alpha - 1)
        out = {}
        for blade, c in self.terms.items():
            out[blade ^ bit] = c if blade_sign(bit, blade) > 0 else -c
        return CliffordElement._wrap(self.n, self.m, out)

    def __eq__(self, other):
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.n == other.n and self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.m, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for blade in sorted(self.terms):
            name = "".join(f"e{a + 1}" for a in range(self.n) if blade >> a & 1) or "1"
            parts.append(f"({self.terms[blade]})*{name}")
        return " + ".join(parts)


def blade_mul(x: CliffordElement, y: CliffordElement) -> CliffordElement:
    """Clifford product."""
    x._same(y)
    table = _signs(x.n)
    out: dict[int, FieldScalar] = {}
    for ba, ca in x.terms.items():
        row = table[ba] if table is not None else None
        for bb, cb in y.terms.items():
            sign = row[bb] if row is not None else blade_sign(ba, bb)
            term = ca * cb
            key = ba ^ bb
            prev = out.get(key)
            if sign > 0:
                out[key] = term if prev is None else prev + term
            else:
                out[key] = -term if prev is None else prev - term
    return CliffordElement._wrap(x.n, x.m, {b: c for b, c in out.items() if not c.is_zero()})


def vector_of(v: Sequence, m: int | None = None) -> CliffordElement:
    """``sum_a v_a e_a``; ``m`` is taken from the entries when not given."""
    n = len(v)
    if m is None:
        m = next((c.m for c in v if isinstance(c, FieldScalar)), None)
        if m is None:
            raise ValueError("radicand unknown: pass m or FieldScalar entries")
    return CliffordElement(n, m, {1 << a: c for a, c in enumerate(v)})


@dataclass(frozen=True)
class TensorSlot:
    """Simple tensor ``e_index (x) value`` in E (x) R_n."""

    e_index: int
    value: CliffordElement


def merge_slots(slots: Iterable[TensorSlot]) -> list[TensorSlot]:
    """Combine like indices, drop zeros, sort by index."""
    acc: dict[int, CliffordElement] = {}
    for s in slots:
        acc[s.e_index] = s.value if s.e_index not in acc else acc[s.e_index] + s.value
    return [TensorSlot(a, acc[a]) for a in sorted(acc) if not acc[a].is_zero()]


def spinor_embedding(phi: CliffordElement) -> list[TensorSlot]:
    """``phi -> sum_a e_a (x) e_a phi``."""
    return merge_slots(TensorSlot(a, phi.left_generator(a)) for a in range(1, phi.n + 1))


def split_spinor_twistor(t: Iterable[TensorSlot]) -> tuple[list[TensorSlot], list[TensorSlot]]:
    """Return ``(twistor, spinor)`` parts of a combination of slots."""
    t = merge_slots(t)
    if not t:
        return [], []
    n = t[0].value.n
    inv_n = Fraction(-1, n)
    spinor: list[TensorSlot] = []
    for slot in t:
        moved = slot.value.left_generator(slot.e_index)
        for a in range(1, n + 1):
            spinor.append(TensorSlot(a, moved.left_generator(a).scale(inv_n)))
    spinor = merge_slots(spinor)
    twistor = merge_slots(list(t) + [TensorSlot(s.e_index, -s.value) for s in spinor])
    return twistor, spinor


@lru_cache(maxsize=None)
def _blade_index_rows(n: int) -> tuple:
    # for each blade b: list of (row, col, sign) of left multiplication by e_b
    size = 1 << n
    return tuple(
        tuple((b ^ x, x, blade_sign(b, x)) for x in range(size)) for b in range(size)
    )


def left_mul_matrix(c: CliffordElement) -> ExactMatrix:
    """Matrix of ``x -> c x`` on the blade basis (column = input blade)."""
    size = 1 << c.n
    ra = [flint.fmpq(0)] * (size * size)
    rb = None
    rows = _blade_index_rows(c.n)
    for blade, coef in c.terms.items():
        a = flint.fmpq(coef.a.numerator, coef.a.denominator)
        b = flint.fmpq(coef.b.numerator, coef.b.denominator) if coef.b else None
        if b is not None and rb is None:
            rb = [flint.fmpq(0)] * (size * size)
        for r, col, sign in rows[blade]:
            idx = r * size + col
            ra[idx] += a if sign > 0 else -a
            if b is not None:
                rb[idx] += b if sign > 0 else -b
    return ExactMatrix(
        size, size, c.m,
        flint.fmpq_mat(size, size, ra),
        flint.fmpq_mat(size, size, rb) if rb is not None else None,
    )
