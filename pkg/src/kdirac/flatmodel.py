"""Polynomial sections on the big cell and the left-invariant vector fields.

Coordinates are ``x_{i,a}`` (first slot, ``1 <= i <= k``, ``1 <= a <= n``)
and ``x_{ij}`` (second slot, ``i < j``).  A polynomial maps an exponent tuple
to a Clifford coefficient; a section is a labelled family of polynomials.

The first-slot fields are

    xi_{i,mu} = d_{i,mu} - 1/(2 sqrt m) * sum_{l != i} x_{l,mu} d_{il}

with ``d_{il} = -d_{li}`` for ``l < i``, and the second-slot fields are plain
coordinate derivatives.  The Dirac operator is ``sum_a e_a xi_{i,a}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .clifford import CliffordElement
from .scalars import FieldScalar

__all__ = [
    "Coordinates",
    "PolySection",
    "coordinate_derivative",
    "apply_xi_first",
    "apply_xi_second",
    "apply_dirac",
    "is_q_pullback",
    "random_section",
]

VarId = tuple  # ("first", i, a) or ("second", i, j)
Exps = tuple[int, ...]
Poly = dict  # Exps -> CliffordElement


@dataclass(frozen=True)
class Coordinates:
    k: int
    n: int
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        index = {}
        pos = 0
        for i in range(1, self.k + 1):
            for a in range(1, self.n + 1):
                index[("first", i, a)] = pos
                pos += 1
        for i in range(1, self.k + 1):
            for j in range(i + 1, self.k + 1):
                index[("second", i, j)] = pos
                pos += 1
        object.__setattr__(self, "_index", index)

    @property
    def m(self) -> int:
        return self.n + 2

    @property
    def size(self) -> int:
        return self.k * self.n + self.k * (self.k - 1) // 2

    @property
    def first_slot_count(self) -> int:
        return self.k * self.n

    def variables(self) -> list[VarId]:
        return sorted(self._index, key=self._index.get)

    def first(self, i: int, a: int) -> int:
        try:
            return self._index[("first", i, a)]
        except KeyError:
            raise KeyError(f"no variable x_({i},{a}) for k={self.k}, n={self.n}") from None

    def second(self, i: int, j: int) -> tuple[int, int] | None:
        """Position and sign of ``x_{ij}``; ``None`` when ``i == j``."""
        if i == j:
            return None
        lo, hi = (i, j) if i < j else (j, i)
        try:
            pos = self._index[("second", lo, hi)]
        except KeyError:
            raise KeyError(f"no variable x_({i}{j}) for k={self.k}") from None
        return pos, (1 if i < j else -1)

    def resolve(self, var: VarId) -> tuple[int, int]:
        """Position and sign for any variable id."""
        kind = var[0]
        if kind == "first":
            return self.first(var[1], var[2]), 1
        if kind == "second":
            res = self.second(var[1], var[2])
            if res is None:
                raise KeyError(f"x_({var[1]}{var[2]}) is identically zero")
            return res
        raise KeyError(f"unknown variable {var!r}")

    def zero_exps(self) -> Exps:
        return (0,) * self.size

    def monomial(self, powers: Mapping[VarId, int]) -> tuple[Exps, int]:
        """Exponent tuple and sign for a product of variables."""
        exps = [0] * self.size
        sign = 1
        for var, p in powers.items():
            pos, s = self.resolve(var)
            exps[pos] += p
            if s < 0 and p % 2:
                sign = -sign
        return tuple(exps), sign


# polynomial helpers; all return fresh dicts

def _padd(acc: Poly, exps: Exps, c: CliffordElement):
    prev = acc.get(exps)
    val = c if prev is None else prev + c
    if val.is_zero():
        acc.pop(exps, None)
    else:
        acc[exps] = val


def _poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for e, c in q.items():
        _padd(out, e, c)
    return out


def _poly_scale(p: Poly, c) -> Poly:
    out = {}
    for e, v in p.items():
        w = v.scale(c)
        if not w.is_zero():
            out[e] = w
    return out


def _poly_diff(p: Poly, pos: int) -> Poly:
    out = {}
    for e, c in p.items():
        p_e = e[pos]
        if p_e:
            ne = e[:pos] + (p_e - 1,) + e[pos + 1:]
            _padd(out, ne, c.scale(p_e) if p_e != 1 else c)
    return out


def _poly_mul_var(p: Poly, pos: int) -> Poly:
    out = {}
    for e, c in p.items():
        ne = e[:pos] + (e[pos] + 1,) + e[pos + 1:]
        out[ne] = c
    return out


def _poly_left_gen(p: Poly, alpha: int) -> Poly:
    return {e: c.left_generator(alpha) for e, c in p.items()}


def _poly_left_mul(c: CliffordElement, p: Poly) -> Poly:
    out = {}
    for e, v in p.items():
        w = c * v
        if not w.is_zero():
            out[e] = w
    return out


class PolySection:
    """Labelled family of Clifford-valued polynomials."""

    __slots__ = ("coords", "components")

    def __init__(self, coords: Coordinates, components: Mapping[str, Poly] | None = None):
        self.coords = coords
        self.components: dict[str, Poly] = {}
        for label, poly in (components or {}).items():
            self.components[label] = {e: c for e, c in poly.items() if not c.is_zero()}

    @classmethod
    def zero(cls, coords: Coordinates, labels: Iterable[str]) -> "PolySection":
        return cls(coords, {label: {} for label in labels})

    @classmethod
    def from_terms(cls, coords: Coordinates, terms: Mapping[str, Iterable[tuple[Mapping[VarId, int], CliffordElement]]]) -> "PolySection":
        """Build from ``{label: [(powers, coefficient), ...]}``."""
        comps = {}
        for label, items in terms.items():
            acc: Poly = {}
            for powers, coef in items:
                exps, sign = coords.monomial(powers)
                _padd(acc, exps, coef if sign > 0 else -coef)
            comps[label] = acc
        return cls(coords, comps)

    @classmethod
    def constant(cls, coords: Coordinates, values: Mapping[str, CliffordElement]) -> "PolySection":
        z = coords.zero_exps()
        return cls(coords, {label: {z: v} for label, v in values.items()})

    @property
    def labels(self) -> list[str]:
        return list(self.components)

    @property
    def m(self) -> int:
        return self.coords.m

    def component(self, label: str) -> Poly:
        return self.components[label]

    def _same(self, other: "PolySection"):
        if self.coords != other.coords:
            raise ValueError("sections live on different coordinate systems")

    def __add__(self, other: "PolySection") -> "PolySection":
        self._same(other)
        out = dict(self.components)
        for label, poly in other.components.items():
            out[label] = _poly_add(out.get(label, {}), poly)
        return PolySection(self.coords, out)

    def __neg__(self) -> "PolySection":
        return self.scale(-1)

    def __sub__(self, other: "PolySection") -> "PolySection":
        return self + (-other)

    def scale(self, c) -> "PolySection":
        if not isinstance(c, FieldScalar):
            c = FieldScalar(c, 0, self.m)
        return PolySection(self.coords, {l: _poly_scale(p, c) for l, p in self.components.items()})

    def left_mul(self, c: CliffordElement) -> "PolySection":
        return PolySection(self.coords, {l: _poly_left_mul(c, p) for l, p in self.components.items()})

    def map_components(self, fn) -> "PolySection":
        return PolySection(self.coords, {l: fn(p) for l, p in self.components.items()})

    def restrict(self, labels: Iterable[str]) -> "PolySection":
        return PolySection(self.coords, {l: self.components.get(l, {}) for l in labels})

    def relabel(self, mapping: Mapping[str, str]) -> "PolySection":
        return PolySection(self.coords, {mapping.get(l, l): p for l, p in self.components.items()})

    def is_zero(self) -> bool:
        return all(not p for p in self.components.values())

    def __eq__(self, other):
        if not isinstance(other, PolySection):
            return NotImplemented
        if self.coords != other.coords:
            return False
        labels = set(self.components) | set(other.components)
        return all(self.components.get(l, {}) == other.components.get(l, {}) for l in labels)

    __hash__ = None

    def nonzero_terms(self) -> Iterator[tuple[str, Exps, int, FieldScalar]]:
        """Every nonzero (label, exponents, blade, value), in a stable order."""
        for label in self.components:
            poly = self.components[label]
            for exps in sorted(poly):
                coef = poly[exps]
                for blade in sorted(coef.terms):
                    yield label, exps, blade, coef.terms[blade]

    def first_nonzero(self):
        return next(self.nonzero_terms(), None)

    def term_count(self) -> int:
        return sum(len(p) for p in self.components.values())

    def describe_monomial(self, exps: Exps) -> str:
        names = []
        for var, e in zip(self.coords.variables(), exps):
            if e:
                tag = f"x{var[1]}_{var[2]}" if var[0] == "first" else f"x{var[1]}{var[2]}"
                names.append(tag if e == 1 else f"{tag}^{e}")
        return "*".join(names) or "1"

    def __repr__(self):
        return f"PolySection(labels={self.labels}, terms={self.term_count()})"


def _map(s: PolySection, fn) -> PolySection:
    return PolySection(s.coords, {l: fn(p) for l, p in s.components.items()})


def coordinate_derivative(which: VarId, s: PolySection) -> PolySection:
    pos, sign = s.coords.resolve(which)
    if sign > 0:
        return _map(s, lambda p: _poly_diff(p, pos))
    return _map(s, lambda p: _poly_scale(_poly_diff(p, pos), -1))


def _xi_first_poly(coords: Coordinates, i: int, mu: int, p: Poly, factor: FieldScalar) -> Poly:
    out = _poly_diff(p, coords.first(i, mu))
    for l in range(1, coords.k + 1):
        sec = coords.second(i, l)
        if sec is None:
            continue
        pos, sign = sec
        d = _poly_diff(p, pos)
        if not d:
            continue
        corr = _poly_mul_var(d, coords.first(l, mu))
        out = _poly_add(out, _poly_scale(corr, factor if sign > 0 else -factor))
    return out


def _correction_factor(m: int) -> FieldScalar:
    # -1/(2 sqrt m) = -(1/(2m)) sqrt m
    return FieldScalar(0, Fraction(-1, 2 * m), m)


def apply_xi_first(i: int, mu: int, s: PolySection) -> PolySection:
    c = s.coords
    if not (1 <= i <= c.k and 1 <= mu <= c.n):
        raise ValueError(f"xi_({i},{mu}) outside k={c.k}, n={c.n}")
    factor = _correction_factor(c.m)
    return _map(s, lambda p: _xi_first_poly(c, i, mu, p, factor))


def apply_xi_second(i: int, j: int, s: PolySection) -> PolySection:
    if not i < j:
        raise ValueError(f"second-slot field needs i < j, got ({i},{j})")
    return coordinate_derivative(("second", i, j), s)


def _dirac_poly(coords: Coordinates, i: int, p: Poly, factor: FieldScalar) -> Poly:
    out: Poly = {}
    for a in range(1, coords.n + 1):
        xi = _xi_first_poly(coords, i, a, p, factor)
        for e, c in xi.items():
            _padd(out, e, c.left_generator(a))
    return out


def apply_dirac(i: int, s: PolySection) -> PolySection:
    c = s.coords
    if not 1 <= i <= c.k:
        raise ValueError(f"Dirac index {i} outside 1..{c.k}")
    factor = _correction_factor(c.m)
    return _map(s, lambda p: _dirac_poly(c, i, p, factor))


def is_q_pullback(s: PolySection) -> bool:
    start = s.coords.first_slot_count
    return all(not any(e[start:]) for p in s.components.values() for e in p)


def random_section(
    k: int,
    n: int,
    degree: int,
    components: Union[int, Sequence[str]],
    seed: int,
    q_pullback: bool,
    terms: int = 5,
    max_blades: int = 3,
) -> PolySection:
    """Reproducible random section of total degree at most ``degree``.

    Each component gets ``terms`` random monomials, each carrying a random
    integer combination of at most ``max_blades`` blades.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    coords = Coordinates(k, n)
    labels = [f"c{a + 1}" for a in range(components)] if isinstance(components, int) else list(components)
    rng = random.Random(seed)
    nvars = coords.first_slot_count if q_pullback else coords.size
    m = coords.m
    comps = {}
    for label in labels:
        acc: Poly = {}
        for _ in range(terms):
            d = rng.randint(0, degree)
            exps = [0] * coords.size
            for _ in range(d):
                exps[rng.randrange(nvars)] += 1
            blades = rng.sample(range(1 << n), rng.randint(1, max_blades))
            coef = CliffordElement(n, m, {b: rng.choice((-3, -2, -1, 1, 2, 3)) for b in blades})
            _padd(acc, tuple(exps), coef)
        comps[label] = acc
    return PolySection(coords, comps)
