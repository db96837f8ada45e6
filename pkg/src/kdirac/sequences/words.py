"""Normal forms of Dirac words with constant coefficients.

On sections without second-slot dependence the Dirac operators satisfy

    d_i d_j + d_j d_i = -2 G_ij,      G_ij = sum_a d_{i,a} d_{j,a},

with the scalar operators ``G_ij`` central.  Every word therefore reduces
to a combination of strictly increasing words times monomials in ``G``.
This gives a symbolic view of a composite operator, used to localise
residuals and to search for small table corrections.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .operators import OperatorDef, Term

__all__ = [
    "normal_form",
    "format_element",
    "symbolic_composite",
    "symbolic_sum",
    "nonzero_blocks",
]

# key: (increasing tuple of rows, sorted tuple of G pairs)
Key = tuple[tuple[int, ...], tuple[tuple[int, int], ...]]
Element = dict  # Key -> Fraction


def _add_g(gs: tuple, pair: tuple[int, int]) -> tuple:
    return tuple(sorted(gs + (pair,)))


@lru_cache(maxsize=None)
def _reduce(word: tuple[int, ...]) -> tuple[tuple[Key, Fraction], ...]:
    for pos in range(len(word) - 1):
        a, b = word[pos], word[pos + 1]
        if a == b:
            rest = word[:pos] + word[pos + 2:]
            out: dict = defaultdict(Fraction)
            for (w, gs), c in _reduce(rest):
                out[(w, _add_g(gs, (a, a)))] -= c
            return tuple(out.items())
        if a > b:
            swapped = word[:pos] + (b, a) + word[pos + 2:]
            rest = word[:pos] + word[pos + 2:]
            out = defaultdict(Fraction)
            for key, c in _reduce(swapped):
                out[key] -= c
            for (w, gs), c in _reduce(rest):
                out[(w, _add_g(gs, (b, a)))] -= 2 * c
            return tuple((k, c) for k, c in out.items() if c)
    return (((word, ()), Fraction(1)),)


def normal_form(word: Iterable[str | int]) -> Element:
    """Reduce a word in ``d`` letters (``"d2"`` or ``2``)."""
    rows = []
    for letter in word:
        if isinstance(letter, str):
            if letter[0] != "d":
                raise ValueError(f"second-slot letter {letter} has no constant-coefficient form")
            letter = int(letter[1:])
        rows.append(letter)
    return {k: c for k, c in _reduce(tuple(rows)) if c}


def _accumulate(acc: dict, elem: Mapping, scale: Fraction):
    for key, c in elem.items():
        v = acc.get(key, Fraction(0)) + scale * c
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)


def _rational(t: Term) -> Fraction:
    if t.coeff.b:
        raise ValueError("symbolic composites need rational coefficients")
    return t.coeff.a


def symbolic_composite(outer: OperatorDef, inner: OperatorDef) -> dict[tuple[str, str], Element]:
    """Blocks ``(out, in)`` of ``outer o inner`` in normal form."""
    by_mid: dict[str, list[Term]] = defaultdict(list)
    for t in inner.terms:
        by_mid[t.out].append(t)
    blocks: dict[tuple[str, str], Element] = {}
    for to in outer.terms:
        for ti in by_mid.get(to.inp, ()):
            key = (to.out, ti.inp)
            acc = blocks.setdefault(key, {})
            _accumulate(acc, normal_form(to.word + ti.word), _rational(to) * _rational(ti))
    return {k: v for k, v in blocks.items() if v}


def symbolic_sum(*parts: Mapping[tuple[str, str], Element]) -> dict[tuple[str, str], Element]:
    out: dict[tuple[str, str], Element] = {}
    for part in parts:
        for key, elem in part.items():
            acc = out.setdefault(key, {})
            _accumulate(acc, elem, Fraction(1))
    return {k: v for k, v in out.items() if v}


def nonzero_blocks(blocks: Mapping[tuple[str, str], Element]) -> list[tuple[str, str]]:
    return [k for k, v in blocks.items() if v]


def format_element(elem: Mapping[Key, Fraction]) -> str:
    if not elem:
        return "0"
    parts = []
    for (w, gs), c in sorted(elem.items()):
        factors = [f"G{a}{b}" for a, b in gs] + [f"d{r}" for r in w]
        parts.append(f"{c}*{'*'.join(factors) or '1'}")
    return " + ".join(parts)
