"""Operators as data: term tables, text dump/parse and the k = 2, 3 tables.

Dump format, one term per line, in table order::

    <out> += <coeff> * <word> <in>

``coeff`` is a reduced rational ``p/q`` or ``c/sqrt(m)``.  ``word`` is a
space separated list of letters applied right to left: ``d<i>`` for the Dirac
operator of row ``i`` and ``x<ij>`` for the second-slot field.  Each operator
block starts with ``[name]`` followed by ``source:`` and ``target:`` lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from ..scalars import FieldScalar

__all__ = [
    "Term",
    "OperatorDef",
    "Erratum",
    "parse_operators",
    "dump_operator",
    "dump_operators",
    "load_table",
    "operator_def",
    "load_errata",
    "apply_errata",
    "OPERATOR_COUNT",
]

OPERATOR_COUNT = {2: 3, 3: 8}

_LETTER = re.compile(r"^(d[1-9]|x[1-9][1-9])$")
_COEFF = re.compile(r"^([+-]?\d+(?:/\d+)?)(/sqrt\(m\))?$")
_TERM = re.compile(r"^(\S+) \+= (\S+) \* (.+) (\S+)$")


@dataclass(frozen=True)
class Term:
    out: str
    coeff: FieldScalar
    word: tuple[str, ...]
    inp: str

    @property
    def order(self) -> int:
        """Weighted order: d letters count 1, second-slot letters count 2."""
        return sum(1 if w[0] == "d" else 2 for w in self.word)

    @property
    def has_second_slot(self) -> bool:
        return any(w[0] == "x" for w in self.word)


@dataclass(frozen=True)
class OperatorDef:
    name: str
    k: int
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    terms: tuple[Term, ...]
    m: int

    @property
    def max_word_length(self) -> int:
        return max((len(t.word) for t in self.terms), default=0)

    @property
    def order(self) -> int:
        return max((t.order for t in self.terms), default=0)

    def terms_for(self, out: str | None = None, inp: str | None = None) -> list[tuple[int, Term]]:
        return [
            (idx, t) for idx, t in enumerate(self.terms)
            if (out is None or t.out == out) and (inp is None or t.inp == inp)
        ]

    def with_term(self, index: int, term: Term) -> "OperatorDef":
        terms = list(self.terms)
        terms[index] = term
        return replace(self, terms=tuple(terms))


def _parse_coeff(text: str, m: int) -> FieldScalar:
    match = _COEFF.match(text)
    if not match:
        raise ValueError(f"bad coefficient {text!r}")
    value = Fraction(match.group(1))
    if match.group(2):
        # c/sqrt(m) = (c/m) sqrt(m)
        return FieldScalar(0, value / m, m)
    return FieldScalar(value, 0, m)


def _format_coeff(c: FieldScalar) -> str:
    if c.b == 0:
        return str(c.a)
    if c.a == 0:
        return f"{c.b * c.m}/sqrt(m)"
    raise ValueError(f"coefficient {c} has no single-term form")


def _check_word(word: Sequence[str], k: int):
    for letter in word:
        if not _LETTER.match(letter):
            raise ValueError(f"bad word letter {letter!r}")
        if letter[0] == "d" and not 1 <= int(letter[1]) <= k:
            raise ValueError(f"letter {letter} outside k={k}")
        if letter[0] == "x":
            i, j = int(letter[1]), int(letter[2])
            if not 1 <= i < j <= k:
                raise ValueError(f"letter {letter} needs 1 <= i < j <= {k}")


def parse_operators(text: str, k: int, m: int) -> dict[str, OperatorDef]:
    ops: dict[str, OperatorDef] = {}
    name = None
    source: tuple[str, ...] = ()
    target: tuple[str, ...] = ()
    terms: list[Term] = []

    def close():
        if name is None:
            return
        ops[name] = OperatorDef(name, k, source, target, tuple(terms), m)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            close()
            name, source, target, terms = line[1:-1], (), (), []
            continue
        if name is None:
            raise ValueError(f"line {lineno}: term outside an operator block")
        if line.startswith("source:"):
            source = tuple(line.split()[1:])
            continue
        if line.startswith("target:"):
            target = tuple(line.split()[1:])
            continue
        match = _TERM.match(line)
        if not match:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
        out, coeff, word, inp = match.groups()
        word_t = tuple(word.split())
        _check_word(word_t, k)
        if out not in target or inp not in source:
            raise ValueError(f"line {lineno}: component not declared in {name}")
        terms.append(Term(out, _parse_coeff(coeff, m), word_t, inp))
    close()
    return ops


def dump_operator(d: OperatorDef) -> str:
    lines = [f"[{d.name}]", "source: " + " ".join(d.inputs), "target: " + " ".join(d.outputs)]
    for t in d.terms:
        lines.append(f"{t.out} += {_format_coeff(t.coeff)} * {' '.join(t.word)} {t.inp}")
    return "\n".join(lines) + "\n"


def dump_operators(ops: Iterable[OperatorDef]) -> str:
    return "\n".join(dump_operator(d) for d in ops)


def _data(name: str) -> str:
    return resources.files(__package__).joinpath("data", name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class Erratum:
    operator: str
    out: str
    inp: str
    occurrence: int
    printed: tuple[str, ...]
    corrected: tuple[str, ...]

    def describe(self) -> str:
        return (
            f"{self.operator}: term {self.out} <- {self.inp} (occurrence {self.occurrence}) "
            f"printed '{' '.join(self.printed)}', exact with '{' '.join(self.corrected)}'"
        )

    def to_json(self) -> dict:
        return {
            "operator": self.operator,
            "out": self.out,
            "in": self.inp,
            "occurrence": self.occurrence,
            "printed": " ".join(self.printed),
            "corrected": " ".join(self.corrected),
        }


_ERRATUM = re.compile(r"^(\S+) (\S+) (\S+) #(\d+): (.+) -> (.+)$")


@lru_cache(maxsize=None)
def load_errata(k: int) -> tuple[Erratum, ...]:
    if k != 3:
        return ()
    out = []
    for raw in _data("k3_errata.txt").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _ERRATUM.match(line)
        if not match:
            raise ValueError(f"bad erratum line {line!r}")
        op, o, i, occ, old, new = match.groups()
        out.append(Erratum(op, o, i, int(occ), tuple(old.split()), tuple(new.split())))
    return tuple(out)


def apply_errata(ops: dict[str, OperatorDef], errata: Iterable[Erratum]) -> dict[str, OperatorDef]:
    ops = dict(ops)
    for e in errata:
        d = ops[e.operator]
        seen = 0
        for idx, t in d.terms_for(e.out, e.inp):
            if t.word == e.printed:
                seen += 1
                if seen == e.occurrence:
                    d = d.with_term(idx, replace(t, word=e.corrected))
                    break
        else:
            raise ValueError(f"erratum does not match the table: {e.describe()}")
        ops[e.operator] = d
    return ops


TABLES = ("printed", "corrected")


@lru_cache(maxsize=None)
def _load(k: int, n: int, table: str) -> dict[str, OperatorDef]:
    if k not in OPERATOR_COUNT:
        raise ValueError(f"operator tables exist for k = 2 and 3, not {k}")
    if table not in TABLES:
        raise ValueError(f"unknown table {table!r}; choose from {TABLES}")
    ops = parse_operators(_data(f"k{k}.ops"), k, n + 2)
    if table == "corrected":
        ops = apply_errata(ops, load_errata(k))
    return ops


def load_table(k: int, n: int | None = None, table: str = "printed") -> dict[str, OperatorDef]:
    """All operators for ``k``; coefficients live in Q(sqrt(n+2))."""
    return dict(_load(k, 2 * k if n is None else n, table))


def operator_def(k: int, index: int, n: int | None = None, table: str = "printed") -> OperatorDef:
    count = OPERATOR_COUNT.get(k)
    if count is None:
        raise ValueError(f"operator tables exist for k = 2 and 3, not {k}")
    if not 1 <= index <= count:
        raise ValueError(f"k={k} has operators D1..D{count}, not D{index}")
    return load_table(k, n, table)[f"D{index}"]
