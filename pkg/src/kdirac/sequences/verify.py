"""Applying operator tables, checking complexes and symbol exactness."""

from __future__ import annotations

import itertools
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import flint

from ..clifford import CliffordElement, _blade_index_rows, vector_of
from ..flatmodel import (
    PolySection,
    apply_dirac,
    apply_xi_second,
    is_q_pullback,
    random_section,
)
from ..report import EXACT_ZERO, FINDING, RANK_OK, CheckRecord, VerificationReport
from ..scalars import ExactMatrix, FieldScalar, exact_rank
from .operators import Erratum, OperatorDef, Term, load_table
from .words import format_element, nonzero_blocks, symbolic_composite, symbolic_sum

__all__ = [
    "NotQPullbackError",
    "apply_operator",
    "apply_chain",
    "composite_checks",
    "verify_complex",
    "SymbolMatrix",
    "symbol_blocks",
    "symbol_matrix",
    "symbol_chain",
    "verify_symbol_exactness",
    "symbolic_checks",
    "errata_search",
    "trial_seed",
]


class NotQPullbackError(ValueError):
    pass


def trial_seed(seed: int, trial: int, salt: int = 0) -> int:
    """Per-trial seed derived from the master seed."""
    return (seed * 1_000_003 + trial) * 101 + salt


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("KDIRAC_THREADS", "1")))
    except ValueError:
        return 1


def _parallel_map(fn: Callable, items: Sequence) -> list:
    workers = min(_threads(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- application

def _apply_letter(letter: str, s: PolySection) -> PolySection:
    if letter[0] == "d":
        return apply_dirac(int(letter[1]), s)
    return apply_xi_second(int(letter[1]), int(letter[2]), s)


def apply_operator(d: OperatorDef, s: PolySection) -> PolySection:
    """Apply ``d`` to ``s``; words act right to left."""
    if set(s.labels) != set(d.inputs):
        raise ValueError(f"{d.name} expects components {list(d.inputs)}, got {s.labels}")
    if s.coords.k != d.k:
        raise ValueError(f"{d.name} is a k={d.k} operator, section has k={s.coords.k}")
    if s.m != d.m:
        raise ValueError(f"{d.name} has coefficients over sqrt({d.m}), section over sqrt({s.m})")
    if d.k == 3 and not is_q_pullback(s):
        raise NotQPullbackError(f"{d.name} acts only on sections without second-slot dependence")
    memo: dict[tuple[str, tuple[str, ...]], PolySection] = {}

    def word_on(label: str, word: tuple[str, ...]) -> PolySection:
        key = (label, word)
        if key not in memo:
            if not word:
                memo[key] = s.restrict([label])
            else:
                memo[key] = _apply_letter(word[0], word_on(label, word[1:]))
        return memo[key]

    out = PolySection.zero(s.coords, d.outputs)
    for t in d.terms:
        piece = word_on(t.inp, t.word).scale(t.coeff).relabel({t.inp: t.out})
        out = out + piece
    return out


def apply_chain(chain: Sequence[OperatorDef], s: PolySection) -> PolySection:
    """Apply ``chain[-1]`` first, ``chain[0]`` last."""
    for d in reversed(chain):
        s = apply_operator(d, s)
    return s


@dataclass(frozen=True)
class Composite:
    check_id: str
    chains: tuple[tuple[str, ...], ...]  # summed; each chain outermost first


COMPOSITES = {
    2: (
        Composite("D2*D1", (("D2", "D1"),)),
        Composite("D3*D2", (("D3", "D2"),)),
        Composite("D3*D2*D1", (("D3", "D2", "D1"),)),
    ),
    3: (
        Composite("D2*D1", (("D2", "D1"),)),
        Composite("D3*D2", (("D3", "D2"),)),
        Composite("D4*D2", (("D4", "D2"),)),
        Composite("D6*D3+D5*D4", (("D6", "D3"), ("D5", "D4"))),
        Composite("D7*D5", (("D7", "D5"),)),
        Composite("D7*D6", (("D7", "D6"),)),
        Composite("D8*D7", (("D8", "D7"),)),
    ),
}


def composite_checks(k: int) -> tuple[Composite, ...]:
    return COMPOSITES[k]


def _evaluate(ops: dict[str, OperatorDef], comp: Composite, s: PolySection) -> PolySection:
    total = None
    for chain in comp.chains:
        part = apply_chain([ops[name] for name in chain], s)
        total = part if total is None else total + part
    return total


def _min_order(ops: dict[str, OperatorDef], comp: Composite) -> int:
    return min(
        sum(min(t.order for t in ops[name].terms) for name in chain) for chain in comp.chains
    )


def _validate(k: int, n: int):
    if k not in COMPOSITES:
        raise ValueError(f"k must be 2 or 3, got {k}")
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    if n < 2 * k:
        raise ValueError(f"n must be at least 2k = {2 * k}, got {n}")


def _provenance(ops, comp: Composite, out_label: str, inputs: Iterable[str]) -> list[str]:
    inputs = set(inputs)
    lines = []
    for chain in comp.chains:
        outer, inner = ops[chain[0]], ops[chain[1]]
        for to in outer.terms:
            if to.out != out_label:
                continue
            for ti in inner.terms:
                if ti.out == to.inp and (len(chain) > 2 or ti.inp in inputs):
                    lines.append(
                        f"{outer.name}[{to.out} <- {to.inp}: {to.coeff} * {' '.join(to.word)}]"
                        f" o {inner.name}[{ti.out} <- {ti.inp}: {ti.coeff} * {' '.join(ti.word)}]"
                    )
    return lines


def _symbolic_view(ops, comp: Composite) -> dict | None:
    try:
        parts = [symbolic_composite(ops[c[0]], ops[c[1]]) for c in comp.chains if len(c) == 2]
    except ValueError:
        return None
    if len(parts) != len(comp.chains):
        return None
    return symbolic_sum(*parts)


def verify_complex(
    k: int,
    n: int,
    degree: int = 3,
    trials: int = 10,
    seed: int = 0,
    table: str = "printed",
    terms: int = 6,
    search_errata: bool = True,
) -> VerificationReport:
    """Apply every composite to random sections and report exact zeros.

    For k = 3 the sections have no second-slot dependence.  A nonzero
    composite is reported with its first nonzero coefficient, the input
    components responsible and the contributing term pairs.
    """
    _validate(k, n)
    if degree < 0 or trials < 1:
        raise ValueError("need degree >= 0 and trials >= 1")
    ops = load_table(k, n, table)
    report = VerificationReport(
        "verify complex",
        {"k": k, "n": n, "degree": degree, "trials": trials, "seed": seed, "table": table},
    )
    q_pullback = k == 3
    for ci, comp in enumerate(COMPOSITES[k]):
        first_inner = ops[comp.chains[0][-1]]
        inputs = first_inner.inputs

        def run(trial: int, comp=comp, ci=ci, inputs=inputs):
            s = random_section(k, n, degree, inputs, trial_seed(seed, trial, ci), q_pullback, terms=terms)
            return s, _evaluate(ops, comp, s)

        results = _parallel_map(run, list(range(trials)))
        bad = [(t, s, r) for t, (s, r) in enumerate(results) if not r.is_zero()]
        order = _min_order(ops, comp)
        details = {
            "trials": trials,
            "nonzero_trials": len(bad),
            "min_term_order": order,
            "degree_sees_composite": degree >= order,
        }
        if not bad:
            report.add(CheckRecord(comp.check_id, EXACT_ZERO, details))
            continue
        trial, s, r = bad[0]
        label, exps, blade, value = r.first_nonzero()
        culprits = []
        for inp in inputs:
            only = PolySection(s.coords, {l: (s.component(l) if l == inp else {}) for l in inputs})
            part = _evaluate(ops, comp, only)
            if part.component(label):
                culprits.append(inp)
        details.update(
            {
                "trial": trial,
                "component": label,
                "monomial": r.describe_monomial(exps),
                "blade": blade,
                "value": value,
                "inputs": culprits,
                "provenance": _provenance(ops, comp, label, culprits),
            }
        )
        sym = _symbolic_view(ops, comp)
        if sym is not None:
            details["symbolic_residual"] = {
                f"{o} <- {i}": format_element(sym[(o, i)]) for o, i in sorted(sym)
            }
        report.add(CheckRecord(comp.check_id, FINDING, details))
        report.findings.append(
            {
                "check": comp.check_id,
                "summary": f"{comp.check_id}: nonzero at component {label}, inputs {culprits}",
                "component": label,
                "inputs": culprits,
            }
        )
    if k == 3:
        report.notes["square_convention"] = square_convention(ops)
        if not report.passed and search_errata:
            fixes, residual = errata_search(ops)
            report.notes["errata_search"] = {
                "substitutions": [e.to_json() for e in fixes],
                "residual_blocks_after": residual,
                "touches_D5": any(e.operator == "D5" for e in fixes),
            }
            for e in fixes:
                report.findings.append({"summary": "deviation from printed table: " + e.describe(), "erratum": e.to_json()})
    return report


# ------------------------------------------------------------ symbolic checks

def symbolic_checks(ops: dict[str, OperatorDef]) -> dict[str, dict]:
    """Normal-form blocks of every k = 3 composite."""
    out = {}
    for comp in COMPOSITES[3]:
        out[comp.check_id] = symbolic_sum(*(symbolic_composite(ops[a], ops[b]) for a, b in comp.chains))
    return out


def square_convention(ops: dict[str, OperatorDef]) -> str:
    d63 = symbolic_composite(ops["D6"], ops["D3"])
    d54 = symbolic_composite(ops["D5"], ops["D4"])
    neg = {key: {w: -c for w, c in el.items()} for key, el in d54.items()}
    plus = not symbolic_sum(d63, d54)
    minus = not symbolic_sum(d63, neg)
    if plus and minus:
        return "both"
    if plus:
        return "D6*D3 + D5*D4 = 0"
    if minus:
        return "D6*D3 - D5*D4 = 0"
    return "neither sign closes the square"


def _check_score(ops, comp: Composite) -> int:
    blocks = symbolic_sum(*(symbolic_composite(ops[a], ops[b]) for a, b in comp.chains))
    return len(nonzero_blocks(blocks))


def _score(ops) -> int:
    return sum(_check_score(ops, comp) for comp in COMPOSITES[3])


def _occurrence(d: OperatorDef, idx: int) -> int:
    t = d.terms[idx]
    return sum(1 for j, u in enumerate(d.terms[: idx + 1]) if u.out == t.out and u.inp == t.inp and u.word == t.word)


def errata_search(ops: dict[str, OperatorDef], max_steps: int = 6) -> tuple[list[Erratum], int]:
    """Greedy search for single-word substitutions that restore zero.

    At each step every term feeding a nonzero block may have its word
    replaced by another word of the same length; the substitution leaving
    the fewest nonzero blocks is kept.  Returns the substitutions and the
    number of nonzero blocks that remain.
    """
    ops = dict(ops)
    k = next(iter(ops.values())).k
    letters = [f"d{i}" for i in range(1, k + 1)]
    fixes: list[Erratum] = []
    score = _score(ops)
    for _ in range(max_steps):
        if score == 0:
            break
        checks = symbolic_checks(ops)
        candidates: list[tuple[str, int]] = []
        for comp in COMPOSITES[3]:
            for out, inp in nonzero_blocks(checks[comp.check_id]):
                for outer, inner in comp.chains:
                    candidates += [(outer, i) for i, _ in ops[outer].terms_for(out=out)]
                    candidates += [(inner, i) for i, _ in ops[inner].terms_for(inp=inp)]
        candidates = list(dict.fromkeys(candidates))
        per_check = {comp.check_id: len(nonzero_blocks(checks[comp.check_id])) for comp in COMPOSITES[3]}
        best = None
        for name, idx in candidates:
            term = ops[name].terms[idx]
            touched = [c for c in COMPOSITES[3] if any(name in chain for chain in c.chains)]
            untouched = score - sum(per_check[c.check_id] for c in touched)
            for word in itertools.product(letters, repeat=len(term.word)):
                if word == term.word:
                    continue
                trial = dict(ops)
                trial[name] = ops[name].with_term(idx, replace(term, word=word))
                sc = untouched + sum(_check_score(trial, c) for c in touched)
                if best is None or sc < best[0]:
                    best = (sc, name, idx, word)
        if best is None or best[0] >= score:
            break
        sc, name, idx, word = best
        term = ops[name].terms[idx]
        fixes.append(Erratum(name, term.out, term.inp, _occurrence(ops[name], idx), term.word, word))
        ops[name] = ops[name].with_term(idx, replace(term, word=word))
        score = sc
    return fixes, score


# -------------------------------------------------------------------- symbols

@dataclass(frozen=True)
class SymbolMatrix:
    covector: tuple[tuple[FieldScalar, ...], ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    block: int
    matrix: ExactMatrix


def _as_scalars(v, m: int) -> tuple[tuple[FieldScalar, ...], ...]:
    return tuple(
        tuple(x if isinstance(x, FieldScalar) else FieldScalar(x, 0, m) for x in row) for row in v
    )


def symbol_blocks(d: OperatorDef, v) -> dict[tuple[str, str], CliffordElement]:
    """Leading symbol per block: ``d_i -> f_i``, second-slot letters -> 0."""
    rows = _as_scalars(v, d.m)
    if len(rows) != d.k:
        raise ValueError(f"covector needs {d.k} rows, got {len(rows)}")
    n = len(rows[0])
    f = [vector_of(row, d.m) for row in rows]
    # leading order per block, so combined maps keep each part's own symbol
    top: dict[tuple[str, str], int] = {}
    for t in d.terms:
        if not t.has_second_slot:
            key = (t.out, t.inp)
            top[key] = max(top.get(key, 0), t.order)
    words: dict[tuple[str, ...], CliffordElement] = {}
    blocks: dict[tuple[str, str], CliffordElement] = {}
    for t in d.terms:
        if t.has_second_slot or t.order != top[(t.out, t.inp)]:
            continue
        if t.word not in words:
            prod = CliffordElement.one(n, d.m)
            for letter in t.word:
                prod = prod * f[int(letter[1]) - 1]
            words[t.word] = prod
        key = (t.out, t.inp)
        val = words[t.word].scale(t.coeff)
        blocks[key] = val if key not in blocks else blocks[key] + val
    return {k: v for k, v in blocks.items() if not v.is_zero()}


def _assemble(blocks, outputs, inputs, n: int, m: int) -> ExactMatrix:
    size = 1 << n
    rows, cols = len(outputs) * size, len(inputs) * size
    ra = [flint.fmpq(0)] * (rows * cols)
    rb = None
    signs = _blade_index_rows(n)
    out_pos = {l: a for a, l in enumerate(outputs)}
    in_pos = {l: a for a, l in enumerate(inputs)}
    for (o, i), el in blocks.items():
        r0, c0 = out_pos[o] * size, in_pos[i] * size
        for blade, coef in el.terms.items():
            a = flint.fmpq(coef.a.numerator, coef.a.denominator)
            b = flint.fmpq(coef.b.numerator, coef.b.denominator) if coef.b else None
            if b is not None and rb is None:
                rb = [flint.fmpq(0)] * (rows * cols)
            for r, c, sign in signs[blade]:
                idx = (r0 + r) * cols + c0 + c
                ra[idx] += a if sign > 0 else -a
                if b is not None:
                    rb[idx] += b if sign > 0 else -b
    return ExactMatrix(
        rows, cols, m, flint.fmpq_mat(rows, cols, ra),
        flint.fmpq_mat(rows, cols, rb) if rb is not None else None,
    )


def symbol_matrix(d: OperatorDef, v) -> SymbolMatrix:
    rows = _as_scalars(v, d.m)
    n = len(rows[0])
    blocks = symbol_blocks(d, rows)
    return SymbolMatrix(rows, d.inputs, d.outputs, 1 << n, _assemble(blocks, d.outputs, d.inputs, n, d.m))


def _merge(name: str, parts: Sequence[OperatorDef], stack_rows: bool) -> OperatorDef:
    first = parts[0]
    terms = tuple(t for p in parts for t in p.terms)
    if stack_rows:
        return OperatorDef(name, first.k, first.inputs, tuple(l for p in parts for l in p.outputs), terms, first.m)
    return OperatorDef(name, first.k, tuple(l for p in parts for l in p.inputs), first.outputs, terms, first.m)


def symbol_chain(k: int, n: int, table: str = "printed") -> list[OperatorDef]:
    """Maps of the symbol sequence; for k = 3 the branch is combined."""
    ops = load_table(k, n, table)
    if k == 2:
        return [ops["D1"], ops["D2"], ops["D3"]]
    return [
        ops["D1"],
        ops["D2"],
        _merge("(D3;D4)", [ops["D3"], ops["D4"]], stack_rows=True),
        _merge("(D6,D5)", [ops["D6"], ops["D5"]], stack_rows=False),
        ops["D7"],
        ops["D8"],
    ]


def _random_covector(rng: random.Random, k: int, n: int) -> list[list[Fraction]]:
    # sparse rational rows; a zero row (degenerate covector) does occur
    rows = []
    for _ in range(k):
        rows.append([
            Fraction(rng.choice((-3, -2, -1, 1, 2, 3)), rng.randint(1, 3)) if rng.random() < 0.5 else Fraction(0)
            for _ in range(n)
        ])
    return rows


def _degenerate(v) -> bool:
    return any(all(x == 0 for x in row) for row in v)


def verify_symbol_exactness(
    k: int,
    n: int,
    samples: int = 50,
    seed: int = 0,
    table: str = "printed",
    covectors: Iterable | None = None,
) -> VerificationReport:
    """Symbol products vanish and ranks add up at every node.

    ``covectors`` overrides the random sampler; degenerate ones (a zero row)
    are skipped and counted either way.
    """
    _validate(k, n)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    chain = symbol_chain(k, n, table)
    m = n + 2
    size = 1 << n
    dims = [len(chain[0].inputs) * size] + [len(d.outputs) * size for d in chain]
    rng = random.Random(seed)
    supplied = iter(covectors) if covectors is not None else None
    degenerate = 0
    points = []
    while len(points) < samples:
        if supplied is not None:
            try:
                v = next(supplied)
            except StopIteration:
                break
        else:
            v = _random_covector(rng, k, n)
        if _degenerate(v):
            degenerate += 1
            continue
        points.append(v)

    def analyse(v):
        mats = [symbol_matrix(d, v).matrix for d in chain]
        products = [(mats[a + 1] @ mats[a]).is_zero() for a in range(len(mats) - 1)]
        ranks = [exact_rank(M) for M in mats]
        return products, ranks

    results = _parallel_map(analyse, points)
    report = VerificationReport(
        "verify symbol",
        {"k": k, "n": n, "samples": samples, "seed": seed, "table": table},
    )
    report.notes["degenerate_resampled"] = degenerate
    report.notes["samples_used"] = len(points)
    report.notes["node_dims"] = dims
    report.notes["maps"] = [d.name for d in chain]

    def first_failure(pred):
        for idx, res in enumerate(results):
            if not pred(res):
                return idx
        return None

    for a in range(len(chain) - 1):
        cid = f"sigma({chain[a + 1].name})*sigma({chain[a].name})"
        bad = first_failure(lambda res, a=a: res[0][a])
        details = {"samples": len(points)}
        if bad is None:
            report.add(CheckRecord(cid, EXACT_ZERO, details))
        else:
            details.update({"sample": bad, "covector": points[bad]})
            report.add(CheckRecord(cid, FINDING, details))
            report.findings.append({"check": cid, "summary": f"{cid} is nonzero at sample {bad}"})

    def rank_record(cid: str, pred, extra: dict):
        bad = first_failure(pred)
        details = dict(extra)
        if bad is None:
            report.add(CheckRecord(cid, RANK_OK, details))
        else:
            details.update({"sample": bad, "ranks": results[bad][1], "covector": points[bad]})
            report.add(CheckRecord(cid, FINDING, details))
            report.findings.append({"check": cid, "summary": f"{cid} fails at sample {bad}: ranks {results[bad][1]}"})

    observed = [sorted({res[1][a] for res in results}) for a in range(len(chain))]
    rank_record(
        f"injective sigma({chain[0].name})",
        lambda res: res[1][0] == dims[0],
        {"dim": dims[0], "ranks_seen": observed[0]},
    )
    for a in range(1, len(chain)):
        rank_record(
            f"exact at node {a + 1}",
            lambda res, a=a: res[1][a - 1] + res[1][a] == dims[a],
            {
                "dim": dims[a],
                "incoming": chain[a - 1].name,
                "outgoing": chain[a].name,
                "ranks_seen": [observed[a - 1], observed[a]],
            },
        )
    rank_record(
        f"surjective sigma({chain[-1].name})",
        lambda res: res[1][-1] == dims[-1],
        {"dim": dims[-1], "ranks_seen": observed[-1]},
    )
    return report
