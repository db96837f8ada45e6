"""Second order operator from the Curved Casimir splitting product, k = 2.

Sections of the graded bundle are held in three slots:

* ``bottom``: components ``e1, e2`` (the factor ``e_l (x) phi_l``),
* ``middle``: components ``m{j}{k}.{mu}`` for ``Z_{j mu} (x) e_k (x) phi``,
* ``top``: components ``h1, h2`` for ``e1^e2 (x) e_l (x) phi_l``.

Labels of the bottom and top slots coincide with the inputs and outputs of
the explicit operator ``D2``, so the derived operator can be compared with
the table term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .clifford import CliffordElement
from .flatmodel import Coordinates, PolySection, apply_xi_first, apply_xi_second
from .report import EXACT_ZERO, FINDING, MATCH, CheckRecord, VerificationReport
from .scalars import FieldScalar
from .weights import AlphaSet, Weight, casimir_alphas

__all__ = [
    "GradedSection",
    "MiddleProjectorSet",
    "BLOCKS",
    "bullet",
    "cc_differential",
    "derived_operator",
    "splitting_check",
    "lambda_two",
    "default_alphas",
    "ratio_to",
    "casimir_stage",
    "splitting_campaign",
]

K = 2
BOTTOM = ("e1", "e2")
TOP = ("h1", "h2")
# Block order of the splitting product, outermost factor last.
BLOCKS = ("iS", "jS", "iT", "jT")
# Raising by the sym / antisym part of V (x) V gives lambda_(1) / lambda_(2).
_V_PART = {"i": "sym", "j": "anti"}


def middle_label(j: int, k: int, mu: int) -> str:
    return f"m{j}{k}.{mu}"


def middle_labels(n: int) -> list[str]:
    return [middle_label(j, k, mu) for j in (1, 2) for k in (1, 2) for mu in range(1, n + 1)]


@dataclass(frozen=True)
class GradedSection:
    bottom: PolySection
    middle: PolySection
    top: PolySection

    @classmethod
    def zero(cls, coords: Coordinates) -> "GradedSection":
        return cls(
            PolySection.zero(coords, BOTTOM),
            PolySection.zero(coords, middle_labels(coords.n)),
            PolySection.zero(coords, TOP),
        )

    @classmethod
    def from_bottom(cls, phi: PolySection) -> "GradedSection":
        _check_bottom(phi)
        z = cls.zero(phi.coords)
        return cls(phi.restrict(BOTTOM), z.middle, z.top)

    @property
    def coords(self) -> Coordinates:
        return self.bottom.coords

    def __add__(self, other: "GradedSection") -> "GradedSection":
        return GradedSection(self.bottom + other.bottom, self.middle + other.middle, self.top + other.top)

    def scale(self, c) -> "GradedSection":
        return GradedSection(self.bottom.scale(c), self.middle.scale(c), self.top.scale(c))

    def is_zero(self) -> bool:
        return self.bottom.is_zero() and self.middle.is_zero() and self.top.is_zero()

    def __eq__(self, other):
        if not isinstance(other, GradedSection):
            return NotImplemented
        return self.bottom == other.bottom and self.middle == other.middle and self.top == other.top

    __hash__ = None


def _check_bottom(phi: PolySection):
    if phi.coords.k != K:
        raise ValueError(f"the splitting construction is implemented for k=2, got k={phi.coords.k}")
    if set(phi.labels) != set(BOTTOM):
        raise ValueError(f"expected components {BOTTOM}, got {phi.labels}")


def _single(s: PolySection, src: str, dst: str) -> PolySection:
    return PolySection(s.coords, {dst: s.components.get(src, {})})


def _gen(alpha: int, coords: Coordinates) -> CliffordElement:
    return CliffordElement.generator(alpha, coords.n, coords.m)


class MiddleProjectorSet:
    """The four projections of the middle slot.

    The V (x) V factor splits into symmetric and antisymmetric parts and the
    E (x) S factor into the spinor part ``-(1/n) e_mu sum_b e_b M_b`` and
    the twistor remainder.
    """

    def __init__(self, coords: Coordinates):
        self.coords = coords
        self.n = coords.n

    def v_part(self, kind: str, mid: PolySection) -> PolySection:
        half = Fraction(1, 2)
        sign = 1 if kind == "sym" else -1
        out = PolySection.zero(self.coords, middle_labels(self.n))
        for j in (1, 2):
            for k in (1, 2):
                for mu in range(1, self.n + 1):
                    dst = middle_label(j, k, mu)
                    out = out + _single(mid, dst, dst).scale(half)
                    out = out + _single(mid, middle_label(k, j, mu), dst).scale(half * sign)
        return out

    def spinor_part(self, mid: PolySection) -> PolySection:
        n = self.n
        out = PolySection.zero(self.coords, middle_labels(n))
        for j in (1, 2):
            for k in (1, 2):
                contracted = PolySection.zero(self.coords, ["c"])
                for b in range(1, n + 1):
                    contracted = contracted + _single(mid, middle_label(j, k, b), "c").left_mul(_gen(b, self.coords))
                contracted = contracted.scale(Fraction(-1, n))
                for mu in range(1, n + 1):
                    out = out + _single(contracted, "c", middle_label(j, k, mu)).left_mul(_gen(mu, self.coords))
        return out

    def e_part(self, kind: str, mid: PolySection) -> PolySection:
        spin = self.spinor_part(mid)
        return spin if kind == "S" else mid - spin

    def project(self, block: str, mid: PolySection) -> PolySection:
        if block not in BLOCKS:
            raise ValueError(f"unknown block {block!r}")
        return self.e_part(block[1], self.v_part(_V_PART[block[0]], mid))

    def project_graded(self, block: str, s: GradedSection) -> GradedSection:
        z = GradedSection.zero(s.coords)
        return GradedSection(z.bottom, self.project(block, s.middle), z.top)


def _bracket_to_top(coords: Coordinates, mid: PolySection, fields) -> PolySection:
    """``-2 sum [Z_{k a}, Z_{j mu}] (x) F_{k a}(m[j, l, mu])`` in the top slot.

    ``fields(k, a, sec)`` applies the operator paired with ``Z_{k a}``.  With
    ``[Z_{1a}, Z_{2b}] = -delta_ab Z_12 / sqrt(m)`` this is
    ``(2/sqrt m) sum_mu (F_{1mu} m[2,l,mu] - F_{2mu} m[1,l,mu])`` on ``e1^e2``.
    """
    m = coords.m
    c = FieldScalar(0, Fraction(2, m), m)  # 2/sqrt(m)
    top = PolySection.zero(coords, TOP)
    for l in (1, 2):
        dst = TOP[l - 1]
        for mu in range(1, coords.n + 1):
            plus = fields(1, mu, _single(mid, middle_label(2, l, mu), dst))
            minus = fields(2, mu, _single(mid, middle_label(1, l, mu), dst))
            top = top + (plus - minus).scale(c)
    return top


# Z_12 acts on the bottom slot through -[Z_12, e_0] = 2 Z_12, doubled again by cc.
TOP_FACTOR = 4


def cc_differential(s: GradedSection) -> GradedSection:
    """Differential part of the Curved Casimir operator in the gauge.

    bottom -> middle: ``2 Z_{j mu} (x) xi_{j mu} f_0``;
    bottom -> top: ``4 Z_12 (x) xi_12 f_0``;
    middle -> top: the bracket term.  The bottom slot of the result is 0.
    """
    coords = s.coords
    n = coords.n
    out = GradedSection.zero(coords)
    mid = out.middle
    for j in (1, 2):
        for mu in range(1, n + 1):
            d = apply_xi_first(j, mu, s.bottom)
            for k in (1, 2):
                mid = mid + _single(d, BOTTOM[k - 1], middle_label(j, k, mu)).scale(2)
    d12 = apply_xi_second(1, 2, s.bottom).relabel(dict(zip(BOTTOM, TOP)))
    top = d12.scale(TOP_FACTOR)
    top = top + _bracket_to_top(coords, s.middle, lambda k, a, sec: apply_xi_first(k, a, sec))
    return GradedSection(out.bottom, mid, top)


def bullet(z: tuple[Mapping[tuple[int, int], object], object], s: GradedSection) -> GradedSection:
    """Algebraic action of ``p_+`` on a graded section.

    ``z = (first, second)`` with ``first`` mapping ``(j, beta)`` to the
    coefficient of ``Z_{j beta}`` and ``second`` the coefficient of ``Z_12``.
    On the bottom slot ``Z`` acts through ``-[Z, e_0]``, so degree two
    elements carry a factor 2; on the middle slot through ``-[Z, .]``.
    With this convention ``cc_differential = 2 sum_k Z_k . xi_{X_k}``.
    """
    first, second = z
    coords = s.coords
    n = coords.n
    out = GradedSection.zero(coords)
    mid = out.middle
    for (j, beta), coef in first.items():
        if not (1 <= j <= K and 1 <= beta <= n):
            raise ValueError(f"Z_({j},{beta}) outside k=2, n={n}")
        for k in (1, 2):
            mid = mid + _single(s.bottom, BOTTOM[k - 1], middle_label(j, k, beta)).scale(coef)
    top = s.bottom.relabel(dict(zip(BOTTOM, TOP))).scale(2 * second) if second else out.top

    def field(k, a, sec):
        return sec.scale(first.get((k, a), 0))

    if first:
        top = top + _bracket_to_top(coords, s.middle, field).scale(Fraction(1, 2))
    return GradedSection(out.bottom, mid, top)


def casimir_stage(s: GradedSection, shift: Fraction, alphas: AlphaSet) -> GradedSection:
    """One factor ``C - c_x`` with ``c_lambda`` normalised to 0.

    The algebraic part acts by ``0`` on the bottom, by ``-alpha_b`` on the
    middle block ``b`` and by ``-alpha_ij`` on the top; ``shift = alpha_x``.
    """
    coords = s.coords
    proj = MiddleProjectorSet(coords)
    mid_alg = PolySection.zero(coords, middle_labels(coords.n))
    for b, a in alphas.middle().items():
        mid_alg = mid_alg + proj.project(b, s.middle).scale(shift - a)
    alg = GradedSection(s.bottom.scale(shift), mid_alg, s.top.scale(shift - alphas.alpha_ij))
    return alg + cc_differential(s)


def _d1_middle(phi: PolySection) -> PolySection:
    return cc_differential(GradedSection.from_bottom(phi)).middle.scale(Fraction(1, 2))


def _top_of(mid: PolySection) -> PolySection:
    coords = mid.coords
    z = GradedSection.zero(coords)
    return cc_differential(GradedSection(z.bottom, mid, z.top)).top


def derived_operator(phi: PolySection, alphas: AlphaSet) -> PolySection:
    """Top row of the splitting product with the vanishing factor divided out.

    Block ``b`` contributes ``c_b (pi o D1)(pi_b o D1) phi`` with ``c_b`` the
    product of the other three middle alphas, and the second-slot term is
    weighted by the product of all four.
    """
    _check_bottom(phi)
    if alphas.alpha_ij != 0:
        raise ValueError("the top row is an invariant operator only when alpha_ij = 0")
    if all(a == 0 for a in alphas.middle().values()):
        raise ValueError("all middle alphas vanish; the reduced coefficients are degenerate")
    coeffs, c_top = alphas.reduced_coefficients()
    coords = phi.coords
    proj = MiddleProjectorSet(coords)
    d1 = _d1_middle(phi)
    out = apply_xi_second(1, 2, phi).relabel(dict(zip(BOTTOM, TOP))).scale(TOP_FACTOR * c_top)
    for b in BLOCKS:
        if coeffs[b]:
            out = out + _top_of(proj.project(b, d1).scale(2)).scale(coeffs[b])
    return out


def lambda_two(n: int) -> Weight:
    return Weight.of(Fraction(n + 1, 2), Fraction(n - 1, 2))


def default_alphas(n: int) -> AlphaSet:
    return casimir_alphas(lambda_two(n), n, K, 1, 2)


def ratio_to(a: PolySection, b: PolySection) -> FieldScalar | None:
    """The scalar ``r`` with ``a == r * b`` if one exists, else ``None``."""
    if set(a.labels) != set(b.labels):
        return None
    ref = b.first_nonzero()
    if ref is None:
        return FieldScalar(0, 0, a.m) if a.is_zero() else None
    label, exps, blade, val = ref
    num = a.components.get(label, {}).get(exps)
    num = num.coefficient(blade) if num is not None else FieldScalar(0, 0, a.m)
    r = num / val
    return r if a == b.scale(r) else None


def _poly_eval(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _divided(coeffs: list[Fraction], nodes: list[Fraction]) -> Fraction:
    """Divided difference ``p[x0, ..., xr]``; repeated nodes are allowed."""
    for a in nodes[:-1]:
        # synthetic division of p(x) - p(a) by (x - a)
        q = [Fraction(0)] * (len(coeffs) - 1)
        carry = Fraction(0)
        for d in range(len(coeffs) - 1, 0, -1):
            carry = carry * a + coeffs[d]
            q[d - 1] = carry
        coeffs = q or [Fraction(0)]
    return _poly_eval(coeffs, nodes[-1])


def _product_poly(roots: list[Fraction]) -> list[Fraction]:
    coeffs = [Fraction(1)]
    for r in roots:
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] += c
            nxt[d] -= r * c
        coeffs = nxt
    return coeffs


def _stage_shifts(alphas: AlphaSet) -> list[tuple[str, Fraction]]:
    mid = alphas.middle()
    return [(b, mid[b]) for b in BLOCKS] + [("ij", alphas.alpha_ij)]


def _expected_stage(phi, alphas, shifts, pieces) -> GradedSection:
    """Closed form of the tuple after the factors in ``shifts``.

    With eigenvalues ``0`` (bottom), ``-alpha_b`` (middle) and ``-alpha_ij``
    (top), the polynomial ``p`` of the product contributes ``p(0)`` on the
    bottom, ``p[0, c_b]`` on block ``b`` and the second divided differences
    on the top.
    """
    roots = [-a for _, a in shifts]
    p = _product_poly(roots)
    c_top = -alphas.alpha_ij
    coords = phi.coords
    bottom = phi.scale(_poly_eval(p, Fraction(0)))
    mid = PolySection.zero(coords, middle_labels(coords.n))
    top = pieces["t0"].scale(_divided(p, [Fraction(0), c_top]))
    for b, a in alphas.middle().items():
        mid = mid + pieces["m"][b].scale(_divided(p, [Fraction(0), -a]))
        top = top + pieces["t"][b].scale(_divided(p, [Fraction(0), -a, c_top]))
    return GradedSection(bottom, mid, top)


def _pieces(phi: PolySection) -> dict:
    proj = MiddleProjectorSet(phi.coords)
    first = cc_differential(GradedSection.from_bottom(phi))
    m = {b: proj.project(b, first.middle) for b in BLOCKS}
    return {"t0": first.top, "m": m, "t": {b: _top_of(m[b]) for b in BLOCKS}}


def _ratio_of_graded(a: GradedSection, b: GradedSection):
    joined_a = _join(a)
    joined_b = _join(b)
    return ratio_to(joined_a, joined_b)


def _join(s: GradedSection) -> PolySection:
    comps = {}
    for part in (s.bottom, s.middle, s.top):
        comps.update(part.components)
    return PolySection(s.coords, comps)


def splitting_check(phi: PolySection, alphas: AlphaSet, report: VerificationReport | None = None,
                    trial: int = 0) -> VerificationReport:
    """Run the five factors stage by stage and compare with the closed form.

    Each stage is compared with the expected tuple up to a scalar, which
    must be the same for every stage.  The final top row is then compared
    with the explicit ``D2`` up to a global scalar.
    """
    from .sequences import operator_def
    from .sequences.verify import apply_operator

    _check_bottom(phi)
    if report is None:
        report = VerificationReport("splitting", {"n": phi.coords.n})
    coords = phi.coords
    tag = f"[trial {trial}]"
    pieces = _pieces(phi)
    shifts = _stage_shifts(alphas)
    state = GradedSection.from_bottom(phi)
    constants = []
    for t, (name, shift) in enumerate(shifts, 1):
        state = casimir_stage(state, shift, alphas)
        expected = _expected_stage(phi, alphas, shifts[:t], pieces)
        r = _ratio_of_graded(state, expected)
        ok = r is not None and not expected.is_zero()
        if expected.is_zero():
            ok = state.is_zero()
            r = FieldScalar(1, 0, coords.m) if ok else None
        constants.append(r)
        report.add(CheckRecord(f"stage {t} (C - c_{name}) {tag}", MATCH if ok else FINDING,
                               {"constant": r, "factor": name}))
    uniform = all(c is not None for c in constants) and len(set(constants)) == 1
    report.add(CheckRecord(f"uniform stage constant {tag}", MATCH if uniform else FINDING,
                           {"constants": constants}))
    lower_zero = state.bottom.is_zero() and state.middle.is_zero()
    report.add(CheckRecord(f"final bottom and middle vanish {tag}", EXACT_ZERO if lower_zero else FINDING, {}))

    derived = derived_operator(phi, alphas)
    same = derived == state.top
    report.add(CheckRecord(f"derived operator equals final top {tag}", MATCH if same else FINDING, {}))
    explicit = apply_operator(operator_def(2, 2, coords.n), phi)
    scalar = ratio_to(derived, explicit)
    status = MATCH if scalar is not None and not scalar.is_zero() and not explicit.is_zero() else FINDING
    details = {"scalar": scalar, "explicit_nonzero": not explicit.is_zero(), "derived_nonzero": not derived.is_zero()}
    report.add(CheckRecord(f"derived vs explicit D2 {tag}", status, details))
    if status == FINDING:
        report.findings.append({
            "summary": f"{tag} derived operator is not a nonzero multiple of D2",
            "derived_is_zero": derived.is_zero(),
            "derived_over_second_slot": ratio_to(derived, apply_xi_second(1, 2, phi).relabel(dict(zip(BOTTOM, TOP)))),
        })
    return report


def splitting_campaign(n: int, degree: int = 2, trials: int = 5, seed: int = 0) -> VerificationReport:
    """``splitting_check`` on random sections plus one global scalar across trials."""
    from .flatmodel import random_section
    from .sequences.verify import trial_seed

    alphas = default_alphas(n)
    report = VerificationReport("splitting", {"n": n, "degree": degree, "trials": trials, "seed": seed})
    report.notes["alphas"] = alphas.to_json()
    coeffs, c_top = alphas.reduced_coefficients()
    report.notes["reduced_coefficients"] = {**coeffs, "top": c_top}
    mid = alphas.middle()
    report.notes["coincident_alphas"] = [
        [a, b] for x, a in enumerate(BLOCKS) for b in BLOCKS[x + 1:] if mid[a] == mid[b]
    ]
    scalars = []
    for t in range(trials):
        phi = random_section(K, n, degree, list(BOTTOM), trial_seed(seed, t, 17), False, terms=6)
        splitting_check(phi, alphas, report, trial=t)
        scalars.append(report.checks[-1].details["scalar"])
    distinct = {s for s in scalars if s is not None}
    global_ok = len(distinct) == 1 and None not in scalars and not scalars[0].is_zero()
    report.add(CheckRecord("global scalar", MATCH if global_ok else FINDING, {"scalars": scalars}))
    if global_ok:
        report.notes["global_scalar"] = scalars[0]
    return report
