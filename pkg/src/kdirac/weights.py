"""Weights of gl(k), Klimyk multiplicities and Casimir eigenvalue differences."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

__all__ = [
    "Weight",
    "AlphaSet",
    "raise_weight",
    "is_dominant",
    "young_symmetry_holds",
    "casimir_alphas",
    "weyl_normalize",
    "klimyk_multiplicity",
    "parse_weight",
    "dominant_weights",
    "shifted_sweep",
    "is_self_conjugate",
]


@dataclass(frozen=True)
class Weight:
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(x) for x in self.entries))

    @classmethod
    def of(cls, *xs) -> "Weight":
        return cls(tuple(xs))

    @property
    def k(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        """1-based access, matching the usual lambda_i notation."""
        return self.entries[i - 1]

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.entries) + ")"


def parse_weight(text: str) -> Weight:
    """Parse ``"5/2,3/2"``; raises ValueError on anything malformed."""
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise ValueError(f"malformed weight {text!r}")
    try:
        return Weight(tuple(Fraction(p) for p in parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed weight {text!r}") from exc


def _check_pair(k: int, i: int, j: int):
    if not (1 <= i < j <= k):
        raise ValueError(f"need 1 <= i < j <= {k}, got i={i}, j={j}")


def raise_weight(lam: Weight, i: int, j: int) -> Weight:
    """lambda_(ij): add one at positions i and j."""
    _check_pair(lam.k, i, j)
    out = list(lam.entries)
    out[i - 1] += 1
    out[j - 1] += 1
    return Weight(tuple(out))


def is_dominant(lam: Weight) -> bool:
    e = lam.entries
    for a in range(len(e) - 1):
        d = e[a] - e[a + 1]
        if d < 0 or d.denominator != 1:
            return False
    return True


def young_symmetry_holds(lam: Weight, n: int, i: int, j: int) -> bool:
    _check_pair(lam.k, i, j)
    base = Fraction(n - 1, 2)
    return lam[j] - base == i - 1 and lam[i] - base == j - 1


@dataclass(frozen=True)
class AlphaSet:
    """Differences c_lambda - c_* for the five blocks of the splitting product."""

    alpha_i_S: Fraction
    alpha_j_S: Fraction
    alpha_i_T: Fraction
    alpha_j_T: Fraction
    alpha_ij: Fraction

    def middle(self) -> dict[str, Fraction]:
        return {
            "iS": self.alpha_i_S,
            "jS": self.alpha_j_S,
            "iT": self.alpha_i_T,
            "jT": self.alpha_j_T,
        }

    def reduced_coefficients(self) -> tuple[dict[str, Fraction], Fraction]:
        """Coefficients with the vanishing alpha_ij factor divided out.

        Block b gets the product of the other three middle alphas; the top
        term gets the product of all four.
        """
        mid = self.middle()
        coeffs = {}
        for name in mid:
            prod = Fraction(1)
            for other, val in mid.items():
                if other != name:
                    prod *= val
            coeffs[name] = prod
        top = Fraction(1)
        for val in mid.values():
            top *= val
        return coeffs, top

    def to_json(self) -> dict:
        return {
            "alpha_i_S": str(self.alpha_i_S),
            "alpha_j_S": str(self.alpha_j_S),
            "alpha_i_T": str(self.alpha_i_T),
            "alpha_j_T": str(self.alpha_j_T),
            "alpha_ij": str(self.alpha_ij),
        }


def casimir_alphas(lam: Weight, n: int, k: int, i: int, j: int) -> AlphaSet:
    if lam.k != k:
        raise ValueError(f"weight has {lam.k} entries, expected k={k}")
    if n % 2 or k < 2 or n < 2 * k:
        raise ValueError(f"need even n >= 2k >= 4, got n={n}, k={k}")
    _check_pair(k, i, j)
    den = n + 2 * k - 2
    li, lj = lam[i], lam[j]
    return AlphaSet(
        alpha_i_S=2 * (lj - li) / den,
        alpha_j_S=2 * (li - lj) / den,
        alpha_i_T=(2 * (lj - li) - n) / den,
        alpha_j_T=(2 * (li - lj) - n) / den,
        alpha_ij=(-2 * li - 2 * lj + 2 * n + 2 * i + 2 * j - 6) / Fraction(den),
    )


def weyl_normalize(mu: Sequence[Fraction]) -> tuple[int, tuple[Fraction, ...]]:
    """Return ``(eta, [mu])``: sign of the sorting permutation and the
    dominant (non-increasing) representative.  ``eta`` is 0 for singular
    weights, i.e. weights with a repeated entry."""
    mu = tuple(mu)
    if len(set(mu)) != len(mu):
        return 0, tuple(sorted(mu, reverse=True))
    order = sorted(range(len(mu)), key=lambda a: -mu[a])
    # parity from the cycle decomposition of the sorting permutation
    seen = [False] * len(order)
    parity = 0
    for start in range(len(order)):
        length = 0
        a = start
        while not seen[a]:
            seen[a] = True
            a = order[a]
            length += 1
        if length:
            parity += length - 1
    return (-1 if parity % 2 else 1), tuple(mu[a] for a in order)


def klimyk_multiplicity(lam: Weight, i: int, j: int, k: int) -> int:
    """Multiplicity of V_{lambda_(ij)} in Lambda^2 V (x) V_lambda."""
    if lam.k != k:
        raise ValueError(f"weight has {lam.k} entries, expected k={k}")
    _check_pair(k, i, j)
    if not is_dominant(lam):
        raise ValueError(f"{lam} is not dominant integral")
    rho = tuple(Fraction(k - 1 - a) for a in range(k))
    target = tuple(x + r for x, r in zip(raise_weight(lam, i, j).entries, rho))
    total = 0
    for a, b in itertools.combinations(range(k), 2):
        shifted = [x + r for x, r in zip(lam.entries, rho)]
        shifted[a] += 1
        shifted[b] += 1
        eta, rep = weyl_normalize(shifted)
        if eta and rep == target:
            total += eta
    return total


def dominant_weights(k: int, max_entry: int) -> Iterator[Weight]:
    """Dominant integral weights with entries in ``[0, max_entry]``."""
    for t in itertools.product(range(max_entry, -1, -1), repeat=k):
        if all(t[a] >= t[a + 1] for a in range(k - 1)):
            yield Weight(t)


def is_self_conjugate(partition: Sequence[int]) -> bool:
    rows = [int(x) for x in partition if x > 0]
    if not rows:
        return True
    cols = [sum(1 for r in rows if r > c) for c in range(rows[0])]
    return cols == rows


def shifted_sweep(k: int, n: int, max_entry: int, self_conjugate: bool) -> Iterator[Weight]:
    """Weights ``(n-1)/2 * (1,...,1) + mu`` for dominant ``mu``.

    With ``self_conjugate`` only symmetric Young diagrams ``mu`` are kept,
    which is the orbit condition placed on lambda.
    """
    base = Fraction(n - 1, 2)
    for mu in dominant_weights(k, max_entry):
        if self_conjugate and not is_self_conjugate([int(x) for x in mu.entries]):
            continue
        yield Weight(tuple(base + x for x in mu.entries))
