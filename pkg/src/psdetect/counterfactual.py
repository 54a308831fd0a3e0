"""Exact finite-population model of binary counterfactual response types.

A response type is the vector ``(Y1, Y0, M1, M0)`` of an individual's
potential outcome and mediator under each treatment.  Everything here works in
exact rational arithmetic so that decompositions of observable contrasts can
be checked as equalities.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, NamedTuple, Optional

import numpy as np

from .data import CELL_ORDER, PROB_TOL, ObservedDist, as_fraction
from .errors import EmptyStratumError, MonotonicityViolatedError, ParseError


class ResponseType(NamedTuple):
    y1: int
    y0: int
    m1: int
    m0: int

    @property
    def key(self) -> str:
        return f"{self.y1}{self.y0}{self.m1}{self.m0}"

    @classmethod
    def from_key(cls, key: str) -> "ResponseType":
        if len(key) != 4 or set(key) - {"0", "1"}:
            raise ParseError(f"response type key must be four 0/1 digits, got {key!r}")
        return cls(*(int(c) for c in key))

    def outcome(self, x: int) -> int:
        return self.y1 if x else self.y0

    def mediator(self, x: int) -> int:
        return self.m1 if x else self.m0


ALL_TYPES: tuple[ResponseType, ...] = tuple(ResponseType(*t) for t in product((0, 1), repeat=4))
MONOTONE_TYPES: tuple[ResponseType, ...] = tuple(t for t in ALL_TYPES if t.m1 >= t.m0)


def _as_type(t) -> ResponseType:
    if isinstance(t, ResponseType):
        return t
    if isinstance(t, str):
        return ResponseType.from_key(t)
    return ResponseType(*t)


@dataclass(frozen=True)
class CounterfactualDist:
    """Probability mass ``P_c`` over the 16 response types."""

    mass: Mapping[ResponseType, Fraction]

    def __post_init__(self):
        mass = {t: 0 for t in ALL_TYPES}
        for t, p in self.mass.items():
            t = _as_type(t)
            if p < 0:
                raise ValueError(f"negative mass {p} on type {t.key}")
            mass[t] += p
        total = sum(mass.values())
        exact = all(isinstance(p, (int, Fraction)) for p in mass.values())
        if (exact and total != 1) or (not exact and abs(total - 1) > PROB_TOL):
            raise ValueError(f"masses sum to {total}, not 1")
        object.__setattr__(self, "mass", {t: Fraction(p) if exact else p for t, p in mass.items()})

    @classmethod
    def from_masses(cls, masses: Mapping) -> "CounterfactualDist":
        """Accepts keys as tuples, ``ResponseType`` or ``"y1y0m1m0"`` strings.

        Float masses are converted through their decimal repr so ``0.3`` is
        ``3/10`` rather than its binary approximation.
        """
        return cls({_as_type(t): as_fraction(p) for t, p in masses.items()})

    @classmethod
    def uniform(cls) -> "CounterfactualDist":
        return cls({t: Fraction(1, 16) for t in ALL_TYPES})

    @classmethod
    def point(cls, t) -> "CounterfactualDist":
        return cls({_as_type(t): Fraction(1)})

    def __getitem__(self, t) -> Fraction:
        return self.mass[_as_type(t)]

    def P(self, *key) -> Fraction:
        """``P_c(y1, y0, m1, m0)``; shorthand used by the decompositions."""
        return self.mass[ResponseType(*key)]

    def prob(self, predicate) -> Fraction:
        return sum((p for t, p in self.mass.items() if predicate(t)), Fraction(0))

    def stratum_mass(self, m1: int, m0: int) -> Fraction:
        return self.prob(lambda t: t.m1 == m1 and t.m0 == m0)

    @property
    def is_positive_monotone(self) -> bool:
        return self.stratum_mass(0, 1) == 0


@dataclass(frozen=True)
class FinitePopulation:
    """An exact multiset of response types."""

    frequency: Mapping[ResponseType, int]

    def __post_init__(self):
        freq = {t: 0 for t in ALL_TYPES}
        for t, n in self.frequency.items():
            n = int(n)
            if n < 0:
                raise ValueError(f"negative frequency {n}")
            freq[_as_type(t)] += n
        if sum(freq.values()) <= 0:
            raise ValueError("population must contain at least one individual")
        object.__setattr__(self, "frequency", freq)

    @property
    def N(self) -> int:
        return sum(self.frequency.values())

    def distribution(self) -> CounterfactualDist:
        N = self.N
        return CounterfactualDist({t: Fraction(n, N) for t, n in self.frequency.items()})

    def has_type(self, t) -> bool:
        return self.frequency[_as_type(t)] > 0

    def to_json_dict(self) -> dict:
        return {
            "types": {t.key: n for t, n in self.frequency.items() if n},
            "N": self.N,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "FinitePopulation":
        try:
            types = doc["types"]
        except (KeyError, TypeError) as exc:
            raise ParseError("population JSON needs a 'types' object") from exc
        pop = cls({ResponseType.from_key(k): n for k, n in types.items()})
        if "N" in doc and doc["N"] != pop.N:
            raise ParseError(f"declared N={doc['N']} but frequencies sum to {pop.N}")
        return pop

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _dist_of(source) -> CounterfactualDist:
    if isinstance(source, FinitePopulation):
        return source.distribution()
    if isinstance(source, CounterfactualDist):
        return source
    return CounterfactualDist.from_masses(source)


def observed_from_population(source) -> ObservedDist:
    """Observed ``P(Y=y, M=m | X=x)`` implied by randomization and consistency.

    Each arm sees the same population: ``P(Y=y, M=m | X=x)`` is the mass of
    types with ``Y_x = y`` and ``M_x = m``.
    """
    cd = _dist_of(source)
    probs = {cell: Fraction(0) for cell in CELL_ORDER}
    for t, p in cd.mass.items():
        for x in (1, 0):
            probs[(x, t.mediator(x), t.outcome(x))] += p
    return ObservedDist(probs)


def psde(source, y: int, m: int, standardized: bool = False) -> Fraction:
    """Principal stratum direct effect within ``M1 = M0 = m``.

    Unstandardized: ``P_c(y, 1-y, m, m) - P_c(1-y, y, m, m)``.  The standardized
    version divides by the stratum mass ``P(M1 = m, M0 = m)``.
    """
    cd = _dist_of(source)
    value = cd.P(y, 1 - y, m, m) - cd.P(1 - y, y, m, m)
    if not standardized:
        return value
    stratum = cd.stratum_mass(m, m)
    if stratum == 0:
        raise EmptyStratumError(f"stratum M1=M0={m} has zero mass")
    return value / stratum


def monotone_target(y: int, m: int) -> tuple[int, int, int, int]:
    """Response type detected by the monotone contrast ``D(y, m)``."""
    return (y * m + (1 - m) * (1 - y), (1 - y) * m + (1 - m) * y, m, m)


def monotone_psde(source, y: int, m: int, standardized: bool = False) -> Fraction:
    """The stratum effect lower-bounded by ``D(y, m)``.

    For ``m = 1`` this is ``psde(y, 1)``; for ``m = 0`` the outcome direction
    flips, giving ``psde(1 - y, 0)``.
    """
    return psde(source, monotone_target(y, m)[0], m, standardized)


def instrumental_decomposition(source, y: int, m: int) -> Fraction:
    """Counterfactual form of ``P(Y=y,M=m|X=1) + P(Y=1-y,M=m|X=0) - 1``.

    The target type's mass minus the nine response types that make the
    instrumental inequality hold.
    """
    P = _dist_of(source).P
    n, k = 1 - y, 1 - m
    return P(y, n, m, m) - (
        P(n, y, m, m) + P(n, n, m, k) + P(n, y, m, k)
        + P(y, y, k, m) + P(n, y, k, m) + P(y, n, k, k)
        + P(n, n, k, k) + P(y, y, k, k) + P(n, y, k, k)
    )


def monotone_decomposition(source, y: int, m: int) -> Fraction:
    """Counterfactual form of ``P(Y=1-y,M=m|X=1-m) - P(Y=1-y,M=m|X=m)``.

    Valid only when no individual has ``M1 = 0, M0 = 1``.
    """
    cd = _dist_of(source)
    if not cd.is_positive_monotone:
        raise MonotonicityViolatedError("population has mass on types with M1=0, M0=1")
    P = cd.P
    a, b, _, _ = monotone_target(y, m)
    c = m * (1 - y) + (1 - m) * y
    d = y * m + (1 - y) * (1 - m)
    return P(a, b, m, m) - P(c, d, m, m) - P(c, d, 1, 0) - P(1 - y, 1 - y, 1, 0)


def true_sensitivity(source, y: int, m: int) -> tuple[Fraction, Fraction]:
    """The unidentified ``(r, q)`` that make the monotone contrast exact.

    ``D(y, m) - r`` equals the stratum effect and ``P(M=m|X=1) - q`` equals
    the stratum mass ``P(M1 = M0 = m)``.
    """
    cd = _dist_of(source)
    P = cd.P
    a, b, _, _ = monotone_target(y, m)
    r = (
        P(a, b, 0, 1) + P(1 - y, 1 - y, 0, 1)
        - P(y * (1 - m) + (1 - y) * m, (1 - y) * (1 - m) + y * m, 1, 0)
        - P(1 - y, 1 - y, 1, 0)
    )
    q = cd.prob(lambda t: t.m1 == m and t.m0 != m)
    return r, q


# -- individual effects -------------------------------------------------------

STRATA = {(0, 0): "m1=m0=0", (1, 1): "m1=m0=1", (1, 0): "m1>m0", (0, 1): "m1<m0"}


def nested_outcome(t, x: int, x_mediator: int) -> Optional[int]:
    """``Y_{x, M_{x'}}`` via the composition axiom, or ``None`` when unidentified.

    Defined when ``x == x'`` or when the mediator does not respond to
    treatment (``M1 = M0``).
    """
    t = _as_type(t)
    if x == x_mediator or t.m1 == t.m0:
        return t.outcome(x)
    return None


def _diff(a, b):
    return None if a is None or b is None else a - b


@dataclass(frozen=True)
class EffectProfile:
    total: int
    total_direct: Optional[int]
    pure_direct: Optional[int]
    total_indirect: Optional[int]
    pure_indirect: Optional[int]
    principal_stratum: str


def classify_effects(t) -> EffectProfile:
    t = _as_type(t)
    y = nested_outcome
    return EffectProfile(
        total=t.y1 - t.y0,
        total_direct=_diff(y(t, 1, 1), y(t, 0, 1)),
        pure_direct=_diff(y(t, 1, 0), y(t, 0, 0)),
        total_indirect=_diff(y(t, 1, 1), y(t, 1, 0)),
        pure_indirect=_diff(y(t, 0, 1), y(t, 0, 0)),
        principal_stratum=STRATA[(t.m1, t.m0)],
    )


EFFECT_NAMES = ("total", "total_direct", "pure_direct", "total_indirect", "pure_indirect")


def average_effects(source) -> dict[str, Optional[Fraction]]:
    """Population averages of each individual effect.

    An average is ``None`` when some type with positive mass has that effect
    undefined.
    """
    cd = _dist_of(source)
    out = {}
    for name in EFFECT_NAMES:
        total = Fraction(0)
        for t, p in cd.mass.items():
            if p == 0:
                continue
            v = getattr(classify_effects(t), name)
            if v is None:
                total = None
                break
            total += p * v
        out[name] = total
    return out


# -- random populations -------------------------------------------------------

def sample_population(seed, N: int, constraint: str = "none",
                      concentration: float = 1.0) -> FinitePopulation:
    """Draw a population of ``N`` individuals over the response types.

    Type probabilities come from a symmetric Dirichlet with the given
    ``concentration`` (1.0 is uniform on the simplex; smaller values give
    sparse populations), then counts are multinomial.  Under
    ``constraint="positive-monotone"`` types with ``M1 = 0, M0 = 1`` are
    excluded.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if constraint == "none":
        support = ALL_TYPES
    elif constraint == "positive-monotone":
        support = MONOTONE_TYPES
    else:
        raise ValueError(f"unknown constraint {constraint!r}")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.full(len(support), concentration))
    counts = rng.multinomial(N, weights)
    return FinitePopulation({t: int(n) for t, n in zip(support, counts)})


__all__ = [
    "ALL_TYPES", "MONOTONE_TYPES", "ResponseType", "CounterfactualDist",
    "FinitePopulation", "EffectProfile", "observed_from_population", "psde",
    "monotone_target", "monotone_psde", "instrumental_decomposition",
    "monotone_decomposition", "true_sensitivity", "nested_outcome",
    "classify_effects", "average_effects", "sample_population",
]
