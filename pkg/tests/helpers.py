"""Shared fixtures-as-functions for the test modules."""
from fractions import Fraction as F

from hypothesis import strategies as st

from psdetect.counterfactual import ALL_TYPES, CounterfactualDist, FinitePopulation

# two equal halves: one type with a positive effect in stratum 0, one with a
# negative effect in stratum 1
EXAMPLE_TWO_TYPES = {(1, 0, 0, 0): F(1, 2), (0, 1, 1, 1): F(1, 2)}

MIXED = {(1, 0, 1, 1): F(3, 10), (0, 1, 1, 1): F(1, 10), (0, 0, 1, 1): F(2, 10), (0, 0, 0, 0): F(4, 10)}

SWITCHERS = {(1, 0, 1, 1): F(1, 2), (0, 0, 1, 0): F(3, 10), (0, 1, 1, 1): F(1, 5)}


def population_from_counts(counts, support=ALL_TYPES):
    return FinitePopulation(dict(zip(support, counts)))


@st.composite
def populations(draw, monotone=False, max_count=30):
    support = [t for t in ALL_TYPES if not (monotone and t.m1 == 0 and t.m0 == 1)]
    counts = draw(st.lists(st.integers(0, max_count), min_size=len(support), max_size=len(support))
                  .filter(lambda c: sum(c) > 0))
    return population_from_counts(counts, support)


@st.composite
def counterfactual_dists(draw, monotone=False):
    return draw(populations(monotone=monotone)).distribution()


def dist(masses) -> CounterfactualDist:
    return CounterfactualDist.from_masses(masses)


# -- tuple-valued data ----------------------------------------------------------

def _random_value(rng, kind, p_missing):
    if rng.random() < p_missing:
        return None
    if kind == "real":
        return round(float(rng.normal(0, 2)), 3)
    return int(rng.integers(0, 4))


def random_tuple(rng, kinds, p_missing=0.1):
    return tuple(_random_value(rng, k, p_missing) for k in kinds)


def random_kinds(rng, k):
    return tuple(rng.choice(["real", "cat"]) for _ in range(k))


def random_box(rng, kinds):
    from psdetect.regions import Box, Categories, CoordCondition, Span

    coords = []
    for i, kind in enumerate(kinds):
        if rng.random() < 0.4:
            continue
        if kind == "real":
            lo, hi = sorted(rng.normal(0, 2, size=2).round(2))
            lo = None if rng.random() < 0.2 else float(lo)
            hi = None if rng.random() < 0.2 else float(hi)
            cond = Span(lo, hi, str(rng.choice(["left", "right", "both", "neither"])))
        else:
            values = {int(v) for v in rng.choice(4, size=int(rng.integers(1, 4)), replace=False)}
            cond = Categories(frozenset(values))
        coords.append(CoordCondition(i, cond))
    return Box(tuple(coords))


def random_region(rng, y_kinds, m_kinds):
    from psdetect.regions import RegionSpec

    return RegionSpec(random_box(rng, y_kinds), random_box(rng, m_kinds))


def random_records(rng, y_kinds, m_kinds, n=(20, 200)):
    from psdetect.data import MicroRecord

    recs = []
    for x in (1, 0):
        for _ in range(int(rng.integers(*n))):
            recs.append(MicroRecord(
                x, random_tuple(rng, y_kinds), random_tuple(rng, m_kinds),
                r_y=int(rng.random() > 0.05), r_m=int(rng.random() > 0.05),
            ))
    return recs


def random_tuple_population(rng, y_kinds, m_kinds, size=60):
    from psdetect.regions import TupleIndividual

    return [
        TupleIndividual(*(random_tuple(rng, k, 0.05) for k in (y_kinds, y_kinds, m_kinds, m_kinds)))
        for _ in range(size)
    ]
