from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from helpers import EXAMPLE_TWO_TYPES, MIXED, SWITCHERS, counterfactual_dists, dist
from psdetect import bounds
from psdetect.counterfactual import (
    ALL_TYPES,
    CounterfactualDist,
    FinitePopulation,
    ResponseType,
    average_effects,
    classify_effects,
    instrumental_decomposition,
    monotone_decomposition,
    monotone_psde,
    monotone_target,
    observed_from_population,
    psde,
    sample_population,
    true_sensitivity,
)
from psdetect.errors import EmptyStratumError, MonotonicityViolatedError, ParseError


def test_sixteen_types():
    assert len(set(ALL_TYPES)) == 16


def test_observed_from_two_type_example():
    obs = observed_from_population(EXAMPLE_TWO_TYPES)
    assert obs.p(1, 0, 1) == F(1, 2) and obs.p(0, 1, 1) == F(1, 2)
    assert obs.p(1, 1, 0) == F(1, 2) and obs.p(0, 0, 0) == F(1, 2)
    assert obs.p(1, 1, 1) == 0 and obs.p(0, 0, 1) == 0


def test_observed_from_point_and_uniform():
    obs = observed_from_population(CounterfactualDist.point((0, 0, 0, 0)))
    assert obs.p(0, 0, 1) == obs.p(0, 0, 0) == 1
    obs = observed_from_population(CounterfactualDist.uniform())
    assert set(obs.probs.values()) == {F(1, 4)}


def test_psde_values():
    assert psde(MIXED, 1, 1) == F(1, 5)
    assert psde(MIXED, 1, 1, standardized=True) == F(1, 3)
    point = CounterfactualDist.point((1, 0, 1, 1))
    assert psde(point, 1, 1) == psde(point, 1, 1, standardized=True) == 1
    for y in (0, 1):
        for m in (0, 1):
            assert psde(CounterfactualDist.uniform(), y, m) == 0


def test_psde_empty_stratum():
    with pytest.raises(EmptyStratumError):
        psde(CounterfactualDist.point((1, 0, 1, 0)), 1, 1, standardized=True)


def test_instrumental_decomposition_values():
    for y in (0, 1):
        for m in (0, 1):
            assert instrumental_decomposition(CounterfactualDist.uniform(), y, m) == F(-1, 2)
    assert instrumental_decomposition(CounterfactualDist.point((1, 0, 0, 0)), 1, 0) == 1
    assert instrumental_decomposition(MIXED, 1, 1) == F(-1, 5)
    obs = observed_from_population(MIXED)
    assert bounds.randomization_statistic(obs, 1, 1) == F(-1, 5)


def test_monotone_decomposition_example():
    obs = observed_from_population(EXAMPLE_TWO_TYPES)
    for y, m in ((0, 0), (0, 1)):
        assert monotone_decomposition(EXAMPLE_TWO_TYPES, y, m) == F(1, 2)
        assert bounds.monotone_statistic(obs, y, m) == F(1, 2)


def test_monotone_decomposition_rejects_violators():
    with pytest.raises(MonotonicityViolatedError):
        monotone_decomposition({(1, 0, 0, 1): 1}, 1, 1)


def test_monotone_target_directions():
    assert monotone_target(1, 1) == (1, 0, 1, 1)
    assert monotone_target(0, 1) == (0, 1, 1, 1)
    assert monotone_target(1, 0) == (0, 1, 0, 0)
    assert monotone_target(0, 0) == (1, 0, 0, 0)
    assert monotone_psde(EXAMPLE_TWO_TYPES, 0, 0) == psde(EXAMPLE_TWO_TYPES, 1, 0) == F(1, 2)


def test_true_sensitivity_values():
    r, q = true_sensitivity(SWITCHERS, 1, 1)
    assert (r, q) == (F(-3, 10), F(3, 10))
    obs = observed_from_population(SWITCHERS)
    assert bounds.monotone_statistic(obs, 1, 1) - r == psde(SWITCHERS, 1, 1) == F(3, 10)
    assert obs.p_m(1, 1) - q == dist(SWITCHERS).stratum_mass(1, 1) == F(7, 10)


def test_true_sensitivity_no_switchers():
    cd = dist({(1, 0, 1, 1): F(1, 2), (0, 1, 0, 0): F(1, 4), (1, 1, 0, 0): F(1, 4)})
    for y in (0, 1):
        for m in (0, 1):
            assert true_sensitivity(cd, y, m) == (0, 0)


def test_true_sensitivity_uniform():
    # four of the sixteen types have M1=1, M0=0, so q is 4/16
    cd = CounterfactualDist.uniform()
    assert true_sensitivity(cd, 1, 1) == (0, F(4, 16))
    assert observed_from_population(cd).p_m(1, 1) - F(4, 16) == cd.stratum_mass(1, 1)


def test_classify_effects():
    p = classify_effects((1, 0, 0, 0))
    assert (p.total, p.pure_direct, p.total_direct, p.total_indirect, p.pure_indirect) == (1, 1, 1, 0, 0)
    assert p.principal_stratum == "m1=m0=0"
    p = classify_effects((1, 1, 1, 1))
    assert (p.total, p.pure_direct, p.total_direct, p.total_indirect, p.pure_indirect) == (0, 0, 0, 0, 0)
    p = classify_effects((1, 0, 1, 0))
    assert p.total == 1 and p.pure_direct is None and p.total_indirect is None
    assert p.principal_stratum == "m1>m0"


def test_classify_effects_no_effect_strata():
    for t in ALL_TYPES:
        p = classify_effects(t)
        if t.m1 == t.m0:
            assert p.total == p.total_direct == p.pure_direct == t.y1 - t.y0
            assert p.total_indirect == p.pure_indirect == 0
        else:
            assert None in (p.total_direct, p.pure_direct) or p.total_direct is not None


def test_average_effects_two_type_example():
    eff = average_effects(EXAMPLE_TWO_TYPES)
    assert eff["total"] == eff["pure_direct"] == eff["total_direct"] == 0
    assert average_effects({(1, 0, 1, 0): 1})["pure_direct"] is None


def test_sampler():
    a = sample_population(42, 100)
    assert a.N == 100
    assert a == sample_population(42, 100)
    b = sample_population(42, 100, "positive-monotone")
    assert all(n == 0 for t, n in b.frequency.items() if t.m1 == 0 and t.m0 == 1)
    with pytest.raises(ValueError):
        sample_population(0, 0)


def test_population_json():
    pop = FinitePopulation({"1011": 30, "0000": 70})
    doc = pop.to_json_dict()
    assert doc == {"types": {"1011": 30, "0000": 70}, "N": 100}
    assert FinitePopulation.from_json_dict(doc) == pop
    with pytest.raises(ParseError):
        FinitePopulation.from_json_dict({"types": {"1011": 30}, "N": 31})
    with pytest.raises(ParseError):
        ResponseType.from_key("10x1")


def test_masses_must_sum_to_one():
    with pytest.raises(ValueError):
        dist({(1, 0, 1, 1): 0.5})


@settings(max_examples=200, deadline=None)
@given(counterfactual_dists())
def test_instrumental_identity_property(cd):
    obs = observed_from_population(cd)
    for y in (0, 1):
        for m in (0, 1):
            assert bounds.randomization_statistic(obs, y, m) == instrumental_decomposition(cd, y, m)


@settings(max_examples=200, deadline=None)
@given(counterfactual_dists(monotone=True))
def test_monotone_identity_property(cd):
    obs = observed_from_population(cd)
    for y in (0, 1):
        for m in (0, 1):
            assert bounds.monotone_statistic(obs, y, m) == monotone_decomposition(cd, y, m)


@settings(max_examples=200, deadline=None)
@given(counterfactual_dists())
def test_sensitivity_identity_property(cd):
    obs = observed_from_population(cd)
    for y in (0, 1):
        for m in (0, 1):
            r, q = true_sensitivity(cd, y, m)
            assert bounds.monotone_statistic(obs, y, m) - r == monotone_psde(cd, y, m)
            assert obs.p_m(m, 1) - q == cd.stratum_mass(m, m)
