"""Region membership for tuple-valued, continuous, longitudinal or missing data.

A :class:`RegionSpec` names a box ``y_a`` over outcome tuples and a box
``m_a`` over mediator tuples.  Replacing ``Y`` by ``[Y in y_a]`` and ``M`` by
``[M in m_a]`` turns any dataset into a binary table, after which every binary
result applies with ``y = 1, m = 1``.  The set-valued bounds here are computed
from membership frequencies directly and agree exactly with the binary engine
run on :func:`coarsen` output.

Missing components are never members under the default ``missing="exclude"``
policy, which folds the response indicator into the region.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .bounds import (
    BoundReport,
    SensitivityParams,
    _clamp,
)
from .counterfactual import CounterfactualDist, ResponseType, observed_from_population
from .data import CELL_ORDER, JointTable, MicroRecord, ObservedDist, as_fraction
from .errors import (
    DegenerateDenominatorError,
    EmptyOutcomeSelectorError,
    EmptyStratumError,
    MissingComponentError,
    ParamOutOfRangeError,
    ParseError,
    SchemaMismatchError,
)

MISSING_POLICIES = ("exclude", "error")
CLOSED_SIDES = ("left", "right", "both", "neither")

BASIS_SET_RANDOMIZATION = "set-membership instrumental-inequality contrast (randomization only)"
BASIS_SET_MONOTONE = "set-membership monotone contrast (no M1 outside, M0 inside)"
BASIS_SET_SENSITIVITY = "set-membership sensitivity-adjusted monotone contrast (r, q)"

SET_LABEL = "treatment moves Y into y_a within stratum M1, M0 both in m_a"


# -- region primitives ----------------------------------------------------------

@dataclass(frozen=True)
class Span:
    """Interval with optional infinite ends; closed below and open above by default."""

    lower: Optional[float] = None
    upper: Optional[float] = None
    closed: str = "left"

    def __post_init__(self):
        if self.closed not in CLOSED_SIDES:
            raise ValueError(f"closed must be one of {CLOSED_SIDES}, got {self.closed!r}")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f"interval lower {self.lower} exceeds upper {self.upper}")

    def __contains__(self, v) -> bool:
        if isinstance(v, float) and math.isnan(v):
            return False
        lo, hi = self.lower, self.upper
        if lo is not None:
            if v < lo or (v == lo and self.closed in ("right", "neither")):
                return False
        if hi is not None:
            if v > hi or (v == hi and self.closed in ("left", "neither")):
                return False
        return True

    def to_json(self) -> dict:
        doc = {"interval": [self.lower, self.upper]}
        if self.closed != "left":
            doc["closed"] = self.closed
        return doc


@dataclass(frozen=True)
class Categories:
    values: frozenset

    def __post_init__(self):
        values = frozenset(self.values)
        if not values:
            raise ValueError("category set must be nonempty")
        object.__setattr__(self, "values", values)

    def __contains__(self, v) -> bool:
        return v in self.values

    def to_json(self) -> dict:
        return {"categories": sorted(self.values, key=repr)}


Condition = Union[Span, Categories]


@dataclass(frozen=True)
class CoordCondition:
    index: int
    condition: Condition

    def to_json(self) -> dict:
        return {"index": self.index, **self.condition.to_json()}


@dataclass(frozen=True)
class Box:
    """Conjunction of per-coordinate conditions; no conditions means the whole space.

    With ``time`` set, the tuple is first reduced to the listed positions and
    condition indices refer to the reduced tuple; every selected position must
    then be observed.  Without it, only the constrained positions must be.
    """

    coords: tuple = ()
    time: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if self.time is not None:
            object.__setattr__(self, "time", tuple(self.time))
            for c in self.coords:
                if not 0 <= c.index < len(self.time):
                    raise ValueError(f"condition index {c.index} outside the {len(self.time)} selected times")

    @property
    def is_everything(self) -> bool:
        return not self.coords and not self.time

    def required_positions(self) -> tuple:
        if self.time is not None:
            return self.time
        return tuple(sorted({c.index for c in self.coords}))

    def to_json(self) -> dict:
        doc = {"coords": [c.to_json() for c in self.coords]}
        if self.time is not None:
            doc["time"] = list(self.time)
        return doc


@dataclass(frozen=True)
class RegionSpec:
    y_region: Box
    m_region: Box = field(default_factory=Box)
    missing: str = "exclude"

    def __post_init__(self):
        if self.missing not in MISSING_POLICIES:
            raise ValueError(f"missing policy must be one of {MISSING_POLICIES}, got {self.missing!r}")

    @property
    def total_effect_mode(self) -> bool:
        return self.m_region.is_everything

    def to_json_dict(self) -> dict:
        return {"y": self.y_region.to_json(), "m": self.m_region.to_json(), "missing": self.missing}

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def binary_region(y_value: int = 1, m_value: int = 1) -> RegionSpec:
    """Region picking ``Y = y_value`` and ``M = m_value`` on scalar binary data."""
    return RegionSpec(
        Box((CoordCondition(0, Categories({y_value})),)),
        Box((CoordCondition(0, Categories({m_value})),)),
    )


# -- JSON ---------------------------------------------------------------------

def _condition_from_json(doc: Mapping) -> CoordCondition:
    if "index" not in doc:
        raise ParseError(f"region coordinate needs an 'index': {doc}")
    if ("interval" in doc) == ("categories" in doc):
        raise ParseError(f"region coordinate needs exactly one of 'interval' or 'categories': {doc}")
    try:
        if "interval" in doc:
            lo, hi = doc["interval"]
            cond = Span(lo, hi, doc.get("closed", "left"))
        else:
            cond = Categories(frozenset(doc["categories"]))
        return CoordCondition(int(doc["index"]), cond)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad region coordinate {doc}: {exc}") from exc


def _box_from_json(doc: Optional[Mapping], default_time) -> Box:
    if doc is None:
        return Box()
    time = doc.get("time", default_time)
    coords = tuple(_condition_from_json(c) for c in doc.get("coords", []))
    if time is not None and not coords and "time" not in doc:
        time = None
    try:
        return Box(coords, None if time is None else tuple(int(t) for t in time))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def region_from_json_dict(doc: Mapping) -> RegionSpec:
    """Parse ``{"y": {"coords": [...]}, "m": {...}, "missing": ..., "time": [...]}``.

    A top-level ``time`` applies to both boxes unless a box sets its own; an
    ``m`` box with no coordinates and no own ``time`` is the whole space.
    """
    if "y" not in doc:
        raise ParseError("region spec needs a 'y' box")
    time = doc.get("time")
    try:
        return RegionSpec(
            _box_from_json(doc["y"], time),
            _box_from_json(doc.get("m"), time),
            doc.get("missing", "exclude"),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def read_region(path) -> RegionSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return region_from_json_dict(doc)


# -- membership ---------------------------------------------------------------

def _in_box(values: tuple, observed: Sequence[bool], box: Box, policy: str, what: str) -> bool:
    if not box.coords and box.time is None:
        return True
    needed = box.required_positions()
    for pos in needed:
        if pos >= len(observed):
            raise SchemaMismatchError(
                f"{what} tuple has {len(observed)} components but the region uses position {pos}"
            )
    if not all(observed[pos] for pos in needed):
        if policy == "error":
            raise MissingComponentError(f"{what} component missing at a selected position")
        return False
    view = tuple(values[p] for p in box.time) if box.time is not None else values
    return all(view[c.index] in c.condition for c in box.coords)


def _observed_flags(values: tuple, indicator: int) -> list:
    return [bool(indicator) and v is not None for v in values]


def membership(record: MicroRecord, spec: RegionSpec) -> tuple[bool, bool]:
    """``([Y in y_a], [M in m_a])`` for one record."""
    y_in = _in_box(record.y, _observed_flags(record.y, record.r_y), spec.y_region, spec.missing, "outcome")
    m_in = _in_box(record.m, _observed_flags(record.m, record.r_m), spec.m_region, spec.missing, "mediator")
    return y_in, m_in


def coarsen(records: Iterable[MicroRecord], spec: RegionSpec) -> JointTable:
    """Binary table over ``(X, [M in m_a], [Y in y_a])``."""
    counts = dict.fromkeys(CELL_ORDER, 0)
    for rec in records:
        y_in, m_in = membership(rec, spec)
        counts[(rec.x, int(m_in), int(y_in))] += 1
    return JointTable(counts)


@dataclass(frozen=True)
class SetProbabilities:
    """Membership frequencies ``P([Y in y_a], [M in m_a] | X = x)``."""

    joint: Mapping[tuple, Fraction]

    @classmethod
    def from_records(cls, records: Iterable[MicroRecord], spec: RegionSpec) -> "SetProbabilities":
        tally = {}
        arm = {0: 0, 1: 0}
        for rec in records:
            key = (rec.x,) + membership(rec, spec)
            tally[key] = tally.get(key, 0) + 1
            arm[rec.x] += 1
        if not arm[0] or not arm[1]:
            from .errors import EmptyArmError

            raise EmptyArmError("both arms need at least one record")
        joint = {
            (x, y_in, m_in): Fraction(tally.get((x, y_in, m_in), 0), arm[x])
            for x in (1, 0) for y_in in (True, False) for m_in in (True, False)
        }
        return cls(joint)

    @classmethod
    def from_binary(cls, dist: ObservedDist) -> "SetProbabilities":
        """Binary data read as membership of the value 1."""
        return cls({(x, bool(y), bool(m)): p for (x, m, y), p in dist.probs.items()})

    def p(self, y_in: bool, m_in: bool, x: int):
        return self.joint[(x, y_in, m_in)]

    def p_m(self, m_in: bool, x: int):
        return self.joint[(x, True, m_in)] + self.joint[(x, False, m_in)]


def set_probabilities(source, spec: Optional[RegionSpec] = None) -> SetProbabilities:
    if isinstance(source, SetProbabilities):
        return source
    if isinstance(source, ObservedDist):
        return SetProbabilities.from_binary(source)
    if isinstance(source, JointTable):
        from .data import estimate_dist

        return SetProbabilities.from_binary(estimate_dist(source))
    if spec is None:
        raise ValueError("record input needs a RegionSpec")
    return SetProbabilities.from_records(source, spec)


# -- set-valued bounds ----------------------------------------------------------

def set_bound(source, spec: Optional[RegionSpec] = None, clamp: bool = False) -> BoundReport:
    """Randomization-only bound for ``Y1 in y_a, Y0 not in y_a`` within ``M1, M0 in m_a``.

    Statistic ``P(Y in y_a, M in m_a | X=1) + P(Y notin y_a, M in m_a | X=0) - 1``;
    when positive it is standardized by ``P(M in m_a|X=1) - P(M notin m_a|X=0)``.
    """
    sp = set_probabilities(source, spec)
    s = sp.p(True, True, 1) + sp.p(False, True, 0) - 1
    den = sp.p_m(True, 1) - sp.p_m(False, 0)
    notes = []
    std = None
    if s > 0:
        if den <= 0:
            raise DegenerateDenominatorError("statistic positive but membership denominator <= 0")
        std = s / den
    else:
        notes.append("statistic <= 0: standardized bound not emitted")
    lower, clamped = _clamp(s, clamp, notes)
    return BoundReport(
        y=1, m=1, label=SET_LABEL, basis=BASIS_SET_RANDOMIZATION, statistic=s,
        detected=s > 0, lower_unstandardized=lower, lower_standardized=std,
        denominator=den, mode="randomization", clamped=clamped, notes=tuple(notes),
    )


def set_monotone_bound(source, spec: Optional[RegionSpec] = None, clamp: bool = False) -> BoundReport:
    """Bound assuming nobody has ``M1`` outside and ``M0`` inside ``m_a``.

    Statistic ``P(Y notin y_a, M in m_a | X=0) - P(Y notin y_a, M in m_a | X=1)``,
    standardized by ``P(M in m_a | X=0)``, which then equals the stratum mass.
    """
    sp = set_probabilities(source, spec)
    d = sp.p(False, True, 0) - sp.p(False, True, 1)
    den = sp.p_m(True, 0)
    notes = []
    std = None
    if d > 0:
        if den == 0:
            raise DegenerateDenominatorError("statistic positive but P(M in m_a | X=0) = 0")
        std = d / den
    else:
        notes.append("statistic <= 0: standardized bound not emitted")
    lower, clamped = _clamp(d, clamp, notes)
    return BoundReport(
        y=1, m=1, label=SET_LABEL, basis=BASIS_SET_MONOTONE, statistic=d,
        detected=d > 0, lower_unstandardized=lower, lower_standardized=std,
        denominator=den, mode="control-arm", clamped=clamped,
        monotone_assumed=True, notes=tuple(notes),
    )


def set_sensitivity_adjust(source, spec: Optional[RegionSpec] = None,
                           params: SensitivityParams = SensitivityParams(0, 0)) -> BoundReport:
    """Set-valued sensitivity adjustment.

    ``q = P(M1 notin m_a, M0 in m_a)`` is subtracted from ``P(M in m_a | X=0)``;
    the binary version anchors its denominator on the treated arm instead, and
    both give the stratum mass under their own true ``q``.
    """
    sp = set_probabilities(source, spec)
    r, q = as_fraction(params.r), as_fraction(params.q)
    pm0 = sp.p_m(True, 0)
    if not -1 <= r <= 1:
        raise ParamOutOfRangeError(f"r={params.r} outside [-1, 1]")
    if not 0 <= q <= pm0:
        raise ParamOutOfRangeError(f"q={params.q} outside [0, P(M in m_a|X=0)={float(pm0):.6g}]")
    d = sp.p(False, True, 0) - sp.p(False, True, 1)
    adjusted = d - r
    den = pm0 - q
    notes = [f"unadjusted statistic={float(d):.6g}, r={float(r):.6g}, q={float(q):.6g}"]
    std = adjusted / den if den > 0 else None
    if std is None:
        notes.append("q equals P(M in m_a|X=0): standardized value undefined")
    return BoundReport(
        y=1, m=1, label=SET_LABEL, basis=BASIS_SET_SENSITIVITY, statistic=adjusted,
        detected=adjusted > 0, lower_unstandardized=adjusted, lower_standardized=std,
        denominator=den, mode="sensitivity", notes=tuple(notes),
    )


# -- trajectories -----------------------------------------------------------------

def trajectory_region(y_times: Sequence[int], y_conditions: Mapping[int, Condition],
                      m_times: Sequence[int] = (), m_conditions: Optional[Mapping[int, Condition]] = None,
                      missing: str = "exclude") -> RegionSpec:
    """Region over trajectories ``Y(t1..tk)`` and ``M(s1..sj)``.

    Records hold full series; ``y_times`` / ``m_times`` are positions in them.
    Membership needs every selected time observed and every condition met.  An
    empty ``m_times`` gives the total-effect region (all mediators members).
    """
    y_times = tuple(y_times)
    if not y_times:
        raise EmptyOutcomeSelectorError("trajectory region needs at least one outcome time")

    def build(times, conditions):
        if not times:
            if conditions:
                raise ValueError("mediator conditions given without mediator times")
            return Box()
        coords = []
        for t, cond in sorted((conditions or {}).items()):
            if t not in times:
                raise ValueError(f"condition at time {t} is not among the selected times {times}")
            coords.append(CoordCondition(times.index(t), cond))
        return Box(tuple(coords), times)

    return RegionSpec(build(y_times, y_conditions), build(tuple(m_times), m_conditions), missing)


# -- tuple-valued oracle ------------------------------------------------------------

@dataclass(frozen=True)
class TupleIndividual:
    """Potential outcome and mediator tuples under each arm (``None`` = missing)."""

    y1: tuple
    y0: tuple
    m1: tuple
    m0: tuple


def _member(values, box: Box, policy: str) -> bool:
    return _in_box(values, [v is not None for v in values], box, policy, "counterfactual")


def membership_type(ind: TupleIndividual, spec: RegionSpec) -> ResponseType:
    """Binary response type of the membership indicators."""
    return ResponseType(
        int(_member(ind.y1, spec.y_region, spec.missing)),
        int(_member(ind.y0, spec.y_region, spec.missing)),
        int(_member(ind.m1, spec.m_region, spec.missing)),
        int(_member(ind.m0, spec.m_region, spec.missing)),
    )


def membership_distribution(population: Sequence[TupleIndividual], spec: RegionSpec) -> CounterfactualDist:
    N = len(population)
    if N == 0:
        raise ValueError("empty population")
    mass = {}
    for ind in population:
        t = membership_type(ind, spec)
        mass[t] = mass.get(t, 0) + 1
    return CounterfactualDist({t: Fraction(n, N) for t, n in mass.items()})


def population_records(population: Sequence[TupleIndividual]) -> list[MicroRecord]:
    """Both arms see the whole population: one treated and one control record each."""
    recs = [MicroRecord(1, tuple(i.y1), tuple(i.m1)) for i in population]
    recs += [MicroRecord(0, tuple(i.y0), tuple(i.m0)) for i in population]
    return recs


def set_decomposition(cd: CounterfactualDist) -> Fraction:
    """Counterfactual form of the set statistic over membership types.

    Types are ``(Y1 in, Y0 in, M1 in, M0 in)`` with 1 for membership.
    """
    P = cd.P
    return P(1, 0, 1, 1) - P(0, 1, 1, 1) - (
        P(1, 1, 0, 1) + P(0, 1, 0, 1)
        + P(0, 1, 1, 0) + P(0, 0, 1, 0)
        + P(1, 0, 0, 0) + P(0, 0, 0, 0)
        + P(1, 1, 0, 0) + P(0, 1, 0, 0)
    )


def set_psde(cd: CounterfactualDist, standardized: bool = False) -> Fraction:
    value = cd.P(1, 0, 1, 1) - cd.P(0, 1, 1, 1)
    if not standardized:
        return value
    stratum = cd.stratum_mass(1, 1)
    if stratum == 0:
        raise EmptyStratumError("no individual has both mediators in m_a")
    return value / stratum


def set_true_sensitivity(cd: CounterfactualDist) -> tuple[Fraction, Fraction]:
    """True ``(r, q)`` for the set-valued adjustment."""
    P = cd.P
    r = P(0, 0, 0, 1) + P(1, 0, 0, 1) - P(0, 0, 1, 0) - P(0, 1, 1, 0)
    return r, cd.stratum_mass(0, 1)


def observed_membership(cd: CounterfactualDist) -> ObservedDist:
    return observed_from_population(cd)


__all__ = [
    "Span", "Categories", "CoordCondition", "Box", "RegionSpec", "binary_region",
    "region_from_json_dict", "read_region", "membership", "coarsen",
    "SetProbabilities", "set_probabilities", "set_bound", "set_monotone_bound",
    "set_sensitivity_adjust", "trajectory_region", "TupleIndividual",
    "membership_type", "membership_distribution", "population_records",
    "set_decomposition", "set_psde", "set_true_sensitivity", "observed_membership",
]
