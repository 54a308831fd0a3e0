"""Detection of individual-level effects of one treatment on two outcomes.

An individual shows a pleiotropic effect when treatment changes both ``Y`` and
``Z`` for that same individual.  There are four variants, indexed by the
direction of each change:

=======  ============================  ======
variant  type ``(Y1, Y0, Z1, Z0)``     (a, b)
=======  ============================  ======
1        (1, 0, 1, 0)                  (1, 1)
2        (1, 0, 0, 1)                  (1, 0)
3        (0, 1, 1, 0)                  (0, 1)
4        (0, 1, 0, 1)                  (0, 0)
=======  ============================  ======

The statistic ``P(Y=a, Z=b | X=1) + P(Y=1-a, Z=1-b | X=0) - 1`` lower-bounds
the variant's type mass.  Variants 2 to 4 follow from variant 1 by recoding
``Y -> 1-Y`` and/or ``Z -> 1-Z``.

Tables reuse :class:`~psdetect.data.JointTable` / ``ObservedDist`` with ``Z``
stored in the mediator slot.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Mapping, NamedTuple

from .bounds import BoundReport, _clamp
from .data import ARM_CELLS, CELL_ORDER, JointTable, ObservedDist, as_fraction
from .errors import ParseError

VARIANTS = {1: (1, 1), 2: (1, 0), 3: (0, 1), 4: (0, 0)}

BASIS_PLEIOTROPY = "two-outcome instrumental-inequality contrast (randomization only)"

INDISTINGUISHABLE_NOTE = (
    "a detection cannot tell whether one outcome drives the other (mediated) "
    "or the treatment acts on each separately (biologic)"
)


def _variant(variant: int) -> tuple[int, int]:
    try:
        return VARIANTS[variant]
    except KeyError:
        raise ValueError(f"variant must be one of 1, 2, 3, 4; got {variant!r}") from None


class PleioResponseType(NamedTuple):
    y1: int
    y0: int
    z1: int
    z0: int

    @property
    def key(self) -> str:
        return f"{self.y1}{self.y0}{self.z1}{self.z0}"


PLEIO_TYPES = tuple(PleioResponseType(*t) for t in product((0, 1), repeat=4))


def target_type(variant: int) -> PleioResponseType:
    a, b = _variant(variant)
    return PleioResponseType(a, 1 - a, b, 1 - b)


def _pleio_type(t) -> PleioResponseType:
    if isinstance(t, str):
        if len(t) != 4 or set(t) - {"0", "1"}:
            raise ParseError(f"type key must be four 0/1 digits, got {t!r}")
        return PleioResponseType(*(int(c) for c in t))
    return PleioResponseType(*t)


@dataclass(frozen=True)
class PleioCounterfactual:
    """Mass over the 16 two-outcome response types."""

    mass: Mapping[PleioResponseType, Fraction]

    def __post_init__(self):
        mass = {t: Fraction(0) for t in PLEIO_TYPES}
        for t, p in self.mass.items():
            p = as_fraction(p)
            if p < 0:
                raise ValueError(f"negative mass on {t}")
            mass[_pleio_type(t)] += p
        if sum(mass.values()) != 1:
            raise ValueError(f"masses sum to {sum(mass.values())}, not 1")
        object.__setattr__(self, "mass", mass)

    @classmethod
    def uniform(cls) -> "PleioCounterfactual":
        return cls({t: Fraction(1, 16) for t in PLEIO_TYPES})

    @classmethod
    def point(cls, t) -> "PleioCounterfactual":
        return cls({_pleio_type(t): 1})

    def P(self, *key) -> Fraction:
        return self.mass[PleioResponseType(*key)]

    def prob(self, predicate) -> Fraction:
        return sum((p for t, p in self.mass.items() if predicate(t)), Fraction(0))

    def relabel(self, flip_y: bool, flip_z: bool) -> "PleioCounterfactual":
        def f(t):
            y1, y0 = (1 - t.y1, 1 - t.y0) if flip_y else (t.y1, t.y0)
            z1, z0 = (1 - t.z1, 1 - t.z0) if flip_z else (t.z1, t.z0)
            return PleioResponseType(y1, y0, z1, z0)
        return PleioCounterfactual({f(t): p for t, p in self.mass.items()})

    def observed(self) -> "PleioDist":
        probs = {cell: Fraction(0) for cell in CELL_ORDER}
        for t, p in self.mass.items():
            probs[(1, t.z1, t.y1)] += p
            probs[(0, t.z0, t.y0)] += p
        return PleioDist(ObservedDist(probs))


@dataclass(frozen=True)
class PleioDist:
    """``P(Y=y, Z=z | X=x)``, stored as an ``ObservedDist`` with ``Z`` as mediator."""

    dist: ObservedDist

    @classmethod
    def from_table(cls, table: JointTable, exact: bool = True) -> "PleioDist":
        from .data import estimate_dist

        return cls(estimate_dist(table, exact=exact))

    @classmethod
    def from_probs(cls, probs: Mapping) -> "PleioDist":
        """``probs`` keyed by ``(x, y, z)``."""
        return cls(ObservedDist({(x, z, y): p for (x, y, z), p in probs.items()}))

    @classmethod
    def from_counterfactual(cls, source) -> "PleioDist":
        if not isinstance(source, PleioCounterfactual):
            source = PleioCounterfactual(source)
        return source.observed()

    def p(self, y: int, z: int, x: int):
        return self.dist.p(y, z, x)

    def relabel(self, flip_y: bool, flip_z: bool) -> "PleioDist":
        probs = {}
        for (x, z, y), p in self.dist.probs.items():
            probs[(x, 1 - z if flip_z else z, 1 - y if flip_y else y)] = p
        return PleioDist(ObservedDist(probs, _check=False))


def _as_pleio_dist(dist) -> PleioDist:
    if isinstance(dist, PleioDist):
        return dist
    if isinstance(dist, ObservedDist):
        return PleioDist(dist)
    if isinstance(dist, JointTable):
        return PleioDist.from_table(dist)
    if isinstance(dist, PleioCounterfactual):
        return dist.observed()
    raise TypeError(f"cannot interpret {type(dist).__name__} as a two-outcome distribution")


def pleiotropy_statistic(dist, variant: int = 1):
    a, b = _variant(variant)
    d = _as_pleio_dist(dist)
    return d.p(a, b, 1) + d.p(1 - a, 1 - b, 0) - 1


def pleiotropy_test(dist, variant: int = 1, clamp: bool = False) -> BoundReport:
    """Detect the variant's response type and lower-bound its mass.

    ``detected`` means some individual has the variant's type; the statistic
    is a lower bound on that type's population proportion.
    """
    a, b = _variant(variant)
    s = pleiotropy_statistic(dist, variant)
    notes = [INDISTINGUISHABLE_NOTE]
    lower, clamped = _clamp(s, clamp, notes)
    verb = {1: "causes", 0: "prevents"}
    return BoundReport(
        y=a, m=b, label=f"treatment {verb[a]} Y and {verb[b]} Z in the same individual",
        basis=BASIS_PLEIOTROPY, statistic=s, detected=s > 0,
        lower_unstandardized=lower, mode="randomization", clamped=clamped,
        variant=variant, notes=tuple(notes),
    )


def pleiotropy_scan(dist, clamp: bool = False) -> list[BoundReport]:
    return [pleiotropy_test(dist, v, clamp) for v in VARIANTS]


def pleiotropy_identity(cd, variant: int = 1) -> Fraction:
    """Counterfactual form of the variant's statistic.

    Target mass minus every type whose treated pair ``(Y1, Z1)`` misses the
    target and whose control pair ``(Y0, Z0)`` also misses it.
    """
    if not isinstance(cd, PleioCounterfactual):
        cd = PleioCounterfactual(cd)
    a, b = _variant(variant)
    target = cd.P(a, 1 - a, b, 1 - b)
    miss = cd.prob(lambda t: (t.y1, t.z1) != (a, b) and (t.y0, t.z0) != (1 - a, 1 - b))
    return target - miss


def variant_mass(cd, variant: int) -> Fraction:
    if not isinstance(cd, PleioCounterfactual):
        cd = PleioCounterfactual(cd)
    return cd.mass[target_type(variant)]


# -- file formats -------------------------------------------------------------

def table_to_json_dict(table: JointTable) -> dict:
    return {
        f"x{x}": {f"y{y}z{z}": table.counts[(x, z, y)] for z, y in ARM_CELLS}
        for x in (1, 0)
    }


def table_from_json_dict(doc: Mapping) -> JointTable:
    try:
        counts = {(x, z, y): doc[f"x{x}"][f"y{y}z{z}"] for x, z, y in CELL_ORDER}
    except (KeyError, TypeError) as exc:
        raise ParseError(f"two-outcome table JSON is missing cell {exc}") from exc
    return JointTable(counts)


def parse_csv(text: str) -> JointTable:
    """Tally ``x,y,z`` microdata into a table with ``Z`` in the mediator slot."""
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    if not {"x", "y", "z"} <= set(header):
        raise ParseError("two-outcome CSV header must contain x,y,z")
    reader.fieldnames = header
    counts = dict.fromkeys(CELL_ORDER, 0)
    for lineno, row in enumerate(reader, start=2):
        try:
            x, y, z = (int(row[c]) for c in ("x", "y", "z"))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if {x, y, z} - {0, 1}:
            raise ParseError(f"line {lineno}: x, y, z must be 0 or 1")
        counts[(x, z, y)] += 1
    return JointTable(counts)


def read_table(path, fmt: str = "json") -> JointTable:
    text = Path(path).read_text()
    if fmt == "csv":
        return parse_csv(text)
    try:
        return table_from_json_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


__all__ = [
    "VARIANTS", "PLEIO_TYPES", "PleioResponseType", "PleioCounterfactual", "PleioDist",
    "target_type", "pleiotropy_statistic", "pleiotropy_test", "pleiotropy_scan",
    "pleiotropy_identity", "variant_mass", "table_to_json_dict",
    "table_from_json_dict", "parse_csv", "read_table",
]
