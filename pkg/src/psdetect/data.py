"""Contingency tables, microdata records and plug-in observed distributions.

Cells are indexed ``(x, m, y)`` with ``x`` slowest.  Flat sequences of counts
always follow :data:`CELL_ORDER`, which reads Table-style layouts row by row:
within an arm the order is ``m1y1, m1y0, m0y1, m0y0``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product
from numbers import Integral, Real
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    EmptyArmError,
    MissingComponentError,
    NegativeCountError,
    ParseError,
)

Cell = tuple[int, int, int]

CELL_ORDER: tuple[Cell, ...] = tuple(product((1, 0), repeat=3))
ARM_CELLS: tuple[tuple[int, int], ...] = tuple(product((1, 0), repeat=2))

PROB_TOL = 1e-12


def as_fraction(value) -> Fraction:
    """Exact rational; floats go through their shortest repr so 0.3 is 3/10."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def _check_binary(value, name):
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")


@dataclass(frozen=True)
class JointTable:
    """Raw cell counts ``n(x, m, y)`` from a two-arm randomized study."""

    counts: Mapping[Cell, int]

    def __post_init__(self):
        clean = {}
        for cell in CELL_ORDER:
            n = self.counts.get(cell, 0)
            if not isinstance(n, Integral) or isinstance(n, bool):
                raise TypeError(f"count for cell {cell} must be an integer, got {n!r}")
            if n < 0:
                raise NegativeCountError(f"count for cell (x, m, y)={cell} is negative: {n}")
            clean[cell] = int(n)
        extra = set(self.counts) - set(CELL_ORDER)
        if extra:
            raise ValueError(f"unknown cells {sorted(extra)}; cells are (x, m, y) in {{0,1}}^3")
        object.__setattr__(self, "counts", clean)
        for x in (1, 0):
            if self.n(x) == 0:
                raise EmptyArmError(f"arm X={x} has no observations")

    @classmethod
    def from_arms(cls, x1: Sequence[int], x0: Sequence[int]) -> "JointTable":
        """Build from per-arm counts ordered ``(m1y1, m1y0, m0y1, m0y0)``."""
        counts = {}
        for x, arm in ((1, x1), (0, x0)):
            if len(arm) != 4:
                raise ValueError("each arm needs exactly four counts (m1y1, m1y0, m0y1, m0y0)")
            for (m, y), n in zip(ARM_CELLS, arm):
                counts[(x, m, y)] = n
        return cls(counts)

    def n(self, x: int) -> int:
        """Arm total."""
        return sum(self.counts[(x, m, y)] for m, y in ARM_CELLS)

    @property
    def n1(self) -> int:
        return self.n(1)

    @property
    def n0(self) -> int:
        return self.n(0)

    def arm(self, x: int) -> tuple[int, int, int, int]:
        return tuple(self.counts[(x, m, y)] for m, y in ARM_CELLS)

    def swap_roles(self) -> "JointTable":
        """Interchange the mediator and outcome columns."""
        return JointTable({(x, y, m): n for (x, m, y), n in self.counts.items()})

    def to_json_dict(self) -> dict:
        return {
            f"x{x}": {f"m{m}y{y}": self.counts[(x, m, y)] for m, y in ARM_CELLS}
            for x in (1, 0)
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "JointTable":
        try:
            counts = {
                (x, m, y): doc[f"x{x}"][f"m{m}y{y}"] for x, m, y in CELL_ORDER
            }
        except (KeyError, TypeError) as exc:
            raise ParseError(f"table JSON is missing cell {exc}") from exc
        return cls(counts)


def ingest_table(cells) -> JointTable:
    """Validate eight labeled counts and return a :class:`JointTable`.

    ``cells`` is either a mapping ``{(x, m, y): count}`` or the nested JSON
    layout ``{"x1": {"m1y1": ..., ...}, "x0": {...}}``.
    """
    if isinstance(cells, JointTable):
        return cells
    if isinstance(cells, Mapping) and set(cells) <= {"x1", "x0"}:
        return JointTable.from_json_dict(cells)
    return JointTable(dict(cells))


@dataclass(frozen=True)
class MicroRecord:
    """One randomized unit.

    ``y`` and ``m`` are tuples (scalars are wrapped).  A component is observed
    when its value is not ``None`` and the block-level response indicator
    (``r_y`` / ``r_m``) is 1.
    """

    x: int
    y: tuple = ()
    m: tuple = ()
    r_y: int = 1
    r_m: int = 1

    def __post_init__(self):
        _check_binary(self.x, "x")
        if not isinstance(self.y, tuple):
            object.__setattr__(self, "y", (self.y,))
        if not isinstance(self.m, tuple):
            object.__setattr__(self, "m", (self.m,))

    def y_observed(self, i: int) -> bool:
        return bool(self.r_y) and i < len(self.y) and self.y[i] is not None

    def m_observed(self, i: int) -> bool:
        return bool(self.r_m) and i < len(self.m) and self.m[i] is not None


def ingest_microdata(records: Iterable[MicroRecord]) -> JointTable:
    """Tally fully observed binary records into a :class:`JointTable`."""
    counts = dict.fromkeys(CELL_ORDER, 0)
    for rec in records:
        if len(rec.y) != 1 or len(rec.m) != 1:
            raise MissingComponentError("binary tally needs scalar y and m")
        if not (rec.y_observed(0) and rec.m_observed(0)):
            raise MissingComponentError(
                f"record {rec} has an unobserved y or m; use regions.coarsen for missing data"
            )
        y, m = rec.y[0], rec.m[0]
        _check_binary(y, "y")
        _check_binary(m, "m")
        counts[(rec.x, int(m), int(y))] += 1
    return JointTable(counts)


def expand_to_records(table: JointTable) -> list[MicroRecord]:
    """One binary record per counted unit, in :data:`CELL_ORDER`."""
    return [
        MicroRecord(x=x, y=y, m=m)
        for (x, m, y) in CELL_ORDER
        for _ in range(table.counts[(x, m, y)])
    ]


@dataclass(frozen=True)
class ObservedDist:
    """Conditional joint probabilities ``P(Y=y, M=m | X=x)``.

    Values built from counts are :class:`~fractions.Fraction` and sum to one
    exactly; float inputs are accepted and checked to within ``1e-12``.
    """

    probs: Mapping[Cell, Real]
    _check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        probs = {cell: self.probs.get(cell, 0) for cell in CELL_ORDER}
        if self._check:
            for cell, p in probs.items():
                if not 0 <= p <= 1:
                    raise ValueError(f"probability for cell {cell} outside [0, 1]: {p}")
            for x in (1, 0):
                total = sum(probs[(x, m, y)] for m, y in ARM_CELLS)
                exact = all(isinstance(probs[(x, m, y)], (int, Fraction)) for m, y in ARM_CELLS)
                if (exact and total != 1) or (not exact and abs(total - 1) > PROB_TOL):
                    raise ValueError(f"arm X={x} probabilities sum to {total}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_arms(cls, x1: Sequence[Real], x0: Sequence[Real]) -> "ObservedDist":
        probs = {}
        for x, arm in ((1, x1), (0, x0)):
            for (m, y), p in zip(ARM_CELLS, arm):
                probs[(x, m, y)] = p
        return cls(probs)

    def p(self, y: int, m: int, x: int):
        """``P(Y=y, M=m | X=x)``."""
        return self.probs[(x, m, y)]

    def p_m(self, m: int, x: int):
        """``P(M=m | X=x)``."""
        return self.probs[(x, m, 0)] + self.probs[(x, m, 1)]

    def p_y(self, y: int, x: int):
        """``P(Y=y | X=x)``."""
        return self.probs[(x, 0, y)] + self.probs[(x, 1, y)]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(p, (int, Fraction)) for p in self.probs.values())

    def swap_roles(self) -> "ObservedDist":
        return ObservedDist({(x, y, m): p for (x, m, y), p in self.probs.items()}, _check=False)

    def to_float(self) -> "ObservedDist":
        return ObservedDist({c: float(p) for c, p in self.probs.items()}, _check=False)


def estimate_dist(table: JointTable, exact: bool = True) -> ObservedDist:
    """Plug-in estimate ``p(y, m | x) = n(x, m, y) / n_x``."""
    probs = {}
    for x, m, y in CELL_ORDER:
        p = Fraction(table.counts[(x, m, y)], table.n(x))
        probs[(x, m, y)] = p if exact else float(p)
    return ObservedDist(probs)


# -- file formats -----------------------------------------------------------

def read_table_json(path) -> JointTable:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return JointTable.from_json_dict(doc)


def write_table_json(table: JointTable, path=None) -> str:
    text = json.dumps(table.to_json_dict(), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def _parse_value(raw: str):
    raw = raw.strip()
    if raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def _numbered(header, prefix):
    cols = [h for h in header if h.startswith(prefix) and h[len(prefix):].isdigit()]
    return sorted(cols, key=lambda h: int(h[len(prefix):]))


def parse_microdata_csv(text: str) -> list[MicroRecord]:
    """Parse binary (``x,y,m``) or tuple (``x,y1..yk,m1..mk,r_y,r_m``) CSV.

    Empty fields are missing values.
    """
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    if "x" not in header:
        raise ParseError("microdata CSV needs an 'x' column")
    reader.fieldnames = header
    if "y" in header:
        y_cols, m_cols = ["y"], (["m"] if "m" in header else [])
    else:
        y_cols, m_cols = _numbered(header, "y"), _numbered(header, "m")
    if not y_cols:
        raise ParseError("microdata CSV needs a 'y' column or y1..yk columns")
    records = []
    for lineno, row in enumerate(reader, start=2):
        try:
            x = int(row["x"])
            r_y = row.get("r_y")
            r_m = row.get("r_m")
            records.append(MicroRecord(
                x=x,
                y=tuple(_parse_value(row[c] or "") for c in y_cols),
                m=tuple(_parse_value(row[c] or "") for c in m_cols),
                r_y=1 if r_y in (None, "") else int(r_y),
                r_m=1 if r_m in (None, "") else int(r_m),
            ))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return records


def read_microdata_csv(path) -> list[MicroRecord]:
    return parse_microdata_csv(Path(path).read_text())


def yerushalmy() -> JointTable:
    """Maternal smoking (X), low birth weight (M) and infant death (Y) counts."""
    text = resources.files("psdetect.datasets").joinpath("yerushalmy.json").read_text()
    return JointTable.from_json_dict(json.loads(text))
