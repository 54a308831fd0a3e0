"""Wald intervals, one-sided tests and bootstrap intervals for table contrasts.

A :class:`Contrast` is a linear combination of cell probabilities from the two
independent arms, optionally conditioned on a set of cells within each arm.
Within an arm the variance uses the multinomial covariance
``cov(p_a, p_b) = -p_a p_b / n``, so sums and differences of cells from the
same arm are handled correctly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Mapping, Optional

import numpy as np

from .data import ARM_CELLS, JointTable
from .errors import ZeroVarianceError

_STD_NORMAL = NormalDist()

SIDES = ("two", "one-lower", "one-upper")


class ZeroVarianceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Term:
    """``coef * P((M, Y) in cells | X = x [, given])``."""

    coef: int
    x: int
    cells: frozenset


@dataclass(frozen=True)
class Contrast:
    terms: tuple
    constant: Fraction = Fraction(0)
    given: Optional[Mapping[int, frozenset]] = None
    name: str = ""

    def _weights(self, x: int) -> dict:
        w = {cell: 0 for cell in ARM_CELLS}
        for t in self.terms:
            if t.x == x:
                for cell in t.cells:
                    w[cell] += t.coef
        return w

    def _support(self, x: int) -> tuple:
        if self.given and x in self.given:
            return tuple(c for c in ARM_CELLS if c in self.given[x])
        return ARM_CELLS

    def arm_parts(self, table: JointTable, x: int):
        """Per-arm ``(weights, counts, n)`` restricted to the conditioning set."""
        support = self._support(x)
        w = self._weights(x)
        counts = [table.counts[(x, m, y)] for (m, y) in support]
        return [w[c] for c in support], counts, sum(counts)

    def estimate(self, table: JointTable) -> Fraction:
        total = Fraction(self.constant)
        for x in (1, 0):
            weights, counts, n = self.arm_parts(table, x)
            if any(weights):
                if n == 0:
                    raise ZeroDivisionError(f"conditioning set is empty in arm X={x}")
                total += Fraction(sum(w * c for w, c in zip(weights, counts)), n)
        return total

    def variance(self, table: JointTable) -> float:
        var = 0.0
        for x in (1, 0):
            weights, counts, n = self.arm_parts(table, x)
            if not any(weights):
                continue
            p = np.asarray(counts, dtype=float) / n
            w = np.asarray(weights, dtype=float)
            var += (np.sum(w * w * p) - np.sum(w * p) ** 2) / n
        return max(var, 0.0)

    def se(self, table: JointTable) -> float:
        return math.sqrt(self.variance(table))


def _cells(*pairs) -> frozenset:
    return frozenset(pairs)


def randomization_contrast(y: int, m: int) -> Contrast:
    """``P(Y=y, M=m | X=1) + P(Y=1-y, M=m | X=0) - 1``."""
    return Contrast(
        terms=(Term(1, 1, _cells((m, y))), Term(1, 0, _cells((m, 1 - y)))),
        constant=Fraction(-1), name=f"S({y},{m})",
    )


def monotone_contrast(y: int, m: int) -> Contrast:
    """``P(Y=1-y, M=m | X=1-m) - P(Y=1-y, M=m | X=m)``."""
    return Contrast(
        terms=(Term(1, 1 - m, _cells((m, 1 - y))), Term(-1, m, _cells((m, 1 - y)))),
        name=f"D({y},{m})",
    )


def swapped_monotone_contrast(y: int, m: int) -> Contrast:
    """The monotone contrast with the roles of mediator and outcome interchanged."""
    # after swapping, the new (m', y') cell is the original (y', m')
    return Contrast(
        terms=(Term(1, 1 - m, _cells((1 - y, m))), Term(-1, m, _cells((1 - y, m)))),
        name=f"D_swapped({y},{m})",
    )


def conditional_risk_difference(y: int = 1, m: int = 1) -> Contrast:
    """``P(Y=y | X=1, M=m) - P(Y=y | X=0, M=m)``."""
    stratum = _cells((m, 0), (m, 1))
    return Contrast(
        terms=(Term(1, 1, _cells((m, y))), Term(-1, 0, _cells((m, y)))),
        given={1: stratum, 0: stratum}, name=f"RD(Y={y}|M={m})",
    )


def pleiotropy_contrast(a: int, b: int) -> Contrast:
    """``P(Y=a, Z=b | X=1) + P(Y=1-a, Z=1-b | X=0) - 1`` on a table whose
    mediator slot holds ``Z``."""
    return Contrast(
        terms=(Term(1, 1, _cells((b, a))), Term(1, 0, _cells((1 - b, 1 - a)))),
        constant=Fraction(-1), name=f"pleiotropy({a},{b})",
    )


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    level: float
    sided: str
    estimate: float
    se: float
    method: str = "wald"
    degenerate: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"interval lower {self.lower} exceeds upper {self.upper}")

    def to_dict(self) -> dict:
        return {
            "lower": round(self.lower, 4),
            "upper": round(self.upper, 4),
            "level": self.level,
            "sided": self.sided,
            "method": self.method,
            "degenerate": self.degenerate,
        }


def z_value(level: float, sided: str) -> float:
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if sided == "two":
        return _STD_NORMAL.inv_cdf(1 - (1 - level) / 2)
    if sided in ("one-lower", "one-upper"):
        return _STD_NORMAL.inv_cdf(level)
    raise ValueError(f"sided must be one of {SIDES}, got {sided!r}")


def _limits(est: float, half: float, sided: str, bound: float):
    if sided == "two":
        return est - half, est + half
    if sided == "one-lower":
        return est - half, max(bound, est)
    return min(-bound, est), est + half


def wald_ci(contrast: Contrast, table: JointTable, level: float = 0.95,
            sided: str = "two", bound: float = 1.0) -> Interval:
    """Normal-approximation interval ``estimate -/+ z * SE``.

    One-sided intervals put the open end at ``+/- bound`` (1 for differences
    of probabilities).  A zero standard error collapses the interval to the
    point estimate and is flagged with :class:`ZeroVarianceWarning`.
    """
    z = z_value(level, sided)
    est = float(contrast.estimate(table))
    se = contrast.se(table)
    degenerate = se == 0
    if degenerate:
        warnings.warn(f"{contrast.name or 'contrast'} has zero standard error", ZeroVarianceWarning)
    lo, hi = _limits(est, z * se, sided, bound)
    return Interval(lo, hi, level, sided, est, se, degenerate=degenerate)


def p_value_from_z(statistic: float, se: float) -> float:
    """One-sided p-value for ``H0: statistic <= 0``."""
    if se <= 0:
        raise ZeroVarianceError("standard error is zero; the z-test is undefined")
    return _STD_NORMAL.cdf(-statistic / se)


def test_null(contrast: Contrast, table: JointTable) -> float:
    """One-sided z-test p-value of ``H0: contrast <= 0`` against ``> 0``."""
    return p_value_from_z(float(contrast.estimate(table)), contrast.se(table))


test_null.__test__ = False  # keep pytest from collecting it


def bootstrap_ci(contrast: Contrast, table: JointTable, level: float = 0.95,
                 sided: str = "two", replicates: int = 2000, seed=0,
                 bound: float = 1.0) -> Interval:
    """Percentile interval over independent multinomial resamples of each arm."""
    if replicates < 100:
        raise ValueError("use at least 100 bootstrap replicates")
    z_value(level, sided)
    rng = np.random.default_rng(seed)
    draws = np.full(replicates, float(contrast.constant))
    for x in (1, 0):
        w_all = contrast._weights(x)
        if not any(w_all.values()):
            continue
        counts = np.array([table.counts[(x, m, y)] for m, y in ARM_CELLS])
        n = counts.sum()
        sample = rng.multinomial(n, counts / n, size=replicates)
        support = np.array([c in contrast._support(x) for c in ARM_CELLS])
        w = np.array([w_all[c] for c in ARM_CELLS], dtype=float)
        denom = (sample * support).sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            draws += (sample * support) @ w / denom
    draws = draws[np.isfinite(draws)]
    est = float(contrast.estimate(table))
    alpha = 1 - level
    if sided == "two":
        lo, hi = np.quantile(draws, [alpha / 2, 1 - alpha / 2])
    elif sided == "one-lower":
        lo, hi = np.quantile(draws, alpha), max(bound, est)
    else:
        lo, hi = min(-bound, est), np.quantile(draws, 1 - alpha)
    return Interval(float(lo), float(hi), level, sided, est, float(np.std(draws, ddof=1)),
                    method="bootstrap", degenerate=bool(np.ptp(draws) == 0))


__all__ = [
    "Contrast", "Term", "Interval", "ZeroVarianceWarning", "randomization_contrast",
    "monotone_contrast", "swapped_monotone_contrast", "conditional_risk_difference",
    "pleiotropy_contrast", "z_value", "wald_ci", "test_null", "p_value_from_z",
    "bootstrap_ci",
]
