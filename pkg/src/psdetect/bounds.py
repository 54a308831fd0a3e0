"""Detection scans and lower bounds for principal stratum direct effects.

Two observable contrasts drive everything here:

``S(y, m) = P(Y=y, M=m | X=1) + P(Y=1-y, M=m | X=0) - 1``
    Positive only if some individual has ``Y1=y, Y0=1-y, M1=M0=m``; needs
    randomization alone.

``D(y, m) = P(Y=1-y, M=m | X=1-m) - P(Y=1-y, M=m | X=m)``
    Positive only if the type returned by
    :func:`~psdetect.counterfactual.monotone_target` exists; additionally needs
    treatment never to prevent the mediator (``M1 >= M0``).

All arithmetic follows the input: exact distributions give exact
:class:`~fractions.Fraction` results.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

from .counterfactual import monotone_target
from .data import ObservedDist, as_fraction
from .errors import DegenerateDenominatorError, ParamOutOfRangeError

log = logging.getLogger(__name__)

SCAN_ORDER = ((1, 1), (0, 1), (1, 0), (0, 0))

DENOMINATOR_MODES = ("control-arm", "exact-monotone")

BASIS_RANDOMIZATION = "instrumental-inequality contrast (randomization only)"
BASIS_MONOTONE = "monotone contrast (randomization + M1 >= M0)"
BASIS_SENSITIVITY = "sensitivity-adjusted monotone contrast (r, q)"


def _fmt(v):
    if v is None:
        return None
    return float(v)


def _exact(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    return None


def stratum_label(y1: int, y0: int, m: int, outcome: str = "Y", mediator: str = "M") -> str:
    verb = "causes" if y1 > y0 else "prevents"
    return f"treatment {verb} {outcome} within stratum {mediator}1={mediator}0={m}"


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one detection/bounding computation.

    ``detected`` is ``statistic > 0`` with no tolerance; sampling uncertainty
    lives in ``ci`` / ``p_value`` when inference has been attached.
    """

    y: int
    m: int
    label: str
    basis: str
    statistic: object
    detected: bool
    lower_unstandardized: object
    lower_standardized: object = None
    denominator: object = None
    mode: Optional[str] = None
    roles: str = "standard"
    clamped: bool = False
    monotone_assumed: bool = False
    variant: Optional[int] = None
    ci: object = None
    p_value: Optional[float] = None
    notes: tuple = ()

    def with_inference(self, ci=None, p_value=None) -> "BoundReport":
        return replace(self, ci=ci, p_value=p_value)

    def to_dict(self) -> dict:
        target = {"y": self.y, "m": self.m, "label": self.label}
        if self.variant is not None:
            target["variant"] = self.variant
        doc = {
            "target": target,
            "basis": self.basis,
            "statistic": _fmt(self.statistic),
            "statistic_exact": _exact(self.statistic),
            "detected": self.detected,
            "lower_unstd": _fmt(self.lower_unstandardized),
            "lower_std": _fmt(self.lower_standardized),
            "denominator": _fmt(self.denominator),
            "mode": self.mode,
            "roles": self.roles,
            "clamped": self.clamped,
            "monotone_assumed": self.monotone_assumed,
        }
        if self.ci is not None:
            doc["ci"] = self.ci.to_dict()
        if self.p_value is not None:
            doc["p_value"] = self.p_value
        if self.notes:
            doc["notes"] = list(self.notes)
        return doc


def _clamp(statistic, clamp: bool, notes: list):
    if statistic >= 0:
        return statistic, False
    if clamp:
        notes.append("negative statistic clamped to the trivial lower bound 0")
        return type(statistic)(0), True
    notes.append("statistic is negative; 0 is the trivial lower bound (raw value kept)")
    return statistic, False


# -- randomization only -----------------------------------------------------

def randomization_statistic(dist: ObservedDist, y: int, m: int):
    """``S(y, m)``."""
    return dist.p(y, m, 1) + dist.p(1 - y, m, 0) - 1


def randomization_bound(dist: ObservedDist, y: int, m: int, clamp: bool = False,
                        names=("Y", "M")) -> BoundReport:
    """Lower bounds on the stratum effect for ``Y1=y, Y0=1-y, M1=M0=m``.

    ``S(y, m)`` lower-bounds ``P_c(y,1-y,m,m) - P_c(1-y,y,m,m)``.  When
    ``S > 0`` it is divided by ``P(M=m|X=1) - P(M=1-m|X=0)`` to lower-bound
    the standardized effect; otherwise no standardized value is emitted.
    """
    s = randomization_statistic(dist, y, m)
    den = dist.p_m(m, 1) - dist.p_m(1 - m, 0)
    notes = []
    std = None
    if s > 0:
        if den <= 0:
            raise DegenerateDenominatorError(
                f"S({y},{m}) > 0 but P(M={m}|X=1) - P(M={1 - m}|X=0) = {den} <= 0; "
                "input is not a valid distribution"
            )
        std = s / den
    else:
        notes.append("statistic <= 0: standardized bound not emitted")
    lower, clamped = _clamp(s, clamp, notes)
    return BoundReport(
        y=y, m=m, label=stratum_label(y, 1 - y, m, *names), basis=BASIS_RANDOMIZATION,
        statistic=s, detected=s > 0, lower_unstandardized=lower,
        lower_standardized=std, denominator=den, mode="randomization",
        clamped=clamped, notes=tuple(notes),
    )


def instrumental_scan(dist: ObservedDist, clamp: bool = False) -> list[BoundReport]:
    """Randomization-only bounds for all four ``(y, m)``; at most one can be positive."""
    return [randomization_bound(dist, y, m, clamp=clamp) for y, m in SCAN_ORDER]


# -- positive monotonicity ----------------------------------------------------

def monotone_statistic(dist: ObservedDist, y: int, m: int):
    """``D(y, m)``."""
    return dist.p(1 - y, m, 1 - m) - dist.p(1 - y, m, m)


def monotone_denominator(dist: ObservedDist, m: int, mode: str = "control-arm"):
    """Stratum-mass upper bound used to standardize ``D(y, m)``.

    ``control-arm`` uses ``P(M=m | X=0)``.  ``exact-monotone`` uses
    ``P(M=1 | X=0)`` for ``m = 1`` and ``P(M=0 | X=1)`` for ``m = 0``; under
    ``M1 >= M0`` both equal ``P(M1 = M0 = m)`` exactly.  The two coincide for
    ``m = 1``.
    """
    if mode == "control-arm":
        return dist.p_m(m, 0)
    if mode == "exact-monotone":
        return dist.p_m(1, 0) if m == 1 else dist.p_m(0, 1)
    raise ValueError(f"denominator mode must be one of {DENOMINATOR_MODES}, got {mode!r}")


def monotone_bound(dist: ObservedDist, y: int, m: int, denominator: str = "control-arm",
                   roles: str = "standard", clamp: bool = False) -> BoundReport:
    """Lower bounds on the stratum effect detected by ``D(y, m)``.

    ``roles="swapped"`` interchanges mediator and outcome before computing, so
    the assumption becomes ``Y1 >= Y0`` and the target is a stratum of ``Y``.
    """
    if roles == "swapped":
        dist = dist.swap_roles()
        names = ("M", "Y")
    elif roles == "standard":
        names = ("Y", "M")
    else:
        raise ValueError(f"roles must be 'standard' or 'swapped', got {roles!r}")
    d = monotone_statistic(dist, y, m)
    den = monotone_denominator(dist, m, denominator)
    notes = []
    std = None
    if d > 0:
        if den == 0:
            raise DegenerateDenominatorError(f"D({y},{m}) > 0 but its denominator is 0")
        std = d / den
        other_mode = DENOMINATOR_MODES[1 - DENOMINATOR_MODES.index(denominator)]
        other = monotone_denominator(dist, m, other_mode)
        if other != den:
            alt = d / other if other > 0 else None
            msg = f"{other_mode} denominator {float(other):.6g} gives standardized bound {_fmt(alt)}"
            notes.append(msg)
            log.info("monotone_bound(y=%d, m=%d): %s", y, m, msg)
    else:
        notes.append("statistic <= 0: standardized bound not emitted")
    lower, clamped = _clamp(d, clamp, notes)
    a, b, _, _ = monotone_target(y, m)
    return BoundReport(
        y=y, m=m, label=stratum_label(a, b, m, *names), basis=BASIS_MONOTONE,
        statistic=d, detected=d > 0, lower_unstandardized=lower,
        lower_standardized=std, denominator=den, mode=denominator, roles=roles,
        clamped=clamped, monotone_assumed=True, notes=tuple(notes),
    )


def monotone_scan(dist: ObservedDist, denominator: str = "control-arm",
                  roles: str = "standard", clamp: bool = False) -> list[BoundReport]:
    """Monotone bounds for all four ``(y, m)``; at most two can be positive."""
    return [monotone_bound(dist, y, m, denominator, roles, clamp) for y, m in SCAN_ORDER]


# -- sensitivity to monotonicity violations -------------------------------------

@dataclass(frozen=True)
class SensitivityParams:
    """``r``: signed mass of stratum-switching types entering ``D``.
    ``q``: ``P(M1 = m, M0 != m)``.
    """

    r: object
    q: object


def _coerce(value, exact: bool):
    return as_fraction(value) if exact else float(value)


def sensitivity_adjust(dist: ObservedDist, y: int, m: int, params: SensitivityParams) -> BoundReport:
    """Point values of the stratum effect given sensitivity parameters.

    With the true ``(r, q)`` of the population, ``D(y, m) - r`` is the
    unstandardized effect and ``(D - r) / (P(M=m|X=1) - q)`` the standardized
    one, exactly.
    """
    exact = dist.is_exact
    r, q = _coerce(params.r, exact), _coerce(params.q, exact)
    pm1 = dist.p_m(m, 1)
    if not -1 <= r <= 1:
        raise ParamOutOfRangeError(f"r={params.r} outside [-1, 1]")
    if not 0 <= q <= pm1:
        raise ParamOutOfRangeError(f"q={params.q} outside [0, P(M={m}|X=1)={float(pm1):.6g}]")
    d = monotone_statistic(dist, y, m)
    adjusted = d - r
    den = pm1 - q
    notes = [f"unadjusted D={float(d):.6g}, r={float(r):.6g}, q={float(q):.6g}"]
    if r > d:
        notes.append("r exceeds D: adjusted effect is negative")
    std = None
    if den > 0:
        std = adjusted / den
    else:
        notes.append("q equals P(M=m|X=1): stratum mass is zero, standardized value undefined")
    a, b, _, _ = monotone_target(y, m)
    return BoundReport(
        y=y, m=m, label=stratum_label(a, b, m), basis=BASIS_SENSITIVITY,
        statistic=adjusted, detected=adjusted > 0, lower_unstandardized=adjusted,
        lower_standardized=std, denominator=den, mode="sensitivity", notes=tuple(notes),
    )


def randomization_only_params(dist: ObservedDist, y: int, m: int) -> SensitivityParams:
    """The conservative ``(r, q)`` that turn the monotone contrast back into ``S``.

    ``r = P(M=1-m | X=m)`` and ``q = P(M=1-m | X=0)``; then
    ``sensitivity_adjust(dist, y, m, ...)`` reproduces
    ``randomization_bound(dist, y', m)`` where ``y'`` is the outcome value of
    ``monotone_target(y, m)``.
    """
    return SensitivityParams(r=dist.p_m(1 - m, m), q=dist.p_m(1 - m, 0))


@dataclass(frozen=True)
class SweepCell:
    r: object
    q: object
    report: Optional[BoundReport] = None
    error: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.report is not None


def sensitivity_sweep(dist: ObservedDist, y: int, m: int,
                      r_grid: Iterable, q_grid: Iterable) -> list[SweepCell]:
    """Evaluate :func:`sensitivity_adjust` over a grid; invalid cells are marked, not raised."""
    cells = []
    q_values = list(q_grid)
    for r in r_grid:
        for q in q_values:
            try:
                rep = sensitivity_adjust(dist, y, m, SensitivityParams(r, q))
            except ParamOutOfRangeError as exc:
                cells.append(SweepCell(r, q, error=str(exc)))
            else:
                cells.append(SweepCell(r, q, report=rep))
    return cells


__all__ = [
    "BoundReport", "SensitivityParams", "SweepCell", "SCAN_ORDER",
    "randomization_statistic", "randomization_bound", "instrumental_scan",
    "monotone_statistic", "monotone_denominator", "monotone_bound", "monotone_scan",
    "sensitivity_adjust", "randomization_only_params", "sensitivity_sweep",
    "stratum_label",
]
