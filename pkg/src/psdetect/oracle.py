"""Seeded simulation harness checking identities and bound validity exactly.

Every check compares exact rationals computed two ways: from the observed
distribution implied by a finite population, and from the population's
response types directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bounds, counterfactual as cf, pleiotropy, regions
from .bounds import SCAN_ORDER, SensitivityParams


@dataclass
class OracleSummary:
    populations: int = 0
    monotone_populations: int = 0
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    max_randomization_detections: int = 0
    max_monotone_detections: int = 0

    def record(self, name: str, ok: bool, context: str = ""):
        passed, total = self.checks.get(name, (0, 0))
        self.checks[name] = (passed + int(ok), total + 1)
        if not ok and len(self.failures) < 50:
            self.failures.append(f"{name}: {context}")

    @property
    def ok(self) -> bool:
        return all(p == t for p, t in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "populations": self.populations,
            "monotone_populations": self.monotone_populations,
            "checks": {k: {"passed": p, "total": t} for k, (p, t) in sorted(self.checks.items())},
            "max_randomization_detections": self.max_randomization_detections,
            "max_monotone_detections": self.max_monotone_detections,
            "all_passed": self.ok,
            "failures": list(self.failures),
        }


def _standardized_ok(report, cd, y, m) -> bool:
    if report.lower_standardized is None:
        return True
    return report.lower_standardized <= cf.psde(cd, y, m, standardized=True)


def check_general(cd: cf.CounterfactualDist, summary: OracleSummary, tag: str = ""):
    """Checks valid for any population: randomization-only results and sensitivity."""
    obs = cf.observed_from_population(cd)
    detections = 0
    for y, m in SCAN_ORDER:
        ctx = f"{tag} y={y} m={m}"
        s = bounds.randomization_statistic(obs, y, m)
        summary.record("instrumental_identity", s == cf.instrumental_decomposition(cd, y, m), ctx)
        rep = bounds.randomization_bound(obs, y, m)
        summary.record("randomization_bound_valid",
                       rep.statistic <= cf.psde(cd, y, m) and _standardized_ok(rep, cd, y, m), ctx)
        if rep.detected:
            detections += 1
            summary.record("randomization_detection_sound", cd.P(y, 1 - y, m, m) > 0, ctx)

        r, q = cf.true_sensitivity(cd, y, m)
        adj = bounds.sensitivity_adjust(obs, y, m, SensitivityParams(r, q))
        target_y = cf.monotone_target(y, m)[0]
        exact = adj.statistic == cf.psde(cd, target_y, m)
        if cd.stratum_mass(m, m) > 0:
            exact = exact and adj.lower_standardized == cf.psde(cd, target_y, m, standardized=True)
        summary.record("sensitivity_exact", exact, ctx)
    summary.record("at_most_one_randomization_detection", detections <= 1, tag)
    summary.max_randomization_detections = max(summary.max_randomization_detections, detections)

    pcd = pleiotropy.PleioCounterfactual({tuple(t): p for t, p in cd.mass.items()})
    pobs = pcd.observed()
    for v in pleiotropy.VARIANTS:
        stat = pleiotropy.pleiotropy_statistic(pobs, v)
        summary.record("pleiotropy_identity", stat == pleiotropy.pleiotropy_identity(pcd, v), f"{tag} v={v}")
        summary.record("pleiotropy_bound_valid", stat <= pleiotropy.variant_mass(pcd, v), f"{tag} v={v}")

    sp = regions.SetProbabilities.from_binary(obs)
    summary.record("set_identity", regions.set_bound(sp).statistic == regions.set_decomposition(cd), tag)
    r, q = regions.set_true_sensitivity(cd)
    adj = regions.set_sensitivity_adjust(sp, params=SensitivityParams(r, q))
    exact = adj.statistic == regions.set_psde(cd)
    if cd.stratum_mass(1, 1) > 0:
        exact = exact and adj.lower_standardized == regions.set_psde(cd, standardized=True)
    summary.record("set_sensitivity_exact", exact, tag)


def check_monotone(cd: cf.CounterfactualDist, summary: OracleSummary, tag: str = ""):
    """Checks that need ``M1 >= M0``."""
    obs = cf.observed_from_population(cd)
    detections = 0
    for y, m in SCAN_ORDER:
        ctx = f"{tag} y={y} m={m}"
        d = bounds.monotone_statistic(obs, y, m)
        summary.record("monotone_identity", d == cf.monotone_decomposition(cd, y, m), ctx)
        target_y = cf.monotone_target(y, m)[0]
        for mode in bounds.DENOMINATOR_MODES:
            rep = bounds.monotone_bound(obs, y, m, denominator=mode)
            ok = rep.statistic <= cf.psde(cd, target_y, m)
            ok = ok and _standardized_ok(rep, cd, target_y, m)
            summary.record("monotone_bound_valid", ok, f"{ctx} {mode}")
        if d > 0:
            detections += 1
            summary.record("monotone_detection_sound", cd.P(*cf.monotone_target(y, m)) > 0, ctx)
    summary.record("at_most_two_monotone_detections", detections <= 2, tag)
    summary.max_monotone_detections = max(summary.max_monotone_detections, detections)
    summary.record("set_monotone_stratum_exact", obs.p_m(1, 0) == cd.stratum_mass(1, 1), tag)


def run_oracle(seed: int = 0, n_populations: int = 1000, pop_size: int = 100,
               concentration: float = 1.0) -> OracleSummary:
    """Check ``n_populations`` unconstrained and as many positive-monotone populations."""
    summary = OracleSummary()
    seeds = np.random.SeedSequence(seed).spawn(2 * n_populations)
    for i in range(n_populations):
        pop = cf.sample_population(seeds[i], pop_size, concentration=concentration)
        check_general(pop.distribution(), summary, f"population {i}")
        summary.populations += 1
    for i in range(n_populations):
        pop = cf.sample_population(seeds[n_populations + i], pop_size, "positive-monotone",
                                   concentration=concentration)
        cd = pop.distribution()
        check_general(cd, summary, f"monotone population {i}")
        check_monotone(cd, summary, f"monotone population {i}")
        summary.monotone_populations += 1
    return summary


__all__ = ["OracleSummary", "check_general", "check_monotone", "run_oracle"]
