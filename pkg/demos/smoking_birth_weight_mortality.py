"""
Smoking, low birth weight and infant death
==========================================

Does maternal smoking affect infant mortality in some babies whose birth
weight it does not change?  This walks through the bundled 1964 cohort table
with the randomization-only scan, the monotone scan, and the role-swapped
analysis, then attaches Wald intervals.

Smoking was not randomized in this cohort, so treat the numbers as an
illustration of the machinery rather than causal findings.
"""

from psdetect import bounds, inference
from psdetect.data import estimate_dist, yerushalmy

table = yerushalmy()
dist = estimate_dist(table)
print("arm totals:", table.n1, "smokers,", table.n0, "non-smokers")

###############################################################################
# The naive comparison conditions on low birth weight, which is a post-treatment
# variable.  Among low-weight babies, smokers' infants die less often.

crd = inference.conditional_risk_difference(1, 1)
ci = inference.wald_ci(crd, table, 0.95, "two")
print(f"P(death | smoker, LBW) - P(death | non-smoker, LBW) = {float(crd.estimate(table)):.4f}"
      f"  95% CI ({ci.lower:.3f}, {ci.upper:.3f})")

###############################################################################
# Randomization alone: all four contrasts are negative, so nothing is detected.

for rep in bounds.instrumental_scan(dist):
    print(f"  S({rep.y},{rep.m}) = {float(rep.statistic):+.4f}  {rep.label}")

###############################################################################
# Assuming smoking never prevents low birth weight (M1 >= M0) sharpens the
# contrasts.  One point estimate creeps above zero but is far from significant.

for rep in bounds.monotone_scan(dist):
    c = inference.monotone_contrast(rep.y, rep.m)
    p = inference.test_null(c, table)
    print(f"  D({rep.y},{rep.m}) = {float(rep.statistic):+.5f}  p = {p:.3f}  {rep.label}")

###############################################################################
# Swapping the roles asks the reverse question: does smoking cause low birth
# weight among babies who would survive either way?  This needs smoking never
# to prevent death.

rep = bounds.monotone_bound(dist, 0, 0, roles="swapped")
ci = inference.wald_ci(inference.swapped_monotone_contrast(0, 0), table, 0.95, "one-lower")
print(f"{rep.label}: {float(rep.statistic):.3f}, one-sided 95% CI ({ci.lower:.3f}, 1)")
