"""
How much can monotonicity fail?
===============================

A monotone detection leans on the mediator never being prevented by
treatment.  Sweeping the sensitivity parameters shows how large a violation
would have to be to erase the finding.
"""

from fractions import Fraction

from psdetect import bounds
from psdetect.counterfactual import FinitePopulation, monotone_psde, observed_from_population, true_sensitivity

# a population with some mediator "defiers" (M1=0, M0=1)
pop = FinitePopulation({"1011": 40, "0011": 20, "0000": 25, "1101": 5, "0001": 10})
obs = observed_from_population(pop)

d = bounds.monotone_statistic(obs, 1, 1)
print(f"monotone contrast D(1,1) = {d} (true stratum effect {monotone_psde(pop, 1, 1)})")

###############################################################################
# With the population in hand we can read off the exact (r, q) and confirm the
# adjustment recovers the truth.

r, q = true_sensitivity(pop, 1, 1)
exact = bounds.sensitivity_adjust(obs, 1, 1, bounds.SensitivityParams(r, q))
print(f"true r = {r}, q = {q}: adjusted {exact.statistic}, standardized {exact.lower_standardized}")

###############################################################################
# In practice (r, q) are unknown.  A grid shows where the adjusted effect
# crosses zero.

grid = [Fraction(k, 20) for k in range(-2, 6)]
for cell in bounds.sensitivity_sweep(obs, 1, 1, grid, [0, Fraction(1, 10)]):
    if cell.valid:
        std = cell.report.lower_standardized
        print(f"r={float(cell.r):+.2f} q={float(cell.q):.2f}  adjusted {float(cell.report.statistic):+.3f}"
              f"  standardized {float(std):+.3f}")
