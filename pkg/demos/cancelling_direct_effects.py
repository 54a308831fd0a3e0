"""
Direct effects that cancel on average
=====================================

Half the population is harmed directly by treatment and half is helped, with
the mediator fixed in each half.  Average direct effects are zero, yet the
monotone scan finds both subgroups.
"""

from fractions import Fraction

from psdetect import bounds
from psdetect.counterfactual import CounterfactualDist, average_effects, observed_from_population

# types are (Y1, Y0, M1, M0)
population = CounterfactualDist.from_masses({
    (1, 0, 0, 0): Fraction(1, 2),  # treatment causes Y, mediator stays 0
    (0, 1, 1, 1): Fraction(1, 2),  # treatment prevents Y, mediator stays 1
})

for name, value in average_effects(population).items():
    print(f"average {name:15s} {value}")

observed = observed_from_population(population)

###############################################################################
# Randomization-only contrasts cannot see these effects...

print([str(r.statistic) for r in bounds.instrumental_scan(observed)])

###############################################################################
# ...but under M1 >= M0 two contrasts turn positive, each pointing at one of
# the two types.

for rep in bounds.monotone_scan(observed):
    if rep.detected:
        print(f"D({rep.y},{rep.m}) = {rep.statistic}: {rep.label}, standardized >= {rep.lower_standardized}")
