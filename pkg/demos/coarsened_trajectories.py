"""
Continuous and longitudinal measurements
========================================

Birth weight in grams, or a biomarker measured at several visits, reduces to a
binary membership indicator by choosing a region.  The binary machinery then
applies unchanged.
"""

import numpy as np

from psdetect import regions
from psdetect.data import MicroRecord
from psdetect.regions import Box, Categories, CoordCondition, RegionSpec, Span

rng = np.random.default_rng(3)

###############################################################################
# Simulated trial: treatment lowers weight a little; death depends on weight.

records = []
for x in (1, 0):
    for _ in range(4000):
        weight = rng.normal(3300 - 150 * x, 500)
        died = int(rng.random() < (0.03 if weight < 2500 else 0.005) + 0.002 * x)
        records.append(MicroRecord(x, (died,), (round(weight, 1),)))

spec = RegionSpec(
    y_region=Box((CoordCondition(0, Categories({1})),)),
    m_region=Box((CoordCondition(0, Span(0, 2500)),)),  # closed below, open above
)
table = regions.coarsen(records, spec)
print(table.to_json_dict())
print(regions.set_bound(records, spec).to_dict()["statistic"])

###############################################################################
# Trajectories: membership needs every selected visit observed.  A missing
# visit counts as a non-member, which folds the response indicator into the
# region.

spec = regions.trajectory_region(
    y_times=(1, 2), y_conditions={1: Span(None, 5, "both"), 2: Span(None, 5, "both")},
)
for series in [(9.0, 4.2, 4.8), (9.0, 4.2, None), (9.0, 6.1, 4.0)]:
    print(series, regions.membership(MicroRecord(1, series, ()), spec)[0])
