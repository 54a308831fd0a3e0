"""
One exposure, two outcomes
==========================

A variant affects both a biomarker and a disease in the same person if some
individual's two outcomes both respond to it.  The screen below checks all
four direction combinations on a simulated table.
"""

from psdetect import inference, pleiotropy
from psdetect.data import JointTable

# Z sits in the mediator slot: arms ordered (z1y1, z1y0, z0y1, z0y0)
table = JointTable.from_arms((620, 90, 60, 230), (150, 100, 80, 670))
dist = pleiotropy.PleioDist.from_table(table)

for rep in pleiotropy.pleiotropy_scan(dist):
    c = inference.pleiotropy_contrast(rep.y, rep.m)
    ci = inference.wald_ci(c, table, 0.95, "one-lower")
    print(f"variant {rep.variant}: {float(rep.statistic):+.3f}  lower 95% {ci.lower:+.3f}  {rep.label}")

print(pleiotropy.INDISTINGUISHABLE_NOTE)
