"""Detect and bound individual-level direct effects in randomized studies.

Binary outcome ``Y``, mediator ``M`` and randomized treatment ``X``: the
package tests whether some individual's outcome responds to treatment while
the mediator does not, and bounds the size of that subgroup effect.
"""
from .bounds import (
    BoundReport,
    SensitivityParams,
    instrumental_scan,
    monotone_bound,
    monotone_scan,
    randomization_bound,
    randomization_only_params,
    sensitivity_adjust,
    sensitivity_sweep,
)
from .counterfactual import (
    CounterfactualDist,
    FinitePopulation,
    ResponseType,
    observed_from_population,
    psde,
    sample_population,
)
from .data import JointTable, MicroRecord, ObservedDist, estimate_dist, ingest_table, yerushalmy
from .errors import PsdetectError
from .inference import bootstrap_ci, test_null, wald_ci
from .pleiotropy import pleiotropy_identity, pleiotropy_test
from .regions import RegionSpec, coarsen, set_bound, set_monotone_bound, set_sensitivity_adjust

__version__ = "0.1.0"
