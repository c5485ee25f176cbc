"""Modular cone metric spaces over polyhedral cones in R^m.

Cone order predicates and witnesses (:mod:`modcone.cone`), the nonlinear
scalarization (:mod:`modcone.scalarization`), metric structures and their
auditors (:mod:`modcone.metrics`), topology windows (:mod:`modcone.topology`),
Picard iteration (:mod:`modcone.fixed_point`) and the two-segment
counterexample audit (:mod:`modcone.counterexample`).
"""

from .cone import PolyCone, fixed_cone, orthant
from .metrics import (
    ConeMetricFn,
    ModularConeMetricFn,
    RealModularMetricFn,
    Space,
    convex_from_cone_metric,
    from_cone_metric,
    scalarize,
)
from .report import AuditReport
from .scalarization import ScalarizationContext, xi, xi_oracle

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "ConeMetricFn",
    "ModularConeMetricFn",
    "PolyCone",
    "RealModularMetricFn",
    "ScalarizationContext",
    "Space",
    "convex_from_cone_metric",
    "fixed_cone",
    "from_cone_metric",
    "orthant",
    "scalarize",
    "xi",
    "xi_oracle",
]
