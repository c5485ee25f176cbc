"""Named built-in audits and maps, selectable from the command line.

A config file is JSON with a ``builtin`` name and optional overrides::

    {"builtin": "phi-scaled", "cone": {"halfspaces": [[1, 0], [1, 1]]},
     "space": {"kind": "interval", "low": -3, "high": 3}}

``cone`` may also be the name of a fixed cone (``"wedge2"``, ``"orthant3"``...).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import counterexample as cx
from .cone import ConeError, PolyCone, fixed_cone, orthant
from .fixed_point import ContractionSpec
from .metrics import (
    ConeMetricFn,
    ConstructionWarning,
    ModularConeMetricFn,
    Space,
    abs_cone_metric,
    audit_cone_metric,
    audit_convex_axioms,
    audit_modular_cone_axioms,
    audit_real_modular,
    convex_from_cone_metric,
    from_cone_metric,
    grid,
    interval,
    real_line,
    scalarize,
    squared_cone_metric,
)
from .report import AuditReport
from .scalarization import ScalarizationContext, audit_scalarization, xi


class ConfigError(ValueError):
    pass


def _cone(spec) -> PolyCone:
    if spec is None:
        return orthant(2)
    try:
        if isinstance(spec, str):
            return fixed_cone(spec)
        return PolyCone.from_dict(spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad cone: {exc}") from exc


def _space(spec, default: Space) -> Space:
    if spec is None:
        return default
    kind = spec.get("kind")
    try:
        if kind == "real-line":
            return real_line(float(spec.get("scale", 5.0)))
        if kind == "interval":
            return interval(float(spec["low"]), float(spec["high"]))
        if kind == "grid":
            return grid(float(spec["low"]), float(spec["high"]), int(spec["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad space: {exc}") from exc
    raise ConfigError(f"unknown space kind {kind!r}")


def _broken_phi(d: ConeMetricFn) -> ModularConeMetricFn:
    ctx = ScalarizationContext.default(d.cone)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstructionWarning)
        return from_cone_metric(d, phi=lambda c: xi(ctx, c), name="broken-phi")


def _zero_modular(cone: PolyCone) -> ModularConeMetricFn:
    return ModularConeMetricFn(lambda c, x, y: np.zeros(cone.dim), cone, name="zero")


AuditFn = Callable[[int, int], AuditReport]


def audit_builtin(name: str, cone=None, space=None) -> AuditFn:
    """Return ``run(seed, samples) -> AuditReport`` for a named built-in."""
    P = _cone(cone)
    line = _space(space, real_line())

    if name == "scalarization":
        ctx = ScalarizationContext.default(P)
        return lambda seed, n: audit_scalarization(ctx, n, seed)
    if name == "cone-metric":
        return lambda seed, n: audit_cone_metric(abs_cone_metric(P), line, n, seed)
    if name == "squared-metric":
        return lambda seed, n: audit_cone_metric(squared_cone_metric(P), line, n, seed)
    if name == "phi-scaled":
        w = from_cone_metric(abs_cone_metric(P))
        return lambda seed, n: audit_modular_cone_axioms(w, line, n, seed)
    if name == "broken-phi":
        w = _broken_phi(abs_cone_metric(P))
        return lambda seed, n: audit_modular_cone_axioms(w, line, n, seed)
    if name == "zero-modular":
        pair = _space(space, Space("two-points", points=(0.0, 1.0)))
        return lambda seed, n: audit_modular_cone_axioms(_zero_modular(P), pair, n, seed)
    if name == "pointwise-quotient":
        w = _convex(P)
        return lambda seed, n: audit_convex_axioms(w, line, n, seed)
    if name == "scalarized-phi-scaled":
        W = scalarize(from_cone_metric(abs_cone_metric(P)))
        return lambda seed, n: audit_real_modular(W, line, n, convex=False, seed=seed)
    if name == "scalarized-quotient":
        W = scalarize(_convex(P), e=np.ones(P.dim))
        return lambda seed, n: audit_real_modular(W, line, n, convex=True, seed=seed)
    if name == "two-segment":
        return lambda seed, n: audit_real_modular(cx.SEGMENT_W, cx.segment_space(), n, convex=False, seed=seed)
    raise ConfigError(f"unknown builtin {name!r}; choose from {', '.join(AUDIT_BUILTINS)}")


def _convex(P: PolyCone) -> ModularConeMetricFn:
    try:
        return convex_from_cone_metric(abs_cone_metric(P, direction=np.ones(P.dim)))
    except ConeError as exc:
        raise ConfigError(str(exc)) from exc


AUDIT_BUILTINS = (
    "scalarization", "cone-metric", "squared-metric", "phi-scaled", "broken-phi",
    "zero-modular", "pointwise-quotient", "scalarized-phi-scaled", "scalarized-quotient", "two-segment",
)


@dataclass(frozen=True)
class IterationSetup:
    spec: ContractionSpec
    w: ModularConeMetricFn
    space: Space


def iteration_builtin(name: str = "half-shift", k: float = 0.75, c0=None, slope=None,
                      shift=None, m: int = 2) -> IterationSetup:
    """Affine maps ``T(x) = slope x + shift`` on ``R`` under the pointwise-quotient modular."""
    defaults = {"half-shift": (0.5, 1.0), "identity": (1.0, 0.0), "affine": (0.5, 0.0)}
    if name not in defaults:
        raise ConfigError(f"unknown map {name!r}; choose from {', '.join(defaults)}")
    a0, b0 = defaults[name]
    a = a0 if slope is None else float(slope)
    b = b0 if shift is None else float(shift)

    def T(x):
        return a * x + b

    T.__name__ = name
    P = orthant(m)
    c0 = np.ones(m) if c0 is None else np.asarray(c0, dtype=float)
    try:
        spec = ContractionSpec(T, float(k), c0, name=name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return IterationSetup(spec, _convex(P), real_line())


def load_config(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data
