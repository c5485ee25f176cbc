"""Nonlinear scalarization ``xi_e(y) = inf{r : y in r e - P}``.

For a halfspace cone ``P = {A y >= 0}`` and interior ``e`` the infimum is
explicit::

    r e - y in P   <=>   r (A e)_j >= (A y)_j  for every facet j
    xi_e(y) = max_j (A y)_j / (A e)_j

:func:`xi_oracle` recovers the same number by bisection on ``r`` using only
cone membership, and serves as the independent check of :func:`xi`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone import ConeError, PolyCone, as_vector, sample_cone, sup_norm
from .report import AuditReport

THRESHOLD_EPS = 1e-6
EXACT_RTOL = 1e-12


class ScalarizationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScalarizationContext:
    cone: PolyCone
    e: np.ndarray

    def __post_init__(self):
        e = as_vector(self.e, self.cone.dim)
        Ae = self.cone.halfspaces @ e
        if not np.all(Ae > 0):
            raise ConeError(f"scalarization direction {e!r} is not interior")
        e = e.copy()
        e.flags.writeable = False
        Ae.flags.writeable = False
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "_Ae", Ae)

    @classmethod
    def default(cls, cone: PolyCone) -> "ScalarizationContext":
        return cls(cone, cone.slater_point)

    @property
    def lipschitz(self) -> float:
        """Sup-norm Lipschitz constant ``max_j sum_i |A_ji| / (A e)_j``."""
        return float(np.max(np.abs(self.cone.halfspaces).sum(axis=1) / self._Ae))

    def __call__(self, y) -> float:
        return xi(self, y)


def xi(ctx: ScalarizationContext, y) -> float:
    y = as_vector(y, ctx.cone.dim)
    return float(np.max((ctx.cone.halfspaces @ y) / ctx._Ae))


def xi_oracle(ctx: ScalarizationContext, y, tol: float = 0.0, max_iter: int = 400) -> float:
    """Bisection for the least ``r`` with ``r e - y in P`` (membership tests only).

    With the default ``tol = 0`` the bracket is halved until its midpoint no
    longer moves, so the result is as fine as floating point allows.
    """
    y = as_vector(y, ctx.cone.dim)
    e = ctx.e
    bound = 1.0 + sup_norm(y) * ctx.lipschitz
    lo, hi = -bound, bound
    if not ctx.cone.contains(hi * e - y) or ctx.cone.contains(lo * e - y):
        raise ScalarizationError(f"bisection bracket [{lo}, {hi}] does not enclose xi({y!r})")
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if ctx.cone.contains(mid * e - y):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _close(a: float, b: float, rtol: float = EXACT_RTOL) -> bool:
    return abs(a - b) <= rtol * (1.0 + abs(a) + abs(b))


def audit_scalarization(
    ctx: ScalarizationContext, sample_count: int, seed: int = 0, eps: float = THRESHOLD_EPS
) -> AuditReport:
    """Randomized check of the five scalarization properties plus a continuity proxy.

    (i)   ``xi(y) <= r  <=>  r e - y in P``
    (ii)  ``xi(y) <  r  <=>  r e - y in int P``
    (iii) ``xi(t y) = t xi(y)`` for ``t >= 0``
    (iv)  ``y1 in y2 + P  =>  xi(y2) <= xi(y1)``
    (v)   ``xi(y1 + y2) <= xi(y1) + xi(y2)``

    The threshold laws are probed at ``r = xi(y) +/- eps`` and at random
    ``r`` at least ``eps`` away from ``xi(y)``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    cone, e = ctx.cone, ctx.e
    m = cone.dim
    rng = np.random.default_rng(seed)
    ys = rng.normal(scale=3.0, size=(sample_count, m))
    y2s = rng.normal(scale=3.0, size=(sample_count, m))
    ps = sample_cone(cone, rng, sample_count, scale=2.0)
    ts = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=sample_count))
    ts[::10] = 0.0
    gaps = eps + np.abs(rng.normal(scale=2.0, size=sample_count))
    signs = rng.choice([-1.0, 1.0], size=sample_count)
    L = ctx.lipschitz

    report = AuditReport(subject=f"scalarization[{cone.name}]", seed=seed)
    c_le = report.add("i_threshold_le")
    c_lt = report.add("ii_threshold_lt")
    c_hom = report.add("iii_positive_homogeneity")
    c_mono = report.add("iv_monotonicity")
    c_sub = report.add("v_subadditivity")
    c_lip = report.add("continuity_lipschitz")

    for y, y2, p, t, gap, sgn in zip(ys, y2s, ps, ts, gaps, signs):
        v = xi(ctx, y)
        for r in (v + eps, v - eps, v + sgn * gap):
            payload = {"y": y, "r": r, "xi": v}
            c_le.record((v <= r) == cone.contains(r * e - y), payload)
            c_lt.record((v < r) == cone.interior_contains(r * e - y), payload)
        lhs, rhs = xi(ctx, t * y), t * v
        c_hom.record(_close(lhs, rhs), {"y": y, "t": t, "xi_ty": lhs, "t_xi_y": rhs})
        lo, hi = xi(ctx, y), xi(ctx, y + p)
        c_mono.record(lo <= hi + EXACT_RTOL * (1 + abs(lo) + abs(hi)), {"y2": y, "p": p})
        s, a, b = xi(ctx, y + y2), v, xi(ctx, y2)
        c_sub.record(s <= a + b + EXACT_RTOL * (1 + abs(s) + abs(a) + abs(b)),
                     {"y1": y, "y2": y2, "xi_sum": s, "sum_xi": a + b})
        diff = abs(v - xi(ctx, y2))
        c_lip.record(diff <= L * sup_norm(y - y2) * (1 + EXACT_RTOL) + EXACT_RTOL,
                     {"y": y, "y_prime": y2, "lipschitz": L})
    return report
