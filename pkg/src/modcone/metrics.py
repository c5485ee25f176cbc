"""Cone metrics, modular metrics and modular cone metrics, with sampling auditors.

Four distance notions live here:

* :class:`ConeMetricFn` -- ``d(x, y)`` valued in the ordered space;
* :class:`RealModularMetricFn` -- ``W_lam(x, y)`` in ``[0, inf]``, ``lam > 0``;
* :class:`ModularConeMetricFn` -- ``w_c(x, y)`` valued in the ordered space,
  parametrized by interior ``c``; ``kind`` is ``plain``, ``convex`` or ``strict``
  (strict meaning convex with the strict identity axioms).

Auditors never raise on a failed axiom; failures are report content.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import extreal
from .cone import ConeError, PolyCone, as_vector, pointwise_invert, sample_interior, sup_norm
from .report import AuditReport
from .scalarization import ScalarizationContext, xi

RTOL = 1e-12
# pair enumeration is exhaustive below this many distinct pairs
EXHAUSTIVE_PAIRS = 20_000
MODULAR_KINDS = ("plain", "convex", "strict")


class ConstructionWarning(UserWarning):
    pass


def points_equal(x, y) -> bool:
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return bool(np.array_equal(np.asarray(x), np.asarray(y)))
    return x == y


def _point_key(x):
    if isinstance(x, np.ndarray):
        return tuple(x.tolist())
    return x


@dataclass(frozen=True, eq=False)
class Space:
    """A point universe: a finite list, or a region given by membership and sampler.

    ``sampler(rng, n)`` must return ``n`` members.  Finite point lists are
    deduplicated on construction.
    """

    name: str
    points: tuple | None = None
    membership: Callable[[Any], bool] | None = None
    sampler: Callable[[np.random.Generator, int], list] | None = None
    ambient_dim: int = 1

    def __post_init__(self):
        if self.points is not None:
            seen, uniq = set(), []
            for p in self.points:
                k = _point_key(p)
                if k not in seen:
                    seen.add(k)
                    uniq.append(p)
            if not uniq:
                raise ValueError("a space must be nonempty")
            object.__setattr__(self, "points", tuple(uniq))
        elif self.membership is None or self.sampler is None:
            raise ValueError("a region space needs both membership and sampler")

    @property
    def is_finite(self) -> bool:
        return self.points is not None

    def contains(self, x) -> bool:
        if self.membership is not None:
            return bool(self.membership(x))
        return any(points_equal(x, p) for p in self.points)

    def sample(self, rng: np.random.Generator, n: int) -> list:
        if self.is_finite:
            idx = rng.integers(len(self.points), size=n)
            return [self.points[i] for i in idx]
        return list(self.sampler(rng, n))

    def distinct_pairs(self):
        pts = self.points
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                yield pts[i], pts[j]


def real_line(scale: float = 5.0) -> Space:
    """``X = R`` sampled from a centred normal of the given scale."""
    return Space(
        "real-line",
        membership=lambda x: isinstance(x, (int, float, np.floating)) and math.isfinite(x),
        sampler=lambda rng, n: [float(v) for v in rng.normal(scale=scale, size=n)],
    )


def interval(low: float, high: float) -> Space:
    return Space(
        f"interval[{low},{high}]",
        membership=lambda x: low <= x <= high,
        sampler=lambda rng, n: [float(v) for v in rng.uniform(low, high, size=n)],
    )


def grid(low: float, high: float, n: int) -> Space:
    return Space(f"grid[{low},{high},{n}]", points=tuple(float(v) for v in np.linspace(low, high, n)))


def _gap(x, y) -> float:
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return sup_norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return abs(x - y)


@dataclass(frozen=True, eq=False)
class ConeMetricFn:
    func: Callable[[Any, Any], Any]
    cone: PolyCone
    name: str = "d"

    def __call__(self, x, y) -> np.ndarray:
        return as_vector(self.func(x, y), self.cone.dim)


@dataclass(frozen=True, eq=False)
class ModularConeMetricFn:
    func: Callable[[np.ndarray, Any, Any], Any]
    cone: PolyCone
    kind: str = "plain"
    name: str = "w"

    def __post_init__(self):
        if self.kind not in MODULAR_KINDS:
            raise ValueError(f"kind must be one of {MODULAR_KINDS}, got {self.kind!r}")

    @property
    def is_convex(self) -> bool:
        return self.kind in ("convex", "strict")

    def __call__(self, c, x, y) -> np.ndarray:
        c = as_vector(c, self.cone.dim)
        if not self.cone.interior_contains(c):
            raise ConeError(f"modular parameter {c!r} is not interior")
        return as_vector(self.func(c, x, y), self.cone.dim)


@dataclass(frozen=True, eq=False)
class RealModularMetricFn:
    func: Callable[[float, Any, Any], float]
    convex: bool = False
    name: str = "W"

    def __call__(self, lam: float, x, y) -> float:
        if not lam > 0:
            raise ValueError(f"modular parameter must be positive, got {lam}")
        return extreal.check(self.func(lam, x, y))


# -- constructions -----------------------------------------------------------


def abs_cone_metric(cone: PolyCone, direction=None) -> ConeMetricFn:
    """``d(x, y) = |x - y| u`` for a fixed ``u in P`` (default: the cone's Slater point)."""
    u = cone.slater_point if direction is None else as_vector(direction, cone.dim)
    if not cone.contains(u):
        raise ConeError("direction of an absolute-value cone metric must lie in P")
    return ConeMetricFn(lambda x, y: _gap(x, y) * u, cone, name="abs")


def squared_cone_metric(cone: PolyCone) -> ConeMetricFn:
    u = cone.slater_point
    return ConeMetricFn(lambda x, y: _gap(x, y) ** 2 * u, cone, name="squared")


def from_cone_metric(
    d: ConeMetricFn,
    phi: Callable[[np.ndarray], float] | None = None,
    e=None,
    check_samples: int = 64,
    seed: int = 0,
    name: str | None = None,
) -> ModularConeMetricFn:
    """``w_c(x, y) = phi(c) d(x, y)`` for a positive decreasing ``phi``.

    The default ``phi(c) = 1 / xi_e(c)`` is strictly positive on the interior
    and decreasing because ``xi_e`` is monotone.  ``phi`` is spot-checked on
    sampled interior points: a non-positive value raises, a monotonicity
    failure only warns.
    """
    cone = d.cone
    if phi is None:
        ctx = ScalarizationContext(cone, cone.slater_point if e is None else e)

        def phi(c):
            return 1.0 / xi(ctx, c)

    rng = np.random.default_rng(seed)
    cs = sample_interior(cone, rng, check_samples)
    bumps = sample_interior(cone, rng, check_samples, low=0.01, high=5.0)
    values = [float(phi(c)) for c in cs]
    bad = [c for c, v in zip(cs, values) if not v > 0]
    if bad:
        raise ConeError(f"phi must be positive on int P; phi({bad[0]!r}) <= 0")
    if any(float(phi(c + b)) > v * (1 + RTOL) for c, b, v in zip(cs, bumps, values)):
        warnings.warn("phi is not decreasing on int P", ConstructionWarning, stacklevel=2)

    return ModularConeMetricFn(
        lambda c, x, y: phi(c) * d(x, y), cone, kind="plain", name=name or f"phi*{d.name}"
    )


def convex_from_cone_metric(
    d: ConeMetricFn, strict: bool = False, name: str | None = None
) -> ModularConeMetricFn:
    """``w_c(x, y) = d(x, y) / c`` pointwise (orthant only).

    ``strict=True`` declares the strict class, which the convex auditor then
    checks for the strict identity axiom as well.
    """
    if not d.cone.is_orthant:
        raise ConeError("pointwise division by c needs the orthant")
    return ModularConeMetricFn(
        lambda c, x, y: d(x, y) * pointwise_invert(c), d.cone,
        kind="strict" if strict else "convex",
        name=name or f"{d.name}/c",
    )


def scalarize(w: ModularConeMetricFn, e=None, name: str | None = None) -> RealModularMetricFn:
    """Real modular ``W_lam(x, y) = xi_e(w_{lam e}(x, y))``."""
    ctx = ScalarizationContext(w.cone, w.cone.slater_point if e is None else e)
    return RealModularMetricFn(
        lambda lam, x, y: xi(ctx, w(lam * ctx.e, x, y)),
        convex=w.is_convex and w.cone.is_orthant,
        name=name or f"xi({w.name})",
    )


# -- auditors ----------------------------------------------------------------


def _triples(space: Space, rng: np.random.Generator, n: int):
    xs, ys, zs = space.sample(rng, n), space.sample(rng, n), space.sample(rng, n)
    u = rng.uniform(size=n)
    for i in range(n):
        # degenerate corners: z = y, z = x, y = x
        if u[i] < 0.125:
            zs[i] = ys[i]
        elif u[i] < 0.1875:
            zs[i] = xs[i]
        elif u[i] < 0.25:
            ys[i] = xs[i]
    return xs, ys, zs


def _pairs_for_distinctness(space: Space, xs, ys):
    if space.is_finite:
        npts = len(space.points)
        if npts * (npts - 1) // 2 <= EXHAUSTIVE_PAIRS:
            return list(space.distinct_pairs()), True
    return [(x, y) for x, y in zip(xs, ys) if not points_equal(x, y)], False


def _vec_close(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(np.abs(a - b) <= RTOL * (1.0 + np.abs(a) + np.abs(b))))


def audit_cone_metric(d: ConeMetricFn, space: Space, n: int, seed: int = 0) -> AuditReport:
    """Sampled check of the cone-metric axioms: positivity, identity, symmetry, triangle."""
    cone = d.cone
    theta = np.zeros(cone.dim)
    rng = np.random.default_rng(seed)
    xs, ys, zs = _triples(space, rng, n)
    pairs, exhaustive = _pairs_for_distinctness(space, xs, ys)

    report = AuditReport(subject=f"cone-metric[{d.name}]", seed=seed)
    c_nonneg = report.add("cm1_nonnegativity")
    c_id = report.add("cm1_identity")
    c_dist = report.add("cm1_distinctness", statistical=not exhaustive)
    c_sym = report.add("cm2_symmetry")
    c_tri = report.add("cm3_triangle")

    for x, y, z in zip(xs, ys, zs):
        dxy = d(x, y)
        c_nonneg.record(cone.le_approx(theta, dxy), {"x": x, "y": y, "d": dxy})
        dxx = d(x, x)
        c_id.record(bool(np.all(dxx == 0)), {"x": x, "d": dxx})
        dyx = d(y, x)
        c_sym.record(_vec_close(dxy, dyx), {"x": x, "y": y, "d_xy": dxy, "d_yx": dyx})
        dxz, dzy = d(x, z), d(z, y)
        c_tri.record(cone.le_approx(dxy, dxz + dzy),
                     {"x": x, "y": y, "z": z, "d_xy": dxy, "d_xz+d_zy": dxz + dzy})
    for x, y in pairs:
        dxy = d(x, y)
        c_dist.record(bool(np.any(dxy != 0)), {"x": x, "y": y, "d": dxy})
    return report


def _probe_params(cone: PolyCone, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    e = cone.slater_point
    probes = [e / 10, e / 2, e, 2 * e]
    return probes + list(sample_interior(cone, rng, count))


def _audit_modular_cone(
    w: ModularConeMetricFn, space: Space, n: int, seed: int, convex: bool
) -> AuditReport:
    cone = w.cone
    theta = np.zeros(cone.dim)
    rng = np.random.default_rng(seed)
    xs, ys, zs = _triples(space, rng, n)
    c1s = sample_interior(cone, rng, n)
    c2s = sample_interior(cone, rng, n)
    bumps = sample_interior(cone, rng, n, low=0.01, high=5.0)
    probes = _probe_params(cone, rng, 12)
    pairs, exhaustive = _pairs_for_distinctness(space, xs, ys)

    kind = "convex" if convex else "plain"
    report = AuditReport(subject=f"modular-cone-metric[{w.name}]:{kind}", seed=seed)
    c_id = report.add("i_identity")
    c_dist = report.add("i_distinctness", statistical=not exhaustive)
    c_sym = report.add("ii_symmetry")
    if convex:
        c_cvx = report.add("iii_convex_triangle")
        c_wsum = report.add("convex_weights_sum_to_one")
    c_tri = report.add("iii_triangle")
    c_nonneg = report.add("nonnegativity")
    c_dnn = report.add("derived_nonnegativity")
    c_mono = report.add("c_monotonicity")
    strict = convex and w.kind == "strict"
    if strict:
        c_strict = report.add("i_double_prime_strict_identity")

    for x, y, z, c1, c2, b in zip(xs, ys, zs, c1s, c2s, bumps):
        wxx = w(c1, x, x)
        c_id.record(not wxx.any(), {"x": x, "c": c1, "w": wxx})
        wxy, wyx = w(c1, x, y), w(c1, y, x)
        c_sym.record(_vec_close(wxy, wyx), {"x": x, "y": y, "c": c1, "w_xy": wxy, "w_yx": wyx})
        lhs = w(c1 + c2, x, y)
        wxz, wzy = w(c1, x, z), w(c2, z, y)
        payload = {"x": x, "y": y, "z": z, "c1": c1, "c2": c2, "lhs": lhs}
        c_tri.record(cone.le_approx(lhs, wxz + wzy), {**payload, "rhs": wxz + wzy})
        if convex:
            s = c1 + c2
            w1, w2 = c1 / s, c2 / s
            rhs = w1 * wxz + w2 * wzy
            c_cvx.record(cone.le_approx(lhs, rhs), {**payload, "rhs": rhs})
            c_wsum.record(_vec_close(w1 + w2, np.ones(cone.dim)), {"c1": c1, "c2": c2})
        wyz = w(c1, y, z)
        c_nonneg.record(cone.le_approx(theta, wyz), {"y": y, "z": z, "c": c1, "w": wyz})
        c_dnn.record(cone.le_approx(w(2 * c1, y, y), 2 * wyz), {"y": y, "z": z, "c": c1})
        # c1 << c1 + b since b is interior
        big = w(c1 + b, x, y)
        c_mono.record(cone.le_approx(big, wxy),
                      {"x": x, "y": y, "c_small": c1, "c_big": c1 + b, "w_big": big, "w_small": wxy})
        if strict and not points_equal(x, y):
            c_strict.record(bool(np.any(wxy != 0)), {"x": x, "y": y, "c": c1})

    for x, y in pairs:
        c_dist.record(any(np.any(w(c, x, y) != 0) for c in probes),
                      {"x": x, "y": y, "note": "no separating c among probes"})
    return report


def audit_modular_cone_axioms(
    w: ModularConeMetricFn, space: Space, n: int, seed: int = 0
) -> AuditReport:
    """Sampled audit of the modular cone metric axioms.

    Checks the identity and distinctness halves of axiom (i), symmetry (ii),
    the split triangle inequality ``w_{c1+c2}(x,y) <= w_{c1}(x,z) + w_{c2}(z,y)``
    (iii), and two consequences: nonnegativity and monotone decrease in ``c``.
    """
    return _audit_modular_cone(w, space, n, seed, convex=False)


def audit_convex_axioms(w: ModularConeMetricFn, space: Space, n: int, seed: int = 0) -> AuditReport:
    """As :func:`audit_modular_cone_axioms` plus the weighted triangle inequality.

    The weights ``c1/(c1+c2)`` are pointwise, so the cone must be the orthant.
    The plain triangle is checked on the same samples.
    """
    if not w.cone.is_orthant:
        raise ConeError("convex axioms need pointwise weights; use the orthant")
    return _audit_modular_cone(w, space, n, seed, convex=True)


def audit_real_modular(
    W: RealModularMetricFn, space: Space, n: int, convex: bool = False, seed: int = 0
) -> AuditReport:
    rng = np.random.default_rng(seed)
    xs, ys, zs = _triples(space, rng, n)
    lams = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=n))
    mus = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=n))
    probes = [float(v) for v in np.logspace(-3, 3, 13)]
    pairs, exhaustive = _pairs_for_distinctness(space, xs, ys)

    report = AuditReport(subject=f"modular-metric[{W.name}]:{'convex' if convex else 'plain'}",
                         seed=seed)
    c_id = report.add("i_identity")
    c_dist = report.add("i_distinctness", statistical=not exhaustive)
    c_sym = report.add("ii_symmetry")
    c_tri = report.add("iii_convex_triangle" if convex else "iii_triangle")
    c_nonneg = report.add("nonnegativity")
    c_mono = report.add("lambda_monotonicity")
    c_nan = report.add("no_nan")

    for x, y, z, lam, mu in zip(xs, ys, zs, lams, mus):
        try:
            wxy, wyx = W(lam, x, y), W(lam, y, x)
            wxx = W(lam, x, x)
            lhs = W(lam + mu, x, y)
            wxz, wzy = W(lam, x, z), W(mu, z, y)
            w_mu = W(mu, x, y)
        except extreal.ExtendedRealError as exc:
            c_nan.record(False, {"x": x, "y": y, "z": z, "lam": lam, "mu": mu, "error": str(exc)})
            continue
        c_nan.record(True)
        c_id.record(wxx == 0, {"x": x, "lam": lam, "W": wxx})
        c_sym.record(wxy == wyx or abs(wxy - wyx) <= RTOL * (1 + abs(wxy) + abs(wyx)),
                     {"x": x, "y": y, "lam": lam, "W_xy": wxy, "W_yx": wyx})
        if convex:
            s = lam + mu
            rhs = extreal.add(extreal.scale(lam / s, wxz), extreal.scale(mu / s, wzy))
        else:
            rhs = extreal.add(wxz, wzy)
        c_tri.record(extreal.le(lhs, rhs, RTOL),
                     {"x": x, "y": y, "z": z, "lam": lam, "mu": mu, "lhs": lhs, "rhs": rhs})
        c_nonneg.record(wxy >= 0, {"x": x, "y": y, "lam": lam, "W": wxy})
        small, big = (lam, mu) if lam <= mu else (mu, lam)
        w_small, w_big = (wxy, w_mu) if lam <= mu else (w_mu, wxy)
        c_mono.record(extreal.le(w_big, w_small, RTOL),
                      {"x": x, "y": y, "lam_small": small, "lam_big": big})

    for x, y in pairs:
        try:
            separated = any(W(lam, x, y) != 0 for lam in probes)
        except extreal.ExtendedRealError as exc:
            c_nan.record(False, {"x": x, "y": y, "error": str(exc)})
            continue
        c_dist.record(separated, {"x": x, "y": y, "note": "no separating lambda among probes"})
    return report


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: str
    values: tuple
    lam_grid: tuple
    note: str = "heuristic window classification on a finite lambda grid"


IN_XW = "in_Xw"
IN_XW_STAR = "in_Xw_star"
NEITHER = "neither"


def modular_space_membership(
    W: RealModularMetricFn, x0, x, lam_grid: Sequence[float] | None = None, tol: float = 1e-6
) -> MembershipVerdict:
    """Classify ``x`` against the modular spaces around ``x0``.

    ``in_Xw`` when ``W_lam(x, x0)`` is below ``tol`` at the top of the grid and
    non-increasing along it; ``in_Xw_star`` when finite at some grid point;
    otherwise ``neither``.
    """
    grid_ = tuple(float(v) for v in (np.logspace(0, 12, 13) if lam_grid is None else lam_grid))
    if not grid_ or any(b <= a for a, b in zip(grid_, grid_[1:])):
        raise ValueError("lam_grid must be nonempty and increasing")
    values = tuple(W(lam, x, x0) for lam in grid_)
    tail = values[-1]
    non_increasing = all(extreal.le(b, a) for a, b in zip(values, values[1:]))
    if tail <= tol and non_increasing:
        verdict = IN_XW
    elif any(v < extreal.INF for v in values):
        verdict = IN_XW_STAR
    else:
        verdict = NEITHER
    return MembershipVerdict(verdict, values, grid_)
