"""Balls, convergence and Cauchy windows, and the topological witnesses.

Everything here works on finite windows of a sequence.  A probe ``c`` is
*satisfied* by a window when the defining relation holds on a suffix that
covers at least ``tail_fraction`` of the window; verdicts describe the window,
never a limit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .cone import ConeError, PolyCone, as_vector, normal_constant, sup_norm
from .metrics import ModularConeMetricFn, Space, points_equal, scalarize
from .scalarization import ScalarizationContext, xi

TAIL_FRACTION = 0.5
DEFAULT_LAMBDAS = (0.01, 0.1, 0.5, 1.0, 2.0)


def default_probes(cone: PolyCone) -> list[np.ndarray]:
    e = cone.slater_point
    return [e / 10, e / 2, e.copy(), 2 * e]


def in_ball(w: ModularConeMetricFn, x, c, y) -> bool:
    """``y`` lies in the ball ``B(x, c) = {y : w_c(x, y) << c}``."""
    c = as_vector(c, w.cone.dim)
    if not w.cone.interior_contains(c):
        raise ConeError(f"ball radius {c!r} is not interior")
    return w.cone.way_below(w(c, x, y), c)


def _tail_len(length: int, tail_fraction: float) -> int:
    return max(1, math.ceil(length * tail_fraction))


def _suffix_start(flags: Sequence[bool]) -> int | None:
    """Least 0-based index from which every flag holds; ``None`` if the last fails."""
    start = len(flags)
    for i in range(len(flags) - 1, -1, -1):
        if not flags[i]:
            break
        start = i
    return None if start == len(flags) else start


@dataclass
class SequenceTrace:
    """Per-probe window verdicts for a sequence.

    ``first_index[k]`` is the 1-based ``N`` from which probe ``k`` holds on
    the rest of the window (``None`` if it fails at the end).  ``residuals[k]``
    has one entry per point: ``xi_c`` of the tested value, which is ``< 1``
    exactly when the relation ``<< c`` holds.
    """

    points: list
    probes: list
    residuals: list[list[float]]
    first_index: list[int | None]
    holds: list[bool]
    criterion: str = "convergence"

    @property
    def verdict(self) -> bool:
        return all(self.holds)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        width = len(np.atleast_1d(_coords(self.points[0])))
        writer.writerow(["n"] + [f"point_{i}" for i in range(width)]
                        + [f"residual_probe_{k}" for k in range(len(self.probes))])
        for n, p in enumerate(self.points, start=1):
            writer.writerow([n] + [repr(float(v)) for v in _coords(p)]
                            + [repr(float(r[n - 1])) for r in self.residuals])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def _coords(p) -> np.ndarray:
    if hasattr(p, "to_xy"):
        return np.asarray(p.to_xy(), dtype=float)
    return np.atleast_1d(np.asarray(p, dtype=float))




def check_convergence(
    w: ModularConeMetricFn,
    seq: Sequence,
    x,
    probes: Sequence | None = None,
    tail_fraction: float = TAIL_FRACTION,
) -> SequenceTrace:
    """Window test of ``x_n -> x``: for each probe ``c``, eventually ``w_c(x_n, x) << c``."""
    return _convergence(w, seq, x, probes, tail_fraction)[0]


def _convergence(w, seq, x, probes, tail_fraction):
    if len(seq) == 0:
        raise ValueError("empty sequence")
    cone = w.cone
    probes = default_probes(cone) if probes is None else [as_vector(c, cone.dim) for c in probes]
    need = _tail_len(len(seq), tail_fraction)
    residuals, firsts, holds, values = [], [], [], []
    for c in probes:
        vals = [w(c, xn, x) for xn in seq]
        values.append(vals)
        flags = [cone.way_below(v, c) for v in vals]
        start = _suffix_start(flags)
        ctx = ScalarizationContext(cone, c)
        residuals.append([xi(ctx, v) for v in vals])
        firsts.append(None if start is None else start + 1)
        holds.append(start is not None and len(seq) - start >= need)
    return SequenceTrace(list(seq), probes, residuals, firsts, holds, "convergence"), values


def check_cauchy(
    w: ModularConeMetricFn,
    seq: Sequence,
    probes: Sequence | None = None,
    tail_fraction: float = TAIL_FRACTION,
) -> SequenceTrace:
    """Window test of the Cauchy property: eventually ``w_c(x_n, x_m) << c`` for all pairs."""
    if len(seq) == 0:
        raise ValueError("empty sequence")
    cone = w.cone
    probes = default_probes(cone) if probes is None else [as_vector(c, cone.dim) for c in probes]
    L = len(seq)
    need = _tail_len(L, tail_fraction)
    residuals, firsts, holds = [], [], []
    for c in probes:
        ctx = ScalarizationContext(cone, c)
        row_max = [0.0] * L
        start = 0
        for i in range(L):
            for j in range(i + 1, L):
                v = w(c, seq[i], seq[j])
                row_max[i] = max(row_max[i], xi(ctx, v))
                if not cone.way_below(v, c):
                    start = max(start, i + 1)
        # the last index has no partner in the window
        start = min(start, L - 1)
        residuals.append(row_max)
        firsts.append(start + 1)
        holds.append(L - start >= need)
    return SequenceTrace(list(seq), probes, residuals, firsts, holds, "cauchy")


@dataclass
class EquivalenceReport:
    """Two verdicts for the same window that must coincide by the equivalence results."""

    criterion: str
    order_verdict: bool
    other_verdict: bool
    details: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.order_verdict == self.other_verdict


def _suffix_verdict(flags: Sequence[bool], need: int) -> tuple[int | None, bool]:
    start = _suffix_start(flags)
    return (None if start is None else start + 1), start is not None and len(flags) - start >= need


def norm_radius(cone: PolyCone, c: np.ndarray) -> float:
    """Largest ``r`` with ``||v||_inf < r  =>  v << c``: ``min_j (A c)_j / ||A_j||_1``."""
    A = cone.halfspaces
    return float(np.min((A @ c - cone.interior_margin) / np.abs(A).sum(axis=1)))


def check_norm_equivalence(
    w: ModularConeMetricFn,
    seq: Sequence,
    x,
    probes: Sequence | None = None,
    tail_fraction: float = TAIL_FRACTION,
) -> EquivalenceReport:
    """Order convergence versus norm convergence of ``w_c(x_n, x)`` on a window.

    The norm verdict asks, for each probe ``c``, that ``||w_c(x_n, x)||_inf``
    eventually stays below the sup-norm radius of the order neighbourhood
    ``{v : v << c}``.  Every pointed polyhedral cone is normal; the normal
    constant is reported, together with the bound ``K ||c||`` that order
    convergence forces on the same norms.
    """
    trace, values = _convergence(w, seq, x, probes, tail_fraction)
    need = _tail_len(len(seq), tail_fraction)
    radii, firsts, holds, tail_norms = [], [], [], []
    for c, vals in zip(trace.probes, values):
        norms = [sup_norm(v) for v in vals]
        r = norm_radius(w.cone, c)
        first, ok = _suffix_verdict([v < r for v in norms], need)
        radii.append(r)
        firsts.append(first)
        holds.append(ok)
        tail_norms.append(max(norms[-need:]))
    K = normal_constant(w.cone)
    return EquivalenceReport(
        "norm",
        trace.verdict,
        all(holds),
        {"normal_constant": K.value, "normal_constant_exact": K.exact,
         "norm_radius": radii, "order_bound": [K.value * sup_norm(c) for c in trace.probes],
         "tail_norms": tail_norms, "first_index": trace.first_index, "norm_first_index": firsts},
    )


def check_scalarized_equivalence(
    w: ModularConeMetricFn,
    e,
    seq: Sequence,
    x,
    lam_grid: Sequence[float] = DEFAULT_LAMBDAS,
    tail_fraction: float = TAIL_FRACTION,
) -> EquivalenceReport:
    """Order convergence at the probes ``lam e`` versus ``W^e_lam(x_n, x) < lam`` eventually.

    ``w_{lam e}(x_n, x) << lam e`` holds exactly when ``xi_e`` of the left side
    is below ``lam``, so the two verdicts are computed independently from the
    cone order and from the real modular respectively.
    """
    W = scalarize(w, e)
    e = as_vector(e, w.cone.dim)
    lams = [float(lam) for lam in lam_grid]
    trace = check_convergence(w, seq, x, [lam * e for lam in lams], tail_fraction)
    need = _tail_len(len(seq), tail_fraction)
    firsts, holds, sups = [], [], []
    for lam in lams:
        vals = [W(lam, xn, x) for xn in seq]
        first, ok = _suffix_verdict([v < lam for v in vals], need)
        firsts.append(first)
        holds.append(ok)
        sups.append(max(vals[-need:]))
    return EquivalenceReport(
        "scalarized",
        trace.verdict,
        all(holds),
        {"lam_grid": lams, "tail_sup": sups, "first_index": trace.first_index,
         "scalar_first_index": firsts},
    )


def _point_list(points) -> tuple[list, bool]:
    if isinstance(points, Space):
        if points.is_finite:
            return list(points.points), True
        return points.sample(np.random.default_rng(0), 512), False
    return list(points), True


@dataclass(frozen=True)
class HausdorffWitness:
    found: bool
    c0: np.ndarray | None
    n: int | None
    exact: bool


def hausdorff_witness(
    w: ModularConeMetricFn,
    x,
    y,
    points,
    c0_search: Sequence | None = None,
    n_max: int = 1000,
) -> HausdorffWitness:
    """Find ``c0`` with ``w_{c0}(x, y) != 0`` and the least ``n`` separating the balls.

    The balls ``B(x, c0/2n)`` and ``B(y, c0/2n)`` must share no point of
    ``points``.  Disjointness is exact for a finite point set and only
    sample-based for a sampled region (``exact`` records which).
    """
    if points_equal(x, y):
        raise ValueError("hausdorff_witness needs distinct points")
    pts, exact = _point_list(points)
    candidates = default_probes(w.cone) if c0_search is None else c0_search
    c0 = next((as_vector(c) for c in candidates if np.any(w(c, x, y) != 0)), None)
    if c0 is None:
        return HausdorffWitness(False, None, None, exact)
    for n in range(1, n_max + 1):
        r = c0 / (2 * n)
        if not any(in_ball(w, x, r, p) and in_ball(w, y, r, p) for p in pts):
            return HausdorffWitness(True, c0, n, exact)
    return HausdorffWitness(False, c0, None, exact)


@dataclass(frozen=True)
class LocalBaseInclusion:
    n: int
    checked: int
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def local_base_inclusion(
    w: ModularConeMetricFn, x, c, c1, points=None, cap: int = 10**6
) -> LocalBaseInclusion:
    """Least ``n`` with ``c/n << c1``, spot-checking ``B(x, c/n)`` inside ``B(x, c1)``."""
    cone = w.cone
    c, c1 = as_vector(c, cone.dim), as_vector(c1, cone.dim)
    if not (cone.interior_contains(c) and cone.interior_contains(c1)):
        raise ConeError("local_base_inclusion needs interior c and c1")
    Ac, Ac1 = cone.halfspaces @ c, cone.halfspaces @ c1
    n_found = None
    block = 4096
    for start in range(1, cap + 1, block):
        ns = np.arange(start, min(start + block, cap + 1), dtype=float)
        ok = np.all(Ac1 - np.outer(1.0 / ns, Ac) > cone.interior_margin, axis=1)
        hit = np.flatnonzero(ok)
        if hit.size:
            n_found = int(ns[hit[0]])
            break
    if n_found is None:
        raise ConeError(f"no n <= {cap} with c/n << c1")
    checked = violations = 0
    if points is not None:
        pts, _ = _point_list(points)
        r = c / n_found
        for p in pts:
            if in_ball(w, x, r, p):
                checked += 1
                violations += not in_ball(w, x, c1, p)
    return LocalBaseInclusion(n_found, checked, violations)


@dataclass(frozen=True)
class ContinuityCheck:
    inputs: SequenceTrace
    images: SequenceTrace

    @property
    def ok(self) -> bool:
        # inputs converging must carry the images along
        return (not self.inputs.verdict) or self.images.verdict


def check_sequential_continuity(
    w: ModularConeMetricFn, f: Callable[[Any], Any], seq: Sequence, x, probes=None
) -> ContinuityCheck:
    return ContinuityCheck(
        check_convergence(w, seq, x, probes),
        check_convergence(w, [f(p) for p in seq], f(x), probes),
    )
