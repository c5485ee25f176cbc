"""Picard iteration for contractions of convex modular cone metric spaces.

The contraction hypothesis is cone valued: ``w_{kc}(Tx, Ty) <= w_c(x, y)``
for every ``theta << c << c0``.  Iteration is monitored through the real
modular ``W_lam(x, y) = xi_1(w_{lam 1}(x, y))`` at a few ``lam`` below
``||c0||_inf``; a run stops once every successive-iterate residual is under
``tol``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .cone import ConeError, as_vector, sup_norm
from .metrics import ModularConeMetricFn, RealModularMetricFn, Space, points_equal
from .report import INCONCLUSIVE, AuditReport, jsonable

CONVERGED = "converged"
MAX_ITER = "max_iter"
DIVERGED = "diverged"

UNIQUE = "unique"
MULTIPLE = "multiple"


@dataclass(frozen=True, eq=False)
class ContractionSpec:
    T: Callable[[Any], Any]
    k: float
    c0: np.ndarray
    name: str = "T"

    def __post_init__(self):
        if not 0 < self.k < 1:
            raise ValueError(f"contraction constant must lie in (0, 1), got {self.k}")
        object.__setattr__(self, "c0", as_vector(self.c0))

    def default_lambdas(self) -> tuple[float, ...]:
        lam0 = sup_norm(self.c0)
        return (0.1 * lam0, 0.5 * lam0, 0.9 * lam0)


def _sample_below(cone, c0: np.ndarray, rng: np.random.Generator, n: int) -> np.ndarray:
    """Parameters ``c`` with ``theta << c << c0``: ``t c0``, half of them jittered."""
    ts = rng.uniform(0.01, 0.99, size=n)
    out = ts[:, None] * c0[None, :]
    for i in range(1, n, 2):
        cand = out[i] + 0.25 * ts[i] * min(ts[i], 1 - ts[i]) * rng.normal(size=c0.size) * c0
        if cone.interior_contains(cand) and cone.way_below(cand, c0):
            out[i] = cand
    return out


def contraction_audit(
    w: ModularConeMetricFn, spec: ContractionSpec, space: Space, n: int, seed: int = 0
) -> AuditReport:
    """Sampled check of ``w_{kc}(Tx, Ty) <= w_c(x, y)`` over ``theta << c << c0``.

    The smallest facet slack of ``w_c(x, y) - w_{kc}(Tx, Ty)`` is reported in
    the check payload whether or not the check passes.
    """
    if not w.is_convex:
        raise ValueError("contraction_audit expects a convex modular cone metric")
    cone = w.cone
    c0 = as_vector(spec.c0, cone.dim)
    if not cone.interior_contains(c0):
        raise ConeError(f"c0 = {c0!r} is not interior")
    rng = np.random.default_rng(seed)
    xs, ys = space.sample(rng, n), space.sample(rng, n)
    for i in range(0, n, 8):
        ys[i] = xs[i]
    cs = _sample_below(cone, c0, rng, n)

    report = AuditReport(subject=f"contraction[{spec.name}, k={spec.k}]", seed=seed)
    chk = report.add("contraction_inequality")
    worst = None
    for x, y, c in zip(xs, ys, cs):
        lhs = w(spec.k * c, spec.T(x), spec.T(y))
        rhs = w(c, x, y)
        slack = cone.slack(lhs, rhs)
        payload = {"x": x, "y": y, "c": c, "lhs": lhs, "rhs": rhs, "slack": slack}
        if worst is None or slack < worst["slack"]:
            worst = payload
        chk.record(cone.le_approx(lhs, rhs), payload)
    if chk.passed:
        chk.worst_case_payload = {"worst_slack": worst}
    return report


def self_map_audit(T: Callable[[Any], Any], space: Space, n: int, seed: int = 0) -> AuditReport:
    """Sampled check that ``T`` maps the space into itself."""
    rng = np.random.default_rng(seed)
    report = AuditReport(subject=f"self-map[{getattr(T, '__name__', 'T')}]", seed=seed)
    chk = report.add("image_in_space")
    for x in space.sample(rng, n):
        img = T(x)
        chk.record(space.contains(img), {"x": x, "image": img})
    return report


def _finite(p) -> bool:
    if hasattr(p, "to_xy"):
        p = p.to_xy()
    try:
        return bool(np.all(np.isfinite(np.asarray(p, dtype=float))))
    except (TypeError, ValueError):
        return False


def _coords(p) -> list[float]:
    if hasattr(p, "to_xy"):
        p = p.to_xy()
    return [float(v) for v in np.atleast_1d(np.asarray(p, dtype=float))]


@dataclass
class IterationTrace:
    iterates: list
    lam_grid: tuple
    residuals: list[list[float]] = field(default_factory=list)
    ratio_series: list[float] = field(default_factory=list)
    verdict: str = MAX_ITER
    reason: str = ""

    @property
    def steps(self) -> int:
        return len(self.residuals)

    @property
    def endpoint(self):
        return self.iterates[-1]

    def summary(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "steps": self.steps,
            "lam_grid": list(self.lam_grid),
            "final_residuals": self.residuals[-1] if self.residuals else [],
            "endpoint": _coords(self.endpoint) if _finite(self.endpoint) else repr(self.endpoint),
        }

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        width = len(_coords(self.iterates[0]))
        writer.writerow(["n"] + [f"point_{i}" for i in range(width)]
                        + [f"residual_lam_{lam!r}" for lam in self.lam_grid] + ["ratio"])
        writer.writerow([0] + [repr(v) for v in _coords(self.iterates[0])]
                        + [""] * len(self.lam_grid) + [""])
        for n in range(1, len(self.iterates)):
            point = self.iterates[n]
            coords = _coords(point) if _finite(point) else [math.nan] * width
            res = self.residuals[n - 1] if n - 1 < len(self.residuals) else []
            ratio = self.ratio_series[n - 2] if 0 <= n - 2 < len(self.ratio_series) else ""
            writer.writerow([n] + [repr(v) for v in coords] + [repr(r) for r in res]
                            + [repr(ratio) if ratio != "" else ""])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def picard(
    spec: ContractionSpec,
    W: RealModularMetricFn,
    x0,
    lam_grid: Sequence[float] | None = None,
    tol: float = 1e-9,
    max_iter: int = 100,
    space: Space | None = None,
) -> IterationTrace:
    """Iterate ``x_{n+1} = T(x_n)`` until ``W_lam(x_n, x_{n+1}) < tol`` on the whole grid.

    A non-finite iterate, or one outside ``space`` when a space is given,
    ends the run with verdict ``diverged``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = tuple(spec.default_lambdas() if lam_grid is None else lam_grid)
    if not grid:
        raise ValueError("lam_grid must be nonempty")
    trace = IterationTrace([x0], grid)
    x = x0
    for _ in range(max_iter):
        nxt = spec.T(x)
        if not _finite(nxt):
            trace.iterates.append(nxt)
            trace.verdict, trace.reason = DIVERGED, "non-finite iterate"
            return trace
        if space is not None and not space.contains(nxt):
            trace.iterates.append(nxt)
            trace.verdict, trace.reason = DIVERGED, f"left space at step {len(trace.iterates) - 1}"
            return trace
        res = [W(lam, x, nxt) for lam in grid]
        if any(not math.isfinite(r) for r in res):
            trace.iterates.append(nxt)
            trace.residuals.append(res)
            trace.verdict, trace.reason = DIVERGED, "non-finite residual"
            return trace
        if trace.residuals:
            prev = max(trace.residuals[-1])
            trace.ratio_series.append(max(res) / prev if prev > 0 else 0.0)
        trace.residuals.append(res)
        trace.iterates.append(nxt)
        x = nxt
        if all(r < tol for r in res):
            trace.verdict = CONVERGED
            return trace
    trace.verdict, trace.reason = MAX_ITER, f"no convergence within {max_iter} steps"
    return trace


@dataclass
class UniquenessReport:
    verdict: str
    traces: list[IterationTrace]
    distances: dict = field(default_factory=dict)
    diagnosis: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return jsonable({
            "verdict": self.verdict,
            "runs": [t.summary() for t in self.traces],
            "distances": {f"{i},{j}": v for (i, j), v in self.distances.items()},
            "diagnosis": self.diagnosis,
        })


def uniqueness_probe(
    spec: ContractionSpec,
    W: RealModularMetricFn,
    starts: Sequence,
    lam_grid: Sequence[float] | None = None,
    tol: float = 1e-9,
    max_iter: int = 100,
    space: Space | None = None,
    label: Callable[[Any], str] | None = None,
) -> UniquenessReport:
    """Run :func:`picard` from several starts and compare the endpoints.

    All endpoints pairwise within ``10 tol`` at every grid ``lam`` gives
    ``unique``.  Any unconverged run makes the probe ``inconclusive``; with a
    ``label`` function, orbits whose labels alternate step by step are
    diagnosed as oscillating.
    """
    if len(starts) < 2:
        raise ValueError("uniqueness_probe needs at least two starts")
    traces = [picard(spec, W, s, lam_grid, tol, max_iter, space) for s in starts]
    grid = traces[0].lam_grid
    diagnosis = []
    for i, t in enumerate(traces):
        if t.verdict != CONVERGED:
            diagnosis.append(f"start {i}: {t.verdict} ({t.reason})")
            if label is not None:
                labels = [label(p) for p in t.iterates]
                if len(labels) >= 3 and all(a != b for a, b in zip(labels, labels[1:])):
                    diagnosis.append(
                        f"start {i}: orbit oscillates, alternating {'/'.join(sorted(set(labels)))}"
                    )
    if diagnosis:
        return UniquenessReport(INCONCLUSIVE, traces, {}, diagnosis)
    distances = {}
    for i in range(len(traces)):
        for j in range(i + 1, len(traces)):
            a, b = traces[i].endpoint, traces[j].endpoint
            distances[(i, j)] = 0.0 if points_equal(a, b) else max(W(lam, a, b) for lam in grid)
    verdict = UNIQUE if all(d < 10 * tol for d in distances.values()) else MULTIPLE
    return UniquenessReport(verdict, traces, distances, diagnosis)
