"""The two-segment counterexample and its claim-by-claim audit.

``X`` is the union of the segments ``A = {(a, 0) : 1/2 <= a <= 1}`` and
``B = {(0, b) : 1/2 <= b <= 1}`` with the modular metric

* ``w_lam(A(a1), A(a2)) = 4 |a1 - a2| / (3 lam)``
* ``w_lam(B(b1), B(b2)) = |b1 - b2| / lam``
* ``w_lam(A(a), B(b)) = 4a / (3 lam) + b / lam``

and the map ``T(A(a)) = (0, a)``, ``T(B(b)) = (b/2, 0)``.  Every quantity
audited here is ``lam * w_lam``, which does not depend on ``lam``; the grid
sweeps confirm that independence at a few values of ``lam``.

The image ``(b/2, 0)`` leaves ``X`` for ``b < 1``.  Distances to such raw
images use the same printed formulas, keyed on the axis the point lies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fixed_point import ContractionSpec, picard, self_map_audit, uniqueness_probe
from .metrics import RealModularMetricFn, Space, audit_real_modular
from .report import SCHEMA_VERSION

LOW, HIGH = 0.5, 1.0
CLAIMED_CONTRACTION = 0.75
PRINTED_CROSS_BOUND = 7.0 / 3.0
LAMBDAS = (0.5, 1.0, 3.0)
DEFAULT_GRID_STEP = 1e-3
_ROW_CHUNK = 256

CONFIRMED = "CONFIRMED"
DISCREPANCY = "DISCREPANCY"
REFUTED_HYPOTHESIS = "REFUTED-HYPOTHESIS"


@dataclass(frozen=True)
class SegPoint:
    segment: str
    coordinate: float

    def __post_init__(self):
        if self.segment not in ("A", "B"):
            raise ValueError(f"segment must be 'A' or 'B', got {self.segment!r}")
        if not LOW <= self.coordinate <= HIGH:
            raise ValueError(f"coordinate {self.coordinate} outside [1/2, 1]")

    def to_xy(self) -> tuple[float, float]:
        u = float(self.coordinate)
        return (u, 0.0) if self.segment == "A" else (0.0, u)


def A(a: float) -> SegPoint:
    return SegPoint("A", a)


def B(b: float) -> SegPoint:
    return SegPoint("B", b)


def as_segpoint(p) -> SegPoint | None:
    """The point of ``X`` with coordinates ``p``, or ``None`` if ``p`` is not in ``X``."""
    if isinstance(p, SegPoint):
        return p
    x, y = (float(v) for v in p)
    if y == 0 and LOW <= x <= HIGH:
        return SegPoint("A", x)
    if x == 0 and LOW <= y <= HIGH:
        return SegPoint("B", y)
    return None


def axis_of(p) -> tuple[str, float]:
    """Segment label and coordinate of a point on either axis, in ``X`` or not."""
    if isinstance(p, SegPoint):
        return p.segment, p.coordinate
    x, y = (float(v) for v in p)
    if y == 0 and x != 0:
        return "A", x
    if x == 0 and y != 0:
        return "B", y
    raise ValueError(f"{p!r} lies on neither axis")


def _scaled(s1: str, u1, s2: str, u2):
    """``lam * w_lam`` from the printed formulas; works elementwise on arrays."""
    if s1 == s2 == "A":
        return 4.0 * np.abs(u1 - u2) / 3.0
    if s1 == s2 == "B":
        return np.abs(u1 - u2)
    a, b = (u1, u2) if s1 == "A" else (u2, u1)
    return 4.0 * a / 3.0 + b


def segment_modular(lam: float, p: SegPoint, q: SegPoint) -> float:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return float(_scaled(p.segment, p.coordinate, q.segment, q.coordinate)) / lam


def segment_modular_raw(lam: float, p, q) -> float:
    """:func:`segment_modular` extended to axis points outside ``X`` by the same formulas."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    (s1, u1), (s2, u2) = axis_of(p), axis_of(q)
    return float(_scaled(s1, u1, s2, u2)) / lam


def segment_map(p: SegPoint) -> tuple[float, float]:
    if p.segment == "A":
        return (0.0, float(p.coordinate))
    return (float(p.coordinate) / 2.0, 0.0)


def _t_axis(segment: str, u):
    # T on axis labels: A(u) -> B(u), B(u) -> A(u/2)
    return ("B", u) if segment == "A" else ("A", u / 2.0)


def segment_map_step(p):
    """``T`` for iteration: the image as a :class:`SegPoint` when it lies in ``X``."""
    img = segment_map(p)
    sp = as_segpoint(img)
    return img if sp is None else sp


def segment_space() -> Space:
    def sampler(rng, n):
        segs = rng.integers(2, size=n)
        us = rng.uniform(LOW, HIGH, size=n)
        return [SegPoint("AB"[s], float(u)) for s, u in zip(segs, us)]

    def member(p):
        try:
            return as_segpoint(p) is not None
        except (TypeError, ValueError):
            return False

    return Space("two-segment", membership=member, sampler=sampler, ambient_dim=2)


SEGMENT_W = RealModularMetricFn(lambda lam, p, q: segment_modular(lam, p, q), convex=False, name="segment_modular")


def _grid(step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError("grid_step must be positive")
    n = int(round((HIGH - LOW) / step)) + 1
    return np.linspace(LOW, HIGH, max(n, 2))


def audit_contraction_claim(grid_step: float = DEFAULT_GRID_STEP) -> dict:
    """Sup of ``w(Tp, Tq) / w(p, q)`` over ``p != q`` on the grid, per segment case.

    The ratio is computed with ``lam`` in place at each value of
    :data:`LAMBDAS`; ``lambda_spread`` is the largest change of a case's sup
    across them.
    """
    g = _grid(grid_step)
    cases = {}
    for s1, s2 in (("A", "A"), ("B", "B"), ("A", "B")):
        t1, t2 = _t_axis(s1, g), _t_axis(s2, g)
        per_lam = []
        for lam in LAMBDAS:
            best, arg = -math.inf, None
            for r0 in range(0, g.size, _ROW_CHUNK):
                u1 = g[r0 : r0 + _ROW_CHUNK, None]
                v1 = t1[1][r0 : r0 + _ROW_CHUNK, None]
                den = _scaled(s1, u1, s2, g[None, :]) / lam
                num = _scaled(t1[0], v1, t2[0], t2[1][None, :]) / lam
                with np.errstate(invalid="ignore", divide="ignore"):
                    ratio = np.where(den > 0, num / den, -np.inf)
                i = int(np.argmax(ratio))
                if ratio.flat[i] > best:
                    best = float(ratio.flat[i])
                    arg = (float(u1[i // g.size, 0]), float(g[i % g.size]))
            per_lam.append((best, arg))
        sups = [s for s, _ in per_lam]
        cases[f"{s1}{s2}"] = {
            "sup_ratio": sups[0],
            "argmax": {"p": [s1, per_lam[0][1][0]], "q": [s2, per_lam[0][1][1]]},
            "lambda_spread": max(sups) - min(sups),
        }
    top = max(cases, key=lambda k: cases[k]["sup_ratio"])
    sup = cases[top]["sup_ratio"]
    return {
        "sup_ratio": sup,
        "attained_on": top,
        "cases": cases,
        "grid_points": int(g.size),
        "verdict": CONFIRMED if sup <= CLAIMED_CONTRACTION + 1e-12 else DISCREPANCY,
    }


def audit_cross_bound(grid_step: float = DEFAULT_GRID_STEP) -> dict:
    """Infimum of ``lam * w_lam(A(a), B(b))`` next to the printed bound ``7/3``."""
    g = _grid(grid_step)
    vals = _scaled("A", g[:, None], "B", g[None, :])
    i = int(np.argmin(vals))
    inf = float(vals.flat[i])
    return {
        "computed_infimum": inf,
        "argmin": {"a": float(g[i // g.size]), "b": float(g[i % g.size])},
        "printed_bound": PRINTED_CROSS_BOUND,
        "verdict": CONFIRMED if abs(inf - PRINTED_CROSS_BOUND) <= 1e-9 else DISCREPANCY,
        # single-segment confinement of Cauchy sequences only needs a positive gap
        "dichotomy_survives": inf > 0,
    }


def audit_no_fixed_point(grid_step: float = DEFAULT_GRID_STEP) -> dict:
    """Minimum of ``lam * w_lam(Tx, x)`` over the grid and a segment-swap check."""
    g = _grid(grid_step)
    mins = {}
    spread = 0.0
    for seg in ("A", "B"):
        ts, tu = _t_axis(seg, g)
        vals = [_scaled(ts, tu, seg, g) / lam * lam for lam in LAMBDAS]
        spread = max(spread, float(np.max(np.abs(vals[0] - vals[-1]))))
        i = int(np.argmin(vals[0]))
        mins[seg] = {"min": float(vals[0][i]), "at": float(g[i])}
    swaps = all(_t_axis(seg, 1.0)[0] != seg for seg in ("A", "B"))
    top = min(mins, key=lambda k: mins[k]["min"])
    gmin = mins[top]["min"]
    return {
        "min_scaled_distance": gmin,
        "attained_on": top,
        "per_segment": mins,
        "lambda_spread": spread,
        "segment_swap": swaps,
        "verdict": CONFIRMED if gmin > 0 and swaps else DISCREPANCY,
    }


def audit_self_map(grid_step: float = DEFAULT_GRID_STEP) -> dict:
    """Every grid ``b`` whose image ``T(B(b)) = (b/2, 0)`` is outside ``X``."""
    g = _grid(grid_step)
    bad_b = [float(b) for b in g if as_segpoint(segment_map(B(float(b)))) is None]
    bad_a = [float(a) for a in g if as_segpoint(segment_map(A(float(a)))) is None]
    return {
        "violating_b_count": len(bad_b),
        "violating_b_min": min(bad_b) if bad_b else None,
        "violating_b_max": max(bad_b) if bad_b else None,
        "b_equal_1_in_X": as_segpoint(segment_map(B(1.0))) is not None,
        "violating_a_count": len(bad_a),
        "grid_points": int(g.size),
        "verdict": REFUTED_HYPOTHESIS if bad_b or bad_a else CONFIRMED,
    }


@dataclass(frozen=True)
class Dichotomy:
    classification: str
    cauchy_window: bool
    cross_distance: float | None
    tail_diameter: float | None
    note: str = "finite-window classification of the last half of the sequence"


def audit_cauchy_dichotomy(seq, lam: float = 1.0, tol: float = 1e-2,
                           grid_step: float = DEFAULT_GRID_STEP) -> Dichotomy:
    """Classify a finite sequence of points of ``X`` against the segment dichotomy.

    A tail visiting both segments contains a cross pair at scaled distance
    at least the computed cross infimum, so it cannot be Cauchy.  A tail
    confined to one segment is a Cauchy window when its scaled diameter is
    at most ``tol``.
    """
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    tail = seq[len(seq) // 2:]
    segs = {p.segment for p in tail}
    if len(segs) == 2:
        cross_inf = audit_cross_bound(grid_step)["computed_infimum"]
        pair = next((p, q) for p in tail for q in tail if p.segment != q.segment)
        dist = lam * segment_modular(lam, *pair)
        return Dichotomy("not_cauchy", False, dist, None, note=f"cross infimum {cross_inf!r}")
    diam = max((lam * segment_modular(lam, p, q) for i, p in enumerate(tail) for q in tail[i + 1:]),
               default=0.0)
    return Dichotomy(f"confined_{segs.pop()}", diam <= tol, None, diam)


def _claim(claim, paper_value, computed_value, verdict, **details) -> dict:
    out = {"claim": claim, "paper_value": paper_value, "computed_value": computed_value,
           "verdict": verdict}
    if details:
        out["details"] = details
    return out


def _label(p) -> str:
    return axis_of(p)[0]


def run_counterexample(grid_step: float = DEFAULT_GRID_STEP, samples: int = 10_000,
                       seed: int = 0) -> dict:
    """All audits of the counterexample, collected as a claim ledger."""
    contraction = audit_contraction_claim(grid_step)
    cross = audit_cross_bound(grid_step)
    nofix = audit_no_fixed_point(grid_step)
    selfmap = audit_self_map(grid_step)
    sampled_selfmap = self_map_audit(segment_map, segment_space(), min(samples, 2000), seed)
    modular = audit_real_modular(SEGMENT_W, segment_space(), samples, convex=False, seed=seed)

    n = 1000
    dich = {
        "alternating": audit_cauchy_dichotomy([A(1.0) if i % 2 == 0 else B(1.0) for i in range(n)]),
        "constant": audit_cauchy_dichotomy([A(0.7)] * n),
        "a_half_plus_1_over_n": audit_cauchy_dichotomy([A(0.5 + 1.0 / k) for k in range(2, n + 2)]),
    }
    dich_ok = (dich["alternating"].classification == "not_cauchy"
               and all(d.classification == "confined_A" and d.cauchy_window
                       for k, d in dich.items() if k != "alternating"))

    spec = ContractionSpec(segment_map_step, CLAIMED_CONTRACTION, np.ones(1), name="segment-map")
    probe = uniqueness_probe(spec, SEGMENT_W, [A(1.0), B(1.0), A(0.75)], lam_grid=LAMBDAS,
                             tol=1e-9, max_iter=200, space=segment_space(), label=_label)
    orbit = picard(spec, SEGMENT_W, A(1.0), lam_grid=LAMBDAS, tol=1e-9, max_iter=200, space=segment_space())

    claims = [
        _claim("w is a modular metric on X", "modular metric", modular.verdict,
               CONFIRMED if modular.passed else DISCREPANCY,
               samples=samples, violations=modular.violations),
        _claim("T is a contraction with k = 3/4", CLAIMED_CONTRACTION, contraction["sup_ratio"],
               contraction["verdict"], attained_on=contraction["attained_on"],
               cases={k: v["sup_ratio"] for k, v in contraction["cases"].items()},
               note="the contraction definition lets k depend on the pair; the uniform k = 3/4 is audited"),
        _claim("cross-segment lower bound lam*w >= 7/3", PRINTED_CROSS_BOUND,
               cross["computed_infimum"], cross["verdict"], argmin=cross["argmin"],
               dichotomy_survives=cross["dichotomy_survives"]),
        _claim("Cauchy sequences are eventually confined to one segment", "one segment",
               {k: d.classification for k, d in dich.items()},
               CONFIRMED if dich_ok else DISCREPANCY),
        _claim("T has no fixed point", "no fixed point", nofix["min_scaled_distance"],
               nofix["verdict"], attained_on=nofix["attained_on"],
               segment_swap=nofix["segment_swap"]),
        _claim("T maps X_w into X_w", "T: X_w -> X_w",
               {"violating_b": [selfmap["violating_b_min"], selfmap["violating_b_max"]],
                "violating_b_count": selfmap["violating_b_count"],
                "b_equal_1_in_X": selfmap["b_equal_1_in_X"],
                "sampled_violations": sampled_selfmap.violations},
               selfmap["verdict"]),
        _claim("Picard iterates converge to the fixed point", "converges",
               {"verdict": probe.verdict, "orbit_from_A(1)": orbit.reason},
               REFUTED_HYPOTHESIS if probe.verdict != "unique" else CONFIRMED,
               diagnosis=probe.diagnosis),
        _claim("the example refutes the contraction fixed point theorem", "refuted",
               "T is not a self-map of X_w",
               REFUTED_HYPOTHESIS if selfmap["verdict"] == REFUTED_HYPOTHESIS else CONFIRMED),
    ]
    return {"schema_version": SCHEMA_VERSION, "subject": "two-segment", "grid_step": grid_step,
            "seed": seed, "claims": claims}
