"""Polyhedral cones in R^m and the order relations they induce.

A vector of R^m stands for a real function on the m-point set Y = {1..m},
so R^m with the sup-norm plays the role of C(Y).  A cone is given in
halfspace form ``P = {y : A y >= 0}``; it induces

* ``a <= b``  (partial_le)   iff  b - a in P
* ``a < b``   (strict_lt)    iff  a <= b and a != b
* ``a << b``  (way_below)    iff  b - a in int P, i.e. A (b - a) > margin
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

RANK_RTOL = 1e-10
WITNESS_SCALE_CAP = 10**6
_HALVING_CAP = 200


class ConeError(ValueError):
    """Raised for invalid cone data or violated preconditions."""


class DimensionError(ConeError):
    pass


def as_vector(y, m: int | None = None) -> np.ndarray:
    """Coerce ``y`` to a finite 1-D float vector, optionally of length ``m``."""
    if type(y) is np.ndarray and y.ndim == 1 and y.dtype == np.float64 and 0 < y.size <= 32:
        # small vectors dominate; a Python-level scan beats a ufunc reduction here
        if (m is None or y.size == m) and all(map(math.isfinite, y.tolist())):
            return y
    v = np.atleast_1d(np.asarray(y, dtype=float))
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ConeError(f"vector has non-finite coordinates: {v!r}")
    if m is not None and v.size != m:
        raise DimensionError(f"dimension mismatch: expected {m}, got {v.size}")
    return v


def sup_norm(y) -> float:
    return float(np.max(np.abs(y)))


def _find_slater_point(A: np.ndarray) -> np.ndarray | None:
    # max t  s.t.  A y >= t,  -1 <= y <= 1,  t <= 1
    from scipy.optimize import linprog

    k, m = A.shape
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-A, np.ones((k, 1))])
    bounds = [(-1.0, 1.0)] * m + [(None, 1.0)]
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(k), bounds=bounds, method="highs")
    if res.status != 0 or -res.fun <= 1e-12:
        return None
    y = res.x[:m]
    return y / np.max(np.abs(y))


@dataclass(frozen=True, eq=False)
class PolyCone:
    """Closed convex pointed cone ``{y : A y >= 0}`` with nonempty interior.

    Parameters
    ----------
    halfspaces : array_like, shape (k, m)
        Inward normals ``A``.
    slater_point : array_like, optional
        A point with ``A e > 0``.  Found by linear programming if omitted.
    interior_margin : float
        ``y`` is interior iff ``A y > interior_margin`` componentwise.
    """

    halfspaces: np.ndarray
    slater_point: np.ndarray | None = None
    interior_margin: float = 0.0
    name: str = field(default="cone", compare=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.halfspaces, dtype=float))
        if A.ndim != 2 or A.size == 0:
            raise ConeError("halfspace matrix must be a non-empty 2-D array")
        if not np.all(np.isfinite(A)):
            raise ConeError("halfspace matrix has non-finite entries")
        if self.interior_margin < 0:
            raise ConeError("interior_margin must be >= 0")
        s = np.linalg.svd(A, compute_uv=False)
        rank = int(np.sum(s > RANK_RTOL * s[0])) if s[0] > 0 else 0
        if rank < A.shape[1]:
            raise ConeError(
                f"cone is not pointed: halfspace matrix has rank {rank} < {A.shape[1]}"
            )
        if self.slater_point is None:
            e = _orthant_slater(A)
            if e is None:
                e = _find_slater_point(A)
            if e is None:
                raise ConeError("cone has empty interior (no Slater point)")
        else:
            e = as_vector(self.slater_point, A.shape[1])
        if not np.all(A @ e > self.interior_margin):
            raise ConeError(f"slater point {e!r} is not interior")
        A = A.copy()
        e = e.copy()
        A.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "halfspaces", A)
        object.__setattr__(self, "slater_point", e)
        object.__setattr__(self, "interior_margin", float(self.interior_margin))

    @property
    def dim(self) -> int:
        return self.halfspaces.shape[1]

    @cached_property
    def is_orthant(self) -> bool:
        return _orthant_slater(self.halfspaces) is not None

    def _vec(self, y) -> np.ndarray:
        return as_vector(y, self.halfspaces.shape[1])

    def contains(self, y, tol: float = 0.0) -> bool:
        return min((self.halfspaces @ self._vec(y)).tolist()) >= -tol

    def interior_contains(self, y) -> bool:
        return min((self.halfspaces @ self._vec(y)).tolist()) > self.interior_margin

    def partial_le(self, a, b, tol: float = 0.0) -> bool:
        return self.contains(self._vec(b) - self._vec(a), tol)

    def strict_lt(self, a, b) -> bool:
        a, b = self._vec(a), self._vec(b)
        return self.partial_le(a, b) and not np.array_equal(a, b)

    def way_below(self, a, b) -> bool:
        return self.interior_contains(self._vec(b) - self._vec(a))

    def le_approx(self, a, b, rtol: float = 1e-12) -> bool:
        """``a <= b`` up to a relative slack on each facet value."""
        Aa = self.halfspaces @ self._vec(a)
        Ab = self.halfspaces @ self._vec(b)
        return bool((Ab - Aa >= -rtol * (1.0 + np.abs(Aa) + np.abs(Ab))).all())

    def slack(self, a, b) -> float:
        """Smallest facet value of ``b - a``; negative means ``a <= b`` fails."""
        return float(np.min(self.halfspaces @ (self._vec(b) - self._vec(a))))

    def to_dict(self) -> dict:
        return {
            "halfspaces": self.halfspaces.tolist(),
            "slater_point": self.slater_point.tolist(),
            "interior_margin": self.interior_margin,
        }

    @classmethod
    def from_dict(cls, data: dict, name: str = "cone") -> "PolyCone":
        try:
            A = data["halfspaces"]
        except (KeyError, TypeError):
            raise ConeError("cone description needs a 'halfspaces' entry") from None
        return cls(
            A,
            slater_point=data.get("slater_point"),
            interior_margin=float(data.get("interior_margin", 0.0)),
            name=name,
        )


def _orthant_slater(A: np.ndarray) -> np.ndarray | None:
    # rows normalised to unit standard basis vectors, all m of them present
    m = A.shape[1]
    seen = set()
    for row in A:
        nz = np.flatnonzero(row)
        if nz.size != 1 or row[nz[0]] <= 0:
            return None
        seen.add(int(nz[0]))
    return np.ones(m) if len(seen) == m else None


def orthant(m: int) -> PolyCone:
    return PolyCone(np.eye(m), slater_point=np.ones(m), name=f"orthant{m}")


def _hexcone() -> np.ndarray:
    t = np.arange(6) * np.pi / 3
    return np.column_stack([np.cos(t), np.sin(t), np.ones(6)])


FIXED_CONES = {
    "wedge2": ([[1.0, 0.0], [1.0, 1.0]], [1.0, 0.5]),
    "pyramid3": ([[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]], [0.0, 0.0, 1.0]),
    "hexcone3": (_hexcone(), [0.0, 0.0, 1.0]),
}


def fixed_cone(name: str) -> PolyCone:
    if name.startswith("orthant"):
        return orthant(int(name[len("orthant"):] or 2))
    A, e = FIXED_CONES[name]
    return PolyCone(A, slater_point=e, name=name)


def load_cone(path: str | Path) -> PolyCone:
    """Read a cone from JSON ``{"halfspaces": ..., "slater_point": ..., "interior_margin": ...}``."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return PolyCone.from_dict(json.load(fh), name=path.stem)


@dataclass(frozen=True)
class OrderWitness:
    """A value certifying one of the order-witness relations.

    ``kind == "between"``: ``value`` is a vector ``c`` with ``c << c1`` and ``c << c2``.
    ``kind == "scale"``: ``value`` is an integer ``n0`` with ``a << n0 c``.
    """

    kind: str
    value: object
    args: tuple = ()

    def verify(self, cone: PolyCone) -> bool:
        if self.kind == "between":
            c = self.value
            return cone.interior_contains(c) and all(cone.way_below(c, ci) for ci in self.args)
        if self.kind == "scale":
            a, c = self.args
            return cone.way_below(a, self.value * as_vector(c))
        raise ValueError(f"unknown witness kind {self.kind!r}")


def witness_between(cone: PolyCone, c1, c2) -> np.ndarray:
    """Interior ``c`` with ``c << c1`` and ``c << c2``, as ``t e`` for halving ``t``."""
    c1, c2 = cone._vec(c1), cone._vec(c2)
    if not (cone.interior_contains(c1) and cone.interior_contains(c2)):
        raise ConeError("witness_between needs both arguments interior")
    e = cone.slater_point
    t = 1.0
    for _ in range(_HALVING_CAP):
        c = t * e
        if cone.interior_contains(c) and cone.way_below(c, c1) and cone.way_below(c, c2):
            return c
        t *= 0.5
    raise ConeError("no witness found; arguments are within the interior margin")


def witness_scale(cone: PolyCone, a, c, cap: int = WITNESS_SCALE_CAP) -> int:
    """Smallest positive integer ``n`` with ``a << n c`` (linear scan up to ``cap``)."""
    a, c = cone._vec(a), cone._vec(c)
    if not cone.contains(a):
        raise ConeError("witness_scale needs a in P")
    if not cone.interior_contains(c):
        raise ConeError("witness_scale needs c interior")
    Aa = cone.halfspaces @ a
    Ac = cone.halfspaces @ c
    block = 4096
    for start in range(1, cap + 1, block):
        n = np.arange(start, min(start + block, cap + 1), dtype=float)
        ok = np.all(np.outer(n, Ac) - Aa > cone.interior_margin, axis=1)
        hit = np.flatnonzero(ok)
        if hit.size:
            return int(n[hit[0]])
    raise ConeError(f"no scale found within {cap} steps; c is not interior within tolerance")


@dataclass(frozen=True)
class NormalConstant:
    value: float
    exact: bool
    samples: int


def normal_constant(
    cone: PolyCone, norm: str = "sup", samples: int = 4096, seed: int = 0
) -> NormalConstant:
    """Normal constant of ``cone`` under the sup-norm.

    Exact (= 1) for the orthant; otherwise a sampled lower bound of
    ``sup ||a|| / ||b||`` over ``0 <= a <= b``, ``b != 0``.
    """
    if norm != "sup":
        raise ValueError(f"unsupported norm {norm!r}")
    if cone.is_orthant:
        return NormalConstant(1.0, True, 0)
    rng = np.random.default_rng(seed)
    a = sample_cone(cone, rng, samples)
    d = sample_cone(cone, rng, samples)
    b = a + d
    nb = np.max(np.abs(b), axis=1)
    na = np.max(np.abs(a), axis=1)
    keep = nb > 0
    ratios = na[keep] / nb[keep]
    # a = b is always feasible, so K >= 1
    best = max(1.0, float(ratios.max())) if ratios.size else 1.0
    return NormalConstant(best, False, samples)


def pointwise_invert(f, cone: PolyCone | None = None) -> np.ndarray:
    """Pointwise reciprocal of an interior function of the orthant."""
    f = as_vector(f)
    if cone is not None:
        if not cone.is_orthant:
            raise ConeError("pointwise inversion is defined for the orthant only")
        cone._vec(f)
    if not min(f.tolist()) > 0:
        raise ConeError(f"{f!r} is not interior: it has a non-positive value")
    return 1.0 / f


def sample_interior(
    cone: PolyCone, rng: np.random.Generator, n: int, low: float = 0.05, high: float = 20.0
) -> np.ndarray:
    """``n`` interior points spread over scales ``[low, high]`` (rows of the result)."""
    m = cone.dim
    if cone.is_orthant:
        out = np.exp(rng.uniform(np.log(low), np.log(high), size=(n, m)))
        return np.where(out > cone.interior_margin, out, cone.interior_margin + low)
    e = cone.slater_point
    out = np.empty((n, m))
    filled = 0
    while filled < n:
        s = np.exp(rng.uniform(np.log(low), np.log(high), size=(n, 1)))
        cand = s * (e + rng.normal(scale=0.5, size=(n, m)))
        ok = np.all(cand @ cone.halfspaces.T > cone.interior_margin, axis=1)
        take = cand[ok][: n - filled]
        out[filled : filled + len(take)] = take
        filled += len(take)
    return out


def sample_cone(cone: PolyCone, rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """``n`` points of ``P`` by rejection from a Gaussian (rows of the result)."""
    m = cone.dim
    if cone.is_orthant:
        return np.abs(rng.normal(scale=scale, size=(n, m)))
    out = np.empty((n, m))
    filled = 0
    while filled < n:
        cand = rng.normal(scale=scale, size=(4 * n, m))
        ok = np.all(cand @ cone.halfspaces.T >= 0, axis=1)
        take = cand[ok][: n - filled]
        out[filled : filled + len(take)] = take
        filled += len(take)
    return out


def sample_vectors(rng: np.random.Generator, n: int, m: int, scale: float = 3.0) -> np.ndarray:
    return rng.normal(scale=scale, size=(n, m))


__all__: Sequence[str] = [
    "ConeError",
    "DimensionError",
    "FIXED_CONES",
    "NormalConstant",
    "OrderWitness",
    "PolyCone",
    "as_vector",
    "fixed_cone",
    "load_cone",
    "normal_constant",
    "orthant",
    "pointwise_invert",
    "sample_cone",
    "sample_interior",
    "sample_vectors",
    "sup_norm",
    "witness_between",
    "witness_scale",
]
