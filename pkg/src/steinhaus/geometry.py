"""Vectors, norms, gauges and linear functionals on R^d (d <= 3)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, GeometryError, OracleInconsistency

MAX_DIM = 3
DEFAULT_GAUGE_TOL = 1e-9
DUAL_DIRECTIONS = 4096


def as_vector(x, dim=None) -> np.ndarray:
    """Return ``x`` as a float vector, checking its dimension."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or not 1 <= v.shape[0] <= MAX_DIM:
        raise DimensionError(f"expected a vector in R^1..R^{MAX_DIM}, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    return v


def as_points(x, dim=None) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2:
        raise DimensionError(f"expected an (N, d) array, got shape {pts.shape}")
    if dim is not None and pts.shape[1] != dim:
        raise DimensionError(f"dimension mismatch: expected {dim}, got {pts.shape[1]}")
    return pts


def direction_fan(dim: int, n: int) -> np.ndarray:
    """Deterministic, roughly uniform unit directions (Euclidean) in R^dim."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(ang), np.sin(ang)])
    # Fibonacci lattice on the sphere
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.pi * (3.0 - math.sqrt(5.0)) * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


# ---------------------------------------------------------------------------
# Norms


class Norm:
    """Common interface of the ambient norms.

    Subclasses evaluate vectorised over the last axis and provide the dual
    norm of a linear functional.
    """

    dim: int | None = None

    def __call__(self, x):
        raise NotImplementedError

    def dual(self, coeffs) -> float:
        raise NotImplementedError

    def lipschitz(self, dim: int) -> tuple[float, float]:
        """Constants (lo, hi) with lo*|x|_2 <= |x| <= hi*|x|_2."""
        raise NotImplementedError

    def to_json(self, body_ids=None):
        raise NotImplementedError


@dataclass(frozen=True)
class PNorm(Norm):
    """(Weighted) l^p norm.

    For finite p the weighted norm is ``(sum w_i |x_i|^p)^(1/p)``; for
    ``p = inf`` it is ``max w_i |x_i|``.
    """

    p: float = 2.0
    weights: tuple | None = None

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):
            raise GeometryError(f"p must lie in [1, inf], got {self.p}")
        object.__setattr__(self, "p", p)
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if not w or min(w) <= 0.0 or len(w) > MAX_DIM:
                raise GeometryError("weights must be positive, one per coordinate")
            object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return None if self.weights is None else len(self.weights)

    def _scale(self, d):
        if self.weights is None:
            return np.ones(d)
        if len(self.weights) != d:
            raise DimensionError(f"norm has {len(self.weights)} weights, vector has {d} coordinates")
        w = np.asarray(self.weights)
        return w if math.isinf(self.p) else w ** (1.0 / self.p)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = np.abs(x) * self._scale(x.shape[-1])
        m = y.max(axis=-1)
        if math.isinf(self.p):
            out = m
        else:
            # factor out the largest coordinate: exact under dyadic rescaling
            r = y / np.expand_dims(np.where(m > 0, m, 1.0), -1)
            if self.p == 1.0:
                s = r.sum(axis=-1)
            elif self.p == 2.0:
                s = np.sqrt((r * r).sum(axis=-1))
            else:
                s = (r ** self.p).sum(axis=-1) ** (1.0 / self.p)
            out = m * s
        return float(out) if np.ndim(out) == 0 else out

    def dual(self, coeffs) -> float:
        f = np.asarray(coeffs, dtype=float)
        if self.weights is None:
            g = np.abs(f)
        else:
            w = np.asarray(self.weights)
            if len(w) != len(f):
                raise DimensionError("functional and norm weights differ in dimension")
            g = np.abs(f) / (w if math.isinf(self.p) else w ** (1.0 / self.p))
        if self.p == 1.0:
            return float(g.max())
        if math.isinf(self.p):
            return float(g.sum())
        q = self.p / (self.p - 1.0)
        return float(PNorm(q)(g))

    def gradient(self, x):
        """Unit-dual supporting functional at ``x != 0`` (1 < p < inf)."""
        x = np.asarray(x, dtype=float)
        nx = self(x)
        if nx == 0:
            raise GeometryError("gradient of a norm at the origin")
        w = np.ones_like(x) if self.weights is None else np.asarray(self.weights)
        y = x / nx
        return w * np.sign(y) * np.abs(y) ** (self.p - 1.0)

    def lipschitz(self, dim):
        w = self._scale(dim)
        if math.isinf(self.p):
            return float(w.min()) / math.sqrt(dim), float(w.max())
        e = 1.0 / self.p - 0.5
        lo = dim ** min(0.0, e) * float(w.min())
        hi = dim ** max(0.0, e) * float(w.max())
        return lo, hi

    def to_json(self, body_ids=None):
        p = "inf" if math.isinf(self.p) else self.p
        if self.weights is None:
            return {"kind": "p", "p": p}
        return {"kind": "weighted", "p": p, "w": list(self.weights)}


class GaugeNorm(Norm):
    """Minkowski functional of a convex body with the origin in its interior."""

    def __init__(self, body, tol=DEFAULT_GAUGE_TOL):
        self.body = body
        self.tol = tol

    @property
    def dim(self):
        return self.body.dim

    def __eq__(self, other):
        return isinstance(other, GaugeNorm) and (
            other.body is self.body or other.body.to_json() == self.body.to_json()
        )

    def __hash__(self):
        return id(self.body)

    def __repr__(self):
        return f"GaugeNorm({self.body!r})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        exact = getattr(self.body, "gauge", None)
        if exact is not None:
            out = exact(x)
            if out is not None:
                return out
        if x.ndim == 1:
            return gauge_eval(self.body, x, self.tol)
        flat = x.reshape(-1, x.shape[-1])
        vals = np.array([gauge_eval(self.body, v, self.tol) for v in flat])
        return vals.reshape(x.shape[:-1])

    def dual(self, coeffs) -> float:
        support = getattr(self.body, "support", None)
        if support is not None:
            val = support(coeffs)
            if val is not None:
                return float(val)
        return dual_norm_estimate(self, LinearFunctional(coeffs), DUAL_DIRECTIONS)

    def lipschitz(self, dim):
        lo_r = self.body.bounding_radius(np.zeros(dim))
        hi_r = self.body.clearance(np.zeros(dim))
        if hi_r <= 0:
            raise GeometryError("gauge body does not contain the origin in its interior")
        return 1.0 / lo_r, 1.0 / hi_r

    def to_json(self, body_ids=None):
        if body_ids and id(self.body) in body_ids:
            return {"kind": "gauge", "body": body_ids[id(self.body)]}
        return {"kind": "gauge", "body": self.body.to_json()}


def norm_eval(norm: Norm, x) -> float:
    """Evaluate ``norm`` at the vector ``x``."""
    v = as_vector(x, norm.dim)
    return float(norm(v))


# ---------------------------------------------------------------------------
# Functionals and balls


@dataclass(frozen=True)
class LinearFunctional:
    coeffs: tuple
    unit_dual: bool = field(default=False, compare=False)

    def __post_init__(self):
        c = as_vector(self.coeffs)
        if not np.any(c):
            raise GeometryError("zero functional")
        object.__setattr__(self, "coeffs", tuple(float(v) + 0.0 for v in c))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.coeffs)

    @property
    def dim(self):
        return len(self.coeffs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionError("functional and vector differ in dimension")
        return x @ self.vector

    def __neg__(self):
        return LinearFunctional(tuple(-v for v in self.coeffs), self.unit_dual)

    def scaled(self, s: float) -> LinearFunctional:
        return LinearFunctional(tuple(s * v for v in self.coeffs))

    def normalized(self, norm: Norm) -> LinearFunctional:
        d = norm.dual(self.vector)
        return LinearFunctional(tuple(v / d for v in self.coeffs), unit_dual=True)

    def is_parallel(self, other: LinearFunctional, tol=1e-9) -> bool:
        a, b = self.vector, other.vector
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
        return bool(np.linalg.matrix_rank(np.vstack([a, b]), tol=tol) < 2)


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float
    norm: Norm = PNorm(2.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(as_vector(self.center)))

    def contains(self, x, strict=True) -> bool:
        d = self.norm(np.asarray(x, dtype=float) - np.asarray(self.center))
        return bool(d < self.radius) if strict else bool(d <= self.radius)


# ---------------------------------------------------------------------------
# Gauges and dual norms


def gauge_eval(body, x, tol: float = DEFAULT_GAUGE_TOL) -> float:
    """Minkowski functional ``inf{t > 0 : x in t*body}`` by bisection.

    Only the membership oracle of ``body`` is used; the bracket comes from an
    inner ball (clearance of the origin) and an outer bounding radius.
    """
    x = as_vector(x, body.dim)
    origin = np.zeros(body.dim)
    rho = body.clearance(origin)
    if not rho > 0:
        raise GeometryError("origin is not an interior point of the body")
    big = body.bounding_radius(origin)
    if not np.isfinite(big):
        raise GeometryError("body is unbounded")
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return 0.0
    lo, hi = nx / big, nx / rho * (1.0 + 1e-9)
    if not body.contains(x / hi):
        raise OracleInconsistency(f"{x} not inside {hi} * body although the inner ball says so")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if body.contains(x / mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def dual_norm_estimate(norm: Norm, f: LinearFunctional, nsamples: int = DUAL_DIRECTIONS) -> float:
    """Dual norm of ``f``: Hoelder closed form for l^p norms, otherwise a
    lower bound from a deterministic direction search with local refinement."""
    d = f.dim
    if nsamples < 2 * d:
        raise GeometryError(f"need at least {2 * d} sample directions")
    if isinstance(norm, PNorm):
        return norm.dual(f.vector)
    dirs = direction_fan(d, nsamples)
    vals = f(dirs) / norm(dirs)
    best = int(np.argmax(vals))
    u, val = dirs[best], float(vals[best])
    step = 2.0 * np.pi / nsamples if d == 2 else math.sqrt(4.0 * np.pi / nsamples)
    # pattern search on the sphere, shrinking the step
    basis = np.eye(d)
    for _ in range(60):
        improved = False
        for e in basis:
            for s in (step, -step):
                cand = u + s * (e - (e @ u) * u)
                cand = cand / np.linalg.norm(cand)
                cv = float(f(cand) / norm(cand))
                if cv > val:
                    u, val, improved = cand, cv, True
        if not improved:
            step *= 0.5
            if step < 1e-14:
                break
    return val


def support_functionals(body, x0, tol: float = 1e-9, norm: Norm | None = None):
    """Supporting functionals (generators of the normal cone) at ``x0``.

    Returns a list of ``(LinearFunctional, c)`` with ``f(x0) = c`` and
    ``f <= c`` on the body, each normalised to unit dual norm with respect to
    ``norm`` (default: the body's own norm for norm balls, else l^2).
    """
    x0 = as_vector(x0, body.dim)
    raw = body.normal_cone(x0, tol)
    if not raw:
        raise GeometryError("no supporting functional found at boundary point")
    if norm is None:
        norm = getattr(body, "norm", None) or PNorm(2.0)
    out = []
    for coeffs in raw:
        f = LinearFunctional(tuple(coeffs)).normalized(norm)
        out.append((f, float(f(x0))))
    return out
