"""Convex bodies, boundary patches, flatness detection and gauge renorming."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DimensionError, GeometryError, NotOnBoundaryError
from .geometry import (
    LinearFunctional,
    Norm,
    PNorm,
    GaugeNorm,
    as_points,
    as_vector,
    direction_fan,
    support_functionals,
)

BOUNDARY_TOL = 1e-9
FLAT_TOL = 1e-7
_SCAN_STEPS = 720
_BISECT_ITERS = 60


class ConvexBody:
    """Closed convex set with interior, described by a membership oracle.

    Subclasses may expose exact shortcuts (``ray_exit``, ``gauge``,
    ``support``); returning ``None`` from them means "use the oracle".
    """

    dim: int

    def contains(self, x, tol=0.0):
        raise NotImplementedError

    def clearance(self, point) -> float:
        raise NotImplementedError

    def bounding_radius(self, point) -> float:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def interior_point(self) -> np.ndarray:
        raise NotImplementedError

    def boundary_residual(self, x) -> float:
        raise NotImplementedError

    def normal_cone(self, x0, tol):
        raise NotImplementedError

    def ray_exit(self, z0, dirs):
        return None

    def gauge(self, x):
        return None

    def support(self, coeffs):
        return None

    def transformed(self, scale: float, shift) -> ConvexBody:
        raise NotImplementedError

    def to_json(self, body_ids=None):
        raise NotImplementedError


class NormBall(ConvexBody):
    """``{x : norm(x - center) <= radius}``."""

    def __init__(self, norm: Norm, radius: float = 1.0, center=None, dim=None):
        if center is None:
            dim = dim or norm.dim
            if dim is None:
                raise DimensionError("NormBall needs a center or an explicit dimension")
            center = np.zeros(dim)
        self.center = as_vector(center, norm.dim)
        self.dim = self.center.shape[0]
        if not radius > 0:
            raise GeometryError("ball radius must be positive")
        self.norm = norm
        self.radius = float(radius)
        self._lo, self._hi = norm.lipschitz(self.dim)

    def __repr__(self):
        return f"NormBall({self.norm!r}, radius={self.radius}, center={self.center.tolist()})"

    def contains(self, x, tol=0.0):
        d = self.norm(np.asarray(x, dtype=float) - self.center)
        return d <= self.radius + tol

    def clearance(self, point):
        return (self.radius - self.norm(as_vector(point, self.dim) - self.center)) / self._hi

    def bounding_radius(self, point):
        return float(np.linalg.norm(as_vector(point, self.dim) - self.center)) + self.radius / self._lo

    def diameter(self):
        return 2.0 * self.radius / self._lo

    def interior_point(self):
        return self.center.copy()

    def boundary_residual(self, x):
        return float(self.norm(as_vector(x, self.dim) - self.center) - self.radius)

    @property
    def is_polyhedral(self):
        return isinstance(self.norm, PNorm) and (self.norm.p == 1.0 or math.isinf(self.norm.p))

    def as_polytope(self) -> Polytope:
        if not self.is_polyhedral:
            raise GeometryError("only l^1 / l^inf balls are polytopes")
        d = self.dim
        w = np.ones(d) if self.norm.weights is None else np.asarray(self.norm.weights)
        if self.norm.p == 1.0:
            verts = np.vstack([np.diag(self.radius / w), -np.diag(self.radius / w)])
        else:
            signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T
            verts = signs * (self.radius / w)
        return Polytope(verts + self.center)

    def normal_cone(self, x0, tol):
        x0 = as_vector(x0, self.dim)
        if abs(self.boundary_residual(x0)) > tol * max(1.0, self.radius):
            raise NotOnBoundaryError(f"{x0.tolist()} is not on the boundary of {self!r}")
        if self.is_polyhedral:
            return self.as_polytope().normal_cone(x0, tol)
        if isinstance(self.norm, PNorm):
            return [self.norm.gradient(x0 - self.center)]
        # ball of a gauge norm: c + r*V
        return self.norm.body.normal_cone((x0 - self.center) / self.radius, tol)

    def ray_exit(self, z0, dirs):
        if not np.array_equal(np.asarray(z0, dtype=float), self.center):
            return None
        return self.radius / self.norm(dirs)

    def gauge(self, x):
        if np.any(self.center):
            return None
        return self.norm(x) / self.radius

    def support(self, coeffs):
        f = np.asarray(coeffs, dtype=float)
        return float(f @ self.center + self.radius * self.norm.dual(f))

    def transformed(self, scale, shift):
        return NormBall(self.norm, scale * self.radius, scale * self.center + as_vector(shift, self.dim))

    def to_json(self, body_ids=None):
        return {
            "kind": "ball",
            "norm": self.norm.to_json(body_ids),
            "radius": self.radius,
            "center": self.center.tolist(),
        }


class Polytope(ConvexBody):
    """Convex hull of a finite vertex list (d = 2 or 3)."""

    def __init__(self, vertices):
        pts = as_points(vertices)
        if pts.shape[1] < 2:
            raise DimensionError("polytopes need d >= 2; use a NormBall in R^1")
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise GeometryError(f"degenerate polytope (no interior): {exc}") from None
        self.dim = pts.shape[1]
        self.points = pts
        self.vertices = pts[hull.vertices]
        eq = hull.equations
        self._normals = eq[:, :-1]
        self._offsets = -eq[:, -1]  # normals @ x <= offsets
        self._vol = hull.volume

    def __repr__(self):
        return f"Polytope({len(self.vertices)} vertices, d={self.dim})"

    def contains(self, x, tol=0.0):
        x = np.asarray(x, dtype=float)
        return np.max(x @ self._normals.T - self._offsets, axis=-1) <= tol

    def clearance(self, point):
        return float(np.min(self._offsets - self._normals @ as_vector(point, self.dim)))

    def bounding_radius(self, point):
        return float(np.max(np.linalg.norm(self.vertices - as_vector(point, self.dim), axis=1)))

    def diameter(self):
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))

    def interior_point(self):
        return self.vertices.mean(axis=0)

    def boundary_residual(self, x):
        return float(np.max(self._normals @ as_vector(x, self.dim) - self._offsets))

    def facets(self):
        """Unique (unit normal, offset) pairs; triangulated coplanar facets merged."""
        keys = np.round(np.column_stack([self._normals, self._offsets]), 9)
        _, idx = np.unique(keys, axis=0, return_index=True)
        idx = np.sort(idx)
        return self._normals[idx], self._offsets[idx]

    def normal_cone(self, x0, tol):
        x0 = as_vector(x0, self.dim)
        normals, offsets = self.facets()
        res = normals @ x0 - offsets
        scale = max(1.0, self.bounding_radius(np.zeros(self.dim)))
        if res.max() > tol * scale:
            raise NotOnBoundaryError(f"{x0.tolist()} lies outside the polytope")
        active = np.abs(res) <= tol * scale
        if not active.any():
            raise NotOnBoundaryError(f"{x0.tolist()} is an interior point")
        return [n.copy() for n in normals[active]]

    def ray_exit(self, z0, dirs):
        z0 = as_vector(z0, self.dim)
        slack = self._offsets - self._normals @ z0
        if slack.min() <= 0:
            return None
        rate = np.asarray(dirs, dtype=float) @ self._normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(rate > 0, slack / rate, np.inf)
        return t.min(axis=-1)

    def gauge(self, x):
        if self._offsets.min() <= 0:
            return None
        x = np.asarray(x, dtype=float)
        g = np.max(x @ (self._normals / self._offsets[:, None]).T, axis=-1)
        out = np.maximum(g, 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def support(self, coeffs):
        return float(np.max(self.vertices @ np.asarray(coeffs, dtype=float)))

    def inradius(self, norm: Norm) -> float:
        """Largest r with r * (unit ball of ``norm``) inside the polytope (origin-centred)."""
        normals, offsets = self.facets()
        return float(min(b / norm.dual(a) for a, b in zip(normals, offsets)))

    def transformed(self, scale, shift):
        return Polytope(scale * self.points + as_vector(shift, self.dim))

    def to_json(self, body_ids=None):
        return {"kind": "polytope", "vertices": self.points.tolist()}


class GaugeBody(Polytope):
    """Inner polytope of ``cl conv(cloud U r*B U -cloud)``.

    ``B`` is the unit ball of ``norm``, replaced by an inscribed polytope on a
    deterministic direction fan. ``offset`` records where the origin sits in
    the coordinates of the body the cloud was taken from.
    """

    def __init__(self, cloud, r, norm: Norm | None = None, offset=None, ball_points=None):
        cloud = as_points(cloud)
        d = cloud.shape[1]
        if not r > 0:
            raise GeometryError("gauge body ball radius must be positive")
        self.cloud = cloud
        self.r = float(r)
        self.ball_norm = norm or PNorm(2.0)
        if ball_points is None:
            ball_points = 256 if d == 2 else 1024
        u = direction_fan(d, ball_points)
        ball = self.r * u / np.asarray(self.ball_norm(u))[:, None]
        super().__init__(np.vstack([cloud, -cloud, ball]))
        self.offset = np.zeros(d) if offset is None else as_vector(offset, d)

    def __repr__(self):
        return f"GaugeBody({len(self.cloud)} cloud points, r={self.r})"

    def interior_point(self):
        return np.zeros(self.dim)

    def transformed(self, scale, shift):
        return Polytope(scale * self.points + as_vector(shift, self.dim))

    def to_json(self, body_ids=None):
        out = {"kind": "gauge", "cloud": self.cloud.tolist(), "r": self.r}
        if self.ball_norm != PNorm(2.0):
            out["norm"] = self.ball_norm.to_json(body_ids)
        if np.any(self.offset):
            out["offset"] = self.offset.tolist()
        return out


# ---------------------------------------------------------------------------
# Patches and verdicts


def sphere_radius(body: ConvexBody, ambient: Norm):
    """Radius R if ``body`` is the origin-centred R-ball of ``ambient``, else None."""
    if isinstance(body, NormBall) and body.norm == ambient and not np.any(body.center):
        return body.radius
    if isinstance(ambient, GaugeNorm) and (ambient.body is body or ambient.body.to_json() == body.to_json()):
        return 1.0
    return None


@dataclass(frozen=True)
class BoundaryPatch:
    """``boundary(body) ∩ (x0 + eps * B)`` with ``B`` the unit ball of ``ambient``."""

    body: ConvexBody
    x0: tuple
    eps: float
    ambient: Norm = field(default_factory=PNorm)

    def __post_init__(self):
        x0 = as_vector(self.x0, self.body.dim)
        object.__setattr__(self, "x0", tuple(x0.tolist()))
        scale = max(1.0, self.body.bounding_radius(np.zeros(self.body.dim)))
        if abs(self.body.boundary_residual(x0)) > BOUNDARY_TOL * scale:
            raise NotOnBoundaryError(f"x0={x0.tolist()} is not on the boundary")
        if not self.eps > 0:
            raise GeometryError("patch radius must be positive")
        if sphere_radius(self.body, self.ambient) == 1.0:
            if not self.eps < 1.0:
                raise GeometryError("patch radius on the unit sphere must lie in (0, 1)")
        elif not self.eps < self.body.diameter():
            raise GeometryError("patch radius must be smaller than the body diameter")

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.x0)

    def contains(self, pts, tol=BOUNDARY_TOL):
        """Patch membership: on the boundary within ``tol`` and strictly inside the ball."""
        pts = as_points(pts, self.body.dim)
        near = np.asarray(self.ambient(pts - self.center)).reshape(-1) < self.eps
        on = np.array([abs(self.body.boundary_residual(p)) <= tol for p in pts])
        return near & on

    def transformed(self, scale, shift) -> BoundaryPatch:
        body = self.body.transformed(scale, shift)
        ambient = self.ambient
        return BoundaryPatch(body, tuple(scale * self.center + np.asarray(shift)), scale * self.eps, ambient)

    def to_json(self, body_ids=None):
        return {
            "body": self.body.to_json(body_ids),
            "x0": list(self.x0),
            "eps": self.eps,
            "norm": self.ambient.to_json(body_ids),
        }

    @classmethod
    def from_json(cls, obj, bodies=None, base_dir=None) -> BoundaryPatch:
        from .serialize import norm_from_json

        body = body_from_json(obj["body"], bodies, base_dir)
        return cls(body, tuple(obj["x0"]), float(obj["eps"]), norm_from_json(obj["norm"], bodies))


@dataclass(frozen=True)
class Flat:
    functional: LinearFunctional
    c: float
    deviation: float

    variant = "Flat"


@dataclass(frozen=True)
class NotFlat:
    """Non-flat verdict.

    ``margin`` is the smallest, over candidate functionals, of the largest
    gap ``c - f(x)`` seen on the patch; ``witnesses`` holds one
    ``(functional, c, point, gap)`` per candidate, and ``functional`` /
    ``z0`` is the candidate with the largest gap.
    """

    z0: tuple
    margin: float
    functional: LinearFunctional
    c: float
    witnesses: tuple = ()

    variant = "NotFlat"


# ---------------------------------------------------------------------------
# Operations


def interior_point(body: ConvexBody) -> np.ndarray:
    p = body.interior_point()
    if not body.clearance(p) >= 1e-6 * body.diameter():
        raise GeometryError("body has no interior point with sufficient clearance")
    return p


def _exit_times(body, z0, dirs, tol=1e-13):
    """Parameter t > 0 where the ray z0 + t*dir leaves the body, per direction."""
    dirs = np.asarray(dirs, dtype=float)
    t = body.ray_exit(z0, dirs)
    if t is not None and np.all(np.isfinite(t)):
        return np.asarray(t, dtype=float)
    return _exit_times_bisect(body, z0, dirs, tol)


def _exit_times_bisect(body, z0, dirs, tol=1e-13):
    z0 = np.asarray(z0, dtype=float)
    lens = np.linalg.norm(dirs, axis=-1)
    hi = 2.0 * body.bounding_radius(z0) / lens
    if np.any(body.contains(z0 + hi[:, None] * dirs)):
        raise GeometryError("ray does not leave the bounding box (unbounded body?)")
    lo = np.zeros_like(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        inside = body.contains(z0 + mid[:, None] * dirs)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
        if np.all((hi - lo) * lens <= tol):
            break
    return 0.5 * (lo + hi)


def boundary_project(body: ConvexBody, z0, direction, tol: float = 1e-12) -> np.ndarray:
    """Boundary point on the ray from interior ``z0`` along ``direction`` (bisection)."""
    z0 = as_vector(z0, body.dim)
    d = as_vector(direction, body.dim)
    if not np.any(d):
        raise GeometryError("zero direction")
    if not body.contains(z0):
        raise GeometryError("ray origin is not inside the body")
    t = _exit_times_bisect(body, z0, d[None, :], tol)[0]
    return z0 + t * d


def _orthonormal_frame(d0):
    d0 = d0 / np.linalg.norm(d0)
    if d0.shape[0] == 2:
        return d0, np.array([-d0[1], d0[0]])
    helper = np.eye(3)[int(np.argmin(np.abs(d0)))]
    u = helper - (helper @ d0) * d0
    u /= np.linalg.norm(u)
    return d0, u, np.cross(d0, u)


def _fan_directions(frame, theta, phi=None):
    if len(frame) == 2:
        d0, u = frame
        return np.cos(theta)[:, None] * d0 + np.sin(theta)[:, None] * u
    d0, u, v = frame
    side = np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v
    return np.cos(theta)[:, None] * d0 + np.sin(theta)[:, None] * side


def _angular_extent(patch, z, frame, phi=None):
    """Largest rotation angle keeping the boundary point inside the patch ball."""
    x0 = patch.center
    cap = 0.95 * np.pi
    thetas = np.arange(1, _SCAN_STEPS + 1) * (cap / _SCAN_STEPS)
    phis = None if phi is None else np.full_like(thetas, phi)
    dirs = _fan_directions(frame, thetas, phis)
    pts = z + _exit_times(patch.body, z, dirs)[:, None] * dirs
    dist = np.asarray(patch.ambient(pts - x0))
    out = np.flatnonzero(dist >= patch.eps)
    if out.size == 0:
        return cap
    k = out[0]
    lo = 0.0 if k == 0 else thetas[k - 1]
    hi = thetas[k]
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        ph = None if phi is None else np.array([phi])
        dirv = _fan_directions(frame, np.array([mid]), ph)
        p = z + _exit_times(patch.body, z, dirv)[:, None] * dirv
        if float(patch.ambient(p[0] - x0)) < patch.eps:
            lo = mid
        else:
            hi = mid
    # stay clear of the rim so rounding on neighbouring rays cannot cross it
    return lo * (1.0 - 1e-9)


def patch_sample(patch: BoundaryPatch, n: int = 64) -> np.ndarray:
    """``n`` boundary points of the patch, ``x0`` first, denser near ``x0``.

    Rays from the interior point are swept through a deterministic fan
    around the direction of ``x0``; the outermost ring of the fan always
    touches the edge of the patch.
    """
    if n < 16:
        raise GeometryError("patch_sample needs n >= 16")
    body = patch.body
    d = body.dim
    if d < 2:
        raise DimensionError("patch sampling needs d >= 2")
    x0 = patch.center
    z = interior_point(body)
    frame = _orthonormal_frame(x0 - z)

    if d == 2:
        m_plus = (n - 1) // 2
        m_minus = n - 1 - m_plus
        top = _angular_extent(patch, z, frame)
        bot = _angular_extent(patch, z, (frame[0], -frame[1]))
        s_plus = (np.arange(1, m_plus + 1) / m_plus) ** 1.5
        s_minus = (np.arange(1, m_minus + 1) / m_minus) ** 1.5
        thetas = np.concatenate([top * s_plus, -bot * s_minus])
        dirs = _fan_directions(frame, thetas)
    else:
        n_az = 12
        rings = -(-(n - 1) // n_az)
        phis_az = 2.0 * np.pi * np.arange(n_az) / n_az
        ext = np.array([_angular_extent(patch, z, frame, ph) for ph in phis_az])
        th, ph = [], []
        for k in range(rings, 0, -1):
            th.append(ext * (k / rings) ** 1.5)
            ph.append(phis_az + (np.pi / n_az) * (k % 2))
        thetas = np.concatenate(th)[: n - 1]
        phis = np.concatenate(ph)[: n - 1]
        dirs = _fan_directions(frame, thetas, phis)
    pts = z + _exit_times(body, z, dirs)[:, None] * dirs
    pts = np.vstack([x0, pts])
    dist = np.asarray(patch.ambient(pts - x0))
    if np.any(dist >= patch.eps):
        raise GeometryError("patch sampling left the patch (non-monotone boundary distance)")
    if len(np.unique(np.round(pts, 14), axis=0)) < n:
        raise GeometryError("patch is degenerate: fewer distinct boundary points than requested")
    return pts


def patch_dense(patch: BoundaryPatch, step: float) -> np.ndarray:
    """Dense boundary samples of the patch with neighbour spacing at most ``step``.

    In 2D the result is an ordered polyline from one end of the arc to the
    other; in 3D it is an unordered cloud from a (theta, phi) fan.
    """
    if not step > 0:
        raise GeometryError("step must be positive")
    body = patch.body
    z = interior_point(body)
    frame = _orthonormal_frame(patch.center - z)
    reach = body.bounding_radius(z)

    def project(dirs):
        return z + _exit_times(body, z, dirs)[:, None] * dirs

    if body.dim == 2:
        top = _angular_extent(patch, z, frame)
        bot = _angular_extent(patch, z, (frame[0], -frame[1]))
        thetas = np.linspace(-bot, top, max(3, math.ceil((top + bot) * reach / step) + 1))
        for _ in range(20):
            pts = project(_fan_directions(frame, thetas))
            chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            long = np.flatnonzero(chords > step)
            if long.size == 0:
                return pts
            mids = 0.5 * (thetas[long] + thetas[long + 1])
            thetas = np.sort(np.concatenate([thetas, mids]))
        raise GeometryError("could not refine the patch polyline")
    n_az = max(12, math.ceil(2.0 * np.pi * patch.eps / step))
    phis = 2.0 * np.pi * np.arange(n_az) / n_az
    chunks = [patch.center[None, :]]
    for ph in phis:
        ext = _angular_extent(patch, z, frame, ph)
        th = np.linspace(0.0, ext, max(2, math.ceil(ext * reach / (0.5 * step)) + 1))[1:]
        chunks.append(project(_fan_directions(frame, th, np.full_like(th, ph))))
    return np.vstack(chunks)


def is_flattening_point(patch: BoundaryPatch, n: int = 256, tol: float = FLAT_TOL):
    """Decide on samples whether the patch lies in one supporting hyperplane."""
    cands = support_functionals(patch.body, patch.center, BOUNDARY_TOL * 10, norm=patch.ambient)
    pts = patch_sample(patch, n)
    witnesses = []
    for f, c in cands:
        gaps = c - f(pts)
        dev = float(gaps.max())
        if dev <= tol:
            return Flat(f, c, dev)
        k = int(np.argmax(gaps))
        witnesses.append((f, c, tuple(pts[k].tolist()), dev))
    best = max(range(len(witnesses)), key=lambda i: (witnesses[i][3], -i))
    f, c, z0, _ = witnesses[best]
    margin = min(w[3] for w in witnesses)
    return NotFlat(z0, margin, f, c, tuple(witnesses))


def build_gauge_body(body: ConvexBody, x0, norm: Norm | None = None, n: int = 512):
    """Symmetric gauge body whose unit sphere matches ``boundary(body)`` near ``x0``.

    The interior point of ``body`` is moved to the origin, ``delta`` is the
    norm of the moved ``x0``, and the cloud samples the boundary within
    ``delta / 2`` of ``x0``; the ball part has radius ``delta / 4``.
    Returns ``(GaugeBody, delta)``.
    """
    norm = norm or PNorm(2.0)
    x0 = as_vector(x0, body.dim)
    z = interior_point(body)
    delta = float(norm(x0 - z))
    if not delta > 0:
        raise GeometryError("x0 coincides with the interior point")
    cloud = patch_sample(BoundaryPatch(body, tuple(x0), delta / 2.0, norm), n) - z
    v = GaugeBody(cloud, delta / 4.0, norm=norm, offset=z)
    if not v.clearance(np.zeros(body.dim)) > 0:
        raise GeometryError("gauge body lost the origin from its interior")
    return v, delta


def body_from_json(obj, bodies=None, base_dir=None) -> ConvexBody:
    """Inverse of ``to_json``; ``bodies`` resolves gauge-norm references by id."""
    from .serialize import norm_from_json, read_off

    kind = obj.get("kind")
    if kind == "ball":
        norm = norm_from_json(obj.get("norm", {"kind": "p", "p": 2.0}), bodies)
        center = obj.get("center")
        return NormBall(norm, float(obj.get("radius", 1.0)), center, dim=obj.get("dim"))
    if kind == "polytope":
        if "off" in obj:
            return Polytope(read_off(obj["off"], obj.get("dim"), base_dir))
        return Polytope(obj["vertices"])
    if kind == "gauge":
        norm = norm_from_json(obj["norm"], bodies) if "norm" in obj else None
        return GaugeBody(obj["cloud"], obj["r"], norm=norm, offset=obj.get("offset"))
    raise GeometryError(f"unknown body kind {kind!r}")
