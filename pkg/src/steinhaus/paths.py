"""Sampled paths and the constructive interior-ball certificates for U ± Γ.

A certificate records a window ``[t0, t1]`` of a path, a shrink factor
``alpha`` and a radius ``eta``.  For every ``z`` with ``|z| < eta`` the
translated path ``gamma(t) + shift + z`` starts strictly inside the sphere
and ends strictly beyond the supporting hyperplane, so it crosses the sphere
at a point ``a`` of the patch; then ``a - gamma(t_z)`` (difference) or
``a + gamma(t_z)`` (sum, using the negated path) equals ``shift + z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bodies import (
    FLAT_TOL,
    BoundaryPatch,
    GaugeBody,
    NormBall,
    _exit_times,
    build_gauge_body,
    interior_point,
    is_flattening_point,
    patch_sample,
    sphere_radius,
)
from .errors import (
    CertificateError,
    DimensionError,
    GeometryError,
    NoWindowError,
    PlanePathError,
)
from .geometry import GaugeNorm, LinearFunctional, Norm, PNorm, as_points, as_vector, direction_fan
from .serialize import digest

SAFETY = 0.1
ROOT_ITERS = 50
VERIFY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Path:
    """Piecewise-linear path through ``points`` at strictly increasing ``ts``."""

    ts: np.ndarray
    points: np.ndarray
    chord_bound: float | None = None

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        pts = as_points(self.points)
        if ts.ndim != 1 or len(ts) != len(pts) or len(ts) < 2:
            raise GeometryError("a path needs at least two (t, point) samples")
        if ts[0] != 0.0 or ts[-1] != 1.0 or np.any(np.diff(ts) <= 0):
            raise GeometryError("path parameters must increase strictly from 0 to 1")
        if self.chord_bound is not None:
            chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            if chords.max() > self.chord_bound:
                raise GeometryError(f"chord {chords.max():.3g} exceeds declared bound {self.chord_bound}")
        ts.setflags(write=False)
        pts.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points, ts=None, chord_bound=None) -> Path:
        pts = as_points(points)
        if ts is None:
            ts = np.linspace(0.0, 1.0, len(pts))
        return cls(np.asarray(ts, dtype=float), pts, chord_bound)

    @classmethod
    def segment(cls, a, b, nsamples=64) -> Path:
        a, b = as_vector(a), as_vector(b)
        t = np.linspace(0.0, 1.0, nsamples)
        pts = (1.0 - t)[:, None] * a + t[:, None] * b
        pts[-1] = b
        return cls(t, pts)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.ts)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.column_stack([np.interp(flat, self.ts, self.points[:, k]) for k in range(self.dim)])
        return out[0] if t.ndim == 0 else out.reshape(t.shape + (self.dim,))

    def reversed(self) -> Path:
        return Path(1.0 - self.ts[::-1], self.points[::-1].copy(), self.chord_bound)

    def negated(self) -> Path:
        return Path(self.ts, -self.points, self.chord_bound)

    def scaled(self, s: float) -> Path:
        return Path(self.ts, s * self.points)

    def translated(self, v) -> Path:
        return Path(self.ts, self.points + as_vector(v, self.dim), self.chord_bound)

    def restricted(self, lo: float, hi: float) -> Path:
        """Restriction to ``[lo, hi]``, reparametrised onto ``[0, 1]``."""
        if not 0.0 <= lo < hi <= 1.0:
            raise GeometryError("restriction needs 0 <= lo < hi <= 1")
        inner = (self.ts > lo) & (self.ts < hi)
        ts = np.concatenate([[lo], self.ts[inner], [hi]])
        pts = np.vstack([self(lo), self.points[inner], self(hi)])
        s = (ts - lo) / (hi - lo)
        s[0], s[-1] = 0.0, 1.0
        return Path(s, pts)

    def to_json(self):
        out = {"t": self.ts.tolist(), "points": self.points.tolist()}
        if self.chord_bound is not None:
            out["chord_bound"] = self.chord_bound
        return out

    @classmethod
    def from_json(cls, obj) -> Path:
        return cls(np.asarray(obj["t"], dtype=float), np.asarray(obj["points"], dtype=float), obj.get("chord_bound"))


# ---------------------------------------------------------------------------
# Path analysis


def functional_range(path: Path, f: LinearFunctional):
    """``(m, M, tmin, tmax)``: extreme values of ``f`` along the path.

    The path is piecewise linear, so extremes sit at samples; ties resolve
    to the earliest parameter.
    """
    if f.dim != path.dim:
        raise DimensionError("functional and path differ in dimension")
    vals = f(path.points)
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    return float(vals[i]), float(vals[j]), float(path.ts[i]), float(path.ts[j])


def is_plane_path(path: Path, f: LinearFunctional, tol: float = VERIFY_TOL) -> bool:
    m, M, _, _ = functional_range(path, f)
    return M - m <= tol


def _modulus_at(path: Path, norm: Norm, w: float, dist, tdiff) -> float:
    # sup |gamma(s) - gamma(t)| over |s - t| <= w: the sup of a convex function
    # over each cell pair is reached at sample pairs or at (t_i, t_i +- w)
    best = float(dist[tdiff <= w].max())
    fwd = path.ts + w
    ok = fwd <= 1.0
    if ok.any():
        best = max(best, float(np.max(norm(path(fwd[ok]) - path.points[ok]))))
    bwd = path.ts - w
    ok = bwd >= 0.0
    if ok.any():
        best = max(best, float(np.max(norm(path(bwd[ok]) - path.points[ok]))))
    return best


def continuity_modulus(path: Path, eps: float, norm: Norm | None = None) -> float:
    """Largest ``delta`` (to bisection accuracy) with
    ``sup{|gamma(s) - gamma(t)| : |s - t| <= delta} < eps / 2``; capped at 1."""
    if not eps > 0:
        raise GeometryError("eps must be positive")
    norm = norm or PNorm(2.0)
    target = eps / 2.0
    diff = path.points[:, None, :] - path.points[None, :, :]
    dist = np.asarray(norm(diff))
    tdiff = np.abs(path.ts[:, None] - path.ts[None, :])
    if _modulus_at(path, norm, 1.0, dist, tdiff) < target:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _modulus_at(path, norm, mid, dist, tdiff) < target:
            lo = mid
        else:
            hi = mid
    if lo <= 0.0:
        raise GeometryError("could not find a positive continuity modulus")
    return lo


def find_climb_window(path: Path, f: LinearFunctional, delta: float, n: int):
    """Earliest window ``t0 < t1 <= t0 + delta`` with
    ``f(gamma(t1)) - f(gamma(t0)) >= (M - m) / n``.

    Existence follows from telescoping over the partition ``k / n``; those
    points are always among the candidates.
    """
    m, M, _, _ = functional_range(path, f)
    if not M - m > 0:
        raise NoWindowError("no window: f is constant along the path (plane path)")
    need = (M - m) / n * (1.0 - 1e-12)
    ts = path.ts
    vals = f(path.points)
    cands = np.unique(np.concatenate([ts[:-1], np.arange(n) / n]))
    for t0 in cands:
        end = min(t0 + delta, 1.0)
        f0 = float(f(path(t0)))
        inside = (ts > t0) & (ts <= end)
        tt = np.concatenate([ts[inside], [end]])
        ff = np.concatenate([vals[inside], [float(f(path(end)))]])
        k = int(np.argmax(ff))
        if ff[k] - f0 >= need and tt[k] > t0:
            return float(t0), float(tt[k])
    raise NoWindowError("no climb window found; re-test the path with is_plane_path")


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class WitnessCertificate:
    """Constructive proof that ``shift + eta*B`` lies inside ``U ± Gamma``.

    ``t0``/``t1`` refer to the working path: the input path, negated for
    ``sign == "sum"``, reversed when ``reversed`` is set, then restricted to
    ``[t_lo, t_hi]`` and reparametrised onto ``[0, 1]``.
    """

    sign: str
    t0: float
    t1: float
    alpha: float
    eta: float
    shift: tuple
    functional: LinearFunctional
    m: float
    M: float
    n: int
    delta: float
    reversed: bool
    t_lo: float
    t_hi: float
    x0: tuple
    eps: float
    radius: float = 1.0
    terms: dict = field(default_factory=dict, compare=False)
    input_digest: str = field(default="", compare=False)

    def scaled(self, s: float) -> WitnessCertificate:
        return replace(
            self,
            alpha=s * self.alpha,
            eta=s * self.eta,
            shift=tuple(s * v for v in self.shift),
            m=s * self.m,
            M=s * self.M,
            x0=tuple(s * v for v in self.x0),
            eps=s * self.eps,
            radius=s * self.radius,
            terms={k: s * v for k, v in self.terms.items()},
        )

    def to_json(self):
        return {
            "sign": self.sign,
            "t0": self.t0,
            "t1": self.t1,
            "alpha": self.alpha,
            "eta": self.eta,
            "shift": list(self.shift),
            "functional": list(self.functional.coeffs),
            "m": self.m,
            "M": self.M,
            "n": self.n,
            "delta": self.delta,
            "reversed": self.reversed,
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "x0": list(self.x0),
            "eps": self.eps,
            "radius": self.radius,
            "terms": dict(self.terms),
            "input_digest": self.input_digest,
        }

    @classmethod
    def from_json(cls, obj) -> WitnessCertificate:
        return cls(
            sign=obj["sign"],
            t0=obj["t0"],
            t1=obj["t1"],
            alpha=obj["alpha"],
            eta=obj["eta"],
            shift=tuple(obj["shift"]),
            functional=LinearFunctional(tuple(obj["functional"]), unit_dual=True),
            m=obj["m"],
            M=obj["M"],
            n=int(obj["n"]),
            delta=obj["delta"],
            reversed=bool(obj["reversed"]),
            t_lo=obj["t_lo"],
            t_hi=obj["t_hi"],
            x0=tuple(obj["x0"]),
            eps=obj["eps"],
            radius=obj.get("radius", 1.0),
            terms=dict(obj.get("terms", {})),
            input_digest=obj.get("input_digest", ""),
        )


def _working_path(path: Path, f: LinearFunctional, sign: str):
    if sign not in ("sum", "difference"):
        raise ValueError(f"sign must be 'sum' or 'difference', not {sign!r}")
    base = path.negated() if sign == "sum" else path
    _, _, tmin, tmax = functional_range(base, f)
    rev = tmin > tmax
    if rev:
        base = base.reversed()
        _, _, tmin, tmax = functional_range(base, f)
    if tmin == tmax:
        raise PlanePathError("plane path: f is constant along the path")
    return base.restricted(tmin, tmax), rev, tmin, tmax


def _rebuild_working_path(path: Path, cert: WitnessCertificate) -> Path:
    base = path.negated() if cert.sign == "sum" else path
    if cert.reversed:
        base = base.reversed()
    return base.restricted(cert.t_lo, cert.t_hi)


def _certificate_inputs_digest(patch, path, f, sign):
    return digest({"patch": patch.to_json(), "path": path.to_json(), "functional": list(f.coeffs), "sign": sign})


def steinhaus_certificate(
    patch: BoundaryPatch,
    path: Path,
    f: LinearFunctional,
    sign: str = "sum",
    tol: float = VERIFY_TOL,
    safety: float = SAFETY,
) -> WitnessCertificate:
    """Build the interior-ball certificate for ``U + Gamma`` or ``U - Gamma``.

    ``patch`` must lie on the sphere of radius R (centred at the origin) of
    its ambient norm and ``f`` must be a unit-dual supporting functional at
    ``x0``.  The construction runs on the unit sphere and is rescaled by R.
    """
    radius = sphere_radius(patch.body, patch.ambient)
    if radius is None:
        raise GeometryError("steinhaus_certificate needs a patch on an origin-centred sphere of the ambient norm")
    norm = patch.ambient
    if f.dim != path.dim or path.dim != patch.body.dim:
        raise DimensionError("patch, path and functional must share a dimension")
    x0 = patch.center / radius
    eps = patch.eps / radius
    if not eps < 1.0:
        raise GeometryError("patch radius must be smaller than the sphere radius")
    if abs(float(f(x0)) - 1.0) > 10 * tol or abs(norm.dual(f.vector) - 1.0) > 10 * tol:
        raise GeometryError("functional is not a unit-dual supporting functional at x0")
    unit_path = path if radius == 1.0 else path.scaled(1.0 / radius)
    if is_plane_path(unit_path, f, tol):
        raise PlanePathError("path is plane for the given functional")

    work, rev, t_lo, t_hi = _working_path(unit_path, f, sign)
    m, M, _, _ = functional_range(work, f)
    delta = continuity_modulus(work, eps, norm)
    n = math.ceil(1.0 / delta)
    t0, t1 = find_climb_window(work, f, delta, n)
    alpha = min((M - m) / (2 * n), eps / 4.0)
    g0, g1 = work(t0), work(t1)
    start = (1.0 - alpha) * x0
    end = (g1 - g0) + start
    terms = {
        "alpha": alpha,
        "inner_ball": eps / 2.0 - float(norm(start - x0)),
        "unit_ball": 1.0 - float(norm(start)),
        "outer_ball": 0.75 * eps - float(norm(end - x0)),
        "halfspace": float(f(end)) - 1.0,
    }
    for name, value in terms.items():
        if not value > 0:
            raise CertificateError(f"certificate term {name!r} is not positive ({value!r})", name, value)
    eta = (1.0 - safety) * min(terms.values())
    cert = WitnessCertificate(
        sign=sign,
        t0=t0,
        t1=t1,
        alpha=alpha,
        eta=eta,
        shift=tuple((start - g0).tolist()),
        functional=f,
        m=m,
        M=M,
        n=n,
        delta=delta,
        reversed=rev,
        t_lo=t_lo,
        t_hi=t_hi,
        x0=tuple(x0.tolist()),
        eps=eps,
        terms=terms,
    )
    if radius != 1.0:
        cert = cert.scaled(radius)
    return replace(cert, input_digest=_certificate_inputs_digest(patch, path, f, sign))


@dataclass
class VerifyReport:
    passed: bool
    worst_residual: float
    nz: int
    failures: list = field(default_factory=list)

    def to_json(self):
        return {
            "passed": self.passed,
            "worst_residual": self.worst_residual,
            "nz": self.nz,
            "failures": self.failures[:20],
        }


def ball_test_points(norm: Norm, radius: float, nz: int, dim: int) -> np.ndarray:
    """Deterministic points of the open ball: centre, boundary shell, interior grid."""
    if nz < 2:
        raise ValueError("need at least two test points")
    r = radius * (1.0 - 1e-9)
    n_shell = max(1, nz // 2)
    u = direction_fan(dim, n_shell) if dim > 1 else np.array([[1.0], [-1.0]])[: max(1, min(2, n_shell))]
    shell = r * u / np.asarray(norm(u))[:, None]
    k = 3
    while True:
        axis = np.linspace(-r, r, k)
        grid = np.stack(np.meshgrid(*[axis] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
        grid = grid[np.asarray(norm(grid)) < r]
        if len(grid) >= nz - len(shell) - 1 or k > 64:
            break
        k += 2
    grid = grid[np.any(grid != 0, axis=1)]
    need = nz - len(shell) - 1
    if need > 0:
        idx = np.linspace(0, len(grid) - 1, min(need, len(grid))).round().astype(int)
        grid = grid[np.unique(idx)]
    else:
        grid = grid[:0]
    return np.vstack([np.zeros((1, dim)), shell, grid])[:nz]


def witness_verify(
    cert: WitnessCertificate,
    patch: BoundaryPatch,
    path: Path,
    nz: int = 200,
    tol: float = VERIFY_TOL,
    zs=None,
) -> VerifyReport:
    """Re-check a certificate on ``nz`` points of its ball.

    For each ``z``: the shifted window start lies inside the sphere, the end
    lies beyond the supporting hyperplane ("ball containment"); bisection
    locates the sphere crossing ("root"), which must be within ``eps`` of
    ``x0`` ("patch"); and the crossing decomposes as ``shift + z``
    ("decomposition").
    """
    norm = patch.ambient
    big_r = cert.radius
    x0 = patch.center
    eps = patch.eps
    f = cert.functional
    work = _rebuild_working_path(path, cert)
    shift = np.asarray(cert.shift)
    if zs is None:
        zs = ball_test_points(norm, cert.eta, nz, patch.body.dim)
    zs = as_points(zs, patch.body.dim)
    base = shift + zs
    scale = max(1.0, big_r)
    failures = []
    bad = np.zeros(len(zs), dtype=bool)

    def fail(mask, stage):
        for i in np.flatnonzero(mask & ~bad):
            failures.append({"z": zs[i].tolist(), "stage": stage})
        bad[:] = bad | mask

    p0 = work(cert.t0) + base
    p1 = work(cert.t1) + base
    fail(~(np.asarray(norm(p0)) < big_r), "ball containment")
    fail(~(f(p1) > big_r), "ball containment")
    fail(np.abs(np.asarray(norm(x0 - np.asarray(cert.x0)))) > tol * scale, "consistency")

    lo = np.full(len(zs), cert.t0)
    hi = np.full(len(zs), cert.t1)
    for _ in range(ROOT_ITERS):
        mid = 0.5 * (lo + hi)
        inside = np.asarray(norm(work(mid) + base)) < big_r
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    tz = 0.5 * (lo + hi)
    on_path = work(tz)
    a = on_path + base
    root_res = np.abs(np.asarray(norm(a)) - big_r)
    fail(root_res > tol * scale, "root")
    fail(~(np.asarray(norm(a - x0)) < eps), "patch")
    b = -on_path if cert.sign == "sum" else on_path
    combo = a + b if cert.sign == "sum" else a - b
    dec_res = np.linalg.norm(combo - base, axis=1)
    fail(dec_res > tol * scale, "decomposition")
    worst = float(np.max(np.maximum(root_res, dec_res)))
    return VerifyReport(not bad.any(), worst, len(zs), failures)


def radial_path(body, x0, z0, nsamples: int = 256) -> Path:
    """Boundary path from ``x0`` to ``z0``: the segment projected radially
    from the body's interior point onto the boundary."""
    x0 = as_vector(x0, body.dim)
    z0 = as_vector(z0, body.dim)
    c = interior_point(body)
    t = np.linspace(0.0, 1.0, nsamples)
    seg = (1.0 - t)[:, None] * x0 + t[:, None] * z0
    dirs = seg - c
    lens = np.linalg.norm(dirs, axis=1)
    if lens.min() <= 1e-12 * max(1.0, body.diameter()):
        raise GeometryError("segment passes through the centre; radial projection undefined")
    pts = c + _exit_times(body, c, dirs)[:, None] * dirs
    pts[0], pts[-1] = x0, z0
    return Path(t, pts)


# ---------------------------------------------------------------------------
# Decisions


@dataclass(frozen=True)
class FlatCase:
    """``U + U`` lies in the hyperplane ``{f = plane_value}`` (empty interior)."""

    functional: LinearFunctional
    c: float
    plane_value: float
    deviation: float = 0.0

    variant = "FlatCase"


@dataclass(frozen=True)
class Certified:
    """Verified interior ball of the sumset.

    ``patch``/``path``/``cert`` live in working coordinates (a sphere of the
    working norm); ``ball_center``/``ball_radius`` are in the original
    coordinates and ambient norm, obtained by adding ``2 * offset`` (sum) and
    converting the radius when the working norm is a gauge.
    """

    cert: WitnessCertificate
    patch: BoundaryPatch
    path: Path
    report: VerifyReport
    ball_center: tuple
    ball_radius: float
    mapping: str = "direct"
    offset: tuple = ()
    case: str = ""
    path_gap: float = 0.0

    variant = "Certified"


@dataclass(frozen=True)
class NotApplicable:
    reason: str

    variant = "NotApplicable"


def _reduce_to_sphere(patch: BoundaryPatch, gauge_samples: int = 512):
    """Working patch on an origin-centred sphere plus the data to map back."""
    body, norm = patch.body, patch.ambient
    dim = body.dim
    if sphere_radius(body, norm) is not None:
        return patch, "direct", np.zeros(dim), 1.0
    if isinstance(body, NormBall) and body.norm == norm:
        moved = NormBall(norm, body.radius, np.zeros(dim))
        return BoundaryPatch(moved, tuple(patch.center - body.center), patch.eps, norm), "translate", body.center, 1.0
    v, delta = build_gauge_body(body, patch.center, norm=norm, n=gauge_samples)
    gnorm = GaugeNorm(v)
    x0v = patch.center - v.offset
    if abs(float(gnorm(x0v)) - 1.0) > 1e-9:
        raise GeometryError("x0 is not on the boundary of the gauge body")
    reach = float(np.max(np.asarray(norm(v.vertices))))
    eps_v = min(patch.eps, delta / 2.0) / reach
    work = BoundaryPatch(v, tuple(x0v), eps_v, gnorm)
    return work, "gauge", v.offset, v.inradius(norm)


def _path_gap(path: Path, patch: BoundaryPatch, radius: float) -> float:
    mids = 0.5 * (path.points[1:] + path.points[:-1])
    return float(np.max(np.abs(np.asarray(patch.ambient(mids)) - radius)))


def _flat_case(verdict, patch: BoundaryPatch, offset, mapping) -> FlatCase:
    f, c = verdict.functional, verdict.c
    if mapping == "gauge":
        f = LinearFunctional(f.coeffs).normalized(patch.ambient)
        c = float(f(np.asarray(patch.x0)))
    else:
        c = c + float(f(offset))
    return FlatCase(f, c, 2.0 * c, verdict.deviation)


def _certify_not_flat(work, verdict, *, n, path_samples, nz, verify_tol, max_tries=32):
    radius = sphere_radius(work.body, work.ambient)
    # candidates active only within tolerance (inner-polytope gauge bodies)
    # are not exactly supporting; use the one whose level is the sphere radius
    f, c = min(((w[0], w[1]) for w in verdict.witnesses), key=lambda fc: abs(fc[1] - radius))
    pts = patch_sample(work, n)
    gaps = c - f(pts)
    order = np.argsort(-gaps, kind="stable")
    last_error = None
    for k in order[:max_tries]:
        if gaps[k] <= FLAT_TOL:
            break
        try:
            path = radial_path(work.body, work.center, pts[k], path_samples)
        except GeometryError as exc:
            last_error = exc
            continue
        if np.any(np.asarray(work.ambient(path.points - work.center)) >= work.eps):
            continue
        try:
            cert = steinhaus_certificate(work, path, f, "sum", verify_tol)
        except (CertificateError, PlanePathError) as exc:
            last_error = exc
            continue
        report = witness_verify(cert, work, path, nz, verify_tol)
        if report.passed:
            return cert, path, report, _path_gap(path, work, radius)
        last_error = CertificateError(f"certificate failed verification: {report.failures[:1]}")
    raise last_error or CertificateError("no usable witness point in the patch")


def sphere_patch_decide(
    patch: BoundaryPatch,
    tol: float = FLAT_TOL,
    n: int = 256,
    path_samples: int = 256,
    nz: int = 200,
    verify_tol: float = VERIFY_TOL,
):
    """``FlatCase`` when the patch is flat, otherwise a verified ``Certified``
    interior ball of ``U + U``.

    Spheres of the ambient norm are used directly; translated balls are
    moved to the origin; any other body is renormed through its gauge body.
    """
    work, mapping, offset, radius_factor = _reduce_to_sphere(patch)
    verdict = is_flattening_point(work, n, tol)
    if verdict.variant == "Flat":
        return _flat_case(verdict, patch, offset, mapping)
    cert, path, report, gap = _certify_not_flat(
        work, verdict, n=n, path_samples=path_samples, nz=nz, verify_tol=verify_tol
    )
    center = np.asarray(cert.shift) + 2.0 * np.asarray(offset)
    return Certified(
        cert,
        work,
        path,
        report,
        tuple(center.tolist()),
        cert.eta * radius_factor,
        mapping,
        tuple(np.asarray(offset).tolist()),
        "",
        gap,
    )


def volkmann_walter_check(arcs, tol: float = FLAT_TOL, n: int = 256, nz: int = 200, verify_tol: float = VERIFY_TOL):
    """Certify ``int(A + A) != ∅`` for a union ``A`` of sphere arcs.

    Case (a): some arc is not flat at its centre.  Case (b): two arcs are
    flat in non-parallel hyperplanes; a segment of the second arc serves as
    the path against the first.  Otherwise ``NotApplicable``.
    """
    arcs = list(arcs)
    if not arcs:
        raise ValueError("need at least one arc")
    first = arcs[0]
    for arc in arcs:
        if sphere_radius(arc.body, arc.ambient) is None:
            raise GeometryError("all arcs must lie on a sphere of the ambient norm")
        if arc.body is not first.body and arc.body.to_json() != first.body.to_json():
            raise GeometryError("all arcs must lie on the same sphere")
    verdicts = [is_flattening_point(a, n, tol) for a in arcs]
    for i, (arc, v) in enumerate(zip(arcs, verdicts)):
        if v.variant == "NotFlat":
            res = sphere_patch_decide(arc, tol, n, nz=nz, verify_tol=verify_tol)
            return replace(res, case=f"a:{i}")
    for i in range(len(arcs)):
        for j in range(len(arcs)):
            if i == j:
                continue
            fi, fj = verdicts[i].functional, verdicts[j].functional
            if fi.is_parallel(fj):
                continue
            pts = patch_sample(arcs[j], n)
            vals = fi(pts)
            p, q = pts[int(np.argmin(vals))], pts[int(np.argmax(vals))]
            path = Path.segment(p, q, 64)
            cert = steinhaus_certificate(arcs[i], path, fi, "sum", verify_tol)
            report = witness_verify(cert, arcs[i], path, nz, verify_tol)
            if not report.passed:
                raise CertificateError(f"case (b) certificate failed verification: {report.failures[:1]}")
            return Certified(
                cert,
                arcs[i],
                path,
                report,
                cert.shift,
                cert.eta,
                "direct",
                tuple([0.0] * arcs[i].body.dim),
                f"b:{i},{j}",
                _path_gap(path, arcs[i], sphere_radius(arcs[i].body, arcs[i].ambient)),
            )
    return NotApplicable("every arc is flat and all supporting hyperplanes are parallel")
