import math
from dataclasses import replace

import numpy as np
import pytest

from steinhaus.bodies import BoundaryPatch, NormBall, patch_sample
from steinhaus.errors import GeometryError, NoWindowError, PlanePathError
from steinhaus.geometry import LinearFunctional, PNorm
from steinhaus.grid import has_interior, minkowski_sum, rasterize, window_around
from steinhaus.paths import (
    Path,
    WitnessCertificate,
    _rebuild_working_path,
    continuity_modulus,
    find_climb_window,
    functional_range,
    is_plane_path,
    radial_path,
    sphere_patch_decide,
    steinhaus_certificate,
    volkmann_walter_check,
    witness_verify,
)

L1, L2, LINF = PNorm(1.0), PNorm(2.0), PNorm(math.inf)
E1 = LinearFunctional((1.0, 0.0), unit_dual=True)


def unit_ball(norm, dim=2):
    return NormBall(norm, 1.0, dim=dim)


def quarter_arc(n=256):
    t = np.linspace(0.0, 1.0, n)
    th = t * np.pi / 2
    return Path(t, np.column_stack([np.cos(th), np.sin(th)]))


def l2_setup():
    patch = BoundaryPatch(unit_ball(L2), (1.0, 0.0), 0.5, L2)
    path = radial_path(patch.body, (1.0, 0.0), (math.cos(0.4), math.sin(0.4)), 256)
    return patch, path


# ---------------------------------------------------------------- path basics


def test_path_validation():
    with pytest.raises(GeometryError):
        Path(np.array([0.0]), np.zeros((1, 2)))
    with pytest.raises(GeometryError):
        Path(np.array([0.0, 0.5]), np.zeros((2, 2)))
    with pytest.raises(GeometryError):
        Path(np.array([0.0, 1.0]), np.array([[0.0, 0.0], [1.0, 0.0]]), chord_bound=0.5)


def test_path_interpolates_and_round_trips():
    p = Path.segment((0.0, 0.0), (2.0, 0.0), 3)
    assert p(0.25) == pytest.approx([0.5, 0.0])
    assert np.array_equal(p.reversed().points[0], [2.0, 0.0])
    assert np.array_equal(Path.from_json(p.to_json()).points, p.points)
    r = quarter_arc().restricted(0.25, 0.75)
    assert r.ts[0] == 0.0 and r.ts[-1] == 1.0
    assert r(0.0) == pytest.approx(quarter_arc()(0.25))


def test_functional_range_examples():
    seg = Path.segment((1.0, 0.0), (0.0, 1.0), 2)
    assert functional_range(seg, E1) == (0.0, 1.0, 1.0, 0.0)
    const = Path(np.array([0.0, 1.0]), np.array([[0.3, 0.2], [0.3, 0.2]]))
    m, M, _, _ = functional_range(const, E1)
    assert m == M
    m, M, _, _ = functional_range(quarter_arc(), E1)
    assert m == pytest.approx(0.0, abs=1e-15) and M == 1.0


def test_is_plane_path_examples():
    facet = Path.segment((1.0, -0.4), (1.0, 0.4), 16)
    assert is_plane_path(facet, E1, 1e-12)
    assert not is_plane_path(quarter_arc(), E1, 1e-12)


# ---------------------------------------------------------------- modulus / window


def test_continuity_modulus_examples():
    seg = Path.segment((0.0, 0.0), (1.0, 0.0), 11)
    assert continuity_modulus(seg, 1.0) == pytest.approx(0.5, abs=1e-12)
    const = Path(np.array([0.0, 1.0]), np.array([[0.3, 0.2], [0.3, 0.2]]))
    assert continuity_modulus(const, 0.1) == 1.0


def test_continuity_modulus_quarter_arc():
    arc = quarter_arc()
    d = continuity_modulus(arc, 0.5)
    # derived: a chord of 1/4 on the unit circle spans 2*asin(1/8) radians
    assert d == pytest.approx(4 * math.asin(0.125) / math.pi, abs=1e-5)
    assert d == pytest.approx(0.15957267355657648, rel=1e-12)  # frozen regression value
    s = np.linspace(0.0, 1.0, 20001)
    pts = arc(s)
    k = int(d * 20000)
    assert np.linalg.norm(pts[k:] - pts[:-k], axis=1).max() < 0.25


def test_climb_window_segment():
    seg = Path.segment((0.0, 0.0), (1.0, 0.0), 33)
    t0, t1 = find_climb_window(seg, E1, 0.25, 4)
    climb = E1(seg(t1)) - E1(seg(t0))
    assert climb >= 0.25 - 1e-12 and 0 < t1 - t0 <= 0.25


def test_climb_window_plane_path_errors():
    with pytest.raises(NoWindowError):
        find_climb_window(Path.segment((1.0, -0.4), (1.0, 0.4), 8), E1, 0.25, 4)


def test_climb_window_arc_is_earliest():
    arc = quarter_arc().reversed()  # f = x1 increases along the reversed arc
    delta = continuity_modulus(arc, 0.5)
    n = math.ceil(1 / delta)
    t0, t1 = find_climb_window(arc, E1, delta, n)
    m, M, _, _ = functional_range(arc, E1)
    assert E1(arc(t1)) - E1(arc(t0)) >= (M - m) / n * (1 - 1e-12)
    assert t1 - t0 <= delta
    # derived: exhaustive scan of earlier sample starts finds no admissible window
    vals = E1(arc.points)
    for i, s in enumerate(arc.ts):
        if s >= t0:
            break
        ok = (arc.ts > s) & (arc.ts <= s + delta)
        assert not np.any(vals[ok] - vals[i] >= (M - m) / n)


# ---------------------------------------------------------------- certificates


def test_certificate_l2_example():
    patch, path = l2_setup()
    cert = steinhaus_certificate(patch, path, E1, "sum")
    # derived: along -gamma the functional runs from -1 to -cos(0.4); n = 2
    assert cert.m == -1.0
    assert cert.M == pytest.approx(-math.cos(0.4), abs=1e-15)
    assert cert.n == 2
    assert cert.alpha == pytest.approx((1 - math.cos(0.4)) / 4, rel=1e-12)
    assert cert.alpha == min((cert.M - cert.m) / (2 * cert.n), cert.eps / 4)
    assert 0 < cert.eta < cert.alpha
    assert all(v > 0 for v in cert.terms.values())
    assert cert.eta == pytest.approx(0.9 * min(cert.terms.values()), rel=1e-15)
    assert cert.eta == pytest.approx(0.017761276349350853, rel=1e-9)  # frozen regression value
    g0 = _rebuild_working_path(path, cert)(cert.t0)
    assert np.allclose(cert.shift, (1 - cert.alpha) * np.asarray(patch.x0) - g0, atol=1e-15)
    # the sum working path is -gamma, so the shift adds a point of gamma
    assert np.allclose(-g0, path(1 - cert.t0) if cert.reversed else path(cert.t0), atol=1e-15)


def test_certificate_rejects_plane_path():
    patch = BoundaryPatch(unit_ball(LINF), (1.0, 0.0), 0.5, LINF)
    facet = Path.segment((1.0, -0.4), (1.0, 0.4), 16)
    with pytest.raises(PlanePathError):
        steinhaus_certificate(patch, facet, E1, "sum")


def test_certificate_needs_origin_sphere():
    patch = BoundaryPatch(NormBall(L2, 1.0, (3.0, 0.0)), (4.0, 0.0), 0.3, L2)
    with pytest.raises(GeometryError):
        steinhaus_certificate(patch, Path.segment((4.0, 0.0), (3.9, 0.4), 8), E1)


def test_certificate_is_homogeneous():
    patch, path = l2_setup()
    base = steinhaus_certificate(patch, path, E1, "sum")
    for lam in (0.25, 2.0, 8.0):
        big = BoundaryPatch(NormBall(L2, lam, dim=2), (lam, 0.0), lam * 0.5, L2)
        cert = steinhaus_certificate(big, path.scaled(lam), E1, "sum")
        assert cert.alpha == lam * base.alpha
        assert cert.eta == lam * base.eta
        assert cert.shift == tuple(lam * v for v in base.shift)
        assert (cert.t0, cert.t1, cert.n) == (base.t0, base.t1, base.n)


def test_sign_duality():
    patch, path = l2_setup()
    s = steinhaus_certificate(patch, path, E1, "sum")
    d = steinhaus_certificate(patch, path.negated(), E1, "difference")
    assert replace(d, sign="sum", input_digest="") == replace(s, input_digest="")


def test_witness_verify_passes_and_detects_tampering():
    patch, path = l2_setup()
    cert = steinhaus_certificate(patch, path, E1, "sum")
    report = witness_verify(cert, patch, path, nz=200, tol=1e-9)
    assert report.passed and report.nz == 200
    assert report.worst_residual <= 1e-9
    bad = witness_verify(replace(cert, eta=2 * cert.eta), patch, path, nz=200)
    assert not bad.passed
    assert bad.failures[0]["stage"] == "ball containment"


def test_witness_center_decomposes():
    patch, path = l2_setup()
    cert = steinhaus_certificate(patch, path, E1, "sum")
    rep = witness_verify(cert, patch, path, zs=np.zeros((1, 2)))
    assert rep.passed and rep.worst_residual <= 1e-12


def test_difference_certificate_verifies():
    patch, path = l2_setup()
    cert = steinhaus_certificate(patch, path, E1, "difference")
    assert witness_verify(cert, patch, path).passed
    g0 = _rebuild_working_path(path, cert)(cert.t0)
    assert np.allclose(cert.shift, (1 - cert.alpha) * np.asarray(patch.x0) - g0, atol=1e-15)


def test_certificate_survives_denser_path():
    patch = BoundaryPatch(unit_ball(L2), (1.0, 0.0), 0.5, L2)
    z0 = (math.cos(0.4), math.sin(0.4))
    coarse = radial_path(patch.body, (1.0, 0.0), z0, 65)
    cert = steinhaus_certificate(patch, coarse, E1, "sum")
    dense = radial_path(patch.body, (1.0, 0.0), z0, 129)
    assert witness_verify(cert, patch, dense).passed
    refined = steinhaus_certificate(patch, dense, E1, "sum")
    assert refined.eta <= cert.eta / 0.9


def test_certificate_json_round_trip():
    patch, path = l2_setup()
    cert = steinhaus_certificate(patch, path, E1, "sum")
    again = WitnessCertificate.from_json(cert.to_json())
    assert again == cert and again.input_digest == cert.input_digest
    assert witness_verify(again, patch, path).passed


# ---------------------------------------------------------------- radial paths / decisions


def test_radial_path_examples():
    q = radial_path(unit_ball(L2), (1.0, 0.0), (0.0, 1.0), 64)
    assert np.allclose(np.linalg.norm(q.points, axis=1), 1.0, atol=1e-12)
    assert np.array_equal(q.points[0], [1.0, 0.0]) and np.array_equal(q.points[-1], [0.0, 1.0])
    c = radial_path(unit_ball(L2), (1.0, 0.0), (1.0, 0.0), 8)
    assert np.all(c.points == [1.0, 0.0])
    e = radial_path(unit_ball(L1), (1.0, 0.0), (0.0, 1.0), 64)
    diag = LinearFunctional((1.0, 1.0)).normalized(L1)
    assert is_plane_path(e, diag, 1e-12)
    assert not is_plane_path(e, E1, 1e-12)


def test_radial_path_through_center_rejected():
    with pytest.raises(GeometryError):
        radial_path(unit_ball(L2), (1.0, 0.0), (-1.0, 0.0), 9)


def test_decide_l2_certified_with_grid_oracle():
    patch = BoundaryPatch(unit_ball(L2), (1.0, 0.0), 0.3, L2)
    res = sphere_patch_decide(patch)
    assert res.variant == "Certified" and res.report.passed
    target = np.asarray(res.ball_center)

    def grid_at(h):
        u = rasterize(patch, h)
        return minkowski_sum(u, u, window_around(target, 2 * res.ball_radius, h))

    v = has_interior(grid_at, 2, [res.ball_radius / 4, res.ball_radius / 8], target=target)
    assert v.variant == "Interior" and v.contains_target


def test_decide_linf_facet_is_flat():
    patch = BoundaryPatch(unit_ball(LINF), (1.0, 0.0), 0.5, LINF)
    res = sphere_patch_decide(patch)
    assert res.variant == "FlatCase"
    assert res.functional.coeffs == pytest.approx((1.0, 0.0))
    assert res.plane_value == pytest.approx(2.0)
    pts = patch_sample(patch, 100)
    vals = res.functional(pts)
    assert np.max(np.abs(vals[:, None] + vals[None, :] - 2 * res.c)) <= 2e-7


def test_decide_ellipse_via_gauge():
    body = NormBall(PNorm(2.0, (0.25, 1.0)), 1.0, dim=2)
    res = sphere_patch_decide(BoundaryPatch(body, (2.0, 0.0), 0.3, L2))
    assert res.variant == "Certified" and res.mapping == "gauge" and res.report.passed
    assert res.ball_radius > 0


def test_decide_translated_ball():
    res = sphere_patch_decide(BoundaryPatch(NormBall(L2, 1.0, (3.0, 1.0)), (4.0, 1.0), 0.3, L2))
    base = sphere_patch_decide(BoundaryPatch(unit_ball(L2), (1.0, 0.0), 0.3, L2))
    assert res.mapping == "translate"
    assert res.ball_center == pytest.approx(tuple(np.asarray(base.ball_center) + [6.0, 2.0]))
    assert res.ball_radius == base.ball_radius


def test_volkmann_walter_cases():
    sq = unit_ball(LINF)
    b = volkmann_walter_check([BoundaryPatch(sq, (1.0, 0.0), 0.4, LINF), BoundaryPatch(sq, (0.0, 1.0), 0.4, LINF)])
    assert b.variant == "Certified" and b.case.startswith("b") and b.report.passed
    par = volkmann_walter_check([BoundaryPatch(sq, (1.0, 0.0), 0.4, LINF), BoundaryPatch(sq, (-1.0, 0.0), 0.4, LINF)])
    assert par.variant == "NotApplicable"
    a = volkmann_walter_check([BoundaryPatch(unit_ball(L2), (0.0, 1.0), 0.3, L2)])
    assert a.variant == "Certified" and a.case.startswith("a")


def test_decide_picks_exactly_supporting_functional():
    # on the inner-polytope gauge body x0 is near a vertex; one candidate
    # facet is active only within tolerance and must not be used
    e = PNorm(2.0, (0.5, 1.0))
    d = np.array([math.cos(1.0), math.sin(1.0)])
    x0 = tuple(d / float(e(d)))
    res = sphere_patch_decide(BoundaryPatch(NormBall(e, 1.0, dim=2), x0, 0.3, L2))
    assert res.variant == "Certified" and res.mapping == "gauge" and res.report.passed
