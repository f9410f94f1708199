"""Shapes, support values, the penetration integral, and hull assembly."""

import math

import numpy as np
import pytest

from penclose import geometry as G
from penclose.errors import EmptyIntersectionError, ResolutionError, UnboundedRegionError

from conftest import disk_polygon

RNG = np.random.default_rng(1)


def unit(theta):
    return (math.cos(theta), math.sin(theta))


class TestSupportFunction:
    def test_disk(self):
        d = G.Disk(center=(0.2, 0.1), radius=0.3)
        assert G.support_function(d, (1.0, 0.0)) == pytest.approx(0.5)

    def test_square(self):
        sq = G.square((0.0, 0.0), 0.4)
        assert G.support_function(sq, (0.0, 1.0)) == pytest.approx(0.2)

    def test_union_takes_max(self):
        d = G.Disk(center=(0.2, 0.1), radius=0.3)
        sq = G.square((0.0, -1.5), 0.4)
        u = G.ShapeUnion((d, sq))
        assert G.support_function(u, (1.0, 0.0)) == pytest.approx(0.5)

    def test_non_unit_direction_rejected(self):
        with pytest.raises(ValueError):
            G.support_function(G.Disk(center=(0, 0), radius=1.0), (1.0, 1.0))

    @pytest.mark.parametrize("shape", [
        G.Disk(center=(0.1, -0.2), radius=0.4),
        G.square((0.3, 0.0), 0.5),
        G.ConvexPolygon(np.array([[0, 0], [0.5, 0.1], [0.4, 0.6], [-0.1, 0.4]])),
    ])
    def test_every_sampled_point_below_support(self, shape):
        """h(rho) dominates x . rho for points of the shape, all directions."""
        for theta in np.linspace(0, 2 * math.pi, 40, endpoint=False):
            rho = np.array(unit(theta))
            h = G.support_function(shape, rho)
            if isinstance(shape, G.Disk):
                pts = np.array(shape.center) + shape.radius * RNG.uniform(-1, 1, (50, 2)) / math.sqrt(2)
            else:
                pts = shape.vertices
            assert (pts @ rho <= h + 1e-12).all()


class TestContains:
    def test_disk_membership(self):
        d = G.Disk(center=(0.0, 0.0), radius=1.0)
        assert G.contains(d, (0.0, 0.0))
        assert not G.contains(d, (2.0, 0.0))
        assert not G.contains(d, (1.0, 0.0))     # boundary is not inside the open disk

    def test_square_membership(self):
        sq = G.square((0.0, 0.0), 0.4)
        assert G.contains(sq, (0.19, 0.0))
        assert not G.contains(sq, (0.21, 0.0))

    def test_union_and_batch(self):
        u = G.ShapeUnion((G.Disk(center=(0, 0), radius=0.5), G.square((2.0, 0.0), 0.4)))
        pts = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]])
        np.testing.assert_array_equal(G.contains(u, pts), [True, True, False])

    def test_overlapping_union_rejected(self):
        with pytest.raises(ValueError):
            G.ShapeUnion((G.Disk(center=(0, 0), radius=0.5), G.Disk(center=(0.3, 0), radius=0.5)))


class TestPenetrationIntegral:
    def test_unit_square_closed_form(self):
        """For the square and rho = e1 the integral is (1 - e^{-p tau})/(p tau)."""
        sq = G.ConvexPolygon(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))
        for p, tau in [(2.0, 5.0), (3.0, 10.0), (1.5, 8.0)]:
            cell = 0.2 / (p * tau)
            val = G.penetration_integral(sq, (1.0, 0.0), tau, p, cell)
            ref = (1.0 - math.exp(-p * tau)) / (p * tau)
            assert val == pytest.approx(ref, rel=0.01)

    def test_monotone_decreasing_in_tau(self):
        d = G.Disk(center=(0.0, 0.0), radius=0.3)
        taus = np.linspace(5.0, 40.0, 8)
        vals = [G.penetration_integral(d, (1.0, 0.0), t, 2.0, 0.2 / (2.0 * t)) for t in taus]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_disk_decay_exponent(self):
        """Smooth boundary: log-log slope sits between -2 and -1 (near -3/2)."""
        d = G.Disk(center=(0.0, 0.0), radius=0.3)
        taus = np.linspace(5.0, 40.0, 8)
        vals = [G.penetration_integral(d, (1.0, 0.0), t, 2.0, 0.2 / (2.0 * t)) for t in taus]
        slope = np.polyfit(np.log(taus), np.log(vals), 1)[0]
        assert -2.0 < slope < -1.0

    def test_tau_squared_lower_bound(self):
        d = G.Disk(center=(0.0, 0.0), radius=0.3)
        for tau in np.linspace(5.0, 40.0, 8):
            val = G.penetration_integral(d, (1.0, 0.0), tau, 2.0, 0.2 / (2.0 * tau))
            assert tau * tau * val > 0.5

    def test_cell_resolution_guard(self):
        with pytest.raises(ResolutionError):
            G.penetration_integral(G.Disk(center=(0, 0), radius=0.3), (1.0, 0.0), 20.0, 2.0, 0.05)


class TestHalfspaceIntersection:
    def test_axis_aligned_box(self):
        ests = [G.SupportEstimate(rho=r, h_hat=1.0, slope_fit_residual=0.0)
                for r in [(1, 0), (-1, 0), (0, 1), (0, -1)]]
        hull = G.halfspace_intersection(ests)
        got = sorted(map(tuple, np.round(hull.vertices, 12)))
        assert got == [(-1, -1), (-1, 1), (1, -1), (1, 1)]

    def test_64_directions_circumscribe_disk(self):
        """Exact support data yields the circumscribed polygon of the disk."""
        c, r = (0.2, 0.1), 0.3
        d = G.Disk(center=c, radius=r)
        dirs = [unit(2 * math.pi * k / 64) for k in range(64)]
        ests = [G.SupportEstimate(rho=q, h_hat=G.support_function(d, q), slope_fit_residual=0.0)
                for q in dirs]
        hull = G.halfspace_intersection(ests)
        # every vertex sits at distance r * sec(pi/64) from the center
        dist = np.hypot(hull.vertices[:, 0] - c[0], hull.vertices[:, 1] - c[1])
        spike = r * (1.0 / math.cos(math.pi / 64) - 1.0)
        np.testing.assert_allclose(dist, r + spike, atol=1e-12)
        # circumscribed, so 1/cos(pi/64) times the chord bound of the statement
        assert G.hausdorff_distance(hull, disk_polygon(c, r, 4096)) <= \
            r * (1.0 - math.cos(math.pi / 64)) / math.cos(math.pi / 64) + 1e-6

    def test_two_directions_unbounded(self):
        ests = [G.SupportEstimate(rho=(1, 0), h_hat=1.0, slope_fit_residual=0.0),
                G.SupportEstimate(rho=(-1, 0), h_hat=1.0, slope_fit_residual=0.0)]
        with pytest.raises(UnboundedRegionError):
            G.halfspace_intersection(ests)

    def test_half_plane_gap_unbounded(self):
        ests = [G.SupportEstimate(rho=unit(t), h_hat=1.0, slope_fit_residual=0.0)
                for t in (0.0, 0.5, 1.0)]
        with pytest.raises(UnboundedRegionError):
            G.halfspace_intersection(ests)

    def test_inconsistent_estimates_empty(self):
        ests = [G.SupportEstimate(rho=(1, 0), h_hat=-5.0, slope_fit_residual=0.0),
                G.SupportEstimate(rho=(-1, 0), h_hat=-5.0, slope_fit_residual=0.0),
                G.SupportEstimate(rho=(0, 1), h_hat=1.0, slope_fit_residual=0.0),
                G.SupportEstimate(rho=(0, -1), h_hat=1.0, slope_fit_residual=0.0)]
        with pytest.raises(EmptyIntersectionError):
            G.halfspace_intersection(ests)

    def test_redundant_constraint_ignored(self):
        """A slack half-plane must not delete the vertex between its neighbors."""
        ests = [G.SupportEstimate(rho=r, h_hat=1.0, slope_fit_residual=0.0)
                for r in [(1, 0), (-1, 0), (0, 1), (0, -1)]]
        ests.append(G.SupportEstimate(rho=unit(math.pi / 4), h_hat=10.0, slope_fit_residual=0.0))
        hull = G.halfspace_intersection(ests)
        got = sorted(map(tuple, np.round(hull.vertices, 12)))
        assert got == [(-1, -1), (-1, 1), (1, -1), (1, 1)]

    def test_idempotent_on_own_output(self):
        d = G.Disk(center=(0.2, 0.1), radius=0.3)
        dirs = [unit(2 * math.pi * k / 16) for k in range(16)]
        ests = [G.SupportEstimate(rho=q, h_hat=G.support_function(d, q), slope_fit_residual=0.0)
                for q in dirs]
        hull = G.halfspace_intersection(ests)
        poly = G.ConvexPolygon(hull.vertices)
        ests2 = [G.SupportEstimate(rho=q, h_hat=G.support_function(poly, q), slope_fit_residual=0.0)
                 for q in dirs]
        hull2 = G.halfspace_intersection(ests2)
        assert G.hausdorff_distance(hull, hull2) <= 1e-9


class TestHausdorffDistance:
    def test_identical_polygons(self):
        sq = G.square((0.0, 0.0), 2.0)
        assert G.hausdorff_distance(sq, sq) == 0.0

    def test_translation(self):
        a = G.square((0.0, 0.0), 1.0)
        b = G.square((0.1, 0.0), 1.0)
        assert G.hausdorff_distance(a, b) == pytest.approx(0.1, abs=1e-12)

    def test_nested_squares_against_brute_force(self):
        """Corner-to-corner distance sqrt(2), checked by dense boundary sampling."""
        small = G.square((0.0, 0.0), 2.0)
        big = G.square((0.0, 0.0), 4.0)
        got = G.hausdorff_distance(small, big)
        assert got == pytest.approx(math.sqrt(2.0), abs=1e-12)

        def boundary_points(poly, n=4000):
            v = poly.vertices
            w = np.roll(v, -1, axis=0)
            ts = np.linspace(0.0, 1.0, n // len(v), endpoint=False)
            return np.concatenate([a + ts[:, None] * (b - a) for a, b in zip(v, w)])

        pa = boundary_points(small)
        pb = boundary_points(big)

        # directed brute force against filled polygons: points inside cost 0,
        # points outside take the min distance to sampled boundary
        def dist_to_filled(pts, poly, samples):
            out = []
            for q in pts:
                if G.contains(poly, q):
                    out.append(0.0)
                else:
                    out.append(np.min(np.hypot(samples[:, 0] - q[0], samples[:, 1] - q[1])))
            return np.array(out)

        brute = max(dist_to_filled(pb, small, pa).max(), dist_to_filled(pa, big, pb).max())
        assert got == pytest.approx(brute, abs=2e-3)
