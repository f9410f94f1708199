"""Structured meshing, conductivity tagging, and P1 gradients."""

import math

import numpy as np
import pytest

from penclose import geometry as G, mesh as M
from penclose.errors import BudgetError, PositivityError


class TestGenerateMesh:
    def test_unit_square_2x2(self, unit_square_01):
        m = M.generate_mesh(unit_square_01, 0.5)
        assert m.n_vertices == 9
        assert len(m.triangles) == 8
        assert len(m.boundary_nodes) == 8

    def test_halving_quadruples_triangles(self, unit_square_01):
        coarse = M.generate_mesh(unit_square_01, 0.5)
        fine = M.generate_mesh(unit_square_01, 0.25)
        assert len(fine.triangles) == 4 * len(coarse.triangles)

    def test_all_areas_positive(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.1)
        assert m.areas.min() > 0.0

    def test_square_area_exact(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.07)
        assert abs(m.areas.sum() - 1.0) < 1e-10

    def test_disk_vertices_inside(self):
        m = M.generate_mesh(G.Disk(center=(0.0, 0.0), radius=1.0), 0.15)
        assert np.hypot(m.vertices[:, 0], m.vertices[:, 1]).max() <= 1.0 + 1e-12

    def test_disk_area_converges(self):
        exact = math.pi * 0.25
        errs = []
        for h in (0.2, 0.1, 0.05):
            m = M.generate_mesh(G.Disk(center=(0.0, 0.0), radius=0.5), h)
            errs.append(abs(m.areas.sum() - exact))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] / errs[1] < 0.35      # ~O(h^2)

    def test_boundary_nodes_on_rim(self):
        m = M.generate_mesh(G.Disk(center=(1.0, 2.0), radius=0.5), 0.1)
        r = np.hypot(m.vertices[m.boundary_nodes, 0] - 1.0, m.vertices[m.boundary_nodes, 1] - 2.0)
        np.testing.assert_allclose(r, 0.5, atol=1e-12)

    def test_vertex_budget(self, unit_square_01):
        with pytest.raises(BudgetError):
            M.generate_mesh(unit_square_01, 0.001, max_vertices=1000)

    def test_unsupported_shape(self):
        tri = G.ConvexPolygon(np.array([[0, 0], [1, 0], [0.2, 1]], dtype=float))
        with pytest.raises(ValueError):
            M.generate_mesh(tri, 0.1)


class TestAssignConductivity:
    def test_no_inclusion_is_background(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.1)
        sig = M.assign_conductivity(m, None, 0.7)
        np.testing.assert_array_equal(sig.values, 1.0)

    def test_covering_disk_sets_all(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.1)
        sig = M.assign_conductivity(m, G.Disk(center=(0, 0), radius=5.0), 1.0)
        np.testing.assert_array_equal(sig.values, 2.0)

    def test_contrast_below_minus_one_rejected(self, unit_square_origin, test_disk):
        m = M.generate_mesh(unit_square_origin, 0.1)
        with pytest.raises(PositivityError):
            M.assign_conductivity(m, test_disk, -2.0)

    def test_tagged_area_converges_linearly(self, unit_square_origin, test_disk):
        exact = math.pi * 0.3 ** 2
        perimeter = 2.0 * math.pi * 0.3
        prev = None
        for h in (0.05, 0.025, 0.0125):
            m = M.generate_mesh(unit_square_origin, h)
            sig = M.assign_conductivity(m, test_disk, 1.0)
            mismatch = abs(m.areas[sig.values > 1.5].sum() - exact)
            assert mismatch <= h * perimeter
            if prev is not None:
                assert mismatch < prev
            prev = mismatch

    def test_deterministic(self, unit_square_origin, test_disk):
        m = M.generate_mesh(unit_square_origin, 0.05)
        a = M.assign_conductivity(m, test_disk, 1.0)
        b = M.assign_conductivity(m, test_disk, 1.0)
        np.testing.assert_array_equal(a.values, b.values)


class TestP1Gradient:
    def test_coordinate_field(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.1)
        g = M.p1_gradient(m, m.vertices[:, 0])
        assert np.abs(g - np.array([1.0, 0.0])).max() < 1e-12

    def test_constant_field(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.1)
        g = M.p1_gradient(m, np.full(m.n_vertices, 2.5))
        np.testing.assert_allclose(g, 0.0, atol=1e-12)

    def test_affine_reproduction(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.07)
        f = 3.0 * m.vertices[:, 0] + 2.0 * m.vertices[:, 1] - 5.0
        g = M.p1_gradient(m, f)
        assert np.abs(g - np.array([3.0, 2.0])).max() < 1e-12

    def test_affine_on_disk_mesh(self):
        m = M.generate_mesh(G.Disk(center=(0.0, 0.0), radius=1.0), 0.1)
        f = -1.0 * m.vertices[:, 0] + 4.0 * m.vertices[:, 1] + 0.3
        g = M.p1_gradient(m, f)
        assert np.abs(g - np.array([-1.0, 4.0])).max() < 1e-11

    def test_wrong_length_rejected(self, unit_square_origin):
        m = M.generate_mesh(unit_square_origin, 0.2)
        with pytest.raises(ValueError):
            M.p1_gradient(m, np.zeros(m.n_vertices + 1))


class TestMeshDump:
    def test_csv_tables(self, unit_square_01, tmp_path):
        m = M.generate_mesh(unit_square_01, 0.5)
        m.dump_csv(tmp_path / "v.csv", tmp_path / "t.csv")
        vlines = (tmp_path / "v.csv").read_text().splitlines()
        tlines = (tmp_path / "t.csv").read_text().splitlines()
        assert vlines[0] == "x,y" and len(vlines) == 1 + m.n_vertices
        assert tlines[0] == "v0,v1,v2" and len(tlines) == 1 + len(m.triangles)
