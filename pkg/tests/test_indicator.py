"""Indicator evaluation, tau sweeps, support estimates, reconstruction."""

import math

import numpy as np
import pytest

from penclose import geometry as G, indicator as I, mesh as M
from penclose.config import RunConfig
from penclose.errors import (
    BudgetError,
    InsufficientDataError,
    NoiseFloorError,
    ResolutionError,
)

from conftest import disk_polygon


def synthetic_sweep(taus, values, floors=None):
    samples = [
        I.IndicatorSample(rho=(1.0, 0.0), tau=t, t=0.0, value=v,
                          pairing_sigma=v, pairing_background=0.0)
        for t, v in zip(taus, values)
    ]
    if floors is None:
        floors = np.zeros(len(taus))
    return I._fit_sweep(samples, floors)


class TestIndicator:
    def test_value_consistency(self, unit_square_origin, test_disk, profiles):
        m = I._mesh_for_tau(unit_square_origin, 4.0, 40000)
        sig = M.assign_conductivity(m, test_disk, 1.0)
        s = I.indicator(m, sig, profiles(3.0), (1.0, 0.0), 4.0, 0.5, 3.0)
        expected = 4.0 ** (2.0 - 3.0) * (s.pairing_sigma - s.pairing_background)
        assert s.value == pytest.approx(expected, rel=1e-12)

    def test_empty_inclusion_gives_exact_zero(self, unit_square_origin, profiles):
        m = I._mesh_for_tau(unit_square_origin, 4.0, 40000)
        sig = M.background_field(m)
        s = I.indicator(m, sig, profiles(3.0), (0.0, 1.0), 4.0, 0.5, 3.0)
        assert s.value == 0.0

    @pytest.mark.parametrize("contrast,sign", [(1.0, 1), (-0.5, -1)])
    def test_sign_follows_contrast(self, unit_square_origin, test_disk, profiles, contrast, sign):
        m = I._mesh_for_tau(unit_square_origin, 5.0, 40000)
        sig = M.assign_conductivity(m, test_disk, contrast)
        s = I.indicator(m, sig, profiles(3.0), (1.0, 0.0), 5.0, 0.5, 3.0)
        assert math.copysign(1.0, s.value) == sign

    def test_offset_ratio_identity(self, unit_square_origin, test_disk, profiles):
        """I(tau, t1) / I(tau, t2) = exp(p tau (t2 - t1)), exact discretely."""
        m = I._mesh_for_tau(unit_square_origin, 6.0, 40000)
        sig = M.assign_conductivity(m, test_disk, 1.0)
        prof = profiles(3.0)
        t1, t2 = 0.35, 0.5
        s1 = I.indicator(m, sig, prof, (1.0, 0.0), 6.0, t1, 3.0)
        s2 = I.indicator(m, sig, prof, (1.0, 0.0), 6.0, t2, 3.0)
        assert s1.value / s2.value == pytest.approx(math.exp(3.0 * 6.0 * (t2 - t1)), rel=1e-6)

    def test_aliasing_mesh_rejected(self, unit_square_origin, test_disk, profiles):
        m = M.generate_mesh(unit_square_origin, 0.2)
        sig = M.assign_conductivity(m, test_disk, 1.0)
        with pytest.raises(ResolutionError):
            I.indicator(m, sig, profiles(3.0), (1.0, 0.0), 10.0, 0.5, 3.0)


class TestSweep:
    def test_regime_separation(self, unit_square_origin, test_disk, profiles):
        """Slope sign tracks sign(h_D(rho) - t) away from the touching offset."""
        prof = profiles(2.0, span=20.0)
        h_d = 0.5
        taus = (4.0, 6.0, 8.0, 10.0)
        far = I.sweep(unit_square_origin, test_disk, 1.0, prof, (1.0, 0.0), h_d + 0.2, 2.0, taus)
        near = I.sweep(unit_square_origin, test_disk, 1.0, prof, (1.0, 0.0), h_d - 0.2, 2.0, taus)
        at = I.sweep(unit_square_origin, test_disk, 1.0, prof, (1.0, 0.0), h_d, 2.0, taus)
        assert far.slope < -0.1
        assert near.slope > 0.1
        assert abs(at.slope) < 0.1 * 2.0

    def test_budget_error(self, unit_square_origin, test_disk, profiles):
        with pytest.raises(BudgetError):
            I.sweep(unit_square_origin, test_disk, 1.0, profiles(2.0, span=20.0),
                    (1.0, 0.0), 0.5, 2.0, (4.0, 20.0), mesh_budget=2000)

    def test_empty_inclusion_all_below_floor(self, unit_square_origin, profiles):
        sw = I.sweep(unit_square_origin, None, 0.0, profiles(2.0, span=20.0),
                     (1.0, 0.0), 0.5, 2.0, (3.0, 4.0, 5.0, 6.0))
        assert not sw.usable.any()
        assert sw.sign == 0


class TestEstimateSupport:
    def test_pure_exponential_is_exact(self):
        taus = np.array([4.0, 6.0, 8.0, 10.0, 12.0, 14.0])
        p = 3.0
        sw = synthetic_sweep(taus, np.exp(p * taus * 0.5))
        est = I.estimate_support(sw, 0.0, p)
        assert est.h_hat == pytest.approx(0.5, abs=1e-12)
        assert est.slope_fit_residual == pytest.approx(0.0, abs=1e-12)

    def test_polynomial_prefactor_washes_out(self):
        p, h_true = 2.0, 0.3
        errs = []
        for tau_max in (20.0, 40.0, 80.0):
            taus = np.linspace(4.0, tau_max, 10)
            sw = synthetic_sweep(taus, taus ** 2 * np.exp(p * taus * h_true))
            est = I.estimate_support(sw, 0.0, p)
            errs.append(abs(est.h_hat - h_true))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 0.02

    def test_full_pipeline_disk_direction(self, unit_square_origin, test_disk, profiles):
        """End to end at rho = e1 the estimate lands within 0.1 of the exact 0.5."""
        sw = I.sweep(unit_square_origin, test_disk, 1.0, profiles(3.0), (1.0, 0.0),
                     0.5, 3.0, (4.0, 6.0, 8.0, 10.0, 12.0))
        est = I.estimate_support(sw, 0.5, 3.0)
        assert 0.4 <= est.h_hat <= 0.6

    def test_noise_floor_error(self):
        taus = np.array([4.0, 6.0, 8.0, 10.0])
        sw = synthetic_sweep(taus, np.full(4, 1e-12), floors=np.full(4, 1e-6))
        with pytest.raises(NoiseFloorError):
            I.estimate_support(sw, 0.0, 2.0)

    def test_insufficient_data_error(self):
        taus = np.array([4.0, 6.0, 8.0, 10.0])
        floors = np.array([0.0, 1e6, 1e6, 0.0])
        sw = synthetic_sweep(taus, np.exp(taus), floors=floors)
        with pytest.raises(InsufficientDataError):
            I.estimate_support(sw, 0.0, 2.0)


class TestReconstruction:
    def test_disk_hull_p2(self, unit_square_origin, test_disk):
        cfg = RunConfig(
            p=2.0, domain=unit_square_origin, inclusion=test_disk, sigma_d=1.0,
            directions=16, tau_list=(3.0, 4.0, 5.0, 6.0, 7.0, 8.0), mesh_budget=12000,
        )
        res = I.reconstruct_hull(cfg)
        assert res.detected
        assert len(res.hull.vertices) >= 8
        exact = disk_polygon((0.2, 0.1), 0.3)
        assert G.hausdorff_distance(res.hull, exact) <= 0.1
        assert all(sw.sign == 1 for sw in res.sweeps)

    def test_no_inclusion_detected(self, unit_square_origin):
        cfg = RunConfig(
            p=2.0, domain=unit_square_origin, inclusion=None, sigma_d=0.0,
            directions=8, tau_list=(3.0, 4.0, 5.0, 6.0), mesh_budget=8000,
        )
        res = I.reconstruct_hull(cfg)
        assert not res.detected
        assert res.hull is None
        assert any("no inclusion detected" in m for m in res.messages)

    def test_uniform_directions(self):
        dirs = I.uniform_directions(8)
        assert len(dirs) == 8
        for d in dirs:
            assert math.hypot(*d) == pytest.approx(1.0)
