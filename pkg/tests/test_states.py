import math

import numpy as np
import pytest

from cvcavity import (CavityParams, SqueezedThermalState, ThermalOccupation,
                      correlation_variance, correlation_variance_offset,
                      difference_quadrature_variance, is_entangled,
                      quadrature_noise, sum_quadrature_variance, thermal_decay)


def random_state(rng):
    return SqueezedThermalState(u=float(rng.uniform(0.0, 2.0)),
                                phi=float(rng.uniform(-math.pi, math.pi)),
                                n1=float(rng.uniform(0.0, 5.0)),
                                n2=float(rng.uniform(0.0, 5.0)))


class TestCavityParams:
    def test_derived_quantities_exact(self):
        p = CavityParams(gamma1=2.0, gamma2=1.0, omega1=3.0, omega2=4.5)
        assert p.gamma_plus == (2.0 + 1.0) / 2.0
        assert p.gamma_minus == (2.0 - 1.0) / 2.0
        assert p.zeta == p.gamma_minus / p.gamma_plus
        assert p.omega_s == 3.0 + 4.5

    def test_zeta_bounded(self):
        p = CavityParams(gamma1=1e6, gamma2=1e-6)
        assert abs(p.zeta) < 1.0

    @pytest.mark.parametrize("g1,g2", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_rejects_nonpositive_rates(self, g1, g2):
        with pytest.raises(ValueError):
            CavityParams(gamma1=g1, gamma2=g2)


class TestSqueezedThermalState:
    def test_vacuum(self):
        v = SqueezedThermalState.vacuum()
        assert (v.u, v.n1, v.n2) == (0.0, 0.0, 0.0)
        assert v.total_thermal == 0.0

    @pytest.mark.parametrize("field", ["u", "n1", "n2"])
    def test_rejects_negative(self, field):
        kwargs = dict(u=0.1, phi=0.0, n1=0.2, n2=0.3)
        kwargs[field] = -1e-9
        with pytest.raises(ValueError):
            SqueezedThermalState(**kwargs)


class TestThermalOccupation:
    def test_mean_from_boltzmann(self):
        occ = ThermalOccupation(x=0.5)
        assert occ.n == 0.5 / (1.0 - 0.5)

    def test_round_trip(self):
        occ = ThermalOccupation.from_mean_photons(3.0)
        assert math.isclose(occ.n, 3.0, rel_tol=1e-15)

    @pytest.mark.parametrize("x", [-0.1, 1.0, 1.5])
    def test_rejects_out_of_range(self, x):
        with pytest.raises(ValueError):
            ThermalOccupation(x=x)


class TestThermalDecay:
    def setup_method(self):
        self.params = CavityParams(gamma1=2.0, gamma2=1.0)

    def test_identity_at_zero_time(self):
        p = CavityParams(gamma1=1.0, gamma2=1.0)
        assert thermal_decay(1.0, 1.0, p, 0.0) == (1.0, 1.0)

    def test_vacuum_stays_vacuum(self):
        assert thermal_decay(0.0, 0.0, self.params, 7.3) == (0.0, 0.0)

    def test_direct_substitution(self):
        # gamma1 = 2 gamma2, t = 1/gamma2
        n1, n2 = thermal_decay(2.0, 2.0, self.params, 1.0)
        assert math.isclose(n1, 2.0 * math.exp(-2.0), rel_tol=1e-15)
        assert math.isclose(n2, 2.0 * math.exp(-1.0), rel_tol=1e-15)

    def test_composition(self, rng):
        for _ in range(25):
            n0 = float(rng.uniform(0.0, 10.0))
            t1, t2 = rng.uniform(0.0, 3.0, size=2)
            p = CavityParams(gamma1=float(rng.uniform(0.1, 3.0)),
                             gamma2=float(rng.uniform(0.1, 3.0)))
            a1, b1 = thermal_decay(n0, n0, p, float(t1))
            a2, b2 = thermal_decay(a1, b1, p, float(t2))
            a12, b12 = thermal_decay(n0, n0, p, float(t1 + t2))
            assert math.isclose(a2, a12, rel_tol=1e-12)
            assert math.isclose(b2, b12, rel_tol=1e-12)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            thermal_decay(1.0, 1.0, self.params, -0.1)
        with pytest.raises(ValueError):
            thermal_decay(-1.0, 1.0, self.params, 0.1)


class TestQuadratureNoise:
    def test_vacuum_noise(self):
        assert quadrature_noise(SqueezedThermalState.vacuum(), 1) == 0.5
        assert quadrature_noise(SqueezedThermalState.vacuum(), 2) == 0.5

    def test_thermal_mode(self):
        s = SqueezedThermalState(u=0.0, phi=0.0, n1=1.0, n2=0.0)
        assert math.isclose(quadrature_noise(s, 1), math.sqrt(3.0) / 2.0,
                            rel_tol=1e-15)
        assert quadrature_noise(s, 2) == 0.5

    def test_pure_squeezed_vacuum(self):
        s = SqueezedThermalState(u=1.0, phi=0.3, n1=0.0, n2=0.0)
        assert math.isclose(quadrature_noise(s, 1),
                            math.sqrt(math.cosh(2.0) / 4.0), rel_tol=1e-15)

    def test_never_below_vacuum(self, rng):
        # no single-mode squeezing: the uncertainty circle radius is >= 1/2
        for _ in range(200):
            s = random_state(rng)
            assert quadrature_noise(s, 1) >= 0.5
            assert quadrature_noise(s, 2) >= 0.5

    def test_rejects_bad_mode(self):
        with pytest.raises(ValueError):
            quadrature_noise(SqueezedThermalState.vacuum(), 3)


class TestCorrelationVariance:
    def test_vacuum_at_separability_boundary(self):
        assert correlation_variance(SqueezedThermalState.vacuum()) == 1.0

    def test_pure_squeezing(self):
        s = SqueezedThermalState(u=math.log(2.0), phi=0.0, n1=0.0, n2=0.0)
        assert math.isclose(correlation_variance(s), 0.25, rel_tol=1e-15)

    def test_direct_substitution(self):
        s = SqueezedThermalState(u=0.5, phi=0.0, n1=1.0, n2=0.5)
        assert math.isclose(correlation_variance(s), 2.5 * math.exp(-1.0),
                            rel_tol=1e-15)


class TestCorrelationVarianceOffset:
    def test_zero_offset_matches_exactly(self, rng):
        for _ in range(100):
            s = random_state(rng)
            assert correlation_variance_offset(s, 0.0) == correlation_variance(s)

    def test_quarter_turn(self):
        s = SqueezedThermalState(u=1.0, phi=0.0, n1=0.0, n2=0.0)
        assert math.isclose(correlation_variance_offset(s, math.pi / 2.0),
                            math.cosh(2.0), rel_tol=1e-14)

    def test_monotone_in_offset_magnitude(self, rng):
        angles = np.linspace(0.0, math.pi, 60)
        for _ in range(20):
            s = random_state(rng)
            if s.u == 0.0:
                continue
            values = [correlation_variance_offset(s, float(a)) for a in angles]
            assert all(b >= a for a, b in zip(values, values[1:]))
            # and symmetric in the sign of the offset
            assert correlation_variance_offset(s, -0.3) == \
                correlation_variance_offset(s, 0.3)

    def test_strictly_above_matched_value_when_squeezed(self, rng):
        for _ in range(50):
            s = random_state(rng)
            if s.u < 1e-3:
                continue
            assert correlation_variance_offset(s, 0.05) > correlation_variance(s)


class TestEntanglementCondition:
    def test_threshold(self):
        assert is_entangled(0.25)
        assert not is_entangled(1.0)
        assert not is_entangled(60.0)

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            is_entangled(-0.1)


class TestJointQuadraturePair:
    def test_x_equals_y_exactly(self, rng):
        for _ in range(200):
            s = random_state(rng)
            beta = float(rng.uniform(-10.0, 10.0))
            assert sum_quadrature_variance(s, beta) == \
                difference_quadrature_variance(s, beta)

    def test_phase_matched_sum_is_correlation_variance(self, rng):
        for _ in range(50):
            s = random_state(rng)
            total = sum_quadrature_variance(s, -s.phi) \
                + difference_quadrature_variance(s, -s.phi)
            assert math.isclose(total, correlation_variance(s), rel_tol=1e-12)

    def test_antimatched_angle_maximizes(self):
        s = SqueezedThermalState(u=0.7, phi=0.4, n1=0.2, n2=0.1)
        matched = sum_quadrature_variance(s, -s.phi)
        anti = sum_quadrature_variance(s, -s.phi + math.pi)
        expected = 0.5 * (1.0 + s.n1 + s.n2) * math.exp(2.0 * s.u)
        assert math.isclose(anti, expected, rel_tol=1e-12)
        assert anti > matched
