import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import brute_eta_directional, brute_eta_mean
from wgqed.emission import (
    DipoleOrientation,
    DivergentSumError,
    TransitionSpec,
    eta_directional,
    eta_directional_many,
    eta_mean,
    eta_mean_monte_carlo,
    eta_mean_terms,
    free_space_rate,
    in_guide_rate,
    large_gamma_window_average,
    sin2_theta,
)
from wgqed.modes import WaveguideGeometry, enumerate_modes, make_mode, resonance_loci

# Frozen from tests/oracles.py (30-digit mpmath mode sums).
ETA_MEAN_15_16 = 0.6744209363752788
ETA_Z_15_16 = 0.6272528849755495

angles = st.tuples(st.floats(0, math.pi), st.floats(0, 2 * math.pi, exclude_max=True))


def non_resonant(gx, gy, margin=1e-6):
    g = WaveguideGeometry(gx, gy)
    return all(abs(1 - g.transverse_fraction(a, b)) > margin
               for a in range(math.ceil(gx) + 2) for b in range(math.ceil(gy) + 2) if (a, b) != (0, 0))


class TestTransitionSpec:
    def test_from_levels(self):
        t = TransitionSpec.from_levels(3.0, 1.0, 0.5)
        assert t.omega == 2.0

    def test_inconsistent_levels(self):
        with pytest.raises(ValueError):
            TransitionSpec(1.0, 1.0, energy_upper=3.0, energy_lower=1.0)

    @pytest.mark.parametrize("omega,dip", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)])
    def test_invalid(self, omega, dip):
        with pytest.raises(ValueError):
            TransitionSpec(omega, dip)


class TestFreeSpace:
    def test_zero_dipole(self):
        assert free_space_rate(TransitionSpec(1.0, 0.0)) == 0.0

    def test_unit(self):
        assert free_space_rate(TransitionSpec(1.0, 1.0)) == pytest.approx(0.1061033, abs=1e-7)
        assert free_space_rate(TransitionSpec(1.0, 1.0)) == pytest.approx(1 / (3 * math.pi), rel=1e-15)

    def test_cubic_scaling(self):
        r1 = free_space_rate(TransitionSpec(1.0, 1.0))
        r2 = free_space_rate(TransitionSpec(2.0, 1.0))
        assert r2 == pytest.approx(8 / (3 * math.pi), rel=1e-15)
        assert r2 / r1 == pytest.approx(8.0, rel=1e-15)


class TestSin2Theta:
    def test_dipole_along_axis_gives_u(self):
        g = WaveguideGeometry(1.5, 1.6)
        for m in enumerate_modes(g):
            assert sin2_theta(m, DipoleOrientation(0.0)) == pytest.approx(m.u, rel=1e-13)
            assert sin2_theta(m, DipoleOrientation(0.0), branch=-1) == pytest.approx(m.u, rel=1e-13)

    def test_dipole_along_x(self):
        m = make_mode(WaveguideGeometry(1.5, 1.6), 1, 0)
        assert sin2_theta(m, DipoleOrientation(math.pi / 2, 0.0)) == pytest.approx(1 - 1 / 2.25, rel=1e-13)
        assert sin2_theta(m, DipoleOrientation(math.pi / 2, 0.0)) == pytest.approx(0.555556, abs=1e-6)

    def test_transverse_dipole_branch_independent(self):
        d = DipoleOrientation(math.pi / 2, 0.7)
        for m in enumerate_modes(WaveguideGeometry(2.3, 1.9)):
            assert sin2_theta(m, d, +1) == pytest.approx(sin2_theta(m, d, -1), abs=1e-15)

    @given(angles, st.floats(1.05, 6), st.floats(1.05, 6))
    def test_in_unit_interval(self, ang, gx, gy):
        d = DipoleOrientation(*ang)
        for m in enumerate_modes(WaveguideGeometry(gx, gy)):
            assert 0.0 <= sin2_theta(m, d) <= 1.0


class TestEtaMean:
    def test_forbidden(self):
        assert eta_mean(WaveguideGeometry(0.8, 0.8)) == 0.0

    def test_point_value(self):
        assert brute_eta_mean(1.5, 1.6) == pytest.approx(ETA_MEAN_15_16, rel=1e-15)
        assert eta_mean(WaveguideGeometry(1.5, 1.6)) == pytest.approx(ETA_MEAN_15_16, abs=1e-12)
        # per-mode terms as written out by hand
        hand = (1 / 3.20**0.5 + 1 / 3.51**0.5 + 1 / 0.95**0.5) / math.pi
        assert hand == pytest.approx(ETA_MEAN_15_16, rel=1e-12)

    def test_resonance_blowup(self):
        g = WaveguideGeometry(1 + 1e-6, 1.6)
        lead = (1 / math.pi) / math.sqrt(1.6**2 * ((1 + 1e-6) ** 2 - 1))
        assert eta_mean(g) > 100
        assert eta_mean(g) > lead

    def test_exact_cutoff_raises(self):
        with pytest.raises(DivergentSumError) as exc:
            eta_mean(WaveguideGeometry(1.0, 1.6))
        assert exc.value.mode == (1, 0)

    def test_terms_positive(self):
        terms = eta_mean_terms(WaveguideGeometry(4.7, 3.3))
        assert all(t > 0 for _, t in terms)

    def test_random_against_brute(self):
        rng = np.random.default_rng(7)
        for gx, gy in rng.uniform(0.3, 6.0, size=(25, 2)):
            if not non_resonant(gx, gy):
                continue
            assert eta_mean(WaveguideGeometry(gx, gy)) == pytest.approx(brute_eta_mean(gx, gy), rel=1e-12)

    @given(st.floats(0.1, 10), st.floats(0.1, 10))
    def test_swap_invariant(self, gx, gy):
        assume(non_resonant(gx, gy))
        a = eta_mean(WaveguideGeometry(gx, gy))
        b = eta_mean(WaveguideGeometry(gy, gx))
        assert a == pytest.approx(b, rel=1e-13)

    @pytest.mark.parametrize("locus,modes", resonance_loci(1.6, 3.0))
    def test_divergence_slope(self, locus, modes):
        vals = [eta_mean(WaveguideGeometry(locus + 10.0**-k, 1.6)) for k in (4, 6, 8)]
        for lo, hi in zip(vals, vals[1:]):
            slope = math.log10(hi / lo) / 2
            assert slope == pytest.approx(0.5, rel=0.05)

    def test_large_guide_tends_to_half(self):
        # diagnostic: single-polarization counting gives 1/2, not 1
        assert large_gamma_window_average(30.0) == pytest.approx(0.5, abs=0.05)


class TestEtaDirectional:
    def test_forbidden(self):
        for a, b in [(0, 0), (1.0, 2.0), (math.pi / 2, 0.3)]:
            assert eta_directional(WaveguideGeometry(0.8, 0.8), DipoleOrientation(a, b)) == 0.0

    def test_z_dipole(self):
        assert brute_eta_directional(1.5, 1.6, 0.0, 0.0) == pytest.approx(ETA_Z_15_16, rel=1e-14)
        val = eta_directional(WaveguideGeometry(1.5, 1.6), DipoleOrientation(0.0))
        assert val == pytest.approx(ETA_Z_15_16, abs=1e-12)
        assert val == pytest.approx(0.6273, abs=1e-4)

    @given(angles)
    @settings(max_examples=40, deadline=None)
    def test_against_dimensional_oracle(self, ang):
        got = eta_directional(WaveguideGeometry(2.3, 1.7), DipoleOrientation(*ang))
        assert got == pytest.approx(brute_eta_directional(2.3, 1.7, *ang), rel=1e-12, abs=1e-15)

    @given(st.floats(0.5, 6), st.floats(0.5, 6), st.floats(0, math.pi), st.floats(0, math.pi / 2))
    def test_swap_with_beta_reflection(self, gx, gy, alpha, beta):
        assume(non_resonant(gx, gy))
        a = eta_directional(WaveguideGeometry(gx, gy), DipoleOrientation(alpha, beta))
        b = eta_directional(WaveguideGeometry(gy, gx), DipoleOrientation(alpha, math.pi / 2 - beta))
        assert a == pytest.approx(b, rel=1e-12, abs=1e-15)

    def test_z_reflection_symmetry(self):
        g = WaveguideGeometry(2.6, 1.9)
        a = eta_directional(g, DipoleOrientation(0.4, 1.0))
        b = eta_directional(g, DipoleOrientation(math.pi - 0.4, 1.0))
        assert a == pytest.approx(b, rel=1e-13)

    def test_exact_cutoff_raises(self):
        with pytest.raises(DivergentSumError):
            eta_directional(WaveguideGeometry(2.0, 1.6), DipoleOrientation(0.3))

    def test_vectorized_matches_scalar(self):
        g = WaveguideGeometry(3.1, 2.2)
        alpha = np.array([0.1, 1.2, 2.9])
        beta = np.array([0.0, 3.0, 6.0])
        many = eta_directional_many(g, alpha, beta)
        for a, b, v in zip(alpha, beta, many):
            assert v == pytest.approx(eta_directional(g, DipoleOrientation(a, b)), rel=1e-14)

    def test_monte_carlo_average(self):
        g = WaveguideGeometry(1.5, 1.6)
        mean, err = eta_mean_monte_carlo(g, 1_000_000, seed=3)
        assert abs(mean - eta_mean(g)) <= 3 * err

    def test_monte_carlo_reproducible(self):
        g = WaveguideGeometry(2.5, 1.3)
        assert eta_mean_monte_carlo(g, 50_000, seed=11) == eta_mean_monte_carlo(g, 50_000, seed=11)


class TestInGuideRate:
    def test_forbidden(self):
        assert in_guide_rate(TransitionSpec(3.0, 2.0), WaveguideGeometry(0.8, 0.8)) == 0.0

    def test_unpolarized(self):
        t = TransitionSpec(1.0, 1.0)
        got = in_guide_rate(t, WaveguideGeometry(1.5, 1.6))
        assert got == pytest.approx(ETA_MEAN_15_16 / (3 * math.pi), rel=1e-12)

    def test_oriented(self):
        t = TransitionSpec(1.0, 1.0)
        got = in_guide_rate(t, WaveguideGeometry(1.5, 1.6), DipoleOrientation(0.0))
        assert got == pytest.approx(ETA_Z_15_16 / (3 * math.pi), rel=1e-12)

    def test_unit_ratio_geometry(self):
        from scipy.optimize import brentq

        # eta_mean falls through 1 between the (1,0) and (1,1) loci
        gx = brentq(lambda x: eta_mean(WaveguideGeometry(x, 1.6)) - 1.0, 1.01, 1.2, xtol=1e-15)
        g = WaveguideGeometry(gx, 1.6)
        t = TransitionSpec(1.3, 0.7)
        assert in_guide_rate(t, g) == pytest.approx(free_space_rate(t), rel=1e-10)

    def test_exact_cutoff_propagates(self):
        with pytest.raises(DivergentSumError):
            in_guide_rate(TransitionSpec(1.0, 1.0), WaveguideGeometry(1.0, 0.5))
