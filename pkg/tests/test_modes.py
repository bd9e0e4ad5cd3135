import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_modes
from wgqed.modes import (
    EXCLUDE_ZERO_MODE,
    ModeStatus,
    WaveguideGeometry,
    classify_modes,
    enumerate_modes,
    make_mode,
    resonance_loci,
)

gammas = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)


def indices(modes):
    return [m.index for m in modes]


class TestGeometry:
    def test_lengths_recoverable(self):
        g = WaveguideGeometry(1.5, 1.6, wavelength=0.8)
        assert g.L_x == 1.5 * 0.8 / 2
        assert g.L_y == 1.6 * 0.8 / 2
        g2 = WaveguideGeometry.from_lengths(g.L_x, g.L_y, 0.8)
        assert g2.gamma_x == pytest.approx(1.5, rel=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_gamma(self, bad):
        with pytest.raises(ValueError):
            WaveguideGeometry(bad, 1.0)

    def test_rejects_bad_wavelength(self):
        with pytest.raises(ValueError):
            WaveguideGeometry(1.0, 1.0, wavelength=0.0)


class TestEnumerate:
    def test_forbidden(self):
        assert enumerate_modes(WaveguideGeometry(0.8, 0.8)) == []

    def test_fig1_geometry(self):
        assert indices(enumerate_modes(WaveguideGeometry(1.5, 1.6))) == brute_modes(1.5, 1.6, 10)
        assert set(indices(enumerate_modes(WaveguideGeometry(1.5, 1.6)))) == {(1, 0), (0, 1), (1, 1)}

    def test_exact_cutoff_excluded(self):
        assert enumerate_modes(WaveguideGeometry(1.0, 1.0)) == []

    def test_zero_mode_excluded(self):
        assert EXCLUDE_ZERO_MODE
        assert (0, 0) not in indices(enumerate_modes(WaveguideGeometry(5.0, 5.0)))
        with pytest.raises(ValueError):
            make_mode(WaveguideGeometry(5.0, 5.0), 0, 0)

    def test_sorted(self):
        idx = indices(enumerate_modes(WaveguideGeometry(4.3, 3.7)))
        assert idx == sorted(idx)

    def test_mode_fields(self):
        g = WaveguideGeometry(1.5, 1.6, wavelength=2.0)
        for m in enumerate_modes(g):
            assert 0 <= m.u < 1
            assert m.k0 > 0
            assert m.k_x == m.n_x * math.pi / g.L_x
            assert m.k_y == m.n_y * math.pi / g.L_y
            assert m.k0**2 + m.k_x**2 + m.k_y**2 == pytest.approx(g.omega**2, rel=1e-12)

    def test_matches_brute_force_random(self):
        rng = np.random.default_rng(1234)
        for gx, gy in rng.uniform(0, 20, size=(1000, 2)):
            if gx == 0 or gy == 0:
                continue
            assert indices(enumerate_modes(WaveguideGeometry(gx, gy))) == brute_modes(gx, gy)

    @given(gammas, gammas, st.floats(1.0, 3.0), st.floats(1.0, 3.0))
    def test_monotone_in_size(self, gx, gy, sx, sy):
        small = set(indices(enumerate_modes(WaveguideGeometry(gx, gy))))
        big = set(indices(enumerate_modes(WaveguideGeometry(gx * sx, gy * sy))))
        assert small <= big

    @given(gammas, gammas)
    def test_exchange_symmetry(self, gx, gy):
        a = {(nx, ny) for nx, ny in indices(enumerate_modes(WaveguideGeometry(gx, gy)))}
        b = {(ny, nx) for nx, ny in indices(enumerate_modes(WaveguideGeometry(gy, gx)))}
        assert a == b


class TestClassify:
    def test_resonant_just_above_cutoff(self):
        reports = {r.index: r for r in classify_modes(WaveguideGeometry(1.0 + 1e-9, 1.6), 1e-6)}
        assert reports[(1, 0)].status is ModeStatus.RESONANT

    def test_fig1_geometry(self):
        reports = {r.index: r.status for r in classify_modes(WaveguideGeometry(1.5, 1.6), 1e-6)}
        for idx in [(1, 0), (0, 1), (1, 1)]:
            assert reports[idx] is ModeStatus.PROPAGATING
        for idx in [(2, 0), (0, 2)]:
            assert reports[idx] is ModeStatus.EVANESCENT

    def test_all_evanescent(self):
        reports = classify_modes(WaveguideGeometry(0.5, 0.5), 1e-6)
        assert reports
        assert all(r.status is ModeStatus.EVANESCENT for r in reports)

    def test_coverage(self):
        g = WaveguideGeometry(1.5, 1.6)
        idx = {r.index for r in classify_modes(g, 1e-6)}
        expected = {(a, b) for a in range(4) for b in range(4)} - {(0, 0)}
        assert idx == expected

    @pytest.mark.parametrize("eps", [0.0, 1.0, -1e-3, 2.0])
    def test_rejects_epsilon(self, eps):
        with pytest.raises(ValueError):
            classify_modes(WaveguideGeometry(1.5, 1.6), eps)

    @given(gammas, gammas, st.floats(1e-9, 0.5))
    def test_status_consistent(self, gx, gy, eps):
        for r in classify_modes(WaveguideGeometry(gx, gy), eps):
            assert r.distance == 1 - r.u
            if r.status is ModeStatus.RESONANT:
                assert abs(1 - r.u) <= eps
            elif r.status is ModeStatus.EVANESCENT:
                assert r.u > 1 and abs(1 - r.u) > eps
            else:
                assert r.u < 1 and abs(1 - r.u) > eps


class TestResonanceLoci:
    def test_fig1(self):
        loci = resonance_loci(1.6, 3.0)
        values = [v for v, _ in loci]
        expected = [1.0, 1.6 / math.sqrt(1.56), 2.0, 2 * 1.6 / math.sqrt(1.56), 3.0]
        assert values == pytest.approx(expected, rel=1e-14)
        assert values[1] == pytest.approx(1.28103, abs=5e-6)
        assert values[3] == pytest.approx(2.56205, abs=5e-6)
        assert [m for _, m in loci] == [[(1, 0)], [(1, 1)], [(2, 0)], [(2, 1)], [(3, 0)]]

    def test_sign_change_crosscheck(self):
        # 1 - u of the contributing mode changes sign across each locus
        for value, modes in resonance_loci(1.6, 3.0):
            for nx, ny in modes:
                below = WaveguideGeometry(value * (1 - 1e-7), 1.6).transverse_fraction(nx, ny)
                above = WaveguideGeometry(value * (1 + 1e-7), 1.6).transverse_fraction(nx, ny)
                assert below > 1 > above

    def test_no_ny_branch_below_one(self):
        assert [v for v, _ in resonance_loci(0.8, 3.0)] == [1.0, 2.0, 3.0]

    def test_empty(self):
        assert resonance_loci(1.6, 0.5) == []

    def test_merged_duplicates(self):
        # gamma_y = 2/sqrt(3): (1,1) locus at gamma_x = 2 coincides with (2,0)
        gy = 2 / math.sqrt(3)
        loci = dict((round(v, 9), m) for v, m in resonance_loci(gy, 2.5))
        assert sorted(loci[2.0]) == [(1, 1), (2, 0)]

    @given(st.floats(0.2, 6.0), st.floats(0.5, 8.0))
    @settings(max_examples=60)
    def test_loci_are_cutoffs(self, gy, gmax):
        values = [v for v, _ in resonance_loci(gy, gmax)]
        assert values == sorted(values)
        for v in values:
            assert 0 < v <= gmax * (1 + 1e-12)
            g = WaveguideGeometry(v, gy)
            best = min(abs(1 - r.u) for r in classify_modes(g, 0.5))
            assert best <= 1e-12
