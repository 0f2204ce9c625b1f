"""Tests for the lattice demo: plane waves, the Fermi sea as a true
ground state, W orbitals, origin measurements, and exchange holes."""

import numpy as np
import pytest

from conftest import random_orthonormal_columns, rng_for

from flosim.errors import BadConfig, ImpossibleOutcome, IndexOutOfRange
from flosim.bands import (
    BandProfile,
    LatticeConfig,
    centered_positions,
    closed_form_w0,
    exchange_hole_profile,
    fermi_sea,
    measure_origin,
    plane_wave,
    w_orbital,
)
from flosim.slater import SlaterState, measure_mode, slater_overlap
from flosim import fock


def hopping_generator(d):
    """Nearest-neighbor hopping with periodic wrap, strength -1."""
    b = np.zeros((d, d))
    for x in range(d):
        b[x, (x + 1) % d] = -1.0
        b[(x + 1) % d, x] = -1.0
    return b


class TestLatticeConfig:
    def test_valid(self):
        cfg = LatticeConfig(15, 7)
        assert cfg.filling == pytest.approx(7 / 15)

    @pytest.mark.parametrize("d,n", [(14, 7), (15, 6), (15, 0), (5, 7), (0, 1)])
    def test_invalid(self, d, n):
        with pytest.raises(BadConfig):
            LatticeConfig(d, n)


class TestPlaneWave:
    def test_uniform_at_zero_momentum(self):
        v = plane_wave(5, 0)
        assert np.allclose(v, np.full(5, 1 / np.sqrt(5)))

    def test_unit_norm(self):
        for n in range(-4, 5):
            assert np.linalg.norm(plane_wave(9, n)) == pytest.approx(1.0, abs=1e-12)

    def test_pairwise_orthogonality(self):
        d = 9
        waves = [plane_wave(d, n) for n in range(-4, 5)]
        gram = np.array([[np.vdot(a, b) for b in waves] for a in waves])
        assert np.linalg.norm(gram - np.eye(d)) <= 1e-12

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            plane_wave(9, 5)
        with pytest.raises(IndexOutOfRange):
            plane_wave(9, -5)


class TestFermiSea:
    def test_single_electron(self):
        sea = fermi_sea(LatticeConfig(3, 1))
        assert sea.electrons == 1
        assert np.allclose(sea.orbitals[:, 0], np.full(3, 1 / np.sqrt(3)))

    def test_momentum_window(self):
        cfg = LatticeConfig(15, 7)
        sea = fermi_sea(cfg)
        for col, n in enumerate(range(-3, 4)):
            assert np.allclose(sea.orbitals[:, col], plane_wave(15, n), atol=1e-12)

    def test_orthonormal(self):
        sea = fermi_sea(LatticeConfig(9, 5))
        gram = sea.orbitals.conj().T @ sea.orbitals
        assert np.linalg.norm(gram - np.eye(5)) <= 1e-12

    def test_minimizes_hopping_energy(self):
        """No random determinant with the same electron count undercuts
        the sea's expectation of the hopping Hamiltonian."""
        rng = rng_for(110)
        d, n = 9, 3
        b = hopping_generator(d)

        def energy(state):
            vec = fock.expand(state)
            hv = fock.one_body_generator_apply(vec, b)
            return fock.inner(vec, hv).real

        sea_energy = energy(fermi_sea(LatticeConfig(d, n)))
        for _ in range(200):
            trial = SlaterState(random_orthonormal_columns(rng, d, n))
            assert energy(trial) >= sea_energy - 1e-9


class TestWOrbitals:
    def test_origin_amplitude(self):
        cfg = LatticeConfig(15, 7)
        w0 = w_orbital(cfg, 0)
        assert abs(w0[0] - np.sqrt(cfg.filling)) <= 1e-12

    def test_orthonormal_family(self):
        cfg = LatticeConfig(15, 7)
        cols = np.column_stack([w_orbital(cfg, s) for s in range(7)])
        gram = cols.conj().T @ cols
        assert np.linalg.norm(gram - np.eye(7)) <= 1e-10

    def test_spans_the_sea(self):
        cfg = LatticeConfig(9, 5)
        sea = fermi_sea(cfg).orbitals
        cols = np.column_stack([w_orbital(cfg, s) for s in range(5)])
        p_sea = sea @ sea.conj().T
        p_w = cols @ cols.conj().T
        assert np.linalg.norm(p_sea - p_w) <= 1e-10

    def test_out_of_range(self):
        cfg = LatticeConfig(9, 5)
        with pytest.raises(IndexOutOfRange):
            w_orbital(cfg, 5)
        with pytest.raises(IndexOutOfRange):
            w_orbital(cfg, -1)

    def test_closed_form_is_large_lattice_limit(self):
        """The ratio exact/closed is (pi x/D)/sin(pi x/D): the deviation
        at D = 105 sits near 1.9e-3 for |x| <= 20 and shrinks with D."""
        big = LatticeConfig(105, 21)
        w0 = w_orbital(big, 0)
        x = centered_positions(105)
        window = np.abs(x) <= 20
        exact = np.real(w0[np.mod(x, 105)])[window]
        assert np.max(np.abs(np.imag(w0))) <= 1e-12
        closed = closed_form_w0(big, x[window].astype(float))
        dev_big = np.max(np.abs(exact - closed))
        assert 1e-4 < dev_big < 2.5e-3

        small = LatticeConfig(15, 3)
        w0_small = w_orbital(small, 0)
        xs = centered_positions(15)
        exact_small = np.real(w0_small[np.mod(xs, 15)])
        closed_small = closed_form_w0(small, xs.astype(float))
        dev_small = np.max(np.abs(exact_small - closed_small))
        assert dev_big < dev_small

    def test_closed_form_scalar_and_origin(self):
        cfg = LatticeConfig(15, 3)
        assert closed_form_w0(cfg, 0) == pytest.approx(np.sqrt(1 / 5), abs=1e-12)
        assert isinstance(closed_form_w0(cfg, 3), float)


class TestMeasureOrigin:
    def test_occupied_probability_and_density(self):
        cfg = LatticeConfig(15, 7)
        prob, post, profile = measure_origin(cfg, 1)
        assert prob == pytest.approx(7 / 15, abs=1e-12)
        at_origin = profile.x == 0
        assert profile.density_after[at_origin][0] == pytest.approx(1.0, abs=1e-10)
        assert abs(profile.first_orbital[at_origin][0]) == pytest.approx(1.0, abs=1e-12)
        assert np.sum(profile.density_after) == pytest.approx(7.0, abs=1e-10)
        assert np.allclose(profile.density_before, 7 / 15)

    def test_empty_outcome_orbital(self):
        cfg = LatticeConfig(15, 7)
        nu = cfg.filling
        prob, post, profile = measure_origin(cfg, 0)
        assert prob == pytest.approx(8 / 15, abs=1e-12)
        at_origin = profile.x == 0
        assert abs(profile.first_orbital[at_origin][0]) <= 1e-12
        origin = np.zeros(15, dtype=complex)
        origin[0] = 1.0
        reference = -np.sqrt(nu / (1 - nu)) * origin + np.sqrt(1 / (1 - nu)) * w_orbital(
            cfg, 0
        )
        assert np.linalg.norm(post.orbitals[:, 0] - reference) <= 1e-10

    @pytest.mark.parametrize("outcome", [0, 1])
    def test_agrees_with_generic_measurement(self, outcome):
        cfg = LatticeConfig(9, 3)
        origin = np.zeros(9, dtype=complex)
        origin[0] = 1.0
        prob, post, _ = measure_origin(cfg, outcome)
        generic_outcome, generic_prob, generic_post = measure_mode(
            fermi_sea(cfg), origin, forced=outcome
        )
        assert prob == pytest.approx(generic_prob, abs=1e-12)
        assert abs(slater_overlap(post, generic_post)) >= 1 - 1e-10

    def test_full_band_cannot_answer_zero(self):
        with pytest.raises(ImpossibleOutcome):
            measure_origin(LatticeConfig(5, 5), 0)

    def test_bad_outcome(self):
        with pytest.raises(ValueError):
            measure_origin(LatticeConfig(5, 3), 2)

    def test_profile_table_shape(self):
        cfg = LatticeConfig(15, 7)
        _, _, profile = measure_origin(cfg, 1)
        assert isinstance(profile, BandProfile)
        assert profile.x.tolist() == list(range(-7, 8))
        assert len(profile.first_orbital) == 15
        assert len(profile.density_before) == 15
        assert len(profile.density_after) == 15


class TestExchangeHole:
    def test_occupied_outcome_shape(self):
        cfg = LatticeConfig(15, 7)
        nu = cfg.filling
        x, change = exchange_hole_profile(cfg, 1)
        at = {int(xi): c for xi, c in zip(x, change)}
        assert at[0] == pytest.approx(1 - nu, abs=1e-10)
        assert at[1] < 0 and at[-1] < 0
        assert np.sum(change) == pytest.approx(0.0, abs=1e-10)

    def test_empty_outcome_shape(self):
        cfg = LatticeConfig(15, 7)
        nu = cfg.filling
        x, change = exchange_hole_profile(cfg, 0)
        at = {int(xi): c for xi, c in zip(x, change)}
        assert at[0] == pytest.approx(-nu, abs=1e-10)
        assert at[1] > 0 and at[-1] > 0
        assert np.sum(change) == pytest.approx(0.0, abs=1e-10)

    def test_outcomes_oppose_near_origin(self):
        cfg = LatticeConfig(9, 3)
        _, up = exchange_hole_profile(cfg, 1)
        _, down = exchange_hole_profile(cfg, 0)
        center = (9 - 1) // 2
        for offset in (-1, 0, 1):
            assert up[center + offset] * down[center + offset] < 0
