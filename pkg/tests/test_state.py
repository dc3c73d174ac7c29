import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmeasure import (
    DivergenceError, DomainError, GaussianPacketParams, NormalizationError, ParameterError, Reading,
    UnitSystem, WaveFunction, centered_grid, gaussian_packet, make_grid, oscillator_ground_state,
    oscillator_width, position_variance, read_reading_csv, reading_of, reconstruct_wavefunction,
    write_reading_csv,
)
from qmeasure.state import TAIL_THRESHOLD

from conftest import S1_PACKET, default_grid, gaussian_density, readings


def test_packet_density_at_centre():
    grid = centered_grid(0.0, 8.0, 4097)  # odd n puts a point on x = 0
    psi = gaussian_packet(S1_PACKET, grid)
    assert psi.density[2048] == pytest.approx(1 / math.sqrt(2 * math.pi), abs=5e-8)
    assert round(float(psi.density[2048]), 7) == 0.3989423


def test_zero_wavenumber_is_real():
    psi = gaussian_packet(GaussianPacketParams(0.3, 1.2, 0.0), default_grid(1.2, x0=0.3))
    assert np.all(psi.values.imag == 0)


@settings(max_examples=30, deadline=None)
@given(x0=st.floats(-3, 3), alpha=st.floats(0.3, 3), k=st.floats(-3, 3))
def test_packet_normalized_on_default_grid(x0, alpha, k):
    psi = gaussian_packet(GaussianPacketParams(x0, alpha, k), default_grid(alpha, x0=x0))
    assert abs(psi.norm() - 1) < 1e-9


def test_packet_needs_coverage():
    with pytest.raises(DomainError):
        gaussian_packet(S1_PACKET, make_grid(-3, 3, 301))


def test_packet_width_must_be_positive():
    with pytest.raises(ParameterError):
        GaussianPacketParams(0, 0, 1)


def test_oscillator_width():
    assert oscillator_width(1.0) == pytest.approx(0.7071068, abs=1e-7)
    assert oscillator_width(2.0, UnitSystem(hbar=2.0, mass=0.5)) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        oscillator_width(0.0)


def test_oscillator_ground_state_spread():
    alpha = oscillator_width(1.0)
    psi = oscillator_ground_state(1.0, default_grid(alpha))
    r = reading_of(psi)
    assert math.sqrt(position_variance(r)) == pytest.approx(alpha, abs=1e-6)
    assert np.all(r.current == 0)


def test_current_at_centre():
    grid = centered_grid(0.0, 8.0, 4097)
    r = reading_of(gaussian_packet(S1_PACKET, grid))
    assert r.current[2048] == pytest.approx(0.3989423, abs=1e-7)


def test_real_wavefunction_has_no_current():
    grid = make_grid(-5, 5, 201)
    psi = WaveFunction(grid, np.exp(-grid.x ** 2 / 2) / math.pi ** 0.25)
    assert np.all(reading_of(psi).current == 0)


def test_plane_phase_current_k2():
    r, _ = readings(GaussianPacketParams(0, 1, 2))
    assert np.max(np.abs(r.current - 2 * r.rho)) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.5, 2), k=st.floats(-5, 5), hbar=st.floats(0.5, 2), mass=st.floats(0.5, 2))
def test_plane_phase_property(alpha, k, hbar, mass):
    units = UnitSystem(hbar, mass)
    grid = default_grid(alpha, n=2048)
    r = reading_of(gaussian_packet(GaussianPacketParams(0, alpha, k), grid, units), units)
    assert np.allclose(r.current, hbar * k / mass * r.rho, rtol=0, atol=1e-10 * (1 + abs(k)))


def test_reconstructed_phase_gradient():
    r, _ = readings()
    psi = reconstruct_wavefunction(r)
    # cell-wise phase increments; both ends of each cell above the tail threshold
    grad = np.angle(psi.values[1:] * np.conj(psi.values[:-1])) / r.grid.dx
    live = r.rho > TAIL_THRESHOLD * r.rho.max()
    cells = live[1:] & live[:-1]
    assert cells.sum() > 0.9 * r.grid.n
    assert np.max(np.abs(grad[cells] - 1.0)) <= 1e-6


def test_zero_current_reconstructs_real_amplitude():
    r, _ = readings(GaussianPacketParams(0, 1, 0))
    psi = reconstruct_wavefunction(r)
    assert np.array_equal(psi.values, np.sqrt(r.rho).astype(complex))


@pytest.mark.parametrize("k", [0.0, 1.0, -2.5])
def test_round_trip(k):
    r, _ = readings(GaussianPacketParams(0.5, 1.0, k))
    back = reading_of(reconstruct_wavefunction(r))
    live = r.rho > TAIL_THRESHOLD * r.rho.max()
    assert np.max(np.abs(back.rho - r.rho)) <= 1e-8
    assert np.max(np.abs(back.current - r.current)[live]) <= 1e-8


def test_divergent_phase_is_rejected():
    r, _ = readings()
    with pytest.raises(DivergenceError, match="divergent-phase"):
        reconstruct_wavefunction(r, max_phase_gradient=0.5)


def test_reading_invariants():
    grid = make_grid(-5, 5, 101)
    rho = gaussian_density(grid.x, 0, 1)
    with pytest.raises(NormalizationError):
        Reading(grid, 2 * rho, np.zeros(grid.n))
    bad = rho.copy()
    bad[3] = -1e-3
    with pytest.raises(NormalizationError):
        Reading(grid, bad, np.zeros(grid.n))
    with pytest.raises(ValueError):
        Reading(grid, rho, np.zeros(grid.n), label="X")


def test_reading_csv_round_trip(tmp_path):
    _, r = readings(sigma=1.0)
    path = tmp_path / "reading.csv"
    write_reading_csv(r, path, UnitSystem(1.0, 1.0))
    header = path.read_text().splitlines()[0]
    assert "length" in header and "1/time" in header
    back = read_reading_csv(path)
    assert back.label == "R"
    assert np.array_equal(back.rho, r.rho) and np.array_equal(back.current, r.current)
    assert back.grid.same_as(r.grid)
