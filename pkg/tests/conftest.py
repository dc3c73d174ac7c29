import math

import numpy as np
import pytest

from qmeasure import (
    NATURAL_UNITS, DeviceParams, GaussianPacketParams, centered_grid, gaussian_kernel, gaussian_packet,
    measure, reading_of,
)
from qmeasure.transform import CURRENT, DENSITY

S1_PACKET = GaussianPacketParams(0.0, 1.0, 1.0)


def gaussian_density(x, center, variance):
    """Normal density; the oracle for every Gaussian-in, Gaussian-out check."""
    return np.exp(-(x - center) ** 2 / (2 * variance)) / math.sqrt(2 * math.pi * variance)


def default_grid(alpha=1.0, sigma=0.0, lam=0.0, x0=0.0, n=4096):
    half = 8 * math.sqrt(alpha ** 2 + max(sigma, lam) ** 2)
    return centered_grid(x0, half, n)


def readings(packet=S1_PACKET, sigma=0.0, lam=0.0, n=4096, grid=None):
    grid = grid or default_grid(packet.alpha, sigma, lam, packet.x0, n)
    r_I = reading_of(gaussian_packet(packet, grid))
    r_R = measure(r_I, gaussian_kernel(grid, sigma, DENSITY), gaussian_kernel(grid, lam, CURRENT))
    return r_I, r_R


@pytest.fixture
def units():
    return NATURAL_UNITS


@pytest.fixture(scope="session")
def s1_readings():
    """S1: alpha = k = 1, sigma = 1, lambda = 0 on the default grid."""
    return readings(sigma=1.0)


@pytest.fixture(scope="session")
def s2_readings():
    """S2: as S1 with lambda = 1 (auto-widened grid so J^2/rho decays)."""
    return readings(sigma=1.0, lam=1.0, grid=centered_grid(0.0, 8 * math.sqrt(2) * 1.5, 6145))
