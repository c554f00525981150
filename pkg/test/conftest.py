import math

import pytest

from models import AMParams, ChirpParams, FMParams, TimeGrid
from processor import analytic, signal_gen

PI = math.pi
OMEGA_MSG = math.pi / 20


def normalized(signal):
    """实信号 → 归一化解析信号"""
    return analytic.normalize_energy(analytic.to_analytic(signal))


@pytest.fixture(scope="session")
def default_grid():
    return signal_gen.default_grid()


@pytest.fixture(scope="session")
def small_grid():
    # 与默认网格同样覆盖 [0, 200)，点数更少
    return TimeGrid.from_span(0.0, 200.0, 512)


@pytest.fixture(scope="session")
def tiny_grid():
    return TimeGrid.from_span(0.0, 200.0, 256)


@pytest.fixture(scope="session")
def chirp_params():
    return ChirpParams(A=0.166, phi0=0.0, alpha=0.03, t0=100.0, omega=PI)


@pytest.fixture(scope="session")
def am_params():
    return AMParams(omega=PI, phi0=0.0, m=0.5, Omega=OMEGA_MSG)


@pytest.fixture(scope="session")
def fm_params():
    return FMParams(A=1.0, omega0=PI, omega_d=OMEGA_MSG, phi0=0.0, Omega=OMEGA_MSG)


@pytest.fixture(scope="session")
def gaussian_oracle(default_grid):
    """σ=1、载频 4 的高斯脉冲，解析且归一化"""
    return normalized(signal_gen.gen_gaussian(100.0, 1.0, default_grid, omega=4.0))


@pytest.fixture(scope="session")
def chirp_small(small_grid, chirp_params):
    return normalized(signal_gen.gen_chirp(chirp_params, small_grid))
