import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

import settings
from conftest import OMEGA_MSG, PI, normalized
from const import ModulationFamily
from exceptions import InvariantViolationError, NormalizationError, ParameterError
from models import AMParams, AngleGrid, FMParams
from processor import entropy, signal_gen, tfdist, tomography

LN_PI_E = math.log(math.pi * math.e)


def test_uniform_density_entropy():
    step = 1e-3
    density = np.full(4000, 0.25)
    assert entropy.differential_entropy(density, step) == pytest.approx(math.log(4.0), abs=1e-9)


def test_gaussian_density_entropy():
    step = 0.01
    x = np.arange(-10, 10, step)
    density = np.exp(-x ** 2 / 2) / math.sqrt(2 * math.pi)
    assert entropy.differential_entropy(density, step) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-3)


def test_zero_bins_contribute_nothing():
    step = 0.5
    density = np.array([0.5, 0.0, 0.5, 0.0, 1.0])
    assert entropy.differential_entropy(density, step) == pytest.approx(
        entropy.differential_entropy(density[[0, 2, 4]], step), abs=1e-15)


def test_unnormalized_density_reports_integral():
    with pytest.raises(NormalizationError) as info:
        entropy.differential_entropy(np.full(100, 0.02), 1.0)
    assert info.value.integral == pytest.approx(2.0)


def test_negative_density_is_rejected():
    density = np.array([0.6, -0.1, 0.5])
    with pytest.raises(InvariantViolationError):
        entropy.differential_entropy(density, 1.0)


def test_gaussian_saturates_time_frequency_bound(gaussian_oracle):
    pair = entropy.entropy_pair(gaussian_oracle)
    assert pair.total == pytest.approx(LN_PI_E, abs=0.02)
    assert pair.S_t == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-3)


@pytest.mark.parametrize("family", ["chirp", "am", "fm"])
def test_time_frequency_bound_holds(default_grid, chirp_params, am_params, fm_params, family):
    if family == "chirp":
        raw = signal_gen.gen_chirp(chirp_params, default_grid)
    elif family == "am":
        raw = signal_gen.gen_am(am_params, default_grid)
    else:
        raw = signal_gen.gen_fm(fm_params, default_grid)
    assert entropy.entropy_pair(normalized(raw)).slack >= -0.02


def test_marginal_rows_reproduce_signal_entropies(gaussian_oracle):
    T = tomography.tomogram_direct(gaussian_oracle, AngleGrid(values=[0.0]))
    profile = entropy.tomographic_entropy(T)
    pair = entropy.entropy_pair(gaussian_oracle)
    assert profile.source == "direct"
    assert profile.values[profile.angles.index_of(0.0)] == pytest.approx(pair.S_t, abs=0.02)
    assert profile.values[profile.angles.index_of(math.pi / 2)] == pytest.approx(pair.S_omega, abs=0.02)


def _family_signal(family, grid, chirp_params, am_params, fm_params):
    if family == "chirp":
        return normalized(signal_gen.gen_chirp(chirp_params, grid))
    if family == "am":
        return normalized(signal_gen.gen_am(am_params, grid))
    return normalized(signal_gen.gen_fm(fm_params, grid))


@pytest.mark.parametrize("family", ["chirp", "am", "fm"])
def test_marginal_row_entropies_match_signal_entropies(default_grid, chirp_params, am_params, fm_params, family):
    a = _family_signal(family, default_grid, chirp_params, am_params, fm_params)
    T = tomography.tomogram_direct(a, AngleGrid(values=[0.0]))
    profile = entropy.tomographic_entropy(T)
    pair = entropy.entropy_pair(a)
    assert profile.values[profile.angles.index_of(0.0)] == pytest.approx(pair.S_t, abs=0.02)
    assert profile.values[profile.angles.index_of(math.pi / 2)] == pytest.approx(pair.S_omega, abs=0.02)


@pytest.mark.parametrize("family", ["chirp", "am", "fm"])
def test_tomographic_entropy_converges_when_dX_is_halved(small_grid, chirp_params, am_params, fm_params, family):
    a = _family_signal(family, small_grid, chirp_params, am_params, fm_params)
    ag = tomography.default_angle_grid(19)
    qg = tomography.default_quadrature_grid(a, ag)
    coarse = entropy.tomographic_entropy(tomography.tomogram_direct(a, ag, qg)).values
    fine = entropy.tomographic_entropy(tomography.tomogram_direct(a, ag, qg.refined(2))).values
    assert np.max(np.abs(np.subtract(coarse, fine))) <= 0.01


def test_complement_pairs_on_default_grid():
    pairs = entropy.complement_pairs(tomography.default_angle_grid())
    assert len(pairs) == 91
    assert pairs[0] == (0, 90)
    assert pairs[-1] == (90, 180)


@pytest.mark.parametrize("family", ["chirp", "am", "fm"])
def test_tomographic_bound_holds_on_default_grid(default_grid, chirp_params, am_params, fm_params, family):
    if family == "chirp":
        raw = signal_gen.gen_chirp(chirp_params, default_grid)
    elif family == "am":
        raw = signal_gen.gen_am(am_params, default_grid)
    else:
        raw = signal_gen.gen_fm(fm_params, default_grid)
    T = tomography.tomogram_direct(normalized(raw), tomography.default_angle_grid())
    report = entropy.uncertainty_report(entropy.tomographic_entropy(T))
    assert report["pairs"] == 91
    assert report["min_slack"] >= -0.02


def test_difference_tomogram_has_no_entropy(chirp_small):
    T = tomography.tomogram_direct(chirp_small, tomography.default_angle_grid(7))
    D = tomography.tomogram_difference(T, T)
    with pytest.raises(ParameterError):
        entropy.tomographic_entropy(D)


def test_entropy_is_scale_invariant(small_grid, chirp_params):
    ag = tomography.default_angle_grid(13)
    a = normalized(signal_gen.gen_chirp(chirp_params, small_grid))
    b = normalized(signal_gen.gen_chirp(chirp_params.model_copy(update={"A": 3.0}), small_grid))
    qg = tomography.default_quadrature_grid(a, ag)
    sa = entropy.tomographic_entropy(tomography.tomogram_direct(a, ag, qg)).values
    sb = entropy.tomographic_entropy(tomography.tomogram_direct(b, ag, qg)).values
    np.testing.assert_allclose(sa, sb, rtol=0, atol=1e-9)


@pytest.fixture(scope="module")
def surface_setup(tiny_grid):
    ag = tomography.default_angle_grid(13)
    am_base = AMParams(omega=PI, phi0=0.0, m=1.0, Omega=OMEGA_MSG)
    widest = normalized(signal_gen.gen_am(am_base, tiny_grid))
    qg = tomography.default_quadrature_grid(widest, ag)
    return ag, qg, am_base, tfdist.default_window(tiny_grid.n)


def test_surface_rows_coincide_for_pure_carrier(tiny_grid, surface_setup):
    ag, qg, am_base, window = surface_setup
    fm_base = FMParams(A=1.0, omega0=PI, omega_d=OMEGA_MSG, phi0=0.0, Omega=OMEGA_MSG)
    am = entropy.entropy_surface(ModulationFamily.AM, am_base, [0.0], ag, qg, grid=tiny_grid, window=window)
    fm = entropy.entropy_surface(ModulationFamily.FM, fm_base, [0.0], ag, qg, grid=tiny_grid, window=window)
    assert am.parameter_name == "m"
    assert fm.parameter_name == "omega_d"
    assert_array_equal(am.values, fm.values)


def test_am_surface_structure(tiny_grid, surface_setup):
    ag, qg, am_base, window = surface_setup
    m = np.linspace(0.0, 1.0, 11)
    surface = entropy.entropy_surface(ModulationFamily.AM, am_base, m, ag, qg, grid=tiny_grid, window=window,
                                      workers=2)
    assert surface.values.shape == (11, len(ag))
    assert np.all(np.isfinite(surface.values))
    assert np.max(np.abs(np.diff(surface.values, axis=0))) <= 0.5
    for i, j in entropy.complement_pairs(ag):
        assert np.all(surface.values[:, i] + surface.values[:, j] >= settings.ENTROPY_BOUND - 0.02)


def test_fm_surface_over_deviation_sweep(tiny_grid):
    ag = tomography.default_angle_grid(7)
    fm_base = FMParams(A=1.0, omega0=PI, omega_d=OMEGA_MSG, phi0=0.0, Omega=OMEGA_MSG)
    deviations = signal_gen.default_sweep(ModulationFamily.FM, fm_base, 6)
    surface = entropy.entropy_surface(ModulationFamily.FM, fm_base, deviations, ag, grid=tiny_grid,
                                      window=tfdist.default_window(tiny_grid.n))
    assert deviations[0] == 0.0
    assert deviations[-1] == pytest.approx(5 * OMEGA_MSG)
    assert surface.values.shape == (6, len(ag))
    assert np.all(np.isfinite(surface.values))
    for i, j in entropy.complement_pairs(ag):
        assert np.all(surface.values[:, i] + surface.values[:, j] >= settings.ENTROPY_BOUND - 0.02)
    # 频偏越大频谱越宽，θ=π/2 的熵随之增大
    spectral = surface.values[:, ag.index_of(math.pi / 2)]
    assert spectral[-1] > spectral[0]


def test_surface_is_independent_of_worker_count(tiny_grid, surface_setup):
    ag, qg, am_base, window = surface_setup
    m = [0.2, 0.6]
    one = entropy.entropy_surface(ModulationFamily.AM, am_base, m, ag, qg, grid=tiny_grid, window=window)
    two = entropy.entropy_surface(ModulationFamily.AM, am_base, m, ag, qg, grid=tiny_grid, window=window,
                                  workers=2)
    assert_array_equal(one.values, two.values)


def test_surface_rejects_empty_parameter_grid(tiny_grid, surface_setup):
    ag, qg, am_base, window = surface_setup
    with pytest.raises(ParameterError):
        entropy.entropy_surface(ModulationFamily.AM, am_base, [], ag, qg, grid=tiny_grid, window=window)
