import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

import settings
from conftest import normalized
from const import TomogramSource
from exceptions import DegenerateAngleError, GridMismatchError, ParameterError
from models import AngleGrid, ChirpParams, QuadratureGrid, TimeGrid
from processor import analytic, signal_gen, tfdist, tomography


@pytest.fixture(scope="module")
def angles61():
    return tomography.default_angle_grid(61)


@pytest.fixture(scope="module")
def direct_small(chirp_small, angles61):
    return tomography.tomogram_direct(chirp_small, angles61)


def _row(T, theta):
    return T.values[T.angles.index_of(theta)]


def test_default_angle_grid_contains_marginals():
    ag = tomography.default_angle_grid()
    assert len(ag) == 181
    assert ag.values[0] == 0.0
    assert ag.values[90] == math.pi / 2
    assert ag.values[-1] == math.pi
    assert np.all(np.diff(ag.values) > 0)


def test_angle_grid_always_includes_marginal_angles():
    ag = AngleGrid(values=[0.3, 1.0])
    assert_allclose(ag.values, [0.0, 0.3, 1.0, math.pi / 2])


def test_resample_density_conserves_mass():
    x = np.linspace(-5, 5, 1001)
    density = np.exp(-x ** 2 / 2) / math.sqrt(2 * math.pi)
    qg = QuadratureGrid(X_start=-6.0, dX=0.37, n_X=33)
    out = tomography.resample_density(x, density, qg)
    assert np.sum(out) * qg.dX == pytest.approx(np.sum(density) * (x[1] - x[0]), abs=1e-12)
    reversed_out = tomography.resample_density(x[::-1], density[::-1], qg)
    assert_allclose(reversed_out, out, rtol=0, atol=1e-15)


def test_resample_density_reconstructions():
    x = np.array([0.0, 1.0, 2.0])
    density = np.array([0.0, 1.0, 0.0])
    cells = QuadratureGrid(X_start=0.0, dX=1.0, n_X=3)
    assert_allclose(tomography.resample_density(x, density, cells), [0.125, 0.75, 0.125], rtol=0, atol=1e-15)
    assert_allclose(tomography.resample_density(x, density, cells, stepwise=True), density, rtol=0, atol=1e-15)


def test_default_grid_centers_align_with_spectrum(chirp_small):
    g = chirp_small.grid
    qg = tomography.default_quadrature_grid(chirp_small, tomography.default_angle_grid(61))
    d_omega = 2 * math.pi / (g.n * settings.SPECTRAL_OVERSAMPLING * g.dt)
    assert qg.dX == pytest.approx(min(g.dt, d_omega), rel=1e-12)
    assert qg.X_start / qg.dX == pytest.approx(round(qg.X_start / qg.dX), abs=1e-6)


def test_refined_grid_keeps_cell_edges():
    qg = QuadratureGrid(X_start=-1.0, dX=0.25, n_X=9)
    fine = qg.refined(2)
    assert fine.n_X == 18
    assert_allclose(fine.edges[::2], qg.edges, rtol=0, atol=1e-15)


def test_frft_at_quarter_turn_is_fourier_integral(gaussian_oracle):
    a = gaussian_oracle
    g = a.grid
    qg = QuadratureGrid(X_start=0.0, dX=2 * math.pi / (g.n * g.dt), n_X=g.n // 2)
    I = tomography.frft(a, math.pi / 2, qg)
    omegas, spectrum = analytic.spectrum(a)
    expected = math.sqrt(2 * math.pi) * spectrum[omegas >= 0][: g.n // 2]
    peak = np.max(np.abs(expected))
    assert np.max(np.abs(I - expected)) <= 1e-6 * peak


def test_fast_frft_matches_reference(chirp_small):
    qg = QuadratureGrid(X_start=60.0, dX=0.1, n_X=400)
    reference = tomography.frft(chirp_small, 0.7, qg)
    fast = tomography.frft(chirp_small, 0.7, qg, fast=True)
    assert np.max(np.abs(fast - reference)) <= 1e-6 * np.max(np.abs(reference))


@pytest.mark.parametrize("theta", [0.0, 1e-4, math.pi])
def test_frft_rejects_degenerate_angles(chirp_small, theta):
    qg = QuadratureGrid(X_start=0.0, dX=0.1, n_X=10)
    with pytest.raises(DegenerateAngleError, match="use marginal fallback"):
        tomography.frft(chirp_small, theta, qg)


def test_unitary_frft_angle_additivity():
    grid = TimeGrid(t_start=-16.0, dt=1 / 16, n=512)
    qg = QuadratureGrid(X_start=-16.0, dX=1 / 16, n_X=512)
    t = grid.times
    f = np.exp(-((t - 1.0) ** 2) / 2 + 0.5j * t)
    composed = tomography.unitary_frft(tomography.unitary_frft(f, grid, 0.5, qg), grid, 0.7, qg)
    single = tomography.unitary_frft(f, grid, 1.2, qg)
    assert np.linalg.norm(composed - single) <= 1e-3 * np.linalg.norm(single)


def test_unitary_frft_leaves_standard_gaussian_invariant():
    grid = TimeGrid(t_start=-16.0, dt=1 / 16, n=512)
    qg = QuadratureGrid(X_start=-16.0, dX=1 / 16, n_X=512)
    g = np.exp(-grid.times ** 2 / 2)
    assert_allclose(tomography.unitary_frft(g, grid, 0.9, qg), g, rtol=0, atol=1e-8)


def test_gaussian_frft_has_gaussian_magnitude():
    grid = TimeGrid(t_start=-16.0, dt=1 / 16, n=512)
    pulse = normalized(signal_gen.gen_gaussian(0.0, 1.0, grid, omega=5.0))
    qg = QuadratureGrid(X_start=-3.0, dX=0.01, n_X=1200)
    power = np.abs(tomography.frft(pulse, 0.7, qg)) ** 2
    keep = power > 1e-3 * power.max()
    X = qg.values[keep]
    log_power = np.log(power[keep])
    fit = np.polyval(np.polyfit(X, log_power, 2), X)
    assert np.max(np.abs(fit - log_power)) <= 1e-6


def test_direct_rows_are_normalized(direct_small):
    assert direct_small.source == TomogramSource.DIRECT
    assert_allclose(direct_small.row_masses(), 1.0, rtol=0, atol=1e-3)
    assert direct_small.values.min() >= -1e-9 * direct_small.values.max()


def _moments(x, density, step):
    mean = np.sum(x * density) * step
    return mean, math.sqrt(np.sum((x - mean) ** 2 * density) * step)


def test_direct_marginal_rows_match_native_densities(direct_small, chirp_small):
    qg = direct_small.quadrature
    times, density_t = analytic.time_density(chirp_small)
    omegas, density_w = analytic.frequency_density(chirp_small, settings.SPECTRAL_OVERSAMPLING)
    cases = [
        (0.0, times, density_t, chirp_small.grid.dt),
        (math.pi / 2, omegas, density_w, omegas[1] - omegas[0]),
    ]
    for theta, x, density, step in cases:
        row_mean, row_std = _moments(qg.values, _row(direct_small, theta), qg.dX)
        mean, std = _moments(x, density, step)
        assert row_mean == pytest.approx(mean, abs=1e-3 * std)
        assert row_std == pytest.approx(std, rel=1e-2)


@pytest.mark.parametrize("theta", [math.pi / 3, 2 * math.pi / 3])
def test_direct_rows_match_frft_intensity(theta):
    grid = TimeGrid(t_start=-16.0, dt=1 / 16, n=512)
    a = normalized(signal_gen.gen_chirp(ChirpParams(A=1.0, alpha=0.5, t0=0.0, omega=3.0), grid))
    ag = AngleGrid(values=[theta])
    T = tomography.tomogram_direct(a, ag)
    expected = np.abs(tomography.frft(a, theta, T.quadrature)) ** 2 / (2 * math.pi * abs(math.sin(theta)))
    assert np.max(np.abs(_row(T, theta) - expected)) <= 1e-2 * expected.max()


@pytest.mark.parametrize("family", ["am", "fm"])
def test_direct_tomogram_normalized_for_modulated_signals(default_grid, am_params, fm_params, family):
    raw = signal_gen.gen_am(am_params, default_grid) if family == "am" else signal_gen.gen_fm(fm_params, default_grid)
    a = normalized(raw)
    T = tomography.tomogram_direct(a, tomography.default_angle_grid(37))
    assert_allclose(T.row_masses(), 1.0, rtol=0, atol=1e-3)


def test_direct_route_is_continuous_across_route_switch(chirp_small):
    g = chirp_small.grid
    switch = math.atan(g.n * settings.SPECTRAL_OVERSAMPLING * g.dt ** 2 / (2 * math.pi))
    below, above = switch - 1e-5, switch + 1e-5
    qg = tomography.default_quadrature_grid(chirp_small, tomography.default_angle_grid(61))
    T = tomography.tomogram_direct(chirp_small, AngleGrid(values=[below, above]), qg)
    rows = [T.values[T.angles.index_of(x)] for x in (below, above)]
    assert np.max(np.abs(rows[0] - rows[1])) < 1e-2 * max(r.max() for r in rows)


def test_time_shift_moves_centroid(small_grid):
    ag = AngleGrid(values=[math.pi / 4])
    base = ChirpParams(A=1.0, phi0=0.0, alpha=0.03, t0=90.0, omega=2.0)
    shifted = base.model_copy(update={"t0": 100.0})
    a = normalized(signal_gen.gen_chirp(base, small_grid))
    b = normalized(signal_gen.gen_chirp(shifted, small_grid))
    qg = tomography.default_quadrature_grid(b, ag)
    i = ag.index_of(math.pi / 4)
    rows = [tomography.tomogram_direct(x, ag, qg).values[i] for x in (a, b)]
    centroids = [np.sum(qg.values * r) * qg.dX for r in rows]
    assert centroids[1] - centroids[0] == pytest.approx(10.0 * math.cos(math.pi / 4), abs=qg.dX)


def test_radon_of_wvd_matches_direct_route(chirp_small, direct_small, angles61):
    W = tfdist.wvd(chirp_small)
    T = tomography.tomogram_from_tfd(W, angles61, direct_small.quadrature)
    assert T.source == TomogramSource.RADON_PLAIN
    assert_allclose(T.row_masses(), 1.0, rtol=0, atol=1e-3)
    assert np.max(np.abs(T.values - direct_small.values)) <= 1e-2 * direct_small.values.max()


def test_radon_on_coarse_cells_matches_direct_route(chirp_small, direct_small, angles61):
    fine = direct_small.quadrature
    coarse = QuadratureGrid(X_start=fine.X_start, dX=32 * fine.dX, n_X=fine.n_X // 32)
    direct = tomography.tomogram_direct(chirp_small, angles61, coarse)
    T = tomography.tomogram_from_tfd(tfdist.wvd(chirp_small), angles61, coarse)
    assert_allclose(T.row_masses(), 1.0, rtol=0, atol=1e-3)
    assert np.max(np.abs(T.values - direct.values)) <= 1e-2 * direct.values.max()


@pytest.mark.parametrize("family", ["am", "fm"])
def test_radon_of_wvd_matches_direct_route_for_line_spectra(small_grid, am_params, fm_params, family):
    raw = signal_gen.gen_am(am_params, small_grid) if family == "am" else signal_gen.gen_fm(fm_params, small_grid)
    a = normalized(raw)
    ag = tomography.default_angle_grid(19)
    direct = tomography.tomogram_direct(a, ag)
    # 频率网格与过采样频谱同间隔，谱线在两条路线上采到相同的节点
    fg = tfdist.natural_frequency_grid(small_grid, 2 * small_grid.n)
    T = tomography.tomogram_from_tfd(tfdist.wvd(a, fg), ag, direct.quadrature)
    assert_allclose(T.row_masses(), 1.0, rtol=0, atol=1e-3)
    assert np.max(np.abs(T.values - direct.values)) <= 1e-2 * direct.values.max()


def test_pseudo_radon_tomogram_differs_from_direct(chirp_small, direct_small, angles61):
    Wp = tfdist.pseudo_wvd(chirp_small, tfdist.default_window(chirp_small.grid.n))
    Tp = tomography.tomogram_from_tfd(Wp, angles61, direct_small.quadrature)
    assert Tp.source == TomogramSource.RADON_PSEUDO
    assert Tp.window == "hamming-127"
    assert Tp.values.min() >= 0.0
    D = tomography.tomogram_difference(direct_small, Tp)
    assert D.source == TomogramSource.DIFFERENCE
    assert D.values.max() > 0.0


def test_radon_rejects_difference_maps(chirp_small, angles61):
    W = tfdist.wvd(chirp_small)
    D = tfdist.distribution_difference(W, W)
    with pytest.raises(ParameterError):
        tomography.tomogram_from_tfd(D, angles61)


def test_tomogram_difference_properties(direct_small, chirp_small, angles61):
    assert_array_equal(tomography.tomogram_difference(direct_small, direct_small).values, 0.0)
    W = tfdist.wvd(chirp_small)
    Wp = tfdist.pseudo_wvd(chirp_small, tfdist.default_window(chirp_small.grid.n))
    qg = direct_small.quadrature
    b = tomography.tomogram_from_tfd(W, angles61, qg)
    c = tomography.tomogram_from_tfd(Wp, angles61, qg)
    ac = tomography.tomogram_difference(direct_small, c).values.max()
    ab = tomography.tomogram_difference(direct_small, b).values.max()
    bc = tomography.tomogram_difference(b, c).values.max()
    assert ac <= ab + bc + 1e-15


def test_tomogram_difference_grid_mismatch(direct_small, chirp_small):
    other = tomography.tomogram_direct(chirp_small, tomography.default_angle_grid(31), direct_small.quadrature)
    with pytest.raises(GridMismatchError):
        tomography.tomogram_difference(direct_small, other)
