"""
解析信号模块：离散希尔伯特变换、解析信号构造与谱能量归一化。

傅里叶约定：S̃(ω) = (1/√(2π))∫S(t)e^{−iωt}dt，离散形式为
S̃(ω_j) = dt/√(2π)·e^{−iω_j t_start}·FFT[S]_j，Parseval 等式不含额外的 2π。
"""

import math
from typing import Tuple

import numpy as np
from scipy import fft as sp_fft

import settings
from core.logger import get_logger
from exceptions import DegenerateSignalError, NormalizationError
from models import AnalyticSignal, SampledSignal

# 获取日志记录器
logger = get_logger(__name__)


def one_sided_weights(n: int) -> np.ndarray:
    """单边谱权重：DC×1，正频率×2，负频率与 Nyquist×0"""
    weights = np.zeros(n)
    weights[0] = 1.0
    weights[1:(n + 1) // 2] = 2.0
    return weights


def _hilbert_multiplier(n: int) -> np.ndarray:
    h = np.zeros(n, dtype=complex)
    half = (n + 1) // 2
    h[1:half] = -1j
    h[n // 2 + 1:] = 1j
    return h


def hilbert(s: SampledSignal) -> SampledSignal:
    """频域希尔伯特变换：正频率乘 −i，负频率乘 +i，DC 与 Nyquist 置零"""
    spectrum = sp_fft.fft(s.samples)
    transformed = sp_fft.ifft(spectrum * _hilbert_multiplier(s.grid.n)).real
    return SampledSignal(grid=s.grid, samples=transformed)


def to_analytic(s: SampledSignal) -> AnalyticSignal:
    """S = s + i·H[s]，负频率分量严格为零"""
    spectrum = sp_fft.fft(s.samples)
    samples = sp_fft.ifft(spectrum * one_sided_weights(s.grid.n))
    return AnalyticSignal(grid=s.grid, samples=samples, normalized=False)


def normalize_energy(a: AnalyticSignal) -> AnalyticSignal:
    """缩放到 Σ|S|²·dt = 1"""
    energy = a.energy
    if not np.isfinite(energy) or energy <= 0.0:
        raise DegenerateSignalError()
    logger.debug(f"归一化前能量 {energy:.6g}")
    return AnalyticSignal(grid=a.grid, samples=a.samples / math.sqrt(energy), normalized=True)


def require_normalized(a: AnalyticSignal) -> None:
    energy = a.energy
    if not a.normalized or abs(energy - 1.0) > settings.ENERGY_NORMALIZATION_TOL:
        raise NormalizationError(f"解析信号未归一化，Σ|S|²·dt = {energy:.12g}", integral=energy)


def time_density(a: AnalyticSignal) -> Tuple[np.ndarray, np.ndarray]:
    """时间边缘分布 |S(t)|²"""
    require_normalized(a)
    return a.grid.times, np.abs(a.samples) ** 2


def spectrum(a: AnalyticSignal, oversampling: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """按统一约定缩放的频谱 S̃(ω)，ω 网格已 fftshift 为递增顺序

    oversampling > 1 时先在时域补零到 n·oversampling 点。
    """
    if oversampling < 1:
        raise ValueError(f"过采样倍数必须 ≥ 1，当前为 {oversampling}")
    g = a.grid
    n_fft = g.n * int(oversampling)
    omegas = 2.0 * math.pi * sp_fft.fftfreq(n_fft, d=g.dt)
    values = sp_fft.fft(a.samples, n=n_fft) * (g.dt / math.sqrt(2.0 * math.pi))
    values = values * np.exp(-1j * omegas * g.t_start)
    return sp_fft.fftshift(omegas), sp_fft.fftshift(values)


def frequency_density(a: AnalyticSignal, oversampling: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """频率边缘分布 |S̃(ω)|²，满足 Σ density·dω = 1"""
    require_normalized(a)
    omegas, values = spectrum(a, oversampling)
    return omegas, np.abs(values) ** 2
