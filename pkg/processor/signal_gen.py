"""
测试信号生成模块：啁啾、调幅、调频信号以及高斯脉冲。

所有生成器都是纯函数，相同参数与网格得到逐位相同的采样。
"""

from typing import Optional

import numpy as np

import settings
from const import ModulationFamily, SignalKind
from core.logger import get_logger
from exceptions import ParameterError
from models import (
    AMParams,
    ChirpParams,
    FMParams,
    GaussianParams,
    SampledSignal,
    SignalConfig,
    TimeGrid,
)

# 获取日志记录器
logger = get_logger(__name__)


def default_grid() -> TimeGrid:
    """默认时间网格：t ∈ [0, 200)，2048 点"""
    return TimeGrid.from_span(settings.DEFAULT_T_START, settings.DEFAULT_T_SPAN, settings.DEFAULT_N)


def gen_chirp(p: ChirpParams, g: TimeGrid) -> SampledSignal:
    """A·sin(ωt + φ0)·exp(−α(t − t0)²)"""
    t = g.times
    samples = p.A * np.sin(p.omega * t + p.phi0) * np.exp(-p.alpha * (t - p.t0) ** 2)
    return SampledSignal(grid=g, samples=samples)


def gen_am(p: AMParams, g: TimeGrid) -> SampledSignal:
    """(1 + m·cos(Ωt))·cos(ωt + φ0)"""
    t = g.times
    samples = (1.0 + p.m * np.cos(p.Omega * t)) * np.cos(p.omega * t + p.phi0)
    return SampledSignal(grid=g, samples=samples)


def gen_fm(p: FMParams, g: TimeGrid) -> SampledSignal:
    """A·cos(ω0·t + (ω_d/Ω)·sin(Ωt) + φ0)

    调制相位取 cos(Ωt) 从 0 到 t 的累积积分，因此 t=0 时相位偏移为零，
    瞬时频率为 ω0 + ω_d·cos(Ωt)。
    """
    t = g.times
    phase = p.omega0 * t + (p.omega_d / p.Omega) * np.sin(p.Omega * t) + p.phi0
    return SampledSignal(grid=g, samples=p.A * np.cos(phase))


def gen_gaussian(t0: float, sigma: float, g: TimeGrid, omega: float = 0.0) -> SampledSignal:
    """exp(−(t − t0)²/(4σ²))·cos(ωt)，|·|² 的标准差为 σ"""
    if not sigma > 0:
        raise ParameterError(f"高斯脉冲宽度 σ={sigma} 必须大于 0")
    t = g.times
    samples = np.exp(-((t - t0) ** 2) / (4.0 * sigma ** 2))
    if omega != 0.0:
        samples = samples * np.cos(omega * t)
    return SampledSignal(grid=g, samples=samples)


def generate(config: SignalConfig) -> SampledSignal:
    """按配置中的 kind 分发到对应的生成器"""
    p = config.params
    if config.kind == SignalKind.CHIRP:
        signal = gen_chirp(p, config.grid)
    elif config.kind == SignalKind.AM:
        signal = gen_am(p, config.grid)
    elif config.kind == SignalKind.FM:
        signal = gen_fm(p, config.grid)
    elif config.kind == SignalKind.GAUSSIAN:
        assert isinstance(p, GaussianParams)
        signal = gen_gaussian(p.t0, p.sigma, config.grid, omega=p.omega)
    else:
        raise ParameterError(f"未知信号类型: {config.kind}")
    logger.info(f"已生成 {config.kind.value} 信号，n={config.grid.n}，dt={config.grid.dt:.6g}")
    return signal


def default_sweep(family: ModulationFamily, base, points: Optional[int] = None) -> np.ndarray:
    """调制参数扫描网格：AM 为 m ∈ [0, 1]，FM 为 ω_d ∈ [0, 5Ω]"""
    points = points or settings.DEFAULT_SWEEP_POINTS
    if family == ModulationFamily.AM:
        return np.linspace(0.0, 1.0, points)
    return np.linspace(0.0, settings.FM_MAX_DEVIATION_RATIO * base.Omega, points)


def with_parameter(family: ModulationFamily, base, value: float):
    """以 base 为基准，替换调制参数（AM 的 m 或 FM 的 ω_d）"""
    field = "m" if family == ModulationFamily.AM else "omega_d"
    return type(base).model_validate({**base.model_dump(), field: float(value)})
