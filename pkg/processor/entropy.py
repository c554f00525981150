"""
熵模块：时间、频率与正交变量上的微分熵，熵不确定关系以及调制参数扫描的熵曲面。

熵以 nat 为单位；下界 ln(πe) 对 S_t + S_ω 与 S(θ) + S(θ+π/2) 都成立。
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import entr

import settings
from const import ModulationFamily, TomogramSource
from core.logger import get_logger
from exceptions import InvariantViolationError, NormalizationError, ParameterError
from models import (
    AnalyticSignal,
    AngleGrid,
    EntropyPair,
    EntropyProfile,
    EntropySurface,
    QuadratureGrid,
    TimeGrid,
    Tomogram,
    Window,
)
from processor import analytic, signal_gen, tfdist, tomography
from processor.utils import TaskManager, TimeUtils

# 获取日志记录器
logger = get_logger(__name__)


def differential_entropy(density: np.ndarray, step: float) -> float:
    """−Σ p·ln(p)·step，约定 0·ln0 = 0"""
    p = np.asarray(density, dtype=float)
    integral = float(p.sum() * step)
    if abs(integral - 1.0) > settings.DENSITY_NORMALIZATION_TOL:
        raise NormalizationError(f"密度未归一化，积分为 {integral:.6g}", integral=integral)
    peak = float(p.max())
    if p.min() < -settings.NEGATIVITY_TOL * peak:
        raise InvariantViolationError("non-negativity", f"密度最小值 {p.min():.3g} 低于容差（峰值 {peak:.3g}）")
    return float(entr(np.clip(p, 0.0, None)).sum() * step)


def entropy_pair(a: AnalyticSignal) -> EntropyPair:
    """时间熵 S_t 与频率熵 S_ω（频谱按 SPECTRAL_OVERSAMPLING 过采样）"""
    _, density_t = analytic.time_density(a)
    omegas, density_w = analytic.frequency_density(a, settings.SPECTRAL_OVERSAMPLING)
    pair = EntropyPair(
        S_t=differential_entropy(density_t, a.grid.dt),
        S_omega=differential_entropy(density_w, omegas[1] - omegas[0]),
    )
    logger.info(f"S_t={pair.S_t:.6f}, S_ω={pair.S_omega:.6f}, 余量 {pair.slack:+.6f}")
    return pair


def tomographic_entropy(T: Tomogram) -> EntropyProfile:
    """S(θ) = −Σ_X 𝒯·ln𝒯·dX，逐行计算"""
    if T.source == TomogramSource.DIFFERENCE:
        raise ParameterError("差值层析图不是概率密度，不能计算熵")
    values = [differential_entropy(row, T.quadrature.dX) for row in T.values]
    return EntropyProfile(angles=T.angles, values=values, source=T.id)


def complement_pairs(ag: AngleGrid) -> List[Tuple[int, int]]:
    """角度网格上精确互补的 (θ, θ+π/2) 下标对"""
    pairs = []
    for i, theta in enumerate(ag.values):
        j = ag.index_of(theta + math.pi / 2, atol=1e-9)
        if j is not None:
            pairs.append((i, j))
    return pairs


def uncertainty_report(profile: EntropyProfile) -> Dict[str, float]:
    """S(θ) + S(θ+π/2) 相对 ln(πe) 的余量统计"""
    pairs = complement_pairs(profile.angles)
    if not pairs:
        return {"pairs": 0}
    sums = np.array([profile.values[i] + profile.values[j] for i, j in pairs])
    worst = int(np.argmin(sums))
    return {
        "pairs": len(pairs),
        "min_sum": float(sums[worst]),
        "min_slack": float(sums[worst] - settings.ENTROPY_BOUND),
        "worst_theta": float(profile.angles.values[pairs[worst][0]]),
    }


def _surface_row(family: ModulationFamily, base, value: float, grid: TimeGrid, window: Window,
                 ag: AngleGrid, qg: QuadratureGrid) -> np.ndarray:
    params = signal_gen.with_parameter(family, base, value)
    raw = signal_gen.gen_am(params, grid) if family == ModulationFamily.AM else signal_gen.gen_fm(params, grid)
    a = analytic.normalize_energy(analytic.to_analytic(raw))
    W = tfdist.pseudo_wvd(a, window)
    T = tomography.tomogram_from_tfd(W, ag, qg)
    return tomographic_entropy(T).values


def entropy_surface(family: ModulationFamily, base, parameters: Sequence[float], ag: AngleGrid,
                    qg: Optional[QuadratureGrid] = None, grid: Optional[TimeGrid] = None,
                    window: Optional[Window] = None, workers: int = 1) -> EntropySurface:
    """对每个调制参数生成信号并计算伪 Wigner-Ville 层析熵 S(θ)，按行堆叠

    所有行共用同一个 X 网格；未给出时取调制最强的参数对应信号的默认网格。
    """
    parameters = np.asarray(parameters, dtype=float)
    if parameters.size == 0:
        raise ParameterError("参数网格不能为空")
    grid = grid or signal_gen.default_grid()
    window = window or tfdist.default_window(grid.n)
    if qg is None:
        widest = signal_gen.with_parameter(family, base, parameters[int(np.argmax(np.abs(parameters)))])
        gen = signal_gen.gen_am if family == ModulationFamily.AM else signal_gen.gen_fm
        a = analytic.normalize_energy(analytic.to_analytic(gen(widest, grid)))
        qg = tomography.default_quadrature_grid(a, ag)

    with TimeUtils.timed(f"{family.value} 熵曲面（{parameters.size} 个参数）"):
        rows = TaskManager.run_parallel(
            lambda value: _surface_row(family, base, float(value), grid, window, ag, qg),
            parameters,
            workers,
        )
    name = "m" if family == ModulationFamily.AM else "omega_d"
    return EntropySurface(angles=ag, parameters=parameters, values=np.vstack(rows), family=family,
                          parameter_name=name)
