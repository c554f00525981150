"""
时频分布模块：Wigner-Ville 分布、加窗伪 Wigner-Ville 分布及其差值图。

离散化：滞后 τ = 2m·dt，使 S(t+τ/2) 与 S(t−τ/2) 都落在网格点上；
第 n 行可用滞后 |m| ≤ min(n, N−1−n)，网格外信号视为零。
按滞后做 FFT 得到自然频率网格 ω_j = πj/(n_ω·dt)，j = 0..n_ω−1。
"""

import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import fft as sp_fft

import settings
from const import DistributionKind
from core.logger import get_logger
from exceptions import GridMismatchError, InvariantViolationError, ParameterError
from models import AnalyticSignal, FrequencyGrid, TFDistribution, TimeGrid, Window
from processor.analytic import require_normalized
from processor.utils import GridValidator, TaskManager

# 获取日志记录器
logger = get_logger(__name__)

# 每个并行块处理的时间行数
ROW_CHUNK = 256


# ==================== 窗函数 ====================

@lru_cache(maxsize=16)
def _hamming_taps(M: int) -> Tuple[float, ...]:
    half = np.arange((M + 1) // 2)
    left = 0.54 - 0.46 * np.cos(2.0 * math.pi * half / (M - 1))
    return tuple(np.concatenate([left, left[-2::-1]]))


def hamming_window(M: int) -> Window:
    """h(τ) = 0.54 − 0.46·cos(2πτ/(M−1))，τ = 0..M−1"""
    if M < 3 or M % 2 == 0:
        raise ParameterError(f"Hamming 窗长 M={M} 必须为不小于 3 的奇数")
    return Window(name="hamming", M=M, taps=np.array(_hamming_taps(M)))


def rectangular_window(M: int) -> Window:
    """全 1 窗"""
    GridValidator.require_odd(M)
    return Window(name="rectangular", M=M, taps=np.ones(M))


def default_window(n: int) -> Window:
    """默认窗：不超过 n/4 的最大奇数长度的 Hamming 窗，短信号至少取 3"""
    M = n // 4
    if M % 2 == 0:
        M -= 1
    return hamming_window(max(M, 3))


# ==================== 频率网格 ====================

def natural_frequency_grid(grid: TimeGrid, n_omega: Optional[int] = None) -> FrequencyGrid:
    """滞后 FFT 的自然频率网格，默认 n_ω = n"""
    n_omega = n_omega or grid.n
    return FrequencyGrid(omega_start=0.0, d_omega=math.pi / (n_omega * grid.dt), n_omega=n_omega)


def _check_frequency_grid(grid: TimeGrid, fg: FrequencyGrid, max_lag: int) -> None:
    natural = natural_frequency_grid(grid, fg.n_omega)
    if fg.omega_start != 0.0 or not np.isclose(fg.d_omega, natural.d_omega, rtol=1e-9, atol=0):
        raise GridMismatchError(
            f"频率网格必须是滞后 FFT 的自然网格 (ω_start=0, dω={natural.d_omega:.6g})，当前为 {fg}"
        )
    if fg.n_omega < 2 * max_lag + 1:
        raise GridMismatchError(f"频率点数 n_ω={fg.n_omega} 小于所需滞后数 {2 * max_lag + 1}")


# ==================== 分布计算 ====================

@lru_cache(maxsize=8)
def _lag_table(n: int, max_lag: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """滞后索引表：(m, t+m 下标, t−m 下标, 有效掩码)，按 (n, max_lag) 缓存"""
    lags = np.arange(-max_lag, max_lag + 1)
    rows = np.arange(n)[:, None]
    plus = rows + lags[None, :]
    minus = rows - lags[None, :]
    valid = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
    plus = np.clip(plus, 0, n - 1)
    minus = np.clip(minus, 0, n - 1)
    for arr in (lags, plus, minus, valid):
        arr.setflags(write=False)
    return lags, plus, minus, valid


def _distribution_rows(samples: np.ndarray, taps: np.ndarray, max_lag: int, n_omega: int,
                       dt: float, rows: slice) -> np.ndarray:
    lags, plus, minus, valid = _lag_table(samples.size, max_lag)
    kernel = samples[plus[rows]] * np.conj(samples[minus[rows]])
    kernel = np.where(valid[rows], kernel, 0.0) * taps[None, :]
    buffer = np.zeros((kernel.shape[0], n_omega), dtype=complex)
    buffer[:, lags % n_omega] = kernel
    return 2.0 * dt * sp_fft.fft(buffer, axis=1)


def _distribution(a: AnalyticSignal, w: Window, fg: Optional[FrequencyGrid], kind: DistributionKind,
                  window_id: Optional[str], workers: int) -> TFDistribution:
    require_normalized(a)
    n = a.grid.n
    if w.M > 2 * n - 1:
        raise ParameterError(f"窗长 M={w.M} 超过可用滞后数 2n−1={2 * n - 1}")
    half = (w.M - 1) // 2
    max_lag = min((n - 1) // 2, half)
    fg = fg or natural_frequency_grid(a.grid)
    _check_frequency_grid(a.grid, fg, max_lag)

    # 窗中心 (M−1)/2 对应零滞后
    taps = np.asarray(w.taps[half - max_lag: half + max_lag + 1], dtype=float)
    chunks = [slice(start, min(start + ROW_CHUNK, n)) for start in range(0, n, ROW_CHUNK)]
    blocks = TaskManager.run_parallel(
        lambda rows: _distribution_rows(a.samples, taps, max_lag, fg.n_omega, a.grid.dt, rows),
        chunks,
        workers,
    )
    full = np.vstack(blocks)

    peak = float(np.max(np.abs(full.real)))
    residue = float(np.max(np.abs(full.imag)))
    logger.debug(f"{kind.value} 分布虚部残差 {residue:.3g}（峰值 {peak:.3g}）")
    if peak > 0 and residue > settings.REALNESS_TOL * peak:
        raise InvariantViolationError("realness", f"虚部残差 {residue:.3g} 超过峰值的 {settings.REALNESS_TOL}")

    result = TFDistribution(time_grid=a.grid, freq_grid=fg, values=full.real, kind=kind, window=window_id)
    total = result.total()
    if abs(total - 1.0) > settings.WVD_NORMALIZATION_TOL:
        raise InvariantViolationError("wvd-normalization", f"(1/2π)∬W dt dω = {total:.6g}")
    logger.info(f"{kind.value} 分布计算完成，窗 {window_id or '无'}，归一化 {total:.12g}")
    return result


def wvd(a: AnalyticSignal, fg: Optional[FrequencyGrid] = None, workers: int = 1) -> TFDistribution:
    """Wigner-Ville 分布，等价于全长单位窗的伪 Wigner-Ville 分布"""
    return _distribution(a, rectangular_window(2 * a.grid.n - 1), fg, DistributionKind.PLAIN, None, workers)


def pseudo_wvd(a: AnalyticSignal, w: Window, fg: Optional[FrequencyGrid] = None,
               workers: int = 1) -> TFDistribution:
    """滞后乘积乘以窗 h(τ) 的伪 Wigner-Ville 分布"""
    return _distribution(a, w, fg, DistributionKind.PSEUDO, w.id, workers)


def distribution_difference(a: TFDistribution, b: TFDistribution) -> TFDistribution:
    """逐点绝对差 |a − b|"""
    if a.time_grid != b.time_grid or a.freq_grid != b.freq_grid:
        raise GridMismatchError("两个时频分布的网格不一致")
    return TFDistribution(
        time_grid=a.time_grid,
        freq_grid=a.freq_grid,
        values=np.abs(a.values - b.values),
        kind=DistributionKind.DIFFERENCE,
        window=b.window or a.window,
    )


def time_marginal(W: TFDistribution) -> np.ndarray:
    """(1/2π)∫W dω"""
    return W.values.sum(axis=1) * W.freq_grid.d_omega / (2.0 * math.pi)


def frequency_marginal(W: TFDistribution) -> np.ndarray:
    """(1/2π)∫W dt，与 |S̃(ω)|² 同一尺度"""
    return W.values.sum(axis=0) * W.time_grid.dt / (2.0 * math.pi)
