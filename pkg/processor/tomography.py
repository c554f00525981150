"""
时频层析模块：直接分数傅里叶变换路线与 (伪) Wigner-Ville 分布的 Radon 投影路线。

层析图 𝒯(X,θ) 是旋转正交变量 X = t·cosθ + ω·sinθ 的概率密度：
θ=0 为时间边缘分布，θ=π/2 为频率边缘分布，每一行对 X 积分为 1。
"""

import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import fft as sp_fft
from scipy.ndimage import map_coordinates
from scipy.signal import czt

import settings
from const import DistributionKind, TomogramSource
from core.logger import get_logger, summarize
from exceptions import DegenerateAngleError, GridMismatchError, InvariantViolationError, ParameterError
from models import AnalyticSignal, AngleGrid, QuadratureGrid, TFDistribution, TimeGrid, Tomogram
from processor.analytic import require_normalized, spectrum
from processor.utils import GridValidator, TaskManager, TimeUtils

# 获取日志记录器
logger = get_logger(__name__)

# 参考积分路线每块的最大矩阵元素数
_REFERENCE_CHUNK = 2_000_000


# ==================== 网格 ====================

def default_angle_grid(count: Optional[int] = None) -> AngleGrid:
    """θ_k = kπ/(count−1)，k = 0..count−1，默认 181 个角度（含 π）"""
    count = count or settings.DEFAULT_ANGLE_COUNT
    if count < 2:
        raise ParameterError(f"角度数 {count} 必须 ≥ 2")
    return AngleGrid(values=np.arange(count) * (math.pi / (count - 1)))


def _support(x: np.ndarray, density: np.ndarray, tail: float) -> Tuple[float, float]:
    """去掉两侧各 tail 质量后的支撑区间"""
    cdf = np.cumsum(density)
    cdf = cdf / cdf[-1]
    lo = int(np.searchsorted(cdf, tail, side="left"))
    hi = int(np.searchsorted(cdf, 1.0 - tail, side="left"))
    return float(x[min(lo, x.size - 1)]), float(x[min(hi, x.size - 1)])


def marginal_resolution(grid: TimeGrid, oversampling: int = settings.SPECTRAL_OVERSAMPLING) -> float:
    """时间采样间隔与过采样频谱间隔中较小者，X 网格不应比它更粗"""
    return min(grid.dt, 2.0 * math.pi / (grid.n * oversampling * grid.dt))


def quadrature_grid_for_support(t_range: Tuple[float, float], w_range: Tuple[float, float],
                                ag: AngleGrid, dX: float) -> QuadratureGrid:
    """覆盖时频支撑矩形在全部角度上投影的 X 网格，两侧各留 10% 余量

    单元中心取 dX 的整数倍，dX 等于频谱采样间隔时 θ=π/2 行的单元与频谱单元重合。
    """
    corners_t = np.array([t_range[0], t_range[0], t_range[1], t_range[1]])
    corners_w = np.array([w_range[0], w_range[1], w_range[0], w_range[1]])
    theta = ag.values[:, None]
    X = corners_t[None, :] * np.cos(theta) + corners_w[None, :] * np.sin(theta)
    lo, hi = float(X.min()), float(X.max())
    pad = settings.QUADRATURE_PADDING * max(hi - lo, 1e-12)
    lo, hi = lo - pad, hi + pad

    if (hi - lo) / dX + 2 > settings.MAX_QUADRATURE_POINTS:
        coarse = (hi - lo) / (settings.MAX_QUADRATURE_POINTS - 2)
        logger.warning(f"X 网格需要 {int((hi - lo) / dX)} 个点，超过上限 {settings.MAX_QUADRATURE_POINTS}，"
                       f"dX 由 {dX:.4g} 放宽到 {coarse:.4g}，边缘分布的熵将偏大")
        dX = coarse
    X_start = math.floor(lo / dX) * dX
    n_X = int(math.ceil((hi - X_start) / dX)) + 1
    return QuadratureGrid(X_start=X_start, dX=dX, n_X=n_X)


def default_quadrature_grid(a: AnalyticSignal, ag: AngleGrid) -> QuadratureGrid:
    """由时间与频率支撑（尾部质量 1e−10）确定的默认 X 网格，dX 取边缘分布的分辨率"""
    require_normalized(a)
    density_t = np.abs(a.samples) ** 2
    omegas, values = spectrum(a, settings.SPECTRAL_OVERSAMPLING)
    t_range = _support(a.grid.times, density_t, settings.SUPPORT_TAIL)
    w_range = _support(omegas, np.abs(values) ** 2, settings.SUPPORT_TAIL)
    return quadrature_grid_for_support(t_range, w_range, ag, marginal_resolution(a.grid))


def resample_density(x: np.ndarray, density: np.ndarray, qg: QuadratureGrid, stepwise: bool = False) -> np.ndarray:
    """把均匀网格 x 上的密度重采样为 qg 上的单元平均，质量守恒

    默认把密度取为过各采样点的分段线性曲线，两端各延伸半个采样间隔的常数段；
    stepwise=True 时每个采样点代表宽度为采样间隔的常数单元。两种重建的积分都等于
    Σ density·dx，每个 qg 单元取其精确平均，落在 qg 范围外的质量被丢弃。
    """
    x = np.asarray(x, dtype=float)
    density = np.asarray(density, dtype=float)
    if x[0] > x[-1]:
        x, density = x[::-1], density[::-1]
    dx = (x[-1] - x[0]) / (x.size - 1)
    if stepwise:
        src_edges = np.concatenate([x - 0.5 * dx, [x[-1] + 0.5 * dx]])
        cdf = np.concatenate([[0.0], np.cumsum(density * dx)])
        return np.diff(np.interp(qg.edges, src_edges, cdf)) / qg.dX

    knots = np.concatenate([[x[0] - 0.5 * dx], x, [x[-1] + 0.5 * dx]])
    heights = np.concatenate([density[:1], density, density[-1:]])
    widths = np.diff(knots)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * widths * (heights[:-1] + heights[1:]))])

    edges = np.clip(qg.edges, knots[0], knots[-1])
    k = np.clip(np.searchsorted(knots, edges, side="right") - 1, 0, widths.size - 1)
    u = edges - knots[k]
    slope = (heights[k + 1] - heights[k]) / widths[k]
    cdf_at_edges = cdf[k] + heights[k] * u + 0.5 * slope * u ** 2
    return np.diff(cdf_at_edges) / qg.dX


# ==================== 分数傅里叶变换 ====================

def _check_angle(theta: float) -> Tuple[float, float]:
    s, c = math.sin(theta), math.cos(theta)
    if abs(s) < settings.DEGENERATE_ANGLE_EPS:
        raise DegenerateAngleError(theta)
    return s, c


def _trapezoid_weights(n: int, dt: float) -> np.ndarray:
    weights = np.full(n, dt)
    weights[0] = weights[-1] = 0.5 * dt
    return weights


def _frft_integral(samples: np.ndarray, grid: TimeGrid, theta: float, X: np.ndarray,
                   fast: bool = False) -> np.ndarray:
    """∫dt S(t)·exp[i t²cotθ/2 − i t X/sinθ]，梯形求积"""
    s, c = _check_angle(theta)
    t = grid.times
    g = samples * _trapezoid_weights(grid.n, grid.dt) * np.exp(0.5j * (c / s) * t ** 2)
    nu = X / s
    if fast:
        # chirp-z：ν_k = ν_0 + kΔν，exp(−i t_n ν_k) 拆成 A^{−n}·W^{nk} 与 exp(−i t_0 ν_k)
        d_nu = (X[1] - X[0]) / s
        w = np.exp(-1j * d_nu * grid.dt)
        a = np.exp(1j * nu[0] * grid.dt)
        return czt(g, m=X.size, w=w, a=a) * np.exp(-1j * grid.t_start * nu)

    result = np.empty(X.size, dtype=complex)
    step = max(1, _REFERENCE_CHUNK // grid.n)
    for start in range(0, X.size, step):
        block = nu[start:start + step]
        result[start:start + step] = np.exp(-1j * np.outer(block, t)) @ g
    return result


def frft(a: AnalyticSignal, theta: float, qg: QuadratureGrid, fast: bool = False) -> np.ndarray:
    """分数傅里叶积分 I(X,θ)

    默认走直接梯形求积的参考路线；fast=True 时用 chirp-z 变换，两者只差舍入误差。
    |sinθ| < ε 时抛出 DegenerateAngleError，应改用边缘分布。
    """
    require_normalized(a)
    return _frft_integral(a.samples, a.grid, theta, qg.values, fast=fast)


def unitary_frft(samples: np.ndarray, grid: TimeGrid, theta: float, qg: QuadratureGrid,
                 fast: bool = False) -> np.ndarray:
    """带标准前因子 √((1−i·cotθ)/2π)·e^{iX²cotθ/2} 的酉分数傅里叶变换

    主值分支下满足角度可加性 F_{θ2}F_{θ1} = F_{θ1+θ2}。
    """
    s, c = _check_angle(theta)
    cot = c / s
    X = qg.values
    prefactor = np.sqrt((1.0 - 1j * cot) / (2.0 * math.pi)) * np.exp(0.5j * cot * X ** 2)
    return prefactor * _frft_integral(np.asarray(samples, dtype=complex), grid, theta, X, fast=fast)


# ==================== 直接路线 ====================

class _DirectPlan:
    """同一信号在全部角度上共享的预计算量

    信号先平移到相空间质心 (t_c, ω_c)，旋转后再把 X 平移回去。
    """

    def __init__(self, a: AnalyticSignal):
        g = a.grid
        self.n_fft = g.n * settings.SPECTRAL_OVERSAMPLING
        self.dt = g.dt
        times = g.times
        density_t = np.abs(a.samples) ** 2
        omegas, values = spectrum(a, settings.SPECTRAL_OVERSAMPLING)
        density_w = np.abs(values) ** 2
        d_omega = 2.0 * math.pi / (self.n_fft * g.dt)
        self.t_c = float(np.sum(times * density_t) * g.dt)
        self.w_c = float(np.sum(omegas * density_w) * d_omega)

        self.times, self.density_t = times, density_t
        self.omegas, self.density_w = omegas, density_w

        t_shift = times - self.t_c
        self.centered_t0 = float(t_shift[0])
        self.centered = a.samples * np.exp(-1j * self.w_c * t_shift)
        omegas_c, spectrum_c = _centered_spectrum(self.centered, self.centered_t0, g.dt, self.n_fft)
        self.centered_w0 = float(omegas_c[0])
        self.d_omega = d_omega
        self.spectrum_c = spectrum_c

        # |tanθ| 超过该阈值时从时域计算，否则从频域计算
        self.time_route_tan = self.n_fft * g.dt ** 2 / (2.0 * math.pi)


def _centered_spectrum(samples: np.ndarray, t0: float, dt: float, n_fft: int) -> Tuple[np.ndarray, np.ndarray]:
    omegas = 2.0 * math.pi * sp_fft.fftfreq(n_fft, d=dt)
    values = sp_fft.fft(samples, n=n_fft) * (dt / math.sqrt(2.0 * math.pi)) * np.exp(-1j * omegas * t0)
    return sp_fft.fftshift(omegas), sp_fft.fftshift(values)


def _rotated_density(f: np.ndarray, u0: float, h: float, s: float, c: float,
                     n_fft: int) -> Tuple[np.ndarray, np.ndarray]:
    """chirp 乘法加 FFT 计算 |I|²/(2π|sinθ|)，返回按 X 升序的 (X, 密度)"""
    u = u0 + h * np.arange(f.size)
    g = f * np.exp(0.5j * (c / s) * u ** 2)
    nu = 2.0 * math.pi * sp_fft.fftfreq(n_fft, d=h)
    integral = h * sp_fft.fft(g, n=n_fft)
    density = np.abs(integral) ** 2 / (2.0 * math.pi * abs(s))
    X = s * nu
    order = np.argsort(X, kind="stable")
    return X[order], density[order]


def _direct_row(plan: _DirectPlan, theta: float, qg: QuadratureGrid) -> np.ndarray:
    s, c = math.sin(theta), math.cos(theta)
    # 边缘行按采样单元阶梯重建，与 S_t、S_ω 的逐点求和一致
    if abs(s) < settings.DEGENERATE_ANGLE_EPS:
        # 时间边缘分布，θ 接近 π 时镜像
        return resample_density(plan.times * c, plan.density_t / abs(c), qg, stepwise=True)
    if math.isclose(theta, math.pi / 2, abs_tol=1e-12):
        return resample_density(plan.omegas, plan.density_w, qg, stepwise=True)

    if abs(s / c) > plan.time_route_tan:
        X, density = _rotated_density(plan.centered, plan.centered_t0, plan.dt, s, c, plan.n_fft)
    else:
        # 频域表示视为"时间"函数，旋转角为 θ − π/2
        X, density = _rotated_density(plan.spectrum_c, plan.centered_w0, plan.d_omega, -c, s, plan.n_fft)
    X = X + plan.t_c * c + plan.w_c * s
    return resample_density(X, density, qg)


def _check_rows(values: np.ndarray, ag: AngleGrid, qg: QuadratureGrid, route: str) -> None:
    masses = values.sum(axis=1) * qg.dX
    errors = np.abs(masses - 1.0)
    worst = int(np.argmax(errors))
    logger.info(f"{route} 层析图行归一化最大偏差 {errors[worst]:.3g}（θ={ag.values[worst]:.6g}）")
    if errors[worst] > settings.TOMOGRAM_NORMALIZATION_TOL:
        raise InvariantViolationError(
            "tomogram-normalization",
            f"θ={ag.values[worst]:.6g} 行积分为 {masses[worst]:.6g}，X 网格可能未覆盖信号支撑",
        )


def tomogram_direct(a: AnalyticSignal, ag: AngleGrid, qg: Optional[QuadratureGrid] = None,
                    workers: int = 1) -> Tomogram:
    """直接路线：𝒯(X,θ) = |I(X,θ)|²/(2π|sinθ|)，退化角自动改用边缘分布"""
    require_normalized(a)
    qg = qg or default_quadrature_grid(a, ag)
    with TimeUtils.timed(f"直接层析图（{len(ag)} 个角度）"):
        plan = _DirectPlan(a)
        rows = TaskManager.run_parallel(lambda theta: _direct_row(plan, float(theta), qg), ag.values, workers)
    values = np.vstack(rows)
    _check_rows(values, ag, qg, "直接")
    return Tomogram(angles=ag, quadrature=qg, values=values, source=TomogramSource.DIRECT)


# ==================== Radon 路线 ====================

def _crop_box(W: TFDistribution) -> Tuple[slice, slice]:
    """保留除 RADON_CROP_TAIL 以外全部 |W| 质量的最小矩形"""
    mag = np.abs(W.values)
    total = mag.sum()

    def bounds(marginal: np.ndarray) -> slice:
        cdf = np.cumsum(marginal) / total
        lo = int(np.searchsorted(cdf, 0.5 * settings.RADON_CROP_TAIL, side="left"))
        hi = int(np.searchsorted(cdf, 1.0 - 0.5 * settings.RADON_CROP_TAIL, side="left"))
        return slice(max(lo - 1, 0), min(hi + 2, marginal.size))

    edge = mag[0, :].sum() + mag[-1, :].sum() + mag[1:-1, 0].sum() + mag[1:-1, -1].sum()
    if edge > settings.RADON_EDGE_FRACTION * total:
        logger.warning(f"truncated projection: 网格边界上的 |W| 质量占比 {edge / total:.3g}，投影线可能在有质量处离开网格")
    return bounds(mag.sum(axis=1)), bounds(mag.sum(axis=0))


def _slab(origin: np.ndarray, direction: float, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
    """直线 origin + s·direction 位于 [lo, hi] 内的参数区间"""
    if abs(direction) < 1e-15:
        inside = (origin >= lo) & (origin <= hi)
        return np.where(inside, -np.inf, np.inf), np.where(inside, np.inf, -np.inf)
    s1 = (lo - origin) / direction
    s2 = (hi - origin) / direction
    return np.minimum(s1, s2), np.maximum(s1, s2)


class _RadonPlan:
    def __init__(self, W: TFDistribution):
        rows, cols = _crop_box(W)
        self.values = np.ascontiguousarray(W.values[rows, cols])
        self.dt = W.time_grid.dt
        self.d_omega = W.freq_grid.d_omega
        self.t_lo = W.time_grid.t_start + rows.start * self.dt
        self.w_lo = W.freq_grid.omega_start + cols.start * self.d_omega
        self.t_hi = self.t_lo + (self.values.shape[0] - 1) * self.dt
        self.w_hi = self.w_lo + (self.values.shape[1] - 1) * self.d_omega
        logger.debug(f"Radon 裁剪区域 t∈[{self.t_lo:.4g}, {self.t_hi:.4g}]，ω∈[{self.w_lo:.4g}, {self.w_hi:.4g}]")


def _radon_row(plan: _RadonPlan, theta: float, qg: QuadratureGrid) -> Tuple[np.ndarray, float]:
    s, c = math.sin(theta), math.cos(theta)
    # 投影线的 X 间隔不超过投影方向上的一个网格单元。粗网格把每个单元等分为奇数份取中点平均；
    # 细网格只在 X = k·stride·dX 的单元中心上积分，其余中心线性插值，
    # 默认网格上这些中心落在 W 的频率节点上
    spacing = plan.dt * abs(c) + plan.d_omega * abs(s)
    per_cell = max(1, int(math.ceil(qg.dX / spacing - 1e-9)))
    per_cell += 1 - per_cell % 2
    if per_cell > 1:
        offsets = (np.arange(per_cell) - (per_cell - 1) / 2) * (qg.dX / per_cell)
        X = (qg.values[:, None] + offsets[None, :]).ravel()
    else:
        stride = max(1, int(math.floor(spacing / qg.dX + 1e-9)))
        first = -int(round(qg.X_start / qg.dX)) % stride
        picked = np.unique(np.concatenate([[0], np.arange(first, qg.n_X, stride), [qg.n_X - 1]]))
        X = qg.values[picked]

    # 直线 (t, ω) = X·(cosθ, sinθ) + u·(−sinθ, cosθ)，裁剪到 W 的矩形内
    lo_t, hi_t = _slab(X * c, -s, plan.t_lo, plan.t_hi)
    lo_w, hi_w = _slab(X * s, c, plan.w_lo, plan.w_hi)
    u_lo = np.maximum(lo_t, lo_w)
    u_hi = np.minimum(hi_t, hi_w)
    chord = u_hi - u_lo
    hit = np.flatnonzero(chord > 0)

    line = np.zeros(X.size)
    if hit.size:
        step = settings.RADON_STEP_CELLS / math.hypot(s / plan.dt, c / plan.d_omega)
        K = max(1, int(math.ceil(chord[hit].max() / step)))
        frac = (np.arange(K) + 0.5) / K
        per_chunk = max(1, settings.RADON_CHUNK_POINTS // K)
        for start in range(0, hit.size, per_chunk):
            idx = hit[start:start + per_chunk]
            u = u_lo[idx, None] + chord[idx, None] * frac[None, :]
            t = X[idx, None] * c - u * s
            w = X[idx, None] * s + u * c
            coords = np.stack([((t - plan.t_lo) / plan.dt).ravel(), ((w - plan.w_lo) / plan.d_omega).ravel()])
            samples = map_coordinates(plan.values, coords, order=1, mode="constant", cval=0.0)
            line[idx] = samples.reshape(idx.size, K).sum(axis=1) * (chord[idx] / K)

    if per_cell > 1:
        row = line.reshape(qg.n_X, per_cell).mean(axis=1) / (2.0 * math.pi)
    else:
        row = np.interp(qg.values, X, line) / (2.0 * math.pi)
    mass = float(row.sum() * qg.dX)
    return row, mass


def tomogram_from_tfd(W: TFDistribution, ag: AngleGrid, qg: Optional[QuadratureGrid] = None,
                      workers: int = 1) -> Tomogram:
    """Radon 路线：沿 t·cosθ + ω·sinθ = X 的线积分 (1/2π)∫W ds

    原始行积分（离散 Radon 常数）记录在日志中，随后每行重新归一化；
    插值产生的负值被截断为零并记录。
    """
    if W.kind == DistributionKind.PLAIN:
        source = TomogramSource.RADON_PLAIN
    elif W.kind == DistributionKind.PSEUDO:
        source = TomogramSource.RADON_PSEUDO
    else:
        raise ParameterError("差值图不能做 Radon 投影")
    if qg is None:
        mag = np.abs(W.values)
        t_range = _support(W.time_grid.times, mag.sum(axis=1), settings.SUPPORT_TAIL)
        w_range = _support(W.freq_grid.omegas, mag.sum(axis=0), settings.SUPPORT_TAIL)
        qg = quadrature_grid_for_support(t_range, w_range, ag, min(W.time_grid.dt, W.freq_grid.d_omega))

    with TimeUtils.timed(f"Radon 层析图（{source.value}，{len(ag)} 个角度）"):
        plan = _RadonPlan(W)
        results: List[Tuple[np.ndarray, float]] = TaskManager.run_parallel(
            lambda theta: _radon_row(plan, float(theta), qg), ag.values, workers
        )

    values = np.vstack([row for row, _ in results])
    raw = np.array([mass for _, mass in results])
    logger.info(f"Radon 原始行积分 {summarize(raw)}")
    if np.any(raw <= 0):
        bad = ag.values[int(np.argmin(raw))]
        raise InvariantViolationError("tomogram-normalization", f"θ={bad:.6g} 处 Radon 投影质量非正")

    peak = float(values.max())
    negative = float(values.min())
    if negative < 0:
        logger.info(f"Radon 投影最小值 {negative:.3g}（峰值 {peak:.3g}），负值已截断")
        values = np.clip(values, 0.0, None)
    values = values / (values.sum(axis=1, keepdims=True) * qg.dX)
    _check_rows(values, ag, qg, source.value)
    return Tomogram(angles=ag, quadrature=qg, values=values, source=source, window=W.window)


def tomogram_difference(a: Tomogram, b: Tomogram) -> Tomogram:
    """逐点绝对差 |a − b|，不重新归一化"""
    GridValidator.same_values(a.angles.values, b.angles.values, "角度网格")
    if a.quadrature != b.quadrature:
        raise GridMismatchError("两个层析图的 X 网格不一致")
    return Tomogram(
        angles=a.angles,
        quadrature=a.quadrature,
        values=np.abs(a.values - b.values),
        source=TomogramSource.DIFFERENCE,
        window=b.window or a.window,
    )
