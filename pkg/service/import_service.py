"""
信号导入导出服务，CSV 格式为两列 "t,s"。
"""

import numpy as np
import pandas as pd

from core.logger import get_logger
from exceptions import SignalImportError
from models import SampledSignal, TimeGrid

logger = get_logger(__name__)

# 相邻时间间隔相对于平均步长的最大允许偏差
UNIFORMITY_TOL = 1e-6


def import_signal(path: str) -> SampledSignal:
    """读取 "t,s" CSV 并推断均匀时间网格

    报错中的行号为数据行下标（从 0 开始，不含表头）。
    """
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise SignalImportError(f"无法解析 CSV 文件 {path}: {e}") from e

    if list(df.columns) != ["t", "s"]:
        raise SignalImportError(f"CSV 表头必须为 't,s'，当前为 {','.join(map(str, df.columns))}")
    if len(df) < 2:
        raise SignalImportError(f"CSV 至少需要 2 行数据，当前为 {len(df)} 行")

    try:
        t = df["t"].to_numpy(dtype=float)
        s = df["s"].to_numpy(dtype=float)
    except (TypeError, ValueError) as e:
        raise SignalImportError(f"CSV 中包含非数值数据: {e}") from e

    bad = np.flatnonzero(~np.isfinite(t) | ~np.isfinite(s))
    if bad.size:
        raise SignalImportError("CSV 中存在 NaN 或无穷值", row=int(bad[0]))

    n = t.size
    dt = (t[-1] - t[0]) / (n - 1)
    if not dt > 0:
        raise SignalImportError(f"时间列必须严格递增，推断步长为 {dt}")
    deviation = np.abs(np.diff(t) - dt) / dt
    worst = int(np.argmax(deviation))
    if deviation[worst] > UNIFORMITY_TOL:
        raise SignalImportError(
            f"时间网格不均匀，相对偏差 {deviation[worst]:.3g} 超过 {UNIFORMITY_TOL}", row=worst + 1
        )

    grid = TimeGrid(t_start=float(t[0]), dt=float(dt), n=n)
    logger.info(f"已导入信号 {path}：n={n}，dt={dt:.6g}")
    return SampledSignal(grid=grid, samples=s)


def export_signal(signal: SampledSignal, path: str) -> None:
    """写出 "t,s" CSV，浮点数使用最短往返表示"""
    df = pd.DataFrame({"t": signal.grid.times, "s": signal.samples})
    df.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"信号已导出到 {path}")
