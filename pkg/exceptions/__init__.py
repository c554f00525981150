"""
自定义异常类模块。
"""

from typing import Optional


class TomographyError(Exception):
    """时频层析计算中的基础异常类。"""
    pass


class ConfigurationError(TomographyError):
    """配置文件或流水线配置相关的异常。"""
    pass


class ParameterError(TomographyError):
    """数值参数不合法（网格、窗长、宽度等）。"""
    pass


class DegenerateSignalError(TomographyError):
    """信号能量为零，无法归一化。"""

    def __init__(self, message: str = "degenerate signal: 信号能量为零"):
        super().__init__(message)


class NormalizationError(TomographyError):
    """输入未归一化，或密度积分偏离 1。"""

    def __init__(self, message: str, integral: Optional[float] = None):
        super().__init__(message)
        self.integral = integral


class GridMismatchError(TomographyError):
    """两个对象的网格不一致。"""
    pass


class DegenerateAngleError(TomographyError):
    """|sinθ| 过小，分数傅里叶核数值退化。"""

    def __init__(self, theta: float):
        super().__init__(f"use marginal fallback: θ={theta} 处 |sinθ| 低于退化阈值")
        self.theta = theta


class InvariantViolationError(TomographyError):
    """数值不变量（归一化、非负性等）被破坏。"""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class SignalImportError(TomographyError):
    """CSV 信号导入失败。"""

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message if row is None else f"{message} (行 {row})")
        self.row = row
