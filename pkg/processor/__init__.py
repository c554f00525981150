"""
处理器模块包，包含信号生成、解析信号、时频分布、层析与熵计算的数值逻辑。
"""

from .utils import GridValidator, TaskManager, TimeUtils

__all__ = [
    "GridValidator",
    "TaskManager",
    "TimeUtils",
]
