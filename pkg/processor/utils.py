"""
处理器工具模块，包含网格校验、并发执行等通用辅助函数，减少重复代码。
"""

import asyncio
import os
import time
from contextlib import contextmanager
from typing import Any, Callable, List, Sequence

import numpy as np
from asyncer import asyncify

from core.logger import get_logger
from exceptions import GridMismatchError, ParameterError

# 获取日志记录器
logger = get_logger(__name__)


class GridValidator:
    """网格验证器，统一处理网格与数组相关的检查逻辑"""

    @staticmethod
    def same_values(a: np.ndarray, b: np.ndarray, what: str) -> None:
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape != b.shape or not np.allclose(a, b, rtol=1e-12, atol=1e-12):
            raise GridMismatchError(f"{what}不一致")

    @staticmethod
    def require_odd(M: int) -> None:
        if M < 1 or M % 2 == 0:
            raise ParameterError(f"窗长 M={M} 必须为正奇数")


class TaskManager:
    """任务管理器，统一处理计算任务的并发执行"""

    @staticmethod
    def resolve_workers(workers: int) -> int:
        """0 表示自动（CPU 核数），负数视为串行"""
        if workers == 0:
            return os.cpu_count() or 1
        return max(1, workers)

    @staticmethod
    async def _gather(func: Callable[[Any], Any], items: Sequence[Any], workers: int) -> List[Any]:
        semaphore = asyncio.Semaphore(workers)
        run_in_thread = asyncify(func)

        async def run_one(index: int, item: Any):
            async with semaphore:
                logger.debug(f"开始处理第 {index} 个任务")
                return await run_in_thread(item)

        # gather 保持输入顺序
        return await asyncio.gather(*(run_one(i, item) for i, item in enumerate(items)))

    @staticmethod
    def run_parallel(func: Callable[[Any], Any], items: Sequence[Any], workers: int = 1) -> List[Any]:
        """对每个元素调用 func，结果顺序与输入一致；任一任务异常时整体抛出"""
        items = list(items)
        workers = TaskManager.resolve_workers(workers)
        if workers <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        logger.info(f"使用 {workers} 个工作线程并行处理 {len(items)} 个任务")
        return asyncio.run(TaskManager._gather(func, items, workers))


class TimeUtils:
    """时间工具类"""

    @staticmethod
    @contextmanager
    def timed(operation_name: str):
        """记录一段计算的耗时"""
        start = time.perf_counter()
        try:
            yield
        finally:
            logger.info(f"{operation_name} 耗时 {time.perf_counter() - start:.3f} 秒")
