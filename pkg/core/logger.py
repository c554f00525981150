"""
日志配置模块。
"""

import logging
import os

import numpy as np

from settings import LOG_LEVEL, LOG_FORMAT, LOG_DIR

# 确保日志目录存在
os.makedirs(LOG_DIR, exist_ok=True)

# 配置根日志记录器
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format=LOG_FORMAT,
    handlers=[
        logging.FileHandler(os.path.join(LOG_DIR, "app.log"), encoding='utf-8'),
        logging.StreamHandler()
    ]
)

def get_logger(name: str) -> logging.Logger:
    """获取指定名称的日志记录器"""
    return logging.getLogger(name)


def summarize(values) -> str:
    """生成数组的简短统计描述，用于日志输出"""
    arr = np.asarray(values)
    if arr.size == 0:
        return "空数组"
    return f"shape={arr.shape}, min={float(np.min(arr)):.6g}, max={float(np.max(arr)):.6g}"
