"""
配置服务模块，负责读取并校验 JSON 配置文件。
"""

import json
from typing import Any, Dict

from core.logger import get_logger
from exceptions import ConfigurationError
from models import PipelineConfig, SignalConfig

logger = get_logger(__name__)


def load_json(path: str) -> Dict[str, Any]:
    """读取 JSON 文件；文件不存在等 I/O 异常原样抛出"""
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"配置文件 {path} 不是合法的 JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"配置文件 {path} 顶层必须是 JSON 对象")
    return data


def load_pipeline_config(path: str) -> PipelineConfig:
    cfg = PipelineConfig.model_validate(load_json(path))
    logger.info(f"已加载流水线配置 {path}，输出 {[o.value for o in cfg.outputs]}")
    return cfg


def load_signal_config(path: str) -> SignalConfig:
    """接受单独的信号配置，或带 signal 字段的流水线配置"""
    data = load_json(path)
    if "kind" in data:
        return SignalConfig.model_validate(data)
    if isinstance(data.get("signal"), dict):
        return SignalConfig.model_validate(data["signal"])
    raise ConfigurationError(f"配置文件 {path} 中没有信号配置")
