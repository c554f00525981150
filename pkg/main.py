# main.py

import argparse
import json
import sys

from pydantic import ValidationError

import settings
from const import ErrorType, ExitCode
from core.logger import get_logger
from exceptions import (
    ConfigurationError,
    InvariantViolationError,
    ParameterError,
    SignalImportError,
    TomographyError,
)
from service import config_service, export_service, pipeline_service

# 获取日志记录器
logger = get_logger(__name__)


def parse_args(argv=None):
    """解析命令行参数。"""
    parser = argparse.ArgumentParser(description="时频层析与熵不确定关系计算工具")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub, need_config=True):
        if need_config:
            sub.add_argument("--config", type=str, required=True, help="JSON 配置文件路径")
        sub.add_argument("--out", type=str, default=None, help="输出目录 (默认: 配置中的 output_dir)")
        sub.add_argument("--threads", type=int, default=settings.DEFAULT_WORKERS,
                         help="工作线程数，0 表示自动 (默认: 1)")

    add_common(subparsers.add_parser("gen", help="生成测试信号并写出 signal.csv"))
    add_common(subparsers.add_parser("analyze", help="运行完整流水线"))
    add_common(subparsers.add_parser("entropy-surface", help="计算调制参数扫描的熵曲面"))
    verify = subparsers.add_parser("verify", help="校验输出目录中清单的校验和")
    verify.add_argument("--out", type=str, required=True, help="待校验的输出目录")
    return parser.parse_args(argv)


def run(args) -> None:
    if args.command == "gen":
        signal_cfg = config_service.load_signal_config(args.config)
        path = pipeline_service.run_gen(signal_cfg, args.out or "out")
        print(path)
    elif args.command == "analyze":
        cfg = config_service.load_pipeline_config(args.config)
        pipeline_service.run_pipeline(cfg, workers=args.threads, output_dir=args.out)
    elif args.command == "entropy-surface":
        cfg = config_service.load_pipeline_config(args.config)
        pipeline_service.run_surface(cfg, workers=args.threads, output_dir=args.out)
    elif args.command == "verify":
        checked = export_service.verify_manifest(args.out)
        print(f"{len(checked)} files ok")


def _fail(error_type: ErrorType, exc: Exception, code: ExitCode) -> int:
    message = " ".join(str(exc).split())
    print(json.dumps({"error": error_type.value, "message": message}, ensure_ascii=False), file=sys.stderr)
    return int(code)


def main(argv=None) -> int:
    """命令行入口，返回退出码。"""
    args = parse_args(argv)
    try:
        run(args)
    except (ConfigurationError, ParameterError, ValidationError) as e:
        logger.error(f"配置错误: {e}")
        return _fail(ErrorType.CONFIGURATION_ERROR, e, ExitCode.CONFIG_ERROR)
    except (SignalImportError, OSError) as e:
        logger.error(f"I/O 错误: {e}")
        return _fail(ErrorType.IO_ERROR, e, ExitCode.IO_ERROR)
    except InvariantViolationError as e:
        logger.error(f"数值不变量被破坏: {e}", exc_info=True)
        return _fail(ErrorType.INVARIANT_VIOLATION, e, ExitCode.INVARIANT_VIOLATION)
    except TomographyError as e:
        # 其余数值错误（退化信号、未归一化等）同样视为不变量问题
        logger.error(f"计算失败: {e}", exc_info=True)
        return _fail(ErrorType.INVARIANT_VIOLATION, e, ExitCode.INVARIANT_VIOLATION)
    return int(ExitCode.OK)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("应用程序被用户中断")
        sys.exit(1)
