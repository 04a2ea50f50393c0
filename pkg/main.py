import argparse
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

import numpy as np

from commands import COMMANDS
from config import load_config
from exceptions import MisoError
from schemas import ExperimentReport

logger = logging.getLogger(__name__)

# 命令行参数 -> ProbeConfig 字段；命令行给出的值优先于环境变量和配置文件
CONFIG_FLAGS = {
    "tol": "TOL_VERDICT",
    "seed": "SEED",
    "log_level": "LOG_LEVEL",
    "m_max": "M_MAX",
    "t_max": "T_MAX",
    "points": "POINTS",
    "h": "GRID_H",
    "cells": "GRID_CELLS",
    "q": "EMBED_Q",
    "horizon": "EMBED_HORIZON",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="dotenv 格式的配置文件（MISO_KEY = value）")
    common.add_argument("--seed", type=int, help="随机数种子（覆盖 MISO_SEED）")
    common.add_argument("--tol", type=float, help="判定的相对容差")
    common.add_argument("--out", help="JSON 报告输出路径；缺省写到标准输出（标准输出被 CSV 占用时写到标准错误）")
    common.add_argument("--no-timestamp", action="store_true", help="报告中不写时间戳与耗时，便于逐字节比较")
    common.add_argument("--log-level", help="日志级别（DEBUG/INFO/WARNING/ERROR）")

    parser = argparse.ArgumentParser(prog="miso", description="m-等距算子与 C0-半群的数值探测工具")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.add_parser(subparsers, [common])
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
        force=True,
    )


def run(argv: Optional[List[str]] = None) -> int:
    """
    执行一个子命令。

    Returns:
        0 全部判定通过；1 有判定未通过；2 用法或输入错误
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0

    started = time.perf_counter()
    try:
        overrides = {field: getattr(args, flag, None) for flag, field in CONFIG_FLAGS.items()}
        config = load_config(args.config, **overrides)
        configure_logging(config.LOG_LEVEL)
        result = args.handler(args, config)
    except (MisoError, ValueError, OSError, np.linalg.LinAlgError) as e:
        print(f"错误: {e}", file=sys.stderr)
        return 2

    report = ExperimentReport(
        command=argv,
        config=config.model_dump(),
        checks=result.checks,
        generated_at=None if args.no_timestamp else datetime.now(timezone.utc).isoformat(),
        duration_seconds=None if args.no_timestamp else round(time.perf_counter() - started, 6),
    )
    payload = report.model_dump_json(indent=2) + "\n"
    try:
        if args.out is not None:
            Path(args.out).write_text(payload, encoding="utf-8")
            if result.stdout is not None:
                sys.stdout.write(result.stdout)
        elif result.stdout is not None:
            # 标准输出已被 CSV 占用，报告改写到标准错误
            sys.stdout.write(result.stdout)
            sys.stderr.write(payload)
        else:
            sys.stdout.write(payload)
    except OSError as e:
        print(f"错误: 报告写入失败: {e}", file=sys.stderr)
        return 2

    failed = [check.name for check in report.checks if not check.passed and not check.informational]
    if failed:
        logger.warning(f"未通过的判定: {', '.join(failed)}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(run())
