# commands/common.py
"""子命令共用的小工具"""
import math
import sys
from pathlib import Path
from typing import List, NamedTuple, Optional

import pandas as pd

from schemas import CheckResult


class CommandResult(NamedTuple):
    checks: List[CheckResult]
    stdout: Optional[str] = None  # 未指定 --out 时代替 JSON 写到标准输出的内容（如 CSV）


def check(name: str, passed: bool, residual: Optional[float] = None, informational: bool = False, **details) -> CheckResult:
    if residual is not None and not math.isfinite(residual):
        details["raw_residual"] = str(residual)
        residual = None
    return CheckResult(
        name=name,
        passed=bool(passed),
        residual=residual,
        informational=informational,
        details=details,
    )


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")


def write_text(path: Optional[str], text: str) -> None:
    """写到文件；path 为空时写到标准输出"""
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
