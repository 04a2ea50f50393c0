# services/matrix_io.py
"""
文件格式。

矩阵文件：首行 `rows cols`，随后 rows*cols 行 `re im`，按行优先排列。
权重 CSV：带表头的两列 `s,value`。

浮点数一律按 repr 写出，读回后逐位相同。
"""
import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd

from exceptions import MatrixFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_matrix(path: PathLike) -> np.ndarray:
    """
    读取矩阵文件。

    Raises:
        FileNotFoundError: 文件不存在
        MatrixFormatError: 空文件、表头不合法、条目数不符或数值无法解析
    """
    path = Path(path)
    lines = [line.strip() for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        raise MatrixFormatError(f"{path}: 空的矩阵文件")
    header = lines[0].split()
    try:
        rows, cols = (int(token) for token in header)
    except ValueError:
        raise MatrixFormatError(f"{path}: 首行必须是 `rows cols` 两个整数，收到 {lines[0]!r}")
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"{path}: 行列数必须为正，收到 {rows} x {cols}")
    if len(lines) - 1 != rows * cols:
        raise MatrixFormatError(f"{path}: 需要 {rows * cols} 个条目，实际 {len(lines) - 1} 行")
    try:
        entries = np.loadtxt(lines[1:], dtype=float, ndmin=2)
    except ValueError as e:
        raise MatrixFormatError(f"{path}: 条目无法解析: {e}")
    if entries.shape[1] != 2:
        raise MatrixFormatError(f"{path}: 每个条目必须是 `re im` 两个数")
    if not np.all(np.isfinite(entries)):
        raise MatrixFormatError(f"{path}: 条目含有 NaN 或 Inf")
    matrix = (entries[:, 0] + 1j * entries[:, 1]).reshape(rows, cols)
    logger.debug(f"读取矩阵 {path}: {rows} x {cols}")
    return matrix


def format_matrix(M) -> str:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError("只能写出二维矩阵")
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    lines.extend(f"{float(z.real)!r} {float(z.imag)!r}" for z in M.ravel())
    return "\n".join(lines) + "\n"


def write_matrix(path: PathLike, M) -> Path:
    path = Path(path)
    path.write_text(format_matrix(M), encoding="utf-8")
    return path


def read_weight_csv(path: PathLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    读取 `s,value` 权重 CSV，返回 (s, value) 两个数组。

    Raises:
        MatrixFormatError: 缺少表头、列数不是 2 或含非数值
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise MatrixFormatError(f"{path}: 空的权重文件")
    except pd.errors.ParserError as e:
        raise MatrixFormatError(f"{path}: CSV 无法解析: {e}")
    if frame.shape[1] != 2:
        raise MatrixFormatError(f"{path}: 权重 CSV 必须恰好两列 s,value")
    try:
        [float(name) for name in frame.columns]
    except ValueError:
        pass
    else:
        raise MatrixFormatError(f"{path}: 权重 CSV 缺少表头")
    try:
        data = frame.astype(float).to_numpy()
    except ValueError as e:
        raise MatrixFormatError(f"{path}: 权重含有非数值: {e}")
    if not np.all(np.isfinite(data)):
        raise MatrixFormatError(f"{path}: 权重含有 NaN 或 Inf")
    return data[:, 0], data[:, 1]


def write_weight_csv(path: PathLike, s, values) -> Path:
    path = Path(path)
    frame = pd.DataFrame({"s": np.asarray(s, dtype=float), "value": np.asarray(values, dtype=float)})
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path
