# services/translation.py
"""
加权 L2(R+) 的离散化与三类平移半群。

网格点 s_i = i*h，平移只取格点倍数 t = j*h。三种模式及其权重轮廓 p：

    right         右平移 S(t) 作用在 L2(rho) 上      p = rho
    weighted      S_rho(t) = M_rho S(t) M_rho^{-1}  p = rho^2
    left-adjoint  左平移的伴随作用在 L2(w) 上         p = 1/w

对应算子在 t = j*h 处是 m-等距，当且仅当 p 的步长 j 的 m 阶差分在内部窗口上为零。
"""
import logging
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np

from exceptions import DimensionMismatch, MatrixFormatError, NonLatticeShift
from schemas import WeightedGrid, WeightedGridFunction, WeightTestResult
from services.combinat import binom
from services.matrix_io import read_weight_csv

logger = logging.getLogger(__name__)

MODES = ("right", "weighted", "left-adjoint")

# 具名权重族，在格点 s_i = i*h 上取值
FAMILIES: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "constant": lambda s: np.ones_like(s),
    "affine": lambda s: 1 + s,
    "quadratic": lambda s: s ** 2 + s + 1,
    "cubic": lambda s: s ** 3 + s + 1,
    "sqrt-affine": lambda s: np.sqrt(1 + s),
    "exponential": lambda s: np.exp(s),
    "decaying-exponential": lambda s: np.exp(-s),
    "reciprocal-affine": lambda s: 1 / (1 + s),
    "gaussian": lambda s: np.exp(-(s ** 2)),
}


def named_grid(name: str, h: float, cells: int) -> WeightedGrid:
    """
    按具名权重族生成网格。

    Raises:
        ValueError: 未知的权重族
    """
    if name not in FAMILIES:
        raise ValueError(f"未知的权重族 {name}，可选: {', '.join(FAMILIES)}")
    s = np.arange(cells) * h
    return WeightedGrid(h=h, weights=FAMILIES[name](s), label=name)


def grid_from_csv(path: Union[str, Path]) -> WeightedGrid:
    """
    从 `s,value` CSV 读取权重；s 必须从 0 开始且等距，步长即 h。

    Raises:
        MatrixFormatError: 网格不从 0 开始或不等距
    """
    s, values = read_weight_csv(path)
    if len(s) < 4:
        raise MatrixFormatError(f"{path}: 权重至少需要 4 行")
    steps = np.diff(s)
    h = float(steps[0])
    if s[0] != 0 or h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * h:
        raise MatrixFormatError(f"{path}: s 列必须从 0 开始且等距递增")
    if np.any(values <= 0):
        raise MatrixFormatError(f"{path}: 权重必须严格为正")
    return WeightedGrid(h=h, weights=values, label=Path(path).stem)


def _log_ratio_bound(log_weights: np.ndarray, h: float, M: float, rate: float) -> bool:
    """对所有 j >= 1 检查 log p_{i+j} - log p_i <= log M + rate * j * h"""
    N = len(log_weights)
    bound = np.log(M)
    for j in range(1, N):
        growth = float(np.max(log_weights[j:] - log_weights[:-j]))
        if growth > bound + rate * j * h + 1e-12 * max(1.0, abs(growth)):
            logger.debug(f"可容许性在 j={j} 处不成立: {growth:.6g}")
            return False
    return True


def admissible_right(grid: WeightedGrid, M: float, omega: float) -> bool:
    """rho_{i+j} <= M e^{omega*j*h} rho_i 对网格上所有 i, j 成立"""
    if M < 1:
        raise ValueError("M 必须不小于 1")
    return _log_ratio_bound(np.log(grid.weights), grid.h, M, omega)


def admissible_left(grid: WeightedGrid, M: float, alpha: float) -> bool:
    """w_i <= M e^{alpha*j*h} w_{i+j} 对网格上所有 i, j 成立"""
    if M < 1:
        raise ValueError("M 必须不小于 1")
    return _log_ratio_bound(-np.log(grid.weights), grid.h, M, alpha)


def _check_shift(j: int, N: int) -> None:
    if not 0 <= j < N:
        raise NonLatticeShift(f"平移格数 j={j} 不在 [0, {N}) 内")


def right_translate(f: WeightedGridFunction, j: int) -> WeightedGridFunction:
    """(S f)_i = f_{i-j}（i >= j），否则为 0；越过截断边界的格子丢弃"""
    N = f.grid.N
    _check_shift(j, N)
    out = np.zeros(N, dtype=complex)
    out[j:] = f.values[: N - j]
    return f.with_values(out)


def adjoint_right_translate(f: WeightedGridFunction, j: int) -> WeightedGridFunction:
    """(S* f)_i = (rho_{i+j} / rho_i) f_{i+j}（i + j < N）"""
    N = f.grid.N
    _check_shift(j, N)
    rho = f.grid.weights
    out = np.zeros(N, dtype=complex)
    out[: N - j] = rho[j:] / rho[: N - j] * f.values[j:]
    return f.with_values(out)


def weighted_translate(f: WeightedGridFunction, rho: WeightedGrid, j: int) -> WeightedGridFunction:
    """
    (S_rho f)_i = (rho_i / rho_{i-j}) f_{i-j}，f 位于不加权网格上。

    Raises:
        DimensionMismatch: f 与 rho 的格子数不同
    """
    N = f.grid.N
    if rho.N != N:
        raise DimensionMismatch(f"函数格子数 {N} 与权重格子数 {rho.N} 不一致")
    _check_shift(j, N)
    p = rho.weights
    out = np.zeros(N, dtype=complex)
    out[j:] = p[j:] / p[: N - j] * f.values[: N - j]
    return f.with_values(out)


def left_adjoint_translate(f: WeightedGridFunction, j: int) -> WeightedGridFunction:
    """(T* f)_i = (w_{i-j} / w_i) f_{i-j}，网格权重为 w"""
    N = f.grid.N
    _check_shift(j, N)
    w = f.grid.weights
    out = np.zeros(N, dtype=complex)
    out[j:] = w[: N - j] / w[j:] * f.values[: N - j]
    return f.with_values(out)


def weight_profile(grid: WeightedGrid, mode: str) -> np.ndarray:
    if mode == "right":
        return np.asarray(grid.weights)
    if mode == "weighted":
        return np.asarray(grid.weights) ** 2
    if mode == "left-adjoint":
        return 1 / np.asarray(grid.weights)
    raise ValueError(f"未知的平移模式 {mode}，可选: {', '.join(MODES)}")


def _check_window(m: int, j: int, N: int) -> None:
    if m < 1:
        raise ValueError(f"阶数 m 至少为 1，收到 m={m}")
    if j < 1:
        raise NonLatticeShift(f"平移格数 j 至少为 1，收到 j={j}")
    if m * j >= N:
        raise NonLatticeShift(f"m*j = {m * j} 不小于格子数 {N}，内部窗口为空")


def residual_profile(grid: WeightedGrid, m: int, j: int, mode: str = "right") -> np.ndarray:
    """
    g_i = sum_k C(m,k) (-1)^{m-k} p_{i+kj} / p_i，i 取内部窗口 [0, N - m*j)。

    用步长 j 的差分重复 m 次求得，避免大二项式系数的相消。
    """
    _check_window(m, j, grid.N)
    p = weight_profile(grid, mode)
    d = p.copy()
    for _ in range(m):
        d = d[j:] - d[:-j]
    return d / p[: len(d)]


def weight_test(grid: WeightedGrid, m: int, j: int, tol: float, mode: str = "right") -> WeightTestResult:
    """
    t = j*h 处的平移算子是否为 m-等距（格点意义下 p 是次数 < m 的多项式）。

    每点扣除舍入底噪 2^{m+2} eps max_k p_{i+kj}/p_i 后按 (j*h)^m 归一化再与 tol 比较，
    原始的 max|g_i| 一并报告。

    Raises:
        NonLatticeShift: m*j >= N 或 j < 1
    """
    g = residual_profile(grid, m, j, mode)
    p = weight_profile(grid, mode)
    width = len(g)
    peak = p[:width].copy()
    for k in range(1, m + 1):
        peak = np.maximum(peak, p[k * j: k * j + width])
    floor = 2.0 ** (m + 2) * np.finfo(float).eps * peak / p[:width]
    excess = np.maximum(np.abs(g) - floor, 0.0)
    normalized = float(np.max(excess)) / (j * grid.h) ** m
    result = WeightTestResult(
        mode=mode,
        m=m,
        j=j,
        passed=normalized <= tol,
        max_residual=float(np.max(np.abs(g))),
        normalized_residual=normalized,
        noise_floor=float(np.max(floor)),
        window=(0, width),
    )
    logger.debug(f"{grid.label} {mode} m={m} j={j}: 归一化残差 {normalized:.3e}")
    return result


def weighted_translate_m_test(rho: WeightedGrid, m: int, j: int, tol: float) -> bool:
    """S_rho(j*h) 是否为 m-等距，即 rho^2 的格点多项式次数 < m"""
    return weight_test(rho, m, j, tol, mode="weighted").passed


def reciprocal_weight_test(grid: WeightedGrid, m: int, j: int, tol: float) -> bool:
    """左平移伴随是否为 m-等距，即 1/w 的格点多项式次数 < m"""
    return weight_test(grid, m, j, tol, mode="left-adjoint").passed


def weight_order(grid: WeightedGrid, mode: str, j: int, m_max: int, tol: float) -> Optional[int]:
    """该模式下权重检验通过的最小 m"""
    for m in range(1, m_max + 1):
        if m * j >= grid.N:
            break
        if weight_test(grid, m, j, tol, mode).passed:
            return m
    return None


def norm_defect(
    f: WeightedGridFunction, m: int, step: Callable[[WeightedGridFunction], WeightedGridFunction]
) -> float:
    """sum_k (-1)^{m-k} C(m,k) ||step^k f||^2，范数取 f 所在网格的加权范数"""
    total = 0.0
    g = f
    for k in range(m + 1):
        total += binom(m, k) * (-1) ** (m - k) * g.norm_squared()
        g = step(g)
    return total
