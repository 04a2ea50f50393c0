# services/embedding.py
"""
算子值单边前向加权移位 S_W 及其到 C0-半群的嵌入。

L2(R+, C^d) 上的函数在格子 [i*h, (i+1)*h) 上取常值，h = 1/q。对 0 <= t <= 1：

    (T(t)F)(s) = 0              s < t
               = W_n F(s - t)   n <= s < n + t
               = F(s - t)       其余

t > 1 时 T(t) = T(1)^{[t]} T(t - [t])。t 为格点倍数时分段边界正好落在格子边界上，
半群律在格子上精确成立。
"""
import logging
import math
from typing import Optional

import numpy as np

from config import settings
from exceptions import DimensionMismatch, NonLatticeShift
from schemas import FiberGridFunction, OperatorWeightSequence
from services.isometry import defect_scale, misometry_defect_operator
from services.matrix_core import operator_norm

logger = logging.getLogger(__name__)


def _as_sequence(W: OperatorWeightSequence, seq) -> np.ndarray:
    seq = np.asarray(seq, dtype=complex)
    if seq.ndim == 1:
        seq = seq[:, None] if W.d == 1 else seq[None, :]
    if seq.ndim != 2 or seq.shape[1] != W.d:
        raise DimensionMismatch(f"序列向量维数与权重块阶数 {W.d} 不一致")
    return seq


def shift_apply(W: OperatorWeightSequence, seq) -> np.ndarray:
    """
    S_W(h_1, h_2, ...) = (0, W_1 h_1, W_2 h_2, ...)，截断后丢弃最后一项。

    Raises:
        ValueError: 序列长度超过 L
        DimensionMismatch: 向量维数与权重块不一致
    """
    seq = _as_sequence(W, seq)
    if len(seq) > W.L:
        raise ValueError(f"序列长度 {len(seq)} 超过权重个数 L={W.L}")
    out = np.zeros_like(seq)
    for n in range(1, len(seq)):
        out[n] = W.block(n) @ seq[n - 1]
    return out


def shift_matrix(W: OperatorWeightSequence, length: int) -> np.ndarray:
    """截断到前 length 个槽位的 S_W 稠密矩阵，(length*d) x (length*d)"""
    if length < 1:
        raise ValueError("截断长度至少为 1")
    d = W.d
    S = np.zeros((length * d, length * d), dtype=complex)
    for n in range(1, length):
        S[n * d: (n + 1) * d, (n - 1) * d: n * d] = W.block(n)
    return S


def lattice_index(t: float, q: int) -> int:
    """
    t = j/q 中的 j。

    Raises:
        NonLatticeShift: t 为负或不是 1/q 的整数倍
    """
    j = round(t * q)
    if t < 0 or abs(t * q - j) > 1e-9:
        raise NonLatticeShift(f"t={t} 不是网格步长 1/{q} 的非负整数倍")
    return int(j)


def _step_cells(W: OperatorWeightSequence, values: np.ndarray, j: int, q: int) -> np.ndarray:
    """平移 j 个格子（0 <= j <= q），并在每个 [n, n+t) 上乘 W_n"""
    cells = len(values)
    out = np.zeros_like(values)
    out[j:] = values[: cells - j]
    for n in range(1, cells // q):
        start = n * q
        out[start: start + j] = out[start: start + j] @ W.block(n).T
    return out


def embed_step(W: OperatorWeightSequence, F: FiberGridFunction, t: float) -> FiberGridFunction:
    """
    0 <= t <= 1 的 T(t)。

    Raises:
        NonLatticeShift: t 不在格点上或 t > 1
    """
    j = lattice_index(t, F.q)
    if j > F.q:
        raise NonLatticeShift(f"embed_step 只接受 t <= 1，收到 t={t}")
    if F.d != W.d:
        raise DimensionMismatch(f"函数纤维维数 {F.d} 与权重块阶数 {W.d} 不一致")
    return F.with_values(_step_cells(W, F.values, j, F.q))


def embed_apply(W: OperatorWeightSequence, F: FiberGridFunction, t: float) -> FiberGridFunction:
    """T(t) = T(1)^{[t]} T(t - [t])"""
    j = lattice_index(t, F.q)
    if F.d != W.d:
        raise DimensionMismatch(f"函数纤维维数 {F.d} 与权重块阶数 {W.d} 不一致")
    whole, frac = divmod(j, F.q)
    values = _step_cells(W, F.values, frac, F.q)
    for _ in range(whole):
        values = _step_cells(W, values, F.q, F.q)
    return F.with_values(values)


def semigroup_law_residual(
    W: OperatorWeightSequence, t: float, t_prime: float, F: FiberGridFunction
) -> float:
    """
    ||T(t) T(t') F - T(t + t') F||，比较窗口去掉最后 ceil(t + t') 个单位区间。

    Raises:
        ValueError: t + t' 超出网格范围
    """
    j = lattice_index(t, F.q) + lattice_index(t_prime, F.q)
    reach = math.ceil(j / F.q)
    if reach >= F.horizon:
        raise ValueError(f"t + t' = {j / F.q} 超出网格范围 {F.horizon}")
    composed = embed_apply(W, embed_apply(W, F, t_prime), t)
    direct = embed_apply(W, F, j / F.q)
    window = (F.horizon - reach) * F.q
    return composed.with_values(composed.values - direct.values).norm(cells=window)


def verify_t1_matches_shift(
    W: OperatorWeightSequence, seq, q: Optional[int] = None, horizon: Optional[int] = None
) -> float:
    """
    把序列嵌成单位区间上的阶梯函数，作用 T(1) 后按单位区间平均读回，与 S_W 比较。

    Raises:
        ValueError: 序列长度 + 1 超过单位区间个数
    """
    seq = _as_sequence(W, seq)
    q = q or settings.EMBED_Q
    horizon = horizon or max(settings.EMBED_HORIZON, len(seq) + 1)
    if len(seq) + 1 > horizon:
        raise ValueError(f"序列长度 {len(seq)} 需不超过 horizon - 1 = {horizon - 1}")
    F = FiberGridFunction.from_sequence(seq, q, horizon)
    readback = embed_apply(W, F, 1.0).to_sequence()[: len(seq) + 1]
    padded = np.vstack([seq, np.zeros((1, W.d), dtype=complex)])
    # 读回比原序列多一个单位区间，权重按需重复最后一块
    extended = OperatorWeightSequence(blocks=[W.block(n) for n in range(1, len(padded) + 1)])
    expected = shift_apply(extended, padded)
    return float(np.linalg.norm(readback - expected))


def interior_isometry_order(W: OperatorWeightSequence, length: int, m_max: int, tol: float) -> Optional[int]:
    """
    截断 S_W 在内部窗口上的等距阶：Delta_m 压缩到前 length - m 个槽位后与相对尺度比较。
    """
    S = shift_matrix(W, length)
    d = W.d
    for m in range(1, m_max + 1):
        keep = (length - m) * d
        if keep <= 0:
            break
        D = misometry_defect_operator(S, m)[:keep, :keep]
        if operator_norm(D) <= tol * defect_scale(S, m):
            return m
    return None


def strong_continuity_gap(W: OperatorWeightSequence, F: FiberGridFunction) -> float:
    """||T(h) F - F||，h = 1/q"""
    return F.with_values(embed_apply(W, F, F.h).values - F.values).norm()


def random_fiber_function(
    rng: np.random.Generator, q: int, horizon: int, d: int, support_units: Optional[int] = None
) -> FiberGridFunction:
    """前 support_units 个单位区间上取复高斯随机值，其余为零"""
    support = horizon if support_units is None else support_units
    values = np.zeros((q * horizon, d), dtype=complex)
    cells = q * support
    values[:cells] = rng.standard_normal((cells, d)) + 1j * rng.standard_normal((cells, d))
    return FiberGridFunction(q=q, horizon=horizon, values=values)
