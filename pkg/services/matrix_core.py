# services/matrix_core.py
"""
稠密复矩阵的线性代数服务：共轭转置、数值核、谱半径、矩阵指数与主对数。

特征值一律取自复 Schur 分解（酉相似），主对数同样以 Schur 形为基础；
落在负实轴上的特征值直接报错，不会静默地换到别的分支。
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from exceptions import BranchCut, DimensionMismatch, SingularMatrix
from schemas import Subspace

logger = logging.getLogger(__name__)


def as_matrix(data, square: bool = True) -> np.ndarray:
    """
    转换为 complex128 二维数组（复制一份）。

    Raises:
        DimensionMismatch: 不是非空二维数组，或要求方阵时行列数不同
        ValueError: 含有 NaN / Inf
    """
    M = np.array(data, dtype=complex)
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise DimensionMismatch(f"需要非空二维矩阵，收到形状 {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"算子矩阵必须是方阵，收到形状 {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("矩阵含有 NaN 或 Inf")
    return M


def as_vector(data, dim: Optional[int] = None) -> np.ndarray:
    x = np.array(data, dtype=complex)
    if x.ndim != 1 or len(x) == 0:
        raise DimensionMismatch(f"需要非空一维向量，收到形状 {x.shape}")
    if dim is not None and len(x) != dim:
        raise DimensionMismatch(f"向量长度 {len(x)} 与算子维数 {dim} 不一致")
    return x


def adjoint(M) -> np.ndarray:
    """共轭转置"""
    return as_matrix(M, square=False).conj().T


def operator_norm(M) -> float:
    """谱范数（最大奇异值）"""
    return float(linalg.norm(np.asarray(M, dtype=complex), 2))


def matrix_powers(M, k_max: int) -> List[np.ndarray]:
    """[M^0, M^1, ..., M^k_max]，逐次相乘得到，不做特征分解"""
    M = as_matrix(M)
    powers = [np.eye(M.shape[0], dtype=complex)]
    for _ in range(k_max):
        powers.append(powers[-1] @ M)
    return powers


def kernel(M, tol: float) -> Subspace:
    """
    数值零空间：奇异值小于 tol * sigma_max 的右奇异向量张成的子空间。

    Raises:
        ValueError: tol <= 0
    """
    if tol <= 0:
        raise ValueError("核的容差必须为正")
    basis = linalg.null_space(as_matrix(M, square=False), rcond=tol)
    return Subspace(basis=basis)


def complex_schur(M) -> Tuple[np.ndarray, np.ndarray]:
    """M = Z T Z*，T 上三角、Z 酉"""
    T, Z = linalg.schur(as_matrix(M), output="complex")
    return T, Z


def eigenvalues(M) -> np.ndarray:
    T, _ = complex_schur(M)
    return np.diag(T).copy()


def spectral_radius(M) -> float:
    return float(np.max(np.abs(eigenvalues(M))))


def matrix_exp(M) -> np.ndarray:
    """e^M，缩放-平方 + Padé 有理逼近（scipy.linalg.expm）"""
    return np.asarray(linalg.expm(as_matrix(M)), dtype=complex)


def matrix_log_principal(M, tol: float = 1e-12) -> np.ndarray:
    """
    主对数 L，满足 e^L = M 且特征值虚部落在 (-pi, pi) 内。

    Raises:
        SingularMatrix: 0 属于谱
        BranchCut: 有特征值落在 (-inf, 0] 上
    """
    M = as_matrix(M)
    lam = eigenvalues(M)
    scale = max(1.0, operator_norm(M))
    if np.min(np.abs(lam)) <= tol * scale:
        raise SingularMatrix("0 属于谱，矩阵没有对数")
    on_cut = (lam.real < 0) & (np.abs(lam.imag) <= tol * np.maximum(1.0, np.abs(lam)))
    if np.any(on_cut):
        raise BranchCut(f"特征值 {lam[on_cut][0]} 落在负实轴上，主对数不存在")

    L = np.asarray(linalg.logm(M), dtype=complex)
    residual = operator_norm(matrix_exp(L) - M) / scale
    if residual > 1e-10:
        logger.warning(f"主对数回代残差偏大: ||e^L - M|| / ||M|| = {residual:.3e}")
    return L
