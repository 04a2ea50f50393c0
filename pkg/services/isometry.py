# services/isometry.py
"""
m-等距与 m-对称的缺陷演算。

    Delta_m(T) = sum_k (-1)^{m-k} C(m,k) T*^k T^k
    Sigma_m(A) = sum_k (-1)^{m-k} C(m,k) (A^k)* A^{m-k}

判定一律是相对的：Delta_m 与 max(1, ||T||^{2m}) 比较，Sigma_m 与 max(1, ||A||^m) 比较。
T^k 用逐次相乘得到，不走特征分解。
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from exceptions import BranchCut, SingularMatrix
from schemas import DefectReport, EmbeddabilityReport, PowerPairReport
from services.combinat import binom
from services.matrix_core import (
    adjoint,
    as_matrix,
    as_vector,
    eigenvalues,
    kernel,
    matrix_log_principal,
    matrix_powers,
    operator_norm,
)

logger = logging.getLogger(__name__)


def _check_order(m: int) -> None:
    if m < 1:
        raise ValueError(f"阶数 m 至少为 1，收到 m={m}")


def _hermitian_part(D: np.ndarray) -> np.ndarray:
    return (D + D.conj().T) / 2


def top_eigenvector(D: np.ndarray) -> np.ndarray:
    """
    Hermitian 矩阵模最大特征值对应的单位特征向量。

    相位归一化为最大分量实且为正，保证见证向量可复现。
    """
    w, vecs = linalg.eigh(_hermitian_part(D))
    v = vecs[:, int(np.argmax(np.abs(w)))]
    pivot = v[int(np.argmax(np.abs(v)))]
    return v * (abs(pivot) / pivot)


def defect_scale(T, m: int) -> float:
    return max(1.0, operator_norm(T) ** (2 * m))


def misometry_defect_vector(T, m: int, x) -> float:
    """
    sum_k C(m,k) (-1)^{m-k} ||T^k x||^2，可能为负。

    Raises:
        DimensionMismatch: x 的长度与 T 的阶数不一致
    """
    _check_order(m)
    T = as_matrix(T)
    y = as_vector(x, T.shape[0])
    total = 0.0
    for k in range(m + 1):
        total += binom(m, k) * (-1) ** (m - k) * float(np.vdot(y, y).real)
        y = T @ y
    return total


def misometry_defect_operator(T, m: int) -> np.ndarray:
    """Delta_m(T)，Hermitian；T 是 m-等距当且仅当它为零"""
    _check_order(m)
    D = np.zeros(as_matrix(T).shape, dtype=complex)
    for k, P in enumerate(matrix_powers(T, m)):
        D += binom(m, k) * (-1) ** (m - k) * (P.conj().T @ P)
    return _hermitian_part(D)


def relative_defect(T, m: int) -> float:
    """||Delta_m(T)|| / max(1, ||T||^{2m})"""
    return operator_norm(misometry_defect_operator(T, m)) / defect_scale(T, m)


def is_misometry(T, m: int, tol: float) -> bool:
    return relative_defect(T, m) <= tol


def defect_report(T, m: int, tol: float, m_max: Optional[int] = None) -> DefectReport:
    """
    m 阶缺陷报告，附带 1..max(m, m_max) 各阶的缺陷范数表。

    Args:
        T: 方阵
        m: 判定阶数
        tol: 相对容差
        m_max: 缺陷表的上限，缺省等于 m

    Returns:
        DefectReport；判定失败时 witness 为 Delta_m(T) 的主特征向量
    """
    _check_order(m)
    T = as_matrix(T)
    table: List[Tuple[int, float]] = [
        (k, operator_norm(misometry_defect_operator(T, k))) for k in range(1, max(m, m_max or m) + 1)
    ]
    D = misometry_defect_operator(T, m)
    defect_norm = operator_norm(D)
    scale = defect_scale(T, m)
    verdict = defect_norm <= tol * scale
    witness = None if verdict else top_eigenvector(D)
    logger.debug(f"m={m} 缺陷 {defect_norm:.3e}，尺度 {scale:.3e}，判定 {verdict}")
    return DefectReport(
        order_tested=m,
        defect_norm=defect_norm,
        scale=scale,
        tolerance=tol,
        verdict=verdict,
        witness=witness,
        per_order_table=table,
    )


def isometry_order(T, m_max: int, tol: float) -> Optional[int]:
    """满足 ||Delta_m(T)|| <= tol * max(1, ||T||^{2m}) 的最小 m <= m_max，不存在时返回 None"""
    _check_order(m_max)
    T = as_matrix(T)
    for m in range(1, m_max + 1):
        if is_misometry(T, m, tol):
            return m
    return None


def probe_operator(T, m_max: int, tol: float) -> DefectReport:
    """在探测到的阶数上出报告；找不到阶数时在 m_max 上出带见证向量的失败报告"""
    order = isometry_order(T, m_max, tol)
    if order is None:
        logger.info(f"m <= {m_max} 范围内不是 m-等距")
    return defect_report(T, order or m_max, tol, m_max)


def power_norm_polynomial_check(T, x, m: int, n_samples: int, tol: float = 1e-8) -> bool:
    """
    n -> ||T^n x||^2 (n = 0..n_samples-1) 的 m 阶差分是否全部为零。

    m-等距的幂范数平方是 n 的次数不超过 m-1 的多项式。

    Raises:
        ValueError: n_samples < m + 2
    """
    _check_order(m)
    if n_samples < m + 2:
        raise ValueError(f"采样数 {n_samples} 少于 m + 2 = {m + 2}")
    T = as_matrix(T)
    y = as_vector(x, T.shape[0])
    values = []
    for _ in range(n_samples):
        values.append(float(np.vdot(y, y).real))
        y = T @ y
    values = np.array(values)
    residual = float(np.max(np.abs(np.diff(values, n=m))))
    return residual <= tol * max(1.0, float(np.max(np.abs(values))))


def msymmetry_defect(A, m: int, x) -> complex:
    """sum_k (-1)^{m-k} C(m,k) <A^{m-k} x, A^k x>"""
    _check_order(m)
    A = as_matrix(A)
    x = as_vector(x, A.shape[0])
    images = [P @ x for P in matrix_powers(A, m)]
    return complex(
        sum(binom(m, k) * (-1) ** (m - k) * np.vdot(images[k], images[m - k]) for k in range(m + 1))
    )


def msymmetry_defect_operator(A, m: int) -> np.ndarray:
    _check_order(m)
    powers = matrix_powers(A, m)
    S = np.zeros(powers[0].shape, dtype=complex)
    for k in range(m + 1):
        S += binom(m, k) * (-1) ** (m - k) * (powers[k].conj().T @ powers[m - k])
    return S


def symmetry_order(A, m_max: int, tol: float) -> Optional[int]:
    """满足 ||Sigma_m(A)|| <= tol * max(1, ||A||^m) 的最小 m"""
    _check_order(m_max)
    A = as_matrix(A)
    norm = operator_norm(A)
    for m in range(1, m_max + 1):
        if operator_norm(msymmetry_defect_operator(A, m)) <= tol * max(1.0, norm ** m):
            return m
    return None


def kernel_condition_check(T, tol: float = 1e-8, kernel_tol: float = 1e-12) -> bool:
    """
    T*T (Ker T*) 是否落在 Ker T* 内。

    把 T*T 作用在 Ker T* 的正交基上，减去它在 Ker T* 上的投影，残差与 tol * max(1, ||T||^2) 比较。
    Ker T* = {0} 时条件平凡成立。
    """
    T = as_matrix(T)
    K = kernel(adjoint(T), kernel_tol).basis
    if K.shape[1] == 0:
        return True
    image = adjoint(T) @ T @ K
    residual = image - K @ (K.conj().T @ image)
    defect = operator_norm(residual)
    logger.debug(f"核条件: dim Ker T* = {K.shape[1]}，残差 {defect:.3e}")
    return defect <= tol * max(1.0, operator_norm(T) ** 2)


def embeddability_report(T, tol: float = 1e-12) -> EmbeddabilityReport:
    """
    有限维算子 T 能否写成 e^A（即嵌入 C0-半群 e^{tA}）。

    可嵌入当且仅当 0 不属于谱，数值上取最小奇异值 > tol（绝对阈值）；ker_dim / coker_dim
    按同一阈值计数。可嵌入且主对数存在时给出生成元；特征值落在负实轴上时只报告 branch_cut，不抛异常。
    """
    T = as_matrix(T)
    singular_values = linalg.svdvals(T)
    ker_dim = int(np.sum(singular_values <= tol))
    coker_dim = int(np.sum(linalg.svdvals(adjoint(T)) <= tol))
    norm = float(singular_values[0])
    commutator = adjoint(T) @ T - T @ adjoint(T)
    is_normal = operator_norm(commutator) <= tol * max(1.0, norm ** 2) * T.shape[0]
    on_circle = bool(np.all(np.abs(np.abs(eigenvalues(T)) - 1.0) <= np.sqrt(tol)))

    embeddable = bool(singular_values[-1] > tol)
    generator = None
    branch_cut = False
    if embeddable:
        # min|lambda| >= sigma_min > tol，对数的奇异判据按 max(1, ||T||) 缩放，这里换回绝对阈值
        try:
            generator = matrix_log_principal(T, tol / max(1.0, norm))
        except BranchCut as e:
            logger.warning(f"可嵌入但主对数不可用: {e}")
            branch_cut = True
        except SingularMatrix as e:
            logger.warning(f"最小奇异值 {singular_values[-1]:.3e} 高于阈值，但特征值求解判为奇异: {e}")
    logger.info(f"可嵌入性: embeddable={embeddable}, dim Ker T={ker_dim}, dim Ker T*={coker_dim}")
    return EmbeddabilityReport(
        embeddable=embeddable,
        ker_dim=ker_dim,
        coker_dim=coker_dim,
        smallest_singular_value=float(singular_values[-1]),
        is_normal=is_normal,
        spectrum_on_unit_circle=on_circle,
        branch_cut=branch_cut,
        generator=generator,
    )


def power_pair_test(T, r: int, m: int, tol: float) -> PowerPairReport:
    """T^r 与 T^{r+1} 都是 m-等距时 T 亦然；分别给出三者的判定"""
    if r < 1:
        raise ValueError(f"幂次 r 至少为 1，收到 r={r}")
    powers = matrix_powers(T, r + 1)
    return PowerPairReport(
        r=r,
        m=m,
        pass_r=is_misometry(powers[r], m, tol),
        pass_r_plus_1=is_misometry(powers[r + 1], m, tol),
        pass_base=is_misometry(powers[1], m, tol),
    )
