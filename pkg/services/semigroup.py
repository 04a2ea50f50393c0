# services/semigroup.py
"""
有限维 C0-半群 T(t) = e^{tA}。

包括余生成元（Cayley 变换）、m-等距半群的四个等价条件、轨道采样与有限差分定次，
以及幂零生成元、m-对称生成元、区间判定和两点群判定。
"""
import logging
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy import linalg

from config import ProbeConfig, settings
from exceptions import ResolventViolation
from schemas import BoundReport, ConditionVerdict, GroupTestReport, SemigroupConditions, TrajectorySample
from services.combinat import binom
from services.isometry import (
    defect_scale,
    misometry_defect_operator,
    relative_defect,
    top_eigenvector,
)
from services.matrix_core import (
    as_matrix,
    as_vector,
    complex_schur,
    matrix_exp,
    matrix_powers,
    operator_norm,
    spectral_radius,
)

logger = logging.getLogger(__name__)


class GeneratorSemigroup:
    """
    以矩阵 A 为生成元的半群。构造时缓存复 Schur 形 A = Z U Z*，
    之后 T(t) = Z e^{tU} Z*，构造完成后只读。
    """

    def __init__(self, A):
        self._A = as_matrix(A)
        self._A.setflags(write=False)
        self._schur, self._unitary = complex_schur(self._A)
        self._schur.setflags(write=False)
        self._unitary.setflags(write=False)

    @property
    def A(self) -> np.ndarray:
        return self._A

    @property
    def dim(self) -> int:
        return int(self._A.shape[0])

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self._schur).copy()

    def evolve(self, t: float) -> np.ndarray:
        if t == 0:
            return np.eye(self.dim, dtype=complex)
        Z = self._unitary
        return Z @ matrix_exp(t * self._schur) @ Z.conj().T

    def __repr__(self) -> str:
        return f"GeneratorSemigroup(dim={self.dim})"


GeneratorLike = Union[GeneratorSemigroup, np.ndarray, list]


def _generator_matrix(G: GeneratorLike) -> np.ndarray:
    return G.A if isinstance(G, GeneratorSemigroup) else as_matrix(G)


def _as_semigroup(G: GeneratorLike) -> GeneratorSemigroup:
    return G if isinstance(G, GeneratorSemigroup) else GeneratorSemigroup(G)


def evolve(G: GeneratorSemigroup, t: float) -> np.ndarray:
    """T(t) = e^{tA}；t < 0 供群的探测使用"""
    return _as_semigroup(G).evolve(t)


def bound_report(G: GeneratorSemigroup, t_probe: float) -> BoundReport:
    """
    谱界 s(A) = max Re sigma(A) 与增长界估计 w0 = log r(T(t)) / t。

    Raises:
        ValueError: t_probe <= 0
    """
    if t_probe <= 0:
        raise ValueError("t_probe 必须为正")
    G = _as_semigroup(G)
    spectral_bound = float(np.max(G.eigenvalues.real))
    growth_estimate = float(np.log(spectral_radius(G.evolve(t_probe))) / t_probe)
    return BoundReport(spectral_bound=spectral_bound, growth_estimate=growth_estimate, t_probe=t_probe)


def cogenerator(G: GeneratorLike, tol: float = 1e-12) -> np.ndarray:
    """
    余生成元 V = (A + I)(A - I)^{-1}。

    A + I 与 A - I 可交换，因此按 (A - I)^{-1}(A + I) 求解；
    另用 V = I + 2(A - I)^{-1} 交叉核对，偏差过大时记警告。

    Raises:
        ResolventViolation: A - I 数值奇异
    """
    A = _generator_matrix(G)
    identity = np.eye(A.shape[0], dtype=complex)
    shifted = A - identity
    singular_values = linalg.svdvals(shifted)
    if singular_values[-1] <= tol * max(1.0, singular_values[0]):
        raise ResolventViolation(f"1 属于 A 的谱（A - I 最小奇异值 {singular_values[-1]:.3e}）")

    V = linalg.solve(shifted, A + identity)
    check = identity + 2 * linalg.inv(shifted)
    discrepancy = operator_norm(V - check)
    if discrepancy > 1e-10 * max(1.0, operator_norm(V)):
        logger.warning(f"余生成元两种算法偏差 {discrepancy:.3e}")
    return V


def cogenerator_series(Q, n: int) -> np.ndarray:
    """n 阶幂零 Q 的余生成元闭式：-I - 2Q(I + Q + ... + Q^{n-2})"""
    if n < 2:
        raise ValueError("幂零阶数 n 至少为 2")
    powers = matrix_powers(Q, n - 2)
    partial = sum(powers[1:], powers[0].copy())
    return -powers[0] - 2 * as_matrix(Q) @ partial


def generator_condition(A, m: int, x) -> complex:
    """sum_k C(m,k) <A^{m-k} x, A^k x>（不带交错符号）"""
    if m < 1:
        raise ValueError(f"阶数 m 至少为 1，收到 m={m}")
    A = as_matrix(A)
    x = as_vector(x, A.shape[0])
    images = [P @ x for P in matrix_powers(A, m)]
    return complex(sum(binom(m, k) * np.vdot(images[k], images[m - k]) for k in range(m + 1)))


def generator_condition_operator(A, m: int) -> np.ndarray:
    """sum_k C(m,k) (A^k)* A^{m-k}，Hermitian"""
    if m < 1:
        raise ValueError(f"阶数 m 至少为 1，收到 m={m}")
    powers = matrix_powers(A, m)
    C = np.zeros(powers[0].shape, dtype=complex)
    for k in range(m + 1):
        C += binom(m, k) * (powers[k].conj().T @ powers[m - k])
    return (C + C.conj().T) / 2


class CayleyIdentity(NamedTuple):
    lhs: complex
    rhs: float
    scale: float

    @property
    def discrepancy(self) -> float:
        """|lhs - rhs| / scale"""
        if self.scale == 0:
            return abs(self.lhs - self.rhs)
        return abs(self.lhs - self.rhs) / self.scale


def cayley_identity(A, m: int, x) -> CayleyIdentity:
    """
    生成元条件与余生成元缺陷的恒等式两侧：

        2^m sum_k C(m,k) <A^{m-k}x, A^k x>
            = sum_k (-1)^{m-k} C(m,k) ||(A+I)^k (A-I)^{m-k} x||^2
    """
    A = as_matrix(A)
    x = as_vector(x, A.shape[0])
    identity = np.eye(A.shape[0], dtype=complex)
    plus = matrix_powers(A + identity, m)
    minus = matrix_powers(A - identity, m)
    terms = []
    for k in range(m + 1):
        y = plus[k] @ (minus[m - k] @ x)
        terms.append(binom(m, k) * (-1) ** (m - k) * float(np.vdot(y, y).real))
    lhs = 2 ** m * generator_condition(A, m, x)
    return CayleyIdentity(lhs=lhs, rhs=float(sum(terms)), scale=float(sum(abs(term) for term in terms)))


def _trajectory(t_grid: np.ndarray, evolutions, x: np.ndarray) -> TrajectorySample:
    values = []
    for T in evolutions:
        y = T @ x
        values.append(float(np.vdot(y, y).real))
    return TrajectorySample(t_grid=t_grid, values=values, x=x)


def sample_trajectory(G: GeneratorSemigroup, x, t_max: float, n: int) -> TrajectorySample:
    """
    在 t_i = i * t_max / (n - 1) 上采样 ||T(t_i) x||^2。

    Raises:
        ValueError: t_max <= 0 或 n < 4
    """
    if t_max <= 0:
        raise ValueError("t_max 必须为正")
    if n < 4:
        raise ValueError(f"采样点数至少为 4，收到 {n}")
    G = _as_semigroup(G)
    t_grid = np.linspace(0.0, t_max, n)
    return _trajectory(t_grid, [G.evolve(float(t)) for t in t_grid], as_vector(x, G.dim))


def difference_residual(values, order: int) -> float:
    """order 阶差分的最大模，相对 max|values|"""
    values = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    if order >= len(values) or scale == 0:
        return 0.0
    return float(np.max(np.abs(np.diff(values, n=order)))) / scale


def polynomial_degree(sample: TrajectorySample, d_max: int, tol: float) -> Optional[int]:
    """
    最小的 d <= d_max，使 (d+1) 阶差分在 tol * max|values| 内为零；没有则返回 None。

    均匀网格上的有限差分对多项式是精确的，不需要 Vandermonde 拟合。

    Raises:
        ValueError: 采样长度小于 d_max + 2
    """
    if d_max < 0:
        raise ValueError("d_max 必须非负")
    if len(sample.values) < d_max + 2:
        raise ValueError(f"采样长度 {len(sample.values)} 小于 d_max + 2 = {d_max + 2}")
    for d in range(d_max + 1):
        if difference_residual(sample.values, d + 1) <= tol:
            return d
    return None


def probe_vectors(dim: int):
    """基向量 e_i，以及极化向量 e_i + e_j 与 e_i + i e_j（i < j）"""
    basis = np.eye(dim, dtype=complex)
    for i in range(dim):
        yield basis[i]
    for i in range(dim):
        for j in range(i + 1, dim):
            yield basis[i] + basis[j]
            yield basis[i] + 1j * basis[j]


def _condition_i(evolutions, m: int, tol: float) -> ConditionVerdict:
    worst, worst_T = 0.0, None
    for T in evolutions[1:]:
        residual = relative_defect(T, m)
        if residual > worst:
            worst, worst_T = residual, T
    if worst <= tol:
        return ConditionVerdict(passed=True, residual=worst)
    witness = top_eigenvector(misometry_defect_operator(worst_T, m))
    return ConditionVerdict(passed=False, residual=worst, witness=witness)


def _condition_ii(t_grid, evolutions, m: int, tol: float) -> ConditionVerdict:
    worst, witness = 0.0, None
    for x in probe_vectors(evolutions[0].shape[0]):
        sample = _trajectory(t_grid, evolutions, x)
        residual = difference_residual(sample.values, m)
        if polynomial_degree(sample, m - 1, tol) is None and witness is None:
            witness = x / np.linalg.norm(x)
        worst = max(worst, residual)
    return ConditionVerdict(passed=witness is None, residual=worst, witness=witness)


def _condition_iii(A: np.ndarray, m: int, tol: float) -> ConditionVerdict:
    C = generator_condition_operator(A, m)
    residual = operator_norm(C) / max(1.0, (2 * operator_norm(A)) ** m)
    if residual <= tol:
        return ConditionVerdict(passed=True, residual=residual)
    return ConditionVerdict(passed=False, residual=residual, witness=top_eigenvector(C))


def _condition_iv(A: np.ndarray, m: int, cfg: ProbeConfig) -> ConditionVerdict:
    V = cogenerator(A, cfg.TOL_LINEAR)
    D = misometry_defect_operator(V, m)
    residual = operator_norm(D) / defect_scale(V, m)
    if residual <= cfg.TOL_VERDICT:
        return ConditionVerdict(passed=True, residual=residual)
    return ConditionVerdict(passed=False, residual=residual, witness=top_eigenvector(D))


def check_semigroup_m_isometry(G: GeneratorLike, m: int, cfg: ProbeConfig = settings) -> SemigroupConditions:
    """
    m-等距半群的四个等价条件：

        (i)   T(t) 在时间网格上每点都是 m-等距
        (ii)  t -> ||T(t)x||^2 是次数 < m 的多项式（基向量与极化向量）
        (iii) sum_k C(m,k) (A^k)* A^{m-k} = 0
        (iv)  余生成元 V 是 m-等距

    Raises:
        ResolventViolation: 1 属于 A 的谱，条件 (iv) 无定义
    """
    if m < 1:
        raise ValueError(f"阶数 m 至少为 1，收到 m={m}")
    G = _as_semigroup(G)
    t_grid = np.linspace(0.0, cfg.T_MAX, cfg.POINTS)
    evolutions = [G.evolve(float(t)) for t in t_grid]
    conditions = SemigroupConditions(
        m=m,
        cond_i=_condition_i(evolutions, m, cfg.TOL_VERDICT),
        cond_ii=_condition_ii(t_grid, evolutions, m, cfg.TOL_VERDICT),
        cond_iii=_condition_iii(G.A, m, cfg.TOL_VERDICT),
        cond_iv=_condition_iv(G.A, m, cfg),
    )
    if not conditions.agree:
        logger.warning(f"m={m} 时四个条件判定不一致: {conditions.verdicts}")
    logger.info(f"m={m} 半群判定: {conditions.verdicts}")
    return conditions


def semigroup_order(G: GeneratorLike, m_max: int, cfg: ProbeConfig = settings) -> Optional[int]:
    """四个条件全部成立的最小 m"""
    G = _as_semigroup(G)
    for m in range(1, m_max + 1):
        if check_semigroup_m_isometry(G, m, cfg).all_pass:
            return m
    return None


def nilpotent_generator(n: int, dim: int) -> GeneratorSemigroup:
    """
    n 阶幂零 Jordan 块（上对角线为 1）嵌入 dim x dim，其余为零。
    生成严格 (2n-1)-等距半群。

    Raises:
        ValueError: n < 2 或 n > dim
    """
    if n < 2:
        raise ValueError(f"幂零阶数 n 至少为 2，收到 n={n}")
    if n > dim:
        raise ValueError(f"幂零阶数 n={n} 超过维数 dim={dim}")
    A = np.zeros((dim, dim), dtype=complex)
    for i in range(n - 1):
        A[i, i + 1] = 1
    return GeneratorSemigroup(A)


def msymmetric_generator(B) -> GeneratorSemigroup:
    """B 为 m-对称时，iB 生成 m-等距半群（由调用方保证 B 的 m-对称性）"""
    return GeneratorSemigroup(1j * as_matrix(B))


def interval_test(G: GeneratorLike, m: int, t1: float, t2: float, n: int, tol: float) -> bool:
    """
    [t1, t2] 上 n 个等距时间点处 T(t) 是否都是 m-等距。

    Raises:
        ValueError: 不满足 0 <= t1 < t2 或 n < 2
    """
    if not 0 <= t1 < t2:
        raise ValueError(f"需要 0 <= t1 < t2，收到 [{t1}, {t2}]")
    if n < 2:
        raise ValueError("区间采样点数至少为 2")
    G = _as_semigroup(G)
    return all(relative_defect(G.evolve(float(t)), m) <= tol for t in np.linspace(t1, t2, n))


def group_two_point_test(
    G: GeneratorLike, m: int, t1: float, t2: float, tol: float, grid_points: int = 65
) -> GroupTestReport:
    """
    群 {T(t)} 在 t1、t2 两点以及对称网格 [-(t1+t2), t1+t2] 上的 m-等距判定。

    t1/t2 是否为无理数由调用方保证，浮点数无法验证。
    """
    if t1 <= 0 or t2 <= 0:
        raise ValueError("t1 与 t2 必须为正")
    G = _as_semigroup(G)
    reach = t1 + t2
    pass_grid = all(
        relative_defect(G.evolve(float(t)), m) <= tol for t in np.linspace(-reach, reach, grid_points)
    )
    return GroupTestReport(
        pass_t1=relative_defect(G.evolve(t1), m) <= tol,
        pass_t2=relative_defect(G.evolve(t2), m) <= tol,
        pass_grid=pass_grid,
    )
