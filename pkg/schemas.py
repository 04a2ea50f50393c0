import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator


def complex_payload(array) -> Optional[list]:
    """复数数组 -> JSON 友好的 [re, im] 嵌套列表"""
    if array is None:
        return None
    a = np.asarray(array, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [complex_payload(row) for row in a]


def _frozen_array(value, dtype) -> np.ndarray:
    a = np.array(value, dtype=dtype)
    a.setflags(write=False)
    return a


class ArrayModel(BaseModel):
    """携带 numpy 数组的不可变记录"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ---------------------------------------------------------------- matrix_core

class Subspace(ArrayModel):
    """以正交规范列向量表示的子空间（如 Ker T*）"""
    basis: np.ndarray

    @field_validator("basis", mode="before")
    @classmethod
    def validate_basis(cls, v):
        a = _frozen_array(v, complex)
        if a.ndim != 2:
            raise ValueError("子空间基必须是二维数组（列为基向量）")
        if a.shape[1]:
            gram = a.conj().T @ a
            if np.max(np.abs(gram - np.eye(a.shape[1]))) > 1e-12 * max(1, a.shape[0]):
                raise ValueError("子空间基不是正交规范的")
        return a

    @property
    def dimension(self) -> int:
        return int(self.basis.shape[1])

    @property
    def ambient_dimension(self) -> int:
        return int(self.basis.shape[0])


# ---------------------------------------------------------------- isometry

class DefectReport(ArrayModel):
    """m-等距缺陷探测结果"""
    order_tested: int = Field(ge=1)
    defect_norm: float = Field(ge=0)
    scale: float = Field(ge=1)
    tolerance: float = Field(gt=0)
    verdict: bool
    witness: Optional[np.ndarray] = None
    per_order_table: List[Tuple[int, float]] = []

    @field_validator("witness", mode="before")
    @classmethod
    def validate_witness(cls, v):
        return None if v is None else _frozen_array(v, complex)

    @model_validator(mode="after")
    def check_witness_matches_verdict(self):
        if self.verdict != (self.defect_norm <= self.tolerance * self.scale):
            raise ValueError("verdict 与 defect_norm <= tol*scale 不一致")
        if self.verdict and self.witness is not None:
            raise ValueError("判定通过时不应给出见证向量")
        if not self.verdict and self.witness is None:
            raise ValueError("判定失败时必须给出见证向量")
        return self

    @property
    def relative_defect(self) -> float:
        return self.defect_norm / self.scale

    @field_serializer("witness")
    def serialize_witness(self, witness):
        return complex_payload(witness)


class EmbeddabilityReport(ArrayModel):
    """有限维算子能否嵌入 C0-(半)群"""
    embeddable: bool
    ker_dim: int = Field(ge=0)
    coker_dim: int = Field(ge=0)
    smallest_singular_value: float
    is_normal: bool
    spectrum_on_unit_circle: bool
    branch_cut: bool = False
    generator: Optional[np.ndarray] = None

    @field_validator("generator", mode="before")
    @classmethod
    def validate_generator(cls, v):
        return None if v is None else _frozen_array(v, complex)

    @field_serializer("generator")
    def serialize_generator(self, generator):
        return complex_payload(generator)


class PowerPairReport(BaseModel):
    """T^r 与 T^{r+1} 为 m-等距时 T 亦为 m-等距"""
    r: int
    m: int
    pass_r: bool
    pass_r_plus_1: bool
    pass_base: bool


# ---------------------------------------------------------------- semigroup

class BoundReport(BaseModel):
    spectral_bound: float
    growth_estimate: float
    t_probe: float

    @property
    def contract_holds(self) -> bool:
        """s(A) <= w0"""
        return self.spectral_bound <= self.growth_estimate + 1e-8


class TrajectorySample(ArrayModel):
    """t -> ||T(t)x||^2 在均匀网格上的采样"""
    t_grid: np.ndarray
    values: np.ndarray
    x: np.ndarray

    @field_validator("t_grid", "values", mode="before")
    @classmethod
    def validate_real(cls, v):
        a = _frozen_array(v, float)
        if a.ndim != 1:
            raise ValueError("采样必须是一维数组")
        return a

    @field_validator("x", mode="before")
    @classmethod
    def validate_x(cls, v):
        return _frozen_array(v, complex)

    @model_validator(mode="after")
    def check_grid(self):
        if len(self.t_grid) != len(self.values):
            raise ValueError("时间网格与采样值长度不一致")
        if np.any(self.values < 0):
            raise ValueError("范数平方不能为负")
        if len(self.t_grid) >= 2:
            steps = np.diff(self.t_grid)
            if np.any(steps <= 0):
                raise ValueError("时间网格必须严格递增")
            if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
                raise ValueError("时间网格必须均匀")
        return self

    @property
    def step(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])


class ConditionVerdict(ArrayModel):
    passed: bool
    residual: float
    witness: Optional[np.ndarray] = None

    @field_validator("witness", mode="before")
    @classmethod
    def validate_witness(cls, v):
        return None if v is None else _frozen_array(v, complex)

    @model_validator(mode="after")
    def check_witness(self):
        if self.passed and self.witness is not None:
            raise ValueError("条件成立时不应给出见证向量")
        return self

    @field_serializer("witness")
    def serialize_witness(self, witness):
        return complex_payload(witness)


class SemigroupConditions(BaseModel):
    """四个等价条件 (i)-(iv) 的判定"""
    m: int
    cond_i: ConditionVerdict  # T(t) 对网格上每个 t 都是 m-等距
    cond_ii: ConditionVerdict  # ||T(t)x||^2 是次数 < m 的多项式
    cond_iii: ConditionVerdict  # 生成元恒等式
    cond_iv: ConditionVerdict  # 余生成元是 m-等距

    @property
    def verdicts(self) -> Tuple[bool, bool, bool, bool]:
        return (self.cond_i.passed, self.cond_ii.passed, self.cond_iii.passed, self.cond_iv.passed)

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts)) == 1

    @property
    def all_pass(self) -> bool:
        return all(self.verdicts)


class GroupTestReport(BaseModel):
    pass_t1: bool
    pass_t2: bool
    pass_grid: bool


# ---------------------------------------------------------------- translation

class WeightedGrid(ArrayModel):
    """均匀网格 s_i = i*h 上的正权重序列"""
    h: float = Field(gt=0)
    weights: np.ndarray
    label: Optional[str] = None

    @field_validator("weights", mode="before")
    @classmethod
    def validate_weights(cls, v):
        a = _frozen_array(v, float)
        if a.ndim != 1 or len(a) < 4:
            raise ValueError("权重必须是长度至少为 4 的一维数组")
        if not np.all(np.isfinite(a)):
            raise ValueError("权重必须是有限数")
        if np.any(a <= 0):
            raise ValueError("权重必须严格为正")
        return a

    @property
    def N(self) -> int:
        return len(self.weights)

    @property
    def horizon(self) -> float:
        return self.N * self.h

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.N) * self.h

    def unweighted(self) -> "WeightedGrid":
        return WeightedGrid(h=self.h, weights=np.ones(self.N), label="unweighted")


class WeightedGridFunction(ArrayModel):
    grid: WeightedGrid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v):
        a = _frozen_array(v, complex)
        if a.ndim != 1:
            raise ValueError("格函数取值必须是一维数组")
        return a

    @model_validator(mode="after")
    def check_length(self):
        if len(self.values) != self.grid.N:
            raise ValueError(f"格函数长度 {len(self.values)} 与网格格子数 {self.grid.N} 不一致")
        return self

    def norm_squared(self) -> float:
        """h * sum |f_i|^2 * weight_i"""
        return float(self.grid.h * np.sum(np.abs(self.values) ** 2 * self.grid.weights))

    def inner(self, other: "WeightedGridFunction") -> complex:
        return complex(self.grid.h * np.sum(self.values * np.conj(other.values) * self.grid.weights))

    def with_values(self, values) -> "WeightedGridFunction":
        return WeightedGridFunction(grid=self.grid, values=values)


class WeightTestResult(BaseModel):
    mode: str
    m: int
    j: int
    passed: bool
    max_residual: float  # 原始残差 max|g_i|
    normalized_residual: float  # 扣除舍入底噪后按 (j*h)^m 归一化
    noise_floor: float
    window: Tuple[int, int]  # 内部窗口 [start, stop)


# ---------------------------------------------------------------- embedding

class OperatorWeightSequence(ArrayModel):
    """算子值权重 W_1, ..., W_L（d x d），超出部分重复最后一块"""
    blocks: List[np.ndarray]

    @field_validator("blocks", mode="before")
    @classmethod
    def validate_blocks(cls, v):
        blocks = [_frozen_array(b, complex) for b in v]
        if not blocks:
            raise ValueError("权重序列不能为空")
        for b in blocks:
            if b.ndim == 0:
                raise ValueError("权重块必须是方阵")
        d = blocks[0].shape
        for b in blocks:
            if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape != d:
                raise ValueError("所有权重块必须是同阶方阵")
            if not np.all(np.isfinite(b)):
                raise ValueError("权重块必须是有限数")
        return blocks

    @classmethod
    def from_scalars(cls, scalars) -> "OperatorWeightSequence":
        return cls(blocks=[np.array([[w]]) for w in scalars])

    @property
    def d(self) -> int:
        return int(self.blocks[0].shape[0])

    @property
    def L(self) -> int:
        return len(self.blocks)

    @property
    def uniform_bound(self) -> float:
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def block(self, n: int) -> np.ndarray:
        """W_n，下标从 1 开始"""
        if n < 1:
            raise ValueError("权重下标从 1 开始")
        return self.blocks[min(n, self.L) - 1]


class FiberGridFunction(ArrayModel):
    """L^2(R+, C^d) 上以 h = 1/q 为格宽的分片常值函数"""
    q: int = Field(ge=2)
    horizon: int = Field(ge=1)
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v):
        a = _frozen_array(v, complex)
        if a.ndim != 2:
            raise ValueError("纤维格函数取值的形状必须是 (格子数, d)")
        return a

    @model_validator(mode="after")
    def check_shape(self):
        if self.values.shape[0] != self.q * self.horizon:
            raise ValueError("格子数必须等于 q * horizon")
        return self

    @property
    def h(self) -> float:
        return 1.0 / self.q

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    @property
    def cells(self) -> int:
        return int(self.values.shape[0])

    @classmethod
    def from_sequence(cls, seq, q: int, horizon: int) -> "FiberGridFunction":
        """(f_1, f_2, ...) -> 在 [n-1, n) 上取常值 f_n 的阶梯函数"""
        seq = np.asarray(seq, dtype=complex)
        if seq.ndim == 1:
            seq = seq[:, None]
        if len(seq) > horizon:
            raise ValueError("序列长度超过单位区间个数")
        values = np.zeros((q * horizon, seq.shape[1]), dtype=complex)
        values[: len(seq) * q] = np.repeat(seq, q, axis=0)
        return cls(q=q, horizon=horizon, values=values)

    def to_sequence(self) -> np.ndarray:
        """每个单位区间上的平均值"""
        return self.values.reshape(self.horizon, self.q, self.d).mean(axis=1)

    def norm(self, cells: Optional[int] = None) -> float:
        v = self.values if cells is None else self.values[:cells]
        return float(math.sqrt(self.h * np.sum(np.abs(v) ** 2)))

    def with_values(self, values) -> "FiberGridFunction":
        return FiberGridFunction(q=self.q, horizon=self.horizon, values=values)


# ---------------------------------------------------------------- reports

class CheckResult(BaseModel):
    name: str
    passed: bool
    residual: Optional[float] = None
    informational: bool = False  # 仅供参考，不影响退出码
    details: Dict[str, Any] = {}

    @field_validator("residual")
    @classmethod
    def validate_residual(cls, v):
        if v is not None and not math.isfinite(v):
            raise ValueError("残差必须是有限数")
        return v


class ExperimentReport(BaseModel):
    schema_version: str = "1.0"
    command: List[str]
    config: Dict[str, Any]
    checks: List[CheckResult] = []
    generated_at: Optional[str] = None
    duration_seconds: Optional[float] = None

    @property
    def all_pass(self) -> bool:
        return all(check.passed for check in self.checks if not check.informational)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_pass else 1
