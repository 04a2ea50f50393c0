from pathlib import Path
from typing import Optional, Union

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class ProbeConfig(BaseSettings):
    # 判定容差
    TOL_VERDICT: float = 1e-8  # 所有 m-等距 / 多项式判定的相对容差
    TOL_LINEAR: float = 1e-12  # 线性代数内部容差（核、奇异性）

    # 随机数
    SEED: int = 20240517  # 环境变量 MISO_SEED 可覆盖

    # 加权 L2(R+) 网格
    GRID_H: float = 1.0 / 64
    GRID_CELLS: int = 4096

    # 轨道采样
    T_MAX: float = 2.0
    POINTS: int = 33

    # 阶数探测上限
    M_MAX: int = 8

    # 算子值加权移位的嵌入网格
    EMBED_Q: int = 8  # 每个单位区间的格子数，h = 1/q
    EMBED_HORIZON: int = 8  # 单位区间个数 L

    LOG_LEVEL: str = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="MISO_",
        case_sensitive=False,
        extra="forbid",
    )

    @field_validator("TOL_VERDICT", "TOL_LINEAR", "GRID_H", "T_MAX")
    @classmethod
    def validate_positive(cls, v):
        if not v > 0:
            raise ValueError("容差、步长和时间上限必须为正数")
        return v

    @field_validator("M_MAX")
    @classmethod
    def validate_m_max(cls, v):
        if v < 1:
            raise ValueError("M_MAX 至少为 1")
        return v

    @field_validator("GRID_CELLS", "POINTS")
    @classmethod
    def validate_sample_count(cls, v):
        if v < 4:
            raise ValueError("网格格子数和采样点数至少为 4")
        return v

    @field_validator("EMBED_Q", "EMBED_HORIZON")
    @classmethod
    def validate_embedding_grid(cls, v):
        if v < 2:
            raise ValueError("嵌入网格的 q 和单位区间数至少为 2")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"未知的日志级别: {v}")
        return level


def load_config(config_file: Optional[Union[str, Path]] = None, **overrides) -> ProbeConfig:
    """
    构造探测配置。

    优先级（由高到低）：命令行覆盖值 > MISO_* 环境变量 > 配置文件 > 默认值。
    配置文件为 `MISO_KEY = value` 形式的 dotenv 文本。

    Raises:
        FileNotFoundError: 指定的配置文件不存在
    """
    values = {key: value for key, value in overrides.items() if value is not None}
    if config_file is None:
        return ProbeConfig(**values)
    path = Path(config_file)
    if not path.is_file():
        raise FileNotFoundError(f"配置文件不存在: {path}")
    return ProbeConfig(_env_file=str(path), **values)


settings = ProbeConfig()
