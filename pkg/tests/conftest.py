import numpy as np
import pytest

from config import ProbeConfig
from services.matrix_io import write_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def sweep_config():
    # 时间窗口拉长到 8，m=7 时 e^t 型轨道的有限差分仍高于容差
    return ProbeConfig(T_MAX=8.0, POINTS=33)


@pytest.fixture
def matrix_file(tmp_path):
    def write(name, M):
        return str(write_matrix(tmp_path / f"{name}.mat", np.asarray(M, dtype=complex)))

    return write
