# services/corpus.py
"""
黄金语料：生成元矩阵、权重族 CSV 与算子权重序列，外加带 sha256 的 manifest.json。
固定种子下重复生成逐字节相同。
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Union

import numpy as np
from scipy.stats import unitary_group

from services.matrix_io import write_matrix, write_weight_csv
from services.semigroup import nilpotent_generator
from services.translation import FAMILIES

logger = logging.getLogger(__name__)

CORPUS_WEIGHT_FAMILIES = ("constant", "affine", "quadratic", "sqrt-affine", "exponential", "reciprocal-affine")
CORPUS_GRID_H = 1.0 / 64
CORPUS_GRID_CELLS = 256
CORPUS_SHIFT_LENGTH = 8


class CorpusGenerator(NamedTuple):
    name: str
    A: np.ndarray
    order: Optional[int]  # 最小的 m 使半群为 m-等距；非例子为 None


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    X = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (X + X.conj().T) / 4


def skew_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    """iH，生成酉群（1-等距）"""
    return 1j * random_hermitian(rng, dim)


def mixture_generator(rng: np.random.Generator, dim_h: int, n: int) -> np.ndarray:
    """U diag(iH, Q_n) U*，生成严格 (2n-1)-等距半群"""
    dim = dim_h + n
    A = np.zeros((dim, dim), dtype=complex)
    A[:dim_h, :dim_h] = skew_hermitian(rng, dim_h)
    A[dim_h:, dim_h:] = nilpotent_generator(n, n).A
    U = random_unitary(rng, dim)
    return U @ A @ U.conj().T


def non_example_generator(rng: np.random.Generator, dim: int) -> np.ndarray:
    """
    谱界 s(A) = 0.7 的正规生成元：一个特征值 0.7 + ib，其余实部在 [-1.5, -0.5]。
    对任何 m 都不生成 m-等距半群，且 1 不属于谱。
    """
    eigenvalues = np.empty(dim, dtype=complex)
    eigenvalues[0] = 0.7 + 1j * rng.uniform(0.5, 1.5)
    eigenvalues[1:] = -rng.uniform(0.5, 1.5, dim - 1) + 1j * rng.uniform(-1.5, 1.5, dim - 1)
    U = random_unitary(rng, dim)
    return U @ np.diag(eigenvalues) @ U.conj().T


def generator_corpus(seed: int) -> List[CorpusGenerator]:
    """幂零块 n=2..4、反 Hermitian、混合与非例子，共 22 个生成元"""
    rng = np.random.default_rng(seed)
    corpus = [CorpusGenerator(f"jordan{n}", nilpotent_generator(n, n).A, 2 * n - 1) for n in (2, 3, 4)]
    corpus.append(CorpusGenerator("jordan2_padded", nilpotent_generator(2, 3).A, 3))
    for index, dim in enumerate((1, 2, 2, 3, 4)):
        corpus.append(CorpusGenerator(f"skew_hermitian{index + 1}", skew_hermitian(rng, dim), 1))
    for index, (dim_h, n) in enumerate(((1, 2), (2, 2), (1, 3), (2, 3), (1, 2), (2, 2))):
        corpus.append(CorpusGenerator(f"mixture{index + 1}", mixture_generator(rng, dim_h, n), 2 * n - 1))
    for index, dim in enumerate((1, 2, 2, 3, 3, 3, 2)):
        corpus.append(CorpusGenerator(f"non_example{index + 1}", non_example_generator(rng, dim), None))
    return corpus


def weight_sequences(seed: int) -> Dict[str, List[np.ndarray]]:
    """标量 sqrt((n+1)/n)（内部 2-等距）与随机 2x2 块"""
    rng = np.random.default_rng(seed + 1)
    return {
        "sqrt_ratio": [np.array([[np.sqrt((n + 1) / n)]]) for n in range(1, CORPUS_SHIFT_LENGTH + 1)],
        "random2": [
            rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(CORPUS_SHIFT_LENGTH)
        ],
    }


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def generate_corpus(out_dir: Union[str, Path], seed: int) -> Path:
    """
    写出全部语料文件与 manifest.json，返回 manifest 路径。

    Raises:
        OSError: 目录不可写
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts: Dict[str, Dict[str, object]] = {}

    def record(path: Path, kind: str, **extra) -> None:
        artifacts[path.relative_to(out_dir).as_posix()] = {"kind": kind, "sha256": _sha256(path), **extra}

    generators_dir = out_dir / "generators"
    generators_dir.mkdir(exist_ok=True)
    for item in generator_corpus(seed):
        record(write_matrix(generators_dir / f"{item.name}.mat", item.A), "generator", order=item.order)

    weights_dir = out_dir / "weights"
    weights_dir.mkdir(exist_ok=True)
    s = np.arange(CORPUS_GRID_CELLS) * CORPUS_GRID_H
    for name in CORPUS_WEIGHT_FAMILIES:
        path = write_weight_csv(weights_dir / f"{name.replace('-', '_')}.csv", s, FAMILIES[name](s))
        record(path, "weight", family=name)

    for name, blocks in weight_sequences(seed).items():
        sequence_dir = out_dir / "shifts" / name
        sequence_dir.mkdir(parents=True, exist_ok=True)
        for n, block in enumerate(blocks, start=1):
            record(write_matrix(sequence_dir / f"W{n:02d}.mat", block), "shift-weight", sequence=name, index=n)

    manifest = out_dir / "manifest.json"
    manifest.write_text(
        json.dumps({"seed": seed, "artifacts": artifacts}, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.info(f"语料已写入 {out_dir}: {len(artifacts)} 个文件")
    return manifest
