# services/combinat.py
"""
精确整数组合学：带零约定的二项式系数，以及余生成元定理证明中用到的两个组合恒等式。

所有求和都用 Python 任意精度整数完成，禁止浮点。枚举顺序固定为 k 在外层、i/j 在内层，
便于逐项轨迹复现。
"""
import logging
import math
from functools import lru_cache
from typing import Iterator, List, NamedTuple

logger = logging.getLogger(__name__)


class LemmaRow(NamedTuple):
    m: int
    p: int
    q: int
    value: int
    expected: int

    @property
    def passed(self) -> bool:
        return self.value == self.expected


def binom(m: int, k: int) -> int:
    """
    二项式系数 C(m, k)，约定 k < 0 或 k > m 时为 0。

    Raises:
        ValueError: m < 0
    """
    if m < 0:
        raise ValueError(f"二项式系数要求 m >= 0，收到 m={m}")
    if k < 0 or k > m:
        return 0
    return math.comb(m, k)


def _check_index(name: str, value: int, m: int) -> None:
    if m < 0:
        raise ValueError(f"m 必须非负，收到 m={m}")
    if not 0 <= value <= m:
        raise ValueError(f"{name}={value} 不在 [0, {m}] 内")


@lru_cache(maxsize=None)
def inner_sum(m: int, k: int, p: int) -> int:
    """sum_{i=0}^{p} C(m-k, i) C(k, p-i) (-1)^i，即 (1+x)^k (1-x)^{m-k} 中 x^p 的系数"""
    return sum(binom(m - k, i) * binom(k, p - i) * (-1) ** i for i in range(p + 1))


def offdiag_terms(m: int, p: int, q: int) -> Iterator[int]:
    """按 k = 0..m 依次产出非对角和的各项"""
    for k in range(m + 1):
        yield binom(m, k) * (-1) ** (m - k) * inner_sum(m, k, p) * inner_sum(m, k, q)


def lemma_offdiag_sum(m: int, p: int, q: int) -> int:
    """
    sum_k C(m,k) (-1)^{m-k} {sum_i C(m-k,i) C(k,p-i) (-1)^i} {sum_j C(m-k,j) C(k,q-j) (-1)^j}

    p + q != m 时恒为 0。

    Raises:
        ValueError: p 或 q 不在 [0, m] 内
    """
    _check_index("p", p, m)
    _check_index("q", q, m)
    return sum(offdiag_terms(m, p, q))


def lemma_diag_sum(m: int, q: int) -> int:
    """
    sum_k C(m,k) {sum_i C(m-k,i) C(k,q-i) (-1)^i}^2，恒等于 2^m C(m,q)。

    Raises:
        ValueError: q 不在 [0, m] 内
    """
    _check_index("q", q, m)
    return sum(binom(m, k) * inner_sum(m, k, q) ** 2 for k in range(m + 1))


def lemma_table(m_max: int, m_min: int = 1) -> List[LemmaRow]:
    """
    对 m_min <= m <= m_max 与全部 0 <= p, q <= m 逐行验证两个恒等式。

    p + q != m 的行期望值为 0；p + q == m 的行取对角和，期望值为 2^m C(m, q)。
    """
    if m_max < m_min:
        raise ValueError(f"m_max={m_max} 小于 m_min={m_min}")
    if m_min < 0:
        raise ValueError("m_min 必须非负")
    rows: List[LemmaRow] = []
    for m in range(m_min, m_max + 1):
        for p in range(m + 1):
            for q in range(m + 1):
                if p + q == m:
                    rows.append(LemmaRow(m, p, q, lemma_diag_sum(m, q), 2 ** m * binom(m, q)))
                else:
                    rows.append(LemmaRow(m, p, q, lemma_offdiag_sum(m, p, q), 0))
    failures = sum(1 for row in rows if not row.passed)
    logger.info(f"组合恒等式验证完成: m <= {m_max}, 共 {len(rows)} 行, 失败 {failures} 行")
    return rows
