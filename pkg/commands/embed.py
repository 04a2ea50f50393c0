# commands/embed.py
"""embed：算子值加权移位的半群嵌入，检验半群律与 T(1) = S_W"""
import math
from pathlib import Path

import numpy as np

from commands.common import CommandResult, check
from config import ProbeConfig
from exceptions import MatrixFormatError
from schemas import OperatorWeightSequence
from services.embedding import (
    random_fiber_function,
    semigroup_law_residual,
    shift_matrix,
    strong_continuity_gap,
    verify_t1_matches_shift,
)
from services.matrix_core import adjoint, kernel
from services.matrix_io import read_matrix

NAME = "embed"


def add_parser(subparsers, parents):
    parser = subparsers.add_parser(NAME, parents=parents, help="把 S_W 嵌入 C0-半群并检验半群律")
    parser.add_argument("--weights", required=True, help="权重矩阵文件所在目录，或逗号分隔的标量权重")
    parser.add_argument("--t", type=float, required=True, help="时间 t（1/q 的整数倍）")
    parser.add_argument("--t-prime", type=float, required=True, help="时间 t'（1/q 的整数倍）")
    parser.add_argument("--q", type=int, help="每个单位区间的格子数（默认取配置 EMBED_Q）")
    parser.add_argument("--horizon", type=int, help="单位区间个数（默认取配置 EMBED_HORIZON）")
    parser.add_argument("--verify-t1", action="store_true", help="同时检验 T(1) 与 S_W 一致")
    parser.set_defaults(handler=handle)
    return parser


def load_weights(source: str) -> OperatorWeightSequence:
    """
    目录：按文件名排序读取其中的 *.mat；否则按逗号分隔的标量解析。

    Raises:
        MatrixFormatError: 目录中没有矩阵文件或标量无法解析
    """
    path = Path(source)
    if path.is_dir():
        files = sorted(path.glob("*.mat"))
        if not files:
            raise MatrixFormatError(f"{path}: 目录中没有 .mat 权重文件")
        return OperatorWeightSequence(blocks=[read_matrix(file) for file in files])
    try:
        scalars = [complex(token.strip()) for token in source.split(",") if token.strip()]
    except ValueError:
        raise MatrixFormatError(f"无法解析权重列表 {source!r}")
    if not scalars:
        raise MatrixFormatError("权重列表为空")
    return OperatorWeightSequence.from_scalars(scalars)


def handle(args, config: ProbeConfig) -> CommandResult:
    W = load_weights(args.weights)
    q, horizon = config.EMBED_Q, config.EMBED_HORIZON
    rng = np.random.default_rng(config.SEED)
    F = random_fiber_function(rng, q, horizon, W.d)
    tol = config.TOL_VERDICT

    residual = semigroup_law_residual(W, args.t, args.t_prime, F)
    relative = residual / max(1.0, F.norm())
    checks = [
        check("semigroup law", relative <= tol, relative, t=args.t, t_prime=args.t_prime, q=q, horizon=horizon),
    ]

    if args.verify_t1:
        length = min(W.L, horizon - 1)
        seq = rng.standard_normal((length, W.d)) + 1j * rng.standard_normal((length, W.d))
        mismatch = verify_t1_matches_shift(W, seq, q, horizon) / max(1.0, float(np.linalg.norm(seq)))
        checks.append(check("T(1) matches S_W", mismatch <= tol, mismatch, length=length))

    S = shift_matrix(W, W.L)
    gap = strong_continuity_gap(W, F)
    checks.append(check("strong continuity gap", math.isfinite(gap), gap, informational=True))
    cokernel = kernel(adjoint(S), config.TOL_LINEAR).dimension
    checks.append(
        check(
            "dim Ker S_W*",
            cokernel == W.d,
            informational=True,
            dimension=cokernel,
            fiber_dimension=W.d,
            uniform_bound=W.uniform_bound,
        )
    )
    return CommandResult(checks)
