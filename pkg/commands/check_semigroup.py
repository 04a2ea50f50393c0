# commands/check_semigroup.py
"""check-semigroup：生成元矩阵的四个等价条件，可选 SVG 轨道图"""
import numpy as np

from commands.common import CommandResult, check
from config import ProbeConfig
from services.matrix_io import read_matrix
from services.plotting import plot_trajectories
from services.semigroup import (
    GeneratorSemigroup,
    bound_report,
    check_semigroup_m_isometry,
    polynomial_degree,
    sample_trajectory,
)

NAME = "check-semigroup"


def add_parser(subparsers, parents):
    parser = subparsers.add_parser(NAME, parents=parents, help="检查 e^{tA} 是否为 m-等距半群")
    parser.add_argument("--generator", required=True, help="生成元矩阵文件")
    parser.add_argument("--m", type=int, required=True, help="阶数 m")
    parser.add_argument("--t-max", type=float, help="轨道采样的时间上限")
    parser.add_argument("--points", type=int, help="轨道采样点数")
    parser.add_argument("--plot", metavar="SVG", help="把各基向量的轨道画成 SVG")
    parser.set_defaults(handler=handle)
    return parser


def _condition_check(name: str, verdict):
    witness = None if verdict.witness is None else verdict.model_dump(mode="json")["witness"]
    return check(name, verdict.passed, verdict.residual, witness=witness)


def handle(args, config: ProbeConfig) -> CommandResult:
    G = GeneratorSemigroup(read_matrix(args.generator))
    conditions = check_semigroup_m_isometry(G, args.m, config)
    bounds = bound_report(G, config.T_MAX)

    checks = [
        _condition_check("cond_i", conditions.cond_i),
        _condition_check("cond_ii", conditions.cond_ii),
        _condition_check("cond_iii", conditions.cond_iii),
        _condition_check("cond_iv", conditions.cond_iv),
        check("conditions agree", conditions.agree, verdicts=list(conditions.verdicts)),
        check(
            "bound contract",
            bounds.contract_holds,
            informational=True,
            bounds=bounds.model_dump(),
        ),
    ]

    if args.plot:
        d_max = min(max(args.m, config.M_MAX), config.POINTS - 2)
        traces = []
        for index, x in enumerate(np.eye(G.dim, dtype=complex)):
            sample = sample_trajectory(G, x, config.T_MAX, config.POINTS)
            traces.append((f"e{index + 1}", sample, polynomial_degree(sample, d_max, config.TOL_VERDICT)))
        plot_trajectories(traces, args.plot, title=f"m = {args.m}")
    return CommandResult(checks)
