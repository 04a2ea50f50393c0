# commands/check_operator.py
"""check-operator：单个矩阵的 m-等距缺陷探测、核条件与可嵌入性"""
import pandas as pd

from commands.common import CommandResult, check, frame_to_csv, write_text
from config import ProbeConfig
from services.isometry import (
    defect_report,
    embeddability_report,
    isometry_order,
    kernel_condition_check,
    symmetry_order,
)
from services.matrix_core import as_matrix
from services.matrix_io import read_matrix

NAME = "check-operator"


def add_parser(subparsers, parents):
    parser = subparsers.add_parser(NAME, parents=parents, help="探测矩阵的 m-等距阶数")
    parser.add_argument("--matrix", required=True, help="矩阵文件")
    parser.add_argument("--m-max", type=int, help="探测阶数上限（默认取配置 M_MAX）")
    parser.add_argument("--m", type=int, help="只判定指定阶数，而不是探测最小阶数")
    parser.add_argument("--emit-table", metavar="PATH", help="把各阶缺陷表写成 CSV")
    parser.set_defaults(handler=handle)
    return parser


def handle(args, config: ProbeConfig) -> CommandResult:
    T = as_matrix(read_matrix(args.matrix))
    tol = config.TOL_VERDICT

    if args.m is not None:
        report = defect_report(T, args.m, tol, config.M_MAX)
        main_check = check(
            f"{args.m}-isometry",
            report.verdict,
            report.relative_defect,
            report=report.model_dump(mode="json"),
        )
    else:
        order = isometry_order(T, config.M_MAX, tol)
        report = defect_report(T, order or config.M_MAX, tol, config.M_MAX)
        main_check = check(
            "isometry order",
            order is not None,
            report.relative_defect,
            order=order,
            report=report.model_dump(mode="json"),
        )

    embedding = embeddability_report(T, config.TOL_LINEAR)
    sym_order = symmetry_order(T, config.M_MAX, tol)
    checks = [
        main_check,
        check("kernel condition", kernel_condition_check(T, tol, config.TOL_LINEAR), informational=True),
        check("embeddable", embedding.embeddable, informational=True, report=embedding.model_dump(mode="json")),
        check("symmetry order", sym_order is not None, informational=True, order=sym_order),
    ]

    if args.emit_table:
        frame = pd.DataFrame(report.per_order_table, columns=["m", "defect_norm"])
        write_text(args.emit_table, frame_to_csv(frame))
    return CommandResult(checks)
