# commands/translation.py
"""translation：权重族在某种平移模式下的 m-等距检验与残差轮廓"""
from pathlib import Path

import numpy as np
import pandas as pd

from commands.common import CommandResult, check, frame_to_csv, write_text
from config import ProbeConfig
from services.translation import (
    FAMILIES,
    MODES,
    admissible_left,
    admissible_right,
    grid_from_csv,
    named_grid,
    residual_profile,
    weight_order,
    weight_test,
)

NAME = "translation"


def add_parser(subparsers, parents):
    parser = subparsers.add_parser(NAME, parents=parents, help="加权平移半群的权重检验")
    parser.add_argument("--family", required=True, help=f"具名权重族（{', '.join(FAMILIES)}）或 s,value CSV 路径")
    parser.add_argument("--mode", choices=MODES, default="right", help="平移模式")
    parser.add_argument("--m", type=int, required=True, help="阶数 m")
    parser.add_argument("--shift-cells", type=int, default=1, help="平移格数 j，t = j*h")
    parser.add_argument("--h", type=float, help="网格步长（默认取配置 GRID_H）")
    parser.add_argument("--cells", type=int, help="格子数（默认取配置 GRID_CELLS）")
    parser.add_argument("--csv-out", help="残差轮廓 g_i 的 CSV 输出路径")
    parser.set_defaults(handler=handle)
    return parser


def load_grid(family: str, config: ProbeConfig):
    if family in FAMILIES:
        return named_grid(family, config.GRID_H, config.GRID_CELLS)
    if Path(family).suffix.lower() == ".csv" or Path(family).exists():
        return grid_from_csv(family)
    raise ValueError(f"未知的权重族 {family}，也不是 CSV 文件")


def handle(args, config: ProbeConfig) -> CommandResult:
    grid = load_grid(args.family, config)
    tol = config.TOL_VERDICT
    result = weight_test(grid, args.m, args.shift_cells, tol, args.mode)
    order = weight_order(grid, args.mode, args.shift_cells, config.M_MAX, tol)
    admissible = admissible_left(grid, 1.0, 1.0) if args.mode == "left-adjoint" else admissible_right(grid, 1.0, 1.0)

    checks = [
        check(
            f"{args.mode} translation {args.m}-isometry",
            result.passed,
            result.normalized_residual,
            result=result.model_dump(),
        ),
        check("weight order", order is not None, informational=True, order=order),
        check("admissible (M=1, rate=1)", admissible, informational=True),
    ]

    if args.csv_out:
        g = residual_profile(grid, args.m, args.shift_cells, args.mode)
        index = np.arange(len(g))
        frame = pd.DataFrame({"i": index, "s": index * grid.h, "g": g})
        write_text(args.csv_out, frame_to_csv(frame))
    return CommandResult(checks)
