# commands/lemma.py
"""lemma-verify：逐行验证两个组合恒等式"""
from itertools import groupby

import pandas as pd

from commands.common import CommandResult, check, frame_to_csv, write_text
from config import ProbeConfig
from services.combinat import lemma_table

NAME = "lemma-verify"


def add_parser(subparsers, parents):
    parser = subparsers.add_parser(NAME, parents=parents, help="验证组合恒等式并输出 CSV")
    parser.add_argument("--m-max", type=int, help="验证到的最大 m（默认取配置 M_MAX）")
    parser.add_argument("--csv-out", help="CSV 输出路径；缺省时 CSV 写到标准输出")
    parser.set_defaults(handler=handle)
    return parser


def handle(args, config: ProbeConfig) -> CommandResult:
    rows = lemma_table(config.M_MAX)
    frame = pd.DataFrame(
        {
            "m": [row.m for row in rows],
            "p": [row.p for row in rows],
            "q": [row.q for row in rows],
            "value": pd.Series([row.value for row in rows], dtype=object),
            "expected": pd.Series([row.expected for row in rows], dtype=object),
            "pass": [row.passed for row in rows],
        }
    )
    checks = []
    for m, group in groupby(rows, key=lambda row: row.m):
        group = list(group)
        failures = [f"{row.p},{row.q}" for row in group if not row.passed]
        checks.append(check(f"lemma m={m}", not failures, rows=len(group), failures=failures))

    csv_text = frame_to_csv(frame)
    if args.csv_out is not None:
        write_text(args.csv_out, csv_text)
        return CommandResult(checks)
    return CommandResult(checks, stdout=csv_text)
