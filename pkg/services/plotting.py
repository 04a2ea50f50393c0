# services/plotting.py
"""
轨道 t -> ||T(t)x||^2 的 SVG 图。直接拼写 SVG 标记，坐标固定保留三位小数，
同样的输入产生逐字节相同的文件。
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

import numpy as np

from schemas import TrajectorySample

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 400
MARGIN = 48
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")

Trace = Tuple[str, TrajectorySample, Optional[int]]


def _polyline(sample: TrajectorySample, t_range, v_range, color: str) -> str:
    t0, t1 = t_range
    v0, v1 = v_range
    span_t = (t1 - t0) or 1.0
    span_v = (v1 - v0) or 1.0
    points = []
    for t, v in zip(sample.t_grid, sample.values):
        x = MARGIN + (t - t0) / span_t * (WIDTH - 2 * MARGIN)
        y = HEIGHT - MARGIN - (v - v0) / span_v * (HEIGHT - 2 * MARGIN)
        points.append(f"{x:.3f},{y:.3f}")
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(points)}"/>'


def render_trajectories(traces: Sequence[Trace], title: str = "") -> str:
    """
    多条轨道画在同一坐标系中，定出次数的轨道附 "degree N" 标注。

    Raises:
        ValueError: 没有轨道或某条采样为空
    """
    if not traces:
        raise ValueError("没有可画的轨道")
    for label, sample, _ in traces:
        if len(sample.values) == 0:
            raise ValueError(f"轨道 {label} 的采样为空")
    t_all = np.concatenate([sample.t_grid for _, sample, _ in traces])
    v_all = np.concatenate([sample.values for _, sample, _ in traces])
    t_range = (float(t_all.min()), float(t_all.max()))
    v_range = (min(0.0, float(v_all.min())), float(v_all.max()))

    parts: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="11">t = {t_range[0]:g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="11" text-anchor="end">'
        f"t = {t_range[1]:g}</text>",
        f'<text x="{MARGIN - 4}" y="{MARGIN}" font-size="11" text-anchor="end">{v_range[1]:.4g}</text>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2:.1f}" y="20" font-size="13" text-anchor="middle">{escape(title)}</text>')
    for index, (label, sample, degree) in enumerate(traces):
        color = COLORS[index % len(COLORS)]
        parts.append(_polyline(sample, t_range, v_range, color))
        annotation = label if degree is None else f"{label}: degree {degree}"
        y = MARGIN + 14 * (index + 1)
        parts.append(
            f'<text x="{WIDTH - MARGIN}" y="{y}" font-size="11" fill="{color}" text-anchor="end">'
            f"{escape(annotation)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_trajectories(traces: Sequence[Trace], out: Union[str, Path], title: str = "") -> Path:
    out = Path(out)
    out.write_text(render_trajectories(traces, title), encoding="utf-8")
    logger.info(f"轨道图已写入 {out}")
    return out


def plot_trajectory(sample: TrajectorySample, fitted_degree: Optional[int], out: Union[str, Path]) -> Path:
    """单条轨道；fitted_degree 给出时标注 "degree N" """
    return plot_trajectories([("x", sample, fitted_degree)], out)
