"""Deterministic JSON, CSV and SVG output.

JSON is written with sorted keys and complex numbers as ``[re, im]`` pairs;
floats use Python's shortest round-tripping repr, so identical inputs give
byte-identical files.  SVG is emitted by hand: a square viewport in
mathematical orientation (y up) with polylines and markers.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = ["to_jsonable", "dumps_json", "write_json", "write_csv", "SvgCanvas", "auto_view"]


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and complex numbers."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps_json(obj))
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                    for v in row])
    path = Path(path)
    path.write_text(buf.getvalue())
    return path


def auto_view(points: Sequence[complex], margin: float = 1.2, min_half: float = 1.0):
    """Square window ``(center, half_width)`` covering ``margin`` times the points' hull."""
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        return 0j, min_half
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    c = 0.5 * (lo + hi)
    half = 0.5 * max(hi.real - lo.real, hi.imag - lo.imag)
    return c, max(margin * half, min_half)


class SvgCanvas:
    """Square SVG with world window ``center +- half`` mapped to ``size`` pixels."""

    def __init__(self, center: complex, half: float, size: int = 640):
        self.center = complex(center)
        self.half = float(half)
        self.size = int(size)
        self._items: list[str] = []

    def _xy(self, z: complex) -> tuple[float, float]:
        s = self.size / (2 * self.half)
        x = (z.real - self.center.real + self.half) * s
        y = (self.center.imag + self.half - z.imag) * s
        return x, y

    def polyline(self, pts: Sequence[complex], stroke: str = "#1f4e9c", width: float = 1.2,
                 dash: str | None = None) -> None:
        # drop far samples so coordinates stay small; the clip path does the rest
        lim = 4 * self.half
        pts = [complex(z) for z in pts if abs(complex(z) - self.center) < lim]
        if len(pts) < 2:
            return
        coords = " ".join("{:.3f},{:.3f}".format(*self._xy(z)) for z in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self._items.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
                           f'stroke-width="{width}"{extra}/>')

    def marker(self, z: complex, color: str = "#c0392b", radius: float = 3.0) -> None:
        x, y = self._xy(complex(z))
        self._items.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius}" fill="{color}"/>')

    def text(self, z: complex, label: str, color: str = "#222") -> None:
        x, y = self._xy(complex(z))
        self._items.append(f'<text x="{x + 4:.3f}" y="{y - 4:.3f}" font-size="12" '
                           f'font-family="sans-serif" fill="{color}">{label}</text>')

    def axes(self) -> None:
        c, h = self.center, self.half
        self.polyline([complex(c.real - h, 0), complex(c.real + h, 0)], "#bbbbbb", 0.6)
        self.polyline([complex(0, c.imag - h), complex(0, c.imag + h)], "#bbbbbb", 0.6)

    def render(self, title: str = "") -> str:
        s = self.size
        head = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">',
            f"<title>{title}</title>",
            f'<defs><clipPath id="view"><rect x="0" y="0" width="{s}" height="{s}"/></clipPath></defs>',
            f'<rect x="0" y="0" width="{s}" height="{s}" fill="white"/>',
            '<g clip-path="url(#view)">',
        ]
        return "\n".join(head + self._items + ["</g>", "</svg>"]) + "\n"
