"""Sweep report emission (exact JSON, approximate CSV) and shadow figures.

JSON reports keep every rational exact as {"num": ..., "den": ...} string
pairs. The CSV export is a convenience view with decimal approximations and is
explicitly marked as such, carrying its precision in every row.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .goldfarb import GoldfarbParams, shadow_polygon
from .sweep import SweepReport


def rational_json(x) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rational_from_json(obj) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def _label_json(label):
    if isinstance(label, tuple):
        return list(label)
    return label


def sweep_report_json(report: SweepReport, meta: dict | None = None) -> dict:
    doc = {
        "exact": True,
        "bend_count": report.bend_count,
        "distinct_support_sets": report.distinct_support_sets,
        "lower_bound": report.lower_bound,
        "records": [
            {
                "mu": rational_json(r.mu),
                "objective": rational_json(r.objective),
                "support_plus": sorted((_label_json(l) for l in r.support_plus), key=str),
                "support_minus": sorted(r.support_minus),
            }
            for r in report.records
        ],
    }
    if meta:
        doc.update(meta)
    return doc


def write_sweep_report(report: SweepReport, path, meta: dict | None = None) -> None:
    Path(path).write_text(
        json.dumps(sweep_report_json(report, meta), indent=2) + "\n", encoding="utf-8"
    )


def _approx(x: Fraction, precision: int) -> str:
    return format(x.numerator / x.denominator, f".{precision}g")


def sweep_report_csv(report: SweepReport, precision: int = 12) -> str:
    """Decimal view of a sweep report; values are approximate by construction."""
    lines = [
        "# approximate decimal export; exact values live in the JSON report",
        "mu,objective,support_plus,support_minus,precision",
    ]
    for r in report.records:
        plus = " ".join(str(_label_json(l)).replace(",", ";") for l in sorted(r.support_plus, key=str))
        minus = " ".join(sorted(r.support_minus))
        lines.append(
            f"{_approx(r.mu, precision)},{_approx(r.objective, precision)},"
            f"{plus},{minus},{precision}"
        )
    return "\n".join(lines) + "\n"


def shadow_svg(params: GoldfarbParams, size: int = 800, digits: int = 12) -> str:
    """SVG 1.1 drawing of the shadow polygon, vertex count in the title.

    Coordinates are rendered as decimals with `digits` significant digits;
    this is display only, the polygon itself is computed exactly.
    """
    polygon = shadow_polygon(params)
    xs = [v[0] for v in polygon.vertices]
    ys = [v[1] for v in polygon.vertices]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y)
    margin = Fraction(1, 20)
    scale = Fraction(size) / (span * (1 + 2 * margin))

    def fmt(x: Fraction) -> str:
        return format(x.numerator / x.denominator, f".{digits}g")

    pts = []
    for v in polygon.vertices:
        sx = (v[0] - lo_x + span * margin) * scale
        sy = (hi_y - v[1] + span * margin) * scale  # flip: SVG y grows downward
        pts.append(f"{fmt(sx)},{fmt(sy)}")
    title = f"shadow polygon, d={params.dim}: {len(polygon)} vertices"
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">\n'
        f"  <title>{title}</title>\n"
        f'  <polygon points="{" ".join(pts)}" '
        f'fill="none" stroke="black" stroke-width="1"/>\n'
        f"</svg>\n"
    )


def write_shadow_svg(params: GoldfarbParams, path, **kwargs) -> None:
    Path(path).write_text(shadow_svg(params, **kwargs), encoding="utf-8")
