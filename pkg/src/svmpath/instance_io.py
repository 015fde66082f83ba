"""Line-oriented exact instance files.

UTF-8 text, '#' starts a comment, header lines are `key value`, and each point
row is a class label (+1 or -1) followed by d coordinates written as
numerator/denominator tokens. Serialization and parsing round-trip bit-exactly;
constructed instances keep their cube parameters, stretch factor and
calibration in the header, and point rows appear in canonical facet order so
labels are positional.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .construct import (
    MINUS_LABELS,
    Calibration,
    StretchFactor,
    SvmInstance,
    build_instance,
    generate_2d_arc_instance,
)
from .geometry import Vec
from .goldfarb import GoldfarbParams


class InstanceFormatError(Exception):
    """The instance file does not parse or is internally inconsistent."""


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"bad rational token {token!r}") from exc


def serialize_instance(instance: SvmInstance) -> str:
    lines = ["# svmpath instance file"]
    if instance.params is not None:
        p, s, c = instance.params, instance.stretch, instance.calibration
        lines += [
            "kind goldfarb",
            f"d {p.dim}",
            f"eps {format_rational(p.eps)}",
            f"gamma {format_rational(p.gamma)}",
            f"L {format_rational(s.factor)}",
            f"mu_bar {format_rational(c.mu_bar)}",
            f"q_min {format_rational(c.q_min)}",
            f"q_max {format_rational(c.q_max)}",
        ]
    else:
        lines += [
            "kind arc",
            f"d {instance.dim}",
            f"n_plus {len(instance.plus_points)}",
        ]
    for pt in instance.plus_points:
        lines.append("+1 " + " ".join(format_rational(c) for c in pt))
    for pt in instance.minus_points:
        lines.append("-1 " + " ".join(format_rational(c) for c in pt))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> SvmInstance:
    header = {}
    plus_rows = []
    minus_rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] in ("+1", "-1"):
            target = plus_rows if tokens[0] == "+1" else minus_rows
            target.append(Vec(parse_rational(t) for t in tokens[1:]))
        elif len(tokens) == 2:
            header[tokens[0]] = tokens[1]
        else:
            raise InstanceFormatError(f"line {lineno}: cannot parse {raw!r}")

    kind = header.get("kind", "goldfarb")
    try:
        dim = int(header["d"])
    except (KeyError, ValueError) as exc:
        raise InstanceFormatError("missing or bad 'd' header") from exc
    for row in plus_rows + minus_rows:
        if len(row) != dim:
            raise InstanceFormatError(f"point row has {len(row)} coordinates, expected {dim}")
    if len(minus_rows) != 2:
        raise InstanceFormatError(f"expected exactly 2 points labeled -1, got {len(minus_rows)}")

    if kind == "arc":
        return SvmInstance(
            plus_points=tuple(plus_rows),
            plus_labels=tuple(range(len(plus_rows))),
            minus_points=tuple(minus_rows),
        )
    if kind != "goldfarb":
        raise InstanceFormatError(f"unknown instance kind {kind!r}")

    try:
        params = GoldfarbParams(
            dim, parse_rational(header["eps"]), parse_rational(header["gamma"])
        )
        stretch_factor = StretchFactor(parse_rational(header["L"]))
        mu_bar = parse_rational(header["mu_bar"])
        q_min = parse_rational(header["q_min"])
        q_max = parse_rational(header["q_max"])
    except KeyError as exc:
        raise InstanceFormatError(f"missing header key {exc}") from exc
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc
    if len(plus_rows) != 2 * dim:
        raise InstanceFormatError(f"expected {2 * dim} points labeled +1, got {len(plus_rows)}")
    try:
        calibration = Calibration(mu_bar, q_min, q_max, minus_rows[0], minus_rows[1])
    except ValueError as exc:
        raise InstanceFormatError(f"inconsistent calibration header: {exc}") from exc
    labels = tuple((k, s) for k in range(1, dim + 1) for s in (-1, 1))
    return SvmInstance(
        plus_points=tuple(plus_rows),
        plus_labels=labels,
        minus_points=tuple(minus_rows),
        params=params,
        stretch=stretch_factor,
        calibration=calibration,
    )


def write_instance(instance: SvmInstance, path) -> None:
    Path(path).write_text(serialize_instance(instance), encoding="utf-8")


def read_instance(path) -> SvmInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def regenerate(instance: SvmInstance) -> SvmInstance:
    """Rebuild the instance from its own header data (tamper detection)."""
    if instance.params is not None:
        return build_instance(instance.params, instance.stretch)
    return generate_2d_arc_instance(len(instance.plus_points))
