"""Configuration files, report serialisation and SVG rendering."""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Configuration, DomainError, Region, UnitSquare, area, perimeter, union

SIG_DIGITS = 12
SVG_SCALE = 100.0
SVG_MARGIN = 1.0


class ConfigError(ValueError):
    """Malformed configuration document; the message names the line or field."""


def fmt(x: float) -> str:
    return format(x, f".{SIG_DIGITS}g")


def _round(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(fmt(x))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_report(obj) -> str:
    """JSON with every real rounded to 12 significant digits and sorted keys,
    so equal inputs give byte-identical output."""
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def config_to_dict(c: Configuration) -> dict:
    return {
        "oriented": c.oriented,
        "label": c.label,
        "squares": [{"cx": s.cx, "cy": s.cy, "theta": s.theta} for s in c.squares],
    }


def dumps_config(c: Configuration) -> str:
    # full precision: configurations must round-trip exactly
    return json.dumps(config_to_dict(c), indent=2) + "\n"


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {json.dumps(value)}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    return float(value)


def config_from_dict(doc, source: str = "<config>") -> Configuration:
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: top level must be an object")
    unknown = set(doc) - {"oriented", "label", "squares"}
    if unknown:
        raise ConfigError(f"{source}: unknown field(s) {sorted(unknown)}")
    oriented = doc.get("oriented", False)
    if not isinstance(oriented, bool):
        raise ConfigError(f"{source}: field 'oriented' must be true or false")
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise ConfigError(f"{source}: field 'label' must be a string")
    if "squares" not in doc:
        raise ConfigError(f"{source}: missing field 'squares'")
    raw = doc["squares"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{source}: field 'squares' must be a nonempty list")
    squares = []
    for i, item in enumerate(raw):
        where = f"{source}: squares[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{where}: expected an object with cx, cy, theta")
        extra = set(item) - {"cx", "cy", "theta"}
        if extra:
            raise ConfigError(f"{where}: unknown field(s) {sorted(extra)}")
        for key in ("cx", "cy"):
            if key not in item:
                raise ConfigError(f"{where}: missing field '{key}'")
        cx = _number(item["cx"], f"{where}.cx")
        cy = _number(item["cy"], f"{where}.cy")
        theta = _number(item.get("theta", 0.0), f"{where}.theta")
        sq = UnitSquare(cx, cy, theta)
        if oriented and not sq.axis_aligned:
            raise ConfigError(f"{where}.theta: must be a multiple of pi/2 when 'oriented' is true")
        squares.append(sq)
    try:
        return Configuration(tuple(squares), oriented=oriented, label=label)
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def loads_config(text: str, source: str = "<config>") -> Configuration:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(doc, source)


def load_config(path) -> Configuration:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    return loads_config(text, str(path))


def save_config(c: Configuration, path) -> None:
    Path(path).write_text(dumps_config(c))


def _ring_path(ring: np.ndarray, xmin: float, ymax: float) -> str:
    pts = [(SVG_SCALE * (x - xmin + SVG_MARGIN), SVG_SCALE * (ymax - y + SVG_MARGIN)) for x, y in ring]
    head = "M {:.6f} {:.6f}".format(*pts[0])
    body = " ".join("L {:.6f} {:.6f}".format(*p) for p in pts[1:])
    return f"{head} {body} Z"


def region_svg(r: Region, title: str = "") -> str:
    """One <path> per shell; its holes are extra subpaths cut out by the
    even-odd rule. y is flipped so the plane's up is the page's up."""
    rings = r.rings
    allpts = np.vstack(rings)
    xmin, ymin = allpts.min(axis=0)
    xmax, ymax = allpts.max(axis=0)
    width = SVG_SCALE * (xmax - xmin + 2 * SVG_MARGIN)
    height = SVG_SCALE * (ymax - ymin + 2 * SVG_MARGIN)
    p, a = perimeter(r), area(r)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- perimeter={fmt(p)} area={fmt(a)} ratio={fmt(p / a)} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3f}" height="{height:.3f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
    ]
    if title:
        lines.append(f"  <title>{_escape(title)}</title>")
    for k, shell in enumerate(r.shells):
        parts = [_ring_path(shell, xmin, ymax)]
        parts += [_ring_path(h, xmin, ymax) for h, owner in zip(r.holes, r.hole_shell) if owner == k]
        lines.append(f'  <path fill="#9bb7d4" stroke="#1f3b57" stroke-width="1" fill-rule="evenodd" '
                     f'd="{" ".join(parts)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def config_svg(c: Configuration) -> str:
    return region_svg(union(c), c.label)


@dataclass
class RunManifest:
    subcommand: str
    inputs: list
    seed: int | None
    version: str
    wall_time: float = 0.0
    outputs: list = field(default_factory=list)
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def emit(self, path, text: str) -> None:
        Path(path).write_text(text)
        self.outputs.append(str(path))

    def finish(self) -> None:
        self.wall_time = time.perf_counter() - self._t0

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": list(self.inputs),
            "seed": self.seed,
            "version": self.version,
            "wall_time_s": self.wall_time,
            "outputs": list(self.outputs),
        }
