from __future__ import annotations

import logging
from pathlib import Path

from ..errors import PolygonError
from ..polygons import TessellatedPolygon, curvatures
from ..utils import unique_path

try:
    from PIL import Image, ImageDraw

    PIL_AVAILABLE = True
except Exception:  # pragma: no cover - optional dependency fallback
    PIL_AVAILABLE = False
    Image = None
    ImageDraw = None


LOGGER = logging.getLogger(__name__)

# corner_codes(2) order is (-,-), (-,+), (+,-), (+,+)
CYCLIC_CORNERS = (0, 1, 3, 2)
CURVATURE_COLORS = {1: "#2563EB", 0: "#111827", -1: "#DC2626"}
SCALE = 40
MARGIN = 20


def _require_coords(s: TessellatedPolygon) -> dict[int, tuple[float, float]]:
    if not s.coords:
        raise PolygonError("Export needs planar vertex coordinates.", code="no_coordinates")
    return s.coords


def _square_outlines(s: TessellatedPolygon) -> list[list[tuple[float, float]]]:
    coords = _require_coords(s)
    out = []
    for sq in s.carrier.cells_of_dim(2):
        corners = s.carrier.corners(sq)
        out.append([coords[corners[i]] for i in CYCLIC_CORNERS])
    return out


def _frame(s: TessellatedPolygon):
    coords = _require_coords(s)
    xs = [p[0] for p in coords.values()]
    ys = [p[1] for p in coords.values()]
    x0, y1 = min(xs), max(ys)
    width = (max(xs) - x0) * SCALE + 2 * MARGIN
    height = (y1 - min(ys)) * SCALE + 2 * MARGIN

    def place(p):
        return (MARGIN + (p[0] - x0) * SCALE, MARGIN + (y1 - p[1]) * SCALE)

    return width, height, place


def render_svg(s: TessellatedPolygon) -> str:
    width, height, place = _frame(s)
    coords = _require_coords(s)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" viewBox="0 0 {width:g} {height:g}">'
    ]
    for outline in _square_outlines(s):
        points = " ".join(f"{x:g},{y:g}" for x, y in map(place, outline))
        parts.append(f'<polygon points="{points}" fill="#E5E7EB" stroke="#6B7280" stroke-width="1"/>')
    boundary = [place(coords[v]) for v in s.boundary_vertices()]
    points = " ".join(f"{x:g},{y:g}" for x, y in boundary)
    parts.append(f'<polygon points="{points}" fill="none" stroke="#111827" stroke-width="2"/>')
    curv = curvatures(s)
    for v, value in sorted(curv.items()):
        x, y = place(coords[v])
        color = CURVATURE_COLORS.get(max(-1, min(1, value)), "#111827")
        radius = 5 if v in s.corner_vertices() else 3
        parts.append(f'<circle cx="{x:g}" cy="{y:g}" r="{radius}" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_off(s: TessellatedPolygon) -> str:
    coords = _require_coords(s)
    verts = sorted(coords)
    index = {v: i for i, v in enumerate(verts)}
    outlines = [[s.carrier.corners(sq)[i] for i in CYCLIC_CORNERS] for sq in s.carrier.cells_of_dim(2)]
    lines = ["OFF", f"{len(verts)} {len(outlines)} 0"]
    lines.extend(f"{coords[v][0]:g} {coords[v][1]:g} 0" for v in verts)
    lines.extend("4 " + " ".join(str(index[v]) for v in face) for face in outlines)
    return "\n".join(lines) + "\n"


def render_png(s: TessellatedPolygon, path: Path) -> Path:
    if not PIL_AVAILABLE:
        raise PolygonError("PNG export requires Pillow.", code="pillow_missing")
    width, height, place = _frame(s)
    image = Image.new("RGB", (int(width) + 1, int(height) + 1), (255, 255, 255))
    draw = ImageDraw.Draw(image)
    for outline in _square_outlines(s):
        draw.polygon([place(p) for p in outline], fill=(229, 231, 235), outline=(107, 114, 128))
    image.save(path, format="PNG")
    return path


def export_polygon(s: TessellatedPolygon, output_dir: Path, stem: str, formats: tuple[str, ...] = ("svg", "off")) -> list[Path]:
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        target = unique_path(output_dir / f"{stem}.{fmt}")
        if fmt == "svg":
            target.write_text(render_svg(s), encoding="utf-8")
        elif fmt == "off":
            target.write_text(render_off(s), encoding="utf-8")
        elif fmt == "png":
            render_png(s, target)
        else:
            raise PolygonError(f"Unknown export format {fmt!r}.", code="unknown_format")
        written.append(target)
    LOGGER.info("exported %s to %s", ", ".join(formats), output_dir)
    return written
