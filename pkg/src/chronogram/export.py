"""Pajek files, animation frames, SVG rendering, the HTML player, and stats.

Everything here formats deterministic text: fixed decimal precision, LF
newlines, canonical element ordering.  The Pajek reader understands exactly
the dialect the writer emits (plus a little slack for hand-made files) so
write -> read -> write is byte-stable.
"""
from __future__ import annotations

import json
import math
import shlex
from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .layout import LayoutSlice, Trajectory
from .simnet import SliceGraph
from .windowing import Attribute, IncidenceMatrix, Kind

#: Normalized coordinates live in [PAD, 1 - PAD] on both axes.
PAD = 0.05


@dataclass(frozen=True)
class NodeStyle:
    shape: str
    color: str


DEFAULT_STYLE: Mapping[Kind, NodeStyle] = {
    Kind.WORD: NodeStyle("ellipse", "green"),
    Kind.AUTHOR: NodeStyle("ellipse", "red"),
    Kind.JOURNAL: NodeStyle("diamond", "blue"),
    Kind.ANCHOR: NodeStyle("ellipse", "red"),
}

Box = tuple[float, float, float, float]  # minx, miny, maxx, maxy


def bounding_box(arrays: Sequence[np.ndarray]) -> Box | None:
    """Union bounding box of several (k, 2) arrays; None when all are empty."""
    pts = [a for a in arrays if len(a)]
    if not pts:
        return None
    allpts = np.concatenate(pts, axis=0)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


def normalize_point(x: float, y: float, box: Box | None) -> tuple[float, float]:
    """Map a point into [PAD, 1-PAD]^2 by one uniform scale, centered.

    A degenerate box (single point, or None) maps everything to the center,
    so relative distances are preserved whenever there is anything to scale.
    """
    if box is None:
        return 0.5, 0.5
    minx, miny, maxx, maxy = box
    w = maxx - minx
    h = maxy - miny
    span = max(w, h)
    if span <= 0.0:
        return 0.5, 0.5
    s = (1.0 - 2.0 * PAD) / span
    ox = PAD + (1.0 - 2.0 * PAD - w * s) / 2.0
    oy = PAD + (1.0 - 2.0 * PAD - h * s) / 2.0
    return ox + (x - minx) * s, oy + (y - miny) * s


def _slice_points(graph: SliceGraph, layout: LayoutSlice) -> np.ndarray:
    if not graph.nodes:
        return np.zeros((0, 2))
    return np.array([layout.positions[a] for a in graph.nodes], dtype=float)


# ---------------------------------------------------------------- Pajek

class PajekParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class ParsedNet:
    """Raw contents of one .net file in the emitted dialect."""

    vertices: tuple[tuple[int, str, float, float, float, str, str], ...]
    edges: tuple[tuple[int, int, float], ...]


def write_pajek_net(graph: SliceGraph, layout: LayoutSlice,
                    style: Mapping[Kind, NodeStyle] = DEFAULT_STYLE) -> str:
    """One slice as Pajek .net text, coordinates normalized per slice.

    Vertex ids run 1..N in canonical node order; each line is
    `<id> "<kind:label>" <x> <y> 0.5 <shape> ic <Color>` with 6-decimal
    coordinates, then `*Edges` lines `<i> <j> <cosine>`.
    """
    pts = _slice_points(graph, layout)
    box = bounding_box([pts])
    lines = [f"*Vertices {len(graph.nodes)}"]
    for i, attr in enumerate(graph.nodes):
        x, y = normalize_point(float(pts[i, 0]), float(pts[i, 1]), box)
        st = style[attr.kind]
        label = attr.key().replace('"', "'")
        lines.append(f'{i + 1} "{label}" {x:.6f} {y:.6f} 0.5 '
                     f'{st.shape} ic {st.color.capitalize()}')
    lines.append("*Edges")
    for i, j, w in graph.edges:
        lines.append(f"{i + 1} {j + 1} {w:.6f}")
    return "\n".join(lines) + "\n"


def read_pajek_net(text: str) -> ParsedNet:
    """Parse the dialect emitted by write_pajek_net.

    Tolerates vertex lines that omit z or styling; rejects unknown `*`
    directives with the offending line number.
    """
    vertices = []
    edges = []
    mode = None
    declared = None
    line_no = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            parts = line.split()
            head = parts[0].lower()
            if head == "*vertices":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise PajekParseError(line_no, "malformed *Vertices header")
                declared = int(parts[1])
                mode = "vertices"
            elif head == "*edges":
                mode = "edges"
            else:
                raise PajekParseError(line_no, f"unknown directive {parts[0]!r}")
            continue
        if mode == "vertices":
            vertices.append(_parse_vertex(line, line_no))
        elif mode == "edges":
            try:
                i, j, w = line.split()
                edges.append((int(i), int(j), float(w)))
            except ValueError:
                raise PajekParseError(line_no, f"malformed edge line {line!r}") from None
        else:
            raise PajekParseError(line_no, "content before *Vertices")
    if declared is None:
        raise PajekParseError(line_no or 1, "missing *Vertices header")
    if len(vertices) != declared:
        raise PajekParseError(line_no or 1,
                              f"expected {declared} vertices, found {len(vertices)}")
    return ParsedNet(tuple(vertices), tuple(edges))


def _parse_vertex(line: str, line_no: int):
    try:
        tokens = shlex.split(line)
    except ValueError as exc:
        raise PajekParseError(line_no, f"bad quoting: {exc}") from None
    if len(tokens) < 4:
        raise PajekParseError(line_no, f"malformed vertex line {line!r}")
    try:
        vid = int(tokens[0])
        x = float(tokens[2])
        y = float(tokens[3])
    except ValueError:
        raise PajekParseError(line_no, f"malformed vertex line {line!r}") from None
    label = tokens[1]
    rest = tokens[4:]
    z = 0.5
    if rest:
        try:
            z = float(rest[0])
            rest = rest[1:]
        except ValueError:
            pass  # z omitted, token is the shape
    shape = rest[0] if rest else "ellipse"
    color = "Red"
    if len(rest) >= 3 and rest[1].lower() == "ic":
        color = rest[2]
    return (vid, label, x, y, z, shape, color)


def render_pajek_net(parsed: ParsedNet) -> str:
    """Format parsed data back to text, exactly as write_pajek_net would."""
    lines = [f"*Vertices {len(parsed.vertices)}"]
    for vid, label, x, y, z, shape, color in parsed.vertices:
        lines.append(f'{vid} "{label}" {x:.6f} {y:.6f} {z:g} {shape} ic {color}')
    lines.append("*Edges")
    for i, j, w in parsed.edges:
        lines.append(f"{i} {j} {w:.6f}")
    return "\n".join(lines) + "\n"


def write_pajek_project(trajectory: Trajectory, graphs: Sequence[SliceGraph],
                        style: Mapping[Kind, NodeStyle] = DEFAULT_STYLE) -> str:
    """All slices as one .paj project: a `*Network <label>` block per window."""
    blocks = []
    for layout, graph in zip(trajectory.slices, graphs):
        blocks.append(f"*Network {layout.window.label}\n"
                      + write_pajek_net(graph, layout, style))
    return "".join(blocks)


# ---------------------------------------------------------------- frames

@dataclass(frozen=True, slots=True)
class FrameNode:
    kind: Kind
    label: str
    x: float
    y: float
    opacity: float


@dataclass(frozen=True, slots=True)
class FrameEdge:
    a: tuple[Kind, str]
    b: tuple[Kind, str]
    weight: float
    opacity: float


@dataclass(frozen=True, slots=True)
class Frame:
    """One renderable picture: normalized positions, styles come separately.

    Nodes are kept sorted by (kind, label) and edges by endpoint pair, and
    nothing fully transparent is stored; frame_from_slice and interpolate
    maintain this, so frames compare equal structurally.
    """

    label: str
    nodes: tuple[FrameNode, ...]
    edges: tuple[FrameEdge, ...]


def _canonical_frame(label: str, nodes, edges) -> Frame:
    kept_nodes = tuple(sorted((n for n in nodes if n.opacity > 0.0),
                              key=lambda n: (n.kind, n.label)))
    kept_edges = tuple(sorted((e for e in edges if e.opacity > 0.0),
                              key=lambda e: (e.a, e.b)))
    return Frame(label, kept_nodes, kept_edges)


def frame_from_slice(graph: SliceGraph, layout: LayoutSlice,
                     box: Box | None) -> Frame:
    """Key frame for one slice, normalized against a shared bounding box."""
    pts = _slice_points(graph, layout)
    nodes = []
    for i, attr in enumerate(graph.nodes):
        x, y = normalize_point(float(pts[i, 0]), float(pts[i, 1]), box)
        nodes.append(FrameNode(attr.kind, attr.label, x, y, 1.0))
    edges = []
    for i, j, w in graph.edges:
        a = (graph.nodes[i].kind, graph.nodes[i].label)
        b = (graph.nodes[j].kind, graph.nodes[j].label)
        edges.append(FrameEdge(a, b, float(w), min(float(w), 1.0)))
    return _canonical_frame(graph.window.label, nodes, edges)


def build_frames(trajectory: Trajectory, graphs: Sequence[SliceGraph]) -> list[Frame]:
    """Key frames for all slices, sharing one global bounding box so motion
    between slices is meaningful."""
    arrays = [_slice_points(g, sl) for g, sl in zip(graphs, trajectory.slices)]
    box = bounding_box(arrays)
    return [frame_from_slice(g, sl, box)
            for g, sl in zip(graphs, trajectory.slices)]


def interpolate(a: Frame, b: Frame, s: float) -> Frame:
    """Blend two frames; s=0 reproduces `a` exactly and s=1 reproduces `b`.

    Shared elements move and fade linearly; elements present on one side
    only fade out of (or into) their own position, and anything that reaches
    opacity 0 is dropped.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must be in [0, 1], got {s}")
    t = 1.0 - s

    # both sides are canonically sorted, so a two-pointer merge preserves the
    # order without re-sorting
    nodes: list[FrameNode] = []
    an, bn = a.nodes, b.nodes
    i = j = 0
    while i < len(an) or j < len(bn):
        ka = (an[i].kind, an[i].label) if i < len(an) else None
        kb = (bn[j].kind, bn[j].label) if j < len(bn) else None
        if kb is None or (ka is not None and ka < kb):
            na = an[i]
            i += 1
            op = t * na.opacity
            if op > 0.0:
                nodes.append(FrameNode(na.kind, na.label, na.x, na.y, op))
        elif ka is None or kb < ka:
            nb = bn[j]
            j += 1
            op = s * nb.opacity
            if op > 0.0:
                nodes.append(FrameNode(nb.kind, nb.label, nb.x, nb.y, op))
        else:
            na = an[i]
            nb = bn[j]
            i += 1
            j += 1
            op = t * na.opacity + s * nb.opacity
            if op > 0.0:
                nodes.append(FrameNode(na.kind, na.label,
                                       t * na.x + s * nb.x,
                                       t * na.y + s * nb.y, op))
    edges: list[FrameEdge] = []
    ae, be = a.edges, b.edges
    i = j = 0
    while i < len(ae) or j < len(be):
        ka = (ae[i].a, ae[i].b) if i < len(ae) else None
        kb = (be[j].a, be[j].b) if j < len(be) else None
        if kb is None or (ka is not None and ka < kb):
            ea = ae[i]
            i += 1
            op = t * ea.opacity
            if op > 0.0:
                edges.append(FrameEdge(ea.a, ea.b, ea.weight, op))
        elif ka is None or kb < ka:
            eb = be[j]
            j += 1
            op = s * eb.opacity
            if op > 0.0:
                edges.append(FrameEdge(eb.a, eb.b, eb.weight, op))
        else:
            ea = ae[i]
            eb = be[j]
            i += 1
            j += 1
            op = t * ea.opacity + s * eb.opacity
            if op > 0.0:
                edges.append(FrameEdge(ea.a, ea.b,
                                       t * ea.weight + s * eb.weight, op))
    label = a.label if s < 0.5 else b.label
    return Frame(label, tuple(nodes), tuple(edges))


def animation_frames(keys: Sequence[Frame], transition_frames: int) -> list[Frame]:
    """Key frames with `transition_frames` interpolated frames between each
    consecutive pair: len == K + (K-1)*transition_frames."""
    if transition_frames < 0:
        raise ValueError("transition_frames must be >= 0")
    out: list[Frame] = []
    for idx, frame in enumerate(keys):
        out.append(frame)
        if idx + 1 < len(keys):
            for step in range(1, transition_frames + 1):
                out.append(interpolate(frame, keys[idx + 1],
                                       step / (transition_frames + 1)))
    return out


# ---------------------------------------------------------------- rendering

def render_svg_frame(frame: Frame, style: Mapping[Kind, NodeStyle] = DEFAULT_STYLE,
                     canvas: tuple[int, int] = (800, 600)) -> str:
    """Deterministic standalone SVG for one frame.

    Edges are lines with stroke width proportional to weight; nodes are
    ellipses, or diamond paths for diamond-shaped kinds, with small text
    labels.  The frame label is the caption.  The y axis is flipped so
    larger layout y means higher on the canvas.
    """
    w, h = canvas
    pts = {(n.kind, n.label): (n.x * w, (1.0 - n.y) * h) for n in frame.nodes}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="12" y="24" font-family="sans-serif" font-size="16" '
        f'fill="#222222">{escape(frame.label)}</text>',
    ]
    for e in frame.edges:
        pa = pts.get(e.a)
        pb = pts.get(e.b)
        if pa is None or pb is None:
            continue
        width = 0.5 + 2.5 * min(max(e.weight, 0.0), 1.0)
        parts.append(f'<line x1="{pa[0]:.2f}" y1="{pa[1]:.2f}" '
                     f'x2="{pb[0]:.2f}" y2="{pb[1]:.2f}" stroke="#888888" '
                     f'stroke-width="{width:.2f}" stroke-opacity="{e.opacity:.3f}"/>')
    for n in frame.nodes:
        st = style[n.kind]
        x, y = pts[(n.kind, n.label)]
        r = 6.0
        if st.shape == "diamond":
            parts.append(f'<path d="M {x:.2f} {y - r:.2f} L {x + r:.2f} {y:.2f} '
                         f'L {x:.2f} {y + r:.2f} L {x - r:.2f} {y:.2f} Z" '
                         f'fill="{st.color}" fill-opacity="{n.opacity:.3f}"/>')
        else:
            parts.append(f'<ellipse cx="{x:.2f}" cy="{y:.2f}" rx="{r:.2f}" '
                         f'ry="{0.75 * r:.2f}" fill="{st.color}" '
                         f'fill-opacity="{n.opacity:.3f}"/>')
        parts.append(f'<text x="{x:.2f}" y="{y - r - 3.0:.2f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="9" fill="#333333" '
                     f'fill-opacity="{n.opacity:.3f}">{escape(n.label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


_PLAYER_SCRIPT = """
var svg = document.getElementById('stage');
var SVGNS = 'http://www.w3.org/2000/svg';
var idx = 0, playing = true;
function el(tag, attrs) {
  var e = document.createElementNS(SVGNS, tag);
  for (var k in attrs) e.setAttribute(k, attrs[k]);
  return e;
}
function show(f) {
  while (svg.lastChild) svg.removeChild(svg.lastChild);
  svg.appendChild(el('rect', {width: W, height: H, fill: 'white'}));
  f.edges.forEach(function (e) {
    var a = f.nodes[e[0]], b = f.nodes[e[1]];
    svg.appendChild(el('line', {
      x1: a[2] * W, y1: (1 - a[3]) * H, x2: b[2] * W, y2: (1 - b[3]) * H,
      stroke: '#888', 'stroke-width': 0.5 + 2.5 * Math.min(e[2], 1),
      'stroke-opacity': e[3]}));
  });
  f.nodes.forEach(function (n) {
    var st = STYLE[n[0]], x = n[2] * W, y = (1 - n[3]) * H, r = 6;
    if (st[0] === 'diamond') {
      svg.appendChild(el('path', {
        d: 'M ' + x + ' ' + (y - r) + ' L ' + (x + r) + ' ' + y +
           ' L ' + x + ' ' + (y + r) + ' L ' + (x - r) + ' ' + y + ' Z',
        fill: st[1], 'fill-opacity': n[4]}));
    } else {
      svg.appendChild(el('ellipse', {
        cx: x, cy: y, rx: r, ry: 0.75 * r, fill: st[1], 'fill-opacity': n[4]}));
    }
    var t = el('text', {
      x: x, y: y - r - 3, 'text-anchor': 'middle', 'font-size': 9,
      'font-family': 'sans-serif', fill: '#333', 'fill-opacity': n[4]});
    t.textContent = n[1];
    svg.appendChild(t);
  });
  document.getElementById('label').textContent =
    f.label + '  (' + (idx + 1) + '/' + FRAMES.length + ')';
}
function tick() {
  if (!playing) return;
  idx = (idx + 1) % FRAMES.length;
  show(FRAMES[idx]);
}
document.getElementById('toggle').addEventListener('click', function () {
  playing = !playing;
  this.textContent = playing ? 'pause' : 'play';
});
show(FRAMES[0]);
setInterval(tick, 1000 / FPS);
"""


def write_animation_html(frames: Sequence[Frame],
                         style: Mapping[Kind, NodeStyle] = DEFAULT_STYLE,
                         fps: int = 10, transition_frames: int = 10,
                         canvas: tuple[int, int] = (800, 600)) -> str:
    """Self-contained HTML player over the key frames.

    Interpolated frames are inserted between consecutive keys, all geometry
    is embedded as JSON, and the page references no external resources.
    """
    if not frames:
        raise ValueError("need at least one frame")
    if fps < 1:
        raise ValueError("fps must be >= 1")
    seq = animation_frames(list(frames), transition_frames)
    payload = []
    for f in seq:
        node_rows = [[int(n.kind), n.label, round(n.x, 4), round(n.y, 4),
                      round(n.opacity, 3)] for n in f.nodes]
        order = {(n.kind, n.label): i for i, n in enumerate(f.nodes)}
        edge_rows = [[order[e.a], order[e.b], round(e.weight, 4),
                      round(e.opacity, 3)] for e in f.edges]
        payload.append({"label": f.label, "nodes": node_rows, "edges": edge_rows})
    style_rows = {int(kind): [st.shape, st.color] for kind, st in style.items()}
    w, h = canvas

    def embed(obj) -> str:
        return json.dumps(obj, separators=(",", ":"), sort_keys=True).replace("</", "<\\/")

    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        "<title>chronogram animation</title>\n"
        "<style>\n"
        "body { font-family: sans-serif; margin: 1.5em; }\n"
        "#stage { border: 1px solid #cccccc; }\n"
        "#label { margin-left: 1em; color: #444444; }\n"
        "</style>\n</head>\n<body>\n"
        "<h1>chronogram animation</h1>\n"
        '<div><button id="toggle">pause</button><span id="label"></span></div>\n'
        f'<svg id="stage" width="{w}" height="{h}"></svg>\n'
        "<script>\n"
        f"var W = {w}, H = {h}, FPS = {fps};\n"
        f"var STYLE = {embed(style_rows)};\n"
        f"var FRAMES = {embed(payload)};\n"
        f"{_PLAYER_SCRIPT}"
        "</script>\n</body>\n</html>\n"
    )


# ---------------------------------------------------------------- stats

@dataclass(frozen=True)
class WindowStats:
    window: str
    documents: int
    words: int
    authors: int
    journals: int
    edges: int
    mean_cosine: float
    final_stress: float


def compute_stats(trajectory: Trajectory, graphs: Sequence[SliceGraph],
                  matrices: Sequence[IncidenceMatrix]) -> list[WindowStats]:
    rows = []
    for t, (graph, matrix) in enumerate(zip(graphs, matrices)):
        kinds = [a.kind for a in matrix.attributes]
        weights = [w for _i, _j, w in graph.edges]
        rows.append(WindowStats(
            window=matrix.window.label,
            documents=len(matrix.documents),
            words=kinds.count(Kind.WORD),
            authors=kinds.count(Kind.AUTHOR),
            journals=kinds.count(Kind.JOURNAL),
            edges=len(graph.edges),
            mean_cosine=sum(weights) / len(weights) if weights else 0.0,
            final_stress=trajectory.stress_log[t] if trajectory.stress_log else 0.0,
        ))
    return rows


STATS_HEADER = "window,documents,words,authors,journals,edges,mean_cosine,final_stress"


def write_stats(trajectory: Trajectory, graphs: Sequence[SliceGraph],
                matrices: Sequence[IncidenceMatrix]) -> str:
    """Per-window statistics table as CSV with 6-decimal float columns."""
    lines = [STATS_HEADER]
    for r in compute_stats(trajectory, graphs, matrices):
        lines.append(f"{r.window},{r.documents},{r.words},{r.authors},"
                     f"{r.journals},{r.edges},{r.mean_cosine:.6f},{r.final_stress:.6f}")
    return "\n".join(lines) + "\n"
