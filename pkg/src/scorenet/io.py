"""
Readers for dense 0/1 adjacency text and edge lists, and CSV/DOT writers.

All writers render to a string first and replace the target atomically, so a
failed run never leaves a half-written file behind. Floats are written with
12 significant digits, which makes output byte-stable across runs.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import BipartiteGraph, Graph, GraphError

__all__ = [
    "ParseError",
    "parse_adjacency",
    "parse_edge_list",
    "parse_author_list",
    "parse_labels",
    "parse_key_value",
    "format_number",
    "atomic_write",
    "stage_write",
    "render_adjacency",
    "render_edge_list",
    "render_labels",
    "render_scores",
    "render_curve",
    "render_scree",
    "render_table",
    "render_dot",
    "emit_labels",
    "emit_scores",
    "emit_curve",
    "emit_scree",
    "emit_dot",
    "write_edge_list",
    "write_adjacency",
]

log = logging.getLogger(__name__)

ADJACENCY_MODES = ("square-directed", "square-undirected", "bipartite")


class ParseError(ValueError):
    """Malformed input file; the message carries the path and line number."""

    def __init__(self, path, lineno: int | None, message: str):
        where = f"{path}:{lineno}" if lineno else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.lineno = lineno


def _lines(path):
    # newline="" keeps \r so both line-ending styles split the same way
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            yield lineno, line.rstrip("\r\n").rstrip("\r")


def parse_adjacency(path, expected: str = "square-undirected", node_ids=None):
    """
    Read a whitespace-separated 0/1 matrix, one row per line.

    Parameters
    ----------
    expected : {"square-directed", "square-undirected", "bipartite"}
        ``bipartite`` reads an authors x papers incidence matrix and returns
        a :class:`BipartiteGraph`; the square modes return a :class:`Graph`.
        Undirected matrices must be symmetric. Nonzero diagonal entries are
        dropped, with a logged count.
    """
    if expected not in ADJACENCY_MODES:
        raise ValueError(f"expected must be one of {ADJACENCY_MODES}")
    rows, cols = [], []
    width = None
    r = 0
    for lineno, line in _lines(path):
        tokens = line.split()
        if not tokens:
            continue
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise ParseError(path, lineno, f"expected {width} entries, found {len(tokens)}")
        arr = np.array(tokens)
        ones = arr == "1"
        if not np.all(ones | (arr == "0")):
            bad = tokens[int(np.flatnonzero(~(ones | (arr == "0")))[0])]
            raise ParseError(path, lineno, f"non-binary token {bad!r}")
        hit = np.flatnonzero(ones)
        rows.append(np.full(len(hit), r, dtype=np.int64))
        cols.append(hit)
        r += 1
    if width is None:
        raise ParseError(path, None, "empty adjacency file")
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    if expected == "bipartite":
        try:
            return BipartiteGraph(r, width, np.column_stack([rows, cols]), node_ids=node_ids)
        except GraphError as exc:
            raise ParseError(path, None, str(exc)) from exc
    if r != width:
        raise ParseError(path, None, f"matrix is {r}x{width}, expected square")
    diag = rows == cols
    if diag.any():
        log.warning("%s: zeroed %d diagonal entries", path, int(diag.sum()))
        rows, cols = rows[~diag], cols[~diag]
    directed = expected == "square-directed"
    if not directed:
        fwd = set(zip(rows.tolist(), cols.tolist()))
        for i, j in sorted(fwd):
            if (j, i) not in fwd:
                raise ParseError(path, i + 1, f"asymmetric entry at row {i + 1}, column {j + 1}")
        keep = rows < cols
        rows, cols = rows[keep], cols[keep]
    try:
        return Graph(r, np.column_stack([rows, cols]), directed=directed, node_ids=node_ids)
    except GraphError as exc:
        raise ParseError(path, None, str(exc)) from exc


_HEADER = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


def parse_edge_list(path, directed: bool, node_ids=None) -> Graph:
    """
    Read ``src dst`` pairs (tab or space separated), one per line.

    An optional ``# n=<count>`` line fixes the node count; otherwise it is
    one more than the largest index. Other ``#`` lines are comments.
    """
    n_declared = None
    edges = []
    for lineno, line in _lines(path):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = _HEADER.match(s)
            if m:
                n_declared = int(m.group(1))
            continue
        parts = s.split()
        if len(parts) != 2:
            raise ParseError(path, lineno, f"expected 2 fields, found {len(parts)}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(path, lineno, f"non-integer node index in {s!r}") from None
        if a < 0 or b < 0:
            raise ParseError(path, lineno, "negative node index")
        if n_declared is not None and max(a, b) >= n_declared:
            raise ParseError(path, lineno, f"node index exceeds declared n={n_declared}")
        edges.append((a, b))
    n = n_declared if n_declared is not None else (max(max(e) for e in edges) + 1 if edges else 0)
    return Graph(n, edges, directed=directed, node_ids=node_ids)


def parse_author_list(path) -> list[str]:
    """One name per non-empty line."""
    return [line.strip() for _, line in _lines(path) if line.strip()]


def parse_labels(path) -> tuple[list[str], np.ndarray]:
    """Read a ``node_id,community`` CSV written by :func:`emit_labels`."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["node_id", "community"]:
            raise ParseError(path, 1, "expected header 'node_id,community'")
        ids, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(path, lineno, f"expected 2 fields, found {len(row)}")
            try:
                labels.append(int(row[1]))
            except ValueError:
                raise ParseError(path, lineno, f"bad community id {row[1]!r}") from None
            ids.append(row[0])
    if len(set(ids)) != len(ids):
        raise ParseError(path, None, "duplicate node ids")
    return ids, np.asarray(labels, dtype=np.int64)


def parse_key_value(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in _lines(path):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ParseError(path, lineno, "expected 'key = value'")
        k, v = s.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


# -- rendering -------------------------------------------------------------------

def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0:
        return "0"
    return format(x, ".12g")


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    return buf.getvalue()


def render_adjacency(g) -> str:
    if isinstance(g, BipartiteGraph):
        dense = g.biadjacency().toarray()
    else:
        dense = g.adjacency().toarray()
    return "".join(" ".join("1" if v else "0" for v in row) + "\n" for row in dense)


def render_edge_list(g: Graph) -> str:
    lines = [f"# n={g.n}\n"]
    lines.extend(f"{a}\t{b}\n" for a, b in g.edges.tolist())
    return "".join(lines)


def _names(n, node_ids=None, index_map=None):
    if index_map is not None:
        base = list(index_map)
        return [node_ids[i] if node_ids is not None else str(i) for i in base]
    return list(node_ids) if node_ids is not None else [str(i) for i in range(n)]


def render_labels(partition, node_ids=None, index_map=None) -> str:
    labels = np.asarray(getattr(partition, "labels", partition))
    names = _names(len(labels), node_ids, index_map)
    return _csv(("node_id", "community"), zip(names, labels.tolist()))


def render_scores(scores, node_ids=None, index_map=None) -> str:
    values = np.asarray(getattr(scores, "scores", scores))
    names = _names(len(values), node_ids, index_map)
    return _csv(("node_id", "score"), zip(names, values.tolist()))


def render_curve(points, header=("x", "y")) -> str:
    return _csv(header, points)


def render_scree(values) -> str:
    return _csv(("rank", "value", "magnitude"),
                ((i + 1, v, abs(v)) for i, v in enumerate(values)))


def render_table(table, row_names, col_names) -> str:
    return _csv(["", *col_names], ([r, *row] for r, row in zip(row_names, np.asarray(table).tolist())))


_DOT_ID = re.compile(r'["\\]')


def _quote(s: str) -> str:
    return '"' + _DOT_ID.sub(lambda m: "\\" + m.group(0), s) + '"'


def render_dot(g: Graph, labels=None, degree_floor: int = 0, node_ids=None) -> str:
    """
    GraphViz text. Only nodes with degree >= ``degree_floor`` carry a name
    (in-degree for digraphs, i.e. number of citers); community ids become
    fill colours from the 12-colour ``set312`` scheme.
    """
    names = node_ids if node_ids is not None else (
        g.node_ids if g.node_ids is not None else [str(i) for i in range(g.n)])
    deg = g.in_degree() if g.directed else g.degree()
    lab = None if labels is None else np.asarray(getattr(labels, "labels", labels))
    kind, arrow = ("digraph", "->") if g.directed else ("graph", "--")
    out = [f"{kind} G {{\n", "  node [shape=circle, colorscheme=set312];\n"]
    for i in range(g.n):
        attrs = [f"label={_quote(names[i]) if deg[i] >= degree_floor else chr(34) * 2}"]
        if lab is not None:
            attrs.append(f"style=filled, fillcolor={int(lab[i]) % 12 + 1}")
        out.append(f"  n{i} [{', '.join(attrs)}];\n")
    for a, b in g.edges.tolist():
        out.append(f"  n{a} {arrow} n{b};\n")
    out.append("}\n")
    return "".join(out)


def stage_write(path, text: str) -> str:
    """Write ``text`` to a temporary file beside ``path`` and return its name."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except BaseException:
        os.unlink(tmp)
        raise
    return tmp


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    tmp = stage_write(path, text)
    try:
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def emit_labels(partition, path, node_ids=None, index_map=None) -> None:
    atomic_write(path, render_labels(partition, node_ids, index_map))


def emit_scores(scores, path, node_ids=None, index_map=None) -> None:
    atomic_write(path, render_scores(scores, node_ids, index_map))


def emit_curve(points, path, header=("x", "y")) -> None:
    atomic_write(path, render_curve(points, header))


def emit_scree(values, path) -> None:
    atomic_write(path, render_scree(values))


def emit_dot(g: Graph, path, labels=None, degree_floor: int = 0, node_ids=None) -> None:
    atomic_write(path, render_dot(g, labels, degree_floor, node_ids))


def write_edge_list(g: Graph, path) -> None:
    atomic_write(path, render_edge_list(g))


def write_adjacency(g, path) -> None:
    atomic_write(path, render_adjacency(g))
