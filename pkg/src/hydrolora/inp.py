"""EPANET INP reading: tokenizer and water-network builder.

Targets the EPANET 2.x section grammar.  Only sections that feed topology,
demand, and geometry are interpreted; every other section is kept verbatim in
the token document and surfaces as a warning on the built network instead of
crashing the parse.

Identifiers are compared case-sensitively, as exported files are internally
consistent.  Coordinates are treated as planar meters unless a scale factor
is supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DanglingEndpoint,
    DuplicateId,
    MalformedRow,
    MissingCoordinates,
    MissingSection,
    RowOutsideSection,
    SelfLoop,
    UndecodableText,
)

SUPPORTED_SECTIONS = frozenset(
    {
        "TITLE",
        "JUNCTIONS",
        "RESERVOIRS",
        "TANKS",
        "PIPES",
        "PUMPS",
        "VALVES",
        "DEMANDS",
        "COORDINATES",
        "OPTIONS",
        "TIMES",
    }
)
NODE_SECTIONS = ("JUNCTIONS", "RESERVOIRS", "TANKS")
LINK_SECTIONS = ("PIPES", "PUMPS", "VALVES")


@dataclass(frozen=True)
class InpRow:
    """One data row: source line number plus whitespace-split tokens."""

    line: int
    tokens: tuple[str, ...]


@dataclass
class InpDocument:
    """Sectioned token view of an INP file, in file order.

    Section names are normalized to upper case; comment text never reaches
    the tokens.  Repeated headers append to the already-open section.
    """

    sections: dict[str, list[InpRow]] = field(default_factory=dict)

    def rows(self, name: str) -> list[InpRow]:
        return self.sections.get(name.upper(), [])

    def has(self, name: str) -> bool:
        return name.upper() in self.sections


def tokenize_inp(text: str | bytes) -> InpDocument:
    """Split INP text into sections of token rows.

    Headers are recognized case-insensitively in the form ``[NAME]``; ``;``
    starts a comment running to end of line; blank lines are skipped; unknown
    sections are preserved verbatim.  Raises UndecodableText for non-UTF-8
    bytes and RowOutsideSection for data appearing before any header.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise UndecodableText(f"input is not valid UTF-8: {exc}") from None

    doc = InpDocument()
    current: list[InpRow] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and "]" in line:
            name = line[1 : line.index("]")].strip().upper()
            current = doc.sections.setdefault(name, [])
            continue
        if current is None:
            raise RowOutsideSection(f"line {lineno}: data before any section header")
        current.append(InpRow(lineno, tuple(line.split())))
    return doc


@dataclass(frozen=True)
class NodeRecord:
    """A junction, reservoir, or tank with planar position."""

    id: str
    kind: str  # junction | reservoir | tank
    elevation: float  # head for reservoirs
    base_demand: float  # total over all demand categories; 0 for sources
    position: tuple[float, float]


@dataclass(frozen=True)
class LinkRecord:
    """A pipe, pump, or valve between two nodes."""

    id: str
    kind: str  # pipe | pump | valve
    from_node: str
    to_node: str
    length: float | None = None  # pipes only
    diameter: float | None = None  # pipes only


@dataclass
class WaterNetwork:
    """Validated water-distribution network in file order."""

    nodes: list[NodeRecord]
    links: list[LinkRecord]
    bbox: tuple[float, float, float, float]  # x_min, y_min, x_max, y_max
    warnings: list[str] = field(default_factory=list)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {node.id: i for i, node in enumerate(self.nodes)}

    def coordinates(self) -> np.ndarray:
        """Node positions as an (N, 2) float array, file order."""
        return np.array([n.position for n in self.nodes], dtype=np.float64)

    def demands(self) -> np.ndarray:
        return np.array([n.base_demand for n in self.nodes], dtype=np.float64)

    def kind_counts(self) -> dict[str, int]:
        counts = {k: 0 for k in ("junction", "reservoir", "tank", "pipe", "pump", "valve")}
        for node in self.nodes:
            counts[node.kind] += 1
        for link in self.links:
            counts[link.kind] += 1
        return counts

    def summary(self) -> dict:
        c = self.kind_counts()
        return {
            "nodes": self.node_count,
            "junctions": c["junction"],
            "reservoirs": c["reservoir"],
            "tanks": c["tank"],
            "links": len(self.links),
            "pipes": c["pipe"],
            "pumps": c["pump"],
            "valves": c["valve"],
            "bbox": list(self.bbox),
            "warnings": list(self.warnings),
        }


def _float(section: str, row: InpRow, pos: int, what: str) -> float:
    try:
        return float(row.tokens[pos])
    except ValueError:
        raise MalformedRow(section, row.line, f"{what} {row.tokens[pos]!r} is not a number") from None


def _need(section: str, row: InpRow, count: int) -> None:
    if len(row.tokens) < count:
        raise MalformedRow(section, row.line, f"expected at least {count} fields, got {len(row.tokens)}")


def build_network(doc: InpDocument, coordinate_scale: float = 1.0) -> WaterNetwork:
    """Materialize a validated WaterNetwork from a token document.

    Node and link order follows the file.  Rows in [DEMANDS] add to the
    junction's base demand (demand categories sum).  Self-loops are rejected;
    every node must have a coordinate entry.
    """
    if not (doc.has("JUNCTIONS") or doc.has("RESERVOIRS")):
        raise MissingSection("need at least a [JUNCTIONS] or [RESERVOIRS] section")
    if not any(doc.has(s) for s in LINK_SECTIONS):
        raise MissingSection("need at least one link section ([PIPES], [PUMPS], or [VALVES])")
    if not doc.has("COORDINATES"):
        raise MissingSection("need a [COORDINATES] section")

    warnings = [
        f"unknown section [{name}] skipped ({len(rows)} rows)"
        for name, rows in doc.sections.items()
        if name not in SUPPORTED_SECTIONS
    ]

    # Nodes and links in file order, across sections in their file order.
    kind_of = {"JUNCTIONS": "junction", "RESERVOIRS": "reservoir", "TANKS": "tank",
               "PIPES": "pipe", "PUMPS": "pump", "VALVES": "valve"}
    nodes: list[tuple[str, str, float, float, int]] = []  # id, kind, elev, demand, line
    node_lines: dict[str, int] = {}
    for section in doc.sections:
        if section not in NODE_SECTIONS:
            continue
        for row in doc.rows(section):
            _need(section, row, 2)
            node_id = row.tokens[0]
            if node_id in node_lines:
                raise DuplicateId(f"node {node_id!r} defined twice")
            elevation = _float(section, row, 1, "elevation/head")
            demand = 0.0
            if section == "JUNCTIONS" and len(row.tokens) >= 3:
                demand = _float(section, row, 2, "demand")
            nodes.append((node_id, kind_of[section], elevation, demand, row.line))
            node_lines[node_id] = row.line

    links: list[LinkRecord] = []
    link_lines: dict[str, int] = {}
    for section in doc.sections:
        if section not in LINK_SECTIONS:
            continue
        for row in doc.rows(section):
            _need(section, row, 5 if section == "PIPES" else 3)
            link_id, from_node, to_node = row.tokens[0], row.tokens[1], row.tokens[2]
            if link_id in link_lines:
                raise DuplicateId(f"link {link_id!r} defined twice")
            for endpoint in (from_node, to_node):
                if endpoint not in node_lines:
                    raise DanglingEndpoint(link_id, endpoint)
            if from_node == to_node:
                raise SelfLoop(link_id)
            length = diameter = None
            if section == "PIPES":
                length = _float(section, row, 3, "length")
                diameter = _float(section, row, 4, "diameter")
                if length <= 0 or diameter <= 0:
                    raise MalformedRow(section, row.line, "pipe length and diameter must be positive")
            links.append(LinkRecord(link_id, kind_of[section], from_node, to_node, length, diameter))
            link_lines[link_id] = row.line

    # Extra demand categories accumulate onto the junction's base demand.
    extra_demand: dict[str, float] = {}
    junction_ids = {n[0] for n in nodes if n[1] == "junction"}
    for row in doc.rows("DEMANDS"):
        _need("DEMANDS", row, 2)
        node_id = row.tokens[0]
        if node_id not in junction_ids:
            raise MalformedRow("DEMANDS", row.line, f"{node_id!r} is not a junction")
        extra_demand[node_id] = extra_demand.get(node_id, 0.0) + _float("DEMANDS", row, 1, "demand")

    positions: dict[str, tuple[float, float]] = {}
    for row in doc.rows("COORDINATES"):
        _need("COORDINATES", row, 3)
        node_id = row.tokens[0]
        if node_id not in node_lines:
            warnings.append(f"coordinate entry for unknown node {node_id!r} ignored")
            continue
        x = _float("COORDINATES", row, 1, "x") * coordinate_scale
        y = _float("COORDINATES", row, 2, "y") * coordinate_scale
        positions[node_id] = (x, y)

    if not nodes:
        raise MissingSection("node sections contain no rows")

    records: list[NodeRecord] = []
    for node_id, kind, elevation, demand, line in nodes:
        if node_id not in positions:
            raise MissingCoordinates(node_id)
        total = demand + extra_demand.get(node_id, 0.0)
        if total < 0:
            raise MalformedRow("JUNCTIONS", line, f"junction {node_id!r} has negative total demand {total}")
        records.append(NodeRecord(node_id, kind, elevation, total, positions[node_id]))

    xs = [r.position[0] for r in records]
    ys = [r.position[1] for r in records]
    bbox = (min(xs), min(ys), max(xs), max(ys))
    return WaterNetwork(nodes=records, links=links, bbox=bbox, warnings=warnings)


def read_inp(path: str | Path, coordinate_scale: float = 1.0) -> WaterNetwork:
    """Parse an INP file from disk."""
    data = Path(path).read_bytes()
    return build_network(tokenize_inp(data), coordinate_scale=coordinate_scale)
