"""Synthetic water-distribution networks for desk-scale experiments.

Generates INP text (not model objects) so experiments exercise the full
pipeline from parsing onward.  The layout is a handful of dense demand
clusters joined by trunk mains, which is the regime where weighted gateway
placement visibly beats a blind grid: most nodes huddle in small patches of
a much larger service area.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import substream


def synthetic_wds(
    n_nodes: int = 450,
    n_clusters: int = 6,
    seed: int = 0,
    *,
    area_m: tuple[float, float] = (12_000.0, 9_000.0),
    cluster_sigma_m: float = 350.0,
    n_reservoirs: int = 2,
    loop_fraction: float = 0.08,
    demand_range: tuple[float, float] = (0.2, 2.0),
) -> str:
    """Build a deterministic clustered WDS and return it as INP text.

    ``n_nodes`` counts every node, reservoirs included.  Junction demands are
    uniform in ``demand_range`` (flow units).  Pipes form a random tree per
    cluster plus a few loops, and clusters are chained by trunk mains.
    """
    if n_nodes < n_clusters + n_reservoirs:
        raise ValueError("n_nodes too small for the requested clusters and reservoirs")
    rng = substream(seed, "synth")
    width, height = area_m
    n_junctions = n_nodes - n_reservoirs

    # Cluster centers on a jittered grid so they stay well separated.
    grid_cols = math.ceil(math.sqrt(n_clusters * width / height))
    grid_rows = math.ceil(n_clusters / grid_cols)
    centers = []
    for idx in range(n_clusters):
        row, col = divmod(idx, grid_cols)
        cx = (col + 0.5) / grid_cols * width
        cy = (row + 0.5) / grid_rows * height
        jitter = rng.uniform(-0.06, 0.06, size=2) * np.array([width, height])
        centers.append((cx + jitter[0], cy + jitter[1]))

    # Junctions scattered around their cluster center.
    sizes = [n_junctions // n_clusters] * n_clusters
    for idx in range(n_junctions % n_clusters):
        sizes[idx] += 1
    junction_xy: list[tuple[float, float]] = []
    cluster_of: list[int] = []
    for cluster, size in enumerate(sizes):
        cx, cy = centers[cluster]
        offsets = rng.normal(0.0, cluster_sigma_m, size=(size, 2))
        for dx, dy in offsets:
            x = min(max(cx + dx, 0.0), width)
            y = min(max(cy + dy, 0.0), height)
            junction_xy.append((x, y))
            cluster_of.append(cluster)

    junction_ids = [f"J{idx + 1:04d}" for idx in range(n_junctions)]
    demands = rng.uniform(demand_range[0], demand_range[1], size=n_junctions)
    elevations = rng.uniform(30.0, 70.0, size=n_junctions)

    members: list[list[int]] = [[] for _ in range(n_clusters)]
    for idx, cluster in enumerate(cluster_of):
        members[cluster].append(idx)

    pipes: list[tuple[str, str]] = []
    seen_pairs: set[tuple[str, str]] = set()

    def add_pipe(a: str, b: str) -> None:
        pair = (a, b) if a < b else (b, a)
        if a != b and pair not in seen_pairs:
            seen_pairs.add(pair)
            pipes.append(pair)

    # Random tree inside each cluster, then a few loop closures.
    for cluster in range(n_clusters):
        ids = members[cluster]
        for pos in range(1, len(ids)):
            anchor = ids[int(rng.integers(0, pos))]
            add_pipe(junction_ids[ids[pos]], junction_ids[anchor])
        n_loops = int(loop_fraction * len(ids))
        for _ in range(n_loops):
            a, b = rng.integers(0, len(ids), size=2)
            add_pipe(junction_ids[ids[int(a)]], junction_ids[ids[int(b)]])

    # Trunk mains: chain every cluster to the nearest already-connected one.
    connected = [0]
    for cluster in range(1, n_clusters):
        nearest = min(connected, key=lambda c: (centers[c][0] - centers[cluster][0]) ** 2
                      + (centers[c][1] - centers[cluster][1]) ** 2)
        add_pipe(junction_ids[members[cluster][0]], junction_ids[members[nearest][0]])
        connected.append(cluster)

    # Reservoirs feed the first clusters through short mains.
    reservoir_ids = [f"R{idx + 1}" for idx in range(n_reservoirs)]
    reservoir_xy = []
    for idx in range(n_reservoirs):
        cluster = idx % n_clusters
        cx, cy = centers[cluster]
        reservoir_xy.append((min(max(cx + 150.0, 0.0), width), min(max(cy + 150.0, 0.0), height)))
        add_pipe(reservoir_ids[idx], junction_ids[members[cluster][0]])

    def dist(a: tuple[float, float], b: tuple[float, float]) -> float:
        return max(math.hypot(a[0] - b[0], a[1] - b[1]), 1.0)

    xy_of = dict(zip(junction_ids, junction_xy)) | dict(zip(reservoir_ids, reservoir_xy))

    lines = ["[TITLE]", "Synthetic clustered distribution network", ""]
    lines.append("[JUNCTIONS]")
    lines.append(";ID  Elevation  Demand")
    for idx, jid in enumerate(junction_ids):
        lines.append(f" {jid}  {elevations[idx]:.2f}  {demands[idx]:.4f}")
    lines.append("")
    lines.append("[RESERVOIRS]")
    lines.append(";ID  Head")
    for rid in reservoir_ids:
        lines.append(f" {rid}  120.00")
    lines.append("")
    lines.append("[PIPES]")
    lines.append(";ID  Node1  Node2  Length  Diameter  Roughness")
    for idx, (a, b) in enumerate(pipes):
        length = dist(xy_of[a], xy_of[b])
        lines.append(f" P{idx + 1:04d}  {a}  {b}  {length:.2f}  200  130")
    lines.append("")
    lines.append("[COORDINATES]")
    lines.append(";Node  X  Y")
    for node_id in junction_ids + reservoir_ids:
        x, y = xy_of[node_id]
        lines.append(f" {node_id}  {x:.2f}  {y:.2f}")
    lines.append("")
    lines.append("[OPTIONS]")
    lines.append(" Units  LPS")
    lines.append("")
    lines.append("[TIMES]")
    lines.append(" Duration  24:00")
    lines.append("")
    return "\n".join(lines)
