"""Gateway placement strategies over a water network's geometry.

Two primary strategies: a regular grid over the bounding box, and weighted
k-means over node coordinates using the blended centrality/flow weights, so
gateways gravitate toward the nodes that matter most.  A greedy weighted
max-coverage variant is available as an alternative.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AllZeroWeights, DegenerateBBox, InvalidK, KExceedsN

REGULAR_GRID = "regular_grid"
DEGREE_CENTRALITY = "degree_centrality"
GREEDY_COVERAGE = "greedy_coverage"
STRATEGIES = (REGULAR_GRID, DEGREE_CENTRALITY, GREEDY_COVERAGE)


@dataclass
class GatewaySet:
    """K gateway positions plus provenance of how they were chosen."""

    strategy: str
    k: int
    positions: list[tuple[float, float]]
    provenance: dict = field(default_factory=dict)

    def coordinates(self) -> np.ndarray:
        return np.array(self.positions, dtype=np.float64)


def _grid_dims(k: int, width: float, height: float) -> tuple[int, int]:
    """Rows and columns for K cells: least overshoot, then closest aspect.

    Candidates are (r, ceil(K / r)); the winner minimizes r*c - K, breaking
    ties by |r/c - height/width| and then by smaller r.
    """
    if width == 0:
        return k, 1
    if height == 0:
        return 1, k
    target = height / width
    best = None
    for rows in range(1, k + 1):
        cols = -(-k // rows)
        overshoot = rows * cols - k
        aspect_gap = abs(rows / cols - target)
        key = (overshoot, aspect_gap, rows)
        if best is None or key < best[0]:
            best = (key, (rows, cols))
    return best[1]


def regular_grid_deploy(k: int, bbox: tuple[float, float, float, float]) -> GatewaySet:
    """Place K gateways at cell centers of a grid spanning the bounding box.

    Cells are filled row-major from the bottom-left; when rows * cols
    exceeds K, the last cells stay empty.  A bbox degenerate on one axis
    collapses to a line of K cells; degenerate on both axes is an error.
    """
    if not isinstance(k, int) or k < 1:
        raise InvalidK(f"gateway count must be a positive integer, got {k!r}")
    x_min, y_min, x_max, y_max = bbox
    width, height = x_max - x_min, y_max - y_min
    if width == 0 and height == 0:
        raise DegenerateBBox("bounding box has zero extent on both axes")

    rows, cols = _grid_dims(k, width, height)
    positions = []
    for i in range(rows):
        for j in range(cols):
            if len(positions) == k:
                break
            positions.append(
                (x_min + (j + 0.5) * width / cols, y_min + (i + 0.5) * height / rows)
            )
    return GatewaySet(strategy=REGULAR_GRID, k=k, positions=positions,
                      provenance={"rows": rows, "cols": cols, "bbox": list(bbox)})


def _farthest_point_seeds(xy: np.ndarray, weights: np.ndarray, k: int) -> list[int]:
    """Deterministic init: start at the heaviest node, then repeatedly take
    the node maximizing weight * squared-distance to the nearest chosen seed.
    Ties resolve to the earliest node in file order."""
    first = int(weights.argmax())
    seeds = [first]
    available = np.ones(len(xy), dtype=bool)
    available[first] = False
    nearest_sq = ((xy - xy[first]) ** 2).sum(axis=1)
    while len(seeds) < k:
        score = np.where(available, weights * nearest_sq, -1.0)
        nxt = int(score.argmax())
        seeds.append(nxt)
        available[nxt] = False
        nearest_sq = np.minimum(nearest_sq, ((xy - xy[nxt]) ** 2).sum(axis=1))
    return seeds


def degree_centrality_deploy(
    k: int,
    node_xy: np.ndarray,
    weights: np.ndarray,
    seed: int = 0,
    *,
    max_iter: int = 100,
    snap_to_nodes: bool = False,
) -> GatewaySet:
    """Weighted k-means over node coordinates; centers become gateways.

    Initialization is the deterministic weighted farthest-point rule, Lloyd
    iterations assign nodes to the nearest center and recompute centers as
    weight-weighted centroids, and the loop stops when the largest center
    displacement drops below 1e-6 of the bbox diagonal.  An emptied cluster
    is reseeded at the node with the largest weight * squared-distance to
    its current center.  The seed is recorded for provenance only; nothing
    here is random.
    """
    node_xy = np.asarray(node_xy, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    n = len(node_xy)
    if not isinstance(k, int) or k < 1:
        raise InvalidK(f"gateway count must be a positive integer, got {k!r}")
    if k > n:
        raise KExceedsN(f"K={k} exceeds node count {n}")
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    if weights.sum() <= 0:
        raise AllZeroWeights("placement weights sum to zero")

    diag = math.hypot(node_xy[:, 0].max() - node_xy[:, 0].min(),
                      node_xy[:, 1].max() - node_xy[:, 1].min())
    tol = 1e-6 * diag

    centers = node_xy[_farthest_point_seeds(node_xy, weights, k)].copy()
    previous_objective = math.inf
    for _ in range(max_iter):
        sq_dist = ((node_xy[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assignment = sq_dist.argmin(axis=1)
        nearest_sq = sq_dist[np.arange(n), assignment]

        for cluster in range(k):
            if not np.any(assignment == cluster):
                relocate = int((weights * nearest_sq).argmax())
                centers[cluster] = node_xy[relocate]
                sq_dist[:, cluster] = ((node_xy - centers[cluster]) ** 2).sum(axis=1)
                assignment = sq_dist.argmin(axis=1)
                nearest_sq = sq_dist[np.arange(n), assignment]

        objective = float((weights * nearest_sq).sum())
        if objective > previous_objective * (1 + 1e-9):
            raise RuntimeError("k-means objective increased; numerical inconsistency")
        previous_objective = objective

        new_centers = centers.copy()
        for cluster in range(k):
            members = assignment == cluster
            cluster_weight = weights[members].sum()
            if cluster_weight > 0:
                new_centers[cluster] = (weights[members, None] * node_xy[members]).sum(axis=0) / cluster_weight
            elif members.any():
                new_centers[cluster] = node_xy[members].mean(axis=0)  # zero-weight cluster
        shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if shift < tol:
            break

    if snap_to_nodes:
        sq_dist = ((centers[:, None, :] - node_xy[None, :, :]) ** 2).sum(axis=2)
        centers = node_xy[sq_dist.argmin(axis=1)].copy()

    positions = [(float(x), float(y)) for x, y in centers]
    return GatewaySet(strategy=DEGREE_CENTRALITY, k=k, positions=positions,
                      provenance={"seed": seed, "snap_to_nodes": snap_to_nodes,
                                  "objective": previous_objective})


def greedy_coverage_deploy(
    k: int,
    node_xy: np.ndarray,
    weights: np.ndarray,
    radius_m: float = 1000.0,
    seed: int = 0,
) -> GatewaySet:
    """Greedy weighted max-coverage: repeatedly take the node covering the
    most uncovered weight within the radius.  Alternative to k-means."""
    node_xy = np.asarray(node_xy, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    n = len(node_xy)
    if not isinstance(k, int) or k < 1:
        raise InvalidK(f"gateway count must be a positive integer, got {k!r}")
    if k > n:
        raise KExceedsN(f"K={k} exceeds node count {n}")
    if weights.sum() <= 0:
        raise AllZeroWeights("placement weights sum to zero")

    sq_dist = ((node_xy[:, None, :] - node_xy[None, :, :]) ** 2).sum(axis=2)
    within = sq_dist <= radius_m**2
    uncovered = weights.copy()
    chosen: list[int] = []
    for _ in range(k):
        gains = within @ uncovered
        pick = int(gains.argmax())
        chosen.append(pick)
        uncovered[within[pick]] = 0.0
    positions = [(float(node_xy[i, 0]), float(node_xy[i, 1])) for i in chosen]
    return GatewaySet(strategy=GREEDY_COVERAGE, k=k, positions=positions,
                      provenance={"seed": seed, "radius_m": radius_m})


def place(strategy: str, k: int, *, bbox=None, node_xy=None, weights=None,
          seed: int = 0, snap_to_nodes: bool = False, radius_m: float = 1000.0) -> GatewaySet:
    """Dispatch to a placement strategy by name."""
    if strategy == REGULAR_GRID:
        return regular_grid_deploy(k, bbox)
    if strategy == DEGREE_CENTRALITY:
        return degree_centrality_deploy(k, node_xy, weights, seed, snap_to_nodes=snap_to_nodes)
    if strategy == GREEDY_COVERAGE:
        return greedy_coverage_deploy(k, node_xy, weights, radius_m=radius_m, seed=seed)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def export_gateways_csv(gateways: GatewaySet, out) -> Path | None:
    """Write ``gw_id,x,y,strategy,k,seed`` rows for a gateway set."""
    def rows(writer):
        writer.writerow(["gw_id", "x", "y", "strategy", "k", "seed"])
        seed = gateways.provenance.get("seed", 0)
        for idx, (x, y) in enumerate(gateways.positions):
            writer.writerow([f"gw{idx:03d}", repr(float(x)), repr(float(y)),
                             gateways.strategy, gateways.k, seed])

    if hasattr(out, "write"):
        rows(csv.writer(out, lineterminator="\n"))
        return None
    path = Path(out)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        rows(csv.writer(handle, lineterminator="\n"))
    return path
