"""Two ways to place K gateways over the same network.

The regular grid ignores where nodes actually are and tiles the bounding
box.  The degree-centrality deploy runs weighted k-means on node positions,
so gateways settle inside the demand clusters.  The weighted dispersion
objective (sum of weight times squared distance to the nearest gateway)
quantifies the difference before any radio simulation runs.
"""

from pathlib import Path

import numpy as np

from hydrolora import (
    build_adjacency,
    degree_centrality,
    degree_centrality_deploy,
    export_gateways_csv,
    flow_proxy,
    placement_weights,
    read_inp,
    regular_grid_deploy,
    synthetic_wds,
)

out = Path("demo_out")
out.mkdir(exist_ok=True)
inp_path = out / "demo_network.inp"
if not inp_path.exists():
    inp_path.write_text(synthetic_wds(n_nodes=200, n_clusters=5, seed=42))

net = read_inp(inp_path)
adj = build_adjacency(net)
cv = degree_centrality(adj)
weights = placement_weights(cv, flow_proxy(net, adj).values, alpha=0.5).weight
xy = net.coordinates()


def dispersion(positions):
    pos = np.asarray(positions)
    sq = ((xy[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    return float((weights * sq.min(axis=1)).sum())


for k in (3, 6, 10):
    grid = regular_grid_deploy(k, net.bbox)
    km = degree_centrality_deploy(k, xy, weights)
    print(f"K={k:2d}: grid {grid.provenance['rows']}x{grid.provenance['cols']} "
          f"dispersion={dispersion(grid.positions):12.3e}   "
          f"k-means dispersion={dispersion(km.positions):12.3e}")

grid = regular_grid_deploy(6, net.bbox)
km = degree_centrality_deploy(6, xy, weights)
export_gateways_csv(grid, out / "gateways_grid.csv")
export_gateways_csv(km, out / "gateways_kmeans.csv")
print(f"\nwrote {out / 'gateways_grid.csv'} and {out / 'gateways_kmeans.csv'}")
print("k-means gateway positions:")
for gw_id, (x, y) in enumerate(km.positions):
    print(f"  gw{gw_id:03d} at ({x:8.1f}, {y:8.1f})")
