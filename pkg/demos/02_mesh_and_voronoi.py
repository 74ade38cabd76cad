"""Fixed design meshes and their Voronoi partition of the simplex.

The simulation designs are triangular meshes of n = k(k+1)/2 points strictly
inside the simplex; the Gasser-Muller estimator additionally needs a convex
cell around each design point, built here as the Voronoi region intersected
with the simplex triangle.  The partition exports to JSON for plotting.
"""

import json

import numpy as np

from simplexreg import cell_area, cell_diameter, mesh_design_points, voronoi_partition

for k in (7, 10, 14):
    points = mesh_design_points(k)
    partition = voronoi_partition(points)
    areas = np.array([cell_area(c) for c in partition.cells])
    diams = np.array([cell_diameter(c) for c in partition.cells])
    n = len(partition)
    print(
        f"k={k:2d}: n={n:3d} points, total cell area {partition.total_area():.9f} "
        f"(simplex area 0.5)"
    )
    print(
        f"       cell areas {areas.min():.5f}..{areas.max():.5f} "
        f"(uniform would be {0.5 / n:.5f}), "
        f"max diameter {diams.max():.4f} ~ n^-1/2 = {n ** -0.5:.4f}"
    )

partition = voronoi_partition(mesh_design_points(7))
payload = partition.to_json_dict()
print("\nJSON export (first cell):")
print(json.dumps(payload["cells"][0], indent=2)[:400])

print("\npoint location: 5 random points and their nearest-site cells")
rng = np.random.default_rng(0)
for p in rng.dirichlet(np.ones(3), size=5)[:, :2]:
    print(f"  {p.round(3)} -> cell {partition.locate(p)}")
