"""Regenerates optics_reference.csv with scikit-learn as an independent oracle.

scikit-learn counts the point itself in min_samples, so its graph is built
with min_pts + 1 while the steep-area extension uses min_pts.
"""
import numpy as np
from sklearn.cluster import OPTICS, cluster_optics_xi

rng = np.random.default_rng(1234)
centers = np.array([[0.0, 0.0], [6.0, 1.0], [2.0, 7.0]])
parts = [c + rng.normal(scale=s, size=(n, 2)) for c, s, n in zip(centers, [0.6, 1.0, 0.4], [60, 50, 40])]
parts.append(rng.uniform(-4, 10, size=(20, 2)))
x = np.vstack(parts)
rng.shuffle(x)

rows = []
for min_pts, xi, mcs in [(4, 0.05, 10), (9, 0.05, 15), (5, 0.1, 8)]:
    opt = OPTICS(min_samples=min_pts + 1, max_eps=np.inf, xi=xi, metric="euclidean",
                 algorithm="brute").fit(x)
    labels, _ = cluster_optics_xi(reachability=opt.reachability_, predecessor=opt.predecessor_,
                                  ordering=opt.ordering_, min_samples=min_pts,
                                  min_cluster_size=mcs, xi=xi, predecessor_correction=False)
    for pos, idx in enumerate(opt.ordering_):
        rows.append((min_pts, xi, mcs, pos, int(idx), float(opt.reachability_[idx]),
                     float(opt.core_distances_[idx]), int(labels[idx])))

with open("optics_reference.csv", "w") as f:
    f.write("# points\n")
    for p in x:
        f.write("P,%r,%r\n" % (float(p[0]), float(p[1])))
    f.write("# min_pts,xi,min_cluster_size,position,index,reachability,core_distance,label\n")
    for r in rows:
        f.write("R,%d,%r,%d,%d,%d,%r,%r,%d\n" % r)
