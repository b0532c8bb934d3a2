"""Closed-form region labels and boundary curves for the XX model at the swap time.

For each temperature, labels every admissible (alpha^2, delta) grid point,
records the linear entropy of the initial state, and solves for the states
where the two bounds coincide.
"""

from collections import Counter

import numpy as np

from _common import parser, save
from qlandauer import analysis
from qlandauer.model import linear_entropy, system_state

BETAS = (10.0, 2.0, 1.0, 0.5, 0.1)


def main():
    p = parser(__doc__)
    p.add_argument("--grid", type=int, default=200)
    args = p.parse_args()
    a2, d = analysis.admissible_grid(args.grid)
    w = analysis.w_from_delta(a2, d)
    s_lin = linear_entropy(system_state(a2, w))
    for beta in BETAS:
        labels = analysis.max_point_labels(a2, w, beta)
        rows = [[x, y, s, str(lab)] for x, y, s, lab in zip(a2, d, s_lin, labels)]
        save(args.out_dir, f"regions_beta{beta:g}.csv",
             ["alpha_sq", "delta", "linear_entropy", "label"], rows)
        print("  ", dict(sorted(Counter(labels.tolist()).items())))
        curve = analysis.boundary_curve(beta, np.linspace(0.0, 1.0, args.grid))
        save(args.out_dir, f"boundary_beta{beta:g}.csv", ["alpha_sq", "delta"], curve.points.tolist())
        print(f"   boundary: {len(curve.points)} points, {curve.missing.size} alpha^2 values without a root")


if __name__ == "__main__":
    main()
