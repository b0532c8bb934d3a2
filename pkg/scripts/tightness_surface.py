"""<Q>_max, B_max/beta and Delta S_max/beta over (alpha^2, beta) for w = 0.

Also prints how the gap between the heat and the thermodynamic bound closes
for the pure excited state as beta -> 0.
"""

import numpy as np

from _common import parser, save
from qlandauer import analysis


def main():
    p = parser(__doc__)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--beta-min", type=float, default=0.01)
    p.add_argument("--beta-max", type=float, default=10.0)
    args = p.parse_args()
    a2 = np.linspace(0.0, 1.0, args.grid)
    betas = np.linspace(args.beta_min, args.beta_max, args.grid)
    A, B = np.meshgrid(a2, betas, indexing="ij")
    v_z = 1.0 - 2.0 * A
    q = analysis.beta_q_max(v_z, B) / B
    b = analysis.b_max(v_z, B) / B
    ds = analysis.ds_max(np.abs(v_z), B)[0] / B
    rows = np.stack([A.ravel(), B.ravel(), q.ravel(), b.ravel(), ds.ravel()], axis=-1).tolist()
    save(args.out_dir, "surface.csv",
         ["alpha_sq", "beta", "q_max", "b_max_over_beta", "ds_max_over_beta"], rows)
    for beta in (1e-3, 0.01, 0.1, 1.0):
        gap = analysis.beta_q_max(1.0, beta) / beta - analysis.b_max(1.0, beta) / beta
        print(f"  pure excited, beta={beta:g}: <Q>_max - B_max/beta = {gap:.6f}")


if __name__ == "__main__":
    main()
