"""Region labels from coupling-averaged bounds for the Ising and generic models."""

from collections import Counter

from _common import parser, save
from qlandauer import analysis


def main():
    p = parser(__doc__)
    p.add_argument("--grid", type=int, default=60)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--j-max", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=analysis.DEFAULT_SAMPLES)
    p.add_argument("--t-eval", type=float, default=analysis.LONG_T_EVAL)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    a2, d = analysis.admissible_grid(args.grid)
    for kind in ("ising", "generic"):
        ens = analysis.CouplingEnsemble(kind, args.j_max, args.samples, args.t_eval, args.seed)
        q, ds, b = ens.averages_for(a2, d, args.beta)
        labels = analysis.classify_values(q, ds, b)
        rows = [[x, y, mq, ms, mb, str(lab)] for x, y, mq, ms, mb, lab in zip(a2, d, q, ds, b, labels)]
        save(args.out_dir, f"averaged_regions_{kind}.csv",
             ["alpha_sq", "delta", "mean_beta_q", "mean_ds", "mean_b", "label"], rows)
        print("  ", dict(sorted(Counter(labels.tolist()).items())))


if __name__ == "__main__":
    main()
