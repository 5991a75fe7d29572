"""Print the Racah table for one instance by all three routes and their spread.

    python3 scripts/racah_table.py --N 4 --q 0.6 --mu 0.3,0.55,0.8 --eps 1,-1,1
"""
import argparse

import numpy as np

from ospq_racah import QContext, build_instance, labels_from
from ospq_racah import racah as rc


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--q", type=float, default=0.7)
    ap.add_argument("--mu", default="0.3,0.55,0.8")
    ap.add_argument("--eps", default="1,1,1")
    a = ap.parse_args()
    ctx = QContext(a.q)
    mu = tuple(float(v) for v in a.mu.split(","))
    eps = tuple(int(v) for v in a.eps.split(","))
    inst = build_instance(labels_from(mu, eps), a.N, ctx)
    methods = ("closed", "diag") + (("tensor",) if a.N <= 6 else ())
    tables = {m: rc.racah_table(inst, ctx, m).W for m in methods}
    np.set_printoptions(precision=6, suppress=True, linewidth=120)
    print(f"W[s, n]  (N={a.N}, q={a.q}, mu={mu}, eps={eps})")
    print(tables["closed"])
    for m in methods[1:]:
        print(f"max |closed - {m}| = {np.max(np.abs(tables['closed'] - tables[m])):.2e}")
    print(f"orthogonality      = {rc.orthogonality_check(rc.RacahTable(a.N, tables['closed'], 'closed')):.2e}")


if __name__ == "__main__":
    main()
