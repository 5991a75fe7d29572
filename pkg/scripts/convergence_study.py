"""Errors of the q -> 1 limits along q_k = 1 - 2^-k, with fitted orders."""
import numpy as np

from ospq_racah import labels_from
from ospq_racah import limits as lim
from ospq_racah.bargmann import ModuleLabel
from ospq_racah.polyfamilies import ClassicalBIParams


def show(r):
    print(f"{r.name:26s} near_one={r.near_one:9.2e}  order={r.order:6.3f}  "
          f"richardson={r.richardson:6.3f}")
    for q, e in zip(r.qs, r.errors):
        print(f"    1-q={1 - q:9.3e}  err={e:9.3e}")


def main():
    prm = ClassicalBIParams(0.3, 0.7, -0.4, -0.2)
    reports = list(lim.limit_recurrence(prm).values()) + [lim.limit_operator(prm)]
    alg = lim.limit_algebra(labels_from((0.3, 0.55, 0.8), (1, -1, 1)), 3)
    reports += [alg["structure_constants"], alg["casimir_value"]]
    reports.append(lim.sl_minus1_relations(ModuleLabel(1, 0.3))["convergence"])
    for r in reports:
        show(r)
    worst = max(alg["anticommutators"].values())
    print(f"undeformed anticommutators at q={lim.LimitSchedule().qs[-1]:.6f}: {worst:.2e}")
    np.testing.assert_array_less([r.near_one for r in reports], 1e-2)


if __name__ == "__main__":
    main()
