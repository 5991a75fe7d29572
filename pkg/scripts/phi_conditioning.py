"""How much cancellation the terminating 4phi3 sums suffer, and whether the
adaptive-precision kernel recovers the naive high-precision value."""
from ospq_racah import QContext
from ospq_racah.polyfamilies import ABCDParams, qbi_eval_hypergeometric, qbi_eval_recurrence
from ospq_racah.qkernel import QParam, q_pochhammer, naive_phi_terminating, phi43_terminating

PRM = ABCDParams(0.8, -0.7, 0.85, 0.6)


def terms_ratio(n, z, q):
    """max |term| / |sum| for the series behind Q_n(z)."""
    p = -q
    a, b, c, d = PRM.a, PRM.b, PRM.c, PRM.d
    num = [QParam(power=-n), QParam((a, b, c, d), power=n - 1), QParam((-a, z)), QParam((a,), (z,))]
    den = [QParam((-a, b)), QParam((a, c)), QParam((a, d))]
    nv = [x.value(p) for x in num]
    dv = [x.value(p) for x in den]
    terms = [q_pochhammer(nv, p, k) / q_pochhammer(dv + [p], p, k) * p**k for k in range(n + 1)]
    total = float(naive_phi_terminating(num, den, p, p, n))
    fast = phi43_terminating(num, den, p, p, n)
    return max(abs(t) for t in terms) / abs(total), abs(fast - total) / abs(total)


def main():
    print(f"{'q':>5} {'n':>3} {'max term/sum':>12} {'kernel err':>11} {'rec vs hyp':>11}")
    for q in (0.3, 0.5, 0.7, 0.9):
        ctx = QContext(q)
        for n in (5, 10, 15):
            z = 2.7
            ratio, err = terms_ratio(n, z, q)
            rec = qbi_eval_recurrence(n, z, PRM, ctx)
            hyp = qbi_eval_hypergeometric(n, z, PRM, ctx)
            print(f"{q:5.2f} {n:3d} {ratio:12.2e} {err:11.2e} {abs(rec - hyp) / abs(hyp):11.2e}")


if __name__ == "__main__":
    main()
