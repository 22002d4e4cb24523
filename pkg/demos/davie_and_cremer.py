"""
Davie's K and a Cremer germ
===========================

K(n) controls the accumulated losses of the small divisors
|lambda^n - 1|.  A huge partial quotient makes the divisors spike, and
the Cremer construction turns those spikes into a divergent series.
"""

import gmpy2

from smalldiv import build_davie, cremer_series, lemma53_check, small_divisor_step_check

dt = build_davie("golden", 40)
print("A_3:", dt.A_k(3))
print("K(0..5):", [round(dt.K_float(n), 6) for n in range(6)])

# the step K(n) - K(n-1) dominates -log|lambda^n - 1|
big = build_davie("quot:0;1,1,500,(1)", 1500)
step = small_divisor_step_check(big)
print("step violations:", step["violations"], "min margin:", step["min_margin"])

scan = lemma53_check("golden", 4, 200)
print("flagged n for k=4:", scan["flagged"][:10], "...")

# one quotient of size 10^6 gives a divisor near 1e-6 at n = q_3 + 1
cs = cremer_series("quot:0;1,1,1000000,(1)", 60)
print("lower bound failures:", cs.lower_bound_failures())
for n in (2, 3, 4, 5, 6, 7):
    print(n, float(cs.divisors[n]), float(gmpy2.log(cs.abs_h(n))) / n)
