"""
Continued fractions and the Brjuno sum
======================================

Expand a few numbers, look at how fast the convergents close in, and
compare the Brjuno series against its closed form for periodic tails.
"""

from fractions import Fraction

from smalldiv import brjuno_periodic_exact, brjuno_series, diophantine_test, dist_to_integers, expand_cf

# the golden mean has every quotient equal to 1
g = expand_cf("golden", 12)
print("golden a:", g.a)
print("golden q:", g.q)

# e keeps the 2k pattern, read off from its exact generator
e = expand_cf("e", 14)
print("e a:", e.a)

# beta_n = ||q_n x|| shrinks at least geometrically
for n in range(6):
    print(n, g.q[n], float(g.beta[n]), float(dist_to_integers(g.q[n], g)))

# partial sums of the Brjuno series approach the periodic fixed point
for name in ("golden", "silver", "quot:0;(1,2)"):
    closed = brjuno_periodic_exact(name)
    sums = [float(brjuno_series(expand_cf(name, N + 1), N).partial_sum) for N in (5, 20, 60)]
    print(name, sums, "closed:", float(closed.value))

# a Liouville-type decimal fails the diophantine test early
digits = ["0"] * 130
for pos in (1, 2, 6, 24):
    digits[pos - 1] = "1"
liouville = expand_cf("dec:0." + "".join(digits), 6)
print(diophantine_test(liouville, Fraction(1, 100), 1, 6))
