"""
The cohomological equation on the torus
=======================================

Solve mu . du = v mode by mode, check the loss of derivatives, and
classify how the fundamental solution grows for a few frequencies.
"""

from fractions import Fraction

from smalldiv import D_mu, FourierField, growth_classify, norm_estimate, parse_frequency, solve_cohomological

mu = parse_frequency("golden")  # (1, g)
v = FourierField(2, {(1, -2): (Fraction(1), Fraction(0)), (-1, 2): (Fraction(1), Fraction(0))})
u = solve_cohomological(v, mu)
print(u.to_json())
print("round trip exact:", D_mu(u, mu) == v)

# loss of r derivatives past tau + n - 1
for i in (0, 1, 2):
    est = norm_estimate(v, mu, i, Fraction(5, 2))
    print(i, est.ratio, est.holds)

# spikes of the fundamental solution sit at convergent denominators
for alpha, N in (("golden", 10**4), ("e", 10**4), ("qsched:exp", 10**4), ("qsched:qlogq", 10**6)):
    print(alpha, growth_classify(alpha, N).verdict)
