"""
Yoccoz's function for the quadratic family
==========================================

u(lambda) is the limit of a simple recurrence.  Its Maclaurin series has
dyadic coefficients, and |u| never exceeds 2 inside the unit disk.
"""

import cmath
import math

from smalldiv import quadratic_linearization, radial_limit_estimate, u_series, u_value

coeffs = u_series(11)
print("series:", [str(c) for c in coeffs])
print("denominators:", [c.denominator for c in coeffs])

# a few values on a ray
for r in (0.0, 0.3, 0.6, 0.9):
    u, err = u_value(r)
    print(f"u({r}) = {u:.12f}  (+- {err:.1e})")

# the linearization of the quadratic germ has radius |u|/2 in the unit form
lam = 0.5
ql = quadratic_linearization(lam, 300)
rad = ql.radius()
print("hadamard", rad.hadamard, "corrected", rad.corrected_radius, "|u|/2", abs(u_value(lam)[0]) / 2)

# approaching the circle along the golden direction
rl = radial_limit_estimate("golden", [0.9, 0.95, 0.99, 0.995, 0.999])
for r, v in zip(rl.radii, rl.values):
    print(r, v)
print("log r2 estimate:", rl.log_r2)

# arg u at a complex point, just for a look
u, _ = u_value(0.5 * cmath.exp(1j))
print(abs(u), math.degrees(cmath.phase(u)))
