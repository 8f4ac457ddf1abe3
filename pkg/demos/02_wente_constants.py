# # Measured Wente constants
#
# For a = x, b = y the Jacobian is 1 and phi = (r^2 - 1)/4, so
# sup|phi| / (|grad a| |grad b|) = (1/4) / pi = 1/(4 pi).

import numpy as np

from wentelab import CRIT, POW, gradient, jacobian, make_grid, sample, solve_dirichlet
from wentelab import families, weighted_energy, weighted_sup
from wentelab.experiments import wente_quotients

g = make_grid(128, 8, 16)
a, b = sample("x", g), sample("y", g)
phi, _ = solve_dirichlet(jacobian(gradient(a), gradient(b)))
den = weighted_energy(gradient(a)) * weighted_energy(gradient(b))
print("sup ratio (x, y):", weighted_sup(phi) / den, " 1/(4 pi) =", 1 / (4 * np.pi))

# Random smooth pairs, normalised to unit energy.

rng = np.random.default_rng(1)
for k in range(5):
    A, B, _ = families.random_pair(rng, g)
    phi, _ = solve_dirichlet(jacobian(A.grad, B.grad))
    q = wente_quotients(phi, A.grad, B.grad, (0.25, 0.5, 0.75))
    print(k, {name: round(v, 4) for name, v in q.items()})

# The adversarial annulus puts a dipole source at scale 2^-j. With r^2 on
# both sides the quotient keeps growing with j; putting r^2|log r| on b
# removes the growth.

for j in range(1, 8):
    A, B = families.adversarial_annulus(j, g)
    phi, _ = solve_dirichlet(jacobian(A.grad, B.grad))
    gp = gradient(phi)
    lhs = weighted_sup(phi, 1.0) ** 2 + weighted_energy(gp, POW(1.0)) ** 2
    both = lhs / (weighted_energy(B.grad, POW(1.0)) ** 2 * A.energy)
    crit = lhs / (weighted_energy(B.grad, CRIT) ** 2 * A.energy)
    print(f"j={j}  r^2 both sides {both:.5f}   CRIT on b {crit:.5f}")
