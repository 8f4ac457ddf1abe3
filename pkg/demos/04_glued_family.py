# # The glued family h_alpha
#
# Inside B_s, h = K r^(alpha + 1) cos(theta); outside, h = x/|x|^2 - x.
# K makes h continuous at s, and s = sqrt(alpha / (alpha + 2)) matches the
# fluxes. The normal derivative still jumps across r = s.

from wentelab import counterexample as ce
from wentelab.norms import l2_norm
from wentelab.poisson import solve_dirichlet

for al in (2.0, 1.0, 2 / 3, 0.25):
    s = ce.s_alpha(al)
    print(f"alpha={al:.3f}  s={s:.4f}  K={ce.k_factor(s, al):.4f}"
          f"  jump={ce.normal_derivative_jump(al):.3f}")

# Solving Laplace(phi) = J(a, b) for the family's a and b gives the C^1
# field, not the glued h. The two differ by a multiple of r cos(theta)
# inside B_s.

al = 2 / 3
g = ce.aligned_grid_factory(128, 8, 16)(al)
fam = ce.build(al, g)
phi, _ = solve_dirichlet(fam.rhs)
ex = ce.exact_solution(al, g)
print("solve vs C^1 solution:", l2_norm(phi - ex) / l2_norm(ex))
print("solve vs glued h:     ", l2_norm(phi - fam.h_field) / l2_norm(fam.h_field))

# The ratio R(alpha, beta) along alpha = 2^-k, for both fields.

f = ce.aligned_grid_factory(128, 8, 16)
for sol in ("glued", "exact"):
    sw = ce.divergence_sweep(ce.default_alphas(), 0.0, f, sol)
    print(sol, [f"{r:.3g}" for r in sw.ratios])
