# # Dyadic decomposition of b and localisation of a
#
# b is cut into pieces b_j supported on doubled annuli around 2^-j,
# with the area mean of b removed level by level. The pieces sum back to b.

import numpy as np

from wentelab import dyadic, make_grid, sample

g = make_grid(128, 8, 16)
b = sample("y + x**2", g)
dec = dyadic.decompose_b(b, 6)
print("reconstruction error:", dec.reconstruction_error)
print("C_dec (energy of b_j over local energy of b):", dec.C_dec)
for p in dec.pieces:
    print(p.j, p.support, "leak", dyadic.support_leak(p))

# a is localised with a plateau cutoff after subtracting its local mean.
# The localisation constant compares the energy of a_j with that of a
# on the support of the cutoff.

a = sample("x*y + x", g)
for j in range(1, 6):
    aj, const = dyadic.localize_a(a, j)
    print(f"j={j}  localisation constant {const:.3f}")

# Solve each piece and audit the per-level inequalities.

pieces = dyadic.solve_pieces(a, dec)
phi = dyadic.assemble_phi(pieces)
print("max |phi|:", np.max(np.abs(phi.values)))
rec = dyadic.audit_piece(a, pieces[2], 1.0)
for row in rec.rows:
    print(row.csv_row())
