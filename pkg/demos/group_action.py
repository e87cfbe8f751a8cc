"""
Invariance under SL(3)
======================

A linear change of coordinates with determinant one maps undulation lines
to undulation lines, and the invariant does not change at all. Scaling the
curve by lambda multiplies it by lambda^60.
"""

from fractions import Fraction

from cayley_salmon.curve import act_linear, random_curve
from cayley_salmon.undulation import appendix_matrix, quartic_value

M = appendix_matrix()
P = random_curve(4, seed=2, bound=20)
value = quartic_value(M, P)

# %%
# A product of shears has determinant one.
g = [[1, 2, 0], [0, 1, 0], [0, 0, 1]]
h = [[1, 0, 0], [0, 1, 0], [-3, 1, 1]]
gh = [[sum(g[i][k] * h[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
print("g.P has the same value:", quartic_value(M, act_linear(gh, P)) == value)

# %%
# Homogeneity of degree 60.
lam = Fraction(-3, 2)
print("value(lam P) == lam^60 value(P):", quartic_value(M, P.scaled(lam)) == lam**60 * value)
