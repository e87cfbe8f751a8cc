"""
Rebuilding the 21x21 matrix from scratch
========================================

The shipped rows were transcribed by hand. They can be rebuilt without them:
a basis of I_{2,5} (3 rows) plus a complement of the products C * I_{2,5}
inside I_{3,5} (18 rows), all over GF(p). Both determinants generate the
same principal ideal, so at every curve their ratio is one fixed constant.
"""

from cayley_salmon.curve import random_curve, random_undulation_curve
from cayley_salmon.exactnum import PrimeField
from cayley_salmon.undulation import appendix_matrix, appendix_modp, det_modp_at, pipeline_matrix

p = 2147483647
F = PrimeField(p)
rebuilt = pipeline_matrix(p)
shipped = appendix_modp(appendix_matrix(), F)

# %%
# Ratios at random curves mod p.
for s in range(5):
    C = random_curve(4, F, seed=s)
    a, b = det_modp_at(shipped, C, F), det_modp_at(rebuilt, C, F)
    print(f"curve {s}: ratio {F.div(b, a)}")

# %%
# Both determinants vanish at an undulation curve reduced mod p.
P, _ = random_undulation_curve(4, seed=3)
C = P.reduce_mod(F)
print("at u^4 + v w:", det_modp_at(shipped, C, F), det_modp_at(rebuilt, C, F))
