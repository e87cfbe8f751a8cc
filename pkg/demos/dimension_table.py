"""
Dimensions of the undulation ideal
==================================

The undulation ideal consists of polynomials f(C, v) in the curve
coefficients C and a line v that vanish whenever v is an undulation line of
C. Each graded piece I_{n,m} (degree n in C, m in v) is the nullspace of a
linear system: pick random quartics u^4 + v w, one equation per sample.
The systems split along the torus weights, so each weight cell is solved
separately over a prime field.
"""

import time

from cayley_salmon.idealgen import ComponentSpec, component_dim, graded_columns

# %%
# The quartic table for deg_C = 2 and 3. The first nonzero entry is the single
# quadratic covariant phi in I_{2,4}.
for n, ms in [(2, range(3, 8)), (3, range(3, 7))]:
    row = []
    for m in ms:
        t = time.monotonic()
        d = component_dim(ComponentSpec(4, n, m))
        row.append(f"m={m}: {d} ({time.monotonic() - t:.1f}s, {len(graded_columns(4, n, m))} unknowns)")
    print(f"n={n}:", "; ".join(row))

# %%
# Quintics are handled by the same code with r=5.
for n, m in [(2, 6), (2, 7)]:
    print(f"quintic I_{n},{m}:", component_dim(ComponentSpec(5, n, m)))
