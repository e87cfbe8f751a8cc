"""
Does a quartic have an undulation?
==================================

A line that meets a plane quartic in a single point with multiplicity four
is an undulation line. The undulation invariant is a degree-60 polynomial in
the fifteen coefficients that vanishes exactly on quartics with such a line.
Here it is evaluated as the determinant of the shipped 21x21 matrix.
"""

from cayley_salmon.curve import random_curve, random_undulation_curve, restrict_to_line, max_root_multiplicity
from cayley_salmon.undulation import invariant_quartic

# %%
# A random quartic with integer coefficients is generic: the invariant is a
# huge nonzero number.
P = random_curve(4, seed=1, bound=100)
rep = invariant_quartic(P)
print("random quartic:", rep.verdict, "with", len(str(abs(rep.value))), "digits")

# %%
# A quartic of the form u^4 + v*w (u, v linear, w cubic) has the line v = 0
# as an undulation line: on that line P restricts to u^4.
P, witness = random_undulation_curve(4, seed=7)
rep = invariant_quartic(P)
print("u^4 + v w:", rep.verdict, "value", rep.value)

# %%
# When the determinant vanishes, the kernel of the matrix contains the
# degree-5 Veronese vector of the line, which is read back off.
print("witness line v   :", witness.v)
print("recovered line(s):", rep.lines)
for line in rep.lines:
    print("root multiplicity of P on the line:", max_root_multiplicity(restrict_to_line(P, line)))
