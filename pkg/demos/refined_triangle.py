"""
The refined grading of I_{3,5}
===============================

Fixing the overline-degree (the total x1, x2, x3 weight of a monomial)
refines each graded piece into cells. For I_{3,5} the cell dimensions form
a triangle; its 63 dimensions split into 45 products C_ijk * alpha_l and an
18-dimensional complement, and the complement cells are symmetric under
permuting the three coordinates.
"""

from cayley_salmon.idealgen import ComponentSpec, complement_basis, component_basis, refined_dims_triangle

tri = refined_dims_triangle(4, 3, 5)
print("total:", sum(tri.values()))

# %%
# Print the triangle of nonzero cells, one row per first weight coordinate.
rows = {}
for (a, b, c), d in tri.items():
    if d:
        rows.setdefault(a, []).append(f"{(a, b, c)}:{d}")
for a in sorted(rows, reverse=True):
    print("  ".join(rows[a]))

# %%
# The product span and its canonical complement.
small = component_basis(ComponentSpec(4, 2, 5))
big = component_basis(ComponentSpec(4, 3, 5))
comp = complement_basis(big, small)
print("product span:", comp.product_dim, " complement:", len(comp.polys))
print("complement cells:", {w: d for w, d in comp.cell_dims.items() if d})
