"""
Exterior algebra on an orthonormal vector space
===============================================

Wedge products, the Hodge star, interior multiplication, and the canonical
extension of a symmetric operator to p-forms, all as exact finite-dimensional
linear algebra over lexicographically ordered multi-index coefficients.
"""

import itertools

import numpy as np

from hodgebench import (
    AlternatingForm,
    duality_identity_residual,
    hodge_star,
    induced_endomorphism,
    interior_product,
    split_at_boundary,
    wedge,
)

# elementary products in R^3
e1 = AlternatingForm.basis(3, (0,))
e2 = AlternatingForm.basis(3, (1,))
e12 = wedge(e1, e2)
print("e1 ^ e2 coefficients over (01),(02),(12):", e12.coeffs)
print("e1 ^ e1 vanishes:", wedge(e1, e1).coeffs)

# the star pairs each basis form with its complement, with orientation signs
for idx in [(0,), (1,), (0, 1)]:
    form = AlternatingForm.basis(3, idx)
    print(f"star e_{idx} ->", hodge_star(form).coeffs)

# interior multiplication contracts the first slot
print("i_e1 (e1^e2) =", interior_product([1, 0, 0], e12).coeffs)
print("i_e2 (e1^e2) =", interior_product([0, 1, 0], e12).coeffs)

# a symmetric operator acts on p-forms slot by slot; its eigenvalues are all
# p-fold sums of the base eigenvalues
base = np.diag([1.0, 2.0, 3.0])
for p in (1, 2, 3):
    ext = induced_endomorphism(base, p)
    print(f"degree {p}: spectrum {np.round(ext.eigenvalues(), 12)}")

rng = np.random.default_rng(0)
a = rng.standard_normal((4, 4))
s = (a + a.T) / 2
eta = np.linalg.eigvalsh(s)
got = np.sort(induced_endomorphism(s, 2).eigenvalues())
want = np.sort([x + y for x, y in itertools.combinations(eta, 2)])
print("random symmetric 4x4, degree 2: max deviation from pair sums:",
      np.abs(got - want).max())

# conjugating by the boundary star swaps the degree-p and degree-(n-p)
# extensions, up to the trace; the residual is numerical noise
print("duality identity residual:", duality_identity_residual(s, 2))

# splitting against a unit normal is norm-preserving
omega = AlternatingForm(3, 2, rng.standard_normal(3))
normal = rng.standard_normal(3)
normal /= np.linalg.norm(normal)
parts = split_at_boundary(omega, normal)
print("|J*w|^2 + |i_N w|^2 - |w|^2 =",
      parts.tangential.norm() ** 2 + parts.normal.norm() ** 2 - omega.norm() ** 2)
