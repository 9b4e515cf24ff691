"""Forward transforms against closed forms, and the projection-slice identity.

Run: python3 demos/forward_and_slice.py
"""

import math

import numpy as np

from grassradon import gaussian_field, radon_pq, shell_bump_field
from grassradon.geometry import AffinePlane, complete_frame, make_rng, random_subspace, random_unit_in
from grassradon.transforms import projection_slice_residual, slice_sides

rng = make_rng(7)

print("Gaussian on lines in R^4, integrated over random 2-planes at distance s:")
f = gaussian_field(1, 4)
for s in (0.0, 0.5, 1.0, 2.0):
    eta = random_subspace(rng, 4, 2)
    v = s * random_unit_in(rng, complete_frame(eta.basis))
    val = radon_pq(f, AffinePlane(eta, v))
    print(f"  s={s:3.1f}  R f = {val:.12f}   sqrt(pi) e^(-s^2) = {math.sqrt(math.pi) * math.exp(-s * s):.12f}")

print("\nA shell bump supported in 2 <= r <= 3 has a transform that vanishes beyond distance 3:")
g = shell_bump_field(1, 4, 2.0, 3.0)
for s in (0.0, 2.5, 2.99, 3.01, 4.0):
    eta = random_subspace(rng, 4, 2)
    v = s * random_unit_in(rng, complete_frame(eta.basis))
    print(f"  s={s:4.2f}  R f = {radon_pq(g, AffinePlane(eta, v)):.6e}")

print("\nProjection slice: Fourier transform of R f along the fiber of eta versus")
print("the average of the fiber Fourier transforms of f over lines in eta:")
for _ in range(4):
    eta = random_subspace(rng, 4, 2)
    y = rng.uniform(0, 3) * random_unit_in(rng, complete_frame(eta.basis))
    lhs, rhs = slice_sides(f, eta, y)
    print(f"  |y|={np.linalg.norm(y):.3f}  lhs={lhs.real:.10f}  rhs={rhs.real:.10f}  "
          f"residual={projection_slice_residual(f, eta, y):.1e}")
