"""Equal-rank inversion: recover a field on lines in R^4 from its plane transform.

Run: python3 demos/inversion.py   (about ten seconds)
"""

import time

import numpy as np

from grassradon import gaussian_field, invert_equal_rank, radon_field, shell_bump_field
from grassradon.geometry import make_rng, random_affine_plane

rng = make_rng(11)
planes = [random_affine_plane(rng, 4, 1, d) for d in np.linspace(0.0, 2.4, 9)]
B = np.stack([pl.subspace.basis for pl in planes])
X = np.stack([pl.offset for pl in planes])

for f in (gaussian_field(1, 4), shell_bump_field(1, 4, 1.0, 2.0)):
    t0 = time.perf_counter()
    res = invert_equal_rank(radon_field(f, 2))
    rec = res.evaluate_many(B, X)
    tru = f.evaluate(B, X)
    print(f"{f.label}  ({time.perf_counter() - t0:.1f} s)")
    print("  distance     true            reconstructed")
    for x, a, b in zip(X, tru, rec):
        print(f"  {np.linalg.norm(x):5.2f}   {a: .10f}   {b: .10f}")
    print(f"  max error / peak = {np.max(np.abs(rec - tru)) / f.peak:.1e}\n")
