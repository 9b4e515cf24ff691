"""Funk multipliers and the reproducing operator on the sphere.

Run: python3 demos/funk_and_box.py
"""

import numpy as np

from grassradon.geometry import make_rng
from grassradon.harmonic import (
    SphericalHarmonicExpansion,
    funk_multiplier_oracle,
    funk_table,
    great_circle_average,
    reproducing_box,
    sh_analysis,
    sh_synthesis,
)

print("Funk multipliers P_l(0) and a great-circle quadrature measurement:")
tab = funk_table(12)
for l in tab.degrees:
    print(f"  l={l:2d}  P_l(0)={tab[l]: .12f}  measured={funk_multiplier_oracle(l): .12f}")

# A random even function of degree <= 6.
rng = make_rng(3)
lmax = 6
c = np.zeros((lmax + 1, 2 * lmax + 1), dtype=complex)
for l in range(0, lmax + 1, 2):
    for m in range(0, l + 1):
        z = rng.normal() + (1j * rng.normal() if m else 0)
        c[l, lmax + m] = z
        c[l, lmax - m] = (-1) ** m * np.conj(z)
e = SphericalHarmonicExpansion(lmax, c)


def F(w):
    return sh_synthesis(e, w)


def funk(G):
    return lambda w: great_circle_average(G, w, 2 * lmax)


back = reproducing_box(sh_analysis(funk(funk(F)), lmax))
print("\nApplying the Funk transform twice by quadrature and then the reproducing operator")
print(f"restores the coefficients to {np.max(np.abs(back.coeffs - e.coeffs)):.1e}.")
