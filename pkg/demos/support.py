"""Support theorems in practice: truncated data, complex frequencies, hyperplanes.

Run: python3 demos/support.py   (about half a minute)
"""

import math

from grassradon import (
    ball_bump_field,
    pw_condition_i,
    shell_bump_field,
    support_theorem_I_harness,
    support_theorem_II_harness,
)

f = shell_bump_field(1, 4, 1.0, 2.0)
print("Reconstruction of shell_bump(1,2) from its transform truncated at |v| = R,")
print("sampled on lines at distances in (R, R+1]:")
for R in (2.0, 1.5):
    rep = support_theorem_I_harness(f, R)
    print(f"  R={R}: largest exterior value / peak = {rep.extras['relative']:.2e}")
print("  At R=2 the truncation only removes zeros; at R=1.5 it removes data and the")
print("  reconstruction no longer vanishes outside.\n")

g = shell_bump_field(1, 4, 2.0, 3.0)
print("Complex-frequency growth of the fiber Fourier transform of shell_bump(2,3),")
print("weighted by e^(-R |Im lambda|), row |Im lambda| = 5 against the real axis:")
for R in (3.0, 2.0):
    rep = pw_condition_i(g, R, N_list=(0, 2))
    print(f"  claimed R={R}: growth (N=0) = {rep.growth_factor[0]:.3g}, (N=2) = {rep.growth_factor[2]:.3g}")
print(f"  Lowering R by one multiplies the growth by e^5 = {math.exp(5):.0f}. The bump is flat at")
print("  its outer edge, so at |Im lambda| = 5 its transform has only grown by about")
print("  e^(2 |Im lambda|), far from the limiting rate e^(3 |Im lambda|).\n")

print("Lines in hyperplanes that avoid the excluded domain O:")
cases = [
    ("ball(r=2)", ball_bump_field(3, 1.0)),
    ("band(a=-1,b=1)", ball_bump_field(3, 1.0, [2.5, 0, 0]) + ball_bump_field(3, 1.0, [-2.5, 0, 0])),
]
for dom, h in cases:
    rep = support_theorem_II_harness(h, dom, 50)
    print(f"  O = {dom:15s} exterior reconstruction / peak = {rep.extras['relative']:.1e}, "
          f"control plane error = {rep.extras['control_relative_error']:.1e}")
