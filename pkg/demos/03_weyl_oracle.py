"""Three independent routes to the same Weyl functions.

For a constant potential W = [[p, q], [q, -p]] the half-line Weyl disks
degenerate to points with closed forms (route 1).  Integrating the
Riccati flow from a distant initial condition reaches the same fixed
point (route 2).  And the gap construction with the matching single gap
and angle assembles the same M function (route 3).
"""

import numpy as np

from kreindirac import GapSet, KreinProfile, assemble_M, build_M, const_weyl
from kreindirac.dirac import StepPotential, ode_weyl

p, q = 3.0, 4.0
r = np.hypot(p, q)
alpha = 0.5 * np.arctan2(q, p)
prof = KreinProfile.uniform(GapSet(((-r, r),)), alpha)
step = StepPotential.constant(p, q)

print(f"constant potential p = {p}, q = {q}  ->  gap (-{r}, {r}), "
      f"angle {alpha:.6f}")
print()
print(f"{'z':>12}  {'|ode - const|':>14}  {'|gap M - assembled|':>20}")
for z in (1j, 0.5 + 2j, -4.0 + 0.25j, 10j):
    exact = const_weyl(p, q, z)
    marched = ode_weyl(step, z)
    dev_ode = max(abs(marched.m_plus - exact.m_plus),
                  abs(marched.m_minus - exact.m_minus))
    dev_gap = np.linalg.norm(build_M(prof, z) - assemble_M(exact), 2)
    print(f"{str(z):>12}  {dev_ode:14.3e}  {dev_gap:20.3e}")
print()
pair = const_weyl(p, q, 1j)
print("m_plus(i)  =", pair.m_plus)
print("m_minus(i) =", pair.m_minus)
print("both have positive imaginary part:",
      pair.m_plus.imag > 0 and pair.m_minus.imag > 0)
