"""The extremal single-gap construction, end to end.

One gap (-1, 1), one projection at angle pi/4.  The resulting M is the
Herglotz matrix of a reflectionless operator whose potential attains the
sharp bound ||W(0)|| = half the total gap length.
"""

import numpy as np

from kreindirac import (
    GapSet,
    KreinProfile,
    build_M,
    krein_xi,
    profile_m_function,
    sharp_bound,
    trace_formula_W0,
)
from kreindirac.finitegap import e_interior_grid

prof = KreinProfile.uniform(GapSet(((-1.0, 1.0),)), np.pi / 4)
mfun = profile_m_function(prof)

z = 2j
m = build_M(prof, z)
print("M(2i) =")
print(np.round(m, 10))
print("det M(2i) + 1 =", np.linalg.det(m) + 1)
print("eigenvalues of M J:", np.round(np.linalg.eigvals(
    m @ np.array([[0.0, -1.0], [1.0, 0.0]])), 12))
print()

# Krein density: the input projection inside the gap, I/2 on the bands
print("xi(0.0)   =", np.round(krein_xi(mfun, 0.0).xi, 9), " (gap: projection)")
for t in e_interior_grid(prof.gapset)[:2]:
    print(f"xi({t:+.3f}) =", np.round(krein_xi(mfun, float(t)).xi, 9))
print()

w0 = trace_formula_W0(prof)
print("W(0) from the trace formula: p =", w0.p, " q =", w0.q)
print("||W(0)|| =", w0.norm, "  sharp bound =", sharp_bound(prof.gapset))
