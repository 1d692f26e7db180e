"""Spectral measures across the extension family.

Each boundary angle theta gives a different spectral measure: a density on
E >= 0, plus -- for theta strictly between |theta_kappa| and pi - |theta_kappa|
(mod pi) -- a single negative-energy atom, the bound state.  The script walks
the closed forms: unit-depth bound states at theta = pi/2, the -e^pi state of
the kappa = 0 problem at theta = pi/4, and the collapse of the density to
(1/2) E**kappa at the reference angle.
"""

import math

import numpy as np

from ab_spectral import (
    ExtensionParams,
    ac_density,
    atom_weight,
    bound_state_energy,
    has_bound_state,
    theta_kappa,
)

# ---------------------------------------------------------------------------
# Bound-state branch: which theta bind, and how deep

kappa = 0.3
tk = abs(theta_kappa(kappa))
print(f"kappa = {kappa}: bound state iff theta mod pi in ({tk:.4f}, {math.pi - tk:.4f})")
for theta in (0.0, 0.5, 1.0, math.pi / 2, 2.8):
    params = ExtensionParams(kappa, theta)
    if has_bound_state(params):
        print(
            f"  theta = {theta:6.4f}: E_b = {bound_state_energy(params):10.4f}, "
            f"weight = {atom_weight(params):.4f}"
        )
    else:
        print(f"  theta = {theta:6.4f}: no bound state")

# ---------------------------------------------------------------------------
# Closed-form anchors

print("\nclosed-form anchors:")
print(f"  E at (kappa=0.4, pi/2)  = {bound_state_energy(ExtensionParams(0.4, math.pi/2)):+.12f}  (exactly -1)")
print(f"  E at (kappa=0,   pi/4)  = {bound_state_energy(ExtensionParams(0.0, math.pi/4)):+.6f}  (-e^pi = {-math.exp(math.pi):.6f})")
print(f"  weight at (0, pi/2)     = {atom_weight(ExtensionParams(0.0, math.pi/2)):.12f}  (pi^2/2 = {math.pi**2/2:.12f})")

# ---------------------------------------------------------------------------
# The density collapses to the rigid (1/2) E**kappa form at the reference
# angle -- the same form that holds for every |kappa| >= 1 problem.

print("\ndensity collapse at theta_kappa:")
E = np.array([0.1, 1.0, 10.0])
for kappa in (0.2, 0.8):
    collapsed = ac_density(ExtensionParams(kappa, theta_kappa(kappa)), E)
    rigid = 0.5 * E**kappa
    print(f"  kappa = {kappa}: max rel defect {np.max(np.abs(collapsed/rigid - 1)):.2e}")

# ---------------------------------------------------------------------------
# theta -> theta + pi is a symmetry of the measure (the eigenfunctions flip
# sign, which the coefficients see but the measure cannot).

E = np.geomspace(1e-3, 100.0, 50)
a = ac_density(ExtensionParams(0.3, 1.0), E)
b = ac_density(ExtensionParams(0.3, 1.0 + math.pi), E)
print(f"\nperiodicity: max |density(theta) - density(theta+pi)| = {np.max(np.abs(a - b)):.1e}")

# ---------------------------------------------------------------------------
# kappa -> 0 continuity: the kappa != 0 formulas pass smoothly into the
# logarithmic kappa = 0 ones.

theta = math.pi / 2
e0 = bound_state_energy(ExtensionParams(0.0, theta))
print("\nkappa -> 0 continuity of the bound-state energy at theta = pi/2:")
for kappa in (1e-2, 1e-3, 1e-4):
    e = bound_state_energy(ExtensionParams(kappa, theta))
    print(f"  kappa = {kappa:g}: |E - E_0| / |E_0| = {abs(e - e0)/abs(e0):.2e}")
