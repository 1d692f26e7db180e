"""Tour of the radial eigenfunction families.

For each order kappa the radial operator -d2/dr2 + (kappa**2 - 1/4)/r**2 has
a distinguished solution u(E|r) ~ r**(1/2 + kappa) at the origin.  When
|kappa| < 1 both behaviors r**(1/2 +- kappa) are square-integrable near 0 and
a one-parameter family of boundary conditions opens up, parametrized by the
angle theta; the companion solution w and the combinations u_theta realize
it.  This script prints the identities that pin all of this down numerically.
"""

import math

import numpy as np

from ab_spectral import theta_kappa, u_eigen, u_theta_eigen, w_eigen, wronskian
from ab_spectral.transform import classify

# ---------------------------------------------------------------------------
# Weyl classification: the boundary condition only exists for |kappa| < 1

print("endpoint classification at r = 0:")
for kappa in (0.0, 0.5, 0.99, 1.0, 2.5):
    cls = classify(kappa)
    print(f"  kappa = {kappa:5.2f}: {cls.endpoint_0.value}")

# ---------------------------------------------------------------------------
# The Wronskian of u and w is 2/pi -- independent of kappa, E, and r.
# This is the normalization that makes the spectral measures come out right.

print("\nW_r(u, w) - 2/pi across the family:")
for kappa in (0.0, 0.3, -0.7):
    for r in (0.1, 1.0, 10.0):
        u = u_eigen(kappa, 0.0, r)
        w = w_eigen(kappa, 0.0, r)
        defect = wronskian(u, w) - 2.0 / math.pi
        print(f"  kappa = {kappa:4.1f}, r = {r:5.1f}: {defect:+.3e}")

# ---------------------------------------------------------------------------
# Half-order sanity: at kappa = 1/2 everything collapses to trigonometry,
# u(E|r) = sqrt(2/pi) sin(r sqrt(E)) / sqrt(E).

r = np.linspace(0.3, 3.0, 7)
E = 4.0
exact = math.sqrt(2.0 / math.pi) * np.sin(r * math.sqrt(E)) / math.sqrt(E)
print("\nkappa = 1/2 against the sine closed form:")
print(f"  max |u - exact| = {np.max(np.abs(u_eigen(0.5, E, r).value - exact)):.3e}")

# ---------------------------------------------------------------------------
# u_theta interpolates: at the reference angle theta_kappa it reduces to u,
# and every theta satisfies the radial ODE to quadrature accuracy.

kappa = 0.3
tk = theta_kappa(kappa)
print(f"\nreference angle theta_kappa({kappa}) = {tk:.6f}")
for theta in (tk, 0.0, 1.0, math.pi / 2):
    def u(x, theta=theta):
        return np.asarray(u_theta_eigen(kappa, theta, E, x).value)

    h = 1e-3
    rr = np.linspace(0.6, 2.0, 5)
    d2 = (u(rr + h) - 2.0 * u(rr) + u(rr - h)) / (h * h)
    residual = np.max(np.abs(-d2 + (kappa**2 - 0.25) / rr**2 * u(rr) - E * u(rr)))
    tag = " (= u)" if theta == tk else ""
    print(f"  theta = {theta:8.5f}{tag}: ODE residual {residual:.2e} (O(h^2) FD)")
