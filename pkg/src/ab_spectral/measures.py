"""Spectral measures of the radial extensions and their discretization.

For |kappa| >= 1 the unique self-adjoint realization has the purely
absolutely continuous measure (1/2) E**|kappa| dE on E >= 0.  For |kappa| < 1
each extension angle theta produces a density on E >= 0 plus, on the interior
branch of theta mod pi, a single negative-energy atom (the bound state).

theta is canonicalized modulo pi at construction; the physics depends only on
the class theta + pi*Z, with eigenfunctions flipping sign between classes.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .special import theta_kappa


def reduce_theta(theta: float) -> tuple[float, int]:
    """Return (t, parity) with t = theta - parity*pi in [0, pi)."""
    n = math.floor(theta / math.pi)
    t = theta - n * math.pi
    if t >= math.pi:
        t -= math.pi
        n += 1
    if t < 0.0:
        t += math.pi
        n -= 1
        if t >= math.pi:  # theta was a negative rounding error below 0
            t = 0.0
            n += 1
    return t, n


@dataclass(frozen=True)
class ExtensionParams:
    """One radial problem: order kappa and extension angle theta.

    theta is ignored whenever |kappa| >= 1 (no boundary condition to choose).
    """

    kappa: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.theta)):
            raise DomainError("kappa and theta must be finite")

    @property
    def theta_mod_pi(self) -> float:
        return reduce_theta(self.theta)[0]

    @property
    def theta_sign(self) -> int:
        """(-1)**n for theta = theta_mod_pi + n*pi; sign of the eigenfunctions."""
        return -1 if reduce_theta(self.theta)[1] % 2 else 1

    @property
    def needs_theta(self) -> bool:
        return abs(self.kappa) < 1.0


@dataclass(frozen=True)
class SpectralMeasure:
    """Absolutely continuous density on E >= 0 plus at most one atom at E < 0."""

    density: Callable[[np.ndarray], np.ndarray]
    atoms: tuple[tuple[float, float], ...] = ()  # (energy, weight), energy < 0

    def write_csv(self, fileobj: io.TextIOBase, E_values: Sequence[float]) -> None:
        for energy, weight in self.atoms:
            fileobj.write(f"# atom {energy!r} {weight!r}\n")
        fileobj.write("E,density\n")
        E_values = np.asarray(E_values, dtype=float)
        dens = self.density(E_values)
        for e, d in zip(E_values, np.broadcast_to(dens, E_values.shape)):
            fileobj.write(f"{float(e)!r},{float(d)!r}\n")


@dataclass(frozen=True)
class MeasureQuadrature:
    """Discretization of a SpectralMeasure: nodes, density-weighted quadrature
    weights on [0, E_max], and the atom list carried alongside."""

    e_nodes: np.ndarray
    e_weights: np.ndarray
    atoms: tuple[tuple[float, float], ...] = ()

    @property
    def total_continuum_weight(self) -> float:
        return float(np.sum(self.e_weights))


def _require_extension_family(kappa: float, what: str) -> None:
    if abs(kappa) >= 1.0:
        raise DomainError(
            f"{what} is only defined for the extension family |kappa| < 1 "
            f"(got kappa={kappa}); |kappa| >= 1 has no bound state and no theta"
        )


def has_bound_state(params: ExtensionParams) -> bool:
    """True iff theta mod pi lies strictly inside (|pi*kappa/2|, pi - |pi*kappa/2|)."""
    _require_extension_family(params.kappa, "has_bound_state")
    t = params.theta_mod_pi
    tk = abs(theta_kappa(params.kappa))
    return tk < t < math.pi - tk


def bound_state_energy(params: ExtensionParams) -> float | None:
    """Energy of the atom, or None on the atom-free branch.

    E = -(sin(t+tk)/sin(t-tk))**(1/kappa) for kappa != 0 and -exp(pi*cot t)
    for kappa = 0.  The kappa != 0 branch is evaluated through log1p of the
    exact ratio increment 2 cos(t) sin(tk) / sin(t-tk), which passes smoothly
    into the kappa = 0 limit.
    """
    _require_extension_family(params.kappa, "bound_state_energy")
    if not has_bound_state(params):
        return None
    t = params.theta_mod_pi
    kappa = params.kappa
    # |kappa| below ~1e-8 underflows the kappa != 0 expressions; use the
    # analytic kappa -> 0 limit (error O(kappa), far below any tolerance here)
    if abs(kappa) < 1e-8:
        return -math.exp(math.pi * math.cos(t) / math.sin(t))
    tk = theta_kappa(kappa)
    increment = 2.0 * math.cos(t) * math.sin(tk) / math.sin(t - tk)
    return -math.exp(math.log1p(increment) / kappa)


def atom_weight(params: ExtensionParams) -> float | None:
    """Mass of the Dirac atom, or None on the atom-free branch."""
    _require_extension_family(params.kappa, "atom_weight")
    energy = bound_state_energy(params)
    if energy is None:
        return None
    t = params.theta_mod_pi
    kappa = params.kappa
    if abs(kappa) < 1e-8:
        return math.pi**2 * abs(energy) / (2.0 * math.sin(t) ** 2)
    tk = theta_kappa(kappa)
    return (
        math.pi
        * math.sin(math.pi * kappa)
        * abs(energy)
        / (2.0 * kappa * math.sin(t + tk) * math.sin(t - tk))
    )


def ac_density(params: ExtensionParams, E) -> float | np.ndarray:
    """Density of the absolutely continuous part at energy E (0 for E < 0).

    Branches: (1/2) E**|kappa| for |kappa| >= 1; the theta-dependent rational
    expression in E**(+-kappa) for 0 < |kappa| < 1; the log expression for
    kappa = 0.  A divergent (but integrable) E -> 0 limit is reported as inf.
    """
    kappa = params.kappa
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    out = np.zeros_like(E)
    pos = E > 0.0
    zero = E == 0.0
    if abs(kappa) >= 1.0:
        out[pos] = 0.5 * E[pos] ** abs(kappa)
    elif abs(kappa) < 1e-8:
        # The rational expression loses all digits as kappa -> 0 (its kappa**2
        # numerator and denominator both underflow); use its analytic limit.
        t = params.theta_mod_pi
        c, s = math.cos(t), math.sin(t)
        Ep = E[pos]
        out[pos] = 0.5 / ((c - np.log(Ep) * s / math.pi) ** 2 + s * s)
        if np.any(zero):
            out[zero] = 0.5 / (c * c) if s == 0.0 else 0.0
    else:
        t = params.theta_mod_pi
        tk = theta_kappa(kappa)
        A = math.sin(t + tk)
        B = math.sin(t - tk)
        cpk = math.cos(math.pi * kappa)
        spk2 = math.sin(math.pi * kappa) ** 2
        Ep = E[pos]
        denom = Ep ** (-kappa) * A * A - 2.0 * cpk * A * B + Ep**kappa * B * B
        out[pos] = 0.5 * spk2 / denom
        if np.any(zero):
            # whichever of E**-kappa A**2, E**kappa B**2 blows up wins
            diverges = (A == 0.0) if kappa > 0.0 else (B == 0.0)
            out[zero] = math.inf if diverges else 0.0
    return float(out[0]) if scalar else out


def spectral_measure(params: ExtensionParams) -> SpectralMeasure:
    """Assemble density plus bound-state atom for the given extension."""
    atoms: tuple[tuple[float, float], ...] = ()
    if abs(params.kappa) < 1.0 and has_bound_state(params):
        atoms = ((bound_state_energy(params), atom_weight(params)),)
    return SpectralMeasure(density=lambda E: ac_density(params, E), atoms=atoms)


def gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


#: Number of geometric grading levels toward E = 0 used by discretize.
GRADING_LEVELS = 12


def discretize(
    measure: SpectralMeasure, E_max: float, node_budget: int = 16
) -> MeasureQuadrature:
    """Composite Gauss-Legendre rule for the continuous part on [0, E_max].

    Panels are graded geometrically toward 0 ([0, E_max] * 4**-j) so that the
    E**(+-kappa) and log E endpoint behaviors are absorbed without
    measure-specific rules.  node_budget is the Gauss order per panel.
    """
    if E_max < 0.0:
        raise DomainError("E_max must be >= 0")
    if node_budget < 16:
        raise DomainError("node_budget must be at least 16")
    if E_max == 0.0:
        empty = np.zeros(0)
        return MeasureQuadrature(empty, empty, measure.atoms)
    edges = [E_max * 4.0 ** (-j) for j in range(GRADING_LEVELS + 1)]
    edges.append(0.0)
    nodes, weights = [], []
    for hi, lo in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(lo, hi, node_budget)
        nodes.append(x)
        weights.append(w * measure.density(x))
    e_nodes = np.concatenate(nodes[::-1])
    e_weights = np.concatenate(weights[::-1])
    return MeasureQuadrature(e_nodes, e_weights, measure.atoms)


def channel_measure(phi: float, theta_spec, m: int, p: float) -> SpectralMeasure:
    """Measure of channel (m, p): the fixed Hankel measure off the critical
    set |m+phi| < 1, the theta-dependent measure on it."""
    kappa = m + phi
    if abs(kappa) >= 1.0:
        return spectral_measure(ExtensionParams(kappa=kappa))
    try:
        theta = theta_spec.theta_for(m, p)
    except KeyError as exc:
        raise ConfigurationError(
            f"channel m={m} has |m+phi|={abs(kappa):.3g} < 1 but no theta entry"
        ) from exc
    return spectral_measure(ExtensionParams(kappa=kappa, theta=theta))
