"""Eigenfunction transforms diagonalizing the radial operators.

forward/inverse realize the unitary map between compactly supported radial
functions and L2 of the spectral measure: analysis integrates the function
against the real kernel u(E|r) (or u_theta(E|r) on the extension family),
synthesis sums kernel * coefficient against the discretized measure,
including the bound-state atom.

Coefficients live exactly on MeasureQuadrature nodes; no interpolation in E
happens anywhere, so the discrete forward/inverse pair is a plain matrix and
its adjoint.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ContractError, DomainError
from .measures import ExtensionParams, MeasureQuadrature, gauss_legendre
from .special import theta_kappa, u_eigen, u_theta_eigen, wronskian


class Endpoint(enum.Enum):
    LIMIT_POINT = "limit_point"
    LIMIT_CIRCLE = "limit_circle"


class ProblemClass(NamedTuple):
    endpoint_0: Endpoint
    endpoint_inf: Endpoint


def classify(kappa: float) -> ProblemClass:
    """Weyl endpoint classification of -d2/dr2 + (kappa**2 - 1/4)/r**2.

    Limit circle at 0 exactly when |kappa| < 1 (both r**(1/2 +- kappa)
    solutions square-integrable near 0); always limit point at infinity.
    """
    at_zero = Endpoint.LIMIT_CIRCLE if abs(kappa) < 1.0 else Endpoint.LIMIT_POINT
    return ProblemClass(endpoint_0=at_zero, endpoint_inf=Endpoint.LIMIT_POINT)


@dataclass
class RadialFunction:
    """A complex function sampled on a Gauss rule over a compact [a,b] in (0,inf)."""

    r_nodes: np.ndarray
    quad_weights: np.ndarray
    values: np.ndarray
    second_derivative: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        self.r_nodes = np.asarray(self.r_nodes, dtype=float)
        self.quad_weights = np.asarray(self.quad_weights, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.r_nodes[0] <= 0.0:
            raise DomainError("radial support must lie strictly inside (0, inf)")
        if not (len(self.r_nodes) == len(self.quad_weights) == len(self.values)):
            raise DomainError("nodes, weights, values must have equal length")
        if len(self.r_nodes) < 8:
            raise DomainError("need at least 8 quadrature nodes")

    @classmethod
    def from_callable(cls, f, a: float, b: float, n: int = 64, second_derivative=None):
        r, w = gauss_legendre(a, b, n)
        return cls(r, w, np.asarray(f(r), dtype=complex), second_derivative)

    def norm_sq(self) -> float:
        return float(np.sum(self.quad_weights * np.abs(self.values) ** 2))

    def write_csv(self, fileobj: io.TextIOBase) -> None:
        fileobj.write("r,re,im\n")
        for r, v in zip(self.r_nodes, self.values):
            fileobj.write(f"{float(r)!r},{float(v.real)!r},{float(v.imag)!r}\n")


@dataclass
class TransformCoefficients:
    """Continuum coefficient samples on the measure grid plus one per atom."""

    quad: MeasureQuadrature
    continuum_values: np.ndarray
    atom_values: np.ndarray

    def __post_init__(self):
        self.continuum_values = np.asarray(self.continuum_values, dtype=complex)
        self.atom_values = np.asarray(self.atom_values, dtype=complex)
        if len(self.continuum_values) != len(self.quad.e_nodes):
            raise DomainError("continuum values do not match the quadrature grid")
        if len(self.atom_values) != len(self.quad.atoms):
            raise DomainError("atom values do not match the atom list")

    def norm_sq(self) -> float:
        total = float(np.sum(self.quad.e_weights * np.abs(self.continuum_values) ** 2))
        for (energy, weight), value in zip(self.quad.atoms, self.atom_values):
            total += weight * abs(value) ** 2
        return total

    def write_csv(self, fileobj: io.TextIOBase) -> None:
        for (energy, weight), value in zip(self.quad.atoms, self.atom_values):
            fileobj.write(
                f"# atom {float(energy)!r} {float(weight)!r} "
                f"{float(value.real)!r} {float(value.imag)!r}\n"
            )
        fileobj.write("E,re,im\n")
        for e, v in zip(self.quad.e_nodes, self.continuum_values):
            fileobj.write(f"{float(e)!r},{float(v.real)!r},{float(v.imag)!r}\n")


def kernel_values(params: ExtensionParams, E, r) -> np.ndarray:
    """Transform kernel: u(|kappa|, E|r) off the extension family,
    u_theta(kappa, theta, E|r) on it (theta taken modulo pi, with the parity
    sign applied so that theta -> theta + pi flips the kernel exactly)."""
    if abs(params.kappa) >= 1.0:
        return np.asarray(u_eigen(abs(params.kappa), E, r).value)
    value = u_theta_eigen(params.kappa, params.theta_mod_pi, E, r).value
    return params.theta_sign * np.asarray(value)


def kernel_matrix(params: ExtensionParams, quad: MeasureQuadrature, r_nodes):
    """(K, atom_rows): K[i, j] = kernel(E_i | r_j), one extra row per atom."""
    r = np.asarray(r_nodes, dtype=float)[None, :]
    if len(quad.e_nodes):
        K = kernel_values(params, quad.e_nodes[:, None], r)
    else:
        K = np.zeros((0, r.shape[1]))
    atom_rows = [kernel_values(params, energy, r[0]) for energy, _ in quad.atoms]
    return K, atom_rows


def forward(
    params: ExtensionParams,
    psi: RadialFunction,
    quad: MeasureQuadrature,
    include_atoms: bool = True,
) -> TransformCoefficients:
    """Analysis: c(E) = integral kernel(E|r) psi(r) dr over the support.

    include_atoms=False zeroes the bound-state coefficients; the resulting
    Parseval deficit is the expected negative control.
    """
    weighted = psi.quad_weights * psi.values
    K, atom_rows = kernel_matrix(params, quad, psi.r_nodes)
    continuum = K @ weighted
    if include_atoms:
        atom_vals = np.array([row @ weighted for row in atom_rows], dtype=complex)
    else:
        atom_vals = np.zeros(len(atom_rows), dtype=complex)
    return TransformCoefficients(quad, continuum, atom_vals)


def inverse(
    params: ExtensionParams,
    coeffs: TransformCoefficients,
    r_nodes,
    quad_weights=None,
) -> RadialFunction:
    """Synthesis (the adjoint): psi(r) = int kernel(E|r) c(E) dV(E) + atoms."""
    r_nodes = np.asarray(r_nodes, dtype=float)
    if quad_weights is None:
        quad_weights = np.ones_like(r_nodes)
    K, atom_rows = kernel_matrix(params, coeffs.quad, r_nodes)
    values = (coeffs.quad.e_weights * coeffs.continuum_values) @ K
    for (energy, weight), row, cval in zip(
        coeffs.quad.atoms, atom_rows, coeffs.atom_values
    ):
        values = values + weight * cval * row
    return RadialFunction(r_nodes, np.asarray(quad_weights, dtype=float), values)


def apply_l_q(kappa: float, psi: RadialFunction) -> RadialFunction:
    """Differential action -psi'' + ((kappa**2 - 1/4)/r**2) psi.

    Requires the analytic second derivative attached to psi; finite
    differences are rejected so that diagonalization tests measure transform
    error only.
    """
    if psi.second_derivative is None:
        raise ContractError(
            "apply_l_q needs psi.second_derivative (analytic); "
            "finite differences are not accepted here"
        )
    r = psi.r_nodes
    q = (kappa * kappa - 0.25) / (r * r)
    values = -np.asarray(psi.second_derivative(r), dtype=complex) + q * psi.values
    return RadialFunction(r, psi.quad_weights, values)


def boundary_defect(params: ExtensionParams, E: float, r_probe: Sequence[float]):
    """W_r(u_theta(0), u_theta(E)) at each probe radius.

    Tends to 0 as r -> 0: u_theta(E) satisfies the boundary condition at the
    origin that defines the theta-extension.
    """
    if abs(params.kappa) >= 1.0:
        raise DomainError("boundary_defect requires |kappa| < 1")
    t = params.theta_mod_pi
    out = []
    for r in r_probe:
        f0 = u_theta_eigen(params.kappa, t, 0.0, float(r))
        fE = u_theta_eigen(params.kappa, t, float(E), float(r))
        out.append(float(wronskian(f0, fE)))
    return np.asarray(out)


def parseval_defect(psi: RadialFunction, coeffs: TransformCoefficients) -> float:
    """| ||psi||**2 - ||c||**2 | / ||psi||**2, the numerical unitarity witness."""
    n = psi.norm_sq()
    return abs(n - coeffs.norm_sq()) / n


def roundtrip_defect(params: ExtensionParams, psi: RadialFunction, quad) -> float:
    """||inverse(forward(psi)) - psi|| / ||psi|| on psi's own grid."""
    coeffs = forward(params, psi, quad)
    back = inverse(params, coeffs, psi.r_nodes, psi.quad_weights)
    diff = float(np.sum(psi.quad_weights * np.abs(back.values - psi.values) ** 2))
    return math.sqrt(diff / psi.norm_sq())
