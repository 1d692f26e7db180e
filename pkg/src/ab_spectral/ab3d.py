"""Three-dimensional Aharonov-Bohm expansion assembled from radial channels.

A field on R^3 (minus the solenoid axis) decomposes into independent radial
problems labelled by channels s = (m, p): angular mode m and axial momentum p.
The channel of order kappa = m + phi carries the radial operator of
:mod:`ab_spectral.transform`; the finitely many critical channels with
|m + phi| < 1 additionally require an extension angle theta, supplied by a
:class:`ThetaSpec`.

The reduction of a field Phi to channel (m, p) is

    reduced(m, p | r) = (sqrt(r) / 2 pi) * int dx3 int dphi
                         Phi(r cos phi, r sin phi, x3) e^{-i p x3 - i m phi}

and the full forward map composes this reduction with the one-dimensional
eigenfunction transform per channel.  Norms satisfy

    ||Phi||^2_{L2(R^3)} = sum_m int dp ||reduced(m, p)||^2_{L2(0, inf)}

which fixes every normalization used here.  The diagonalized Hamiltonian acts
by multiplication with p^2 + E (p^2 + E_b on bound-state atoms), and the
rotation-translation symmetry G: (rotate by alpha, shift x3 by beta) acts on
coefficients as the phase e^{-i m alpha - i p beta}.
"""

from __future__ import annotations

import bisect
import io
import math
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .measures import (
    ExtensionParams,
    MeasureQuadrature,
    channel_measure,
    discretize,
    gauss_legendre,
)
from .transform import RadialFunction, kernel_matrix, kernel_values


def critical_channels(phi: float) -> tuple[int, ...]:
    """Angular modes m with |m + phi| < 1: one for integer phi, else two."""
    if phi == int(phi):
        return (int(-phi),)
    lo = -math.ceil(phi)  # the unique integer in (-phi - 1, -phi)
    return (lo, lo + 1)


class ChannelIndex(NamedTuple):
    """One channel s = (m, p)."""

    m: int
    p: float


def channel_kappa(phi: float, m: int) -> float:
    """Order of the radial problem in channel m: kappa = m + phi."""
    return m + phi


def channel_set(phi: float, M_max: int) -> list[tuple[int, float, bool]]:
    """(m, kappa, is_critical) for every m with |m| <= M_max.

    is_critical marks the channels where |kappa| < 1 and the extension angle
    theta selects the boundary condition.
    """
    critical = set(critical_channels(phi))
    return [
        (m, channel_kappa(phi, m), m in critical)
        for m in range(-M_max, M_max + 1)
    ]


@dataclass(frozen=True)
class PiecewiseTheta:
    """theta as a piecewise-constant function of p.

    values[i] applies on (breaks[i-1], breaks[i]]; values[-1] beyond the last
    break.  breaks must be strictly increasing.
    """

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ConfigurationError(
                "PiecewiseTheta needs exactly one more value than breakpoints"
            )
        if any(b >= c for b, c in zip(self.breaks, self.breaks[1:])):
            raise ConfigurationError("PiecewiseTheta breakpoints must increase")

    def theta_at(self, p: float) -> float:
        return self.values[bisect.bisect_left(self.breaks, p)]


@dataclass(frozen=True)
class ThetaSpec:
    """Extension angles for the critical channels of flux parameter phi.

    entries maps each critical m (and only those) to either a constant theta
    or a :class:`PiecewiseTheta` table in p.
    """

    phi: float
    entries: Mapping[int, float | PiecewiseTheta]

    def __post_init__(self):
        expected = set(critical_channels(self.phi))
        got = set(self.entries)
        if got != expected:
            raise ConfigurationError(
                f"theta entries must cover exactly the critical channels "
                f"{sorted(expected)} of phi={self.phi}; got {sorted(got)}"
            )

    @classmethod
    def constant(cls, phi: float, theta: float) -> "ThetaSpec":
        """Same theta for every critical channel."""
        return cls(phi, {m: theta for m in critical_channels(phi)})

    def theta_for(self, m: int, p: float) -> float:
        entry = self.entries[m]  # KeyError on non-critical m, by design
        if isinstance(entry, PiecewiseTheta):
            return entry.theta_at(p)
        return float(entry)

    def shifted(self, delta: float) -> "ThetaSpec":
        """All angles shifted by delta (used by the theta + pi equivalence tests)."""
        new = {}
        for m, entry in self.entries.items():
            if isinstance(entry, PiecewiseTheta):
                new[m] = PiecewiseTheta(
                    entry.breaks, tuple(v + delta for v in entry.values)
                )
            else:
                new[m] = entry + delta
        return ThetaSpec(self.phi, new)


@dataclass(frozen=True)
class ModeGrid:
    """Truncation of the channel sum/integral: |m| <= M_max, Gauss rule in p."""

    M_max: int
    p_nodes: np.ndarray
    p_weights: np.ndarray

    def __post_init__(self):
        if self.M_max < 0:
            raise ConfigurationError("M_max must be >= 0")
        if np.any(np.asarray(self.p_weights) <= 0.0):
            raise ConfigurationError("p weights must be positive")

    @classmethod
    def build(cls, M_max: int, P_max: float, n_p: int = 64) -> "ModeGrid":
        p, w = gauss_legendre(-P_max, P_max, n_p)
        return cls(M_max, p, w)

    @property
    def modes(self) -> range:
        return range(-self.M_max, self.M_max + 1)


@dataclass(frozen=True)
class ReductionGrid:
    """Quadrature for the angular/axial reduction integrals.

    Uniform (trapezoid) rule in the angle -- spectrally accurate for smooth
    periodic integrands -- and a Gauss-Legendre rule over the x3 support.
    """

    n_phi: int
    x3_nodes: np.ndarray
    x3_weights: np.ndarray

    @classmethod
    def build(cls, x3_support: tuple[float, float], n_x3: int = 96, n_phi: int = 128):
        lo, hi = x3_support
        x3, w3 = gauss_legendre(lo, hi, n_x3)
        return cls(n_phi, x3, w3)

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi


# --------------------------------------------------------------------------
# Field families


@dataclass(frozen=True)
class SeparableField:
    """Phi(r cos a, r sin a, x3) = r**-1/2 psi(r) chi(x3) e^{i m a}.

    Its channel reduction is exact: delta_{km} chi_hat(p) psi(r), which makes
    this the sharp test family for everything three-dimensional.
    """

    psi: Callable[[np.ndarray], np.ndarray]
    chi: Callable[[np.ndarray], np.ndarray]
    m: int
    r_support: tuple[float, float]
    x3_support: tuple[float, float]
    psi_d2: Callable[[np.ndarray], np.ndarray] | None = None
    chi_d2: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, r, angle, x3):
        r = np.asarray(r, dtype=float)
        return (
            self.psi(r)
            / np.sqrt(r)
            * np.asarray(self.chi(x3))
            * np.exp(1j * self.m * np.asarray(angle))
        )

    def hamiltonian_image(self, phi: float) -> "FieldSum":
        """The field H Phi, as a sum of two separable pieces.

        H acts on this family as r**-1/2 [ (l_q psi) chi - psi chi'' ] e^{ima}
        with q of order kappa = m + phi; requires analytic second derivatives.
        """
        if self.psi_d2 is None or self.chi_d2 is None:
            raise ConfigurationError(
                "hamiltonian_image needs analytic psi_d2 and chi_d2"
            )
        kappa = channel_kappa(phi, self.m)
        psi, psi_d2 = self.psi, self.psi_d2
        chi, chi_d2 = self.chi, self.chi_d2

        def lq_psi(r):
            r = np.asarray(r, dtype=float)
            return -np.asarray(psi_d2(r)) + (kappa * kappa - 0.25) / (r * r) * psi(r)

        def neg_chi_d2(x3):
            return -np.asarray(chi_d2(x3))

        return FieldSum(
            (
                SeparableField(lq_psi, chi, self.m, self.r_support, self.x3_support),
                SeparableField(psi, neg_chi_d2, self.m, self.r_support, self.x3_support),
            )
        )


@dataclass(frozen=True)
class FieldSum:
    """Pointwise sum of fields sharing the same supports."""

    terms: tuple

    def __call__(self, r, angle, x3):
        total = self.terms[0](r, angle, x3)
        for t in self.terms[1:]:
            total = total + t(r, angle, x3)
        return total

    @property
    def r_support(self):
        return self.terms[0].r_support

    @property
    def x3_support(self):
        return self.terms[0].x3_support


@dataclass(frozen=True)
class TransformedField:
    """field composed with the inverse symmetry: rotate by alpha, shift by beta.

    (Phi o G^-1)(r, angle, x3) = Phi(r, angle - alpha, x3 - beta); its channel
    coefficients are e^{-i m alpha - i p beta} times the original ones.
    """

    field: object
    alpha: float
    beta: float

    def __call__(self, r, angle, x3):
        return self.field(r, np.asarray(angle) - self.alpha, np.asarray(x3) - self.beta)

    @property
    def r_support(self):
        return self.field.r_support

    @property
    def x3_support(self):
        lo, hi = self.field.x3_support
        return (lo + self.beta, hi + self.beta)


# --------------------------------------------------------------------------
# Reduction


def _field_tensor(field, r_nodes, grid: ReductionGrid) -> np.ndarray:
    """Samples Phi(r_i, angle_j, x3_k), shape (n_r, n_phi, n_x3)."""
    r = np.asarray(r_nodes, dtype=float)[:, None, None]
    a = grid.angles[None, :, None]
    x3 = np.asarray(grid.x3_nodes, dtype=float)[None, None, :]
    return np.asarray(field(r, a, x3), dtype=complex)


def _angular_modes(tensor: np.ndarray, modes: Sequence[int]) -> dict[int, np.ndarray]:
    """(1/n_phi) sum_j Phi(.., angle_j, ..) e^{-i m angle_j} for each m, via FFT."""
    n_phi = tensor.shape[1]
    fft = np.fft.fft(tensor, axis=1) / n_phi
    return {m: fft[:, m % n_phi, :] for m in modes}


def _axial_transform(block: np.ndarray, grid: ReductionGrid, p_nodes) -> np.ndarray:
    """int dx3 e^{-i p x3} block(r, x3) for each p: shape (n_p, n_r)."""
    phases = np.exp(
        -1j * np.asarray(p_nodes, dtype=float)[:, None] * grid.x3_nodes[None, :]
    )
    return (phases * grid.x3_weights[None, :]) @ block.T


def radial_reduce(
    field, channel: ChannelIndex, r_nodes, grid: ReductionGrid, quad_weights=None
) -> RadialFunction:
    """Channel reduction of a field at a single (m, p), sampled at r_nodes."""
    r = np.asarray(r_nodes, dtype=float)
    tensor = _field_tensor(field, r, grid)
    mode = _angular_modes(tensor, [channel.m])[channel.m]
    values = np.sqrt(r) * _axial_transform(mode, grid, [channel.p])[0]
    if quad_weights is None:
        quad_weights = np.ones_like(r)
    return RadialFunction(r, np.asarray(quad_weights, dtype=float), values)


def field_norm_sq(field, r_rule, grid: ReductionGrid) -> float:
    """||Phi||^2 over R^3 by tensor quadrature (r dr x dangle x dx3)."""
    r, wr = r_rule
    tensor = _field_tensor(field, r, grid)
    dphi = 2.0 * math.pi / grid.n_phi
    per_r = np.einsum("ijk,k->i", np.abs(tensor) ** 2, grid.x3_weights) * dphi
    return float(np.sum(wr * np.asarray(r) * per_r))


# --------------------------------------------------------------------------
# Coefficients


@dataclass
class ChannelBlock:
    """Coefficients of one angular mode over a set of p nodes sharing one theta.

    continuum has shape (len(p_indices), n_E); atom_values has one column per
    atom of the shared measure.  theta is None off the critical set.
    """

    m: int
    kappa: float
    theta: float | None
    p_indices: np.ndarray
    quad: MeasureQuadrature
    continuum: np.ndarray
    atom_values: np.ndarray


@dataclass
class Coefficients3D:
    """Full forward transform of a field: blocks over (mode, theta-piece)."""

    phi: float
    grid: ModeGrid
    blocks: list[ChannelBlock]

    def norm_sq(self) -> float:
        total = 0.0
        for blk in self.blocks:
            pw = self.grid.p_weights[blk.p_indices]
            cont = np.sum(
                blk.quad.e_weights[None, :] * np.abs(blk.continuum) ** 2, axis=1
            )
            total += float(np.sum(pw * cont))
            for j, (_, weight) in enumerate(blk.quad.atoms):
                total += float(np.sum(pw * weight * np.abs(blk.atom_values[:, j]) ** 2))
        return total

    def channel_norm_sq(self, m: int) -> float:
        total = 0.0
        for blk in self.blocks:
            if blk.m != m:
                continue
            pw = self.grid.p_weights[blk.p_indices]
            cont = np.sum(
                blk.quad.e_weights[None, :] * np.abs(blk.continuum) ** 2, axis=1
            )
            total += float(np.sum(pw * cont))
            for j, (_, weight) in enumerate(blk.quad.atoms):
                total += float(np.sum(pw * weight * np.abs(blk.atom_values[:, j]) ** 2))
        return total

    def write_csv(self, fileobj: io.TextIOBase) -> None:
        for blk in self.blocks:
            for i, pi in enumerate(blk.p_indices):
                p = self.grid.p_nodes[pi]
                for j, (energy, weight) in enumerate(blk.quad.atoms):
                    v = blk.atom_values[i, j]
                    fileobj.write(
                        f"# atom m={blk.m} p={float(p)!r} {float(energy)!r} "
                        f"{float(weight)!r} {float(v.real)!r} {float(v.imag)!r}\n"
                    )
        fileobj.write("m,p,E,re,im\n")
        for blk in self.blocks:
            for i, pi in enumerate(blk.p_indices):
                p = self.grid.p_nodes[pi]
                for e, v in zip(blk.quad.e_nodes, blk.continuum[i]):
                    fileobj.write(
                        f"{blk.m},{float(p)!r},{float(e)!r},"
                        f"{float(v.real)!r},{float(v.imag)!r}\n"
                    )


def _theta_groups(spec: ThetaSpec, m: int, p_nodes) -> list[tuple[float | None, np.ndarray]]:
    """Group p-node indices by the theta value in force (None off-critical)."""
    if m not in set(critical_channels(spec.phi)):
        return [(None, np.arange(len(p_nodes)))]
    thetas = [spec.theta_for(m, float(p)) for p in p_nodes]
    groups: dict[float, list[int]] = {}
    for i, t in enumerate(thetas):
        groups.setdefault(t, []).append(i)
    return [(t, np.asarray(idx)) for t, idx in sorted(groups.items())]


def full_forward(
    spec: ThetaSpec,
    field,
    grid: ModeGrid,
    r_rule,
    reduction: ReductionGrid,
    E_max: float,
    node_budget: int = 16,
) -> Coefficients3D:
    """Channel-decompose a field and forward-transform every channel.

    r_rule is a (nodes, weights) Gauss rule on the field's radial support;
    E_max applies to every channel (the radial series bound caps it at
    2500 / b**2 for support right edge b).
    """
    r, wr = r_rule
    r = np.asarray(r, dtype=float)
    wr = np.asarray(wr, dtype=float)
    tensor = _field_tensor(field, r, reduction)
    modes = _angular_modes(tensor, list(grid.modes))

    blocks: list[ChannelBlock] = []
    for m in grid.modes:
        reduced = np.sqrt(r)[None, :] * _axial_transform(
            modes[m], reduction, grid.p_nodes
        )  # (n_p, n_r)
        kappa = channel_kappa(spec.phi, m)
        for theta, p_idx in _theta_groups(spec, m, grid.p_nodes):
            params = ExtensionParams(kappa, theta if theta is not None else 0.0)
            measure = channel_measure(spec.phi, spec, m, float(grid.p_nodes[p_idx[0]]))
            quad = discretize(measure, E_max, node_budget)
            weighted = reduced[p_idx] * wr[None, :]  # (n_group, n_r)
            K, atom_rows = kernel_matrix(params, quad, r)
            continuum = weighted @ K.T
            atoms = np.zeros((len(p_idx), len(atom_rows)), dtype=complex)
            for j, row in enumerate(atom_rows):
                atoms[:, j] = weighted @ row
            blocks.append(
                ChannelBlock(m, kappa, theta, p_idx, quad, continuum, atoms)
            )
    return Coefficients3D(spec.phi, grid, blocks)


def apply_H(spec: ThetaSpec, coeffs: Coefficients3D) -> Coefficients3D:
    """Diagonalized Hamiltonian: multiply by p**2 + E (p**2 + E_b on atoms)."""
    blocks = []
    for blk in coeffs.blocks:
        p = coeffs.grid.p_nodes[blk.p_indices]
        factor = p[:, None] ** 2 + blk.quad.e_nodes[None, :]
        atoms = blk.atom_values.copy()
        for j, (energy, _) in enumerate(blk.quad.atoms):
            atoms[:, j] = (p**2 + energy) * atoms[:, j]
        blocks.append(
            ChannelBlock(
                blk.m,
                blk.kappa,
                blk.theta,
                blk.p_indices,
                blk.quad,
                factor * blk.continuum,
                atoms,
            )
        )
    return Coefficients3D(coeffs.phi, coeffs.grid, blocks)


def coefficient_distance(a: Coefficients3D, b: Coefficients3D) -> float:
    """Measure-weighted L2 distance between two coefficient sets on one grid."""
    total = 0.0
    for blk_a, blk_b in zip(a.blocks, b.blocks):
        pw = a.grid.p_weights[blk_a.p_indices]
        diff = np.sum(
            blk_a.quad.e_weights[None, :]
            * np.abs(blk_a.continuum - blk_b.continuum) ** 2,
            axis=1,
        )
        total += float(np.sum(pw * diff))
        for j, (_, weight) in enumerate(blk_a.quad.atoms):
            total += float(
                np.sum(
                    pw
                    * weight
                    * np.abs(blk_a.atom_values[:, j] - blk_b.atom_values[:, j]) ** 2
                )
            )
    return math.sqrt(total)


def symmetry_phase(coeffs: Coefficients3D, alpha: float, beta: float) -> Coefficients3D:
    """Coefficients of the rotated/translated field predicted by covariance."""
    blocks = []
    for blk in coeffs.blocks:
        p = coeffs.grid.p_nodes[blk.p_indices]
        phase = np.exp(-1j * (blk.m * alpha + p * beta))[:, None]
        blocks.append(
            ChannelBlock(
                blk.m,
                blk.kappa,
                blk.theta,
                blk.p_indices,
                blk.quad,
                phase * blk.continuum,
                phase * blk.atom_values,
            )
        )
    return Coefficients3D(coeffs.phi, coeffs.grid, blocks)


def symmetry_defect(
    spec: ThetaSpec,
    field,
    alpha: float,
    beta: float,
    grid: ModeGrid,
    r_rule,
    reduction: ReductionGrid,
    E_max: float,
    node_budget: int = 16,
    base: Coefficients3D | None = None,
) -> float:
    """sup |c_transformed - e^{-i m alpha - i p beta} c| over sampled (m,p,E).

    base, if given, must be full_forward of the untransformed field on the
    same grids (lets callers amortize it over several (alpha, beta) pairs).
    """
    if base is None:
        base = full_forward(spec, field, grid, r_rule, reduction, E_max, node_budget)
    moved = TransformedField(field, alpha, beta)
    transformed = full_forward(
        spec, moved, grid, r_rule, reduction, E_max, node_budget
    )
    predicted = symmetry_phase(base, alpha, beta)
    worst = 0.0
    for blk_t, blk_p in zip(transformed.blocks, predicted.blocks):
        if blk_t.continuum.size:
            worst = max(worst, float(np.max(np.abs(blk_t.continuum - blk_p.continuum))))
        if blk_t.atom_values.size:
            worst = max(
                worst, float(np.max(np.abs(blk_t.atom_values - blk_p.atom_values)))
            )
    return worst


def eigenfunction_3d(
    spec: ThetaSpec, channel: ChannelIndex, E: float, x: Sequence[float]
) -> complex:
    """Generalized 3D eigenfunction of channel (m, p) at energy E and point x.

    value = e^{i p x3} / (2 pi sqrt(r)) * ((x1 + i x2)/r)**m * J(E | r) with
    r = hypot(x1, x2) and J the channel's radial eigenfunction.
    """
    x1, x2, x3 = (float(c) for c in x)
    r = math.hypot(x1, x2)
    if r == 0.0:
        raise DomainError("eigenfunction_3d is undefined on the x3-axis")
    m = channel.m
    kappa = channel_kappa(spec.phi, m)
    if abs(kappa) < 1.0:
        theta = spec.theta_for(m, channel.p)
        params = ExtensionParams(kappa, theta)
    else:
        params = ExtensionParams(kappa)
    radial = complex(kernel_values(params, float(E), r))
    angular = ((x1 + 1j * x2) / r) ** m
    return (
        np.exp(1j * channel.p * x3) * angular * radial / (2.0 * math.pi * math.sqrt(r))
    )


def bound_state_table(spec: ThetaSpec) -> list[tuple[int, float, float, float, float]]:
    """(m, kappa, E_b, weight, theta) rows for every critical-channel bound state.

    theta is reported modulo pi (the canonical representative), so two specs
    differing by multiples of pi -- physically identical extensions -- produce
    identical tables.  Piecewise theta tables contribute one row per distinct
    theta class that produces a bound state.
    """
    from .measures import atom_weight, bound_state_energy, has_bound_state

    rows = []
    for m in critical_channels(spec.phi):
        entry = spec.entries[m]
        thetas = (
            entry.values if isinstance(entry, PiecewiseTheta) else (float(entry),)
        )
        seen = set()
        for theta in thetas:
            params = ExtensionParams(channel_kappa(spec.phi, m), theta)
            canonical = params.theta_mod_pi
            if canonical in seen:
                continue
            seen.add(canonical)
            if has_bound_state(params):
                rows.append(
                    (
                        m,
                        params.kappa,
                        bound_state_energy(params),
                        atom_weight(params),
                        canonical,
                    )
                )
    return rows


def write_bound_state_csv(rows, fileobj: io.TextIOBase) -> None:
    fileobj.write("m,kappa,E_b,weight,theta\n")
    for m, kappa, energy, weight, theta in rows:
        fileobj.write(f"{m},{kappa!r},{energy!r},{weight!r},{theta!r}\n")
