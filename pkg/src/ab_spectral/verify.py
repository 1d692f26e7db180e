"""Property suite: every identity the library promises, measured and reported.

Each check computes a single nonnegative defect and compares it against a
fixed tolerance; a :class:`CheckResult` records the measurement.  Negative
controls are first-class: they run configurations where the theory demands a
visible failure (e.g. dropping bound-state atoms from Parseval sums) and are
flagged via ``params["control"]`` so that an expected failure does not count
against the suite's exit status.

The report is a deterministic JSON array sorted by (check_id, params).
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import ab3d
from .bumps import GaussianBump, GaussianProfile
from .errors import ConfigurationError
from .measures import (
    ExtensionParams,
    ac_density,
    atom_weight,
    bound_state_energy,
    discretize,
    gauss_legendre,
    has_bound_state,
    spectral_measure,
)
from .special import ZETA_BOUND, theta_kappa, u_eigen, u_theta_eigen, w_eigen, wronskian
from .transform import (
    RadialFunction,
    apply_l_q,
    forward,
    parseval_defect,
    roundtrip_defect,
)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check at one parameter tuple; passed iff measured <= tolerance."""

    check_id: str
    params: dict
    measured: float
    tolerance: float
    passed: bool
    error: str | None = None

    @classmethod
    def from_measurement(cls, check_id, params, measured, tolerance):
        measured = float(measured)
        return cls(check_id, params, measured, tolerance, measured <= tolerance)

    @property
    def is_control(self) -> bool:
        return bool(self.params.get("control", False))

    def to_json_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "params": self.params,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "error": self.error,
        }


class DoublingResult(NamedTuple):
    """Chosen cutoff and whether successive defects actually stabilized."""

    value: float
    converged: bool


def doubling_rule(
    defect_fn: Callable[[float], float], start: float, cap: float, tol: float
) -> DoublingResult:
    """Double a cutoff until the defect stops moving.

    Returns the smallest cutoff v for which |defect(2v) - defect(v)| < tol/10,
    or the cap (converged=False) when no stabilization is observed below it.
    """
    if cap < start:
        raise ConfigurationError("doubling_rule requires cap >= start")
    value = start
    current = defect_fn(value)
    while 2.0 * value <= cap:
        nxt = defect_fn(2.0 * value)
        if abs(nxt - current) < tol / 10.0:
            return DoublingResult(value, True)
        value, current = 2.0 * value, nxt
    # never stabilized: report the largest cutoff probed with a warning flag
    return DoublingResult(value, False)


@dataclass(frozen=True)
class SuiteConfig:
    """Parameter grids and resolutions for the property suite."""

    kappas: tuple = (0.0, 0.3, -0.7, 1.5, 3.0)
    thetas: tuple = (0.0, 1.0, math.pi / 2)
    phis: tuple = (0.5,)
    support: tuple = (0.5, 3.0)
    r_nodes: int = 64
    node_budget: int = 32
    m_max: int = 3
    n_p: int = 64
    p_max: float = 8.0
    include_atoms: bool = True
    negative_controls: bool = True

    def __post_init__(self):
        if self.support[0] <= 0.0 or self.support[1] <= self.support[0]:
            raise ConfigurationError("support must satisfy 0 < a < b")

    @property
    def e_cap(self) -> float:
        """Largest usable E_max: the series bound divided by the support edge."""
        return ZETA_BOUND / self.support[1] ** 2

    def extension_pairs(self):
        """(kappa, theta) with theta fixed to 0 off the extension family."""
        pairs = []
        for kappa in self.kappas:
            if abs(kappa) < 1.0:
                pairs.extend((kappa, theta) for theta in self.thetas)
            else:
                pairs.append((kappa, 0.0))
        return pairs


# --------------------------------------------------------------------------
# Individual checks (each returns the measured defect)


def _check_wronskian(kappa: float, r: float) -> float:
    u = u_eigen(kappa, 0.0, r)
    w = w_eigen(kappa, 0.0, r)
    return abs(float(wronskian(u, w)) - 2.0 / math.pi)


def _check_bessel_half_order(sign: float) -> float:
    from .special import chi_kappa

    zeta = np.linspace(0.1, 100.0, 1000)
    values = chi_kappa(0.5 * sign, zeta)
    root = np.sqrt(zeta)
    if sign > 0:
        exact = math.sqrt(2.0 / math.pi) * np.sin(root) / root
    else:
        exact = math.sqrt(2.0 / math.pi) * np.cos(root)
    return float(np.max(np.abs(values - exact) / np.abs(exact)))


def _ode_residual(kappa, theta, E, r, h) -> float:
    """Finite-difference residual of the radial equation; O(h^2) by design."""

    def u(x):
        if abs(kappa) < 1.0:
            return np.asarray(u_theta_eigen(kappa, theta, E, x).value)
        return np.asarray(u_eigen(abs(kappa), E, x).value)

    d2 = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h)
    q = (kappa * kappa - 0.25) / (r * r)
    return float(np.max(np.abs(-d2 + q * u(r) - E * u(r))))


def _check_ode_ratio(kappa, theta, E) -> float:
    r = np.linspace(0.6, 2.0, 16)
    h = 1e-2
    ratio = _ode_residual(kappa, theta, E, r, h) / _ode_residual(
        kappa, theta, E, r, h / 2.0
    )
    return abs(ratio - 4.0)


def _check_bound_state_reference(kind: str) -> float:
    if kind == "half_pi_energy":
        worst = 0.0
        for kappa in np.linspace(-0.9, 0.9, 19):
            energy = bound_state_energy(ExtensionParams(float(kappa), math.pi / 2))
            worst = max(worst, abs(energy + 1.0))
        return worst
    if kind == "quarter_pi_energy":
        energy = bound_state_energy(ExtensionParams(0.0, math.pi / 4))
        return abs(energy + math.exp(math.pi))
    if kind == "half_pi_weight":
        weight = atom_weight(ExtensionParams(0.0, math.pi / 2))
        return abs(weight - math.pi**2 / 2.0)
    if kind == "kappa_zero_limit":
        worst = 0.0
        for theta in (0.9, math.pi / 2, 2.2):
            small = ExtensionParams(1e-4, theta)
            zero = ExtensionParams(0.0, theta)
            e0, w0 = bound_state_energy(zero), atom_weight(zero)
            worst = max(
                worst,
                abs(bound_state_energy(small) - e0) / abs(e0),
                abs(atom_weight(small) - w0) / w0,
            )
        return worst
    raise ConfigurationError(f"unknown bound-state reference check {kind!r}")


def _check_measure_collapse(kappa: float, E: float) -> float:
    """At theta = theta_kappa the density collapses to the |kappa| >= 1 form."""
    value = ac_density(ExtensionParams(kappa, theta_kappa(kappa)), E)
    exact = 0.5 * E**kappa
    return abs(value - exact) / exact


def _suite_bump(config: SuiteConfig) -> RadialFunction:
    bump = GaussianBump(*config.support)
    r, w = gauss_legendre(config.support[0], config.support[1], config.r_nodes)
    return RadialFunction(r, w, bump(r), second_derivative=bump.derivative2)


def _unitarity_defects(
    config: SuiteConfig, kappa: float, theta: float, include_atoms=True
):
    """(parseval, roundtrip, diagonalization, E_max, converged) for one extension."""
    psi = _suite_bump(config)
    params = ExtensionParams(kappa, theta)
    measure = spectral_measure(params)
    cap = config.e_cap

    def defect_at(e_max: float) -> float:
        quad = discretize(measure, e_max, config.node_budget)
        pv = parseval_defect(psi, forward(params, psi, quad, include_atoms))
        return max(pv, roundtrip_defect(params, psi, quad))

    chosen = doubling_rule(defect_at, cap / 4.0, cap, 1e-6)
    quad = discretize(measure, chosen.value, config.node_budget)
    coeffs = forward(params, psi, quad, include_atoms)
    pv = parseval_defect(psi, coeffs)
    rt = roundtrip_defect(params, psi, quad)

    image = forward(params, apply_l_q(kappa, psi), quad, include_atoms)
    num = float(
        np.sum(
            quad.e_weights
            * np.abs(image.continuum_values - quad.e_nodes * coeffs.continuum_values)
            ** 2
        )
    )
    for j, (energy, weight) in enumerate(quad.atoms):
        num += weight * abs(image.atom_values[j] - energy * coeffs.atom_values[j]) ** 2
    diag = math.sqrt(num / psi.norm_sq())
    return pv, rt, diag, chosen.value, chosen.converged


def _check_sine_transform(config: SuiteConfig) -> float:
    """kappa = 1/2 at the reference angle: the kernel is the sine kernel."""
    psi = _suite_bump(config)
    params = ExtensionParams(0.5, theta_kappa(0.5))
    quad = discretize(spectral_measure(params), config.e_cap, config.node_budget)
    coeffs = forward(params, psi, quad)
    root = np.sqrt(quad.e_nodes)
    exact = np.array(
        [
            math.sqrt(2.0 / math.pi)
            / rt
            * np.sum(psi.quad_weights * np.sin(psi.r_nodes * rt) * psi.values.real)
            for rt in root
        ]
    )
    return float(np.max(np.abs(coeffs.continuum_values - exact)))


def _check_theta_periodicity_measure(kappa: float, theta: float) -> float:
    E = np.geomspace(1e-3, 100.0, 200)
    a = ac_density(ExtensionParams(kappa, theta), E)
    b = ac_density(ExtensionParams(kappa, theta + math.pi), E)
    return float(np.max(np.abs(a - b)))


def _check_theta_periodicity_coefficients(config: SuiteConfig, kappa, theta) -> float:
    """Exact sign flip of forward coefficients under theta -> theta + pi.

    theta must be representable so that theta + pi rounds exactly (e.g. 0.25,
    0.5, 1.0); then the flipped kernel is bitwise the negated kernel.  theta
    must also keep any bound state shallow enough for the kernel series
    (|E_b| * b**2 within the series bound).
    """
    psi = _suite_bump(config)
    p1 = ExtensionParams(kappa, theta)
    p2 = ExtensionParams(kappa, theta + math.pi)
    quad = discretize(spectral_measure(p1), config.e_cap / 4.0, config.node_budget)
    c1 = forward(p1, psi, quad)
    c2 = forward(p2, psi, quad)
    worst = float(np.max(np.abs(c1.continuum_values + c2.continuum_values)))
    if len(quad.atoms):
        worst = max(worst, float(np.max(np.abs(c1.atom_values + c2.atom_values))))
    return worst


def _check_measure_continuity(config: SuiteConfig, theta: float) -> float:
    """Integrals against a fixed bump converge monotonically as kappa -> 0.

    measured = max ratio of successive distances to the kappa = 0 value;
    passing (<= 1) certifies monotone decrease.
    """
    profile = GaussianBump(-2.0, 5.0, center=1.0, width=1.2)

    def integral(kappa: float) -> float:
        params = ExtensionParams(kappa, theta)
        quad = discretize(spectral_measure(params), 40.0, config.node_budget)
        total = float(np.sum(quad.e_weights * profile(quad.e_nodes)))
        for energy, weight in quad.atoms:
            total += weight * float(profile(energy))
        return total

    reference = integral(0.0)
    distances = [abs(integral(k) - reference) for k in (1e-2, 5e-3, 2.5e-3)]
    return max(b / a for a, b in zip(distances, distances[1:]))


def _3d_setup(config: SuiteConfig, phi: float):
    psi = GaussianBump(*config.support)
    chi = GaussianProfile(center=0.3, width=0.7)
    fld = ab3d.SeparableField(
        psi,
        chi,
        0,
        config.support,
        chi.support,
        psi_d2=psi.derivative2,
        chi_d2=chi.derivative2,
    )
    spec = ab3d.ThetaSpec.constant(phi, 1.0)
    grid = ab3d.ModeGrid.build(config.m_max, config.p_max, config.n_p)
    red = ab3d.ReductionGrid.build(chi.support)
    r_rule = gauss_legendre(config.support[0], config.support[1], config.r_nodes)
    return spec, fld, grid, red, r_rule


def _check_3d(config: SuiteConfig, phi: float, which: str) -> float:
    spec, fld, grid, red, r_rule = _3d_setup(config, phi)
    e_max = config.e_cap
    base = ab3d.full_forward(spec, fld, grid, r_rule, red, e_max)
    if which == "selectivity":
        active = base.channel_norm_sq(fld.m)
        cross = max(base.channel_norm_sq(m) for m in grid.modes if m != fld.m)
        return cross / active
    if which == "parseval":
        nsq = ab3d.field_norm_sq(fld, r_rule, red)
        return abs(nsq - base.norm_sq()) / nsq
    if which == "apply_h":
        nsq = ab3d.field_norm_sq(fld, r_rule, red)
        image = ab3d.full_forward(
            spec, fld.hamiltonian_image(phi), grid, r_rule, red, e_max
        )
        return ab3d.coefficient_distance(
            image, ab3d.apply_H(spec, base)
        ) / math.sqrt(nsq)
    if which == "symmetry":
        return max(
            ab3d.symmetry_defect(
                spec, fld, alpha, beta, grid, r_rule, red, e_max, base=base
            )
            for alpha, beta in ((0.7, 0.0), (0.0, 1.3), (0.7, 1.3))
        )
    raise ConfigurationError(f"unknown 3d check {which!r}")


def _negative_control_results(config: SuiteConfig) -> list[CheckResult]:
    """Drop the bound-state atom and demand the Parseval deficit it predicts."""
    kappa, theta = 0.3, math.pi / 2
    psi = _suite_bump(config)
    params = ExtensionParams(kappa, theta)
    quad = discretize(spectral_measure(params), config.e_cap, config.node_budget)
    with_atom = forward(params, psi, quad, include_atoms=True)
    without = forward(params, psi, quad, include_atoms=False)
    deficit = parseval_defect(psi, without)
    energy, weight = quad.atoms[0]
    oracle = weight * abs(with_atom.atom_values[0]) ** 2 / psi.norm_sq()
    base_params = {"kappa": kappa, "theta": theta, "control": True}
    control = CheckResult(
        check_id="negative_control_atom_dropped",
        params={**base_params, "deficit": deficit, "required_minimum": 1e-3},
        measured=deficit,
        tolerance=1e-6,
        passed=False,
    )
    magnitude = CheckResult.from_measurement(
        "negative_control_deficit_matches_atom",
        {"kappa": kappa, "theta": theta},
        abs(deficit - oracle) / oracle,
        1e-6,
    )
    return [control, magnitude]


# --------------------------------------------------------------------------
# Suite assembly


def _build_jobs(config: SuiteConfig):
    """(check_id, params, tolerance, thunk) for every enabled check."""
    jobs = []

    for kappa in (0.0, 0.25, -0.25, 0.5, -0.5, 0.9, -0.9):
        for r in (0.1, 1.0, 10.0):
            jobs.append(
                (
                    "wronskian",
                    {"kappa": kappa, "r": r},
                    1e-9,
                    lambda kappa=kappa, r=r: _check_wronskian(kappa, r),
                )
            )

    for sign in (1.0, -1.0):
        jobs.append(
            (
                "bessel_half_order",
                {"kappa": 0.5 * sign},
                1e-10,
                lambda sign=sign: _check_bessel_half_order(sign),
            )
        )

    ode_tuples = [
        (0.0, 0.0, 1.0),
        (0.0, 1.0, -1.0),
        (0.0, math.pi / 2, 10.0),
        (0.3, 0.0, 1.0),
        (0.3, 1.0, 10.0),
        (0.3, math.pi / 2, -1.0),
        (-0.7, 0.0, 10.0),
        (-0.7, 1.0, 1.0),
        (-0.7, math.pi / 2, -1.0),
        (0.5, 0.7, 5.0),
        (1.5, 0.0, 1.0),
        (3.0, 0.0, 5.0),
    ]
    for kappa, theta, E in ode_tuples:
        jobs.append(
            (
                "ode_residual_ratio",
                {"kappa": kappa, "theta": theta, "E": E},
                0.4,
                lambda kappa=kappa, theta=theta, E=E: _check_ode_ratio(kappa, theta, E),
            )
        )

    for kind, tol in (
        ("half_pi_energy", 1e-12),
        ("quarter_pi_energy", 1e-12),
        ("half_pi_weight", 1e-12),
        ("kappa_zero_limit", 1e-6),
    ):
        jobs.append(
            (
                "bound_state_reference",
                {"kind": kind},
                tol,
                lambda kind=kind: _check_bound_state_reference(kind),
            )
        )

    for kappa in (0.2, 0.5, 0.8):
        for E in (0.1, 1.0, 10.0):
            jobs.append(
                (
                    "measure_collapse",
                    {"kappa": kappa, "E": E},
                    1e-12,
                    lambda kappa=kappa, E=E: _check_measure_collapse(kappa, E),
                )
            )

    # The unitarity checks (Parseval/roundtrip/diagonalization) share one
    # expensive kernel evaluation per extension and are scheduled directly in
    # run_suite rather than as independent jobs here.

    jobs.append(
        ("sine_transform", {"kappa": 0.5}, 1e-8, lambda: _check_sine_transform(config))
    )

    for kappa in (0.0, 0.3, -0.7):
        for theta in (0.5, 1.0):
            jobs.append(
                (
                    "theta_periodicity_measure",
                    {"kappa": kappa, "theta": theta},
                    1e-12,
                    lambda kappa=kappa, theta=theta: _check_theta_periodicity_measure(
                        kappa, theta
                    ),
                )
            )
        jobs.append(
            (
                "theta_periodicity_coefficients",
                {"kappa": kappa, "theta": 1.0},
                0.0,
                lambda kappa=kappa: _check_theta_periodicity_coefficients(
                    config, kappa, 1.0
                ),
            )
        )

    for theta in (0.0, 1.0, math.pi / 2):
        jobs.append(
            (
                "measure_continuity_kappa_to_zero",
                {"theta": theta},
                1.0,
                lambda theta=theta: _check_measure_continuity(config, theta),
            )
        )

    for phi in config.phis:
        for which, tol in (
            ("selectivity", 1e-10),
            ("parseval", 1e-5),
            ("apply_h", 1e-4),
            ("symmetry", 1e-6),
        ):
            jobs.append(
                (
                    f"threed_{which}",
                    {"phi": phi},
                    tol,
                    lambda phi=phi, which=which: _check_3d(config, phi, which),
                )
            )

    return jobs


def run_suite(config: SuiteConfig | None = None) -> list[CheckResult]:
    """Run every check; failures never abort, errors are recorded in place."""
    config = config or SuiteConfig()
    if not config.kappas:
        return []

    results: list[CheckResult] = []

    def run_job(check_id, params, tolerance, thunk):
        try:
            measured = thunk()
        except Exception as exc:  # noqa: BLE001 - recorded, never raised
            return CheckResult(
                check_id, params, math.inf, tolerance, False, error=repr(exc)
            )
        return CheckResult.from_measurement(check_id, params, measured, tolerance)

    jobs = _build_jobs(config)
    workers = max(1, int(os.environ.get("AB_SPECTRAL_THREADS", "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results.extend(pool.map(lambda j: run_job(*j), jobs))
    else:
        results.extend(run_job(*j) for j in jobs)

    # Unitarity checks share one expensive defect evaluation per extension.
    for kappa, theta in config.extension_pairs():
        params = {"kappa": kappa, "theta": theta, "atoms": config.include_atoms}
        try:
            pv, rt, diag, e_max, converged = _unitarity_defects(
                config, kappa, theta, config.include_atoms
            )
        except Exception as exc:  # noqa: BLE001
            for which, tol in (
                ("parseval", 1e-6),
                ("roundtrip", 1e-6),
                ("diagonalization", 1e-5),
            ):
                results.append(
                    CheckResult(
                        f"unitarity_{which}", params, math.inf, tol, False, repr(exc)
                    )
                )
            continue
        extra = {**params, "E_max": e_max, "doubling_converged": converged}
        dropped_atom = (
            not config.include_atoms
            and abs(kappa) < 1.0
            and has_bound_state(ExtensionParams(kappa, theta))
        )
        if dropped_atom:
            extra = {**extra, "control": True}
        results.append(
            CheckResult.from_measurement("unitarity_parseval", extra, pv, 1e-6)
        )
        results.append(
            CheckResult.from_measurement("unitarity_roundtrip", extra, rt, 1e-6)
        )
        results.append(
            CheckResult.from_measurement("unitarity_diagonalization", extra, diag, 1e-5)
        )

    if config.negative_controls:
        results.extend(_negative_control_results(config))

    results.sort(key=lambda r: (r.check_id, json.dumps(r.params, sort_keys=True)))
    return results


def suite_exit_status(results: list[CheckResult]) -> int:
    """0 iff every non-control check passed."""
    return 0 if all(r.passed or r.is_control for r in results) else 1


def write_report(results: list[CheckResult], path: str) -> None:
    """Deterministic JSON array, written atomically (temp file + rename)."""
    payload = json.dumps(
        [r.to_json_dict() for r in results], indent=2, sort_keys=True
    )
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
