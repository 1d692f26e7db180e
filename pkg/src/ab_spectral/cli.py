"""Command-line surface: evaluate, tabulate, transform, verify, export.

Commands
--------
eigenfunction   sample a radial eigenfunction on an r-grid -> CSV
measure         tabulate a spectral measure density (plus atoms) -> CSV
bound-states    bound-state table for a flux/theta configuration -> CSV
transform       forward transform of a profile; Parseval/roundtrip summary
verify          run the property suite -> JSON report

Grids use the range syntax ``start:stop:count``.  Configuration files are
flat INI text: a ``[run]`` section (phi, grids, paths) and a ``[theta]``
section mapping each critical channel m to either a constant angle or a
piecewise table ``b1,b2:v1,v2,v3`` (breakpoints : values).  All output files
are written atomically with '\\n' line endings.

Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import io
import math
import os
import sys
import tempfile

import numpy as np

from . import ab3d
from .bumps import GaussianBump, GaussianProfile
from .errors import ConfigurationError, DomainError
from .measures import (
    ExtensionParams,
    discretize,
    gauss_legendre,
    spectral_measure,
)
from .special import ZETA_BOUND, u_eigen, u_theta_eigen
from .transform import RadialFunction, forward, parseval_defect, roundtrip_defect
from .verify import SuiteConfig, run_suite, suite_exit_status, write_report

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Invalid flags, config, or input files; maps to exit code 2."""


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_range(text: str) -> np.ndarray:
    """start:stop:count -> linspace; locale-independent '.' decimals."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be start:stop:count, got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}: {exc}") from exc
    if count < 1:
        raise UsageError("range count must be >= 1")
    return np.linspace(start, stop, count)


def _parse_theta_entry(text: str):
    """Constant angle, or 'b1,b2:v1,v2,v3' piecewise table."""
    if ":" in text:
        breaks_text, values_text = text.split(":", 1)
        breaks = tuple(float(t) for t in breaks_text.split(",") if t.strip())
        values = tuple(float(t) for t in values_text.split(","))
        return ab3d.PiecewiseTheta(breaks, values)
    return float(text)


def load_config(path: str) -> dict:
    """Read the INI config into {'phi': float, 'spec': ThetaSpec, 'run': dict}."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise UsageError(f"cannot read config file {path!r}")
    if "run" not in parser or "phi" not in parser["run"]:
        raise UsageError("config needs a [run] section with a phi entry")
    try:
        phi = float(parser["run"]["phi"])
        entries = {
            int(m): _parse_theta_entry(v) for m, v in parser["theta"].items()
        } if "theta" in parser else {}
        spec = ab3d.ThetaSpec(phi, entries)
    except (ValueError, ConfigurationError) as exc:
        raise UsageError(f"bad config: {exc}") from exc
    return {"phi": phi, "spec": spec, "run": dict(parser["run"])}


# --------------------------------------------------------------------------
# Commands


def cmd_eigenfunction(args) -> int:
    kappa = args.kappa
    r = parse_range(args.r)
    if np.any(r <= 0.0):
        raise UsageError("r grid must be strictly positive (off the axis)")
    if abs(kappa) < 1.0:
        if args.theta is None:
            raise UsageError("--theta is required when |kappa| < 1")
        result = u_theta_eigen(kappa, args.theta, args.energy, r)
    else:
        result = u_eigen(abs(kappa), args.energy, r)
    out = io.StringIO()
    out.write("r,u,du_dr\n")
    for ri, v, d in zip(r, np.atleast_1d(result.value), np.atleast_1d(result.d_dr)):
        out.write(f"{float(ri)!r},{float(v)!r},{float(d)!r}\n")
    _atomic_write(args.output, out.getvalue())
    return EXIT_OK


def cmd_measure(args) -> int:
    if abs(args.kappa) < 1.0 and args.theta is None:
        raise UsageError("--theta is required when |kappa| < 1")
    params = ExtensionParams(args.kappa, args.theta or 0.0)
    measure = spectral_measure(params)
    energies = parse_range(args.energies)
    out = io.StringIO()
    measure.write_csv(out, energies)
    _atomic_write(args.output, out.getvalue())
    return EXIT_OK


def cmd_bound_states(args) -> int:
    config = load_config(args.config)
    rows = ab3d.bound_state_table(config["spec"])
    out = io.StringIO()
    ab3d.write_bound_state_csv(rows, out)
    _atomic_write(args.output, out.getvalue())
    return EXIT_OK


def _read_profile_csv(path: str) -> RadialFunction:
    """CSV 'r,re,im' -> RadialFunction with trapezoid weights on the r grid."""
    rows = []
    try:
        fh = open(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path!r}: {exc}") from exc
    with fh:
        header = fh.readline()
        if header.strip() != "r,re,im":
            raise UsageError(f"{path}:1: expected header 'r,re,im'")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.strip().split(",")
            if len(parts) != 3:
                raise UsageError(f"{path}:{lineno}: expected 3 fields")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from exc
    if len(rows) < 8:
        raise UsageError(f"{path}: need at least 8 samples")
    r = np.array([row[0] for row in rows])
    values = np.array([complex(row[1], row[2]) for row in rows])
    weights = np.gradient(r)
    return RadialFunction(r, weights, values)


def _named_family(text: str) -> RadialFunction:
    """'gauss:a:b' -> the standard Gaussian bump on [a, b], Gauss-sampled."""
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "gauss":
        raise UsageError(f"unknown test family {text!r} (expected gauss:a:b)")
    try:
        a, b = float(parts[1]), float(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad family bounds in {text!r}") from exc
    if not 0.0 < a < b:
        raise UsageError("family bounds must satisfy 0 < a < b")
    bump = GaussianBump(a, b)
    return RadialFunction.from_callable(
        bump, a, b, 64, second_derivative=bump.derivative2
    )


def cmd_transform(args) -> int:
    if args.mode == "3d":
        return _cmd_transform_3d(args)
    if args.theta is None and abs(args.kappa) < 1.0:
        raise UsageError("--theta is required when |kappa| < 1")
    if args.family:
        psi = _named_family(args.family)
    elif args.input:
        psi = _read_profile_csv(args.input)
    else:
        raise UsageError("transform needs --family or --input")
    params = ExtensionParams(args.kappa, args.theta or 0.0)
    b = float(psi.r_nodes[-1])
    e_max = ZETA_BOUND / (b * b)
    quad = discretize(spectral_measure(params), e_max, args.node_budget)
    coeffs = forward(params, psi, quad)
    pv = parseval_defect(psi, coeffs)
    rt = roundtrip_defect(params, psi, quad)
    out = io.StringIO()
    coeffs.write_csv(out)
    _atomic_write(args.output, out.getvalue())
    print(f"parseval_defect={pv:.6e} roundtrip_defect={rt:.6e}")
    return EXIT_OK


def _cmd_transform_3d(args) -> int:
    if not args.config:
        raise UsageError("--mode 3d requires --config")
    config = load_config(args.config)
    spec = config["spec"]
    run = config["run"]
    a = float(run.get("support_a", 0.5))
    b = float(run.get("support_b", 3.0))
    m0 = int(run.get("field_m", 0))
    psi = GaussianBump(a, b)
    chi = GaussianProfile(center=0.0, width=0.7)
    fld = ab3d.SeparableField(
        psi, chi, m0, (a, b), chi.support,
        psi_d2=psi.derivative2, chi_d2=chi.derivative2,
    )
    grid = ab3d.ModeGrid.build(
        int(run.get("m_max", 3)),
        float(run.get("p_max", 8.0)),
        int(run.get("n_p", 64)),
    )
    red = ab3d.ReductionGrid.build(chi.support)
    r_rule = gauss_legendre(a, b, int(run.get("r_nodes", 64)))
    coeffs = ab3d.full_forward(
        spec, fld, grid, r_rule, red, ZETA_BOUND / (b * b), args.node_budget
    )
    total = coeffs.norm_sq()
    # Inactive channels are omitted from the dump entirely.
    active = [
        blk
        for blk in coeffs.blocks
        if coeffs.channel_norm_sq(blk.m) > 1e-20 * total
    ]
    pruned = ab3d.Coefficients3D(coeffs.phi, coeffs.grid, active)
    out = io.StringIO()
    pruned.write_csv(out)
    _atomic_write(args.output, out.getvalue())
    nsq = ab3d.field_norm_sq(fld, r_rule, red)
    print(f"parseval_defect={abs(nsq - total) / nsq:.6e}")
    return EXIT_OK


def cmd_verify(args) -> int:
    kwargs = {}
    if args.config:
        run = load_config(args.config)["run"]
        if "kappas" in run:
            kwargs["kappas"] = tuple(float(t) for t in run["kappas"].split(","))
        if "thetas" in run:
            kwargs["thetas"] = tuple(float(t) for t in run["thetas"].split(","))
        if "phis" in run:
            kwargs["phis"] = tuple(float(t) for t in run["phis"].split(","))
    kwargs["negative_controls"] = args.negative_controls
    if args.no_atoms:
        kwargs["include_atoms"] = False
    try:
        suite = SuiteConfig(**kwargs)
    except (ConfigurationError, TypeError) as exc:
        raise UsageError(f"bad suite config: {exc}") from exc
    results = run_suite(suite)
    if args.report:
        write_report(results, args.report)
    failed = [r for r in results if not r.passed and not r.is_control]
    controls = [r for r in results if r.is_control]
    print(
        f"{len(results)} checks, {len(failed)} failed, "
        f"{len(controls)} expected-failure controls"
    )
    for r in failed:
        print(f"FAIL {r.check_id} {r.params}: {r.measured:.3e} > {r.tolerance:g}")
    return suite_exit_status(results)


# --------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ab-spectral",
        description=(
            "Self-adjoint extensions and eigenfunction expansions of the 3D "
            "Aharonov-Bohm Hamiltonian: radial eigenfunctions, spectral "
            "measures, transforms, and the property suite."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "eigenfunction",
        help="sample u (|kappa| >= 1) or u_theta (|kappa| < 1) on an r-grid",
    )
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--theta", type=float, help="extension angle; required for |kappa| < 1")
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--r", required=True, help="r grid as start:stop:count")
    p.add_argument("--output", default="eigenfunction.csv")
    p.set_defaults(func=cmd_eigenfunction)

    p = sub.add_parser("measure", help="tabulate the spectral measure density")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--theta", type=float)
    p.add_argument("--energies", required=True, help="E grid as start:stop:count")
    p.add_argument("--output", default="measure.csv")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("bound-states", help="bound-state table for a configuration")
    p.add_argument("--config", required=True, help="INI config with [run] phi and [theta]")
    p.add_argument("--output", default="bound_states.csv")
    p.set_defaults(func=cmd_bound_states)

    p = sub.add_parser(
        "transform", help="forward transform a profile; print Parseval summary"
    )
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--theta", type=float)
    p.add_argument("--family", help="named test family, e.g. gauss:0.5:3")
    p.add_argument("--input", help="profile CSV with header r,re,im")
    p.add_argument("--mode", choices=["1d", "3d"], default="1d")
    p.add_argument("--config", help="INI config (required for --mode 3d)")
    p.add_argument("--node-budget", type=int, default=32, dest="node_budget")
    p.add_argument("--output", default="coefficients.csv")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("--config", help="INI config overriding suite grids")
    p.add_argument("--report", default="report.json")
    p.add_argument(
        "--negative-controls",
        action="store_true",
        default=True,
        help="include expected-failure controls (default on)",
    )
    p.add_argument(
        "--no-negative-controls",
        dest="negative_controls",
        action="store_false",
    )
    p.add_argument(
        "--no-atoms",
        action="store_true",
        help="drop bound-state atoms everywhere (turns Parseval into a control)",
    )
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; preserve both.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
