"""Radial eigenfunction families for the inverse-square potential.

Everything here is built on two entire functions evaluated by direct power
series summation:

    chi_kappa(zeta) = 2**(-kappa) * sum_{n>=0} (-zeta)**n / (Gamma(kappa+n+1) n! 4**n)
    script_y(zeta)  = sum_{n>=1} (-zeta)**n c_n / ((n!)**2 4**n),  c_n = 1 + 1/2 + ... + 1/n

from which the generalized eigenfunctions are assembled:

    u(kappa, E | r)        = r**(1/2+kappa) chi_kappa(r**2 E)
    w(kappa, E)            = [u(kappa,E) cos(pi kappa) - u(-kappa,E)] / sin(pi kappa)
    u_theta(kappa,theta,E) = u cos(theta - pi*kappa/2) + w sin(theta - pi*kappa/2)

with an explicit logarithmic formula replacing w at kappa = 0.  Radial
derivatives are obtained by termwise differentiation of the series, never by
finite differences.

The series are summed in double-double arithmetic (see _ddsum) and restricted
to |zeta| <= ZETA_BOUND; larger arguments raise SeriesDomainError instead of
silently losing precision.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.special import gamma as _scipy_gamma

from . import _ddsum as dd
from .errors import DomainError, SeriesDomainError

#: Largest |r**2 E| accepted by the series evaluators (i.e. r sqrt|E| <= 50).
ZETA_BOUND = 2500.0

_MAX_TERMS = 400
_REL_STOP = 1e-17
_EULER_GAMMA = 0.5772156649015328606
_KAPPA_ZERO_SWITCH = 1e-6


class ValueWithDerivative(NamedTuple):
    """A function value together with its radial derivative."""

    value: np.ndarray | float
    d_dr: np.ndarray | float


def gamma_fn(x: float) -> float:
    """Euler gamma function; rejects the poles at non-positive integers."""
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr <= 0) & (x_arr == np.floor(x_arr))):
        raise DomainError(f"gamma_fn: pole at non-positive integer argument {x}")
    out = _scipy_gamma(x_arr)
    return float(out) if np.isscalar(x) or x_arr.ndim == 0 else out


def theta_kappa(kappa: float) -> float:
    """Reference extension angle pi*kappa/2 of the order-kappa problem."""
    return math.pi * kappa / 2.0


def _check_zeta(zeta: np.ndarray) -> None:
    if np.any(np.abs(zeta) > ZETA_BOUND):
        bad = float(np.max(np.abs(zeta)))
        raise SeriesDomainError(
            f"series argument |zeta|={bad:.6g} exceeds the supported bound {ZETA_BOUND:g}"
        )


def _chi_series(kappa: float, zeta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(chi_kappa(zeta), d chi_kappa / d zeta), elementwise.

    Term recurrence, carried in double-double to survive the cancellation of
    O(1e16) terms at large |zeta|:

        t_0 = 1/Gamma(kappa+1),  t_n = -t_{n-1} zeta / (4 n (kappa+n))
        value     = 2**-kappa * sum t_n
        d/dzeta   = 2**-kappa * sum_{n>=1} v_n,   v_n = -t_{n-1} / (4 (kappa+n))
    """
    zeta = np.asarray(zeta, dtype=float)
    _check_zeta(zeta)
    t0 = 1.0 / gamma_fn(kappa + 1.0)
    th, tl = dd.dd_from_float(t0, zeta.shape)
    sh, sl = th.copy(), tl.copy()
    dh, dl = dd.dd_from_float(0.0, zeta.shape)
    for n in range(1, _MAX_TERMS + 1):
        kn_h, kn_l = dd.two_sum(kappa, float(n))           # kappa + n, exact
        b_h, b_l = 4.0 * kn_h, 4.0 * kn_l                  # 4(kappa+n), exact scaling
        vh, vl = dd.dd_div(-th, -tl, b_h, b_l)
        dh, dl = dd.dd_add(dh, dl, vh, vl)
        qh, ql = dd.dd_div(vh, vl, float(n), 0.0)
        th, tl = dd.dd_mul(qh, ql, zeta, np.zeros_like(zeta))  # t_n = v_n zeta / n
        sh, sl = dd.dd_add(sh, sl, th, tl)
        if not np.any(np.abs(th) > _REL_STOP * np.abs(sh)):
            break
    scale = 2.0 ** (-kappa)
    return scale * (sh + sl), scale * (dh + dl)


def _script_y_series(zeta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(script_y(zeta), d script_y / d zeta), elementwise, double-double."""
    zeta = np.asarray(zeta, dtype=float)
    _check_zeta(zeta)
    ah, al = dd.dd_from_float(1.0, zeta.shape)             # a_0 = 1
    ch, cl = 0.0, 0.0                                      # harmonic number c_n
    sh, sl = dd.dd_from_float(0.0, zeta.shape)
    dh, dl = dd.dd_from_float(0.0, zeta.shape)
    for n in range(1, _MAX_TERMS + 1):
        rh, rl = dd.dd_div(1.0, 0.0, float(n), 0.0)
        ch, cl = dd.dd_add(ch, cl, rh, rl)
        # derivative term w_n = -a_{n-1} c_n / (4 n)
        wh, wl = dd.dd_mul(ah, al, np.full_like(zeta, ch), np.full_like(zeta, cl))
        wh, wl = dd.dd_div(-wh, -wl, 4.0 * n, 0.0)
        dh, dl = dd.dd_add(dh, dl, wh, wl)
        # a_n = -a_{n-1} zeta / (4 n**2); term g_n = a_n c_n = w_n * zeta / n
        gh, gl = dd.dd_div(wh, wl, float(n), 0.0)
        gh, gl = dd.dd_mul(gh, gl, zeta, np.zeros_like(zeta))
        sh, sl = dd.dd_add(sh, sl, gh, gl)
        ah, al = dd.dd_mul(ah, al, zeta, np.zeros_like(zeta))
        ah, al = dd.dd_div(-ah, -al, 4.0 * n * n, 0.0)
        if not np.any(np.abs(gh) > _REL_STOP * np.abs(sh)) and n > 1:
            break
    return sh + sl, dh + dl


def chi_kappa(kappa: float, zeta):
    """The entire function behind u: chi_kappa(zeta) = zeta**(-kappa/2) J_kappa(sqrt(zeta))."""
    val, _ = _chi_series(kappa, np.asarray(zeta, dtype=float))
    return float(val) if np.ndim(zeta) == 0 else val


def script_y(zeta):
    """Entire function carrying the logarithmic branch of the kappa=0 family."""
    val, _ = _script_y_series(np.asarray(zeta, dtype=float))
    return float(val) if np.ndim(zeta) == 0 else val


def _as_arrays(E, r):
    E = np.asarray(E, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("radial coordinate must satisfy r > 0")
    return np.broadcast_arrays(E, r)


def u_eigen(kappa: float, E, r) -> ValueWithDerivative:
    """u(kappa, E | r) = r**(1/2+kappa) chi_kappa(r**2 E) and d/dr."""
    E_b, r_b = _as_arrays(E, r)
    zeta = r_b * r_b * E_b
    chi, dchi = _chi_series(kappa, zeta)
    rp = r_b ** (0.5 + kappa)
    value = rp * chi
    d_dr = (0.5 + kappa) * rp / r_b * chi + rp * dchi * 2.0 * r_b * E_b
    if np.ndim(E) == 0 and np.ndim(r) == 0:
        return ValueWithDerivative(float(value), float(d_dr))
    return ValueWithDerivative(value, d_dr)


def _w_eigen_zero(E, r) -> ValueWithDerivative:
    """kappa = 0 logarithmic branch: (2/pi)[(ln(r/2)+gamma) u0 - sqrt(r) Y(r**2 E)]."""
    E_b, r_b = _as_arrays(E, r)
    zeta = r_b * r_b * E_b
    chi, dchi = _chi_series(0.0, zeta)
    y, dy = _script_y_series(zeta)
    sq = np.sqrt(r_b)
    u0 = sq * chi
    du0 = 0.5 * chi / sq + sq * dchi * 2.0 * r_b * E_b
    lg = np.log(r_b / 2.0) + _EULER_GAMMA
    value = (2.0 / math.pi) * (lg * u0 - sq * y)
    d_dr = (2.0 / math.pi) * (
        u0 / r_b + lg * du0 - 0.5 * y / sq - sq * dy * 2.0 * r_b * E_b
    )
    return ValueWithDerivative(value, d_dr)


def w_eigen(kappa: float, E, r) -> ValueWithDerivative:
    """Second real solution w(kappa, E); the reference partner of u in the
    extension family.  Only defined for |kappa| < 1."""
    if abs(kappa) >= 1.0:
        raise DomainError(f"w_eigen requires |kappa| < 1, got kappa={kappa}")
    if abs(kappa) < _KAPPA_ZERO_SWITCH:
        out = _w_eigen_zero(E, r)
    else:
        up = u_eigen(kappa, E, r)
        um = u_eigen(-kappa, E, r)
        c = math.cos(math.pi * kappa)
        s = math.sin(math.pi * kappa)
        out = ValueWithDerivative(
            (np.asarray(up.value) * c - um.value) / s,
            (np.asarray(up.d_dr) * c - um.d_dr) / s,
        )
    if np.ndim(E) == 0 and np.ndim(r) == 0:
        return ValueWithDerivative(float(out.value), float(out.d_dr))
    return out


def u_theta_eigen(kappa: float, theta: float, E, r) -> ValueWithDerivative:
    """Extension-family eigenfunction u_theta = u cos(d) + w sin(d), d = theta - pi*kappa/2.

    Numerically stable for all |kappa| < 1 including kappa -> 0, unlike the
    raw difference quotient defining w for small kappa.
    """
    if abs(kappa) >= 1.0:
        raise DomainError(f"u_theta_eigen requires |kappa| < 1, got kappa={kappa}")
    delta = theta - theta_kappa(kappa)
    c, s = math.cos(delta), math.sin(delta)
    u = u_eigen(kappa, E, r)
    if s == 0.0:
        out = ValueWithDerivative(np.asarray(u.value) * c, np.asarray(u.d_dr) * c)
    else:
        w = w_eigen(kappa, E, r)
        out = ValueWithDerivative(
            np.asarray(u.value) * c + np.asarray(w.value) * s,
            np.asarray(u.d_dr) * c + np.asarray(w.d_dr) * s,
        )
    if np.ndim(E) == 0 and np.ndim(r) == 0:
        return ValueWithDerivative(float(out.value), float(out.d_dr))
    return out


def wronskian(f: ValueWithDerivative, g: ValueWithDerivative):
    """W_r(f, g) = f g' - f' g for two sampled value/derivative pairs."""
    return np.asarray(f.value) * g.d_dr - np.asarray(f.d_dr) * g.value
