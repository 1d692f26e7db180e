"""Vectorized double-double (~31 significant digits) helpers.

The power series evaluated in :mod:`ab_spectral.special` suffer heavy
cancellation for large arguments: at |zeta| ~ 2500 the largest terms reach
~1e16 while the sum is O(1e-6).  Plain float64 accumulation would lose the
result entirely, so the term recurrences and the running sums are carried in
unevaluated hi+lo pairs built from error-free transformations.

All functions operate elementwise on numpy arrays (or scalars).
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1, Veltkamp splitting constant


def two_sum(a, b):
    """Error-free sum: returns (s, e) with s = fl(a+b), s + e = a + b."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    """two_sum specialization valid when |a| >= |b|."""
    s = a + b
    e = b - (s - a)
    return s, e


def two_prod(a, b):
    """Error-free product via Dekker splitting: s + e = a * b exactly."""
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def dd_add(xh, xl, yh, yl):
    s, e = two_sum(xh, yh)
    e = e + (xl + yl)
    return quick_two_sum(s, e)


def dd_mul(xh, xl, yh, yl):
    p, e = two_prod(xh, yh)
    e = e + (xh * yl + xl * yh)
    return quick_two_sum(p, e)


def dd_mul_scalar(xh, xl, c):
    p, e = two_prod(xh, c)
    e = e + xl * c
    return quick_two_sum(p, e)


def dd_div(xh, xl, yh, yl):
    q1 = xh / yh
    # r = x - q1 * y, accurate because q1*y is formed with two_prod
    ph, pl = dd_mul_scalar(yh, yl, q1)
    rh, rl = dd_add(xh, xl, -ph, -pl)
    q2 = (rh + rl) / yh
    return quick_two_sum(q1, q2)


def dd_neg(xh, xl):
    return -xh, -xl


def dd_from_float(x, shape=None):
    h = np.asarray(x, dtype=float)
    if shape is not None:
        h = np.broadcast_to(h, shape).copy()
    return h, np.zeros_like(h)
