"""Hot inner loops: cascaded ABCD evaluation of element ladders.

A ladder is encoded as three flat arrays (kind codes, primary value,
secondary value) so the compiled kernel never touches Python objects.
``ladder_abcd`` dispatches to the numba loop or to the vectorized numpy
fallback depending on :mod:`pumpnet._backend`.
"""
import cmath

import numpy as np

from ._backend import USE_NUMBA, njit

SERIES_L = 0
SERIES_C = 1
SERIES_R = 2
SHUNT_L = 3
SHUNT_C = 4
SHUNT_R = 5
TLINE = 6
OPEN_STUB = 7
SHORT_STUB = 8


@njit
def _element_abcd_scalar(kind, v1, v2, s):
    one = 1.0 + 0.0j
    zero = 0.0j
    if kind == SERIES_L:
        return one, s * v1, zero, one
    if kind == SERIES_C:
        return one, 1.0 / (s * v1), zero, one
    if kind == SERIES_R:
        return one, v1 + 0.0j, zero, one
    if kind == SHUNT_L:
        return one, zero, 1.0 / (s * v1), one
    if kind == SHUNT_C:
        return one, zero, s * v1, one
    if kind == SHUNT_R:
        return one, zero, (1.0 / v1) + 0.0j, one
    if kind == TLINE:
        x = s * v2
        ch = cmath.cosh(x)
        sh = cmath.sinh(x)
        return ch, v1 * sh, sh / v1, ch
    if kind == OPEN_STUB:
        return one, zero, cmath.tanh(s * v2) / v1, one
    # SHORT_STUB
    return one, zero, 1.0 / (v1 * cmath.tanh(s * v2)), one


@njit
def ladder_abcd_loop(kinds, v1, v2, s):
    """Cascade the ladder at every complex frequency in ``s`` (shape (N,))."""
    n = s.shape[0]
    out = np.empty((n, 2, 2), dtype=np.complex128)
    for i in range(n):
        a = 1.0 + 0.0j
        b = 0.0j
        c = 0.0j
        d = 1.0 + 0.0j
        si = s[i]
        for k in range(kinds.shape[0]):
            ea, eb, ec, ed = _element_abcd_scalar(kinds[k], v1[k], v2[k], si)
            a, b, c, d = (a * ea + b * ec, a * eb + b * ed,
                          c * ea + d * ec, c * eb + d * ed)
        out[i, 0, 0] = a
        out[i, 0, 1] = b
        out[i, 1, 0] = c
        out[i, 1, 1] = d
    return out


def _element_abcd_vec(kind, v1, v2, s):
    one = np.ones_like(s)
    zero = np.zeros_like(s)
    if kind == SERIES_L:
        return one, s * v1, zero, one
    if kind == SERIES_C:
        return one, 1.0 / (s * v1), zero, one
    if kind == SERIES_R:
        return one, v1 * one, zero, one
    if kind == SHUNT_L:
        return one, zero, 1.0 / (s * v1), one
    if kind == SHUNT_C:
        return one, zero, s * v1, one
    if kind == SHUNT_R:
        return one, zero, (1.0 / v1) * one, one
    if kind == TLINE:
        x = s * v2
        ch = np.cosh(x)
        sh = np.sinh(x)
        return ch, v1 * sh, sh / v1, ch
    if kind == OPEN_STUB:
        return one, zero, np.tanh(s * v2) / v1, one
    return one, zero, 1.0 / (v1 * np.tanh(s * v2)), one


def ladder_abcd_numpy(kinds, v1, v2, s):
    """Vectorized-over-frequency equivalent of :func:`ladder_abcd_loop`."""
    s = np.asarray(s, dtype=np.complex128)
    a = np.ones_like(s)
    b = np.zeros_like(s)
    c = np.zeros_like(s)
    d = np.ones_like(s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(len(kinds)):
            ea, eb, ec, ed = _element_abcd_vec(int(kinds[k]), v1[k], v2[k], s)
            a, b, c, d = a * ea + b * ec, a * eb + b * ed, c * ea + d * ec, c * eb + d * ed
    out = np.empty(s.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = c
    out[..., 1, 1] = d
    return out


def ladder_abcd(kinds, v1, v2, s):
    s = np.ascontiguousarray(s, dtype=np.complex128)
    if USE_NUMBA:
        try:
            return ladder_abcd_loop(kinds, v1, v2, s)
        except ZeroDivisionError:
            pass  # compiled scalar division raises; numpy yields inf so callers can locate the element
    return ladder_abcd_numpy(kinds, v1, v2, s)
