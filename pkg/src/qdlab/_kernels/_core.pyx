# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels for the value rules.

Signature-compatible with ``_fallback``; selected automatically by
``qdlab._kernels`` when the extension built. Compiled without
-ffast-math so results stay interchangeable with the numpy fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, pow

cnp.import_array()

BACKEND_NAME = "compiled"

TRANSFORM_IDENTITY = 0
TRANSFORM_EXPONENTIAL = 1
TRANSFORM_POWER = 2


def born_values(const double[:, ::1] probs, const double[:, ::1] utils):
    """Probability-weighted mean of the utilities, one value per row."""
    cdef Py_ssize_t n = probs.shape[0]
    cdef Py_ssize_t d = probs.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += probs[i, j] * utils[i, j]
        o[i] = acc
    return out


def uniform_support_values(const double[:, ::1] abs_amps, const double[:, ::1] utils, double eps):
    """Arithmetic mean of the utilities on the support {j : |amp_j| > eps}."""
    cdef Py_ssize_t n = abs_amps.shape[0]
    cdef Py_ssize_t d = abs_amps.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, count
    cdef double acc
    for i in range(n):
        acc = 0.0
        count = 0
        for j in range(d):
            if abs_amps[i, j] > eps:
                acc += utils[i, j]
                count += 1
        if count == 0:
            raise ValueError("empty support: no amplitude above the support threshold")
        o[i] = acc / count
    return out


def deterministic_values(const double[:, ::1] abs_amps, const double[:, ::1] utils, double eps):
    """Utility at the lowest supported index, one value per row."""
    cdef Py_ssize_t n = abs_amps.shape[0]
    cdef Py_ssize_t d = abs_amps.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef bint found
    for i in range(n):
        found = False
        for j in range(d):
            if abs_amps[i, j] > eps:
                o[i] = utils[i, j]
                found = True
                break
        if not found:
            raise ValueError("empty support: no amplitude above the support threshold")
    return out


def fmean_values(const double[:, ::1] probs, const double[:, ::1] utils,
                 int transform_id, double param):
    """Quasi-arithmetic mean F^-1(sum_j p_j F(x_j)) for a built-in transform."""
    cdef Py_ssize_t n = probs.shape[0]
    cdef Py_ssize_t d = probs.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc, shift, scaled
    if transform_id == TRANSFORM_IDENTITY:
        return born_values(probs, utils)
    if transform_id == TRANSFORM_EXPONENTIAL:
        for i in range(n):
            shift = param * utils[i, 0]
            for j in range(1, d):
                scaled = param * utils[i, j]
                if scaled > shift:
                    shift = scaled
            acc = 0.0
            for j in range(d):
                acc += probs[i, j] * exp(param * utils[i, j] - shift)
            o[i] = (shift + log(acc)) / param
        return out
    if transform_id == TRANSFORM_POWER:
        for i in range(n):
            acc = 0.0
            for j in range(d):
                acc += probs[i, j] * pow(utils[i, j], param)
            o[i] = pow(acc, 1.0 / param)
        return out
    raise ValueError(f"unknown transform id {transform_id}")
