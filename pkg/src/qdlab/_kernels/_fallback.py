"""Pure-numpy batch kernels, the fallback when the compiled core is absent.

Each function evaluates one value rule over a batch of games given as
(n, dim) float arrays: `probs` holds |amplitude|^2 rows, `abs_amps` holds
|amplitude| rows, `utils` holds the utilities. The compiled core in
``_core.pyx`` implements the same signatures.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

TRANSFORM_IDENTITY = 0
TRANSFORM_EXPONENTIAL = 1
TRANSFORM_POWER = 2


def born_values(probs: np.ndarray, utils: np.ndarray) -> np.ndarray:
    """Probability-weighted mean of the utilities, one value per row."""
    return np.einsum("ij,ij->i", probs, utils)


def uniform_support_values(abs_amps: np.ndarray, utils: np.ndarray, eps: float) -> np.ndarray:
    """Arithmetic mean of the utilities on the support {j : |amp_j| > eps}."""
    mask = abs_amps > eps
    counts = mask.sum(axis=1)
    if np.any(counts == 0):
        raise ValueError("empty support: no amplitude above the support threshold")
    return np.einsum("ij,ij->i", utils, mask) / counts


def deterministic_values(abs_amps: np.ndarray, utils: np.ndarray, eps: float) -> np.ndarray:
    """Utility at the lowest supported index, one value per row."""
    mask = abs_amps > eps
    if not np.all(mask.any(axis=1)):
        raise ValueError("empty support: no amplitude above the support threshold")
    first = np.argmax(mask, axis=1)
    return np.ascontiguousarray(utils[np.arange(utils.shape[0]), first])


def fmean_values(
    probs: np.ndarray, utils: np.ndarray, transform_id: int, param: float
) -> np.ndarray:
    """Quasi-arithmetic mean F^-1(sum_j p_j F(x_j)) for a built-in transform."""
    if transform_id == TRANSFORM_IDENTITY:
        return born_values(probs, utils)
    if transform_id == TRANSFORM_EXPONENTIAL:
        # shifted log-sum-exp keeps exp(rate * x) in range
        shift = np.max(param * utils, axis=1, keepdims=True)
        inner = np.einsum("ij,ij->i", probs, np.exp(param * utils - shift))
        return (shift[:, 0] + np.log(inner)) / param
    if transform_id == TRANSFORM_POWER:
        inner = np.einsum("ij,ij->i", probs, np.power(utils, param))
        return np.power(inner, 1.0 / param)
    raise ValueError(f"unknown transform id {transform_id}")
