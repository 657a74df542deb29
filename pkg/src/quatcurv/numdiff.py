"""Numerical differentiation used as an independent check on exact derivatives."""

from __future__ import annotations

from typing import Callable

import numpy as np


def central_difference(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def richardson_derivative(
    f: Callable[[np.ndarray], np.ndarray],
    x,
    h: float = 0.1,
    levels: int = 8,
    shrink: float = 2.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Derivative of ``f`` at ``x`` by Richardson extrapolation of central differences.

    Builds the Neville tableau over steps ``h, h/shrink, h/shrink^2, ...`` and
    returns, elementwise, the entry with the smallest error estimate together
    with that estimate (Ridders' scheme).  ``f`` must accept and return arrays.
    """
    x = np.asarray(x, dtype=float)
    fac0 = shrink * shrink
    prev = [central_difference(f, x, h)]
    best = prev[0].copy()
    err = np.full(np.shape(best), np.inf)
    for k in range(1, levels):
        h /= shrink
        row = [central_difference(f, x, h)]
        fac = fac0
        for j in range(1, k + 1):
            row.append((row[j - 1] * fac - prev[j - 1]) / (fac - 1.0))
            fac *= fac0
            errt = np.maximum(np.abs(row[j] - row[j - 1]), np.abs(row[j] - prev[j - 1]))
            better = errt <= err
            err = np.where(better, errt, err)
            best = np.where(better, row[j], best)
        # stop refining once higher order makes things worse everywhere
        if np.all(np.abs(row[k] - prev[k - 1]) >= 2.0 * err):
            break
        prev = row
    return best, err
