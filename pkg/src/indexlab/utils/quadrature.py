"""Règles de quadrature partagées (Gauss-Legendre, point milieu, Richardson)."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=16)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nœuds et poids de Gauss-Legendre ramenés sur [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def midpoints(a: float, b: float, n: int) -> tuple[np.ndarray, float]:
    """Points milieux de n cellules régulières de [a, b] et pas associé."""
    step = (b - a) / n
    return a + step * (np.arange(n) + 0.5), step


def richardson(coarse: float, fine: float, ratio: float, order: int) -> float:
    """Extrapolation de Richardson pour une erreur en C·h^order."""
    factor = ratio**order
    return (factor * fine - coarse) / (factor - 1.0)


def log_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Pente des moindres carrés de log|y| en fonction de log|x|."""
    lx = np.log(np.abs(np.asarray(x, dtype=float)))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    return float(np.polyfit(lx, ly, 1)[0])
