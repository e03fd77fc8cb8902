"""Fonction ℘ de Weierstrass sur les réseaux rectangulaires L(it) = Z + itZ.

Les lignes du réseau (n fixé) sont sommées sous forme close par
Σ_m (z - m)^-2 = π² csc²(πz) ; seules les colonnes |n| ≤ N sont tronquées,
ce qui donne une convergence en exp(-2πNt).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from indexlab.config import settings
from indexlab.exceptions import LatticePointHit, PoleHit
from indexlab.services.complexfn import (
    INFINITY,
    RationalMap,
    Z,
    is_infinity,
    winding_order,
)


def _csc2(w: np.ndarray) -> np.ndarray:
    s = np.sin(np.pi * w)
    return 1.0 / (s * s)


@dataclass(frozen=True, eq=False)
class RectLattice:
    """Réseau rectangulaire {m + int} et ses invariants g2, g3."""

    t: float
    truncation_order: int = field(default_factory=lambda: settings.lattice_truncation)
    g2: float = field(init=False)
    g3: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise ValueError(f"t doit être > 0 (reçu {self.t})")
        if self.truncation_order < 1:
            raise ValueError("truncation_order doit être ≥ 1")
        g2, g3 = self._invariants(self.t, self.truncation_order)
        object.__setattr__(self, "g2", g2)
        object.__setattr__(self, "g3", g3)

    @staticmethod
    def _invariants(t: float, order: int) -> tuple[float, float]:
        pi = np.pi
        n = np.arange(1, order + 1)
        s = -1.0 / np.sinh(pi * n * t) ** 2  # csc²(πint)
        g4 = pi**4 / 45 + 2.0 * np.sum(pi**4 * (s * s - 2.0 * s / 3.0))
        g6 = 2.0 * pi**6 / 945 + 2.0 * np.sum(pi**6 * (s**3 - s * s + 2.0 * s / 15.0))
        return float(60.0 * g4), float(140.0 * g6)

    @property
    def tau(self) -> complex:
        return complex(0.0, self.t)

    @cached_property
    def roots(self) -> tuple[float, float, float]:
        """(e1, e2, e3) = (℘(1/2), ℘((1+it)/2), ℘(it/2)), e1 > e2 > e3."""
        values = np.sort(np.roots([4.0, 0.0, -self.g2, -self.g3]).real)[::-1]
        return float(values[0]), float(values[1]), float(values[2])

    @property
    def half_periods(self) -> tuple[complex, complex, complex]:
        return 0.5 + 0j, complex(0.5, 0.5 * self.t), complex(0.0, 0.5 * self.t)

    @cached_property
    def eta1(self) -> float:
        """Quasi-période η1 = ζ(1/2), via ∮℘ dz = -2η1 sur le cycle horizontal."""
        x = (np.arange(256) + 0.5) / 256
        values = wp_eval(self, x + 0.5j * self.t)
        return float(-0.5 * np.mean(values).real)

    def reduce(self, z: Any) -> np.ndarray:
        """Représentant de z dans [-1/2, 1/2) × [-t/2, t/2)."""
        zz = np.asarray(z, dtype=complex)
        x = zz.real - np.floor(zz.real + 0.5)
        y = zz.imag - self.t * np.floor(zz.imag / self.t + 0.5)
        return x + 1j * y

    def cubic(self) -> RationalMap:
        """4x³ - g2 x - g3 (égal à ℘′² en x = ℘)."""
        return RationalMap([-self.g3, -self.g2, 0.0, 4.0], [1.0])

    def wp_second(self) -> RationalMap:
        """6x² - g2/2 (égal à ℘″ en x = ℘)."""
        return RationalMap([-0.5 * self.g2, 0.0, 6.0], [1.0])


def _check_lattice_point(L: RectLattice, zr: np.ndarray, strict: bool) -> np.ndarray:
    hit = np.abs(zr) < 1e-10
    if strict and np.any(hit):
        where = complex(zr.flat[int(np.argmax(hit.ravel()))])
        raise LatticePointHit(f"Lattice point hit at z≡{where}", point=where)
    return hit


def wp_eval(L: RectLattice, z: Any, strict: bool = True) -> Any:
    """℘(z) par sommation de lignes fermées et troncature symétrique |n| ≤ N.

    Args:
        L: Réseau rectangulaire
        z: Point ou tableau de points
        strict: Lève LatticePointHit sur le réseau; sinon renvoie inf

    Returns:
        ℘(z), même forme que z
    """
    zr = L.reduce(z)
    hit = _check_lattice_point(L, zr, strict)
    safe = np.where(hit, 0.25 + 0.25j, zr)
    pi2 = np.pi**2
    total = pi2 * _csc2(safe) - pi2 / 3.0
    for n in range(1, L.truncation_order + 1):
        shift = n * L.tau
        const = pi2 * 2.0 / np.sinh(np.pi * n * L.t) ** 2
        total = total + pi2 * (_csc2(safe - shift) + _csc2(safe + shift)) + const
    out = np.where(hit, INFINITY, total)
    return complex(out) if np.ndim(out) == 0 else out


def wp_prime(L: RectLattice, z: Any, strict: bool = True) -> Any:
    """℘′(z) = Σ_n -2π³ cos(πw)/sin³(πw), w = z - n·it."""
    zr = L.reduce(z)
    hit = _check_lattice_point(L, zr, strict)
    safe = np.where(hit, 0.25 + 0.25j, zr)

    def row(w: np.ndarray) -> np.ndarray:
        s = np.sin(np.pi * w)
        return -2.0 * np.pi**3 * np.cos(np.pi * w) / (s * s * s)

    total = row(safe)
    for n in range(1, L.truncation_order + 1):
        total = total + row(safe - n * L.tau) + row(safe + n * L.tau)
    out = np.where(hit, INFINITY, total)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class EllipticFunction:
    """Fonction elliptique f = R0(℘) + R1(℘)·℘′, R0 et R1 rationnelles en ℘.

    Toute fonction elliptique sur L s'écrit ainsi ; la forme est stable par
    somme, produit, inverse et dérivation (℘′² = 4℘³ - g2℘ - g3).
    """

    lattice: RectLattice
    even: RationalMap
    odd: RationalMap

    # --- constructeurs ---

    @classmethod
    def wp(cls, lattice: RectLattice) -> EllipticFunction:
        return cls(lattice, Z, RationalMap.constant(0.0))

    @classmethod
    def wp_prime(cls, lattice: RectLattice) -> EllipticFunction:
        return cls(lattice, RationalMap.constant(0.0), RationalMap.constant(1.0))

    @classmethod
    def constant(cls, lattice: RectLattice, value: complex) -> EllipticFunction:
        return cls(lattice, RationalMap.constant(value), RationalMap.constant(0.0))

    @classmethod
    def wp_shifted(cls, lattice: RectLattice, k: int) -> EllipticFunction:
        """℘(z - ω_k), k ∈ {1, 2, 3}, par la formule d'addition aux demi-périodes."""
        e = lattice.roots
        ek = e[k - 1]
        ei, ej = (e[i] for i in range(3) if i != k - 1)
        even = RationalMap.constant(ek) + RationalMap([(ek - ei) * (ek - ej)], [-ek, 1.0])
        return cls(lattice, even, RationalMap.constant(0.0))

    # --- évaluation ---

    def evaluate(self, z: Any, strict: bool = True) -> Any:
        """Évalue f(z) ; hors mode strict, les pôles et points du réseau donnent inf."""
        zz = np.asarray(z, dtype=complex)
        w = np.asarray(wp_eval(self.lattice, zz, strict=strict))
        wp = None
        if not self.odd.is_zero:
            wp = np.asarray(wp_prime(self.lattice, np.where(np.isinf(w.real), 0.25 + 0.25j, zz)))
        out = self.evaluate_at(w, wp, strict=strict)
        return complex(out) if np.ndim(out) == 0 else out

    def evaluate_at(self, w: np.ndarray, wp: np.ndarray | None, strict: bool = True) -> np.ndarray:
        """Évalue R0(w) + R1(w)·wp à partir de valeurs ℘, ℘′ déjà calculées."""
        lattice_hit = np.isinf(w.real)
        w_safe = np.where(lattice_hit, 0.0, w)
        out = np.zeros(w.shape, dtype=complex)
        if not self.even.is_zero:
            out = out + np.asarray(self.even.evaluate(w_safe, strict=strict))
        if not self.odd.is_zero:
            odd = np.asarray(self.odd.evaluate(w_safe, strict=strict))
            finite = np.isfinite(odd)
            out = out + np.where(finite, odd * np.where(finite, wp, 0.0), INFINITY)
        return np.where(lattice_hit, INFINITY, out)

    def __call__(self, z: Any) -> Any:
        return self.evaluate(z, strict=True)

    # --- algèbre ---

    def _coerce(self, other: Any) -> EllipticFunction:
        if isinstance(other, EllipticFunction):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return EllipticFunction.constant(self.lattice, complex(other))
        return NotImplemented

    def __add__(self, other: Any) -> EllipticFunction:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return EllipticFunction(self.lattice, self.even + o.even, self.odd + o.odd)

    __radd__ = __add__

    def __neg__(self) -> EllipticFunction:
        return EllipticFunction(self.lattice, -self.even, -self.odd)

    def __sub__(self, other: Any) -> EllipticFunction:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> EllipticFunction:
        return (-self) + other

    def __mul__(self, other: Any) -> EllipticFunction:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        cubic = self.lattice.cubic()
        even = self.even * o.even + self.odd * o.odd * cubic
        odd = self.even * o.odd + self.odd * o.even
        return EllipticFunction(self.lattice, even, odd)

    __rmul__ = __mul__

    def reciprocal(self) -> EllipticFunction:
        denom = self.even * self.even - self.odd * self.odd * self.lattice.cubic()
        if denom.is_zero:
            raise ZeroDivisionError("inverse de la fonction nulle")
        return EllipticFunction(self.lattice, self.even / denom, -self.odd / denom)

    def __truediv__(self, other: Any) -> EllipticFunction:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other: Any) -> EllipticFunction:
        return self.reciprocal() * other

    def derivative(self) -> EllipticFunction:
        """f′ = [R1′(℘)·℘′² + R1(℘)·℘″] + R0′(℘)·℘′."""
        even = self.odd.derivative() * self.lattice.cubic() + self.odd * self.lattice.wp_second()
        return EllipticFunction(self.lattice, even, self.even.derivative())

    def order_at(self, z0: complex) -> int:
        """Ordre en z0 par enroulement (principe de l'argument)."""
        if is_infinity(z0):
            raise PoleHit("le tore n'a pas de point à l'infini")
        return winding_order(self, z0, radius=1e-3 * min(1.0, self.lattice.t))

    @property
    def is_zero(self) -> bool:
        return self.even.is_zero and self.odd.is_zero
