"""Noyau complexe : fonctions rationnelles et analyse locale pôles/zéros.

Les coefficients sont stockés en degré croissant (convention de
``numpy.polynomial.polynomial``). Toutes les instances sont immuables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Protocol, runtime_checkable

import numpy as np
from numpy.polynomial import polynomial as P

from indexlab.config import settings
from indexlab.exceptions import PoleHit

# Marqueur du point à l'infini de la sphère de Riemann
INFINITY = complex(math.inf, 0.0)

_TRIM_REL = 1e-14


def is_infinity(point: complex) -> bool:
    """Indique si le point est le marqueur de l'infini."""
    return bool(np.isinf(point.real) or np.isinf(point.imag))


@runtime_checkable
class Meromorphic(Protocol):
    """Poignée de fonction méromorphe sur une carte (rationnelle ou elliptique)."""

    def evaluate(self, z: Any, strict: bool = True) -> Any: ...

    def derivative(self) -> Meromorphic: ...

    def reciprocal(self) -> Meromorphic: ...

    def order_at(self, z0: complex) -> int: ...

    def __call__(self, z: Any) -> Any: ...


def _as_coeffs(values: Any) -> np.ndarray:
    coeffs = np.atleast_1d(np.asarray(values, dtype=complex)).copy()
    if coeffs.ndim != 1:
        raise ValueError("les coefficients doivent former une liste 1D")
    return coeffs


def _trim(coeffs: np.ndarray) -> np.ndarray:
    """Retire les coefficients de haut degré négligeables (au moins un coefficient reste)."""
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(coeffs) > _TRIM_REL * scale)[0]
    return coeffs[: keep[-1] + 1]


def _low_order(coeffs: np.ndarray) -> int:
    """Nombre de coefficients nuls en tête (ordre d'annulation en 0)."""
    scale = np.max(np.abs(coeffs))
    nonzero = np.nonzero(np.abs(coeffs) > _TRIM_REL * scale)[0]
    return int(nonzero[0]) if nonzero.size else 0


def _taylor_shift(coeffs: np.ndarray, z0: complex) -> np.ndarray:
    """Coefficients de p(z0 + u) en puissances de u (division synthétique répétée)."""
    work = coeffs[::-1].astype(complex)  # degré décroissant
    n = work.size
    out = np.empty(n, dtype=complex)
    for k in range(n):
        for j in range(1, n - k):
            work[j] += z0 * work[j - 1]
        out[k] = work[n - k - 1]
    return out


def _vanishing_order(coeffs: np.ndarray, z0: complex, tol: float) -> int:
    shifted = _taylor_shift(coeffs, z0)
    scale = float(np.sum(np.abs(coeffs) * np.abs(z0) ** np.arange(coeffs.size))) or 1.0
    nonzero = np.nonzero(np.abs(shifted) > tol * scale)[0]
    return int(nonzero[0]) if nonzero.size else coeffs.size


def _relative_residual(coeffs: np.ndarray, root: complex) -> float:
    scale = float(np.sum(np.abs(coeffs) * np.abs(root) ** np.arange(coeffs.size)))
    return abs(P.polyval(root, coeffs)) / max(scale, 1e-300)


def _common_root(num: np.ndarray, den: np.ndarray, tol: float) -> complex | None:
    """Racine de l'un des polynômes où l'autre s'annule à tol près (relatif)."""
    for source, target in ((den, num), (num, den)):
        for root in P.polyroots(source):
            if _relative_residual(target, root) <= tol:
                return complex(root)
    return None


def _cancel_common_roots(num: np.ndarray, den: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Divise num et den par les facteurs (z - r) communs.

    Les racines simples sont calculées avec précision ; une racine multiple
    mal séparée peut rester non simplifiée, sans effet sur les valeurs.
    """
    while num.size > 1 and den.size > 1:
        root = _common_root(num, den, tol)
        if root is None:
            break
        factor = np.array([-root, 1.0])
        num = _trim(P.polydiv(num, factor)[0])
        den = _trim(P.polydiv(den, factor)[0])
    return num, den


@dataclass(frozen=True, eq=False)
class RationalMap:
    """Fonction rationnelle num(z)/den(z), représentation réduite.

    La réduction retire les puissances de z communes, puis les racines
    communes regroupées à ``settings.root_cluster_tolerance`` près, et
    normalise le dénominateur (coefficient dominant égal à 1).
    """

    numerator: np.ndarray
    denominator: np.ndarray

    def __post_init__(self) -> None:
        num = _trim(_as_coeffs(self.numerator))
        den = _trim(_as_coeffs(self.denominator))
        if not np.any(den != 0):
            raise ValueError("dénominateur identiquement nul")
        num, den = self._reduce(num, den, cluster=True)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @staticmethod
    def _reduce(num: np.ndarray, den: np.ndarray, cluster: bool) -> tuple[np.ndarray, np.ndarray]:
        if not np.any(num != 0):
            return np.zeros(1, dtype=complex), np.ones(1, dtype=complex)
        shift = min(_low_order(num), _low_order(den))
        if shift:
            num, den = num[shift:], den[shift:]
        if cluster:
            num, den = _cancel_common_roots(num, den, settings.root_cluster_tolerance)
        lead = den[-1]
        return num / lead, den / lead

    @classmethod
    def _raw(cls, num: np.ndarray, den: np.ndarray) -> RationalMap:
        """Construit sans regroupement de racines (dénominateurs à racines multiples)."""
        obj = object.__new__(cls)
        num = _trim(_as_coeffs(num))
        den = _trim(_as_coeffs(den))
        num, den = cls._reduce(num, den, cluster=False)
        object.__setattr__(obj, "numerator", num)
        object.__setattr__(obj, "denominator", den)
        return obj

    # --- constructeurs ---

    @classmethod
    def constant(cls, value: complex) -> RationalMap:
        return cls([value], [1.0])

    @classmethod
    def monomial(cls, power: int, coefficient: complex = 1.0) -> RationalMap:
        """coefficient·z^power, puissance négative autorisée."""
        if power >= 0:
            return cls._raw(np.r_[np.zeros(power), coefficient], np.ones(1))
        return cls._raw(np.array([coefficient]), np.r_[np.zeros(-power), 1.0])

    @classmethod
    def from_json(cls, payload: dict[str, Any]) -> RationalMap:
        """Lit {"numerator": [[re, im], ...], "denominator": [...]}."""
        num = [complex(re, im) for re, im in payload["numerator"]]
        den = [complex(re, im) for re, im in payload.get("denominator", [[1.0, 0.0]])]
        return cls(num, den)

    def to_json(self) -> dict[str, list[list[float]]]:
        return {
            "numerator": [[float(c.real), float(c.imag)] for c in self.numerator],
            "denominator": [[float(c.real), float(c.imag)] for c in self.denominator],
        }

    # --- propriétés ---

    @property
    def degrees(self) -> tuple[int, int]:
        return self.numerator.size - 1, self.denominator.size - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.numerator != 0)

    def is_constant(self) -> bool:
        return self.numerator.size == 1 and self.denominator.size == 1

    def __repr__(self) -> str:
        return f"RationalMap(num={self.numerator.tolist()}, den={self.denominator.tolist()})"

    # --- évaluation ---

    def evaluate(self, z: Any, strict: bool = True) -> Any:
        """Évalue num(z)/den(z).

        Args:
            z: Point ou tableau de points
            strict: Lève PoleHit sur un pôle; sinon renvoie inf à cet endroit

        Returns:
            Valeur(s) complexe(s), même forme que z
        """
        zz = np.asarray(z, dtype=complex)
        num = P.polyval(zz, self.numerator)
        den = P.polyval(zz, self.denominator)
        hit = np.abs(den) < settings.pole_tolerance * (1.0 + np.abs(num))
        if np.any(hit):
            if strict:
                where = complex(zz.flat[int(np.argmax(hit.ravel()))])
                raise PoleHit(f"Pole hit at z={where}", point=where)
            den = np.where(hit, 1.0, den)
            out = np.where(hit, INFINITY, num / den)
        else:
            out = num / den
        return complex(out) if np.ndim(out) == 0 else out

    def __call__(self, z: Any) -> Any:
        return self.evaluate(z, strict=True)

    # --- algèbre ---

    def _coerce(self, other: Any) -> RationalMap:
        if isinstance(other, RationalMap):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return RationalMap.constant(complex(other))
        return NotImplemented

    def __add__(self, other: Any) -> RationalMap:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        num = P.polyadd(P.polymul(self.numerator, o.denominator), P.polymul(o.numerator, self.denominator))
        return RationalMap(num, P.polymul(self.denominator, o.denominator))

    __radd__ = __add__

    def __neg__(self) -> RationalMap:
        return RationalMap._raw(-self.numerator, self.denominator)

    def __sub__(self, other: Any) -> RationalMap:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> RationalMap:
        return (-self) + other

    def __mul__(self, other: Any) -> RationalMap:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalMap(
            P.polymul(self.numerator, o.numerator), P.polymul(self.denominator, o.denominator)
        )

    __rmul__ = __mul__

    def reciprocal(self) -> RationalMap:
        if self.is_zero:
            raise ZeroDivisionError("inverse de la fonction nulle")
        return RationalMap._raw(self.denominator, self.numerator)

    def __truediv__(self, other: Any) -> RationalMap:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other: Any) -> RationalMap:
        return self.reciprocal() * other

    def __pow__(self, exponent: int) -> RationalMap:
        result = RationalMap.constant(1.0)
        base = self if exponent >= 0 else self.reciprocal()
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def derivative(self) -> RationalMap:
        """Dérivée exacte par la règle du quotient."""
        num = P.polysub(
            P.polymul(P.polyder(self.numerator), self.denominator),
            P.polymul(self.numerator, P.polyder(self.denominator)),
        )
        if self.denominator.size == 1:
            return RationalMap._raw(P.polyder(self.numerator) / self.denominator[0], np.ones(1))
        # (N'D - ND') n'a aucune racine commune avec les racines simples de D
        return RationalMap._raw(num, P.polymul(self.denominator, self.denominator))

    def invert_chart(self) -> RationalMap:
        """Renvoie w ↦ f(1/w) (changement de carte à l'infini)."""
        deg_num, deg_den = self.degrees
        num = self.numerator[::-1]
        den = self.denominator[::-1]
        shift = deg_den - deg_num
        if shift >= 0:
            num = np.r_[np.zeros(shift), num]
        else:
            den = np.r_[np.zeros(-shift), den]
        return RationalMap._raw(num, den)

    def compose(self, inner: RationalMap) -> RationalMap:
        """Composition f∘inner (schéma de Horner sur les fractions)."""
        top = RationalMap.constant(self.numerator[-1])
        for c in self.numerator[-2::-1]:
            top = top * inner + c
        bottom = RationalMap.constant(self.denominator[-1])
        for c in self.denominator[-2::-1]:
            bottom = bottom * inner + c
        return top / bottom

    def order_at(self, z0: complex) -> int:
        """Ordre en z0 : n > 0 zéro d'ordre n, n < 0 pôle d'ordre |n|, 0 sinon."""
        if self.is_zero:
            raise ValueError("ordre non défini pour la fonction nulle")
        if is_infinity(z0):
            deg_num, deg_den = self.degrees
            return deg_den - deg_num
        tol = settings.root_cluster_tolerance
        return _vanishing_order(self.numerator, complex(z0), tol) - _vanishing_order(
            self.denominator, complex(z0), tol
        )

    def poles(self) -> np.ndarray:
        """Racines du dénominateur (pôles finis)."""
        if self.denominator.size == 1:
            return np.zeros(0, dtype=complex)
        return P.polyroots(self.denominator)


Z = RationalMap([0.0, 1.0], [1.0])


def winding_order(f: Meromorphic, z0: complex, radius: float = 1e-3, samples: int = 512) -> int:
    """Ordre de f en z0 par le principe de l'argument sur un petit cercle.

    Args:
        f: Fonction méromorphe (n'importe quelle poignée)
        z0: Centre
        radius: Rayon du cercle (ne doit entourer aucun autre zéro ou pôle)
        samples: Nombre de points sur le cercle

    Returns:
        Nombre de zéros moins nombre de pôles dans le disque
    """
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    values = np.asarray(f.evaluate(z0 + radius * np.exp(1j * theta), strict=True))
    phase = np.unwrap(np.angle(np.r_[values, values[:1]]))
    return int(round((phase[-1] - phase[0]) / (2.0 * np.pi)))


def laurent_leading(
    f: Meromorphic, z0: complex, order: int, radius: float = 1e-2, samples: int = 256
) -> complex:
    """Coefficient c_order de la série de Laurent en z0 (intégrale de Cauchy discrète)."""
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    u = radius * np.exp(1j * theta)
    values = np.asarray(f.evaluate(z0 + u, strict=True))
    return complex(np.mean(values * u ** (-order)))
