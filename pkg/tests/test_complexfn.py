"""Tests pour les fonctions rationnelles."""

import numpy as np
import pytest
import sympy

from indexlab.exceptions import PoleHit
from indexlab.services.complexfn import (
    INFINITY,
    Z,
    RationalMap,
    is_infinity,
    laurent_leading,
    winding_order,
)

POINTS = np.array([0.3 + 0.7j, -1.2 + 0.4j, 2.5 - 1.1j, -0.6 - 0.9j])


def test_evaluate_simple_pole():
    """1/(z - p) évalué hors du pôle."""
    f = RationalMap([1.0], [-2.0, 1.0])
    assert f(3.0) == pytest.approx(1.0)
    assert f(2.0 + 1j) == pytest.approx(-1j)


def test_evaluate_vectorized_keeps_shape():
    """L'évaluation conserve la forme du tableau."""
    f = RationalMap([1.0, 0.0, 1.0], [1.0])
    grid = POINTS.reshape(2, 2)
    values = f.evaluate(grid)
    assert values.shape == (2, 2)
    np.testing.assert_allclose(values, grid**2 + 1.0)


def test_pole_hit_strict_and_lenient():
    """Un pôle lève PoleHit en mode strict, renvoie inf sinon."""
    f = RationalMap([1.0], [0.0, 1.0])
    with pytest.raises(PoleHit):
        f(0.0)
    values = f.evaluate(np.array([0.0, 1.0]), strict=False)
    assert np.isinf(values[0].real)
    assert values[1] == pytest.approx(1.0)


def test_common_roots_cancel():
    """(z² - 1)/(z - 1) se réduit à z + 1."""
    f = RationalMap([-1.0, 0.0, 1.0], [-1.0, 1.0])
    assert f.degrees == (1, 0)
    assert f(1.0) == pytest.approx(2.0)


def test_zero_denominator_rejected():
    with pytest.raises(ValueError):
        RationalMap([1.0], [0.0])


def test_algebra_matches_pointwise():
    """Somme, produit, quotient et puissance coïncident avec l'arithmétique ponctuelle."""
    f = RationalMap([1.0, 2.0], [3.0, 0.0, 1.0])
    g = RationalMap([0.5, 0.0, 1.0], [1.0, 1.0])
    fz, gz = f.evaluate(POINTS), g.evaluate(POINTS)
    np.testing.assert_allclose((f + g).evaluate(POINTS), fz + gz, rtol=1e-10)
    np.testing.assert_allclose((f - g).evaluate(POINTS), fz - gz, rtol=1e-10)
    np.testing.assert_allclose((f * g).evaluate(POINTS), fz * gz, rtol=1e-10)
    np.testing.assert_allclose((f / g).evaluate(POINTS), fz / gz, rtol=1e-10)
    np.testing.assert_allclose((f**3).evaluate(POINTS), fz**3, rtol=1e-10)
    np.testing.assert_allclose((2.0 - f).evaluate(POINTS), 2.0 - fz, rtol=1e-10)


def test_derivative_against_sympy():
    """Dérivée exacte comparée à sympy."""
    z = sympy.symbols("z")
    expr = (z**2 + 1) / (z - 2)
    oracle = sympy.lambdify(z, sympy.diff(expr, z), "numpy")
    f = RationalMap([1.0, 0.0, 1.0], [-2.0, 1.0])
    np.testing.assert_allclose(f.derivative().evaluate(POINTS), oracle(POINTS), rtol=1e-10)


def test_derivative_of_reciprocal():
    """(1/z)′ = -1/z²."""
    assert (1.0 / Z).derivative()(2.0) == pytest.approx(-0.25)


def test_invert_chart():
    """f(1/w) pour f = z² + z."""
    f = RationalMap([0.0, 1.0, 1.0], [1.0])
    inverted = f.invert_chart()
    w = 0.4 - 0.3j
    assert inverted(w) == pytest.approx(f(1.0 / w))


def test_compose():
    f = RationalMap([1.0], [1.0, 0.0, 1.0])
    inner = RationalMap([0.0, 2.0], [1.0, 1.0])
    np.testing.assert_allclose(
        f.compose(inner).evaluate(POINTS), f.evaluate(inner.evaluate(POINTS)), rtol=1e-10
    )


def test_order_at_zeros_poles_and_infinity():
    """z²/(z - 1)³ : zéro double en 0, pôle triple en 1, zéro simple à l'infini."""
    f = RationalMap([0.0, 0.0, 1.0], [-1.0, 3.0, -3.0, 1.0])
    assert f.order_at(0.0) == 2
    assert f.order_at(1.0) == -3
    assert f.order_at(INFINITY) == 1
    assert f.order_at(0.5) == 0


def test_order_of_zero_function_undefined():
    with pytest.raises(ValueError):
        RationalMap.constant(0.0).order_at(0.0)


def test_monomial_negative_power():
    f = RationalMap.monomial(-2, 3.0)
    assert f(2.0) == pytest.approx(0.75)
    assert f.order_at(0.0) == -2


def test_winding_order_agrees_with_algebraic_order():
    """Le principe de l'argument retrouve l'ordre algébrique."""
    f = RationalMap([0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 1.0])
    assert winding_order(f, 0.0) == 3
    assert winding_order(f, 1j) == -1


def test_laurent_leading_residue():
    """Résidu de 3/z + 1 en 0."""
    f = RationalMap([3.0, 1.0], [0.0, 1.0])
    assert laurent_leading(f, 0.0, -1) == pytest.approx(3.0, abs=1e-10)


def test_poles_and_json():
    f = RationalMap([1.0], [2.0, -3.0, 1.0])
    assert sorted(f.poles().real) == pytest.approx([1.0, 2.0])
    restored = RationalMap.from_json(f.to_json())
    np.testing.assert_allclose(restored.evaluate(POINTS), f.evaluate(POINTS))


def test_is_infinity():
    assert is_infinity(INFINITY)
    assert not is_infinity(1e300 + 0j)
