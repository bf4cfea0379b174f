"""Manufactured analytic fields and their exact derivative oracles."""

import numpy as np
import pytest

from quatem import quaternions as q
from quatem.fields import (
    abc_beltrami,
    constant_field,
    exact_chiral_solution,
    identity_vector_field,
    polynomial_field,
    scalar_monomial,
)
from quatem.kernels import fd_curl, fd_div, fd_moisil_theodoresco
from quatem.maxwell import make_medium

PROBES = np.array([[0.2, -0.5, 0.31], [1.1, 0.4, -0.8], [-0.3, 0.9, 0.05]])


def test_abc_beltrami_eigenfield():
    for lam in (0.8, -1.5, 1.0 + 0.4j):
        f = abc_beltrami(lam)
        for x in PROBES:
            v = q.vec(f.value(x))
            assert abs(fd_div(f.vector_value, x)) < 1e-7 * np.linalg.norm(v)
            assert np.linalg.norm(fd_curl(f.vector_value, x) - lam * v) \
                < 1e-6 * np.linalg.norm(v)
            # purely vectorial with D f = lam * f
            assert q.sc(f.value(x)) == 0
            assert q.norm(f.d_value(x) - lam * f.value(x)) == 0


def test_abc_beltrami_d_value_matches_fd():
    f = abc_beltrami(1.0 + 0.4j, 0.9, 0.2, 0.5)
    for x in PROBES:
        fd = fd_moisil_theodoresco(f.value, x)
        assert q.norm(fd - f.d_value(x)) < 1e-6 * q.norm(f.d_value(x))


def test_polynomial_derivative_oracle_vs_fd():
    rng = np.random.default_rng(11)
    for _ in range(5):
        coeffs = rng.standard_normal((4, 10)) + 1j * rng.standard_normal((4, 10))
        f = polynomial_field(coeffs)
        for x in PROBES:
            fd = fd_moisil_theodoresco(f.value, x)
            assert q.norm(fd - f.d_value(x)) < 1e-7 * max(q.norm(f.d_value(x)), 1.0)


def test_polynomial_shape_validation():
    with pytest.raises(ValueError):
        polynomial_field(np.zeros((4, 9)))


def test_named_polynomials():
    x = PROBES[0]
    f = scalar_monomial(2)
    assert f.value(x)[0] == x[1]
    # D of a scalar field is its gradient: here the unit vector e2
    assert np.array_equal(f.d_value(x), q.I2)

    g = identity_vector_field()
    assert np.array_equal(q.vec(g.value(x)), x.astype(complex))
    assert np.array_equal(g.d_value(x), -3.0 * q.ONE)  # -div(x) = -3, rot x = 0

    c = constant_field(q.quat(1, 2j, 3, 4))
    assert np.array_equal(c.value(x), q.quat(1, 2j, 3, 4))
    assert q.norm(c.d_value(x)) == 0


def test_d_alpha_evaluator():
    f = identity_vector_field()
    x = PROBES[1]
    expected = f.d_value(x) + (2.0 - 1j) * f.value(x)
    assert np.allclose(f.d_alpha(2.0 - 1j, 1)(x), expected)
    assert np.allclose(f.d_alpha(2.0 - 1j, -1)(x), f.d_value(x) - (2.0 - 1j) * f.value(x))
    with pytest.raises(ValueError):
        f.d_alpha(1.0, 0)


def test_exact_chiral_solution_mode_structure():
    medium = make_medium(1.0, 1.0, 1.0, 0.25)
    e_field, h_field = exact_chiral_solution(medium)
    for x in PROBES:
        phi = e_field.value(x) + 1j * h_field.value(x)
        psi = e_field.value(x) - 1j * h_field.value(x)
        dphi = e_field.d_value(x) + 1j * h_field.d_value(x)
        dpsi = e_field.d_value(x) - 1j * h_field.d_value(x)
        # Phi is annihilated by D + alpha1, Psi by D - alpha2
        assert q.norm(dphi + medium.alpha1 * phi) < 1e-12 * q.norm(phi)
        assert q.norm(dpsi - medium.alpha2 * psi) < 1e-12 * q.norm(psi)


def test_batched_evaluation_shapes():
    f = abc_beltrami(1.0)
    out = f.value(PROBES.reshape(1, 3, 3))
    assert out.shape == (1, 3, 4)
    assert np.allclose(out[0, 1], f.value(PROBES[1]))
