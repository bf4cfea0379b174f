"""Fundamental solutions and finite-difference differential operators.

theta is the Helmholtz fundamental solution -exp(i*a*r)/(4*pi*r); upsilon
is its quaternionic companion, the fundamental solution of the perturbed
Dirac-type operator D +- a.  The finite-difference versions of D and of
div/rot exist purely as verification oracles for closed-form derivatives.
"""

from __future__ import annotations

import numpy as np

from . import quaternions as q
from .errors import SingularityError

DEFAULT_FD_STEP = 1e-4


def _radii(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise SingularityError("kernel evaluated at its singular point x = 0")
    return r


def theta(alpha, x) -> np.ndarray:
    """Helmholtz fundamental solution -exp(i*alpha*|x|) / (4*pi*|x|)."""
    r = _radii(x)
    return -np.exp(1j * alpha * r) / (4.0 * np.pi * r)


def grad_theta(alpha, x) -> np.ndarray:
    """Closed-form gradient of theta: theta * (i*alpha - 1/r) * x/r."""
    x = np.asarray(x, dtype=float)
    r = _radii(x)
    return (theta(alpha, x) * (1j * alpha - 1.0 / r) / r)[..., None] * x


def upsilon(alpha, sign: int, x) -> np.ndarray:
    """Fundamental solution of D + sign*alpha as a quaternion field.

    Scalar part sign*alpha*theta, vector part -grad(theta), i.e.
    theta(x) * (1/r**2 - i*alpha/r) * x.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = np.asarray(x, dtype=float)
    r = _radii(x)
    th = theta(alpha, x)
    out = np.zeros(x.shape[:-1] + (4,), dtype=complex)
    out[..., 0] = sign * alpha * th
    out[..., 1:] = (th * (1.0 / r**2 - 1j * alpha / r))[..., None] * x
    return out


def _stencil(x, h: float) -> np.ndarray:
    """The six central-difference points x +- h*e_k, shape (3, 2, 3)."""
    x = np.asarray(x, dtype=float)
    pts = np.broadcast_to(x, (3, 2, 3)).copy()
    for k in range(3):
        pts[k, 0, k] += h
        pts[k, 1, k] -= h
    return pts


def fd_partial(f, x, axis: int, h: float = DEFAULT_FD_STEP):
    """Central difference of a batched evaluator along one axis."""
    x = np.asarray(x, dtype=float)
    plus = x.copy()
    minus = x.copy()
    plus[..., axis] += h
    minus[..., axis] -= h
    return (f(plus) - f(minus)) / (2.0 * h)


def fd_moisil_theodoresco(f, x, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference Moisil-Theodoresco operator sum_k i_k * df/dx_k.

    `f` maps points (..., 3) to quaternions (..., 4); the product i_k * f
    is the quaternionic one, so the result carries -div, grad and rot
    contributions in its scalar/vector parts.
    """
    vals = f(_stencil(x, h))  # (3, 2, 4)
    out = np.zeros(4, dtype=complex)
    for k in range(3):
        out += q.qmul(q.UNITS[k + 1], (vals[k, 0] - vals[k, 1]) / (2.0 * h))
    return out


def fd_d_alpha(f, alpha, sign: int, x, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference (D + sign*alpha) f at x."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return fd_moisil_theodoresco(f, x, h) + sign * alpha * f(np.asarray(x, dtype=float))


def fd_jacobian(fvec, x, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """J[i, j] = d f_i / d x_j for a C^3-valued batched evaluator."""
    vals = fvec(_stencil(x, h))  # (3, 2, 3)
    return np.stack([(vals[j, 0] - vals[j, 1]) / (2.0 * h) for j in range(3)], axis=-1)


def fd_div(fvec, x, h: float = DEFAULT_FD_STEP):
    return np.trace(fd_jacobian(fvec, x, h))


def fd_curl(fvec, x, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    jac = fd_jacobian(fvec, x, h)
    return np.array(
        [
            jac[2, 1] - jac[1, 2],
            jac[0, 2] - jac[2, 0],
            jac[1, 0] - jac[0, 1],
        ]
    )
