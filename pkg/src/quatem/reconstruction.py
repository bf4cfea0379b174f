"""Field reconstruction from boundary traces and the extendibility check.

Both electromagnetic assemblies are provided: the mode path (reconstruct
Phi and Psi, then merge) and the direct path that evaluates the explicit
two-kernel displays for E and H.  They are algebraically identical and are
cross-checked against each other in the tests.

The boundary criterion ("are e, h traces of an interior solution?") is
evaluated as an interior limit: the layer potentials are computed at
points offset inward from each triangle and extrapolated back to the
surface, which sidesteps singular surface quadrature entirely.  The
problem itself is ill-posed, so only residuals are reported; nothing is
solved or regularized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import quaternions as q
from .fields import AnalyticField
from .geometry import SurfaceMesh, VolumeQuadrature, interior_offset_points
from .kernels import DEFAULT_FD_STEP, fd_curl
from .maxwell import ChiralMedium, SourceData, phi_psi_rhs, split_values
from .operators import (
    MIN_DISTANCE_FACTOR,
    RESIDUAL_FLOOR,
    BoundaryDensity,
    VolumeDensity,
    cauchy_boundary,
    cauchy_boundary_many,
    teodorescu,
)

# Coefficients of the inward-depth extrapolation toward the surface:
# values at depth*m are combined with weight c for each (m, c).
EXTRAPOLATIONS = {
    "none": ((1, 1.0),),
    "linear": ((1, 2.0), (2, -1.0)),
    "quadratic": ((1, 3.0), (2, -3.0), (3, 1.0)),
}


def _mode_operator_pair(medium: ChiralMedium):
    """(alpha, sign) pairs of the two mode operators: D + alpha1 for Phi
    and D - alpha2 for Psi."""
    return (medium.alpha1, 1), (medium.alpha2, -1)


def phi_psi_representation(phi_trace: BoundaryDensity, psi_trace: BoundaryDensity,
                           source: Optional[SourceData], medium: ChiralMedium,
                           quadrature: Optional[VolumeQuadrature], x,
                           **operator_options):
    """Interior values of the two modes from their boundary traces.

    Phi(x) = T_{+a1}(rhs_phi)(x) + K_{+a1} Phi(x)
    Psi(x) = T_{-a2}(rhs_psi)(x) + K_{-a2} Psi(x)
    """
    (a1, s1), (a2, s2) = _mode_operator_pair(medium)
    phi_x = cauchy_boundary(a1, s1, phi_trace, x, **operator_options)
    psi_x = cauchy_boundary(a2, s2, psi_trace, x, **operator_options)
    if source is not None:
        if quadrature is None:
            raise ValueError("a volume quadrature is required when a source is present")
        rhs_phi, rhs_psi = phi_psi_rhs(source, medium)
        phi_x = phi_x + teodorescu(a1, s1, VolumeDensity.from_function(quadrature, rhs_phi), x)
        psi_x = psi_x + teodorescu(a2, s2, VolumeDensity.from_function(quadrature, rhs_psi), x)
    return phi_x, psi_x


def _mode_traces(mesh: SurfaceMesh, e_trace, h_trace):
    """Panel-constant Phi/Psi boundary densities from per-triangle e, h."""
    phi_b, psi_b = split_values(e_trace, h_trace)
    return (
        BoundaryDensity.from_triangle_values(mesh, q.vector(phi_b)),
        BoundaryDensity.from_triangle_values(mesh, q.vector(psi_b)),
    )


def reconstruct_eh(mesh: SurfaceMesh, e_trace, h_trace,
                   source: Optional[SourceData], medium: ChiralMedium,
                   quadrature: Optional[VolumeQuadrature], x,
                   assembly: str = "direct", **operator_options):
    """E and H at an interior point from per-triangle boundary traces.

    assembly="direct" evaluates the explicit two-kernel displays;
    assembly="modes" reconstructs Phi, Psi and merges.  The two paths are
    the same sums grouped differently and must agree to roundoff.
    Returns full quaternions (the scalar parts measure discretization
    error; they vanish in the continuum).
    """
    phi_trace, psi_trace = _mode_traces(mesh, e_trace, h_trace)
    (a1, s1), (a2, s2) = _mode_operator_pair(medium)

    if assembly == "modes":
        phi_x, psi_x = phi_psi_representation(
            phi_trace, psi_trace, source, medium, quadrature, x, **operator_options)
        return 0.5 * (phi_x + psi_x), (phi_x - psi_x) / 2j
    if assembly != "direct":
        raise ValueError("assembly must be 'direct' or 'modes'")

    k1 = cauchy_boundary(a1, s1, phi_trace, x, **operator_options)
    k2 = cauchy_boundary(a2, s2, psi_trace, x, **operator_options)
    if source is not None:
        if quadrature is None:
            raise ValueError("a volume quadrature is required when a source is present")
        rhs_phi, rhs_psi = phi_psi_rhs(source, medium)
        t1 = teodorescu(a1, s1, VolumeDensity.from_function(quadrature, rhs_phi), x)
        t2 = teodorescu(a2, s2, VolumeDensity.from_function(quadrature, rhs_psi), x)
    else:
        t1 = t2 = np.zeros(4, dtype=complex)
    e_x = 0.5 * (t1 + k1) + 0.5 * (t2 + k2)
    h_x = ((t1 + k1) - (t2 + k2)) / 2j
    return e_x, h_x


def boundary_criterion_values(mesh: SurfaceMesh, e_trace, h_trace,
                              medium: ChiralMedium, x, **operator_options):
    """Right-hand sides of the extendibility equalities at an interior x:

    e_pred = (K1 Phi + K2 Psi) / 2,   h_pred = (K1 Phi - K2 Psi) / (2i)

    with K1 = K_{+alpha1}, K2 = K_{-alpha2} and Phi, Psi the split traces.
    """
    phi_trace, psi_trace = _mode_traces(mesh, e_trace, h_trace)
    (a1, s1), (a2, s2) = _mode_operator_pair(medium)
    k1 = cauchy_boundary(a1, s1, phi_trace, x, **operator_options)
    k2 = cauchy_boundary(a2, s2, psi_trace, x, **operator_options)
    return 0.5 * (k1 + k2), (k1 - k2) / 2j


@dataclass(frozen=True)
class ExtendibilityReport:
    """Per-collocation-point and aggregate residuals of the criterion."""

    points: np.ndarray       # (T, 3) surface collocation points (centroids)
    residual_e: np.ndarray   # (T,) relative residual of the e equality
    residual_h: np.ndarray   # (T,)
    scale: float             # trace magnitude used for normalization
    depth: float
    extrapolation: str

    @property
    def max_e(self) -> float:
        return float(self.residual_e.max())

    @property
    def max_h(self) -> float:
        return float(self.residual_h.max())

    @property
    def rms_e(self) -> float:
        return float(np.sqrt(np.mean(self.residual_e**2)))

    @property
    def rms_h(self) -> float:
        return float(np.sqrt(np.mean(self.residual_h**2)))

    @property
    def rms(self) -> float:
        return float(np.sqrt(0.5 * (self.rms_e**2 + self.rms_h**2)))


def extendibility_residual(mesh: SurfaceMesh, e_trace, h_trace,
                           medium: ChiralMedium, depth: float,
                           extrapolation: str = "quadratic",
                           min_distance_factor: float = MIN_DISTANCE_FACTOR,
                           floor: float = RESIDUAL_FLOOR) -> ExtendibilityReport:
    """Residuals of the boundary-trace criterion, per triangle.

    The criterion's right-hand sides are evaluated at points offset inward
    by multiples of `depth` and extrapolated to the surface, then compared
    with the given traces at the centroids.  Residuals are quaternion
    norms (the scalar part of the prediction must vanish too) relative to
    the overall trace magnitude.
    """
    if extrapolation not in EXTRAPOLATIONS:
        raise ValueError("extrapolation must be one of %s" % sorted(EXTRAPOLATIONS))
    e_trace = np.asarray(e_trace, dtype=complex)
    h_trace = np.asarray(h_trace, dtype=complex)
    n_tri = mesh.n_triangles
    if e_trace.shape != (n_tri, 3) or h_trace.shape != (n_tri, 3):
        raise ValueError("traces must hold one C^3 vector per triangle")

    scale = max(
        float(np.max(np.sqrt(np.sum(np.abs(e_trace)**2 + np.abs(h_trace)**2, axis=1)))),
        floor,
    )
    phi_trace, psi_trace = _mode_traces(mesh, e_trace, h_trace)
    (a1, s1), (a2, s2) = _mode_operator_pair(medium)
    e_pred = np.zeros((n_tri, 4), dtype=complex)
    h_pred = np.zeros((n_tri, 4), dtype=complex)
    for mult, coeff in EXTRAPOLATIONS[extrapolation]:
        pts, _ = interior_offset_points(mesh, mult * depth)
        k1 = cauchy_boundary_many(a1, s1, phi_trace, pts,
                                  min_distance_factor=min_distance_factor)
        k2 = cauchy_boundary_many(a2, s2, psi_trace, pts,
                                  min_distance_factor=min_distance_factor)
        e_pred += coeff * 0.5 * (k1 + k2)
        h_pred += coeff * (k1 - k2) / 2j

    residual_e = q.norm(e_pred - q.vector(e_trace)) / scale
    residual_h = q.norm(h_pred - q.vector(h_trace)) / scale
    return ExtendibilityReport(
        points=mesh.centroids,
        residual_e=residual_e,
        residual_h=residual_h,
        scale=scale,
        depth=float(depth),
        extrapolation=extrapolation,
    )


def perturb_traces(mesh: SurfaceMesh, e_trace, h_trace, amplitude: float,
                   seed: int = 42):
    """Add random tangential noise of the given relative amplitude.

    The noise is real Gaussian, projected onto each triangle's tangent
    plane, normalized per point and scaled by amplitude times the rms
    trace magnitude.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    e_trace = np.array(e_trace, dtype=complex, copy=True)
    h_trace = np.array(h_trace, dtype=complex, copy=True)
    out = []
    for trace in (e_trace, h_trace):
        rms = float(np.sqrt(np.mean(np.sum(np.abs(trace)**2, axis=1))))
        raw = rng.standard_normal(trace.shape[:1] + (3,))
        raw -= np.einsum("ti,ti->t", raw, mesh.normals)[:, None] * mesh.normals
        raw /= np.linalg.norm(raw, axis=1)[:, None]
        out.append(trace + amplitude * rms * raw)
    return out[0], out[1]


def maxwell_residual(e_field: AnalyticField, h_field: AnalyticField,
                     medium: ChiralMedium, x, h_step: float = DEFAULT_FD_STEP,
                     source: Optional[SourceData] = None,
                     floor: float = RESIDUAL_FLOOR):
    """Finite-difference residuals of the two chiral curl equations at x.

    rot E = -ik (H + beta rot H)
    rot H =  ik (E + beta rot E) + j

    Each residual is normalized by the larger of its two sides.
    """
    x = np.asarray(x, dtype=float)
    k, beta = medium.k, medium.beta
    rot_e = fd_curl(e_field.vector_value, x, h_step)
    rot_h = fd_curl(h_field.vector_value, x, h_step)
    e_x = e_field.vector_value(x)
    h_x = h_field.vector_value(x)

    rhs1 = -1j * k * (h_x + beta * rot_h)
    rhs2 = 1j * k * (e_x + beta * rot_e)
    if source is not None:
        rhs2 = rhs2 + q.vec(source.j.value(x))
    r1 = np.linalg.norm(rot_e - rhs1) / max(np.linalg.norm(rot_e), np.linalg.norm(rhs1), floor)
    r2 = np.linalg.norm(rot_h - rhs2) / max(np.linalg.norm(rot_h), np.linalg.norm(rhs2), floor)
    return float(r1), float(r2)
