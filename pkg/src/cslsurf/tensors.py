"""Geometry-invariant surface tensors of a body boundary.

Two symmetric 3x3 tensors encode everything the collapse-noise coupling
needs to know about a homogeneous rigid body:

* the translational surface tensor, the boundary integral of the outer
  product of the outward unit normal with itself (units m^2, trace equal
  to the total area), and
* the rotational surface tensor, the boundary integral of
  (r x n) o (r x n) about a chosen origin (units m^4).

Both reduce to weighted sums over a :class:`SurfacePatches` quadrature.
"""

import numpy as np

from .errors import NonUnitAxis
from .geometry.patches import SurfacePatches

PSD_CLAMP_REL = 1e-10


def surface_tensor(patches: SurfacePatches) -> np.ndarray:
    """Integral of n o n dS over the boundary; symmetric PSD, trace = area."""
    n, w = patches.normals, patches.weights
    t = np.einsum("p,pi,pj->ij", w, n, n)
    return 0.5 * (t + t.T)


def rotational_surface_tensor(patches: SurfacePatches, origin=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Integral of (r x n) o (r x n) dS about ``origin``.

    Physically meaningful about the body centroid; any origin is accepted
    (the dependence on origin is the lever-arm shift, which callers may
    want to probe).
    """
    r = patches.points - np.asarray(origin, dtype=float)
    rxn = np.cross(r, patches.normals)
    t = np.einsum("p,pi,pj->ij", patches.weights, rxn, rxn)
    return 0.5 * (t + t.T)


def axial_rotational_strength(patches: SurfacePatches, origin, axis) -> float:
    """Integral of the squared triple product [r, n, axis] dS.

    Direct accumulation of ((r x n) . axis)^2; equals the quadratic form
    axis . S_rot . axis of :func:`rotational_surface_tensor` identically.
    ``axis`` must be unit length.
    """
    axis = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
        raise NonUnitAxis(f"rotation axis must be unit length, |axis| = {np.linalg.norm(axis)}")
    r = patches.points - np.asarray(origin, dtype=float)
    triple = np.einsum("pi,i->p", np.cross(r, patches.normals), axis)
    return float(np.sum(patches.weights * triple**2))


def clamp_psd(tensor, rel_tol=PSD_CLAMP_REL):
    """Zero out negative eigenvalues within -rel_tol * trace (float noise).

    Raises ValueError for genuinely indefinite input.
    """
    t = 0.5 * (tensor + tensor.T)
    vals, vecs = np.linalg.eigh(t)
    scale = max(np.trace(t), 0.0)
    floor = -rel_tol * scale if scale > 0 else -rel_tol
    if np.any(vals < floor):
        raise ValueError(f"tensor is not positive semidefinite: eigenvalues {vals}")
    return (vecs * np.maximum(vals, 0.0)) @ vecs.T


def is_psd(tensor, rel_tol=PSD_CLAMP_REL):
    t = 0.5 * (tensor + tensor.T)
    vals = np.linalg.eigvalsh(t)
    scale = max(abs(np.trace(t)), 1e-300)
    return bool(np.all(vals >= -rel_tol * scale))


def principal_axes(tensor):
    """Eigenvalues (ascending) and unit eigenvector columns of a symmetric tensor."""
    vals, vecs = np.linalg.eigh(0.5 * (tensor + tensor.T))
    return vals, vecs
