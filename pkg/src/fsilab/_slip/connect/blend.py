import numpy as np

from .grid import AnnulusField, require_resolution
from .profile import cutoff


def tangential(values, normals):
    """Remove the component of ``values`` along the unit ``normals``."""
    return values - np.sum(values * normals, axis=-1)[..., None] * normals


def radial_units(points, center):
    offsets = np.asarray(points, dtype=float) - np.asarray(center)
    return offsets / np.linalg.norm(offsets, axis=-1)[..., None]


def blend_tangential(U, U_S, params):
    """Steer the tangential part of ``U`` toward the rigid field near the boundary.

    Node-wise ``U + χ(n z)·tan(U_S − U)``: equal to U_S plus the normal
    mismatch on the boundary and to U once n·z >= 1.
    """
    grid = U.grid
    require_resolution(grid, params.sharpness)
    rigid = U_S(grid.points)
    weights = cutoff(params.sharpness * grid.z)[:, None, None]
    mismatch = tangential(rigid - U.values, grid.e_rho[None, :, :])
    return AnnulusField(grid, U.values + weights * mismatch)


def blend_tangential_at(points, values, rigid_values, weights, center):
    """Pointwise ``values + weights·tan(rigid_values − values)``."""
    normals = radial_units(points, center)
    mismatch = tangential(np.asarray(rigid_values) - np.asarray(values), normals)
    return values + np.asarray(weights)[..., None] * mismatch
