import logging

import numpy as np
from scipy import integrate, sparse
from scipy.sparse import linalg as sparse_linalg

from ..exceptions import IncompatibleDataError
from .grid import AnnulusField

LOG = logging.getLogger("fsilab.slip")

# Largest admissible least-squares residual of the mean mode, relative to the data.
COMPATIBILITY_TOLERANCE = 1e-8

# Flux defects within this multiple of the trapezoid error estimate are quadrature error.
QUADRATURE_SAFETY = 10.0


def _boundary_lift(grid, inner, outer):
    xi = (grid.z - grid.z0) / (grid.z1 - grid.z0)
    values = (1.0 - xi)[:, None, None] * inner[None] + xi[:, None, None] * outer[None]
    return AnnulusField(grid, values)


def flux_defect(grid, target):
    """Defect of the flux identity for the radial mean mode ``target``.

    ``target`` samples ∂_z(ρ ū_ρ) over z, so its integral vanishes for
    compatible data. Returns the trapezoid integral, its size relative to
    ∫|target| and the admissible size: the tolerance plus a multiple of
    the gap between the trapezoid and Simpson sums.
    """
    z = grid.z
    flux = float(integrate.trapezoid(target, z))
    scale = float(integrate.trapezoid(np.abs(target), z))
    if scale == 0:
        return flux, 0.0, COMPATIBILITY_TOLERANCE
    error = abs(flux - float(integrate.simpson(target, x=z)))
    return flux, abs(flux) / scale, COMPATIBILITY_TOLERANCE + QUADRATURE_SAFETY * error / scale


def _solve_mean_mode(g_interior, target):
    normal = (g_interior.T @ g_interior).tocsc()
    mean = sparse_linalg.spsolve(normal, g_interior.T @ target)
    return mean, np.linalg.norm(g_interior @ mean - target)


def solve_divergence_correction(grid, f, inner=None, outer=None):
    """A field with discrete divergence ``f`` and the given boundary traces.

    ``f`` holds node values of shape (n_z, n_s); ``inner`` and ``outer`` are
    world-frame vectors on the two circles, zero when omitted. The traces are
    lifted linearly in z; the remainder vanishes on both circles and is the
    minimal-norm solution of each Fourier mode of ∂_z(ρ u_ρ) + ∂_θ u_θ = ρ f.

    The mean mode has no angular unknown and is solved in the least-squares
    sense. Data outside the range of the discrete operator, such as the
    exact divergence of a smooth field, are accepted when they satisfy the
    flux identity ∫ρ f̄ dz = [ρ φ̄_ρ] to quadrature accuracy; their mean mode
    is then solved on the projection with zero net flux and the divergence
    matches ``f`` up to that quadrature error.

    Raises IncompatibleDataError with the relative flux defect otherwise.
    """
    f = np.asarray(f, dtype=float)
    zeros = np.zeros((grid.n_s, 2))
    inner = zeros if inner is None else np.asarray(inner, dtype=float)
    outer = zeros if outer is None else np.asarray(outer, dtype=float)
    lift = _boundary_lift(grid, inner, outer)

    rho = grid.rho
    source = rho[:, None] * (f - lift.divergence())
    modes = np.fft.rfft(source, axis=1)
    gradient = grid.gradient_operator()
    interior = sparse.eye(grid.n_z, format="csr")[:, 1:-1]
    g_interior = (gradient @ interior).tocsr()

    flux = np.zeros((grid.n_z, modes.shape[1]), dtype=complex)
    spin = np.zeros((grid.n_z, modes.shape[1]), dtype=complex)

    target = modes[:, 0].real
    mean, residual = _solve_mean_mode(g_interior, target)
    scale = np.linalg.norm(modes) + np.linalg.norm(rho[:, None] * f)
    scale += np.linalg.norm(inner) + np.linalg.norm(outer)
    defect = residual / scale if scale > 0 else 0.0
    if defect > COMPATIBILITY_TOLERANCE:
        net, flux_error, allowance = flux_defect(grid, target)
        if flux_error > allowance:
            raise IncompatibleDataError("divergence data violate the flux identity", flux_error)
        mean, residual = _solve_mean_mode(g_interior, target - net / (grid.z1 - grid.z0))
        LOG.debug(
            "Mean mode compatible to quadrature accuracy: flux defect %.3e (allowed %.3e), "
            "projection residual %.3e",
            flux_error,
            allowance,
            residual / scale,
        )
    flux[1:-1, 0] = mean

    normal = (g_interior @ g_interior.T).astype(complex)
    selector = (interior @ interior.T).astype(complex)
    for k in range(1, modes.shape[1]):
        system = (normal + k ** 2 * selector).tocsc()
        dual = sparse_linalg.spsolve(system, modes[:, k])
        flux[1:-1, k] = g_interior.T @ dual
        spin[1:-1, k] = np.conj(1j * k) * (interior.T @ dual)

    radial = np.fft.irfft(flux, n=grid.n_s, axis=1) / rho[:, None]
    tangential = np.fft.irfft(spin, n=grid.n_s, axis=1)
    result = lift + AnnulusField.from_polar(grid, radial, tangential)

    data_norm = grid.l2_norm(f) + np.linalg.norm(inner) + np.linalg.norm(outer)
    if data_norm > 0:
        LOG.debug(
            "Divergence solve on %dx%d grid: operator constant %.3e, mean-mode defect %.3e",
            grid.n_z,
            grid.n_s,
            result.l2_norm() / data_norm,
            defect,
        )
    return result


def divergence_residual(field, f):
    """Relative discrete L² residual of div(field) − f."""
    grid = field.grid
    mismatch = grid.l2_norm(field.divergence() - f)
    scale = max(grid.l2_norm(f), field.l2_norm(), 1e-300)
    return mismatch / scale
