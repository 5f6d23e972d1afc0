import logging

import attr
import numpy as np

from ..exceptions import IncompatibleDataError
from .grid import AnnulusField

LOG = logging.getLogger("fsilab.slip")

NEUMANN_TOLERANCE = 1e-10


@attr.s(frozen=True, eq=False)
class HarmonicPotential(object):
    """Y = Σ_k Re[(A_k (ρ/ρ_out)^k + B_k (ρ_in/ρ)^k) e^{ikθ}] on an annulus.

    θ is the body-frame angle of the grid. The mean mode is zero, so Y has
    zero average over the annulus.
    """

    grid = attr.ib()
    outer = attr.ib()
    inner = attr.ib()

    @property
    def wavenumbers(self):
        return np.arange(len(self.outer))

    def _radial(self, rho):
        rho_in, rho_out = self.grid.rho[0], self.grid.rho[-1]
        k = self.wavenumbers
        grow = (np.asarray(rho)[..., None] / rho_out) ** k
        decay = (rho_in / np.asarray(rho)[..., None]) ** k
        value = self.outer * grow + self.inner * decay
        slope = k * (self.outer * grow - self.inner * decay) / np.asarray(rho)[..., None]
        return value, slope

    def _modes(self, points):
        z, theta = self.grid.locate(points)
        rho = self.grid.shape.radius + z
        phases = np.exp(1j * np.multiply.outer(theta, self.wavenumbers))
        value, slope = self._radial(rho)
        return rho, theta, value * phases, slope * phases

    def potential(self, points):
        _, _, value, _ = self._modes(points)
        return np.real(value.sum(axis=-1))

    def gradient(self, points):
        rho, theta, value, slope = self._modes(points)
        d_rho = np.real(slope.sum(axis=-1))
        d_theta = np.real((1j * self.wavenumbers * value).sum(axis=-1)) / rho
        radial, angular = self.grid.frame(theta)
        return d_rho[:, None] * radial + d_theta[:, None] * angular

    def __call__(self, points):
        return self.gradient(points)

    def as_field(self):
        """∇Y sampled on the grid nodes."""
        values = self.gradient(self.grid.points.reshape(-1, 2))
        return AnnulusField(self.grid, values.reshape(self.grid.n_z, self.grid.n_s, 2))

    def laplacian_residual(self):
        """Largest relative residual of ρ²Y_k'' + ρY_k' − k²Y_k on the radial nodes."""
        rho = self.grid.rho
        k = self.wavenumbers
        rho_in, rho_out = rho[0], rho[-1]
        grow = (rho[:, None] / rho_out) ** k
        decay = (rho_in / rho[:, None]) ** k
        first = k * (self.outer * grow - self.inner * decay)
        second = k * (k - 1) * self.outer * grow + k * (k + 1) * self.inner * decay
        value = self.outer * grow + self.inner * decay
        residual = second + first - k ** 2 * value
        scale = np.max(np.abs(k ** 2 * value)) if np.any(value) else 1.0
        return float(np.max(np.abs(residual)) / max(scale, 1e-300))


def harmonic_neumann(grid, g):
    """Harmonic Y with ∂_z Y = g on the inner circle and ∂_z Y = 0 on the outer one.

    ``g`` holds samples at the grid angles. Each Fourier mode is solved in
    closed form; the mean of ``g`` must vanish.
    """
    g = np.asarray(g, dtype=float)
    count = grid.n_s
    modes = np.fft.rfft(g) / count
    flux = 2.0 * np.pi * grid.rho[0] * modes[0].real
    scale = max(float(np.sqrt(np.mean(g ** 2))) * 2.0 * np.pi * grid.rho[0], 1e-300)
    if abs(flux) > NEUMANN_TOLERANCE * scale and abs(flux) > 1e-14:
        raise IncompatibleDataError("Neumann data have nonzero total flux", abs(flux))
    coefficients = 2.0 * modes
    coefficients[0] = 0.0

    rho_in, rho_out = grid.rho[0], grid.rho[-1]
    k = np.arange(len(modes))
    ratio = (rho_in / rho_out) ** k
    inner = np.zeros(len(modes), dtype=complex)
    nonzero = k > 0
    inner[nonzero] = -coefficients[nonzero] * rho_in / (k[nonzero] * (1.0 - ratio[nonzero] ** 2))
    outer = inner * ratio
    LOG.debug("Harmonic Neumann solve with %d modes, inflow %.3e", len(modes) - 1, flux)
    return HarmonicPotential(grid=grid, outer=outer, inner=inner)
