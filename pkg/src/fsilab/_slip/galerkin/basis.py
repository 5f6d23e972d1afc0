import math

import attr
import numpy as np

from ..exceptions import SchemeError


def _modes(cavity, count):
    length, height = cavity.extents
    bound = 1

    def frequency(pair):
        return pair[0] ** 2 / length ** 2 + pair[1] ** 2 / height ** 2

    while True:
        pairs = [(a, b) for a in range(1, bound + 1) for b in range(1, bound + 1)]
        pairs.sort(key=lambda ab: (frequency(ab), ab))
        # Pairs outside the square have frequency at least `limit`.
        limit = (bound + 1) ** 2 / max(length, height) ** 2
        if len(pairs) >= count and frequency(pairs[count - 1]) < limit:
            return tuple(pairs[:count])
        bound += 1


@attr.s(frozen=True, eq=False)
class Basis(object):
    """Divergence-free stream-function basis of the rectangular cavity.

    e_k = (∂_y ψ_k, −∂_x ψ_k) with ψ_k = sin(aπx/L)·sin(bπy/H)/c_k; the
    normalization makes the fields L²-orthonormal, and ψ_k vanishing on the
    walls makes every field tangent to them.
    """

    cavity = attr.ib()
    modes = attr.ib(converter=tuple)

    def __len__(self):
        return len(self.modes)

    @property
    def wavenumbers(self):
        length, height = self.cavity.extents
        pairs = np.asarray(self.modes, dtype=float)
        return pairs[:, 0] * math.pi / length, pairs[:, 1] * math.pi / height

    @property
    def normalization(self):
        kx, ky = self.wavenumbers
        return np.sqrt((kx ** 2 + ky ** 2) * self.cavity.volume / 4.0)

    def _trig(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        kx, ky = self.wavenumbers
        x = np.multiply.outer(kx, points[..., 0])
        y = np.multiply.outer(ky, points[..., 1])
        scale = self.normalization.reshape((-1,) + (1,) * (x.ndim - 1))
        kx = kx.reshape(scale.shape)
        ky = ky.reshape(scale.shape)
        return np.sin(x), np.cos(x), np.sin(y), np.cos(y), kx, ky, scale

    def stream(self, points):
        """ψ_k at the points, shape (N, ...)."""
        sx, _, sy, _, _, _, scale = self._trig(points)
        return sx * sy / scale

    def values(self, points):
        """e_k at the points, shape (N, ..., 2)."""
        sx, cx, sy, cy, kx, ky, scale = self._trig(points)
        return np.stack([ky * sx * cy / scale, -kx * cx * sy / scale], axis=-1)

    def gradients(self, points):
        """∂_j (e_k)_i at the points, shape (N, ..., 2, 2) indexed [k, ..., i, j]."""
        sx, cx, sy, cy, kx, ky, scale = self._trig(points)
        dxx = kx * ky * cx * cy / scale
        dxy = -ky ** 2 * sx * sy / scale
        dyx = kx ** 2 * sx * sy / scale
        row_x = np.stack([dxx, dxy], axis=-1)
        row_y = np.stack([dyx, -dxx], axis=-1)
        return np.stack([row_x, row_y], axis=-2)

    def field(self, coefficients):
        """Sampler of u = Σ α_k e_k."""
        alpha = np.asarray(coefficients, dtype=float)

        def sampler(points):
            return np.tensordot(alpha, self.values(points), axes=(0, 0))

        return sampler

    def stream_function(self, coefficients):
        alpha = np.asarray(coefficients, dtype=float)

        def sampler(points):
            return np.tensordot(alpha, self.stream(points), axes=(0, 0))

        return sampler

    def gradient_field(self, coefficients):
        alpha = np.asarray(coefficients, dtype=float)

        def sampler(points):
            return np.tensordot(alpha, self.gradients(points), axes=(0, 0))

        return sampler


def build_basis(cavity, size):
    """The first ``size`` stream-function modes ordered by frequency."""
    if size < 1:
        raise SchemeError("basis size must be at least 1, got %r" % size)
    if cavity.dimension != 2:
        raise SchemeError("the Galerkin basis is only available for planar cavities")
    return Basis(cavity=cavity, modes=_modes(cavity, size))
