import attr
import numpy as np

# Plateau and support of the truncation profile.
PLATEAU = 0.25
SUPPORT = 1.0


def _ramp(t):
    return np.clip((np.abs(t) - PLATEAU) / (SUPPORT - PLATEAU), 0.0, 1.0)


def cutoff(t):
    """Even quintic smoothstep: 1 on |t| <= 1/4, 0 on |t| >= 1, C² in between."""
    s = _ramp(np.asarray(t, dtype=float))
    return 1.0 - s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


def cutoff_derivative(t):
    t = np.asarray(t, dtype=float)
    s = _ramp(t)
    slope = -30.0 * s ** 2 * (1.0 - s) ** 2 / (SUPPORT - PLATEAU)
    return np.sign(t) * slope


def _positive(instance, attribute, value):
    # pylint: disable=unused-argument
    if not value > 0:
        raise ValueError("%s must be strictly positive, got %r" % (attribute.name, value))


@attr.s(frozen=True)
class ConnectParams(object):
    """Band width δ, sharpness n and test-function exponent α."""

    band = attr.ib(converter=float, validator=_positive)
    sharpness = attr.ib(default=1.0, converter=float)
    alpha = attr.ib(default=1.5, converter=float)

    @sharpness.validator
    def _check_sharpness(self, attribute, value):
        # pylint: disable=unused-argument
        if value < 1.0:
            raise ValueError("sharpness must be at least 1, got %r" % value)

    @alpha.validator
    def _check_alpha(self, attribute, value):
        # pylint: disable=unused-argument
        if not 1.0 < value < 2.0:
            raise ValueError("alpha must lie in (1, 2), got %r" % value)

    @property
    def layer_scale(self):
        """Inverse width of the test-function layer, n**alpha."""
        return self.sharpness ** self.alpha
