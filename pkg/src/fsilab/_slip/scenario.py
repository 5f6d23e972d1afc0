"""Scenario files: strict TOML with documented defaults.

A scenario names the cavity, the solid, the fluid constants and the scheme
knobs; optional sections configure the gap ODE, the initial velocity, the
outputs and the rate studies. Physical constants never have defaults.
"""
import logging
import re

import attr
import numpy as np
import tomli
import tomli_w

from .collision import DRAG_KINDS, METHODS, CONTACT_HEIGHT, DragLaw, GapState
from .collision import buoyancy_acceleration
from .exceptions import ScenarioError, SlipError
from .galerkin import SimParams
from .geometry import Cavity, Placement, SolidShape, gap_distance
from .rates import SimulationSetup

LOG = logging.getLogger("fsilab.slip")

MODES = ("simulate", "gap-ode", "rates", "check")

# Band width as a fraction of the initial gap when [scheme].band is omitted.
BAND_FRACTION = 0.1

_REQUIRED = object()


def _float(value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError("expected a number")
    return float(value)


def _int(value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError("expected an integer")
    return value


def _string(value):
    if not isinstance(value, str):
        raise TypeError("expected a string")
    return value


def _floats(value):
    if not isinstance(value, list):
        raise TypeError("expected an array of numbers")
    return tuple(_float(v) for v in value)


def _orientation(value):
    if isinstance(value, list):
        return tuple(_floats(row) for row in value)
    return _float(value)


def _positive(value):
    if not value > 0:
        return "must be strictly positive"
    return None


def _nonnegative(value):
    if value < 0:
        return "must be nonnegative"
    return None


def _all_positive(values):
    if not values or min(values) <= 0:
        return "must be a nonempty array of strictly positive values"
    return None


def _vector(values):
    if len(values) not in (2, 3):
        return "must have 2 or 3 components"
    return None


def _one_of(choices):
    def check(value):
        if value not in choices:
            return "must be one of %s" % ", ".join(choices)
        return None

    return check


@attr.s(frozen=True)
class Key(object):
    convert = attr.ib()
    default = attr.ib(default=_REQUIRED)
    check = attr.ib(default=None)

    @property
    def required(self):
        return self.default is _REQUIRED


SECTIONS = {
    "cavity": {"extents": Key(_floats, check=_vector)},
    "solid": {
        "radius": Key(_float, check=_positive),
        "rho": Key(_float, check=_positive),
        "center": Key(_floats, check=_vector),
        "orientation": Key(_orientation, default=0.0),
    },
    "fluid": {
        "rho": Key(_float, check=_positive),
        "mu": Key(_float, check=_positive),
        "slip_solid": Key(_float, check=_positive),
        "slip_wall": Key(_float, check=_positive),
        "gravity": Key(_floats, check=_vector),
    },
    "scheme": {
        "t_end": Key(_float, check=_positive),
        "penalization": Key(_float, default=100.0),
        "band": Key(_float, default=None, check=_positive),
        "basis_size": Key(_int, default=32, check=_positive),
        "time_step": Key(_float, default=1e-3, check=_positive),
        "picard_tol": Key(_float, default=1e-10, check=_positive),
        "picard_max_iter": Key(_int, default=50, check=_positive),
        "relaxation": Key(_float, default=0.7),
        "quadrature_order": Key(_int, default=16, check=_positive),
    },
    "initial": {
        "coefficients": Key(_floats, default=()),
        "random_amplitude": Key(_float, default=0.0, check=_nonnegative),
    },
    "gap_ode": {
        "law": Key(_string, check=_one_of(DRAG_KINDS)),
        "coefficient": Key(_float, check=_positive),
        "t_end": Key(_float, check=_positive),
        "floor": Key(_float, default=0.0, check=_nonnegative),
        "height": Key(_float, default=None, check=_positive),
        "rate": Key(_float, default=0.0),
        "acceleration": Key(_float, default=None),
        "contact_height": Key(_float, default=CONTACT_HEIGHT, check=_nonnegative),
        "method": Key(_string, default="LSODA", check=_one_of(METHODS)),
        "rtol": Key(_float, default=1e-10, check=_positive),
        "atol": Key(_float, default=1e-12, check=_positive),
    },
    "output": {
        "directory": Key(_string, default="."),
        "prefix": Key(_string, default=None),
    },
    "rates": {
        "connect": Key(_floats, default=(8.0, 16.0, 32.0, 64.0, 128.0), check=_all_positive),
        "testfn": Key(_floats, default=(8.0, 16.0, 32.0, 64.0), check=_all_positive),
        "alpha": Key(_float, default=1.5),
        "penalization": Key(
            _floats, default=(10.0, 100.0, 1000.0, 10000.0), check=_all_positive
        ),
        "rigidify": Key(_floats, default=(0.2, 0.1, 0.05, 0.025), check=_all_positive),
        "construction_band": Key(_float, default=0.5, check=_positive),
        "slip_limit": Key(_floats, default=(1.0, 0.5, 0.25), check=_all_positive),
        "self_convergence_levels": Key(_int, default=3),
    },
}

REQUIRED_SECTIONS = ("cavity", "solid", "fluid", "scheme")

TOP_LEVEL = {
    "name": Key(_string, default="scenario"),
    "seed": Key(_int, default=0, check=_nonnegative),
    "mode": Key(_string, default=None, check=_one_of(MODES)),
}


@attr.s(frozen=True)
class InitialVelocity(object):
    coefficients = attr.ib(converter=tuple, default=())
    random_amplitude = attr.ib(converter=float, default=0.0)


@attr.s(frozen=True)
class GapOdeConfig(object):
    law = attr.ib()
    t_end = attr.ib()
    initial = attr.ib()
    acceleration = attr.ib()
    contact_height = attr.ib()
    method = attr.ib()
    rtol = attr.ib()
    atol = attr.ib()


@attr.s(frozen=True)
class OutputConfig(object):
    directory = attr.ib()
    prefix = attr.ib()


@attr.s(frozen=True)
class RatesConfig(object):
    connect = attr.ib(converter=tuple)
    testfn = attr.ib(converter=tuple)
    alpha = attr.ib()
    penalization = attr.ib(converter=tuple)
    rigidify = attr.ib(converter=tuple)
    construction_band = attr.ib()
    slip_limit = attr.ib(converter=tuple)
    self_convergence_levels = attr.ib()


@attr.s(frozen=True)
class Scenario(object):
    """A fully validated scenario with every default filled in."""

    name = attr.ib()
    seed = attr.ib()
    mode = attr.ib()
    cavity = attr.ib()
    shape = attr.ib()
    placement = attr.ib()
    params = attr.ib()
    t_end = attr.ib()
    initial = attr.ib()
    gap_ode = attr.ib()
    output = attr.ib()
    rates = attr.ib()

    def initial_coefficients(self):
        """Initial α: the listed coefficients plus seeded Gaussian noise."""
        size = self.params.basis_size
        alpha = np.zeros(size)
        given = np.asarray(self.initial.coefficients, dtype=float)[:size]
        alpha[: len(given)] = given
        if self.initial.random_amplitude > 0:
            generator = np.random.default_rng(self.seed)
            alpha += self.initial.random_amplitude * generator.standard_normal(size)
        return alpha

    def simulation_setup(self):
        return SimulationSetup(
            cavity=self.cavity,
            shape=self.shape,
            placement=self.placement,
            params=self.params,
            t_end=self.t_end,
            coefficients=self.initial_coefficients(),
        )

    def to_dict(self):
        """Normalized form: every section and key, defaults included."""
        params = self.params
        out = {
            "name": self.name,
            "seed": self.seed,
            "cavity": {"extents": list(self.cavity.extents)},
            "solid": {
                "radius": self.shape.radius,
                "rho": self.shape.density,
                "center": list(self.placement.center),
                "orientation": _plain(self.placement.orientation),
            },
            "fluid": {
                "rho": params.rho_fluid,
                "mu": params.mu_fluid,
                "slip_solid": params.slip_solid,
                "slip_wall": params.slip_wall,
                "gravity": list(params.gravity),
            },
            "scheme": {
                "t_end": self.t_end,
                "penalization": params.penalization,
                "band": params.band,
                "basis_size": params.basis_size,
                "time_step": params.time_step,
                "picard_tol": params.picard_tol,
                "picard_max_iter": params.picard_max_iter,
                "relaxation": params.relaxation,
                "quadrature_order": params.quadrature_order,
            },
            "initial": {
                "coefficients": list(self.initial.coefficients),
                "random_amplitude": self.initial.random_amplitude,
            },
            "output": attr.asdict(self.output),
            "rates": dict(
                (k, list(v) if isinstance(v, tuple) else v)
                for k, v in attr.asdict(self.rates).items()
            ),
        }
        if self.mode is not None:
            out["mode"] = self.mode
        if self.gap_ode is not None:
            ode = self.gap_ode
            out["gap_ode"] = {
                "law": ode.law.kind,
                "coefficient": ode.law.coefficient,
                "floor": ode.law.floor,
                "t_end": ode.t_end,
                "height": ode.initial.height,
                "rate": ode.initial.rate,
                "acceleration": ode.acceleration,
                "contact_height": ode.contact_height,
                "method": ode.method,
                "rtol": ode.rtol,
                "atol": ode.atol,
            }
        return out


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_\-]+)\s*\]\s*(#.*)?$")
_POSITION = re.compile(r"line (\d+), column (\d+)")


def locate(text, section, key=None):
    """(line, column) of ``key`` in ``section`` (None for top level), or of the header."""
    current = None
    header = (None, None)
    pattern = None
    if key is not None:
        pattern = re.compile(r"^(\s*)(%s|\"%s\")\s*=" % (re.escape(key), re.escape(key)))
    for number, line in enumerate(text.splitlines(), start=1):
        match = _HEADER.match(line)
        if match:
            current = match.group(1)
            if current == section:
                header = (number, line.index("[") + 1)
            continue
        if current == section and pattern is not None:
            found = pattern.match(line)
            if found:
                return number, len(found.group(1)) + 1
    return header


class _Reader(object):
    # Pulls typed, checked values out of a parsed document.
    def __init__(self, text, document):
        self.text = text
        self.document = document

    def error(self, message, section, key=None):
        line, column = locate(self.text, section, key)
        return ScenarioError(message, section=section, key=key, line=line, column=column)

    def section(self, name):
        table = self.document.get(name)
        if table is None:
            if name in REQUIRED_SECTIONS:
                raise ScenarioError("missing required section", section=name)
            return None
        if not isinstance(table, dict):
            raise self.error("must be a table", name)
        unknown = sorted(set(table) - set(SECTIONS[name]))
        if unknown:
            raise self.error("unknown key", name, unknown[0])
        values = {}
        for key, spec in SECTIONS[name].items():
            values[key] = self._value(table, name, key, spec)
        return values

    def top_level(self):
        values = {}
        for key, spec in TOP_LEVEL.items():
            values[key] = self._value(self.document, None, key, spec)
        return values

    def _value(self, table, section, key, spec):
        if key not in table:
            if spec.required:
                raise self.error("missing required key", section, key)
            return spec.default
        try:
            value = spec.convert(table[key])
        except TypeError as exc:
            raise self.error(str(exc), section, key)
        problem = spec.check(value) if spec.check else None
        if problem:
            raise self.error(problem, section, key)
        return value


def _syntax_error(exc):
    line = getattr(exc, "lineno", None)
    column = getattr(exc, "colno", None)
    if line is None:
        match = _POSITION.search(str(exc))
        if match:
            line, column = int(match.group(1)), int(match.group(2))
    message = getattr(exc, "msg", None) or str(exc).split(" (at ")[0]
    return ScenarioError("invalid TOML: %s" % message, line=line, column=column)


def parse_scenario(text):
    """Parse and validate scenario text; raises ScenarioError."""
    try:
        document = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise _syntax_error(exc)

    reader = _Reader(text, document)
    known = set(SECTIONS) | set(TOP_LEVEL)
    for name in sorted(document):
        if name not in known:
            if isinstance(document[name], dict):
                line, column = locate(text, name)
                raise ScenarioError("unknown section", section=name, line=line, column=column)
            line, column = locate(text, None, name)
            raise ScenarioError("unknown key", key=name, line=line, column=column)

    top = reader.top_level()
    cavity_keys = reader.section("cavity")
    solid_keys = reader.section("solid")
    fluid_keys = reader.section("fluid")
    scheme_keys = reader.section("scheme")
    initial_keys = reader.section("initial") or _defaults("initial")
    output_keys = reader.section("output") or _defaults("output")
    rates_keys = reader.section("rates") or _defaults("rates")
    gap_keys = reader.section("gap_ode")

    cavity = Cavity(cavity_keys["extents"])
    shape = SolidShape(solid_keys["radius"], solid_keys["rho"])
    if len(solid_keys["center"]) != cavity.dimension:
        raise reader.error("must have as many components as [cavity].extents", "solid", "center")
    if len(fluid_keys["gravity"]) != cavity.dimension:
        raise reader.error("must have as many components as [cavity].extents", "fluid", "gravity")
    try:
        placement = Placement(solid_keys["center"], solid_keys["orientation"])
    except ValueError as exc:
        raise reader.error(str(exc), "solid", "orientation")
    try:
        gap = gap_distance(placement, shape, cavity)
    except SlipError as exc:
        raise reader.error(str(exc), "solid", "center")
    if gap <= 0.0:
        raise reader.error("solid must not touch the cavity walls", "solid", "center")

    band = scheme_keys["band"]
    if band is None:
        band = BAND_FRACTION * gap
    elif not band < 0.5 * gap:
        raise reader.error(
            "must be below half the initial gap (%.6g)" % (0.5 * gap), "scheme", "band"
        )
    try:
        params = SimParams(
            rho_fluid=fluid_keys["rho"],
            mu_fluid=fluid_keys["mu"],
            slip_solid=fluid_keys["slip_solid"],
            slip_wall=fluid_keys["slip_wall"],
            gravity=fluid_keys["gravity"],
            band=band,
            penalization=scheme_keys["penalization"],
            basis_size=scheme_keys["basis_size"],
            time_step=scheme_keys["time_step"],
            picard_tol=scheme_keys["picard_tol"],
            picard_max_iter=scheme_keys["picard_max_iter"],
            relaxation=scheme_keys["relaxation"],
            quadrature_order=scheme_keys["quadrature_order"],
        )
    except ValueError as exc:
        key = str(exc).split(" ")[0]
        raise reader.error(str(exc), "scheme", key if key in SECTIONS["scheme"] else None)

    rates_alpha = rates_keys["alpha"]
    if not 1.0 < rates_alpha < 2.0:
        raise reader.error("must lie in (1, 2)", "rates", "alpha")
    if rates_keys["self_convergence_levels"] < 3:
        raise reader.error("must be at least 3", "rates", "self_convergence_levels")

    gap_ode = None
    if gap_keys is not None:
        gap_ode = _gap_ode(gap_keys, shape, placement, params)

    scenario = Scenario(
        name=top["name"],
        seed=top["seed"],
        mode=top["mode"],
        cavity=cavity,
        shape=shape,
        placement=placement,
        params=params,
        t_end=scheme_keys["t_end"],
        initial=InitialVelocity(**initial_keys),
        gap_ode=gap_ode,
        output=OutputConfig(
            directory=output_keys["directory"],
            prefix=output_keys["prefix"] or top["name"],
        ),
        rates=RatesConfig(**rates_keys),
    )
    LOG.debug("Parsed scenario %s with band %.6g and initial gap %.6g", scenario.name, band, gap)
    return scenario


def _defaults(section):
    return dict((key, spec.default) for key, spec in SECTIONS[section].items())


def _gap_ode(keys, shape, placement, params):
    height = keys["height"]
    if height is None:
        height = placement.center[-1] - shape.radius
    acceleration = keys["acceleration"]
    if acceleration is None:
        acceleration = buoyancy_acceleration(params.rho_fluid, shape.density, params.gravity)
    return GapOdeConfig(
        law=DragLaw(keys["law"], keys["coefficient"], keys["floor"]),
        t_end=keys["t_end"],
        initial=GapState(0.0, height, keys["rate"]),
        acceleration=float(acceleration),
        contact_height=keys["contact_height"],
        method=keys["method"],
        rtol=keys["rtol"],
        atol=keys["atol"],
    )


def load_scenario(path):
    with open(path, "rt") as f:
        return parse_scenario(f.read())


def dump_scenario(scenario):
    """TOML text of the normalized scenario; parse_scenario reads it back equal."""
    return tomli_w.dumps(scenario.to_dict())
