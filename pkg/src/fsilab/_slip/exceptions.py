class SlipError(Exception):
    """Base class for errors raised by the slip laboratory"""


class GeometryError(SlipError):
    """Exception class for invalid placements and coordinate queries"""


class RigidMotionError(SlipError):
    """Exception class for degenerate inertial data"""


class PropagationError(SlipError):
    """Exception class for failures of the isometric propagator integration"""


class IncompatibleDataError(SlipError):
    """Exception class for data violating a solvability condition"""

    def __init__(self, message, defect):
        super(IncompatibleDataError, self).__init__(
            "%s (measured defect %.3e)" % (message, defect)
        )
        self.defect = defect


class ResolutionError(SlipError):
    """Exception class for grids too coarse for the requested construction"""


class SchemeError(SlipError):
    """Exception class for invalid Galerkin scheme configurations"""


class GapViolationError(SchemeError):
    """Exception class for assembling a system with the solid too close to a wall"""


class CollisionApproach(SlipError):
    """Raised when a trial step brings the solid closer than 2δ to the cavity"""

    def __init__(self, time, gap, state):
        super(CollisionApproach, self).__init__(
            "gap %.6g below the band guard at t=%.6g" % (gap, time)
        )
        self.time = time
        self.gap = gap
        self.state = state


class PicardFailure(SlipError):
    """Base class for fixed-point failures within a time step"""

    def __init__(self, message, history, time):
        super(PicardFailure, self).__init__(message)
        self.history = list(history)
        self.time = time


class PicardNonConvergence(PicardFailure):
    """Raised when the Picard iteration cap is exhausted"""


class PicardDivergence(PicardFailure):
    """Raised when Picard residuals grow without bound"""


class GapIntegrationError(SlipError):
    """Exception class for gap ODE integrations stopped before any contact"""


class RateStudyError(SlipError):
    """Exception class for malformed rate study inputs"""


class ScenarioError(SlipError):
    """Exception class for invalid scenario files"""

    def __init__(self, message, section=None, key=None, line=None, column=None):
        location = ""
        if section is not None:
            location = "[%s]" % section
            if key is not None:
                location += ".%s" % key
            location += ": "
        elif key is not None:
            location = "%s: " % key
        position = ""
        if line is not None:
            position = " (line %d, column %d)" % (line, column or 1)
        super(ScenarioError, self).__init__(location + message + position)
        self.section = section
        self.key = key
        self.line = line
        self.column = column
