"""
Exception hierarchy; every error knows the exit status the CLI reports for it
"""


class FlatlabError(Exception):
    """Base class for all flatlab errors"""
    exit_code = 1


class ValidationError(FlatlabError):
    """Malformed or out-of-contract input"""
    exit_code = 2


class ParameterError(ValidationError):
    """Numeric parameter outside its admissible range"""


class DomainError(ValidationError):
    """Evaluation requested outside a sampled range"""


class CapacityError(ValidationError):
    """Input too large for an exhaustive computation"""


class SchemaError(ValidationError):
    """Artifact or config file does not match the expected format"""


class ConstructionError(FlatlabError):
    """A geometric object could not be built for the given parameters"""
    exit_code = 3


class InvariantViolation(FlatlabError):
    """A verified bound or invariant failed"""
    exit_code = 4
