"""
Exception hierarchy shared by the model, net and command-line modules
"""

from typing import Dict, List, Optional, Sequence


class ModelError(ValueError):
    """Base class for every error raised on malformed models or illegal operations"""


class ModelParseError(ModelError):
    """A model file could not be parsed"""

    def __init__(self, message: str, line: int, column: int, token: str = ""):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"line {line}, column {column}: {message}" + (f" (near '{token}')" if token else ""))


class UnknownNameError(ModelError):
    """A place, transition or event name does not belong to the model"""


class InvalidNetError(ModelError):
    """Net construction violated a structural requirement"""


class NotEnabledError(ModelError):
    """A step was fired where it is not enabled"""

    def __init__(self, message: str, clause: str = "", places: Sequence[str] = ()):
        self.clause = clause
        self.places = list(places)
        super().__init__(message)


class UnsafeNetError(ModelError):
    """A reachable marking holds more than one token on some place"""

    def __init__(self, message: str, marking: Optional[Dict[str, int]] = None):
        self.marking = dict(marking or {})
        super().__init__(message)


class AmbiguousPartitionError(ModelError):
    """Backward transitions cannot be identified uniquely"""

    def __init__(self, message: str, candidates: Optional[Dict[str, List[str]]] = None):
        self.candidates = dict(candidates or {})
        super().__init__(message)


class ClassMismatchError(ModelError):
    """A net was used as a member of a class it does not belong to"""


class InstanceMismatchError(ModelError):
    """A theorem check received an instance of the wrong kind"""


class NotAConfigurationError(ModelError):
    """A set of transitions is not a configuration of the net"""


class SamplingBudgetExceeded(RuntimeError):
    """Rejection sampling gave up before producing a valid instance"""
