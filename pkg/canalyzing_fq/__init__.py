#: Keep in sync with git tag and package version in pyproject.toml.
__version__ = "0.1.0"


class CanalyzingError(RuntimeError):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.message = message
        self.payload = payload


class NotPrimePowerError(CanalyzingError):
    pass


class SizeLimitExceededError(CanalyzingError):
    pass


class DivisionByZeroError(CanalyzingError, ZeroDivisionError):
    pass


class DimensionMismatchError(CanalyzingError):
    pass


class IndexOutOfRangeError(CanalyzingError, IndexError):
    pass


class NotCanalyzingError(CanalyzingError):
    pass


class DuplicateInputValuesError(CanalyzingError):
    pass


class TooManyPairsError(CanalyzingError):
    pass


class DegreeBoundError(CanalyzingError):
    pass


class FamilySpecError(CanalyzingError, ValueError):
    pass


class FunctionFileError(CanalyzingError):
    pass


from canalyzing_fq.field import *  # NOQA
from canalyzing_fq.function import *  # NOQA
from canalyzing_fq.canalyzing import *  # NOQA
from canalyzing_fq.counting import *  # NOQA
from canalyzing_fq.config import *  # NOQA
from canalyzing_fq.files import *  # NOQA
from canalyzing_fq.util import *  # NOQA
