"""
recycling 앱 공통 예외.

관리 명령(run/sweep/plan/verify)은 RecyclingError를 잡아 CommandError로 바꿔 종료합니다.
"""


class RecyclingError(Exception):
    """Base class for every error raised by the recycling modules."""


class DimensionError(RecyclingError):
    """Operands act on different numbers of qubits."""


class AlgebraError(RecyclingError):
    """A symbolic-algebra precondition failed (e.g. non-commuting generators)."""


class CapacityError(RecyclingError):
    """The request exceeds the dense simulator's qubit limit."""


class DomainError(RecyclingError, ValueError):
    """A parameter lies outside its mathematical domain."""


class ValidationError(RecyclingError):
    """An operator failed a structural check (hermiticity, trace, positivity)."""


class PrecisionError(RecyclingError):
    """The answer is not representable at double precision."""


class ConfigError(DomainError):
    """Invalid experiment configuration from the command line."""


class OracleMismatchError(RecyclingError):
    """Analytic and dense results disagree beyond tolerance."""
