"""
Sharpness 수열 계획: λ_k = (1+ε)·threshold_k 로 수열을 만들고,
주어진 λ_1 이 몇 번의 검출을 보장하는지, n 번 검출에 필요한 λ_1 이 얼마인지 답합니다.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import conf
from .analytic_engine import detection_condition_rhs, detection_scale
from .exceptions import DomainError, PrecisionError

logger = logging.getLogger(__name__)

# min_sharpness_for 이분 탐색의 하한. λ_1² 가 double 정밀도 안에 남는 값.
LAMBDA_FLOOR = 1e-150

# scipy bisect 의 상대 허용오차 (scipy 기본값과 같음)
BISECT_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class SharpnessSchedule:
    """λ_1 … λ_n, all in (0, 1). ``terminated`` marks that λ_{n+1} would reach 1."""

    lambda_1: float
    epsilon: float
    values: tuple
    terminated: bool
    scale: float = 1.0
    rejected: float | None = None

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def thresholds(self):
        return tuple(
            detection_condition_rhs(k, self.values[:k - 1], self.scale)
            for k in range(1, len(self.values) + 1)
        )


def _check_inputs(lambda_1, epsilon, max_k):
    if not 0.0 < lambda_1 < 1.0:
        raise DomainError(f'lambda_1 = {lambda_1} must lie in (0, 1)')
    if not epsilon > 0:
        raise DomainError(f'epsilon = {epsilon} must be positive')
    if max_k < 1:
        raise DomainError(f'max_k must be >= 1 (got {max_k})')


def _build_schedule(lambda_1, epsilon, max_k, scale):
    epsilon = conf.get('GME_DEFAULT_EPSILON') if epsilon is None else epsilon
    max_k = conf.get('GME_PLANNER_CAP') if max_k is None else int(max_k)
    _check_inputs(lambda_1, epsilon, max_k)

    values = [float(lambda_1)]
    while len(values) < max_k:
        k = len(values) + 1
        threshold = detection_condition_rhs(k, values, scale)
        if threshold <= 0:
            raise PrecisionError(
                f'1 − Π underflows at observer {k} for lambda_1 = {lambda_1:.3e}; '
                f'the threshold is not representable in double precision'
            )
        candidate = (1 + epsilon) * threshold
        if candidate >= 1:
            logger.debug('schedule from λ_1=%g stops at k=%d (next λ=%g)', lambda_1, k, candidate)
            return SharpnessSchedule(lambda_1, epsilon, tuple(values), True, scale, candidate)
        values.append(candidate)
    return SharpnessSchedule(lambda_1, epsilon, tuple(values), False, scale)


def generate_schedule(lambda_1, epsilon=None, max_k=None):
    """λ_k = (1+ε)·2^{k−1}·[1 − Π_{j<k}(1+√(1−λ_j²))/2] while it stays below 1."""
    return _build_schedule(lambda_1, epsilon, max_k, 1.0)


def scaled_schedule(lambda_1, epsilon, p1, alpha, max_k=None):
    """Same recursion with the threshold scaled by 1/(2p1√(α(1−α)))."""
    return _build_schedule(lambda_1, epsilon, max_k, detection_scale(p1, alpha))


def max_detections(lambda_1, epsilon=None, cap=None, scale=1.0):
    """Largest n ≤ cap for which the schedule from ``lambda_1`` has n valid entries.

    At least 1 for λ_1 ≥ LAMBDA_FLOOR. Far below it (about 1e-162) the threshold underflows and
    PrecisionError is raised.
    """
    return len(_build_schedule(lambda_1, epsilon, cap, scale))


def ratio_profile(schedule):
    """(k, λ_k/λ_{k−1}, inside_derivation) for k ≥ 2; the ratio bound > 2 holds from k = 3 on."""
    values = schedule.values
    return [(k, values[k - 1] / values[k - 2], k >= 3) for k in range(2, len(values) + 1)]


@dataclass(frozen=True)
class SharpnessSearch:
    n: int
    epsilon: float
    lambda_1: float
    bracket: tuple
    iterations: int


def _reaches(lambda_1, n, epsilon, scale):
    try:
        return max_detections(lambda_1, epsilon, cap=n, scale=scale) >= n
    except PrecisionError:
        return False


def _detection_surplus(log_lambda, n, epsilon, scale):
    # max_detections 는 λ_1 에 대한 계단 함수라서 n − 1/2 을 기준으로 부호가 바뀝니다.
    return 0.5 if _reaches(10.0 ** log_lambda, n, epsilon, scale) else -0.5


def min_sharpness_for(n, epsilon=None, tol=None, scale=1.0):
    """Bisect log10(λ_1) for a λ_1 whose schedule reaches n detections.

    Returns the feasible end of the final bracket ``(lambda_1, infeasible)``; the bracket
    width is about ``tol`` relative to its upper end.
    """
    epsilon = conf.get('GME_DEFAULT_EPSILON') if epsilon is None else epsilon
    tol = conf.get('GME_BISECTION_TOLERANCE') if tol is None else tol
    if n < 1:
        raise DomainError(f'n must be >= 1 (got {n})')
    if not epsilon > 0:
        raise DomainError(f'epsilon = {epsilon} must be positive')

    upper = 1.0 - tol
    if _reaches(upper, n, epsilon, scale):
        return SharpnessSearch(n, epsilon, upper, (upper, 1.0), 0)
    if not _reaches(LAMBDA_FLOOR, n, epsilon, scale):
        raise PrecisionError(
            f'{n} detections need lambda_1 below {LAMBDA_FLOOR:g}; '
            f'1 − Π underflows in double precision before the schedule is long enough'
        )

    xtol = math.log10(1 + tol) / 2
    root, result = optimize.bisect(
        _detection_surplus, math.log10(LAMBDA_FLOOR), math.log10(upper),
        args=(n, epsilon, scale), xtol=xtol, rtol=BISECT_RTOL, full_output=True,
    )
    # bisect 가 돌려주는 점에서 반폭 이내에 계단이 있습니다.
    width = xtol + BISECT_RTOL * abs(root)
    low_x, high_x = root - width, min(root + width, math.log10(upper))
    while not _reaches(10.0 ** low_x, n, epsilon, scale):
        low_x -= width
    low, high = 10.0 ** low_x, 10.0 ** high_x
    logger.debug('n=%d eps=%g bracket=(%g, %g) after %d steps', n, epsilon, low, high, result.iterations)
    return SharpnessSearch(n, epsilon, low, (low, high), result.iterations)
