"""
k−1 번의 순차 측정 뒤 증인 기댓값의 닫힌 형태와 관측자별 검출 조건.

채널은 표적 큐비트의 Pauli 성분에 대해 대각이라서, A⊗σ 형태의 상관자는 한 번 측정될 때마다
σ_z: (1+√(1−λ²))/2, σ_x: 1/2, σ_y: √(1−λ²)/2 배가 됩니다. 곱의 상한은 k−1 입니다.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .dense_sim import check_sharpness
from .exceptions import DomainError, ValidationError
from .pauli_algebra import PauliString
from .state_factory import CLUSTER, GENERALIZED_GHZ, GHZ, MIXED_GHZ

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-10


def _validated(lambdas):
    values = tuple(float(v) for v in lambdas)
    for value in values:
        check_sharpness(value)
    return values


def _check_observer(k, available):
    if k < 1:
        raise DomainError(f'observer index must be >= 1 (got {k})')
    if available < k:
        raise DomainError(f'observer {k} needs {k} sharpness values, got {available}')


@dataclass(frozen=True)
class CorrelatorDecay:
    """Decay of A⊗σ correlators on the measured qubit after observers λ_1, λ_2, …"""

    lambdas: tuple

    def __post_init__(self):
        object.__setattr__(self, 'lambdas', _validated(self.lambdas))

    def _prefix(self, k):
        if k < 1:
            raise DomainError(f'observer index must be >= 1 (got {k})')
        if k - 1 > len(self.lambdas):
            raise DomainError(f'observer {k} needs {k - 1} earlier sharpness values, got {len(self.lambdas)}')
        return np.asarray(self.lambdas[:k - 1], dtype=float)

    def _log_z(self, k):
        prefix = self._prefix(k)
        # (1+√(1−λ²))/2 = 1 − λ²/(2(1+√(1−λ²))) : log1p 로 계산해 작은 λ 에서도 정확도를 유지
        return float(np.sum(np.log1p(-prefix ** 2 / (2 * (1 + np.sqrt(1 - prefix ** 2))))))

    def z_factor(self, k):
        prefix = self._prefix(k)
        return float(np.prod((1 + np.sqrt(1 - prefix ** 2)) / 2))

    def one_minus_z(self, k):
        """1 − z_factor(k), computed without cancellation."""
        z = self.z_factor(k)
        if z <= 0.5:
            return 1.0 - z
        return -math.expm1(self._log_z(k))

    def x_factor(self, k):
        self._prefix(k)
        return math.ldexp(1.0, -(k - 1))

    def y_factor(self, k):
        prefix = self._prefix(k)
        return float(np.prod(np.sqrt(1 - prefix ** 2) / 2))

    def factor(self, letter, k):
        if letter == 'I':
            self._prefix(k)
            return 1.0
        return {'X': self.x_factor, 'Y': self.y_factor, 'Z': self.z_factor}[letter](k)


@dataclass(frozen=True)
class DetectionReport:
    observer_index: int
    witness_value: float
    sharpness: float = math.nan

    @property
    def detected(self):
        return self.witness_value < 0

    @property
    def margin(self):
        return abs(self.witness_value)

    def as_row(self):
        return {
            'k': self.observer_index,
            'lambda_k': self.sharpness,
            'witness_value': self.witness_value,
            'detected': self.detected,
            'margin': self.margin,
        }


def _coherence(p1, alpha):
    if not 0.0 < p1 <= 1.0:
        raise DomainError(f'p1 = {p1} must lie in (0, 1]')
    if not 0.0 < alpha < 1.0:
        raise DomainError(f'alpha = {alpha} must lie in (0, 1)')
    return 2 * p1 * math.sqrt(alpha * (1 - alpha))


def _witness_value(k, lambdas, coherence):
    lambdas = _validated(lambdas)
    _check_observer(k, len(lambdas))
    decay = CorrelatorDecay(lambdas[:k - 1])
    return decay.one_minus_z(k) - coherence * lambdas[k - 1] * decay.x_factor(k)


def ghz_witness_value(k, lambdas):
    """⟨W^k_GHZ⟩ on ρ_k from |GHZ_N⟩: 1 − Π_{j<k}(1+√(1−λ_j²))/2 − λ_k/2^{k−1}."""
    return _witness_value(k, lambdas, 1.0)


def cluster_witness_value(k, lambdas):
    """⟨W^k_C⟩ on ρ_k from |C_N⟩; the same function of the schedule as the GHZ value."""
    return _witness_value(k, lambdas, 1.0)


def mixed_ghz_witness_value(k, lambdas, p1, alpha):
    """1 − Π^{k−1} − 2p1√(α(1−α))·λ_k/2^{k−1}."""
    return _witness_value(k, lambdas, _coherence(p1, alpha))


def detection_condition_rhs(k, lambdas_prefix, scale=1.0):
    """Threshold the k-th sharpness must exceed: scale·2^{k−1}·[1 − Π_{j<k}(1+√(1−λ_j²))/2]."""
    if scale < 1.0:
        raise DomainError(f'scale must be >= 1 (got {scale})')
    prefix = _validated(lambdas_prefix)
    if k < 1:
        raise DomainError(f'observer index must be >= 1 (got {k})')
    decay = CorrelatorDecay(prefix[:k - 1])
    return math.ldexp(scale * decay.one_minus_z(k), k - 1)


def detection_scale(p1=1.0, alpha=0.5):
    """1/(2p1√(α(1−α))); equals 1 for the GHZ and cluster states."""
    return 1.0 / _coherence(p1, alpha)


def witness_value_for(state, k, lambdas):
    """Closed-form ⟨W^k⟩ for any supported state family."""
    if state.variant in (GHZ, CLUSTER):
        evaluator = ghz_witness_value if state.variant == GHZ else cluster_witness_value
        return evaluator(k, lambdas)
    if state.variant in (GENERALIZED_GHZ, MIXED_GHZ):
        return mixed_ghz_witness_value(k, lambdas, state.p1, state.alpha)
    raise DomainError(f'no closed form for state family {state.variant!r}')


def full_sequence_report(state, lambdas):
    """One DetectionReport per sequential observer k = 1 … len(lambdas)."""
    lambdas = _validated(lambdas)
    return [
        DetectionReport(k, witness_value_for(state, k, lambdas), lambdas[k - 1])
        for k in range(1, len(lambdas) + 1)
    ]


def symbolic_witness_value(state, witness, lambdas_prefix, target=None):
    """⟨W⟩ on ρ_k by propagating each Pauli term through the channel; no dense matrices.

    ``lambdas_prefix`` holds λ_1 … λ_{k−1}; ``target`` defaults to the last qubit.
    """
    if witness.num_qubits != state.num_qubits:
        raise DomainError(f'witness on {witness.num_qubits} qubits, state on {state.num_qubits}')
    target = state.num_qubits - 1 if target is None else target
    decay = CorrelatorDecay(lambdas_prefix)
    k = len(decay.lambdas) + 1
    value = 0j
    for letters, coeff in witness.items:
        value += coeff * state.pauli_expectation(PauliString(letters)) * decay.factor(letters[target], k)
    if abs(value.imag) > IMAGINARY_TOLERANCE:
        raise ValidationError(f'symbolic expectation has imaginary residue {value.imag:.3e}')
    return value.real


@dataclass(frozen=True)
class RecursionResolution:
    index: str
    residuals: dict

    @property
    def summary(self):
        body = ', '.join(f'Π up to {name}: {value:.2e}' for name, value in self.residuals.items())
        return f'resolved product index = {self.index} ({body})'


def resolve_recursion_index(lambdas, observed):
    """Decide whether the σ_z decay product runs to k−1 or to k.

    ``observed[k-1]`` is the measured ratio Tr[ρ_k·A⊗σ_z]/Tr[ρ_1·A⊗σ_z] for observer k;
    ``lambdas`` must hold at least len(observed) values.
    """
    decay = CorrelatorDecay(lambdas)
    residuals = {'k-1': 0.0, 'k': 0.0}
    for k, ratio in enumerate(observed, start=1):
        residuals['k-1'] = max(residuals['k-1'], abs(ratio - decay.z_factor(k)))
        residuals['k'] = max(residuals['k'], abs(ratio - decay.z_factor(k + 1)))
    index = min(residuals, key=residuals.get)
    logger.info('recursion index resolved to %s (%s)', index, residuals)
    return RecursionResolution(index, residuals)
