"""
Dense density-matrix simulator: 상태 저장, 기댓값, 순차 관측자 측정 채널(Lüders 규칙).

모든 analytic 공식의 정답(oracle) 역할을 합니다. 밀도 행렬은 값(value)으로 취급하며
생성 후 수정할 수 없습니다.
"""
import json
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from . import conf
from .exceptions import DimensionError, DomainError, PrecisionError, ValidationError
from .pauli_algebra import OperatorExpr, PauliString, pauli_trace

logger = logging.getLogger(__name__)

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SIGMA = {'X': SIGMA_X, 'Z': SIGMA_Z}

# 기댓값의 허수 잔여 허용치
IMAGINARY_TOLERANCE = 1e-10
# eigh 잔차 ‖Av − λv‖ 허용치
EIGEN_RESIDUAL_TOLERANCE = 1e-9


def check_sharpness(value):
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise DomainError(f'sharpness λ = {value} is outside [0, 1]')
    return float(value)


def _num_qubits_for(dim):
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise DimensionError(f'dimension {dim} is not a power of two')
    return n


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """2^N x 2^N complex matrix; also used as a density matrix."""

    matrix: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f'expected a square matrix, got shape {matrix.shape}')
        _num_qubits_for(matrix.shape[0])
        if self.hermitian and not _is_hermitian(matrix):
            raise ValidationError('matrix flagged Hermitian is not Hermitian within tolerance')
        matrix.flags.writeable = False
        object.__setattr__(self, 'matrix', matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def num_qubits(self):
        return _num_qubits_for(self.dim)

    @property
    def trace(self):
        return complex(np.trace(self.matrix))

    def validate_density(self):
        """Raise ValidationError unless this is a valid density matrix."""
        if not self.hermitian:
            raise ValidationError('density matrix must be Hermitian')
        if abs(self.trace - 1) > 1e-12:
            raise ValidationError(f'density matrix trace is {self.trace.real:.15g}, expected 1')
        lowest = float(np.linalg.eigvalsh(self.matrix)[0])
        if lowest < -conf.get('GME_POSITIVITY_TOLERANCE'):
            raise ValidationError(f'density matrix has negative eigenvalue {lowest:.3e}')
        return self

    def to_json(self):
        return json.dumps({
            'num_qubits': self.num_qubits,
            're': self.matrix.real.tolist(),
            'im': self.matrix.imag.tolist(),
        })

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        matrix = np.array(payload['re'], dtype=float) + 1j * np.array(payload['im'], dtype=float)
        operator = cls(matrix)
        if operator.num_qubits != payload['num_qubits']:
            raise DimensionError(
                f"header says {payload['num_qubits']} qubits but matrix has {operator.num_qubits}"
            )
        return operator


def _is_hermitian(matrix):
    return np.allclose(matrix, matrix.conj().T, rtol=0.0, atol=conf.get('GME_HERMITIAN_TOLERANCE'))


def save_density(rho, path):
    """`.json` 이면 JSON, 그 외에는 numpy `.npz` 바이너리로 저장합니다."""
    path = Path(path)
    if path.suffix == '.json':
        path.write_text(rho.to_json())
    else:
        np.savez(path, num_qubits=rho.num_qubits, matrix=rho.matrix)
    return path


def load_density(path):
    path = Path(path)
    if path.suffix == '.json':
        return DenseOperator.from_json(path.read_text())
    with np.load(path) as payload:
        rho = DenseOperator(payload['matrix'])
        if rho.num_qubits != int(payload['num_qubits']):
            raise DimensionError(f"header says {int(payload['num_qubits'])} qubits but matrix has {rho.num_qubits}")
    return rho


# ----------------------------------------------------------------------
# 측정 효과와 Lüders 채널
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class MeasurementEffect:
    """Two-outcome effect ``(I + outcome·λ·σ)/2`` on one qubit."""

    setting: str
    outcome: int
    sharpness: float
    target_qubit: int

    def __post_init__(self):
        if self.setting not in _SIGMA:
            raise DomainError(f'measurement setting must be X or Z, got {self.setting!r}')
        if self.outcome not in (1, -1):
            raise DomainError(f'outcome must be +1 or -1, got {self.outcome}')
        check_sharpness(self.sharpness)

    def operator(self):
        return (IDENTITY_2 + self.outcome * self.sharpness * _SIGMA[self.setting]) / 2

    def sqrt_operator(self):
        # σ 고유기저에서 √((1±λ)/2) 를 직접 씁니다.
        sigma = _SIGMA[self.setting]
        up = (IDENTITY_2 + sigma) / 2
        down = (IDENTITY_2 - sigma) / 2
        plus = math.sqrt((1 + self.outcome * self.sharpness) / 2)
        minus = math.sqrt((1 - self.outcome * self.sharpness) / 2)
        return plus * up + minus * down


def sequential_effects(sharpness, target):
    """Unsharp σ_x pair at λ and sharp σ_z pair used by every sequential observer."""
    return [
        MeasurementEffect('X', 1, sharpness, target),
        MeasurementEffect('X', -1, sharpness, target),
        MeasurementEffect('Z', 1, 1.0, target),
        MeasurementEffect('Z', -1, 1.0, target),
    ]


def _conjugate_local(matrix, op, target, num_qubits):
    """(I ⊗ op ⊗ I) · matrix · (I ⊗ op ⊗ I)† with op acting on ``target``."""
    shape = [2] * (2 * num_qubits)
    tensor = matrix.reshape(shape)
    tensor = np.moveaxis(np.tensordot(op, tensor, axes=([1], [target])), 0, target)
    column = num_qubits + target
    tensor = np.moveaxis(np.tensordot(tensor, op.conj().T, axes=([column], [0])), -1, column)
    return tensor.reshape(matrix.shape)


def _check_target(rho, target):
    if not 0 <= target < rho.num_qubits:
        raise DomainError(f'target qubit {target} outside 0..{rho.num_qubits - 1}')


def luders_update(rho, sharpness, target, validate=True):
    """One sequential observer: average of the x (unsharp) and z (sharp) Lüders updates."""
    sharpness = check_sharpness(sharpness)
    if validate:
        rho.validate_density()
    _check_target(rho, target)
    updated = np.zeros_like(rho.matrix)
    for effect in sequential_effects(sharpness, target):
        updated += _conjugate_local(rho.matrix, effect.sqrt_operator(), target, rho.num_qubits)
    return DenseOperator(updated / 2)


def luders_update_closed_form(rho, sharpness, target):
    """Three-term form: ½[((2+s)/2)ρ + ½ σ_zρσ_z + ((1−s)/2) σ_xρσ_x], s = √(1−λ²)."""
    sharpness = check_sharpness(sharpness)
    _check_target(rho, target)
    s = math.sqrt(1 - sharpness ** 2)
    n = rho.num_qubits
    matrix = (
        (2 + s) / 2 * rho.matrix
        + 0.5 * _conjugate_local(rho.matrix, SIGMA_Z, target, n)
        + (1 - s) / 2 * _conjugate_local(rho.matrix, SIGMA_X, target, n)
    )
    return DenseOperator(matrix / 2)


def apply_channel_k_times(rho1, lambdas, target, validate=True):
    """ρ_k after the updates λ_1 … λ_{k−1}, applied in order."""
    for value in lambdas:
        check_sharpness(value)
    if validate:
        rho1.validate_density()
    rho = rho1
    for value in lambdas:
        rho = luders_update(rho, value, target, validate=False)
    return rho


# ----------------------------------------------------------------------
# 기댓값 / 스펙트럼
# ----------------------------------------------------------------------
def expectation(rho, obs):
    """Tr[ρ·O] for an OperatorExpr, PauliString or DenseOperator observable."""
    if isinstance(obs, PauliString):
        obs = OperatorExpr.from_pauli(obs)
    if isinstance(obs, OperatorExpr):
        if obs.num_qubits != rho.num_qubits:
            raise DimensionError(f'observable on {obs.num_qubits} qubits, state on {rho.num_qubits}')
        if not obs.is_hermitian(conf.get('GME_HERMITIAN_TOLERANCE')):
            raise ValidationError('observable expression is not Hermitian')
        value = sum(term.coeff * pauli_trace(rho.matrix, term.with_coeff(1.0)) for term in obs.terms)
    else:
        if obs.dim != rho.dim:
            raise DimensionError(f'observable dimension {obs.dim} does not match state dimension {rho.dim}')
        if not (obs.hermitian or _is_hermitian(obs.matrix)):
            raise ValidationError('observable matrix is not Hermitian')
        value = np.einsum('ij,ji->', rho.matrix, obs.matrix)
    value = complex(value)
    if abs(value.imag) > IMAGINARY_TOLERANCE:
        raise ValidationError(f'expectation has imaginary residue {value.imag:.3e}')
    return value.real


def pure_expectations(obs, vectors):
    """⟨ψ|O|ψ⟩ for a batch of state vectors (rows)."""
    matrix = obs.matrix if isinstance(obs, DenseOperator) else np.asarray(obs)
    vectors = np.atleast_2d(vectors)
    return np.einsum('si,ij,sj->s', vectors.conj(), matrix, vectors).real


def eigen_spectrum(op):
    """Ascending real eigenvalues of a Hermitian operator."""
    matrix = op.matrix
    if not _is_hermitian(matrix):
        raise ValidationError('eigen_spectrum needs a Hermitian operator')
    values, vectors = np.linalg.eigh(matrix)
    residual = float(np.linalg.norm(matrix @ vectors - vectors * values, axis=0).max())
    if residual > EIGEN_RESIDUAL_TOLERANCE:
        raise PrecisionError(f'eigen decomposition residual {residual:.3e} too large')
    return values


# ----------------------------------------------------------------------
# 무작위 상태 (biseparable 샘플, 검증용 밀도 행렬)
# ----------------------------------------------------------------------
def _haar_vectors(num_qubits, count, rng):
    shape = (count, 2 ** num_qubits)
    vectors = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def bipartitions(num_qubits):
    """One side of every inequivalent bipartition (the side containing qubit 0)."""
    rest = range(1, num_qubits)
    return [
        (0,) + others
        for size in range(num_qubits - 1)
        for others in combinations(rest, size)
    ]


def sample_biseparable_vectors(num_qubits, part, count, rng):
    """``count`` pure product states |a⟩|b⟩ across ``part`` | complement, Haar on each side."""
    side_a = sorted(set(part))
    if not side_a or len(side_a) >= num_qubits or side_a[0] < 0 or side_a[-1] >= num_qubits:
        raise DomainError(f'{part} is not a nonempty proper subset of qubits 0..{num_qubits - 1}')
    side_b = [q for q in range(num_qubits) if q not in side_a]

    psi_a = _haar_vectors(len(side_a), count, rng)
    psi_b = _haar_vectors(len(side_b), count, rng)
    joint = np.einsum('si,sj->sij', psi_a, psi_b).reshape((count,) + (2,) * num_qubits)
    order = side_a + side_b
    axes = [0] + [1 + order.index(q) for q in range(num_qubits)]
    return joint.transpose(axes).reshape(count, 2 ** num_qubits)


def sample_biseparable(num_qubits, bipartition, rng_seed):
    """Seeded pure product state across ``bipartition`` (0-based qubit indices)."""
    rng = np.random.default_rng(rng_seed)
    vector = sample_biseparable_vectors(num_qubits, bipartition, 1, rng)[0]
    return DenseOperator(np.outer(vector, vector.conj()))


def random_density(num_qubits, rng, rank=None):
    """Random mixed state from a complex Ginibre matrix."""
    dim = 2 ** num_qubits
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DenseOperator(rho / np.trace(rho).real)


def maximally_mixed(num_qubits):
    dim = 2 ** num_qubits
    return DenseOperator(np.eye(dim, dtype=complex) / dim)
