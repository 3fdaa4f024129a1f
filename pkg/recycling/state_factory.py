"""
초기 상태 ρ_1 생성기: GHZ, generalized GHZ, 혼합 GHZ 계열, 선형 cluster 상태.

각 계열은 dense 형태(DenseOperator)와 기호 형태(Pauli 문자열 기댓값, 임의 N)를 함께 제공합니다.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
from scipy.linalg import expm

from . import conf
from .dense_sim import DenseOperator, IDENTITY_2, SIGMA_Z
from .exceptions import AlgebraError, CapacityError, DomainError, ValidationError
from .pauli_algebra import PauliString, apply_pauli, commutes, pauli_multiply

logger = logging.getLogger(__name__)

GHZ = 'ghz'
GENERALIZED_GHZ = 'gghz'
MIXED_GHZ = 'mixed'
CLUSTER = 'cluster'
FAMILIES = (GHZ, GENERALIZED_GHZ, MIXED_GHZ, CLUSTER)

# 계열별 CLI 파라미터
_FAMILY_PARAMS = {
    GHZ: (),
    GENERALIZED_GHZ: ('alpha',),
    MIXED_GHZ: ('p1', 'p2', 'p3', 'alpha'),
    CLUSTER: (),
}

# 선형 cluster 중간 생성자 후보: 표준형과 원 문헌 인쇄형
CLUSTER_FORMS = ('standard', 'printed')

STABILIZER_TOLERANCE = 1e-12
WEIGHT_TOLERANCE = 1e-12


# ----------------------------------------------------------------------
# 파라미터 검증
# ----------------------------------------------------------------------
def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f'alpha = {alpha} must lie in (0, 1)')


def _check_weights(p1, p2, p3):
    if not p1 > 0 or p2 < 0 or p3 < 0:
        raise DomainError(f'weights need p1 > 0 and p2, p3 >= 0 (got {p1}, {p2}, {p3})')
    if abs(p1 + p2 + p3 - 1) > WEIGHT_TOLERANCE:
        raise DomainError(f'weights must sum to 1 (got {p1 + p2 + p3})')


def _check_party_count(num_qubits):
    if num_qubits < 3:
        raise DomainError(f'the scenario needs N >= 3 parties (got {num_qubits})')


def _check_dense_range(num_qubits):
    limit = conf.dense_limit()
    if not 3 <= num_qubits <= limit:
        raise CapacityError(f'dense states need 3 <= N <= {limit} (got {num_qubits})')


# ----------------------------------------------------------------------
# 상태 벡터 / 밀도 행렬
# ----------------------------------------------------------------------
def _ghz_type_vector(num_qubits, alpha):
    vector = np.zeros(2 ** num_qubits, dtype=complex)
    vector[0] = math.sqrt(alpha)
    vector[-1] = math.sqrt(1 - alpha)
    return vector


def _pure(vector):
    return DenseOperator(np.outer(vector, vector.conj()))


def make_ghz(num_qubits):
    _check_dense_range(num_qubits)
    return _pure(_ghz_type_vector(num_qubits, 0.5))


def make_generalized_ghz(num_qubits, alpha):
    _check_alpha(alpha)
    _check_dense_range(num_qubits)
    return _pure(_ghz_type_vector(num_qubits, alpha))


def make_mixed_ghz(num_qubits, p1, p2, p3, alpha):
    _check_weights(p1, p2, p3)
    _check_alpha(alpha)
    _check_dense_range(num_qubits)
    psi = _ghz_type_vector(num_qubits, alpha)
    matrix = p1 * np.outer(psi, psi.conj())
    matrix[0, 0] += p2
    matrix[-1, -1] += p3
    return DenseOperator(matrix)


@lru_cache(maxsize=1)
def ising_gate():
    """e^{iπ n⊗n} with n = (I − σ_z)/2: the nearest-neighbour Ising-chain gate."""
    occupation = (IDENTITY_2 - SIGMA_Z) / 2
    gate = expm(1j * np.pi * np.kron(occupation, occupation))
    gate.flags.writeable = False
    return gate


def _apply_two_qubit(vector, gate, first, second, num_qubits):
    tensor = vector.reshape((2,) * num_qubits)
    tensor = np.tensordot(gate.reshape(2, 2, 2, 2), tensor, axes=([2, 3], [first, second]))
    tensor = np.moveaxis(tensor, [0, 1], [first, second])
    return tensor.reshape(-1)


def cluster_vector(num_qubits):
    """|+⟩^{⊗N} followed by the Ising gate on every neighbouring pair (m, m+1)."""
    dim = 2 ** num_qubits
    vector = np.full(dim, 1 / math.sqrt(dim), dtype=complex)
    gate = ising_gate()
    for m in range(num_qubits - 1):
        vector = _apply_two_qubit(vector, gate, m, m + 1, num_qubits)
    return vector


def make_cluster(num_qubits):
    _check_dense_range(num_qubits)
    return _pure(cluster_vector(num_qubits))


# ----------------------------------------------------------------------
# 안정자 생성자
# ----------------------------------------------------------------------
def _ghz_generators(num_qubits):
    generators = [PauliString('X' * num_qubits)]
    for m in range(1, num_qubits):
        generators.append(PauliString.from_sites(num_qubits, {m - 1: 'Z', m: 'Z'}))
    return generators


def _cluster_generators(num_qubits, form='standard'):
    if form not in CLUSTER_FORMS:
        raise DomainError(f'unknown cluster generator form {form!r}')
    last = num_qubits - 1
    right = 'Z' if form == 'standard' else 'X'
    generators = [PauliString.from_sites(num_qubits, {0: 'X', 1: 'Z'})]
    for m in range(1, last):
        generators.append(PauliString.from_sites(num_qubits, {m - 1: 'Z', m: 'X', m + 1: right}))
    generators.append(PauliString.from_sites(num_qubits, {last - 1: 'Z', last: 'X'}))
    return generators


_GENERATORS = {
    GHZ: _ghz_generators,
    CLUSTER: _cluster_generators,
}

_REFERENCE_VECTORS = {
    GHZ: lambda n: _ghz_type_vector(n, 0.5),
    CLUSTER: cluster_vector,
}


def failing_generators(generators, vector, tol=STABILIZER_TOLERANCE):
    """Indices of generators with ‖S|ψ⟩ − |ψ⟩‖_∞ > tol."""
    return [
        index for index, generator in enumerate(generators)
        if np.abs(apply_pauli(generator, vector) - vector).max() > tol
    ]


def stabilizer_generators(family, num_qubits, verify=True):
    """The N stabilizer generators S_1 … S_N of the GHZ or linear cluster state.

    With ``verify`` (and N within the dense limit) every generator is checked against
    the dense state vector, so a wrong form cannot slip through silently.
    """
    if family not in _GENERATORS:
        raise DomainError(f'no stabilizer generators for family {family!r}')
    _check_party_count(num_qubits)
    generators = _GENERATORS[family](num_qubits)

    for i, a in enumerate(generators):
        for b in generators[i + 1:]:
            if not commutes(a, b):
                raise AlgebraError(f'generators {a.letters} and {b.letters} do not commute')

    if verify and num_qubits <= conf.dense_limit():
        failed = failing_generators(generators, _REFERENCE_VECTORS[family](num_qubits))
        if failed:
            raise ValidationError(
                f'{family} generators {[generators[i].letters for i in failed]} do not stabilize the state'
            )
    return generators


def cluster_generator_candidates(num_qubits):
    _check_party_count(num_qubits)
    return {form: _cluster_generators(num_qubits, form) for form in CLUSTER_FORMS}


@dataclass(frozen=True)
class ClusterFormResolution:
    num_qubits: int
    form: str
    failures: dict

    @property
    def summary(self):
        parts = [f'{form}: {"ok" if not bad else "fails at S_" + ",".join(str(i + 1) for i in bad)}'
                 for form, bad in self.failures.items()]
        return f'N={self.num_qubits} resolved={self.form} ({"; ".join(parts)})'


def resolve_cluster_generator_form(num_qubits):
    """Let the dense cluster state decide which middle-generator form stabilizes it."""
    _check_dense_range(num_qubits)
    vector = cluster_vector(num_qubits)
    failures = {
        form: failing_generators(generators, vector)
        for form, generators in cluster_generator_candidates(num_qubits).items()
    }
    valid = [form for form in CLUSTER_FORMS if not failures[form]]
    if not valid:
        raise ValidationError(f'no cluster generator form stabilizes |C_{num_qubits}⟩')
    resolution = ClusterFormResolution(num_qubits, valid[0], failures)
    logger.info('cluster generator form %s', resolution.summary)
    return resolution


# ----------------------------------------------------------------------
# StateFamily
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class StateFamily:
    """Initial state ρ_1 of the sequential scenario."""

    variant: str
    num_qubits: int
    alpha: float = 0.5
    p1: float = 1.0
    p2: float = 0.0
    p3: float = 0.0

    def __post_init__(self):
        if self.variant not in FAMILIES:
            raise DomainError(f'unknown state family {self.variant!r}; choose from {", ".join(FAMILIES)}')
        _check_party_count(self.num_qubits)
        if self.variant in (GENERALIZED_GHZ, MIXED_GHZ):
            _check_alpha(self.alpha)
        if self.variant == MIXED_GHZ:
            _check_weights(self.p1, self.p2, self.p3)
        elif (self.p1, self.p2, self.p3) != (1.0, 0.0, 0.0):
            raise DomainError(f'weights apply to the mixed family only, not {self.variant!r}')
        if self.variant in (GHZ, CLUSTER) and self.alpha != 0.5:
            raise DomainError('alpha applies to the generalized and mixed families only')

    @classmethod
    def parse(cls, text, num_qubits):
        """Read CLI strings like ``ghz``, ``gghz:alpha=0.3``, ``mixed:p1=0.8,p2=0.1,p3=0.1,alpha=0.4``."""
        name, _, raw = text.strip().partition(':')
        name = name.strip().lower()
        if name not in _FAMILY_PARAMS:
            raise DomainError(f'unknown state family {name!r}; choose from {", ".join(FAMILIES)}')
        params = {}
        for chunk in filter(None, (c.strip() for c in raw.split(','))):
            key, sep, value = chunk.partition('=')
            key = key.strip()
            if not sep or key not in _FAMILY_PARAMS[name]:
                raise DomainError(f'unexpected parameter {chunk!r} for family {name!r}')
            try:
                params[key] = float(value)
            except ValueError:
                raise DomainError(f'parameter {key} needs a number, got {value!r}')
        missing = [key for key in _FAMILY_PARAMS[name] if key not in params]
        if missing:
            raise DomainError(f'family {name!r} needs {", ".join(missing)}')
        return cls(name, num_qubits, **params)

    @property
    def label(self):
        if self.variant == GENERALIZED_GHZ:
            return f'gghz:alpha={self.alpha:g}'
        if self.variant == MIXED_GHZ:
            return f'mixed:p1={self.p1:g},p2={self.p2:g},p3={self.p3:g},alpha={self.alpha:g}'
        return self.variant

    @property
    def witness_family(self):
        return CLUSTER if self.variant == CLUSTER else GHZ

    @property
    def coherence(self):
        """Tr[S_1 ρ_1] for the GHZ-type families: 2·p1·√(α(1−α))."""
        if self.variant == CLUSTER:
            return 1.0
        return 2 * self.p1 * math.sqrt(self.alpha * (1 - self.alpha))

    def density(self):
        if self.variant == GHZ:
            return make_ghz(self.num_qubits)
        if self.variant == GENERALIZED_GHZ:
            return make_generalized_ghz(self.num_qubits, self.alpha)
        if self.variant == MIXED_GHZ:
            return make_mixed_ghz(self.num_qubits, self.p1, self.p2, self.p3, self.alpha)
        return make_cluster(self.num_qubits)

    def pauli_expectation(self, pauli):
        """Tr[ρ_1 · P] in closed form; valid for any N."""
        if pauli.num_qubits != self.num_qubits:
            raise DomainError(f'{pauli.letters!r} does not act on {self.num_qubits} qubits')
        if self.variant == CLUSTER:
            return pauli.coeff * _cluster_expectation(pauli.letters)
        return pauli.coeff * self._ghz_type_expectation(pauli.letters)

    def _ghz_type_expectation(self, letters):
        if set(letters) <= {'I', 'Z'}:
            low = self.p1 * self.alpha + self.p2
            high = self.p1 * (1 - self.alpha) + self.p3
            return low + (-1) ** letters.count('Z') * high
        if set(letters) <= {'X', 'Y'}:
            # ⟨0…0|P|1…1⟩ = (−i)^{#Y} 이므로 2·Re 는 {2, 0, −2, 0}[#Y mod 4]
            return self.coherence / 2 * (2, 0, -2, 0)[letters.count('Y') % 4]
        return 0.0


def _cluster_expectation(letters):
    # 생성자 S_m 은 m 번째 자리에만 X 를 가지므로 X/Y 위치가 곱할 부분집합을 정합니다.
    n = len(letters)
    generators = _cluster_generators(n)
    product = reduce(
        pauli_multiply,
        (generators[m] for m, letter in enumerate(letters) if letter in 'XY'),
        PauliString.identity(n),
    )
    if product.letters != letters:
        return 0.0
    return 1 / product.coeff
