"""
GHZ / cluster GME 증인 연산자와 unsharp 측정으로 수정된 증인 W^k.

W^k − λ_k·W 차이 연산자(양의 준정부호 확인용)도 여기서 만듭니다.
"""
from dataclasses import dataclass

from .dense_sim import check_sharpness
from .exceptions import DomainError
from .pauli_algebra import OperatorExpr, expand_projector_product
from .state_factory import CLUSTER, GHZ, stabilizer_generators

WITNESS_FAMILIES = (GHZ, CLUSTER)

# N 의 홀짝 -> S_N 이 속한 생성자 인덱스(1-based) 홀짝 묶음
_LAMBDA_HOST = {0: 'even', 1: 'odd'}


def _combine(first, second, num_qubits):
    return 3 * OperatorExpr.identity(num_qubits) - 2 * (first + second)


def build_modified_ghz_witness(num_qubits, sharpness):
    """3I − 2[(I + λ_k S_1)/2 + Π_{m≥2} (I + S_m)/2]."""
    sharpness = check_sharpness(sharpness)
    generators = stabilizer_generators(GHZ, num_qubits)
    first = expand_projector_product(generators, indices=[0], weights={0: sharpness})
    rest = expand_projector_product(generators, indices=range(1, num_qubits))
    return _combine(first, rest, num_qubits)


def build_ghz_witness(num_qubits):
    return build_modified_ghz_witness(num_qubits, 1.0)


def cluster_parity_classes(num_qubits):
    """Generator indices (0-based) split by the parity of their 1-based label m."""
    return {
        'even': [i for i in range(num_qubits) if (i + 1) % 2 == 0],
        'odd': [i for i in range(num_qubits) if (i + 1) % 2 == 1],
    }


def build_modified_cluster_witness(num_qubits, sharpness):
    """3I − 2[Π_even + Π_odd] with S_N's factor replaced by (I + λ_k S_N)/2."""
    sharpness = check_sharpness(sharpness)
    generators = stabilizer_generators(CLUSTER, num_qubits)
    classes = cluster_parity_classes(num_qubits)
    host = _LAMBDA_HOST[num_qubits % 2]
    other = 'odd' if host == 'even' else 'even'
    hosted = expand_projector_product(
        generators, indices=classes[host], weights={num_qubits - 1: sharpness}
    )
    plain = expand_projector_product(generators, indices=classes[other])
    return _combine(hosted, plain, num_qubits)


def build_cluster_witness(num_qubits):
    return build_modified_cluster_witness(num_qubits, 1.0)


_BUILDERS = {
    GHZ: build_modified_ghz_witness,
    CLUSTER: build_modified_cluster_witness,
}


def witness_for(family, num_qubits, sharpness=1.0):
    if family not in _BUILDERS:
        raise DomainError(f'no witness for family {family!r}; choose from {", ".join(WITNESS_FAMILIES)}')
    return _BUILDERS[family](num_qubits, sharpness)


def difference_operator(family, num_qubits, sharpness):
    """W^k − λ_k·W; positive semidefinite whenever 0 ≤ λ_k ≤ 1."""
    sharpness = check_sharpness(sharpness)
    return witness_for(family, num_qubits, sharpness) - sharpness * witness_for(family, num_qubits)


def difference_spectrum_support(family, sharpness):
    """Allowed eigenvalues of the difference operator."""
    gap = 1 - sharpness
    steps = (0, 2) if family == GHZ else (0, 1, 2, 3)
    return tuple(step * gap for step in steps)


def describe_witness(expr):
    """Human-readable Pauli sum, e.g. ``1.5·III - 1·XXX - 0.5·IZZ ...``."""
    return str(expr)


@dataclass(frozen=True)
class WitnessSpec:
    family: str
    num_qubits: int
    observer_index: int = 1
    sharpness: float = 1.0

    def __post_init__(self):
        if self.family not in WITNESS_FAMILIES:
            raise DomainError(f'unknown witness family {self.family!r}')
        if self.observer_index < 1:
            raise DomainError(f'observer index must be >= 1 (got {self.observer_index})')
        if self.num_qubits < 3:
            raise DomainError(f'witnesses need N >= 3 (got {self.num_qubits})')
        check_sharpness(self.sharpness)

    def build(self):
        return witness_for(self.family, self.num_qubits, self.sharpness)

    def difference(self):
        return difference_operator(self.family, self.num_qubits, self.sharpness)
