"""
N-큐비트 Pauli 문자열과 그 가중합(OperatorExpr)의 정확한 기호 대수.

표기 규칙: qubit 1 = letters[0] = 가장 왼쪽 텐서 인자 = 최상위 비트.
위상은 i 의 거듭제곱(0..3)으로 정수 추적하고, 스칼라 배율(scale)만 부동소수로 둡니다.
"""
import json
import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import conf
from .exceptions import AlgebraError, CapacityError, DimensionError, DomainError

logger = logging.getLogger(__name__)

LETTERS = 'IXYZ'

# i**p, p = 0..3
PHASES = (1, 1j, -1, -1j)

# (a, b) -> (a·b, i 의 지수)
_SITE_PRODUCT = {
    ('I', 'I'): ('I', 0), ('I', 'X'): ('X', 0), ('I', 'Y'): ('Y', 0), ('I', 'Z'): ('Z', 0),
    ('X', 'I'): ('X', 0), ('X', 'X'): ('I', 0), ('X', 'Y'): ('Z', 1), ('X', 'Z'): ('Y', 3),
    ('Y', 'I'): ('Y', 0), ('Y', 'X'): ('Z', 3), ('Y', 'Y'): ('I', 0), ('Y', 'Z'): ('X', 1),
    ('Z', 'I'): ('Z', 0), ('Z', 'X'): ('Y', 1), ('Z', 'Y'): ('X', 3), ('Z', 'Z'): ('I', 0),
}

# is_zero 의 기본 허용오차. 정규화는 정확히 0 인 항만 버립니다.
ZERO_TOLERANCE = 1e-14


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis times ``scale * i**phase``."""

    letters: str
    scale: complex = 1.0
    phase: int = 0

    def __post_init__(self):
        if not self.letters:
            raise DimensionError('PauliString needs at least one qubit.')
        unknown = set(self.letters) - set(LETTERS)
        if unknown:
            raise DomainError(f'Unknown Pauli letters {sorted(unknown)} in {self.letters!r}')
        object.__setattr__(self, 'phase', self.phase % 4)

    @classmethod
    def from_label(cls, label):
        """'XZI', '-XZI', 'iYY', '-iZ' 형태의 라벨을 읽습니다."""
        text = label.strip()
        phase = 0
        if text.startswith('+'):
            text = text[1:]
        elif text.startswith('-'):
            phase = 2
            text = text[1:]
        if text.startswith('i'):
            phase += 1
            text = text[1:]
        return cls(text, 1.0, phase)

    @classmethod
    def from_sites(cls, num_qubits, sites, scale=1.0):
        """Build from ``{qubit index: letter}``; unspecified qubits carry I."""
        letters = ['I'] * num_qubits
        for index, letter in sites.items():
            if not 0 <= index < num_qubits:
                raise DimensionError(f'qubit index {index} outside 0..{num_qubits - 1}')
            letters[index] = letter
        return cls(''.join(letters), scale)

    @classmethod
    def identity(cls, num_qubits):
        return cls('I' * num_qubits)

    @property
    def num_qubits(self):
        return len(self.letters)

    @property
    def coeff(self):
        return self.scale * PHASES[self.phase]

    @property
    def x_mask(self):
        """Bit mask of qubits whose letter flips |0>/|1> (X or Y)."""
        return _mask(self.letters, 'XY')

    @property
    def z_mask(self):
        """Bit mask of qubits whose letter carries a sign (Z or Y)."""
        return _mask(self.letters, 'ZY')

    def with_coeff(self, coeff):
        return PauliString(self.letters, coeff, 0)

    def __mul__(self, other):
        if isinstance(other, PauliString):
            return pauli_multiply(self, other)
        return PauliString(self.letters, self.scale * other, self.phase)

    def __rmul__(self, other):
        return PauliString(self.letters, self.scale * other, self.phase)

    def __str__(self):
        return f'{_format_coeff(self.coeff)}·{self.letters}'


def _mask(letters, active):
    n = len(letters)
    mask = 0
    for index, letter in enumerate(letters):
        if letter in active:
            mask |= 1 << (n - 1 - index)
    return mask


def _format_coeff(value):
    value = complex(value)
    if value.imag == 0:
        return f'{value.real:g}'
    if value.real == 0:
        return f'{value.imag:g}i'
    return f'({value.real:g}{value.imag:+g}i)'


def pauli_multiply(a, b):
    """Group product ``a·b`` with the phase tracked exactly per site."""
    if a.num_qubits != b.num_qubits:
        raise DimensionError(f'Cannot multiply {a.num_qubits}-qubit and {b.num_qubits}-qubit strings.')
    letters = []
    power = a.phase + b.phase
    for x, y in zip(a.letters, b.letters):
        letter, p = _SITE_PRODUCT[x, y]
        letters.append(letter)
        power += p
    return PauliString(''.join(letters), a.scale * b.scale, power % 4)


def commutes(a, b):
    if a.num_qubits != b.num_qubits:
        raise DimensionError('Commutation check needs strings of equal size.')
    clashes = sum(1 for x, y in zip(a.letters, b.letters) if x != 'I' and y != 'I' and x != y)
    return clashes % 2 == 0


def _phase_vector(pauli, num_qubits):
    """P|b> = phase[b] |b ^ x_mask> 에서 phase[b] 배열."""
    index = np.arange(2 ** num_qubits, dtype=np.int64)
    parity = np.bitwise_count(index & pauli.z_mask) & 1
    signs = 1 - 2 * parity.astype(np.int64)
    return pauli.coeff * PHASES[pauli.letters.count('Y') % 4] * signs, index


def apply_pauli(pauli, vector):
    """Apply a Pauli string to a state vector (or a batch along the last axis)."""
    vector = np.asarray(vector, dtype=complex)
    if vector.shape[-1] != 2 ** pauli.num_qubits:
        raise DimensionError(f'vector length {vector.shape[-1]} does not match {pauli.num_qubits} qubits')
    phase, index = _phase_vector(pauli, pauli.num_qubits)
    result = np.empty_like(vector)
    result[..., index ^ pauli.x_mask] = phase * vector
    return result


def pauli_trace(matrix, pauli):
    """Tr[matrix · P] without building P densely."""
    matrix = np.asarray(matrix)
    if matrix.shape[0] != 2 ** pauli.num_qubits:
        raise DimensionError(f'matrix dimension {matrix.shape[0]} does not match {pauli.num_qubits} qubits')
    phase, index = _phase_vector(pauli, pauli.num_qubits)
    return complex(np.sum(phase * matrix[index, index ^ pauli.x_mask]))


# ----------------------------------------------------------------------
# OperatorExpr: Pauli 문자열의 가중합
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class OperatorExpr:
    """Canonical weighted sum of Pauli strings.

    ``items`` holds ``(letters, coeff)`` pairs sorted lexicographically by letters,
    with equal letters merged and exactly-zero coefficients dropped. Build it with
    :meth:`from_terms` rather than by hand.
    """

    num_qubits: int
    items: tuple = ()

    @classmethod
    def from_terms(cls, terms, num_qubits=None):
        merged = {}
        for term in terms:
            if num_qubits is None:
                num_qubits = term.num_qubits
            elif term.num_qubits != num_qubits:
                raise DimensionError(f'term {term.letters!r} does not act on {num_qubits} qubits')
            merged[term.letters] = merged.get(term.letters, 0) + term.coeff
        if num_qubits is None:
            raise DimensionError('An empty expression needs an explicit num_qubits.')
        items = tuple(
            (letters, complex(coeff))
            for letters, coeff in sorted(merged.items())
            if coeff != 0
        )
        return cls(num_qubits, items)

    @classmethod
    def identity(cls, num_qubits, scale=1.0):
        return cls.from_terms([PauliString.identity(num_qubits) * scale])

    @classmethod
    def from_pauli(cls, pauli):
        return cls.from_terms([pauli])

    @property
    def terms(self):
        return tuple(PauliString(letters, coeff) for letters, coeff in self.items)

    def coefficient(self, letters):
        return dict(self.items).get(letters, 0j)

    def is_hermitian(self, tol=0.0):
        # Pauli 문자열은 모두 Hermitian 이므로 계수가 실수이면 충분합니다.
        return all(abs(coeff.imag) <= tol for _, coeff in self.items)

    def is_zero(self, tol=ZERO_TOLERANCE):
        return all(abs(coeff) <= tol for _, coeff in self.items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.terms)

    def _coerce(self, other):
        if isinstance(other, OperatorExpr):
            return other
        if isinstance(other, PauliString):
            return OperatorExpr.from_pauli(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return OperatorExpr.from_terms(self.terms + other.terms, self.num_qubits)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        operand = self._coerce(other)
        if operand is None:
            return OperatorExpr.from_terms([t * other for t in self.terms], self.num_qubits)
        if operand.num_qubits != self.num_qubits:
            raise DimensionError('Cannot multiply expressions of different sizes.')
        products = [pauli_multiply(a, b) for a in self.terms for b in operand.terms]
        return OperatorExpr.from_terms(products, self.num_qubits)

    def __rmul__(self, other):
        return OperatorExpr.from_terms([other * t for t in self.terms], self.num_qubits)

    def __str__(self):
        if not self.items:
            return '0'
        parts = []
        for index, (letters, coeff) in enumerate(self.items):
            text = _format_coeff(coeff)
            if index == 0:
                parts.append(f'{text}·{letters}')
            elif text.startswith('-'):
                parts.append(f'- {text[1:]}·{letters}')
            else:
                parts.append(f'+ {text}·{letters}')
        return ' '.join(parts)

    def to_json(self):
        return json.dumps(
            [{'pauli': letters, 'coeff': [coeff.real, coeff.imag]} for letters, coeff in self.items]
        )

    @classmethod
    def from_json(cls, text, num_qubits=None):
        rows = json.loads(text)
        terms = [PauliString(row['pauli'], complex(row['coeff'][0], row['coeff'][1])) for row in rows]
        return cls.from_terms(terms, num_qubits)


def expand_projector_product(generators, indices=None, weights=None, num_qubits=None):
    """Expand ``Π_m (I + w_m S_m)/2`` into a canonical Pauli sum.

    ``indices`` selects which generators enter the product (all by default);
    ``weights`` maps a generator index to its factor ``w_m`` (1 when absent).
    The selected generators must commute pairwise.
    """
    generators = list(generators)
    chosen = list(range(len(generators))) if indices is None else list(indices)
    selected = [generators[i] for i in chosen]
    if num_qubits is None:
        if not generators:
            raise DimensionError('num_qubits is required when no generators are given.')
        num_qubits = generators[0].num_qubits
    for generator in selected:
        if generator.num_qubits != num_qubits:
            raise DimensionError(f'generator {generator.letters!r} does not act on {num_qubits} qubits')
    for a, b in combinations(selected, 2):
        if not commutes(a, b):
            raise AlgebraError(f'generators {a.letters} and {b.letters} do not commute')

    weights = weights or {}
    identity = OperatorExpr.identity(num_qubits)
    expr = identity
    for i in chosen:
        factor = (identity + weights.get(i, 1.0) * OperatorExpr.from_pauli(generators[i])) * 0.5
        expr = expr * factor
    return expr


def to_dense(expr, num_qubits=None):
    """Densify an expression; qubit 1 is the most significant tensor factor."""
    # dense_sim 이 이 모듈을 임포트하므로 순환 참조를 피하려고 함수 안에서 불러옵니다.
    from .dense_sim import DenseOperator

    if isinstance(expr, PauliString):
        expr = OperatorExpr.from_pauli(expr)
    if num_qubits is not None and num_qubits != expr.num_qubits:
        raise DimensionError(f'expression acts on {expr.num_qubits} qubits, not {num_qubits}')
    n = expr.num_qubits
    limit = conf.dense_limit()
    if n > limit:
        raise CapacityError(f'{n} qubits exceeds the dense limit of {limit}')

    matrix = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for term in expr.terms:
        phase, index = _phase_vector(term, n)
        matrix[index ^ term.x_mask, index] += phase
    logger.debug('densified %d-term expression on %d qubits', len(expr), n)
    return DenseOperator(matrix, hermitian=expr.is_hermitian())
