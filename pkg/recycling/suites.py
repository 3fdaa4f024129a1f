"""
verify 명령의 검증 묶음. 각 묶음은 불변식 하나당 CheckResult 한 줄을 돌려줍니다.

모든 난수는 run_suite 에 넘긴 seed 하나에서 나옵니다.
"""
import logging
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import conf
from .analytic_engine import (
    CorrelatorDecay,
    cluster_witness_value,
    ghz_witness_value,
    mixed_ghz_witness_value,
    resolve_recursion_index,
    symbolic_witness_value,
    witness_value_for,
)
from .dense_sim import (
    bipartitions,
    eigen_spectrum,
    luders_update,
    luders_update_closed_form,
    maximally_mixed,
    pure_expectations,
    random_density,
    sample_biseparable_vectors,
)
from .exceptions import ConfigError
from .pauli_algebra import PauliString, apply_pauli, pauli_trace, to_dense
from .sequence_planner import (
    generate_schedule,
    min_sharpness_for,
    ratio_profile,
    scaled_schedule,
)
from .state_factory import (
    CLUSTER,
    GHZ,
    MIXED_GHZ,
    StateFamily,
    cluster_vector,
    resolve_cluster_generator_form,
    stabilizer_generators,
)
from .witness_factory import difference_operator, difference_spectrum_support, witness_for

logger = logging.getLogger(__name__)

EXACT_TOLERANCE = 1e-12
DECAY_TOLERANCE = 1e-10
SPECTRUM_TOLERANCE = 1e-9

PSD_GRID = (0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 1.0)
BISEPARABLE_GRID = (0.0, 0.3, 0.7, 1.0)
MIXED_P1 = (0.5, 0.8, 1.0)
MIXED_ALPHA = (0.1, 0.25, 0.5)

DEFAULT_SAMPLES = {
    'channel': 1000,
    'recursion': 100,
    'biseparable': 10_000,
    'oracle': 200,
}


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    max_residual: float
    detail: str = ''

    def as_row(self):
        return asdict(self)


def _check(suite, name, residual, tol, detail=''):
    residual = float(residual)
    return CheckResult(suite, name, bool(residual <= tol), residual, detail)


@lru_cache(maxsize=None)
def _witness_pair(family, num_qubits):
    # W^k 는 λ_k 에 대해 1차식: W(λ) = W(0) + λ·(W(1) − W(0))
    low = to_dense(witness_for(family, num_qubits, 0.0)).matrix
    high = to_dense(witness_for(family, num_qubits, 1.0)).matrix
    return low, high - low


def _dense_witness(rho, family, sharpness):
    base, slope = _witness_pair(family, rho.num_qubits)
    return float(np.einsum('ij,ji->', rho.matrix, base + sharpness * slope).real)


def _dense_sequence(state, lambdas):
    """Dense ⟨W^k⟩ on ρ_k for k = 1 … len(lambdas), last qubit measured."""
    rho = state.density()
    target = state.num_qubits - 1
    values = []
    for value in lambdas:
        values.append(_dense_witness(rho, state.witness_family, value))
        rho = luders_update(rho, value, target, validate=False)
    return values


# ----------------------------------------------------------------------
# channel
# ----------------------------------------------------------------------
def channel_suite(rng, samples):
    closed_gap = trace_gap = 0.0
    min_eigenvalue = np.inf
    for _ in range(samples):
        n = int(rng.integers(1, 5))
        rho = random_density(n, rng, rank=int(rng.integers(1, 2 ** n + 1)))
        sharpness = float(rng.uniform())
        target = int(rng.integers(n))
        updated = luders_update(rho, sharpness, target)
        closed = luders_update_closed_form(rho, sharpness, target)
        closed_gap = max(closed_gap, np.abs(updated.matrix - closed.matrix).max())
        trace_gap = max(trace_gap, abs(updated.trace - 1))
        min_eigenvalue = min(min_eigenvalue, eigen_spectrum(updated)[0])

    unital_gap = 0.0
    for n in range(1, 5):
        mixed = maximally_mixed(n)
        for target in range(n):
            image = luders_update(mixed, float(rng.uniform()), target)
            unital_gap = max(unital_gap, np.abs(image.matrix - mixed.matrix).max())

    positivity = conf.get('GME_POSITIVITY_TOLERANCE')
    return [
        _check('channel', 'closed_form', closed_gap, EXACT_TOLERANCE, f'{samples} random states, N <= 4'),
        _check('channel', 'trace_preserved', trace_gap, EXACT_TOLERANCE),
        _check('channel', 'positivity', max(0.0, -min_eigenvalue), positivity,
               f'min eigenvalue {min_eigenvalue:.3e}'),
        _check('channel', 'unital', unital_gap, EXACT_TOLERANCE),
    ]


# ----------------------------------------------------------------------
# recursion
# ----------------------------------------------------------------------
def _random_correlator(n, letter, rng):
    rest = ''.join(rng.choice(list('IXYZ'), size=n - 1))
    return PauliString(rest + letter)


def recursion_suite(rng, samples, max_k=6):
    gaps = {'Z': 0.0, 'X': 0.0}
    y_excess = 0.0
    observed = None
    ghz_lambdas = None
    for sample in range(samples):
        n = int(rng.integers(3, 6))
        lambdas = tuple(rng.uniform(size=max_k - 1))
        decay = CorrelatorDecay(lambdas)
        rho_1 = random_density(n, rng)
        correlators = {letter: _random_correlator(n, letter, rng) for letter in 'XYZ'}
        start = {letter: pauli_trace(rho_1.matrix, p).real for letter, p in correlators.items()}
        rho = rho_1
        for k in range(1, max_k + 1):
            now = {letter: pauli_trace(rho.matrix, p).real for letter, p in correlators.items()}
            gaps['Z'] = max(gaps['Z'], abs(now['Z'] - decay.z_factor(k) * start['Z']))
            gaps['X'] = max(gaps['X'], abs(now['X'] - decay.x_factor(k) * start['X']))
            y_excess = max(y_excess, abs(now['Y']) - decay.x_factor(k) * abs(start['Y']))
            if k < max_k:
                rho = luders_update(rho, lambdas[k - 1], n - 1, validate=False)
        if sample == 0:
            # GHZ 의 Z_{N−1}Z_N 은 초기값 1 이라 관측값 자체가 감쇠 비율
            ghz = StateFamily(GHZ, n).density()
            probe = PauliString.from_sites(n, {n - 2: 'Z', n - 1: 'Z'})
            ghz_lambdas = lambdas
            observed = []
            for k in range(1, max_k):
                observed.append(pauli_trace(ghz.matrix, probe).real)
                ghz = luders_update(ghz, lambdas[k - 1], n - 1, validate=False)

    resolution = resolve_recursion_index(ghz_lambdas, observed)
    return [
        _check('recursion', 'z_decay', gaps['Z'], DECAY_TOLERANCE, f'{samples} schedules, N = 3..5, k <= {max_k}'),
        _check('recursion', 'x_decay', gaps['X'], DECAY_TOLERANCE),
        _check('recursion', 'y_decay_bounded', max(0.0, y_excess), DECAY_TOLERANCE),
        _check('recursion', 'product_index', resolution.residuals[resolution.index], DECAY_TOLERANCE,
               resolution.summary),
    ]


# ----------------------------------------------------------------------
# psd
# ----------------------------------------------------------------------
def psd_suite(rng=None, samples=None, qubit_range=range(3, 7), grid=PSD_GRID):
    results = []
    for family in (GHZ, CLUSTER):
        outside = 0.0
        min_eigenvalue = np.inf
        for n in qubit_range:
            for sharpness in grid:
                spectrum = eigen_spectrum(to_dense(difference_operator(family, n, sharpness)))
                support = np.asarray(difference_spectrum_support(family, sharpness))
                outside = max(outside, np.abs(spectrum[:, None] - support[None, :]).min(axis=1).max())
                min_eigenvalue = min(min_eigenvalue, spectrum[0])
        results.append(_check('psd', f'{family}_spectrum', outside, SPECTRUM_TOLERANCE,
                              f'N = {qubit_range.start}..{qubit_range.stop - 1}, {len(grid)} sharpness values'))
        results.append(_check('psd', f'{family}_min_eigenvalue', max(0.0, -min_eigenvalue),
                              conf.get('GME_POSITIVITY_TOLERANCE'), f'min eigenvalue {min_eigenvalue:.3e}'))
    return results


# ----------------------------------------------------------------------
# biseparable
# ----------------------------------------------------------------------
def biseparable_suite(rng, samples, qubit_range=(3, 4), grid=BISEPARABLE_GRID):
    lowest = {GHZ: np.inf, CLUSTER: np.inf}
    for n in qubit_range:
        for part in bipartitions(n):
            vectors = sample_biseparable_vectors(n, part, samples, rng)
            for family in lowest:
                base, slope = _witness_pair(family, n)
                for sharpness in grid:
                    values = pure_expectations(base + sharpness * slope, vectors)
                    lowest[family] = min(lowest[family], values.min())

    corner = np.zeros(8, dtype=complex)
    corner[0] = 1
    corner_value = pure_expectations(to_dense(witness_for(GHZ, 3)), corner)[0]
    positivity = conf.get('GME_POSITIVITY_TOLERANCE')
    results = [
        _check('biseparable', f'{family}_non_negative', max(0.0, -value), positivity,
               f'min <W> = {value:.3e} over {samples} samples per bipartition')
        for family, value in lowest.items()
    ]
    results.append(_check('biseparable', 'ghz_product_corner', abs(corner_value), EXACT_TOLERANCE,
                          '<W_GHZ_3> on |000>'))
    return results


# ----------------------------------------------------------------------
# oracle
# ----------------------------------------------------------------------
def oracle_suite(rng, samples, qubit_range=range(3, 7), max_k=6, symbolic_qubits=12):
    gaps = {GHZ: 0.0, CLUSTER: 0.0}
    spread = 0.0
    formula_gap = 0.0
    for _ in range(samples):
        lambdas = tuple(rng.uniform(size=max_k))
        for family, evaluator in ((GHZ, ghz_witness_value), (CLUSTER, cluster_witness_value)):
            analytic = np.array([evaluator(k, lambdas) for k in range(1, max_k + 1)])
            per_size = []
            for n in qubit_range:
                dense = np.array(_dense_sequence(StateFamily(family, n), lambdas))
                gaps[family] = max(gaps[family], np.abs(analytic - dense).max())
                per_size.append(dense)
            spread = max(spread, np.ptp(per_size, axis=0).max())
        formula_gap = max(formula_gap, max(
            abs(ghz_witness_value(k, lambdas) - cluster_witness_value(k, lambdas))
            for k in range(1, max_k + 1)
        ))

    mixed_gap = 0.0
    for n in (3, 4):
        for p1 in MIXED_P1:
            for alpha in MIXED_ALPHA:
                state = _mixed_state(n, p1, alpha)
                lambdas = tuple(rng.uniform(size=4))
                analytic = [witness_value_for(state, k, lambdas) for k in range(1, 5)]
                mixed_gap = max(mixed_gap, np.abs(np.subtract(analytic, _dense_sequence(state, lambdas))).max())

    symbolic_gap = 0.0
    lambdas = tuple(rng.uniform(size=max_k))
    for family in (GHZ, CLUSTER):
        state = StateFamily(family, symbolic_qubits)
        for k in (1, 3):
            value = symbolic_witness_value(state, witness_for(family, symbolic_qubits, lambdas[k - 1]),
                                           lambdas[:k - 1])
            symbolic_gap = max(symbolic_gap, abs(value - witness_value_for(state, k, lambdas)))

    tol = conf.get('GME_ORACLE_TOLERANCE')
    sizes = f'N = {qubit_range.start}..{qubit_range.stop - 1}'
    return [
        _check('oracle', 'ghz_analytic_vs_dense', gaps[GHZ], tol, f'{samples} schedules, {sizes}, k <= {max_k}'),
        _check('oracle', 'cluster_analytic_vs_dense', gaps[CLUSTER], tol, f'{samples} schedules, {sizes}'),
        _check('oracle', 'ghz_equals_cluster_formula', formula_gap, 0.0),
        _check('oracle', 'size_independence', spread, tol, sizes),
        _check('oracle', 'mixed_analytic_vs_dense', mixed_gap, tol, 'N = 3, 4 on the (p1, alpha) grid'),
        _check('oracle', 'symbolic_vs_analytic', symbolic_gap, tol, f'N = {symbolic_qubits}, no dense matrices'),
    ]


def _mixed_state(n, p1, alpha):
    rest = (1 - p1) / 2
    return StateFamily(MIXED_GHZ, n, alpha=alpha, p1=p1, p2=rest, p3=rest)


# ----------------------------------------------------------------------
# cluster
# ----------------------------------------------------------------------
def cluster_suite(rng=None, samples=None, qubit_range=range(3, 9)):
    stabilizer_gap = 0.0
    witness_gap = 0.0
    notes = []
    for n in qubit_range:
        resolution = resolve_cluster_generator_form(n)
        notes.append(resolution.summary)
        vector = cluster_vector(n)
        for generator in stabilizer_generators(CLUSTER, n):
            stabilizer_gap = max(stabilizer_gap, np.abs(apply_pauli(generator, vector) - vector).max())
        witness_value = pure_expectations(to_dense(witness_for(CLUSTER, n)), vector)[0]
        witness_gap = max(witness_gap, abs(witness_value + 1))
    printed_fails = all('printed: fails' in note for note in notes)
    logger.info('cluster forms: %s', ' | '.join(notes))
    return [
        _check('cluster', 'generators_stabilize', stabilizer_gap, EXACT_TOLERANCE, notes[-1]),
        _check('cluster', 'witness_minus_one', witness_gap, EXACT_TOLERANCE),
        CheckResult('cluster', 'printed_form_rejected', printed_fails, 0.0 if printed_fails else 1.0,
                    'printed middle generator fails the stabilizer check for every N'),
    ]


# ----------------------------------------------------------------------
# mixed
# ----------------------------------------------------------------------
def mixed_suite(rng, samples=None, num_qubits=3, max_k=4):
    sign_mismatches = 0
    value_gap = 0.0
    first_observer = -np.inf
    for p1 in MIXED_P1:
        for alpha in MIXED_ALPHA:
            state = _mixed_state(num_qubits, p1, alpha)
            schedules = [tuple(rng.uniform(size=max_k)) for _ in range(5)]
            schedules.append(scaled_schedule(0.05, 0.05, p1, alpha, max_k=max_k).values)
            for lambdas in schedules:
                analytic = np.array([witness_value_for(state, k, lambdas) for k in range(1, len(lambdas) + 1)])
                dense = np.array(_dense_sequence(state, lambdas))
                sign_mismatches += int(np.sum((analytic < 0) != (dense < 0)))
                value_gap = max(value_gap, np.abs(analytic - dense).max())
            first_observer = max(first_observer, _dense_sequence(state, (1.0,))[0])

    reduction_gap = 0.0
    for _ in range(20):
        lambdas = tuple(rng.uniform(size=6))
        reduction_gap = max(reduction_gap, max(
            abs(mixed_ghz_witness_value(k, lambdas, 1.0, 0.5) - ghz_witness_value(k, lambdas))
            for k in range(1, 7)
        ))
    reduced = scaled_schedule(0.05, 0.05, 1.0, 0.5).values == generate_schedule(0.05, 0.05).values

    return [
        CheckResult('mixed', 'sign_agreement', sign_mismatches == 0, float(sign_mismatches),
                    f'p1 in {MIXED_P1}, alpha in {MIXED_ALPHA}, N = {num_qubits}, k <= {max_k}'),
        _check('mixed', 'analytic_vs_dense', value_gap, conf.get('GME_ORACLE_TOLERANCE')),
        CheckResult('mixed', 'first_observer_detects', first_observer < 0, max(0.0, first_observer),
                    'dense W^1 < 0 at lambda_1 = 1 over the grid'),
        _check('mixed', 'reduces_to_ghz', reduction_gap, 0.0, 'p1 = 1, alpha = 1/2'),
        CheckResult('mixed', 'schedule_reduces_to_ghz', reduced, 0.0 if reduced else 1.0),
    ]


# ----------------------------------------------------------------------
# baseline
# ----------------------------------------------------------------------
def baseline_suite(rng=None, samples=None, qubit_range=range(3, 9)):
    dense_gap = symbolic_gap = 0.0
    for n in qubit_range:
        state = StateFamily(GHZ, n)
        witness = witness_for(GHZ, n)
        dense_value = float(np.einsum('ij,ji->', state.density().matrix, to_dense(witness).matrix).real)
        dense_gap = max(dense_gap, abs(dense_value + 1))
        symbolic_gap = max(symbolic_gap, abs(symbolic_witness_value(state, witness, ()) + 1))
    return [
        _check('baseline', 'ghz_dense', dense_gap, EXACT_TOLERANCE, '<W_GHZ_N> = -1, N = 3..8'),
        _check('baseline', 'ghz_symbolic', symbolic_gap, EXACT_TOLERANCE),
    ]


# ----------------------------------------------------------------------
# planner
# ----------------------------------------------------------------------
def planner_suite(rng=None, samples=None, max_n=8, epsilon=0.05, vanishing_n=3):
    agreement = 0.0
    worst_margin = np.inf
    ratio_floor = np.inf
    strict = True
    for n in range(1, max_n + 1):
        search = min_sharpness_for(n, epsilon)
        schedule = generate_schedule(search.lambda_1, epsilon, max_k=n)
        strict &= len(schedule) == n and all(
            value > threshold for value, threshold in zip(schedule.values, schedule.thresholds())
        )
        analytic = np.array([ghz_witness_value(k, schedule.values) for k in range(1, n + 1)])
        for num_qubits in (3, 4):
            dense = np.array(_dense_sequence(StateFamily(GHZ, num_qubits), schedule.values))
            agreement = max(agreement, np.abs(analytic - dense).max())
            worst_margin = min(worst_margin, -dense.max())
        for k, ratio, inside in ratio_profile(schedule):
            if inside:
                ratio_floor = min(ratio_floor, ratio)

    tails = [generate_schedule(10.0 ** -m, epsilon, max_k=vanishing_n).values[-1] for m in range(2, 7)]
    vanishing = all(later < earlier for earlier, later in zip(tails, tails[1:])) and tails[-1] < 1e-6

    return [
        _check('planner', 'dense_agreement', agreement, conf.get('GME_ORACLE_TOLERANCE'),
               f'n = 1..{max_n}, N = 3, 4'),
        CheckResult('planner', 'all_detect', worst_margin > 0, max(0.0, -worst_margin),
                    f'smallest margin {worst_margin:.3e}'),
        CheckResult('planner', 'strict_construction', strict, 0.0 if strict else 1.0),
        CheckResult('planner', 'ratio_above_two', ratio_floor > 2, float(ratio_floor),
                    'lambda_k / lambda_(k-1) for k >= 3'),
        CheckResult('planner', 'vanishing_limit', vanishing, float(tails[-1]),
                    f'lambda_{vanishing_n} from lambda_1 = 1e-2 .. 1e-6: ' + ', '.join(f'{t:.2e}' for t in tails)),
    ]


SUITES = {
    'channel': channel_suite,
    'recursion': recursion_suite,
    'psd': psd_suite,
    'biseparable': biseparable_suite,
    'oracle': oracle_suite,
    'cluster': cluster_suite,
    'mixed': mixed_suite,
    'baseline': baseline_suite,
    'planner': planner_suite,
}
SUITE_NAMES = tuple(SUITES) + ('all',)


def run_suite(name, seed=None, samples=None):
    """Run one suite (or ``all``) and return its CheckResults in order."""
    if name not in SUITE_NAMES:
        raise ConfigError(f'unknown suite {name!r}; choose from {", ".join(SUITE_NAMES)}')
    seed = conf.get('GME_DEFAULT_SEED') if seed is None else seed
    rng = np.random.default_rng(seed)
    names = list(SUITES) if name == 'all' else [name]
    results = []
    for suite in names:
        count = samples if samples is not None else DEFAULT_SAMPLES.get(suite)
        logger.info('suite %s (seed=%s, samples=%s)', suite, seed, count)
        results.extend(SUITES[suite](rng, count))
    return results
