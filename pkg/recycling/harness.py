"""
관리 명령(run / sweep / plan)이 호출하는 실험 로직.

명령 파일은 옵션 파싱과 출력만 맡고, 표(DataFrame) 계산은 모두 여기서 합니다.
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from . import conf
from .analytic_engine import full_sequence_report, witness_value_for
from .dense_sim import expectation, luders_update
from .exceptions import ConfigError, DomainError, OracleMismatchError
from .sequence_planner import (
    LAMBDA_FLOOR,
    generate_schedule,
    max_detections,
    min_sharpness_for,
    scaled_schedule,
)
from .state_factory import CLUSTER, GHZ, StateFamily
from .witness_factory import witness_for

logger = logging.getLogger(__name__)

MODES = ('dense', 'analytic', 'both')
OUTPUT_FORMATS = ('csv', 'json')

RUN_COLUMNS = ['k', 'lambda_k', 'witness_value_analytic', 'witness_value_dense', 'detected', 'margin']
SWEEP_COLUMNS = ['lambda_1', 'max_detections']
PLAN_COLUMNS = ['k', 'lambda_k', 'threshold', 'witness_value_analytic', 'witness_value_dense', 'detected', 'margin']

# CSV 첫 줄 주석에 들어가는 형식 버전. 열 구성이 바뀌면 올립니다.
TABLE_VERSION = 1


def parse_float_list(text, name):
    try:
        values = [float(chunk) for chunk in text.split(',') if chunk.strip()]
    except ValueError:
        raise ConfigError(f'--{name} expects comma-separated numbers, got {text!r}')
    if not values:
        raise ConfigError(f'--{name} is empty')
    return values


def parse_plan(text):
    """'l1=0.05,eps=0.05' -> (0.05, 0.05); eps falls back to the configured default."""
    fields = {}
    for chunk in filter(None, (c.strip() for c in text.split(','))):
        key, sep, value = chunk.partition('=')
        if not sep or key.strip() not in ('l1', 'eps'):
            raise ConfigError(f'--plan expects l1=<value>[,eps=<value>], got {chunk!r}')
        try:
            fields[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f'--plan value for {key.strip()} is not a number: {value!r}')
    if 'l1' not in fields:
        raise ConfigError('--plan needs l1=<value>')
    return fields['l1'], fields.get('eps', conf.get('GME_DEFAULT_EPSILON'))


@dataclass(frozen=True)
class ExperimentConfig:
    state: StateFamily
    lambdas: tuple | None = None
    plan: tuple | None = None
    mode: str = 'analytic'
    seed: int = 7
    output_format: str = 'csv'

    def __post_init__(self):
        if (self.lambdas is None) == (self.plan is None):
            raise ConfigError('give exactly one schedule source: --lambdas or --plan')
        if self.mode not in MODES:
            raise ConfigError(f'mode must be one of {", ".join(MODES)}')
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f'format must be one of {", ".join(OUTPUT_FORMATS)}')
        limit = conf.dense_limit()
        if self.mode != 'analytic' and self.num_qubits > limit:
            raise ConfigError(f'{self.mode} mode needs N <= {limit} (got {self.num_qubits})')

    @classmethod
    def from_options(cls, state, num_qubits, lambdas=None, plan=None, mode='analytic', seed=None,
                     output_format='csv'):
        try:
            family = StateFamily.parse(state, num_qubits)
        except DomainError as exc:
            raise ConfigError(str(exc))
        return cls(
            state=family,
            lambdas=tuple(parse_float_list(lambdas, 'lambdas')) if lambdas else None,
            plan=parse_plan(plan) if plan else None,
            mode=mode,
            seed=conf.get('GME_DEFAULT_SEED') if seed is None else seed,
            output_format=output_format,
        )

    @property
    def num_qubits(self):
        return self.state.num_qubits

    def schedule(self):
        if self.lambdas is not None:
            return self.lambdas
        lambda_1, epsilon = self.plan
        if self.state.variant in (GHZ, CLUSTER):
            return generate_schedule(lambda_1, epsilon).values
        return scaled_schedule(lambda_1, epsilon, self.state.p1, self.state.alpha).values

    def header(self):
        source = f'lambdas={",".join(f"{v:g}" for v in self.lambdas)}' if self.lambdas else \
            f'plan=l1={self.plan[0]:g},eps={self.plan[1]:g}'
        return (f'gmerecycle-run v{TABLE_VERSION} state={self.state.label} N={self.num_qubits} '
                f'{source} mode={self.mode} seed={self.seed}')


def dense_witness_values(state, lambdas, target=None):
    """⟨W^k⟩ on ρ_k by direct simulation, k = 1 … len(lambdas)."""
    target = state.num_qubits - 1 if target is None else target
    rho = state.density()
    values = []
    for value in lambdas:
        witness = witness_for(state.witness_family, state.num_qubits, value)
        values.append(expectation(rho, witness))
        rho = luders_update(rho, value, target, validate=False)
    return values


def run_experiment(config):
    """One row per sequential observer; dense column is NaN in analytic mode."""
    lambdas = config.schedule()
    rows = pd.DataFrame({'k': range(1, len(lambdas) + 1), 'lambda_k': lambdas})
    if config.mode in ('analytic', 'both'):
        reports = full_sequence_report(config.state, lambdas)
        rows['witness_value_analytic'] = [r.witness_value for r in reports]
    else:
        rows['witness_value_analytic'] = np.nan
    if config.mode in ('dense', 'both'):
        rows['witness_value_dense'] = dense_witness_values(config.state, lambdas)
    else:
        rows['witness_value_dense'] = np.nan
    reference = rows['witness_value_analytic'].fillna(rows['witness_value_dense'])
    rows['detected'] = reference < 0
    rows['margin'] = reference.abs()
    return rows[RUN_COLUMNS]


def max_disagreement(table):
    both = table[['witness_value_analytic', 'witness_value_dense']].dropna()
    if both.empty:
        return 0.0
    return float((both['witness_value_analytic'] - both['witness_value_dense']).abs().max())


def check_agreement(table, tol=None):
    tol = conf.get('GME_ORACLE_TOLERANCE') if tol is None else tol
    gap = max_disagreement(table)
    if gap > tol:
        raise OracleMismatchError(f'analytic and dense witness values differ by {gap:.3e} (> {tol:g})')
    return gap


def sweep_table(epsilon, grid, cap=None):
    """(λ_1, max_detections) for every grid point, in grid order.

    Grid points below LAMBDA_FLOOR are rejected: there 1 − Π underflows to zero in double precision.
    """
    for value in grid:
        if not 0.0 < value < 1.0:
            raise ConfigError(f'grid point {value} is outside (0, 1)')
        if value < LAMBDA_FLOOR:
            raise ConfigError(f'grid point {value:g} is below the representable floor {LAMBDA_FLOOR:g}')
    return pd.DataFrame(
        [(value, max_detections(value, epsilon, cap)) for value in grid],
        columns=SWEEP_COLUMNS,
    )


def plan_table(n, epsilon, validate_qubits=None, family=GHZ):
    """Search λ_1 for n detections and tabulate the resulting schedule.

    With ``validate_qubits`` the schedule is also simulated densely on that many qubits.
    """
    search = min_sharpness_for(n, epsilon)
    schedule = generate_schedule(search.lambda_1, search.epsilon, max_k=n)
    state = StateFamily(family, validate_qubits or 3)
    rows = pd.DataFrame({
        'k': range(1, len(schedule) + 1),
        'lambda_k': schedule.values,
        'threshold': schedule.thresholds(),
        'witness_value_analytic': [witness_value_for(state, k, schedule.values)
                                   for k in range(1, len(schedule) + 1)],
    })
    rows['witness_value_dense'] = (dense_witness_values(state, schedule.values)
                                   if validate_qubits else math.nan)
    rows['detected'] = rows['witness_value_analytic'] < 0
    if validate_qubits:
        rows['detected'] &= rows['witness_value_dense'] < 0
    rows['margin'] = rows['witness_value_analytic'].abs()
    return search, rows[PLAN_COLUMNS]


def render_table(table, output_format, header=None):
    """CSV (주석 헤더 포함) 또는 JSON records 문자열. 같은 입력이면 바이트 단위로 같습니다.

    실수는 17 자리(CSV) 또는 repr(JSON)로 써서 다시 읽으면 비트 단위로 같은 값이 나옵니다.
    """
    if output_format == 'json':
        records = [
            {column: None if pd.isna(value) else value for column, value in row.items()}
            for row in table.to_dict(orient='records')
        ]
        return json.dumps(records) + '\n'
    body = table.to_csv(index=False, float_format='%.17g', lineterminator='\n')
    return (f'# {header}\n' if header else '') + body


def write_table(text, out=None, stream=None):
    if out:
        Path(out).write_text(text)
        return Path(out)
    stream.write(text, ending='')
    return None
