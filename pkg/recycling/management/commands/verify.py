import json

import pandas as pd
from django.core.management.base import BaseCommand, CommandError

from recycling import conf
from recycling.dense_sim import load_density
from recycling.exceptions import RecyclingError
from recycling.harness import OUTPUT_FORMATS, TABLE_VERSION, render_table, write_table
from recycling.suites import SUITE_NAMES, run_suite


class Command(BaseCommand):
    """
    검증 묶음을 실행하고 불변식별 pass/fail 과 최대 잔차를 표로 냅니다.
    하나라도 실패하면 CommandError 로 0 이 아닌 종료 코드를 돌려줍니다.
    """

    help = '검증 묶음 실행: channel, recursion, psd, biseparable, oracle, cluster, mixed, baseline, planner, all'

    def add_arguments(self, parser):
        parser.add_argument('suite', choices=SUITE_NAMES)
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--samples', type=int, default=None, help='무작위 표본 수 (묶음별 기본값 대신)')
        parser.add_argument('--density', help='검사할 밀도 행렬 파일 (.json / .npz); 유효성만 확인')
        parser.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, default='csv')
        parser.add_argument('--out')

    def handle(self, *args, **options):
        seed = conf.get('GME_DEFAULT_SEED') if options['seed'] is None else options['seed']
        if options['density']:
            self._check_density_file(options['density'])

        self.stderr.write(self.style.NOTICE(f'=== verify {options["suite"]} 시작 ==='))
        try:
            results = run_suite(options['suite'], seed, options['samples'])
        except RecyclingError as e:
            self.stderr.write(self.style.ERROR(f'❌ 검증 실행 오류: {e}'))
            raise CommandError(f'verify 실패: {e}')

        table = pd.DataFrame([r.as_row() for r in results])
        header = f'gmerecycle-verify v{TABLE_VERSION} suite={options["suite"]} seed={seed}'
        write_table(render_table(table, options['output_format'], header), options['out'], self.stdout)

        failed = [f'{r.suite}.{r.name}' for r in results if not r.passed]
        if failed:
            self.stderr.write(self.style.ERROR(f'❌ 실패 {len(failed)}건: {", ".join(failed)}'))
            raise CommandError(f'{len(failed)} check(s) failed')
        self.stderr.write(self.style.SUCCESS(f'✅ {len(results)}개 검사 모두 통과'))

    def _check_density_file(self, path):
        try:
            rho = load_density(path)
            rho.validate_density()
        except (RecyclingError, OSError, ValueError, json.JSONDecodeError) as e:
            raise CommandError(f'밀도 행렬 파일 오류 ({path}): {e}')
        self.stderr.write(self.style.SUCCESS(f'✅ {path}: N={rho.num_qubits} 유효한 밀도 행렬'))
