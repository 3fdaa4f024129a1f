from django.core.management.base import BaseCommand, CommandError

from recycling import conf
from recycling.exceptions import RecyclingError
from recycling.harness import OUTPUT_FORMATS, TABLE_VERSION, render_table, plan_table, write_table


class Command(BaseCommand):
    """
    n 번의 순차 검출을 보장하는 λ_1 을 이분 탐색으로 찾고, 그 수열을 표로 냅니다.
    --validate-N 을 주면 해당 큐비트 수에서 dense 시뮬레이션으로 모든 관측자의 검출을 확인합니다.
    """

    help = 'n 번 검출에 필요한 λ_1 탐색 (min_sharpness_for) 및 수열 출력'

    def add_arguments(self, parser):
        parser.add_argument('--n', type=int, required=True, help='원하는 순차 검출 횟수')
        parser.add_argument('--eps', type=float, default=None)
        parser.add_argument('--validate-N', dest='validate_qubits', type=int, default=None,
                            help='dense 검증에 쓸 큐비트 수 (예: 3)')
        parser.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, default='csv')
        parser.add_argument('--out')

    def handle(self, *args, **options):
        epsilon = conf.get('GME_DEFAULT_EPSILON') if options['eps'] is None else options['eps']
        validate = options['validate_qubits']
        if validate is not None and not 3 <= validate <= conf.dense_limit():
            raise CommandError(f'--validate-N 은 3..{conf.dense_limit()} 범위여야 합니다 (got {validate})')

        try:
            search, table = plan_table(options['n'], epsilon, validate)
        except RecyclingError as e:
            self.stderr.write(self.style.ERROR(f'❌ 계획 실패: {e}'))
            raise CommandError(f'plan 실패: {e}')

        low, high = search.bracket
        self.stderr.write(self.style.NOTICE(
            f'λ_1 = {search.lambda_1:.12g} (bracket [{low:.12g}, {high:.12g}], {search.iterations} steps)'
        ))
        header = (f'gmerecycle-plan v{TABLE_VERSION} n={search.n} eps={epsilon:g} '
                  f'lambda_1={search.lambda_1!r} validate_N={validate or "-"}')
        write_table(render_table(table, options['output_format'], header), options['out'], self.stdout)

        if not table['detected'].all():
            missed = table.loc[~table['detected'], 'k'].tolist()
            raise CommandError(f'관측자 {missed} 가 검출에 실패했습니다')
        self.stderr.write(self.style.SUCCESS(
            f'✅ 관측자 {len(table)}명 모두 검출 (최소 여유 {table["margin"].min():.3e})'
        ))
