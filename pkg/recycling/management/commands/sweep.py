from django.core.management.base import BaseCommand, CommandError

from recycling import conf
from recycling.exceptions import RecyclingError
from recycling.harness import OUTPUT_FORMATS, TABLE_VERSION, parse_float_list, render_table, sweep_table, \
    write_table


class Command(BaseCommand):
    help = 'λ_1 격자마다 보장되는 최대 검출 횟수(max_detections)를 표로 출력합니다.'

    def add_arguments(self, parser):
        parser.add_argument('--eps', type=float, default=None, help='여유 계수 ε (기본 GME_DEFAULT_EPSILON)')
        parser.add_argument('--grid', required=True,
                            help='쉼표로 구분한 λ_1 값들, 각각 [1e-150, 1) (더 작으면 임계값이 0 으로 underflow)')
        parser.add_argument('--cap', type=int, default=None, help='검출 횟수 상한 (기본 GME_PLANNER_CAP)')
        parser.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, default='csv')
        parser.add_argument('--out')

    def handle(self, *args, **options):
        epsilon = conf.get('GME_DEFAULT_EPSILON') if options['eps'] is None else options['eps']
        cap = conf.get('GME_PLANNER_CAP') if options['cap'] is None else options['cap']
        try:
            grid = parse_float_list(options['grid'], 'grid')
            table = sweep_table(epsilon, grid, cap)
        except RecyclingError as e:
            self.stderr.write(self.style.ERROR(f'❌ sweep 오류: {e}'))
            raise CommandError(f'sweep 실패: {e}')

        header = f'gmerecycle-sweep v{TABLE_VERSION} eps={epsilon:g} cap={cap}'
        write_table(render_table(table, options['output_format'], header), options['out'], self.stdout)
        best = table.loc[table['max_detections'].idxmax()]
        self.stderr.write(self.style.SUCCESS(
            f'✅ {len(table)}개 격자점 완료 (최대 {int(best["max_detections"])}회 @ λ_1={best["lambda_1"]:g})'
        ))
