from django.core.management.base import BaseCommand, CommandError

from recycling.exceptions import OracleMismatchError, RecyclingError
from recycling.harness import MODES, OUTPUT_FORMATS, ExperimentConfig, check_agreement, render_table, \
    run_experiment, write_table


class Command(BaseCommand):
    """
    순차 관측자 실험 한 번을 돌리고 관측자 k 마다 한 줄씩 표를 출력합니다.
    --mode both 에서 해석값과 dense 값이 허용오차를 넘게 다르면 표를 쓴 뒤 0 이 아닌 코드로 끝납니다.
    """

    help = '순차 측정 실험: 관측자별 증인 기댓값 / 검출 여부 표를 출력합니다.'

    def add_arguments(self, parser):
        parser.add_argument('--state', required=True,
                            help='ghz | gghz:alpha=0.3 | mixed:p1=0.8,p2=0.1,p3=0.1,alpha=0.4 | cluster')
        parser.add_argument('--N', dest='num_qubits', type=int, required=True, help='큐비트(관측자 집단) 수, N >= 3')
        parser.add_argument('--lambdas', help='쉼표로 구분한 sharpness 목록 λ_1,λ_2,...')
        parser.add_argument('--plan', help='계획기 사용: l1=<λ_1>[,eps=<ε>]')
        parser.add_argument('--mode', choices=MODES, default='analytic')
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, default='csv')
        parser.add_argument('--out', help='표를 쓸 파일 (없으면 stdout)')

    def handle(self, *args, **options):
        try:
            config = ExperimentConfig.from_options(
                options['state'], options['num_qubits'],
                lambdas=options['lambdas'], plan=options['plan'], mode=options['mode'],
                seed=options['seed'], output_format=options['output_format'],
            )
            self.stderr.write(self.style.NOTICE(f'=== {config.header()} ==='))
            table = run_experiment(config)
        except RecyclingError as e:
            self.stderr.write(self.style.ERROR(f'❌ 실험 설정/실행 오류: {e}'))
            raise CommandError(f'run 실패: {e}')

        path = write_table(render_table(table, config.output_format, config.header()),
                           options['out'], self.stdout)
        if path:
            self.stderr.write(self.style.SUCCESS(f'📄 {path} 에 {len(table)}행 저장'))

        if config.mode == 'both':
            try:
                gap = check_agreement(table)
            except OracleMismatchError as e:
                self.stderr.write(self.style.ERROR(f'❌ {e}'))
                raise CommandError(str(e))
            self.stderr.write(self.style.SUCCESS(f'✅ 해석값 = dense 값 (최대 차이 {gap:.2e})'))

        detected = int(table['detected'].sum())
        style = self.style.SUCCESS if detected == len(table) else self.style.WARNING
        self.stderr.write(style(f'관측자 {len(table)}명 중 {detected}명이 GME 검출'))
