import os
from pathlib import Path

from dotenv import load_dotenv

# BASE_DIR는 settings.py가 있는 'gmerecycle' 폴더 자체를 가리킵니다.
BASE_DIR = Path(__file__).resolve().parent

# .env 파일이 있으면 읽고, 없으면 아래 기본값을 그대로 사용합니다. (필수 환경 변수 없음)
load_dotenv(BASE_DIR.parent / '.env')

SECRET_KEY = 'dev-only-secret-key'
DEBUG = True
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'recycling',
]

# 영속 저장소를 쓰지 않으므로 DB는 비워 둡니다. (테스트는 SimpleTestCase만 사용)
DATABASES = {}


# ----------------------------------------------------------------------
# 순차 관측자 GME 검출 시뮬레이션 설정
# ----------------------------------------------------------------------

# dense 시뮬레이터가 다루는 최대 큐비트 수 (밀도 행렬 2^N x 2^N)
GME_DENSE_LIMIT = int(os.getenv('GME_DENSE_LIMIT', 10))

# sharpness 수열 λ_k = (1+ε)·threshold 의 기본 ε
GME_DEFAULT_EPSILON = float(os.getenv('GME_DEFAULT_EPSILON', 0.05))

# max_detections 탐색 상한
GME_PLANNER_CAP = int(os.getenv('GME_PLANNER_CAP', 64))

# analytic vs dense 허용 오차
GME_ORACLE_TOLERANCE = float(os.getenv('GME_ORACLE_TOLERANCE', 1e-9))

# 밀도 행렬 고유값 하한 (k <= 20 회 채널 적용 누적 오차 허용)
GME_POSITIVITY_TOLERANCE = float(os.getenv('GME_POSITIVITY_TOLERANCE', 1e-10))

GME_HERMITIAN_TOLERANCE = float(os.getenv('GME_HERMITIAN_TOLERANCE', 1e-12))

GME_BISECTION_TOLERANCE = float(os.getenv('GME_BISECTION_TOLERANCE', 1e-9))

GME_DEFAULT_SEED = int(os.getenv('GME_DEFAULT_SEED', 7))


# 로깅: 라이브러리 모듈은 logging.getLogger(__name__) 사용, 표 출력(stdout)과 섞이지 않게 stderr로 보냅니다.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '[{asctime}] {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'recycling': {
            'handlers': ['console'],
            'level': os.getenv('GME_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
