from django.conf import settings

DEFAULTS = {
    'GME_DENSE_LIMIT': 10,
    'GME_DEFAULT_EPSILON': 0.05,
    'GME_PLANNER_CAP': 64,
    'GME_ORACLE_TOLERANCE': 1e-9,
    'GME_POSITIVITY_TOLERANCE': 1e-10,
    'GME_HERMITIAN_TOLERANCE': 1e-12,
    'GME_BISECTION_TOLERANCE': 1e-9,
    'GME_DEFAULT_SEED': 7,
}


def get(name):
    """settings 값을 읽되, Django 설정 없이 라이브러리로 쓸 때는 기본값을 돌려줍니다."""
    if settings.configured:
        return getattr(settings, name, DEFAULTS[name])
    return DEFAULTS[name]


def dense_limit():
    return int(get('GME_DENSE_LIMIT'))
