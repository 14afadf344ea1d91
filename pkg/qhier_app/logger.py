import logging
from logging.config import dictConfig

from qhier_app.config import settings


def configure_logging(level: str = None) -> None:
    dictConfig({
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'plain': {'format': '%(levelname)s %(name)s: %(message)s'},
        },
        'handlers': {
            'stderr': {
                'class': 'logging.StreamHandler',
                'stream': 'ext://sys.stderr',
                'formatter': 'plain',
            },
        },
        'loggers': {
            'qhier_app': {
                'handlers': ['stderr'],
                'level': (level or settings.QHIER_LOG_LEVEL).upper(),
                'propagate': False,
            },
        },
    })
