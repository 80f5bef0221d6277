import logging
import sys
from dataclasses import dataclass, field

from tomoclt.config import Config

__version__ = '0.3.0'

LOG_FORMAT = '[%(levelname)s] %(message)s'


@dataclass
class AppContext:
    """Configuración resuelta y logger de una invocación"""
    settings: dict
    logger: logging.Logger
    overrides: dict = field(default_factory=dict)

    def get(self, key, default=None):
        if key in self.overrides and self.overrides[key] is not None:
            return self.overrides[key]
        return self.settings.get(key, default)


def configure_logging(level='INFO'):
    """Instala un único handler en stderr con el formato [NIVEL] mensaje"""
    root = logging.getLogger('tomoclt')
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    level_value = logging.getLevelName(str(level).upper())
    if not isinstance(level_value, int):
        level_value = logging.INFO
    root.setLevel(level_value)
    root.propagate = False
    return root


def create_app(config_class=Config, **overrides):
    """Factory pattern para crear el contexto de ejecución"""
    settings = config_class.to_dict()
    level = overrides.get('LOG_LEVEL') or settings.get('LOG_LEVEL', 'INFO')
    logger = configure_logging(level)
    logger.debug('Configuración: %s', config_class.__name__)
    return AppContext(settings=settings, logger=logger, overrides=overrides)
