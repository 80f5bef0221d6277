import logging
import os
from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()

basedir = os.path.abspath(os.path.dirname(__file__))

logger = logging.getLogger(__name__)


def _env_int(name, default, minimum=1):
    """Lee un entero positivo del entorno, con fallback al valor por defecto"""
    raw = os.environ.get(name)
    if raw is None or raw == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning('%s inválido (%r), usando %s', name, raw, default)
        return default
    if value < minimum:
        logger.warning('%s debe ser >= %s (recibido %s), usando %s', name, minimum, value, default)
        return default
    return value


def _env_float(name, default):
    """Lee un real positivo del entorno, con fallback al valor por defecto"""
    raw = os.environ.get(name)
    if raw is None or raw == '':
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning('%s inválido (%r), usando %s', name, raw, default)
        return default
    if not value > 0:
        logger.warning('%s debe ser positivo (recibido %s), usando %s', name, value, default)
        return default
    return value


class Config:
    """Configuración base del proceso"""

    # Paralelismo: nunca cambia los resultados, solo el tiempo de cómputo
    WORKERS = _env_int('TOMOCLT_WORKERS', 1)

    # Directorio de salida por defecto
    OUTPUT_DIR = os.environ.get('TOMOCLT_OUTPUT_DIR') or os.path.join(os.getcwd(), 'resultados')

    # Cuadraturas de Gauss-Legendre
    QUAD_ORDER = _env_int('TOMOCLT_QUAD_ORDER', 32, minimum=2)
    CELL_QUAD_ORDER = _env_int('TOMOCLT_CELL_QUAD_ORDER', 8, minimum=2)

    # Constante C de la cota compuesta de Berry-Esseen (solo se reporta)
    BE_CONSTANT = _env_float('TOMOCLT_BE_CONSTANT', 1.0)

    LOG_LEVEL = os.environ.get('TOMOCLT_LOG_LEVEL', 'INFO').upper()

    # Archivo de configuración de ejemplo
    EXAMPLE_CONFIG = os.path.join(basedir, '..', 'config', 'example.json')

    TESTING = False

    @classmethod
    def to_dict(cls):
        """Configuración resuelta como diccionario"""
        return {
            key: getattr(cls, key)
            for key in dir(cls)
            if key.isupper()
        }


class DevelopmentConfig(Config):
    """Configuración para desarrollo"""
    LOG_LEVEL = os.environ.get('TOMOCLT_LOG_LEVEL', 'DEBUG').upper()


class TestingConfig(Config):
    """Configuración para la suite de pruebas"""
    TESTING = True
    WORKERS = 1
    LOG_LEVEL = 'WARNING'


class ProductionConfig(Config):
    """Configuración para corridas largas en servidor"""
    LOG_LEVEL = os.environ.get('TOMOCLT_LOG_LEVEL', 'INFO').upper()


# Configuración por defecto
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': Config
}
