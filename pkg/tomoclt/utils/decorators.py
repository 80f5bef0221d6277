import logging
import sys
from functools import wraps

from tomoclt.errors import InvalidParameterError, TomoError

logger = logging.getLogger(__name__)


def error_line(kind, message):
    """Línea única y parseable: error=<tipo> message=<texto>"""
    text = ' '.join(str(message).split())
    return f'error={kind} message={text}'


def exit_on_error(f):
    """Decorador para traducir las excepciones de un comando a códigos de salida"""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            result = f(*args, **kwargs)
        except TomoError as e:
            print(error_line(e.kind, e.message), file=sys.stderr)
            logger.debug('Fallo en %s', f.__name__, exc_info=True)
            return e.exit_code
        except OSError as e:
            print(error_line('io', e), file=sys.stderr)
            return 4
        return 0 if result is None else result
    return decorated_function


def requires_closed_form(f):
    """Decorador para operaciones que usan Xf exacta como oráculo"""
    @wraps(f)
    def decorated_function(phantom, *args, **kwargs):
        if not phantom.has_closed_form:
            raise InvalidParameterError(f'{phantom.name} no tiene transformada en forma cerrada')
        return f(phantom, *args, **kwargs)
    return decorated_function
