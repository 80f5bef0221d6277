"""Jerarquía de excepciones del paquete y códigos de salida asociados"""


class TomoError(Exception):
    """Error base de tomoclt"""

    exit_code = 1
    kind = 'error'

    def __init__(self, message):
        super().__init__(message)
        self.message = message


class InvalidParameterError(TomoError, ValueError):
    """Parámetro fuera del dominio de una operación"""

    exit_code = 2
    kind = 'parametro'


class GridMismatchError(InvalidParameterError):
    """Dos objetos definidos sobre grillas distintas"""

    kind = 'grilla'


class ConfigError(TomoError):
    """Archivo de configuración inválido"""

    exit_code = 2
    kind = 'config'


class NumericalError(TomoError):
    """Falla numérica durante un cálculo"""

    exit_code = 3
    kind = 'numerico'


class DegenerateVarianceError(NumericalError):
    """La varianza sigma^2 es cero, L no está definido"""

    kind = 'varianza'


class OutputError(TomoError):
    """Error de lectura o escritura de archivos"""

    exit_code = 4
    kind = 'io'
