import csv
import io
import json
import logging
import os
import platform
import tempfile
from importlib import metadata

import numpy as np

from tomoclt.errors import ConfigError, OutputError

logger = logging.getLogger(__name__)


def format_number(value):
    """Formato de exportación: 17 cifras significativas, vacío para None"""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return '%.17g' % float(value)
    return str(value)


def write_files(directory, files):
    """
    Escribe todos los archivos de `files` (nombre -> texto) o ninguno.
    Cada archivo se prepara en un temporal del mismo directorio y solo se
    renombran cuando todos los temporales están completos.
    """
    directory = os.path.abspath(directory)
    staged = []
    placed = []
    try:
        os.makedirs(directory, exist_ok=True)
        for name, text in files.items():
            target = os.path.join(directory, name)
            if os.path.isdir(target):
                raise IsADirectoryError(f'{target} es un directorio')
            fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=name)
            staged.append((tmp_path, target))
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
        for tmp_path, target in staged:
            existed = os.path.exists(target)
            os.replace(tmp_path, target)
            if not existed:
                placed.append(target)
    except BaseException as e:
        for tmp_path, _ in staged:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
        for target in placed:
            os.remove(target)
        if isinstance(e, OSError):
            raise OutputError(f'no se pudo escribir en {directory}: {e}') from e
        raise
    for _, target in staged:
        logger.debug('Archivo escrito: %s', target)
    return [target for _, target in staged]


def csv_text(columns, rows):
    """CSV RFC 4180 con punto decimal"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\r\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row[c]) for c in columns])
    return buffer.getvalue()


def matrix_csv_text(values):
    """Matriz n x m, una fila por j"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\r\n')
    for row in np.asarray(values):
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    raise TypeError(f'no serializable: {type(value).__name__}')


def json_text(payload):
    return json.dumps(payload, indent=2, ensure_ascii=False, default=_json_default) + '\n'


def package_versions():
    """Versiones del intérprete y de la pila numérica, para el manifiesto"""
    versions = {'python': platform.python_version()}
    for name in ('numpy', 'scipy', 'tomoclt'):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    if versions['tomoclt'] is None:
        from tomoclt import __version__
        versions['tomoclt'] = __version__
    return versions


def load_json(path):
    """Lee un archivo JSON; ausencia o lectura fallida es OutputError, contenido inválido es ConfigError"""
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise OutputError(f'no se pudo leer {path}: {e}') from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f'{path}: JSON inválido ({e.msg}, línea {e.lineno})') from e


def format_table(columns, rows, width=12):
    """Tabla de texto para el resumen en consola"""
    def cell(value):
        if isinstance(value, (float, np.floating)):
            return f'{float(value):.6g}'
        return '' if value is None else str(value)

    header = ' '.join(c[:width].rjust(width) for c in columns)
    lines = [header, '-' * len(header)]
    for row in rows:
        lines.append(' '.join(cell(row[c])[:width].rjust(width) for c in columns))
    return '\n'.join(lines)
