"""Línea de comandos: tomoclt <subcomando> [--config PATH] [--out DIR] [--seed U64] [--workers INT]"""

import argparse
import os

from tomoclt import __version__, create_app
from tomoclt.config import Config, config


def _u64(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f'la semilla debe estar en [0, 2^64): {text}')
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f'debe ser >= 1: {text}')
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='archivo JSON del experimento')
    common.add_argument('--out', help='directorio de salida')
    common.add_argument('--seed', type=_u64, help='reemplaza la semilla de la configuración')
    common.add_argument('--workers', type=_positive, help='procesos para las réplicas')
    common.add_argument('--log-level', dest='log_level',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], type=str.upper)

    parser = argparse.ArgumentParser(
        prog='tomoclt',
        description='Simulación y verificación estadística de conteos de fotones en tomografía',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    # Registrar subcomandos
    from tomoclt.commands.fields import register as register_fields
    register_fields(subparsers, [common])

    from tomoclt.commands.experiments import register as register_experiments
    register_experiments(subparsers, [common])

    return parser


def main(argv=None):
    """Punto de entrada; devuelve el código de salida"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    config_name = os.environ.get('TOMOCLT_ENV', 'default')
    app = create_app(
        config.get(config_name, Config),
        WORKERS=args.workers,
        LOG_LEVEL=args.log_level,
        OUTPUT_DIR=args.out,
    )
    return args.handler(args, app)
