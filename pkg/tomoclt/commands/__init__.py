# Subcomandos de la línea de comandos, agrupados por recurso
from tomoclt.models.specs import ExperimentConfig
from tomoclt.utils.helpers import load_json


def resolve_config(args, app):
    """Lee y valida la configuración antes de cualquier cálculo"""
    path = args.config or app.get('EXAMPLE_CONFIG')
    app.logger.debug('Leyendo configuración %s', path)
    cfg = ExperimentConfig.from_dict(load_json(path))
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def output_dir(args, cfg, app):
    return args.out or cfg.output or app.get('OUTPUT_DIR')


def quadrature_options(app):
    return {
        'quad_order': app.get('QUAD_ORDER'),
        'cell_quad_order': app.get('CELL_QUAD_ORDER'),
    }
