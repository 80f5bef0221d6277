from functools import partial

from tomoclt.commands import output_dir, quadrature_options, resolve_config
from tomoclt.experiments import EXPERIMENTS, write_result
from tomoclt.utils.decorators import exit_on_error
from tomoclt.utils.helpers import format_table

HELP = {
    'lln': 'ley de grandes números: E||Y - X|| frente a N',
    'clt': 'TCL corregido: prueba KS de <Z, g>',
    'be': 'Berry-Esseen: distancia empírica frente a 0.5583 L',
    'variance': 'convergencia de sigma^2 a la varianza asintótica',
    'modes': 'comparación de las normalizaciones AddOne, MaxOne y Resample',
}

# Columnas del resumen en consola
SUMMARY_COLUMNS = {
    'lln': ['n', 'm', 'N', 'mode', 'mean_norm', 'se', 'slope'],
    'clt': ['n', 'm', 'N', 'mode', 'mean', 'se', 'ks', 'ks_pass', 'bias_oracle'],
    'be': ['n', 'm', 'N', 'L', 'raw_bound', 'empirical_distance', 'within_bound'],
    'variance': ['n', 'm', 'N', 'sigma2', 'error', 'ratio'],
    'modes': ['n', 'm', 'N', 'mode', 'correction', 'mean', 'predicted_mean', 'ks'],
}


def register(subparsers, parents):
    for name in EXPERIMENTS:
        cmd = subparsers.add_parser(name, parents=parents, help=HELP[name])
        cmd.set_defaults(handler=partial(run_experiment, name))


@exit_on_error
def run_experiment(name, args, app):
    """Valida la configuración, corre el experimento y escribe CSV + manifiesto"""
    cfg = resolve_config(args, app)
    out = output_dir(args, cfg, app)
    options = dict(quadrature_options(app), workers=app.get('WORKERS'))
    if name == 'be':
        options['constant'] = app.get('BE_CONSTANT')
    app.logger.info('Experimento %s (seed=%s, workers=%s)', name, cfg.seed, options['workers'])
    result = EXPERIMENTS[name](cfg, **options)
    csv_path, _ = write_result(result, out)
    print(format_table(SUMMARY_COLUMNS[name], result.rows))
    print(f'{name}: {len(result.rows)} filas -> {csv_path}')
    return 0
