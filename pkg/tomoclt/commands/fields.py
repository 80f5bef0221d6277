from tomoclt.commands import output_dir, quadrature_options, resolve_config
from tomoclt.discretization import discretize_transform, make_grid
from tomoclt.experiments import EXPERIMENT_CODES, doses_for
from tomoclt.models.specs import NormalizationMode
from tomoclt.observation import observe_all, simulate_counts, zero_count_cells
from tomoclt.phantoms import builtin_phantoms, phantom_from_dict
from tomoclt.utils.decorators import exit_on_error
from tomoclt.utils.helpers import format_table, json_text, matrix_csv_text, write_files
from tomoclt.utils.rng import keyed_stream

CATALOG_COLUMNS = ['name', 'kind', 'inf_bound', 'sup_bound', 'lipschitz_bound', 'closed_form']


def register(subparsers, parents):
    """Registra phantom, sinogram y simulate"""
    cmd = subparsers.add_parser('phantom', parents=parents, help='catálogo de fantomas')
    cmd.set_defaults(handler=show_catalog)

    cmd = subparsers.add_parser('sinogram', parents=parents,
                                help='exporta X_{n,m}f y un campo de conteos simulado')
    cmd.set_defaults(handler=export_sinogram)

    cmd = subparsers.add_parser('simulate', parents=parents,
                                help='exporta los campos de observación de los tres modos')
    cmd.set_defaults(handler=export_observations)


@exit_on_error
def show_catalog(args, app):
    """Imprime el catálogo con cotas y disponibilidad de forma cerrada"""
    rows = [phantom.to_dict() for phantom in builtin_phantoms().values()]
    print(format_table(CATALOG_COLUMNS, rows, width=16))
    return 0


def _simulated_counts(cfg, app):
    phantom = phantom_from_dict(cfg.phantom)
    n, m = cfg.grids[0]
    N = doses_for(cfg, n, m)[0]
    xfield = discretize_transform(phantom, make_grid(n, m), quadrature_options(app)['quad_order'])
    rng = keyed_stream(cfg.seed, EXPERIMENT_CODES['sinogram'], 0)
    counts = simulate_counts(xfield, N, rng, cfg.sampler)
    sidecar = {
        'phantom': phantom.name,
        'grid': xfield.grid.to_dict(),
        'N': N,
        'seed': cfg.seed,
        'stream': f"{EXPERIMENT_CODES['sinogram']}.0",
        'sampler': cfg.sampler,
    }
    return xfield, counts, rng, sidecar


@exit_on_error
def export_sinogram(args, app):
    """X_{n,m}f y un CountField en la primera grilla y la primera dosis"""
    cfg = resolve_config(args, app)
    out = output_dir(args, cfg, app)
    xfield, counts, _, sidecar = _simulated_counts(cfg, app)
    files = {
        'sinogram_X.csv': matrix_csv_text(xfield.values),
        'sinogram_counts.csv': matrix_csv_text(counts.counts),
    }
    sidecar['files'] = sorted(files)
    files['sinogram.json'] = json_text(sidecar)
    write_files(out, files)
    app.logger.info('Sinograma %sx%s escrito en %s', counts.grid.n, counts.grid.m, out)
    print(f"sinogram n={counts.grid.n} m={counts.grid.m} N={counts.N} "
          f"zero_cells={zero_count_cells(counts)} out={out}")
    return 0


@exit_on_error
def export_observations(args, app):
    """Campos Y de los tres modos sobre el mismo sorteo de conteos"""
    cfg = resolve_config(args, app)
    out = output_dir(args, cfg, app)
    _, counts, rng, sidecar = _simulated_counts(cfg, app)
    fields = observe_all(counts, rng)
    files = {f'Y_{mode.value}.csv': matrix_csv_text(fields[mode].values) for mode in NormalizationMode}
    sidecar['modes'] = [mode.value for mode in NormalizationMode]
    sidecar['zero_cells'] = zero_count_cells(counts)
    sidecar['files'] = sorted(files)
    files['simulate.json'] = json_text(sidecar)
    write_files(out, files)
    app.logger.info('Campos de observación escritos en %s', out)
    print(f"simulate modes={','.join(sidecar['modes'])} zero_cells={sidecar['zero_cells']} out={out}")
    return 0
