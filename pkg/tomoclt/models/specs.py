import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from typing_extensions import Self

from tomoclt.errors import ConfigError, InvalidParameterError


class NormalizationMode(enum.Enum):
    """Tratamiento de los conteos nulos antes del logaritmo"""

    ADD_ONE = 'add_one'    # (N1) sumar uno siempre
    MAX_ONE = 'max_one'    # (N2) reemplazar cero por uno
    RESAMPLE = 'resample'  # (N3) repetir hasta obtener un conteo positivo

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace('-', '_')
        aliases = {
            'addone': 'add_one', 'n1': 'add_one',
            'maxone': 'max_one', 'n2': 'max_one',
            'n3': 'resample',
        }
        key = aliases.get(key, key)
        for mode in cls:
            if mode.value == key:
                return mode
        raise InvalidParameterError(f'modo de normalización desconocido: {value!r}')

    @property
    def uses_shifted_denominator(self):
        """MaxOne y Resample usan N e^{-X} + e^{-Np} en lugar de N e^{-X} + 1"""
        return self is not NormalizationMode.ADD_ONE


@dataclass(frozen=True)
class CorrectionSpec:
    """Parámetros (a, b) de las correcciones del estadístico Z"""

    a: int = 1
    b: int = 0
    mode: NormalizationMode = NormalizationMode.ADD_ONE

    def __post_init__(self):
        if int(self.a) != self.a or self.a < 1:
            raise InvalidParameterError(f'a debe ser un entero >= 1: {self.a}')
        if int(self.b) != self.b or self.b < 0:
            raise InvalidParameterError(f'b debe ser un entero >= 0: {self.b}')

    def kappa(self):
        """kappa = min(a, 2b + 1) para AddOne; kappa = a para MaxOne/Resample"""
        if self.mode is NormalizationMode.ADD_ONE:
            return min(self.a, 2 * self.b + 1)
        return self.a

    def with_mode(self, mode):
        return CorrectionSpec(self.a, self.b, NormalizationMode.parse(mode))

    def to_dict(self):
        return {'a': self.a, 'b': self.b, 'mode': self.mode.value, 'kappa': self.kappa()}


@dataclass(frozen=True)
class BerryEsseenReport:
    """Parámetros de Berry-Esseen de <W_{n,m,N}f, g> y cotas asociadas"""

    sigma2: float
    L: float
    raw_bound: float
    composite_bound: float
    asymptotic_variance: float
    kappa: int = 1
    constant: float = 1.0
    composite_terms: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


DEFAULT_TEST_FUNCTION = {'s_lo': 0.1, 's_hi': 0.9, 'q': 2, 'c0': 1.0, 'c1': 0.5, 'c2': 0.25}

DEFAULT_THRESHOLDS = {'ks': 0.05, 'dkw_alpha': 0.01, 'lln_slope': [-0.6, -0.4]}

# doses = 'schedule': N = ceil((nm)^{1/(kappa - kappa_offset)}) por grilla
SCHEDULE = 'schedule'


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


def _positive_int(value, name):
    _require(isinstance(value, int) and not isinstance(value, bool) and value >= 1,
             f'{name} debe ser un entero >= 1 (recibido {value!r})')
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuración completa de un experimento Monte Carlo"""

    phantom: dict
    grids: tuple
    doses: tuple
    spec: CorrectionSpec
    test_function: dict = field(default_factory=lambda: dict(DEFAULT_TEST_FUNCTION))
    replicates: int = 200
    seed: int = 20240611
    output: Optional[str] = None
    kappa_offset: float = 0.5
    sampler: str = 'direct'
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))

    @classmethod
    def from_dict(cls, data) -> Self:
        """Valida y construye la configuración; cualquier falla es ConfigError"""
        _require(isinstance(data, dict), 'la configuración debe ser un objeto JSON')
        unknown = set(data) - {
            'phantom', 'grids', 'doses', 'spec', 'test_function', 'replicates',
            'seed', 'output', 'kappa_offset', 'sampler', 'thresholds',
        }
        _require(not unknown, f'claves desconocidas: {sorted(unknown)}')

        phantom = data.get('phantom')
        _require(isinstance(phantom, dict) and 'kind' in phantom,
                 'phantom debe ser un registro {kind: ..., parámetros}')

        grids = data.get('grids')
        _require(isinstance(grids, list) and grids, 'grids debe ser una lista no vacía de [n, m]')
        parsed_grids = []
        for item in grids:
            _require(isinstance(item, (list, tuple)) and len(item) == 2,
                     f'cada grilla debe ser [n, m] (recibido {item!r})')
            parsed_grids.append((_positive_int(item[0], 'n'), _positive_int(item[1], 'm')))

        doses = data.get('doses')
        if doses == SCHEDULE:
            parsed_doses = SCHEDULE
        else:
            _require(isinstance(doses, list) and doses,
                     f"doses debe ser una lista no vacía de N o '{SCHEDULE}'")
            parsed_doses = tuple(_positive_int(N, 'N') for N in doses)

        raw_spec = data.get('spec', {})
        _require(isinstance(raw_spec, dict), 'spec debe ser {a, b, mode}')
        try:
            spec = CorrectionSpec(
                a=raw_spec.get('a', 1),
                b=raw_spec.get('b', 0),
                mode=NormalizationMode.parse(raw_spec.get('mode', 'add_one')),
            )
        except InvalidParameterError as e:
            raise ConfigError(f'spec inválida: {e.message}') from e

        test_function = dict(DEFAULT_TEST_FUNCTION)
        raw_tf = data.get('test_function', {})
        _require(isinstance(raw_tf, dict), 'test_function debe ser un objeto')
        unknown_tf = set(raw_tf) - set(DEFAULT_TEST_FUNCTION)
        _require(not unknown_tf, f'parámetros de test_function desconocidos: {sorted(unknown_tf)}')
        test_function.update(raw_tf)
        _require(0.0 < test_function['s_lo'] < test_function['s_hi'] < 1.0,
                 'test_function requiere 0 < s_lo < s_hi < 1')
        _positive_int(test_function['q'], 'test_function.q')

        replicates = _positive_int(data.get('replicates', 200), 'replicates')
        seed = data.get('seed', 20240611)
        _require(isinstance(seed, int) and not isinstance(seed, bool) and 0 <= seed < 2 ** 64,
                 'seed debe ser un entero en [0, 2^64)')

        kappa_offset = data.get('kappa_offset', 0.5)
        _require(isinstance(kappa_offset, (int, float)) and 0.0 <= kappa_offset < spec.kappa(),
                 'kappa_offset debe estar en [0, kappa)')

        sampler = data.get('sampler', 'direct')
        _require(sampler in ('direct', 'thinned'), "sampler debe ser 'direct' o 'thinned'")

        thresholds = dict(DEFAULT_THRESHOLDS)
        raw_thr = data.get('thresholds', {})
        _require(isinstance(raw_thr, dict), 'thresholds debe ser un objeto')
        thresholds.update(raw_thr)
        _require(0.0 < thresholds['dkw_alpha'] < 1.0, 'thresholds.dkw_alpha debe estar en (0, 1)')

        output = data.get('output')
        _require(output is None or isinstance(output, str), 'output debe ser una ruta')

        return cls(
            phantom=dict(phantom),
            grids=tuple(parsed_grids),
            doses=parsed_doses,
            spec=spec,
            test_function=test_function,
            replicates=replicates,
            seed=seed,
            output=output,
            kappa_offset=float(kappa_offset),
            sampler=sampler,
            thresholds=thresholds,
        )

    def replace(self, **changes):
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return ExperimentConfig(**values)

    def to_dict(self):
        return {
            'phantom': self.phantom,
            'grids': [list(g) for g in self.grids],
            'doses': self.doses if self.doses == SCHEDULE else list(self.doses),
            'spec': self.spec.to_dict(),
            'test_function': self.test_function,
            'replicates': self.replicates,
            'seed': self.seed,
            'output': self.output,
            'kappa_offset': self.kappa_offset,
            'sampler': self.sampler,
            'thresholds': self.thresholds,
        }


@dataclass
class ExperimentResult:
    """Tabla de resultados: una fila por configuración (n, m, N, modo, ...)"""

    name: str
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    config: Optional[ExperimentConfig] = None

    def add_row(self, **values):
        missing = [c for c in self.columns if c not in values]
        if missing:
            raise InvalidParameterError(f'fila incompleta, faltan columnas: {missing}')
        self.rows.append({c: values[c] for c in self.columns})

    def column(self, name):
        return [row[name] for row in self.rows]

    def to_dict(self):
        return {
            'name': self.name,
            'columns': list(self.columns),
            'rows': self.rows,
            'summary': self.summary,
            'config': self.config.to_dict() if self.config else None,
        }


def standard_error(values):
    """Error estándar de la media; None si hay una sola réplica"""
    n = len(values)
    if n < 2:
        return None
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return math.sqrt(var / n)
