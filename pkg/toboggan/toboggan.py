import logging
import math
import re
from typing import List, NamedTuple, Optional

from toboggan import config
from toboggan.errors import NoConvergence, ValidationError
from toboggan.utils.contour import (BaseLine, RectificationMap, SamplingPolicy, contour_document,
                                    contour_rows, trace_contour)
from toboggan.utils.critical import (CriticalShift, critical_rows, critical_table, critical_value,
                                     nearest_critical)
from toboggan.utils.read_write import (get_output_paths, read_manifest, write_csv, write_json,
                                       write_manifest)
from toboggan.utils.spectral import (ContourProblem, PotentialFamily, PotentialSpec,
                                     RectifiedProblem, ShootingConfig, find_eigenvalues,
                                     spectrum_rows)
from toboggan.utils.winding import classify_contour

log = logging.getLogger(__name__)

_CRITICAL_EXPRESSION = re.compile(
    r'^crit\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*(?:([+-])\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?))?$')


class TraceArguments(NamedTuple):
    kappa: int
    epsilon: str
    s_range: float = config.FIGURE_S_RANGE
    base_step: float = config.BASE_STEP
    max_jump: float = config.MAX_JUMP
    max_depth: int = config.MAX_DEPTH
    output: Optional[str] = None
    format: str = 'csv'


class CriticalArguments(NamedTuple):
    M: int
    output: Optional[str] = None
    format: str = 'csv'


class FigureArguments(NamedTuple):
    figure: int
    output: Optional[str] = None
    format: str = 'csv'


class SpectrumArguments(NamedTuple):
    kappa: int
    epsilon: str
    family: str
    seeds: str
    coupling: float = 0.0
    s_max: Optional[float] = None
    step: float = config.SHOOTING_STEP
    problem: str = 'contour'
    output: Optional[str] = None
    format: str = 'csv'


class Epsilon(NamedTuple):
    value: float
    expression: str
    critical: Optional[CriticalShift] = None


def parse_epsilon(text: str) -> Epsilon:
    """A literal shift or crit(M,j)+-delta relative to the j-th smallest critical shift."""
    text = text.strip()
    match = _CRITICAL_EXPRESSION.match(text)
    if match:
        M, j, sign, delta = match.groups()
        M, j = int(M), int(j)
        if not 1 <= M <= config.MAX_CRITICAL_M:
            raise ValidationError(f'M must lie in 1..{config.MAX_CRITICAL_M}, got {M}')
        base = critical_value(M, j)
        value = base + (float(delta) if sign == '+' else -float(delta)) if sign else base
        return Epsilon(value, text, critical_table(M)[j - 1])
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f'epsilon must be a number or crit(M,j)+-delta, got {text!r}')
    return Epsilon(value, text)


def parse_seeds(text: str) -> List[complex]:
    try:
        seeds = [complex(item.strip().replace('i', 'j')) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ValidationError(f'seeds must be comma-separated numbers, got {text!r}')
    if not seeds:
        raise ValidationError('at least one seed is required')
    return seeds


def default_s_max(kappa: int) -> float:
    """Half range whose ends reach |x| = SHOOTING_X_REACH, from |x|^2 ~ (s^2 - 1)^kappa + 1."""
    return math.sqrt(1 + (config.SHOOTING_X_REACH ** 2 - 1) ** (1 / kappa))


def _critical_document(record: Optional[CriticalShift]) -> Optional[dict]:
    if record is None:
        return None
    return {'M': record.M, 'm': record.m, 'epsilon': record.epsilon_text, 's_abs': record.s_abs,
            'phi': record.phi}


def _trace(kappa: int, epsilon: Epsilon, s_range: float, policy: SamplingPolicy):
    if s_range <= 0:
        raise ValidationError(f's range must be positive, got {s_range}')
    return trace_contour(RectificationMap(kappa), BaseLine(epsilon.value), -s_range, s_range, policy)


def _write_contour(contour, data_path: str, fmt: str):
    if fmt == 'csv':
        write_csv(contour_rows(contour), data_path)
    else:
        write_json(contour_document(contour), data_path)


def run_trace(arguments: TraceArguments) -> List[str]:
    epsilon = parse_epsilon(arguments.epsilon)
    policy = SamplingPolicy(arguments.base_step, arguments.max_jump, arguments.max_depth)
    contour = _trace(arguments.kappa, epsilon, arguments.s_range, policy)
    descriptor = classify_contour(contour)
    nearest, distance = nearest_critical(arguments.kappa, epsilon.value)

    print('descriptor =', descriptor)
    print('nearest critical distance =', distance)

    data_path, manifest_path = get_output_paths(
        arguments.output, f'trace_k{arguments.kappa}_e{epsilon.value!r}', arguments.format)
    _write_contour(contour, data_path, arguments.format)
    write_manifest(manifest_path, 'trace', arguments._asdict(), [data_path],
                   descriptor=str(descriptor), critical=_critical_document(epsilon.critical))
    return [data_path, manifest_path]


def run_critical(arguments: CriticalArguments) -> List[str]:
    if not 1 <= arguments.M <= config.MAX_CRITICAL_M:
        raise ValidationError(f'M must lie in 1..{config.MAX_CRITICAL_M}, got {arguments.M}')
    table = critical_table(arguments.M, config.CRITICAL_DIGITS)
    for record in table:
        print(f'M={record.M} m={record.m} epsilon={record.epsilon_text} s_abs={record.s_abs:.6g} '
              f'phi={record.phi:.6g}')

    data_path, manifest_path = get_output_paths(arguments.output, f'critical_M{arguments.M}',
                                                arguments.format)
    if arguments.format == 'csv':
        write_csv(critical_rows(table), data_path)
    else:
        write_json([_critical_document(record) for record in table], data_path)
    write_manifest(manifest_path, 'critical', arguments._asdict(), [data_path])
    return [data_path, manifest_path]


def run_figure(arguments: FigureArguments) -> List[str]:
    if arguments.figure not in config.FIGURE_PRESETS:
        raise ValidationError(f'unknown figure {arguments.figure}, expected one of '
                              f'{sorted(config.FIGURE_PRESETS)}')
    kappa, expression, caption = config.FIGURE_PRESETS[arguments.figure]
    epsilon = parse_epsilon(expression)
    contour = _trace(kappa, epsilon, config.FIGURE_S_RANGE, SamplingPolicy())
    descriptor = classify_contour(contour)
    if str(descriptor) != caption:
        log.warning('figure %d: classified %s, caption names %s', arguments.figure, descriptor,
                    caption)

    print('figure =', arguments.figure)
    print('kappa =', kappa)
    print('epsilon =', repr(epsilon.value))
    print('descriptor =', descriptor)

    data_path, manifest_path = get_output_paths(arguments.output, f'figure{arguments.figure}',
                                                arguments.format)
    _write_contour(contour, data_path, arguments.format)
    write_manifest(manifest_path, 'figure', arguments._asdict(), [data_path],
                   descriptor=str(descriptor), critical=_critical_document(epsilon.critical),
                   kappa=kappa, epsilon=epsilon.value)
    return [data_path, manifest_path]


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def run_spectrum(arguments: SpectrumArguments) -> List[str]:
    try:
        family = PotentialFamily(arguments.family.lower())
    except ValueError:
        raise ValidationError(f'unknown potential family {arguments.family!r}')
    problem_kind = {'contour': ContourProblem, 'rectified': RectifiedProblem}.get(arguments.problem)
    if problem_kind is None:
        raise ValidationError(f'unknown problem kind {arguments.problem!r}')
    epsilon = parse_epsilon(arguments.epsilon)
    spec = PotentialSpec(family, arguments.coupling)
    s_max = arguments.s_max or default_s_max(arguments.kappa)
    shooting = ShootingConfig(s_max=s_max, step=arguments.step)
    seeds = parse_seeds(arguments.seeds)

    contour = _trace(arguments.kappa, epsilon, s_max, SamplingPolicy())
    results = find_eigenvalues(problem_kind(contour), spec, shooting, seeds)
    for result in results:
        print(f'E = {result.energy.real:.12g} {result.energy.imag:+.3g}i  '
              f'|W| = {result.residual:.2g}  converged = {result.converged}')

    data_path, manifest_path = get_output_paths(
        arguments.output, f'spectrum_{family.value}_k{arguments.kappa}_e{epsilon.value!r}',
        arguments.format)
    if arguments.format == 'csv':
        write_csv(spectrum_rows(results), data_path)
    else:
        write_json([{'energy': [_finite(r.energy.real), _finite(r.energy.imag)],
                     'residual': _finite(r.residual),
                     'iterations': r.iterations, 'converged': r.converged,
                     'seed': [r.seed.real, r.seed.imag]} for r in results], data_path)
    write_manifest(manifest_path, 'spectrum', arguments._asdict(), [data_path],
                   shooting={'s_max': s_max, 'step': shooting.step,
                             'local_tolerance': shooting.local_tolerance,
                             'tol_energy': shooting.tol_energy, 'max_iter': shooting.max_iter})
    if not any(result.converged for result in results):
        raise NoConvergence(f'no seed of {seeds} converged')
    return [data_path, manifest_path]


COMMANDS = {
    'trace': (TraceArguments, run_trace),
    'critical': (CriticalArguments, run_critical),
    'figure': (FigureArguments, run_figure),
    'spectrum': (SpectrumArguments, run_spectrum),
}


def run(command: str, params: dict) -> List[str]:
    try:
        arguments_type, runner = COMMANDS[command]
    except KeyError:
        raise ValidationError(f'unknown command {command!r}')
    try:
        arguments = arguments_type(**params)
    except TypeError as exc:
        raise ValidationError(f'invalid parameters for {command}: {exc}')
    log.info('running %s with %s', command, arguments)
    return runner(arguments)


def replay(manifest_path: str, output: Optional[str] = None) -> List[str]:
    """Re-run the command recorded in a manifest, into its original data file unless overridden."""
    manifest = read_manifest(manifest_path)
    params = dict(manifest['params'])
    params['output'] = output or manifest['outputs'][0]
    return run(manifest['command'], params)
