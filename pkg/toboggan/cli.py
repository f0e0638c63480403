import argparse
import logging
import sys
from typing import List, Optional, Tuple

from toboggan import config
from toboggan.errors import CriticalProximity, NoConvergence, TobogganError, ValidationError
from toboggan.metadata import __program__, __summary__, __version__
from toboggan.toboggan import replay, run

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_CRITICAL = 3
EXIT_NO_CONVERGENCE = 4


def _add_output(p: argparse.ArgumentParser):
    p.add_argument('-o', '--output', default=None,
                   help=f'output file or directory (default {config.OUTPUT_DIR})')
    p.add_argument('-f', '--format', choices=('csv', 'json'), default='csv')


def _add_verbose(p: argparse.ArgumentParser):
    p.add_argument('-v', '--verbose', action='count', default=0)


def get_arguments(argv: Optional[List[str]] = None) -> Tuple[str, dict, int]:
    p = argparse.ArgumentParser(prog=__program__, description=__summary__)
    p.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = p.add_subparsers(dest='command', required=True)

    trace = commands.add_parser('trace', help='trace and classify one contour')
    trace.add_argument('--kappa', type=int, required=True)
    trace.add_argument('--epsilon', required=True, help='number or crit(M,j)+-delta')
    trace.add_argument('--s-range', type=float, default=config.FIGURE_S_RANGE)
    trace.add_argument('--base-step', type=float, default=config.BASE_STEP)
    trace.add_argument('--max-jump', type=float, default=config.MAX_JUMP)
    trace.add_argument('--max-depth', type=int, default=config.MAX_DEPTH)

    critical = commands.add_parser('critical', help='table of critical shifts')
    critical.add_argument('--M', dest='M', type=int, required=True)

    figure = commands.add_parser('figure', help='reproduce a figure preset')
    figure.add_argument('figure', type=int)

    spectrum = commands.add_parser('spectrum', help='eigenvalues by complex shooting')
    spectrum.add_argument('--kappa', type=int, required=True)
    spectrum.add_argument('--epsilon', required=True)
    spectrum.add_argument('--family', choices=('ho', 'ico', 'free'), required=True)
    spectrum.add_argument('--coupling', type=float, default=0.0)
    spectrum.add_argument('--seeds', required=True, help='comma-separated, e.g. 1,3,5+0.1j')
    spectrum.add_argument('--s-max', type=float, default=None)
    spectrum.add_argument('--step', type=float, default=config.SHOOTING_STEP)
    spectrum.add_argument('--problem', choices=('contour', 'rectified'), default='contour')

    replay_parser = commands.add_parser('replay', help='re-run a command from its manifest')
    replay_parser.add_argument('manifest')
    replay_parser.add_argument('-o', '--output', default=None)
    _add_verbose(replay_parser)

    for command in (trace, critical, figure, spectrum):
        _add_output(command)
        _add_verbose(command)

    params = vars(p.parse_args(sys.argv[1:] if argv is None else argv))
    command = params.pop('command')
    verbose = params.pop('verbose')
    return command, params, verbose


def _configure_logging(verbose: int):
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')


def main(argv: Optional[List[str]] = None) -> int:
    command, params, verbose = get_arguments(argv)
    _configure_logging(verbose)
    try:
        if command == 'replay':
            outputs = replay(params['manifest'], params['output'])
        else:
            outputs = run(command, params)
    except ValidationError as exc:
        print(f'{__program__}: invalid input: {exc}', file=sys.stderr)
        return EXIT_VALIDATION
    except CriticalProximity as exc:
        print(f'{__program__}: {exc}', file=sys.stderr)
        return EXIT_CRITICAL
    except NoConvergence as exc:
        print(f'{__program__}: {exc}', file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except TobogganError as exc:
        print(f'{__program__}: {type(exc).__name__}: {exc}', file=sys.stderr)
        return EXIT_ERROR
    for path in outputs:
        log.info('wrote %s', path)
    return EXIT_OK
