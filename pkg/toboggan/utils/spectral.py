"""
Complex shooting for -psi'' + V(x) psi = E psi along a tobogganic contour (units hbar^2/2m = 1).

Two problem kinds share the boundary data and the matching:

* ContourProblem integrates u = psi, v = dpsi/dx along the traced contour x(s);
* RectifiedProblem integrates the Liouville-transformed unknown phi = psi * (dx/dz)^(-1/2)
  along the straight base line z = s - i*eps, where phi'' = c(s) phi with
  c = (dx/dz)^2 (V - E) - S(x; z) / 2 and S the Schwarzian derivative.

Both report solutions in the (u, v) representation so the Wronskian is the same quantity.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import newton

from toboggan import config
from toboggan.errors import (NoConvergence, OriginSingularity, PoleProximity, StepUnderflow,
                             TobogganError, ValidationError)
from toboggan.utils.contour import (BaseLine, Contour, RectificationMap, base_line_point,
                                    map_derivatives, schwarzian)

log = logging.getLogger(__name__)

State = Tuple[complex, complex]


class PotentialFamily(Enum):
    HO = 'ho'
    ICO = 'ico'
    FREE = 'free'


class End(Enum):
    LEFT = -1
    RIGHT = 1


@dataclass(frozen=True)
class PotentialSpec:
    family: PotentialFamily
    coupling: float = 0.0
    pole_tolerance: float = config.POLE_TOLERANCE

    def __post_init__(self):
        if not isinstance(self.family, PotentialFamily):
            raise ValidationError(f'unknown potential family {self.family!r}')
        if not math.isfinite(self.coupling) or self.coupling < 0:
            raise ValidationError(f'coupling must be finite and non-negative, got {self.coupling!r}')
        if self.pole_tolerance <= 0:
            raise ValidationError(f'pole tolerance must be positive, got {self.pole_tolerance!r}')

    @property
    def has_poles(self) -> bool:
        return self.family is not PotentialFamily.FREE and self.coupling != 0


@dataclass(frozen=True)
class ShootingConfig:
    s_max: float = config.SHOOTING_S_MAX
    step: float = config.SHOOTING_STEP
    match_point: float = 0.0
    bc_mode: str = 'wkb_decay'
    tol_energy: float = config.TOL_ENERGY
    max_iter: int = config.MAX_ITER
    local_tolerance: Optional[float] = config.LOCAL_TOLERANCE
    min_step: float = config.MIN_STEP
    tol_residual: float = config.TOL_RESIDUAL
    secant_offset: float = 1e-3

    def __post_init__(self):
        if self.s_max <= 0 or self.step <= 0 or self.tol_energy <= 0:
            raise ValidationError(f's_max, step and tol_energy must be positive: {self}')
        if not -self.s_max < self.match_point < self.s_max:
            raise ValidationError(f'match point {self.match_point} outside (-s_max, s_max)')
        if self.bc_mode != 'wkb_decay':
            raise ValidationError(f'unsupported boundary condition mode {self.bc_mode!r}')
        if self.local_tolerance is not None and self.local_tolerance <= 0:
            raise ValidationError(f'local tolerance must be positive, got {self.local_tolerance}')
        if self.max_iter < 1 or self.secant_offset == 0:
            raise ValidationError(f'invalid secant settings: {self}')


class EigenResult(NamedTuple):
    energy: complex
    residual: float
    iterations: int
    converged: bool
    seed: complex


class SolutionTrace(NamedTuple):
    s: np.ndarray
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @property
    def end(self) -> State:
        return complex(self.u[-1]), complex(self.v[-1])


def _check_poles(spec: PotentialSpec, x: complex):
    if spec.has_poles and min(abs(x - 1), abs(x + 1)) < spec.pole_tolerance:
        raise PoleProximity(f'x={x} within {spec.pole_tolerance} of a pole at +-1')


def potential_eval(spec: PotentialSpec, x: complex) -> complex:
    _check_poles(spec, x)
    if spec.family is PotentialFamily.FREE:
        return 0j
    poles = spec.coupling / (x - 1) ** 2 + spec.coupling / (x + 1) ** 2 if spec.coupling else 0
    if spec.family is PotentialFamily.HO:
        return x * x + poles
    return 1j * x ** 3 + poles


def potential_derivative(spec: PotentialSpec, x: complex) -> complex:
    _check_poles(spec, x)
    if spec.family is PotentialFamily.FREE:
        return 0j
    poles = -2 * spec.coupling / (x - 1) ** 3 - 2 * spec.coupling / (x + 1) ** 3 \
        if spec.coupling else 0
    if spec.family is PotentialFamily.HO:
        return 2 * x + poles
    return 3j * x * x + poles


def transformed_rhs(rect_map: RectificationMap, line: BaseLine, spec: PotentialSpec, s: float,
                    energy: complex, branch: Optional[Contour] = None) -> complex:
    """
    Coefficient c(s) of phi'' = c phi on the straight line. The Schwarzian and even potentials
    do not depend on the sign of x; for the others pass the traced contour as branch.
    """
    z = base_line_point(line, s)
    if branch is not None:
        x = branch.evaluate(s)[0]
    else:
        x = -1j * cmath.sqrt((1 - z * z) ** rect_map.kappa - 1)
    if x == 0:
        raise OriginSingularity(f'transformed equation undefined at x = 0 (s = {s})')
    x1 = map_derivatives(rect_map, z, x)[0]
    return x1 * x1 * (potential_eval(spec, x) - energy) - 0.5 * schwarzian(rect_map, z, x)


def _rk4_step(rhs: Callable[[float, State], State], s: float, y: State, h: float) -> State:
    u, v = y
    k1u, k1v = rhs(s, y)
    k2u, k2v = rhs(s + 0.5 * h, (u + 0.5 * h * k1u, v + 0.5 * h * k1v))
    k3u, k3v = rhs(s + 0.5 * h, (u + 0.5 * h * k2u, v + 0.5 * h * k2v))
    k4u, k4v = rhs(s + h, (u + h * k3u, v + h * k3v))
    return (u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u),
            v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v))


def _integrate(rhs: Callable[[float, State], State], s_start: float, s_end: float, y: State,
               shooting: ShootingConfig) -> Tuple[List[float], List[State]]:
    """Classic RK4 from s_start to s_end; step halving against two half steps unless fixed-step."""
    span = s_end - s_start
    if shooting.local_tolerance is None:
        n = max(1, math.ceil(abs(span) / shooting.step - 1e-9))
        h = span / n
        points, states = [s_start], [y]
        for k in range(1, n + 1):
            y = _rk4_step(rhs, points[-1], y, h)
            points.append(s_start + k * h if k < n else s_end)
            states.append(y)
        return points, states

    direction = 1.0 if span > 0 else -1.0
    h = direction * shooting.step
    s = s_start
    points, states = [s], [y]
    halvings = 0
    while s != s_end:
        remaining = s_end - s
        last = abs(h) >= abs(remaining)
        step = remaining if last else h
        full = _rk4_step(rhs, s, y, step)
        middle = _rk4_step(rhs, s, y, 0.5 * step)
        half = _rk4_step(rhs, s + 0.5 * step, middle, 0.5 * step)
        scale = abs(half[0]) + abs(half[1]) or 1.0
        error = (abs(full[0] - half[0]) + abs(full[1] - half[1])) / scale
        if error > shooting.local_tolerance:
            h = 0.5 * step
            halvings += 1
            if abs(h) < shooting.min_step:
                raise StepUnderflow(f'local tolerance {shooting.local_tolerance} unreachable at '
                                    f's={s!r} with step {h!r}')
            continue
        s = s_end if last else s + step
        y = half
        points.append(s)
        states.append(y)
        if error < shooting.local_tolerance / 32 and abs(h) < shooting.step:
            h = direction * min(2 * abs(h), shooting.step)
    log.debug('integrated s=%g -> %g in %d steps, %d halvings', s_start, s_end, len(points) - 1,
              halvings)
    return points, states


class ShootingProblem:
    """Two-sided shooting on a traced contour; subclasses choose the integrated representation."""

    def __init__(self, contour: Contour):
        self.contour = contour

    def _check_range(self, shooting: ShootingConfig):
        if shooting.s_max > min(-self.contour.s_min, self.contour.s_max):
            raise ValidationError(f's_max={shooting.s_max} exceeds the traced range '
                                  f'[{self.contour.s_min}, {self.contour.s_max}]')

    def _tail_momentum(self, spec: PotentialSpec, shooting: ShootingConfig, energy: complex,
                       from_end: End) -> Tuple[complex, complex, complex]:
        x, dxdz = self.contour.evaluate(from_end.value * shooting.s_max)
        p = cmath.sqrt(potential_eval(spec, x) - energy)
        if p == 0:
            raise ValidationError(f'no decaying WKB data at x={x} for E={energy}')
        if (p * dxdz * from_end.value).real < 0:
            p = -p
        return x, dxdz, p

    def boundary_data(self, spec: PotentialSpec, shooting: ShootingConfig, energy: complex,
                      from_end: End) -> State:
        """WKB data psi'/psi = -p - V'/(4 p^2) with p = sqrt(V - E) decaying outward."""
        x, _, p = self._tail_momentum(spec, shooting, energy, from_end)
        return 1 + 0j, -p - potential_derivative(spec, x) / (4 * p * p)

    def tail_decay(self, spec: PotentialSpec, shooting: ShootingConfig, energy: complex,
                   from_end: End) -> float:
        """Share of outward WKB growth that is real decay: 1 deep in a forbidden tail, near 0 above it."""
        _, dxdz, p = self._tail_momentum(spec, shooting, energy, from_end)
        rate = p * dxdz * from_end.value
        return rate.real / abs(rate)

    def integrate(self, spec: PotentialSpec, shooting: ShootingConfig, energy: complex,
                  from_end: End, initial: Optional[State] = None) -> SolutionTrace:
        raise NotImplementedError

    def __repr__(self):
        return (f'{type(self).__name__}(kappa={self.contour.map.kappa}, '
                f'eps={self.contour.line.epsilon!r})')


class ContourProblem(ShootingProblem):
    def integrate(self, spec: PotentialSpec, shooting: ShootingConfig, energy: complex,
                  from_end: End, initial: Optional[State] = None) -> SolutionTrace:
        self._check_range(shooting)
        if spec.has_poles and self.contour.min_pole_distance() < spec.pole_tolerance:
            raise PoleProximity(f'{self} passes within {spec.pole_tolerance} of a pole')
        if initial is None:
            initial = self.boundary_data(spec, shooting, energy, from_end)
        evaluate = self.contour.evaluate

        def rhs(s: float, y: State) -> State:
            x, dxdz = evaluate(s)
            return y[1] * dxdz, (potential_eval(spec, x) - energy) * y[0] * dxdz

        points, states = _integrate(rhs, from_end.value * shooting.s_max, shooting.match_point,
                                    initial, shooting)
        x = np.array([evaluate(s)[0] for s in points])
        u, v = np.array(states).T
        return SolutionTrace(np.array(points), x, u, v)


class RectifiedProblem(ShootingProblem):
    def __init__(self, contour: Contour):
        super().__init__(contour)
        # sqrt(dx/dz) continued outward from the anchor
        roots = np.empty(len(contour), dtype=complex)
        anchor = contour.anchor_index
        roots[anchor] = cmath.sqrt(complex(contour.dxdz[anchor]))
        for order in (range(anchor + 1, len(contour)), range(anchor - 1, -1, -1)):
            previous = roots[anchor]
            for i in order:
                root = cmath.sqrt(complex(contour.dxdz[i]))
                previous = root if abs(root - previous) <= abs(root + previous) else -root
                roots[i] = previous
        self.roots = roots

    def _jacobian_root(self, s: float, dxdz: complex) -> complex:
        k = int(np.searchsorted(self.contour.s, s, side='right')) - 1
        neighbour = complex(self.roots[min(max(k, 0), len(self.roots) - 1)])
        root = cmath.sqrt(dxdz)
        return root if abs(root - neighbour) <= abs(root + neighbour) else -root

    def _frame(self, s: float) -> Tuple[complex, complex, complex, complex]:
        z = base_line_point(self.contour.line, s)
        x = self.contour.evaluate(s)[0]
        x1, x2, _ = map_derivatives(self.contour.map, z, x)
        return x, x1, x2, self._jacobian_root(s, x1)

    def to_transformed(self, s: float, y: State) -> State:
        _, x1, x2, a = self._frame(s)
        u, v = y
        return u / a, v * a - 0.5 * u * x2 / (a * x1)

    def from_transformed(self, s: float, y: State) -> State:
        _, x1, x2, a = self._frame(s)
        phi, dphi = y
        return a * phi, (a * dphi + 0.5 * x2 * phi / a) / x1

    def integrate(self, spec: PotentialSpec, shooting: ShootingConfig, energy: complex,
                  from_end: End, initial: Optional[State] = None) -> SolutionTrace:
        self._check_range(shooting)
        if initial is None:
            initial = self.boundary_data(spec, shooting, energy, from_end)
        s_start = from_end.value * shooting.s_max
        rect_map, line, contour = self.contour.map, self.contour.line, self.contour

        def rhs(s: float, y: State) -> State:
            return y[1], transformed_rhs(rect_map, line, spec, s, energy, contour) * y[0]

        points, states = _integrate(rhs, s_start, shooting.match_point,
                                    self.to_transformed(s_start, initial), shooting)
        x = np.array([contour.evaluate(s)[0] for s in points])
        u, v = np.array([self.from_transformed(s, y) for s, y in zip(points, states)]).T
        return SolutionTrace(np.array(points), x, u, v)


def integrate_along_contour(contour: Contour, spec: PotentialSpec, shooting: ShootingConfig,
                            energy: complex, from_end: End,
                            initial: Optional[State] = None) -> SolutionTrace:
    return ContourProblem(contour).integrate(spec, shooting, energy, from_end, initial)


def shoot_match(problem: ShootingProblem, spec: PotentialSpec, shooting: ShootingConfig,
                energy: complex) -> complex:
    """Normalised Wronskian of the left and right decaying solutions at the match point."""
    u_left, v_left = problem.integrate(spec, shooting, energy, End.LEFT).end
    u_right, v_right = problem.integrate(spec, shooting, energy, End.RIGHT).end
    norm = math.hypot(abs(u_left), abs(v_left)) * math.hypot(abs(u_right), abs(v_right))
    wronskian = (u_left * v_right - u_right * v_left) / norm
    log.debug('W(%s) = %s', energy, wronskian)
    return wronskian


def _solve_seed(problem: ShootingProblem, spec: PotentialSpec, shooting: ShootingConfig,
                seed: complex) -> EigenResult:
    def mismatch(energy):
        return shoot_match(problem, spec, shooting, complex(energy))

    try:
        root, status = newton(mismatch, x0=seed, x1=seed + shooting.secant_offset,
                              tol=shooting.tol_energy, rtol=0, maxiter=shooting.max_iter,
                              full_output=True, disp=False)
        root = complex(root)
        residual = abs(mismatch(root))
    except TobogganError as exc:
        log.warning('%s', NoConvergence(f'seed {seed}: {exc}'))
        return EigenResult(complex('nan+nanj'), math.inf, 0, False, seed)
    converged = bool(status.converged) and residual < shooting.tol_residual
    if converged:
        decay = min(problem.tail_decay(spec, shooting, root, end) for end in End)
        if decay < config.MIN_TAIL_DECAY:
            log.warning('%s', NoConvergence(
                f'seed {seed} reached E={root}, which is not bound at s_max={shooting.s_max} '
                f'(tail decay {decay:.3g})'))
            return EigenResult(root, residual, int(status.iterations), False, seed)
        log.info('seed %s converged to E=%s in %d iterations (|W|=%.2g)', seed, root,
                 status.iterations, residual)
    else:
        log.warning('%s', NoConvergence(f'seed {seed} stopped at E={root} with |W|={residual:.3g} '
                                        f'after {status.iterations} iterations'))
    return EigenResult(root, residual, int(status.iterations), converged, seed)


def find_eigenvalues(problem: ShootingProblem, spec: PotentialSpec, shooting: ShootingConfig,
                     seeds: Sequence[complex]) -> List[EigenResult]:
    seeds = [complex(seed) for seed in seeds]
    if len(set(seeds)) != len(seeds):
        raise ValidationError(f'seeds must be pairwise distinct: {seeds}')
    results = [_solve_seed(problem, spec, shooting, seed) for seed in seeds]

    unique: List[EigenResult] = []
    for result in results:
        if result.converged and any(other.converged and
                                    abs(other.energy - result.energy) < 10 * shooting.tol_energy
                                    for other in unique):
            continue
        unique.append(result)
    return sorted(unique, key=lambda result: (not result.converged, result.energy.real
                                              if result.converged else result.seed.real))


def cross_validate(contour: Contour, spec: PotentialSpec, shooting: ShootingConfig,
                   energy: complex, from_end: End = End.RIGHT) -> float:
    """Relative difference of psi at the match point between the two representations."""
    direct = ContourProblem(contour).integrate(spec, shooting, energy, from_end).end
    rectified = RectifiedProblem(contour).integrate(spec, shooting, energy, from_end).end
    scale = math.hypot(abs(direct[0]), abs(direct[1]))
    difference = math.hypot(abs(direct[0] - rectified[0]), abs(direct[1] - rectified[1]))
    return difference / scale


def spectrum_rows(results: Sequence[EigenResult], digits: int = config.CSV_DIGITS) -> List[List[str]]:
    rows = [['re_E', 'im_E', 'residual', 'iterations', 'converged']]
    for result in results:
        rows.append([f'{result.energy.real:.{digits}g}', f'{result.energy.imag:.{digits}g}',
                     f'{result.residual:.{digits}g}', str(result.iterations),
                     str(result.converged).lower()])
    return rows
