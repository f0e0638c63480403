"""
Tobogganic contours as images of the straight line z = s - i*eps under

    x = -i * sqrt((1 - z^2)^kappa - 1),    kappa = 2M + 1.

The square root is continued along the line: every step keeps the root nearest to the
previous sample, starting from the s = 0 anchor on the negative imaginary axis where the
radicand is real and positive.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Tuple

import numpy as np

from toboggan import config
from toboggan.errors import (CriticalProximity, OriginSingularity, RefinementExhausted,
                             ValidationError)
from toboggan.utils.critical import nearest_critical

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaseLine:
    epsilon: float

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ValidationError(f'base line shift must be positive, got {self.epsilon!r}')


@dataclass(frozen=True)
class RectificationMap:
    kappa: int

    def __post_init__(self):
        if isinstance(self.kappa, bool) or not isinstance(self.kappa, int) \
                or self.kappa < 1 or self.kappa % 2 == 0:
            raise ValidationError(f'kappa must be an odd positive integer, got {self.kappa!r}')

    @property
    def M(self) -> int:
        return (self.kappa - 1) // 2


@dataclass(frozen=True)
class SamplingPolicy:
    base_step: float = config.BASE_STEP
    max_jump: float = config.MAX_JUMP
    max_depth: int = config.MAX_DEPTH
    guard: float = config.CRITICAL_GUARD

    def __post_init__(self):
        if self.base_step <= 0 or self.max_jump <= 0 or self.max_depth < 0 or self.guard < 0:
            raise ValidationError(f'invalid sampling policy {self}')


class ContourSample(NamedTuple):
    s: float
    z: complex
    x: complex
    dxdz: complex
    sheet: int


def base_line_point(line: BaseLine, s: float) -> complex:
    return complex(s, -line.epsilon)


def _radicand(kappa: int, z: complex) -> complex:
    return (1 - z * z) ** kappa - 1


def rectify_anchor(rect_map: RectificationMap, line: BaseLine) -> complex:
    return complex(0.0, -math.sqrt((1 + line.epsilon ** 2) ** rect_map.kappa - 1))


def map_derivative(rect_map: RectificationMap, z: complex, x: complex) -> complex:
    if x == 0:
        raise OriginSingularity(f'dx/dz undefined at x = 0 (z = {z})')
    k = rect_map.kappa
    return k * z * (1 - z * z) ** (k - 1) / x


def map_derivatives(rect_map: RectificationMap, z: complex, x: complex) -> Tuple[complex, complex, complex]:
    """First three z-derivatives of x(z) on the branch fixed by x, from g = x^2 = 1 - (1 - z^2)^kappa."""
    if x == 0:
        raise OriginSingularity(f'derivatives of x(z) undefined at x = 0 (z = {z})')
    k = rect_map.kappa
    w = 1 - z * z
    g1 = 2 * k * z * w ** (k - 1)
    g2 = 2 * k * w ** (k - 1)
    g3 = 0j
    if k >= 2:
        g2 -= 4 * k * (k - 1) * z * z * w ** (k - 2)
        g3 = -12 * k * (k - 1) * z * w ** (k - 2)
    if k >= 3:
        g3 += 8 * k * (k - 1) * (k - 2) * z ** 3 * w ** (k - 3)
    x1 = g1 / (2 * x)
    x2 = g2 / (2 * x) - g1 * g1 / (4 * x ** 3)
    x3 = g3 / (2 * x) - 3 * g1 * g2 / (4 * x ** 3) + 3 * g1 ** 3 / (8 * x ** 5)
    return x1, x2, x3


def schwarzian(rect_map: RectificationMap, z: complex, x: complex) -> complex:
    x1, x2, x3 = map_derivatives(rect_map, z, x)
    if x1 == 0:
        raise OriginSingularity(f'Schwarzian undefined where dx/dz = 0 (z = {z})')
    ratio = x2 / x1
    return x3 / x1 - 1.5 * ratio * ratio


class _State(NamedTuple):
    s: float
    q: complex
    x: complex
    branch: int
    sheet: int


def _local_scale(x: complex) -> float:
    return min(1 + abs(x), abs(x), abs(x - 1), abs(x + 1))


class _HalfTracer:
    def __init__(self, rect_map: RectificationMap, line: BaseLine, policy: SamplingPolicy):
        self.kappa = rect_map.kappa
        self.epsilon = line.epsilon
        self.policy = policy
        self.refinements = 0

    def step(self, previous: _State, s: float) -> _State:
        q = _radicand(self.kappa, complex(s, -self.epsilon))
        root = -1j * cmath.sqrt(q)
        if abs(root - previous.x) <= abs(root + previous.x):
            x, branch = root, 1
        else:
            x, branch = -root, -1
        sheet = previous.sheet
        if branch != previous.branch:
            # the radicand crossed the principal cut
            sheet += 1 if previous.q.imag > 0 else -1
        return _State(s, q, x, branch, sheet)

    def advance(self, states: List[_State], s_target: float, depth: int):
        previous = states[-1]
        state = self.step(previous, s_target)
        scale = min(_local_scale(previous.x), _local_scale(state.x))
        if abs(state.x - previous.x) <= self.policy.max_jump * scale:
            states.append(state)
            return
        if depth >= self.policy.max_depth:
            raise RefinementExhausted(
                f'no continuous step between s={previous.s!r} and s={s_target!r} '
                f'(x={previous.x}, eps={self.epsilon}, kappa={self.kappa})')
        self.refinements += 1
        middle = 0.5 * (previous.s + s_target)
        self.advance(states, middle, depth + 1)
        self.advance(states, s_target, depth + 1)

    def trace(self, anchor: _State, s_end: float) -> List[_State]:
        states = [anchor]
        h = self.policy.base_step
        direction = 1 if s_end > 0 else -1
        n = max(1, math.ceil(abs(s_end) / h - 1e-9))
        for k in range(1, n + 1):
            s_target = direction * (k * h) if k < n else s_end
            self.advance(states, s_target, 0)
        return states


@dataclass(frozen=True, eq=False)
class Contour:
    map: RectificationMap
    line: BaseLine
    s_min: float
    s_max: float
    s: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    dxdz: np.ndarray = field(repr=False)
    sheet: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.s)

    def __iter__(self) -> Iterator[ContourSample]:
        for i in range(len(self.s)):
            yield self[i]

    def __getitem__(self, i: int) -> ContourSample:
        return ContourSample(float(self.s[i]), complex(self.z[i]), complex(self.x[i]),
                             complex(self.dxdz[i]), int(self.sheet[i]))

    @property
    def samples(self) -> List[ContourSample]:
        return list(self)

    @property
    def anchor_index(self) -> int:
        return int(np.searchsorted(self.s, 0.0))

    def evaluate(self, s: float) -> Tuple[complex, complex]:
        """x(s) and dx/dz(s) anywhere on the traced range, on the traced branch."""
        if not self.s_min <= s <= self.s_max:
            raise ValidationError(f's={s!r} outside the traced range [{self.s_min}, {self.s_max}]')
        k = int(np.searchsorted(self.s, s, side='right')) - 1
        k = min(max(k, 0), len(self.s) - 1)
        guess = complex(self.x[k]) + complex(self.dxdz[k]) * (s - float(self.s[k]))
        z = base_line_point(self.line, s)
        root = -1j * cmath.sqrt(_radicand(self.map.kappa, z))
        x = root if abs(root - guess) <= abs(root + guess) else -root
        return x, map_derivative(self.map, z, x)

    def asymptotic_sign(self) -> int:
        """+1 when the right tail follows +z**kappa, -1 when it follows -z**kappa."""
        tail = complex(self.z[-1]) ** self.map.kappa
        return 1 if (complex(self.x[-1]) * tail.conjugate()).real > 0 else -1

    def min_pole_distance(self) -> float:
        return float(np.min(np.minimum(np.abs(self.x - 1), np.abs(self.x + 1))))


def trace_contour(rect_map: RectificationMap, line: BaseLine, s_min: float, s_max: float,
                  policy: SamplingPolicy = SamplingPolicy()) -> Contour:
    if not s_min < 0 < s_max:
        raise ValidationError(f'trace range must straddle s = 0, got [{s_min}, {s_max}]')
    nearest, distance = nearest_critical(rect_map.kappa, line.epsilon)
    if distance < policy.guard:
        raise CriticalProximity(
            f'eps={line.epsilon!r} is {distance:.3g} away from the critical shift '
            f'{nearest.epsilon_text} (M={nearest.M}, m={nearest.m}); contour topology undefined')

    anchor_z = base_line_point(line, 0.0)
    anchor = _State(0.0, _radicand(rect_map.kappa, anchor_z), rectify_anchor(rect_map, line), 1, 0)
    tracer = _HalfTracer(rect_map, line, policy)
    left = tracer.trace(anchor, s_min)
    right = tracer.trace(anchor, s_max)
    states = left[:0:-1] + right

    s = np.array([state.s for state in states])
    z = s - 1j * line.epsilon
    x = np.array([state.x for state in states])
    dxdz = np.array([map_derivative(rect_map, complex(zi), complex(xi)) for zi, xi in zip(z, x)])
    sheet = np.array([state.sheet for state in states], dtype=int)
    for array in (s, z, x, dxdz, sheet):
        array.setflags(write=False)

    log.info('traced kappa=%d eps=%r on [%g, %g]: %d samples, %d refinements, end sheets %d/%d',
             rect_map.kappa, line.epsilon, s_min, s_max, len(s), tracer.refinements,
             sheet[0], sheet[-1])
    return Contour(rect_map, line, float(s_min), float(s_max), s, z, x, dxdz, sheet)


def contour_rows(contour: Contour, digits: int = config.CSV_DIGITS) -> List[List[str]]:
    rows = [['s', 're_z', 'im_z', 're_x', 'im_x', 'sheet']]
    for sample in contour:
        rows.append([f'{sample.s:.{digits}g}', f'{sample.z.real:.{digits}g}',
                     f'{sample.z.imag:.{digits}g}', f'{sample.x.real:.{digits}g}',
                     f'{sample.x.imag:.{digits}g}', str(sample.sheet)])
    return rows


def contour_document(contour: Contour) -> dict:
    return {
        'kappa': contour.map.kappa,
        'epsilon': contour.line.epsilon,
        's_min': contour.s_min,
        's_max': contour.s_max,
        'samples': [{'s': sample.s, 'z': [sample.z.real, sample.z.imag],
                     'x': [sample.x.real, sample.x.imag], 'sheet': sample.sheet}
                    for sample in contour],
    }
