"""
Critical shifts of the base line at which the tobogganic contour flips its topology.

At a flip the curve passes through x = 0, which for kappa = 2M+1 reduces to

    {1 + [i(s - i*eps)]^2}^kappa = 1,

one relation per m = 1..M. The closed form is evaluated in extended precision so that the
table can be printed to 20 significant digits.
"""
import logging
import math
from functools import lru_cache
from typing import List, NamedTuple, Optional, Tuple

from mpmath import mp

from toboggan.errors import ValidationError

log = logging.getLogger(__name__)

_WORKING_DPS = 40


class CriticalShift(NamedTuple):
    M: int
    m: int
    theta: float
    A: float
    B: float
    epsilon: float
    s_abs: float
    phi: float
    epsilon_text: str

    @property
    def kappa(self) -> int:
        return 2 * self.M + 1


def _check_M(M: int):
    if not isinstance(M, int) or isinstance(M, bool) or M < 1:
        raise ValidationError(f'M must be a positive integer, got {M!r}')


def _critical_record(M: int, m: int, digits: int) -> CriticalShift:
    with mp.workdps(_WORKING_DPS):
        theta = 2 * mp.pi * m / (2 * M + 1)
        a = 2 * mp.sin(theta / 2) ** 2
        b = mp.sin(theta)
        eps = b / mp.sqrt(2 * (a + mp.sqrt(a * a + b * b)))
        s_abs = b / (2 * eps)
        phi = mp.atan(eps / s_abs)
        text = mp.nstr(eps, digits, min_fixed=-mp.inf, max_fixed=mp.inf)
        return CriticalShift(M=M, m=m, theta=float(theta), A=float(a), B=float(b),
                             epsilon=float(eps), s_abs=float(s_abs), phi=float(phi),
                             epsilon_text=text)


@lru_cache(maxsize=None)
def _table(M: int, digits: int) -> Tuple[CriticalShift, ...]:
    records = [_critical_record(M, m, digits) for m in range(1, M + 1)]
    # stable: equal shifts keep their m order
    return tuple(sorted(records, key=lambda record: record.epsilon))


def critical_table(M: int, digits: int = 20) -> List[CriticalShift]:
    """All M critical shifts for kappa = 2M+1, sorted by ascending epsilon."""
    _check_M(M)
    return list(_table(M, digits))


def critical_value(M: int, j: int) -> float:
    """The j-th smallest critical shift (1-based) for kappa = 2M+1."""
    table = critical_table(M)
    if not 1 <= j <= len(table):
        raise ValidationError(f'critical index j={j} outside 1..{len(table)} for M={M}')
    return table[j - 1].epsilon


def phi_closed_form(M: int, m: int) -> float:
    return (2 * (M - m) + 1) * math.pi / (4 * (2 * M + 1))


def flip_residual(shift: CriticalShift) -> float:
    base = 1 + (1j * complex(shift.s_abs, -shift.epsilon)) ** 2
    return abs(base ** shift.kappa - 1)


def nearest_critical(kappa: int, epsilon: float) -> Tuple[Optional[CriticalShift], float]:
    if kappa < 1 or kappa % 2 == 0:
        raise ValidationError(f'kappa must be an odd positive integer, got {kappa}')
    M = (kappa - 1) // 2
    if M == 0:
        return None, math.inf
    nearest = min(critical_table(M), key=lambda record: abs(epsilon - record.epsilon))
    distance = abs(epsilon - nearest.epsilon)
    log.debug('nearest critical shift for kappa=%d eps=%r: m=%d at distance %.3g',
              kappa, epsilon, nearest.m, distance)
    return nearest, distance


def critical_rows(table: List[CriticalShift]) -> List[List[str]]:
    rows = [['M', 'm', 'B', 'epsilon', 's_abs', 'phi']]
    for record in table:
        rows.append([str(record.M), str(record.m), repr(record.B), record.epsilon_text,
                     repr(record.s_abs), repr(record.phi)])
    return rows
