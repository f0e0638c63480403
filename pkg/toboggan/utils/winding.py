"""
Winding descriptors: words over the letters L, R (counterclockwise turns around the left and
right branch point) and their inverses Q = L^-1, P = R^-1, plus the classification of a
traced contour by its crossings of the upward detection rays from x = -1 and x = +1.
"""
import cmath
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Dict, Iterator, List, NamedTuple, Tuple

import numpy as np

from toboggan import config
from toboggan.errors import (ContourTruncated, NonReducible, NotPTSymmetric, RayGrazing,
                             ValidationError)
from toboggan.utils.contour import Contour

log = logging.getLogger(__name__)


class Branch(Enum):
    LEFT = -1
    RIGHT = 1

    @property
    def point(self) -> float:
        return float(self.value)

    def swapped(self) -> 'Branch':
        return Branch.RIGHT if self is Branch.LEFT else Branch.LEFT


class Orientation(Enum):
    COUNTERCLOCKWISE = 1
    CLOCKWISE = -1


class Letter(NamedTuple):
    base: Branch
    orientation: Orientation

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @classmethod
    def from_symbol(cls, symbol: str) -> 'Letter':
        try:
            return _LETTERS[symbol.upper()]
        except KeyError:
            raise ValidationError(f'unknown winding letter {symbol!r}, expected one of L, Q, R, P')

    def inverse(self) -> 'Letter':
        orientation = Orientation.CLOCKWISE if self.orientation is Orientation.COUNTERCLOCKWISE \
            else Orientation.COUNTERCLOCKWISE
        return Letter(self.base, orientation)

    def swapped(self) -> 'Letter':
        return Letter(self.base.swapped(), self.orientation)


L = Letter(Branch.LEFT, Orientation.COUNTERCLOCKWISE)
Q = Letter(Branch.LEFT, Orientation.CLOCKWISE)
R = Letter(Branch.RIGHT, Orientation.COUNTERCLOCKWISE)
P = Letter(Branch.RIGHT, Orientation.CLOCKWISE)

# enumeration order
ALPHABET = (L, Q, R, P)
_SYMBOLS = {L: 'L', Q: 'Q', R: 'R', P: 'P'}
_LETTERS = {symbol: letter for letter, symbol in _SYMBOLS.items()}
EMPTY_SYMBOL = '0'


@dataclass(frozen=True)
class Word:
    letters: Tuple[Letter, ...] = ()

    @classmethod
    def parse(cls, text: str) -> 'Word':
        text = text.strip()
        if text in ('', EMPTY_SYMBOL):
            return cls()
        return cls(tuple(Letter.from_symbol(symbol) for symbol in text))

    def __str__(self) -> str:
        return ''.join(letter.symbol for letter in self.letters) or EMPTY_SYMBOL

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __add__(self, other: 'Word') -> 'Word':
        return Word(self.letters + other.letters)

    def is_reduced(self) -> bool:
        return all(b != a.inverse() for a, b in zip(self.letters, self.letters[1:]))


@dataclass(frozen=True)
class Descriptor:
    word: Word = Word()

    @property
    def N(self) -> int:
        return len(self.word) // 2

    @property
    def omega(self) -> Word:
        return Word(self.word.letters[:self.N])

    @classmethod
    def from_word(cls, word: Word) -> 'Descriptor':
        if not word.is_reduced():
            raise NotPTSymmetric(f'descriptor word {word} is not reduced')
        half, odd = divmod(len(word), 2)
        if odd or Word(word.letters[half:]) != transpose(Word(word.letters[:half])):
            raise NotPTSymmetric(f'word {word} does not split as omega + transpose(omega)')
        return cls(word)

    @classmethod
    def parse(cls, text: str) -> 'Descriptor':
        return cls.from_word(Word.parse(text))

    def __str__(self) -> str:
        return str(self.word)


def reduce(word: Word) -> Word:
    stack: List[Letter] = []
    for letter in word:
        if stack and stack[-1] == letter.inverse():
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack))


def transpose(word: Word) -> Word:
    return Word(tuple(letter.swapped() for letter in reversed(word.letters)))


def pt_symmetrize(omega: Word) -> Descriptor:
    if not omega.is_reduced():
        raise ValidationError(f'omega word {omega} must be reduced')
    rho = reduce(omega + transpose(omega))
    if len(rho) < 2 * len(omega):
        raise NonReducible(f'{omega} + transpose({omega}) collapses to {rho}')
    return Descriptor(rho)


def enumerate_omega_words(N: int) -> List[Word]:
    if N < 0:
        raise ValidationError(f'N must be non-negative, got {N}')
    words = (Word(letters) for letters in product(ALPHABET, repeat=N))
    return [word for word in words if word.is_reduced()]


def enumerate_descriptors(N: int, bound: int = config.MAX_DESCRIPTOR_HALF_LENGTH) -> List[Descriptor]:
    """All PT-symmetric descriptors of length 2N, in L, Q, R, P lexicographic order of omega."""
    if not 0 <= N <= bound:
        raise ValidationError(f'N={N} outside 0..{bound}')
    return [pt_symmetrize(omega) for omega in enumerate_omega_words(N)]


def winding_numbers(word: Word) -> Dict[Branch, int]:
    numbers = {Branch.LEFT: 0, Branch.RIGHT: 0}
    for letter in word:
        numbers[letter.base] += letter.orientation.value
    return numbers


class CrossingEvent(NamedTuple):
    position: float
    letter: Letter


def crossing_events(contour: Contour, tilt: float = 0.0,
                    tolerance: float = config.GRAZING_TOLERANCE) -> List[CrossingEvent]:
    """
    Signed crossings of the two detection rays in traversal order. The contour is read with
    the global sign that makes both tails follow +z**kappa. Position is the fractional
    sample index of the crossing.
    """
    x = contour.asymptotic_sign() * contour.x
    rotation = cmath.exp(-1j * tilt)
    events = []
    for branch in Branch:
        y = (x - branch.point) * rotation
        re, im = y.real, y.imag
        on_ray = (np.abs(re) <= tolerance * np.maximum(1.0, np.abs(y))) & (im > -tolerance)
        if np.any(on_ray):
            index = int(np.argmax(on_ray))
            raise RayGrazing(f'sample s={contour.s[index]!r} x={x[index]} lies on the '
                             f'{branch.name.lower()} detection ray (tilt={tilt})')
        changed = np.nonzero((re[:-1] > 0) != (re[1:] > 0))[0]
        for i in changed:
            t = re[i] / (re[i] - re[i + 1])
            if im[i] + t * (im[i + 1] - im[i]) <= 0:
                continue
            # leftward above the branch point is a counterclockwise turn
            orientation = Orientation.COUNTERCLOCKWISE if re[i] > 0 else Orientation.CLOCKWISE
            events.append(CrossingEvent(float(i + t), Letter(branch, orientation)))
    events.sort(key=lambda event: event.position)
    return events


def crossing_word(contour: Contour, tilt: float = config.RAY_TILT) -> Word:
    """Unreduced crossing word, retrying once on tilted rays when a sample grazes a ray."""
    try:
        events = crossing_events(contour)
    except RayGrazing as exc:
        log.warning('%s; retrying with rays tilted by %g rad', exc, tilt)
        events = crossing_events(contour, tilt=tilt)
    return Word(tuple(event.letter for event in events))


def classify_contour(contour: Contour, tilt: float = config.RAY_TILT) -> Descriptor:
    for end in (contour.x[0], contour.x[-1]):
        if abs(end.real) <= 2:
            raise ContourTruncated(f'contour end x={complex(end)} is inside |Re x| <= 2; '
                                   f'extend the traced s range')
    raw = crossing_word(contour, tilt)
    reduced = reduce(raw)
    descriptor = Descriptor.from_word(reduced)
    log.info('classified kappa=%d eps=%r: %d crossings, descriptor %s',
             contour.map.kappa, contour.line.epsilon, len(raw), descriptor)
    return descriptor
