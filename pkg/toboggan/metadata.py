"""Set metadata for toboggan"""

__title__ = 'toboggan'
__program__ = 'toboggan'
__summary__ = 'Rectification of PT-symmetric quantum toboggan contours with two branch points'
__author__ = 'Maksim "Ragarmakhis" Roschin'
__email__ = 'ragarmakhis@gmail.com'
__copyright__ = '2021-2026 Maksim Roschin'
__url__ = 'https://github.com/ragarmakhis/toboggan'
__version__ = '0.1.0'
