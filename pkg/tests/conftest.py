from functools import lru_cache

import pytest

from toboggan.utils.contour import BaseLine, RectificationMap, SamplingPolicy, trace_contour


@lru_cache(maxsize=None)
def traced(kappa: int, epsilon: float, s_range: float = 8.0, base_step: float = 0.05):
    return trace_contour(RectificationMap(kappa), BaseLine(epsilon), -s_range, s_range,
                         SamplingPolicy(base_step=base_step))


@pytest.fixture(scope='session')
def trace():
    return traced


@pytest.fixture(scope='session')
def double_circle():
    return traced(3, 0.25)


@pytest.fixture(scope='session')
def straight_line():
    return traced(1, 0.25, 10.0)
