import time

import pytest

from mfhj.exceptions import ConvergenceError
from mfhj.workers import map_ordered


def _slow_square(value: int) -> int:
    # Later items finish first.
    time.sleep(0.002 * (10 - value))
    return value * value


def test_results_keep_input_order():
    items = list(range(10))
    assert map_ordered(_slow_square, items, workers=4) == [i * i for i in items]


def test_serial_and_parallel_agree():
    items = [3, 1, 2]
    assert map_ordered(_slow_square, items, workers=1) == map_ordered(_slow_square, items, workers=3)


def test_empty_input():
    assert map_ordered(_slow_square, [], workers=4) == []


def test_first_error_is_reraised_unwrapped():
    def fail_on_three(value: int) -> int:
        if value == 3:
            raise ConvergenceError("no convergence", last_iterate=0.5, residual=1e-3)
        return value

    with pytest.raises(ConvergenceError) as info:
        map_ordered(fail_on_three, range(6), workers=3)
    assert info.value.detail["last_iterate"] == 0.5
