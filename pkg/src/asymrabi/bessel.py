"""Integer-order Bessel functions of the first kind.

Rows ``J_0(x) ... J_N(x)`` come from Miller's downward recurrence,
normalised with ``J_0 + 2 * sum_k J_2k = 1``. Downward recurrence is
stable for every order; the upward direction is not once ``n > |x|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["BesselRow", "bessel_j", "bessel_row", "start_order"]

_BIG = 1e250
_SMALL = 1e-250
# below this |x| one recurrence step can overflow; two series terms are exact
_TINY_X = 1e-8
# recurrence length scales with |x|; beyond this use an asymptotic method instead
MAX_ARGUMENT = 1e7


@dataclass(frozen=True)
class BesselRow:
    """Values ``J_0(argument) ... J_order_max(argument)``."""

    order_max: int
    argument: float
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        """Signed-order lookup using ``J_{-n} = (-1)^n J_n``."""
        k = abs(n)
        if k > self.order_max:
            raise IndexError(f"order {n} outside row of size {self.order_max}")
        v = float(self.values[k])
        return -v if (n < 0 and k % 2) else v


def start_order(order_max: int, x: float) -> int:
    """Even starting order for the downward recurrence.

    The recurrence must begin well above both the requested order and
    ``|x|``; the normalisation sum is only complete once the row has
    decayed past the turning point ``n ~ |x|``.
    """
    top = max(order_max, int(math.ceil(abs(x))))
    start = top + int(math.ceil(10 + 2.0 * math.sqrt(top * abs(x) + 40.0 * top)))
    return start + (start % 2)


def _check_x(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"Bessel argument must be finite, got {x!r}")
    if abs(x) > MAX_ARGUMENT:
        raise ValueError(f"Bessel argument {x!r} exceeds {MAX_ARGUMENT:g}")
    return x


def bessel_row(order_max: int, x: float) -> BesselRow:
    """Return ``J_0(x) ... J_order_max(x)`` as a :class:`BesselRow`."""
    if order_max < 0:
        raise ValueError("order_max must be >= 0")
    x = _check_x(x)
    values = np.zeros(order_max + 1)
    if x == 0.0:
        values[0] = 1.0
        return BesselRow(order_max, x, values)

    ax = abs(x)
    if ax < _TINY_X:
        q = 0.25 * x * x
        term = 1.0
        for n in range(order_max + 1):
            values[n] = term * (1.0 - q / (n + 1))
            term *= 0.5 * x / (n + 1)
            if term == 0.0:
                break
        return BesselRow(order_max, x, values)
    start = start_order(order_max, ax)
    two_over_x = 2.0 / ax

    # seed J_{start+1} = 0, J_start = tiny; rescale on overflow
    j_next, j_cur = 0.0, _SMALL
    norm = 0.0
    for k in range(start, 0, -1):
        j_prev = k * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if k - 1 <= order_max:
            values[k - 1] = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += j_cur
        if abs(j_cur) > _BIG:
            j_cur *= _SMALL
            j_next *= _SMALL
            norm *= _SMALL
            values *= _SMALL
    norm = 2.0 * norm + j_cur
    values /= norm
    if x < 0:
        values[1::2] *= -1.0
    return BesselRow(order_max, x, values)


def bessel_j(n: int, x: float) -> float:
    """``J_n(x)`` for any integer ``n`` and finite real ``x``."""
    n = int(n)
    row = bessel_row(abs(n), x)
    return row[n]
