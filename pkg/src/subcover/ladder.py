"""Geometric guess grids ``(1+eps)^i`` represented by integer exponents."""
import math


def grid_value(base, i):
    return base ** i


def floor_exp(x, base):
    """Largest ``i`` with ``base**i <= x``."""
    i = math.floor(math.log(x) / math.log(base))
    while base ** (i + 1) <= x:
        i += 1
    while base ** i > x:
        i -= 1
    return i


def ceil_exp(x, base):
    """Smallest ``i`` with ``base**i >= x``."""
    i = math.ceil(math.log(x) / math.log(base))
    while base ** (i - 1) >= x:
        i -= 1
    while base ** i < x:
        i += 1
    return i
