"""Rational enclosures of transcendental quantities.

Every value here is produced from an mpmath interval enclosure, so the
returned bounds are rigorous: ``lower <= true value <= upper``.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Callable

from mpmath import iv

from sc_forge.constants import DYADIC_BITS, INTERVAL_PREC, MAX_INTERVAL_PREC

logger = logging.getLogger(__name__)

Rational = Fraction | int


def _raw_to_fraction(raw: tuple) -> Fraction:
    sign, man, exp, _ = raw
    value = Fraction(man) * Fraction(2) ** exp
    return -value if sign else value


def _interval(x: Rational):
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


def enclose(fn: Callable, *args: Rational, prec: int = INTERVAL_PREC) -> tuple[Fraction, Fraction]:
    """Rational (lower, upper) enclosing fn(*args) evaluated in interval arithmetic"""
    saved = iv.prec
    iv.prec = prec
    try:
        value = fn(*(_interval(a) for a in args))
        lower, upper = value._mpi_
    finally:
        iv.prec = saved
    return _raw_to_fraction(lower), _raw_to_fraction(upper)


def floor_on_grid(fn: Callable, *args: Rational, bits: int = DYADIC_BITS) -> Fraction:
    """Largest multiple of 2^-bits not exceeding fn(*args)"""
    scale = 1 << bits
    prec = INTERVAL_PREC
    while True:
        lower, upper = enclose(fn, *args, prec=prec)
        low_step, high_step = math.floor(lower * scale), math.floor(upper * scale)
        if low_step == high_step:
            return Fraction(low_step, scale)
        if prec >= MAX_INTERVAL_PREC:
            logger.warning("grid rounding unresolved at %d bits; using lower step", prec)
            return Fraction(low_step, scale)
        prec *= 2


def exact_log2(x: Rational) -> int | None:
    """log2(x) when x is an integral power of two (possibly negative exponent)"""
    x = Fraction(x)
    if x <= 0:
        return None
    p, q = x.numerator, x.denominator
    if q == 1 and p & (p - 1) == 0:
        return p.bit_length() - 1
    if p == 1 and q & (q - 1) == 0:
        return -(q.bit_length() - 1)
    return None


def log2_bounds(x: Rational, bits: int = DYADIC_BITS) -> tuple[Fraction, Fraction]:
    """Dyadic (lower, upper) bounds on log2(x), exact for powers of two"""
    exact = exact_log2(x)
    if exact is not None:
        return Fraction(exact), Fraction(exact)
    scale = 1 << bits
    lower, upper = enclose(lambda v: iv.log(v) / iv.log(2), x)
    return Fraction(math.floor(lower * scale), scale), Fraction(math.ceil(upper * scale), scale)


def log2_upper(x: Rational) -> Fraction:
    return log2_bounds(x)[1]


def log2_lower(x: Rational) -> Fraction:
    return log2_bounds(x)[0]


def log2_floor(n: int) -> int:
    """⌊log2 n⌋ for a positive integer"""
    return n.bit_length() - 1
