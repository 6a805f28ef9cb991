"""Exact degrees on the extended nonnegative reals.

Finite degrees are :class:`fractions.Fraction` values; the distinguished
infinite degree is ``math.inf``.  Python already gives the arithmetic we
need: ``Fraction(1) + math.inf == math.inf`` and ``Fraction(3) < math.inf``,
so no wrapper type is introduced.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

INF = math.inf

Degree = Fraction
ExtendedDegree = Union[Fraction, float]

ZERO = Fraction(0)


class DegreeError(ValueError):
    pass


def as_degree(value) -> Fraction:
    """Coerce ints, Fractions and degree strings to a finite nonnegative Fraction."""
    if isinstance(value, str):
        return parse_degree(value)
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            raise DegreeError(f"not a finite degree: {value!r}")
        # floats are accepted only via their shortest decimal repr
        value = Fraction(repr(value))
    d = Fraction(value)
    if d < 0:
        raise DegreeError(f"negative degree: {d}")
    return d


def parse_degree(text: str, allow_inf: bool = False) -> ExtendedDegree:
    """Parse ``0.3``, ``1/3``, ``2`` (and ``inf`` when allowed) exactly."""
    s = text.strip()
    if allow_inf and s.lower() in ("inf", "infinity", "∞"):
        return INF
    try:
        d = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DegreeError(f"malformed degree {text!r}") from exc
    if d < 0:
        raise DegreeError(f"negative degree {text!r}")
    return d


def is_inf(d: ExtendedDegree) -> bool:
    return isinstance(d, float) and math.isinf(d)


def format_degree(d: ExtendedDegree) -> str:
    """Render exactly: terminating decimals as ``0.3``, others as ``p/q``."""
    if is_inf(d):
        return "inf"
    d = Fraction(d)
    if d.denominator == 1:
        return str(d.numerator)
    den = d.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{d.numerator}/{d.denominator}"
    places = max(twos, fives)
    scaled = d * 10**places
    assert scaled.denominator == 1
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    sign = "-" if d < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def subset_sums(degrees, limit: ExtendedDegree = INF) -> set[Fraction]:
    """All sums of sub-multisets of ``degrees`` that do not exceed ``limit``."""
    sums = {ZERO}
    for d in degrees:
        d = Fraction(d)
        sums |= {s + d for s in sums if s + d <= limit}
    return sums
