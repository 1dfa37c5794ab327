"""Exact rational scalars.

Every number in this package is a ``fractions.Fraction``: probabilities,
payoffs, LP pivots, gaps. Fractions are always stored in lowest terms with a
positive denominator, and arithmetic is exact. Floats never enter a semantic
path; the only decimal output is display-side formatting in the CLI.

Documents serialize rationals as strings "p/q" or "p".
"""

from __future__ import annotations

import re
from decimal import Decimal, localcontext
from fractions import Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/([1-9]\d*))?$")


def parse_rational(value) -> Fraction:
    """Parse "p/q" or "p" (also bare ints) into a Fraction.

    Rejects floats, decimal notation, and non-positive denominators: the
    serialized form must be unambiguous and exact.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise ValueError(f"expected rational string, got {type(value).__name__}")
    m = _RATIONAL_RE.match(value.strip())
    if not m:
        raise ValueError(f"malformed rational {value!r} (expected 'p' or 'p/q' with q > 0)")
    num, den = m.group(1), m.group(2)
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q: Fraction) -> str:
    """Canonical serialization: "p" when integral, else "p/q"."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def decimal_repr(q: Fraction, digits: int = 20) -> str:
    """Display-only decimal approximation to ``digits`` significant digits.

    Never feeds back into computation.
    """
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return str(d)
