"""Exact rational coefficients.

gmpy2.mpq is used when available (noticeably faster on the big eliminations),
with fractions.Fraction as a drop-in fallback.  Both expose .numerator /
.denominator and exact arithmetic, which is all the package relies on.
"""

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q


def rat(num, den=1):
    return Q(num, den)


ZERO = rat(0)
ONE = rat(1)


def parse_rational(text):
    """Parse '7' or '3/2' into an exact rational."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return rat(int(num), int(den))
    return rat(int(text))


def format_rational(q):
    n, d = q.numerator, q.denominator
    return str(n) if d == 1 else "%d/%d" % (n, d)
