"""Exact truncated power series in one variable t over the rationals.

A TruncatedSeries is a sparse map {exponent: rational} plus a precision N,
meaning the series is known modulo t^N.  precision None marks an exact
polynomial (typically a parsed input generator); every derived quantity is
materialized at an explicit finite precision before any real computation.

Conventions:
  * zero coefficients are never stored and exponents >= N are dropped,
    so equality modulo t^min(Na, Nb) is plain dict equality after truncation;
  * arithmetic propagates precision pessimistically; multiplying by a series
    of positive order shifts the reliable window accordingly and the result
    records the shifted precision (multiplication by t^k is exact to N + k);
  * values are immutable after construction and all operations are pure, so
    instances are safe to share freely.

Coefficients are exact rationals; inputs that would require algebraic field
extensions (e.g. roots of units whose constant term is not 1 after a rational
rescale) are rejected rather than approximated.
"""

import re

from .errors import BadConstantTerm, NotAUnit, OrderZeroInner
from .rationals import Q, ZERO, format_rational, parse_rational, rat

_INF = float("inf")


def _prec_min(*values):
    """Combine precisions; None acts as +infinity (exact polynomial)."""
    out = _INF
    for v in values:
        if v is not None and v < out:
            out = v
    return None if out == _INF else int(out)


class TruncatedSeries:
    __slots__ = ("_c", "_precision")

    def __init__(self, coeffs=None, precision=None):
        if precision is not None:
            precision = int(precision)
            if precision <= 0:
                raise ValueError("precision must be positive")
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                if precision is not None and e >= precision:
                    continue
                if v:
                    c[int(e)] = Q(v)
        self._c = c
        self._precision = precision

    # --- constructors ---

    @classmethod
    def zero(cls, precision=None):
        return cls({}, precision)

    @classmethod
    def one(cls, precision=None):
        return cls({0: 1}, precision)

    @classmethod
    def monomial(cls, exponent, coeff=1, precision=None):
        return cls({int(exponent): coeff}, precision)

    # --- basic inspection ---

    @property
    def precision(self):
        return self._precision

    def items(self):
        return sorted(self._c.items())

    def coefficient(self, exponent):
        return self._c.get(exponent, ZERO)

    def is_zero(self):
        """True when the series is 0 modulo t^N (or exactly 0 if exact)."""
        return not self._c

    def order(self):
        """Least exponent with nonzero coefficient, or None if indeterminate
        (the series vanishes modulo t^N, so its order is unknown or +inf)."""
        return min(self._c) if self._c else None

    def order_lower_bound(self):
        """A certain lower bound for the order: the order itself when visible,
        otherwise the precision (exact zero contributes nothing anywhere)."""
        if self._c:
            return min(self._c)
        return self._precision  # None == exactly zero, bound +inf

    def leading_coefficient(self):
        if not self._c:
            raise ValueError("zero series has no leading coefficient")
        return self._c[min(self._c)]

    def support_max(self):
        return max(self._c) if self._c else None

    # --- precision handling ---

    def truncated(self, precision):
        """The same series known only modulo t^precision."""
        p = _prec_min(self._precision, precision)
        return TruncatedSeries(self._c, p)

    def with_exact_tail_dropped(self, cutoff):
        """Drop all stored terms with exponent >= cutoff, keeping precision.

        Unlike truncated() this does not lower the precision: the caller
        asserts the dropped tail is being removed on purpose.
        """
        kept = {e: v for e, v in self._c.items() if e < cutoff}
        return TruncatedSeries(kept, self._precision)

    # --- ring operations ---

    def __add__(self, other):
        other = _coerce(other)
        p = _prec_min(self._precision, other._precision)
        c = dict(self._c)
        for e, v in other._c.items():
            w = c.get(e, ZERO) + v
            if w:
                c[e] = w
            else:
                c.pop(e, None)
        return TruncatedSeries(c, p)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return TruncatedSeries({e: -v for e, v in self._c.items()}, self._precision)

    def __sub__(self, other):
        return self.__add__(_coerce(other).__neg__())

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            q = Q(other)
            if not q:
                return TruncatedSeries({}, self._precision)
            return TruncatedSeries({e: v * q for e, v in self._c.items()},
                                   self._precision)
        # precision: the unknown tail of one factor first interferes at
        # (its precision) + (least visible exponent of the other factor)
        pa, pb = self._precision, other._precision
        va = min(self._c) if self._c else _INF
        vb = min(other._c) if other._c else _INF
        bound = _INF
        if pa is not None:
            bound = min(bound, pa + vb)
        if pb is not None:
            bound = min(bound, pb + va)
        if pa is not None and pb is not None:
            bound = min(bound, pa + pb)
        p = None if bound == _INF else int(bound)
        c = {}
        for ea, vaa in self._c.items():
            for eb, vbb in other._c.items():
                e = ea + eb
                if p is not None and e >= p:
                    continue
                w = c.get(e, ZERO) + vaa * vbb
                if w:
                    c[e] = w
                else:
                    del c[e]
        return TruncatedSeries(c, p)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = TruncatedSeries.one(self._precision)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def shifted(self, k):
        """Multiply by t^k (k may be negative if all exponents allow it)."""
        if k == 0:
            return self
        if k < 0 and any(e + k < 0 for e in self._c):
            raise ValueError("negative shift would create negative exponents")
        p = None if self._precision is None else self._precision + k
        return TruncatedSeries({e + k: v for e, v in self._c.items()}, p)

    # --- the operations the rest of the package is built on ---

    def invert_unit(self, precision=None):
        """Inverse of a unit series: requires order exactly 0."""
        if self.order() != 0:
            raise NotAUnit("series has order %r, cannot invert" % (self.order(),))
        p = _prec_min(self._precision, precision)
        if p is None:
            raise ValueError("inverting an exact polynomial needs a precision")
        f0 = self._c[0]
        inv = {0: 1 / f0}
        for e in range(1, p):
            acc = ZERO
            for j, fj in self._c.items():
                if 0 < j <= e:
                    g = inv.get(e - j)
                    if g is not None:
                        acc += fj * g
            if acc:
                inv[e] = -acc / f0
        return TruncatedSeries(inv, p)

    def nth_root_unit(self, n, precision=None):
        """The unique n-th root with constant coefficient 1.

        Binomial series in u = f - 1; characteristic zero makes the rational
        binomial coefficients well defined.  Callers rescale first so the
        constant coefficient is exactly 1.
        """
        if n <= 0:
            raise ValueError("root index must be positive")
        if self.coefficient(0) != 1:
            raise BadConstantTerm("constant coefficient must be 1, got %s"
                                  % format_rational(self.coefficient(0)))
        p = _prec_min(self._precision, precision)
        if p is None:
            if len(self._c) == 1:
                return TruncatedSeries({0: 1}, None)
            raise ValueError("rooting an exact polynomial needs a precision")
        u = (self - 1).truncated(p)
        result = TruncatedSeries.one(p)
        power = TruncatedSeries.one(p)
        binom = rat(1)
        alpha = rat(1, n)
        k = 0
        u_ord = u.order_lower_bound()
        if u_ord is None:
            return result
        while (k + 1) * u_ord < p:
            k += 1
            binom = binom * (alpha - (k - 1)) / k
            power = power * u
            if power.is_zero():
                break
            result = result + power * binom
        return result

    def substitute(self, inner, precision=None):
        """Composition self(inner(t)); requires ord(inner) >= 1."""
        if inner.order() == 0:
            raise OrderZeroInner("inner series must have positive order")
        r = inner.order_lower_bound()
        if r is None:
            # inner is 0 mod its precision; composition keeps the constant term
            r = inner._precision if inner._precision is not None else _INF
        pa = self._precision
        p = _prec_min(None if pa is None or r == _INF else pa * max(1, int(r)),
                      inner._precision, precision)
        if not self._c:
            return TruncatedSeries.zero(p)
        out = TruncatedSeries({0: self.coefficient(0)}, p)
        power = TruncatedSeries.one(p)
        last_e = 0
        for e, v in self.items():
            if e == 0:
                continue
            for _ in range(e - last_e):
                power = power * inner
                if p is not None:
                    power = power.truncated(p)
            last_e = e
            if power.is_zero():
                break
            out = out + power * v
        return out

    def derivative(self):
        """d/dt; the result is known modulo t^(N-1)."""
        p = None if self._precision is None else max(1, self._precision - 1)
        return TruncatedSeries({e - 1: v * e for e, v in self._c.items() if e > 0},
                               p)

    def reversion(self, precision=None):
        """Compositional inverse of an order-1 series, by Newton iteration."""
        if self.order() != 1:
            raise ValueError("reversion needs a series of order exactly 1")
        p = _prec_min(self._precision, precision)
        if p is None:
            raise ValueError("reversion needs an explicit precision")
        c1 = self._c[1]
        tau = TruncatedSeries({1: 1 / c1}, min(2, p))
        ident = TruncatedSeries({1: 1}, p)
        sigma = self.truncated(p)
        d_sigma = sigma.derivative()
        cur = 2
        for _ in range(64):
            if cur >= p:
                tau = tau.truncated(p)
                check = sigma.substitute(tau)
                if (check - ident).truncated(p).is_zero():
                    return tau
            cur = min(2 * cur, p)
            tau = TruncatedSeries(tau._c, cur)
            err = sigma.substitute(tau) - ident
            if not err.is_zero():
                corr = d_sigma.substitute(tau).invert_unit(cur)
                tau = tau - err * corr
                tau = tau.truncated(cur)
        raise ArithmeticError("reversion did not converge")  # pragma: no cover

    # --- comparison / rendering ---

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = _coerce(other)
        p = _prec_min(self._precision, other._precision)
        if p is None:
            return self._c == other._c
        return self.truncated(p)._c == other.truncated(p)._c

    __hash__ = None

    def __repr__(self):
        return "TruncatedSeries(%s, N=%s)" % (str(self), self._precision)

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for e, v in self.items():
            if e == 0:
                term = format_rational(v)
            else:
                tpow = "t" if e == 1 else "t^%d" % e
                if v == 1:
                    term = tpow
                elif v == -1:
                    term = "-" + tpow
                else:
                    term = "%s*%s" % (format_rational(v), tpow)
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += " - " + term[1:] if term.startswith("-") else " + " + term
        return out


def _coerce(value):
    if isinstance(value, TruncatedSeries):
        return value
    return TruncatedSeries({0: Q(value)}, None)


_TERM_RE = re.compile(
    r"""^\s*
        (?:(?P<coef>\d+(?:\s*/\s*\d+)?)\s*\*?\s*)?
        (?P<t>t(?:\s*\^\s*(?P<exp>\d+))?)?
        \s*$""",
    re.VERBOSE,
)


def parse_series(text, precision=None):
    """Parse a series literal: a signed sum of terms  c*t^e  with c rational.

    Examples: "t^4 + t^5", "1 - 1/2*t^2", "3/2*t", "7".
    The result is exact (precision None) unless a precision is passed.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty series literal")
    # split into signed terms
    terms = []
    sign = 1
    have_sign = False
    buf = []
    for ch in s:
        if ch in "+-":
            if have_sign and not "".join(buf).strip():
                raise ValueError("consecutive signs in %r" % text)
            if "".join(buf).strip():
                terms.append((sign, "".join(buf)))
            sign = 1 if ch == "+" else -1
            have_sign = True
            buf = []
        else:
            buf.append(ch)
    if not "".join(buf).strip():
        raise ValueError("trailing operator in %r" % text)
    terms.append((sign, "".join(buf)))
    coeffs = {}
    for sg, chunk in terms:
        m = _TERM_RE.match(chunk)
        if not m or (m.group("coef") is None and m.group("t") is None):
            raise ValueError("cannot parse series term %r" % chunk.strip())
        coef = parse_rational(m.group("coef").replace(" ", "")) if m.group("coef") else rat(1)
        if m.group("t"):
            e = int(m.group("exp")) if m.group("exp") else 1
        else:
            e = 0
        coeffs[e] = coeffs.get(e, ZERO) + sg * coef
    return TruncatedSeries(coeffs, precision)
