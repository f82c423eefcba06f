"""Sparse multivariate polynomials over the rationals.

Just enough structure for witness bookkeeping: monomials are exponent
tuples, coefficients exact rationals.  Used for staircase witnesses, defining
relations and their formal partial derivatives.
"""

from .rationals import Q, ZERO, format_rational
from .series import TruncatedSeries


def grlex_key(mono):
    """Graded lexicographic sort key (X1 > X2 > ...): degree, then lex."""
    return (sum(mono), tuple(-e for e in mono))


class Poly:
    __slots__ = ("nvars", "_c")

    def __init__(self, nvars, coeffs=None):
        self.nvars = nvars
        c = {}
        if coeffs:
            for m, v in coeffs.items():
                if v:
                    c[tuple(m)] = Q(v)
        self._c = c

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, index):
        m = [0] * nvars
        m[index] = 1
        return cls(nvars, {tuple(m): 1})

    @classmethod
    def monomial(cls, mono, coeff=1):
        return cls(len(mono), {tuple(mono): coeff})

    def items(self):
        return sorted(self._c.items(), key=lambda kv: grlex_key(kv[0]))

    def is_zero(self):
        return not self._c

    def coefficient(self, mono):
        return self._c.get(tuple(mono), ZERO)

    def total_degree(self):
        return max((sum(m) for m in self._c), default=0)

    def min_degree(self):
        return min((sum(m) for m in self._c), default=0)

    def __add__(self, other):
        c = dict(self._c)
        for m, v in other._c.items():
            w = c.get(m, ZERO) + v
            if w:
                c[m] = w
            else:
                del c[m]
        return Poly(self.nvars, c)

    def __neg__(self):
        return Poly(self.nvars, {m: -v for m, v in self._c.items()})

    def __sub__(self, other):
        return self.__add__(other.__neg__())

    def scaled(self, q):
        if not q:
            return Poly(self.nvars)
        return Poly(self.nvars, {m: v * q for m, v in self._c.items()})

    def times_monomial(self, mono, coeff=1):
        mono = tuple(mono)
        return Poly(self.nvars,
                    {tuple(a + b for a, b in zip(m, mono)): v * coeff
                     for m, v in self._c.items()})

    def __mul__(self, other):
        out = {}
        for m1, v1 in self._c.items():
            for m2, v2 in other._c.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                w = out.get(m, ZERO) + v1 * v2
                if w:
                    out[m] = w
                else:
                    del out[m]
        return Poly(self.nvars, out)

    def partial(self, index):
        out = {}
        for m, v in self._c.items():
            e = m[index]
            if e:
                mm = list(m)
                mm[index] = e - 1
                mm = tuple(mm)
                out[mm] = out.get(mm, ZERO) + v * e
        return Poly(self.nvars, out)

    def lifted(self, nvars):
        """The same polynomial viewed in a larger variable list (appended)."""
        if nvars < self.nvars:
            raise ValueError("cannot drop variables")
        pad = (0,) * (nvars - self.nvars)
        return Poly(nvars, {m + pad: v for m, v in self._c.items()})

    def evaluate(self, series_list):
        """Evaluate at a list of TruncatedSeries (one per variable)."""
        if len(series_list) != self.nvars:
            raise ValueError("wrong number of series")
        prec = None
        for s in series_list:
            if s.precision is not None and (prec is None or s.precision < prec):
                prec = s.precision
        total = TruncatedSeries.zero(prec)
        cache = {}
        for m, v in self.items():
            term = TruncatedSeries.one(prec)
            for i, e in enumerate(m):
                if not e:
                    continue
                key = (i, e)
                pw = cache.get(key)
                if pw is None:
                    pw = series_list[i] ** e
                    if prec is not None:
                        pw = pw.truncated(prec)
                    cache[key] = pw
                term = term * pw
            total = total + term * v
        return total

    def split_by_leading_variable(self):
        """Write the polynomial as sum_i q_i * X_i with q_i collecting each
        monomial under its smallest participating variable.  Requires every
        monomial to have positive degree."""
        parts = {}
        for m, v in self._c.items():
            idx = next((i for i, e in enumerate(m) if e > 0), None)
            if idx is None:
                raise ValueError("constant term cannot be split")
            mm = list(m)
            mm[idx] -= 1
            parts.setdefault(idx, {})[tuple(mm)] = v
        return {i: Poly(self.nvars, c) for i, c in parts.items()}

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars \
            and self._c == other._c

    __hash__ = None

    def __repr__(self):
        return "Poly(%s)" % self.format()

    def format(self, names=None):
        if not self._c:
            return "0"
        if names is None:
            names = ["X%d" % (i + 1) for i in range(self.nvars)]
        parts = []
        for m, v in self.items():
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(names[i])
                elif e > 1:
                    factors.append("%s^%d" % (names[i], e))
            if not factors:
                parts.append(format_rational(v))
                continue
            body = "*".join(factors)
            if v == 1:
                parts.append(body)
            elif v == -1:
                parts.append("-" + body)
            else:
                parts.append("%s*%s" % (format_rational(v), body))
        out = parts[0]
        for term in parts[1:]:
            out += " - " + term[1:] if term.startswith("-") else " + " + term
        return out


def monomials_of_degree(nvars, degree):
    """All exponent tuples of the given total degree, in lex order (X1 > ...)."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(nvars - 1, degree - first):
            yield (first,) + rest
