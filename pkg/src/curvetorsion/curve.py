"""Curve rings R = k[[g_1, ..., g_n]] inside k[[t]].

analyze() builds a *staircase basis* of R modulo t^N: one monic element per
occupied valuation, each remembered as a polynomial witness in the
generators.  Everything else - value semigroup, conductor exponent, gaps,
membership with witnesses, monomialization, conductor-tail stripping,
reduced type, Cohen-Macaulay type, power containments - reads off that
staircase with exact rational arithmetic.

All objects are immutable after analyze(); operations are pure functions.
"""

import heapq
import itertools
from dataclasses import dataclass
from math import gcd

from .errors import (ConstraintInfeasible, NotACurve, NotAMember,
                     PrecisionExhausted)
from .linalg import kernel_basis
from .polys import Poly, grlex_key
from .rationals import Q, ZERO
from .series import TruncatedSeries

_HARD_DOUBLINGS = 7


# ---------------------------------------------------------------------------
# numerical semigroup bootstrap (exponents only, no series arithmetic)

def _shadow_conductor(exponents):
    """Conductor of the numerical semigroup generated by the exponents,
    or None when gcd > 1 (no conductor exists)."""
    g = 0
    for a in exponents:
        g = gcd(g, a)
    if g != 1:
        return None
    a_min, a_max = min(exponents), max(exponents)
    bound = a_min * a_max + a_max + 2
    for _ in range(8):
        reachable = [False] * (bound + 1)
        reachable[0] = True
        for v in range(1, bound + 1):
            for a in exponents:
                if v >= a and reachable[v - a]:
                    reachable[v] = True
                    break
        run = 0
        for v in range(bound + 1):
            run = run + 1 if reachable[v] else 0
            if run >= a_min:
                # a full run of a_min values means everything above is
                # reachable; the conductor follows the last gap below it
                start = v - a_min + 1
                last_gap = max((u for u in range(start) if not reachable[u]),
                               default=None)
                return 0 if last_gap is None else last_gap + 1
        bound *= 2
    raise NotACurve("semigroup of %r has no visible conductor" % (exponents,))


# ---------------------------------------------------------------------------
# staircase machinery

class StairElement:
    """A monic representative of one occupied valuation."""
    __slots__ = ("valuation", "coeffs", "witness")

    def __init__(self, valuation, coeffs, witness):
        self.valuation = valuation
        self.coeffs = coeffs          # dict exponent -> rational, monic lead
        self.witness = witness        # Poly in the generators, or None

    def series(self, precision):
        return TruncatedSeries(self.coeffs, precision)


def _dict_axpy(target, c, source):
    for e, v in source.items():
        w = target.get(e, ZERO) + c * v
        if w:
            target[e] = w
        else:
            del target[e]


def _series_dict(series, precision):
    return {e: v for e, v in series.items() if e < precision}


def reduce_by_staircase(coeffs, table, precision, skip_free=False):
    """Reduce a coefficient dict against a staircase table.

    Returns (residue, used, free): residue is what is left (support below
    `precision` only when skip_free, otherwise everything from the first
    irreducible exponent on), used maps valuation -> coefficient consumed,
    and free maps irreducible exponents -> coefficient (skip_free mode).
    """
    work = {e: v for e, v in coeffs.items() if e < precision}
    used = {}
    free = {}
    while work:
        v = min(work)
        el = table.get(v)
        if el is not None:
            c = work[v]
            _dict_axpy(work, -c, el.coeffs)
            used[v] = used.get(v, ZERO) + c
        elif skip_free:
            free[v] = work.pop(v)
        else:
            break
    return work, used, free


def _witness_from_used(used, table):
    w = None
    for v, c in used.items():
        piece = table[v].witness.scaled(c)
        w = piece if w is None else w + piece
    return w


def _closure(seed_list, generator_dicts, witness_vars, precision,
             multiply=True, with_witness=True):
    """Valuation-Gaussian closure of the span of the seeds (and, when
    multiply=True, of everything times the generators).

    seed_list: iterable of (coeff_dict, witness Poly or None).
    Returns the staircase table {valuation: StairElement}.
    Deterministic: candidates are processed by (valuation, witness key, seq).
    """
    table = {}
    heap = []
    seq = itertools.count()

    def push(coeffs, witness):
        vals = [e for e in coeffs if e < precision]
        if not vals:
            return
        v = min(vals)
        if with_witness and witness is not None and not witness.is_zero():
            key = grlex_key(witness.items()[0][0])
        else:
            key = ()
        heapq.heappush(heap, (v, key, next(seq), coeffs, witness))

    for coeffs, witness in seed_list:
        push(dict(coeffs), witness)

    while heap:
        _, _, _, coeffs, witness = heapq.heappop(heap)
        residue, used, _ = reduce_by_staircase(coeffs, table, precision)
        if not residue:
            continue
        v = min(residue)
        if with_witness:
            consumed = _witness_from_used(used, table)
            if consumed is not None:
                witness = witness - consumed
        lc = residue[v]
        inv = 1 / lc
        el = StairElement(v, {e: c * inv for e, c in residue.items()},
                          witness.scaled(inv) if with_witness else None)
        table[v] = el
        if multiply:
            for i, gd in enumerate(generator_dicts):
                prod = {}
                for e1, c1 in el.coeffs.items():
                    for e2, c2 in gd.items():
                        e = e1 + e2
                        if e >= precision:
                            continue
                        w = prod.get(e, ZERO) + c1 * c2
                        if w:
                            prod[e] = w
                        else:
                            del prod[e]
                if prod:
                    wit = el.witness.times_monomial(
                        tuple(1 if j == i else 0 for j in range(len(generator_dicts)))
                    ) if with_witness else None
                    push(prod, wit)
    return table


# ---------------------------------------------------------------------------
# public data types

@dataclass(frozen=True)
class ValueProfile:
    """Value semigroup data of a curve ring, exact below the precision."""
    occupied: tuple            # valuations < N present in R, ascending
    gaps: tuple                # complement below the conductor exponent
    conductor: int             # least c with every v >= c occupied
    reduced_type_exponents: tuple   # gap exponents in [c - a1, c - 1]
    reduced_type: int          # s = len(reduced_type_exponents)
    precision: int
    history: tuple             # ((N, conductor) per stabilization run)

    def contains(self, v):
        return v >= self.conductor or v in self._occupied_set()

    def _occupied_set(self):
        # dataclass(frozen) + lazy cache via object.__setattr__
        cached = getattr(self, "_oc", None)
        if cached is None:
            cached = set(self.occupied)
            object.__setattr__(self, "_oc", cached)
        return cached


class CurveRing:
    """An analyzed curve ring; see analyze()."""

    def __init__(self, source, precision, generators, staircase, profile,
                 name=None):
        self._source = source
        self.precision = precision
        self.generators = generators
        self.exponents = tuple(g.order() for g in generators)
        self.staircase = staircase
        self.profile = profile
        self.name = name
        self._gen_dicts = [_series_dict(g, precision) for g in generators]
        self._m2_table = None
        self._x1_table = None
        self._x1c_table = None

    # --- basics ---

    @property
    def n(self):
        return len(self.generators)

    @property
    def multiplicity(self):
        return self.exponents[0]

    @property
    def conductor(self):
        return self.profile.conductor

    def generator_series(self, precision):
        """Generators rematerialized at a (possibly higher) precision."""
        return self._source(precision)

    def at_precision(self, precision):
        """Re-analyze the same curve at an explicit working precision."""
        if precision <= self.precision:
            return self
        return analyze(self._source, precision=precision, name=self.name,
                       check_minimal=False)

    def variable_names(self):
        return ["X%d" % (i + 1) for i in range(self.n)]

    # --- membership ---

    def membership_witness(self, f, constrain_m2=False):
        """A polynomial p with p(g_1..g_n) = f modulo t^N, or raise.

        With constrain_m2=True the witness has no constant or linear part
        (ConstraintInfeasible when that is impossible although f is in R).
        """
        P = self.precision
        if f.precision is not None:
            P = min(P, f.precision)
        coeffs = _series_dict(f, P)
        if constrain_m2:
            table = self._m2_staircase()
        else:
            table = self.staircase
        residue, used, _ = reduce_by_staircase(coeffs, table, P)
        if residue:
            if constrain_m2:
                res2, _, _ = reduce_by_staircase(coeffs, self.staircase, P)
                if not res2:
                    raise ConstraintInfeasible(
                        "member, but not expressible without constant/linear "
                        "terms (residue order %d)" % min(residue))
            raise NotAMember("residue of order %d below precision %d"
                             % (min(residue), P))
        w = _witness_from_used(used, table)
        return w if w is not None else Poly.zero(self.n)

    def contains_series(self, f):
        try:
            self.membership_witness(f)
            return True
        except NotAMember:
            return False

    # --- derived staircases ---

    def _m2_staircase(self):
        if self._m2_table is None:
            n = self.n
            seeds = []
            for i in range(n):
                for j in range(i, n):
                    prod = {}
                    for e1, c1 in self._gen_dicts[i].items():
                        for e2, c2 in self._gen_dicts[j].items():
                            e = e1 + e2
                            if e >= self.precision:
                                continue
                            w = prod.get(e, ZERO) + c1 * c2
                            if w:
                                prod[e] = w
                            else:
                                del prod[e]
                    mono = [0] * n
                    mono[i] += 1
                    mono[j] += 1
                    seeds.append((prod, Poly.monomial(tuple(mono))))
            self._m2_table = _closure(seeds, self._gen_dicts, n,
                                      self.precision)
        return self._m2_table

    def _x1_staircase(self):
        """Staircase of the principal ideal (x1); valuations a1 + S."""
        if self._x1_table is None:
            a1 = self.multiplicity
            g1 = self._gen_dicts[0]
            table = {}
            for v, el in self.staircase.items():
                prod = {}
                for e1, c1 in el.coeffs.items():
                    for e2, c2 in g1.items():
                        e = e1 + e2
                        if e >= self.precision:
                            continue
                        w = prod.get(e, ZERO) + c1 * c2
                        if w:
                            prod[e] = w
                        else:
                            del prod[e]
                if prod:
                    lead = min(prod)
                    assert lead == v + a1
                    inv = 1 / prod[lead]
                    table[lead] = StairElement(
                        lead, {e: c * inv for e, c in prod.items()}, None)
            self._x1_table = table
        return self._x1_table

    def _x1_conductor_staircase(self):
        """Staircase of the ideal (x1) + conductor."""
        if self._x1c_table is None:
            seeds = [(dict(el.coeffs), None)
                     for v, el in sorted(self._x1_staircase().items())]
            c = self.conductor
            seeds += [({w: Q(1)}, None) for w in range(c, self.precision)]
            self._x1c_table = _closure(seeds, self._gen_dicts, self.n,
                                       self.precision, multiply=False,
                                       with_witness=False)
        return self._x1c_table

    def in_ideal_x1(self, f):
        P = min(self.precision, f.precision or self.precision)
        residue, _, _ = reduce_by_staircase(_series_dict(f, P),
                                            self._x1_staircase(), P)
        return not residue

    def in_ideal_x1_conductor(self, f):
        P = min(self.precision, f.precision or self.precision)
        residue, _, _ = reduce_by_staircase(_series_dict(f, P),
                                            self._x1_conductor_staircase(), P)
        return not residue

    # --- invariants ---

    def reduced_type(self):
        return self.profile.reduced_type

    def apery_set(self):
        """{w in S : w - a1 not in S}, the a1 residues of smallest value."""
        a1 = self.multiplicity
        out = [w for w in self.profile.occupied
               if w < a1 or not self.profile.contains(w - a1)]
        # every value >= conductor + a1 has w - a1 >= conductor: not Apery
        return tuple(w for w in out if w < self.conductor + a1)

    def cm_type(self):
        """dim_k ((x1) : m) / (x1), by exact linear algebra on the staircase."""
        apery = self.apery_set()
        x1t = self._x1_staircase()
        P = self.precision
        columns = []
        for w in apery:
            el = self.staircase[w]
            col = {}
            for i, gd in enumerate(self._gen_dicts):
                prod = {}
                for e1, c1 in el.coeffs.items():
                    for e2, c2 in gd.items():
                        e = e1 + e2
                        if e >= P:
                            continue
                        acc = prod.get(e, ZERO) + c1 * c2
                        if acc:
                            prod[e] = acc
                        else:
                            del prod[e]
                _, _, free = reduce_by_staircase(prod, x1t, P, skip_free=True)
                for e, cval in free.items():
                    col[i * P + e] = cval
            columns.append(col)
        return len(kernel_basis(columns, labels=list(apery)))

    def is_gorenstein(self):
        return self.cm_type() == 1

    def power_containment(self, k):
        """Decide m^k in (x1) and m^k in (x1, conductor).

        Returns a dict {"in_x1": bool, "in_x1_conductor": bool}.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        in_x1 = True
        in_x1c = True
        for combo in itertools.combinations_with_replacement(
                range(self.n), k):
            prod = TruncatedSeries.one(self.precision)
            for i in combo:
                prod = prod * self.generators[i]
            prod = prod.truncated(self.precision)
            if in_x1 and not self.in_ideal_x1(prod):
                in_x1 = False
            if in_x1c and not self.in_ideal_x1_conductor(prod):
                in_x1c = False
            if not in_x1 and not in_x1c:
                break
        return {"in_x1": in_x1, "in_x1_conductor": in_x1c}

    # --- isomorphic re-presentations ---

    def monomialized(self, r=1):
        """Rewrite in a new uniformizer so generator r is exactly t^{a_r}.

        The value profile is preserved (asserted).  1-based index.
        """
        r0 = r - 1
        if not 0 <= r0 < self.n:
            raise ValueError("generator index out of range")
        base = self._source

        def source(P):
            return monomialize_generators(base, r0, P)

        ring = analyze(source, precision=self.precision, name=self.name,
                       check_minimal=False)
        _assert_same_profile(self, ring, "monomialized")
        return ring

    def strip_conductor_tails(self, indices=None):
        """Drop generator tails that lie in the conductor.

        A generator with a_i >= c becomes the pure monomial t^{a_i}; others
        lose their terms of exponent >= c.  `indices` (1-based) restricts
        the stripping to selected generators; by default all are stripped.

        The dropped tails are conductor elements of the original ring, so
        the new ring is contained in the old one; the reverse containment
        can genuinely fail (a stripped tail may have carried a cancellation
        that fills a semigroup value), so every old generator is re-checked
        for membership in the new ring and NotAMember is raised when the
        presentation would change the ring.  Stripping one generator at a
        time, top first, is always safe when its valuation reaches the
        conductor.
        """
        c = self.conductor
        base = self._source
        chosen = set(range(self.n)) if indices is None \
            else {i - 1 for i in indices}

        def source(P):
            gens = base(P)
            out = []
            for i, g in enumerate(gens):
                if i not in chosen:
                    out.append(g)
                    continue
                a = g.order()
                cutoff = max(c, a + 1)
                stripped = g.with_exact_tail_dropped(cutoff)
                if a >= c:
                    stripped = stripped * (1 / stripped.leading_coefficient())
                out.append(stripped)
            return out

        ring = analyze(source, precision=self.precision, name=self.name,
                       check_minimal=False)
        for old, new in zip(self.generators, ring.generators):
            if not old == new:
                if not ring.contains_series(old):
                    raise NotAMember(
                        "stripping changed the ring: a dropped tail carried "
                        "a needed cancellation; strip fewer generators")
        _assert_same_profile(self, ring, "strip_conductor_tails")
        return ring

    def is_monomial_curve(self):
        return all(len(g.items()) == 1 and g.leading_coefficient() == 1
                   for g in self.generators)

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return "CurveRing(%s; N=%d, c=%d)" % (gens, self.precision,
                                              self.conductor)


def monomialize_generators(source, r0, precision):
    """Rewrite generators in the uniformizer s = beta*t chosen so that
    generator r0 (0-based) becomes exactly s^{a_r}.

    source: callable precision -> generator list, or a plain list.
    The root beta satisfies beta^{a_r} = alpha_r after rescaling the unit
    alpha_r to constant term 1 (always possible over the rationals).
    """
    source = _normalize_source(source)
    P = precision
    gens = source(P + 4)
    g = gens[r0]
    a_r = g.order()
    lam = g.leading_coefficient()
    unit = g.shifted(-a_r) * (1 / lam)
    beta = unit.nth_root_unit(a_r, P + 3)
    sigma = beta.shifted(1)          # the new uniformizer s = beta*t
    tau = sigma.reversion(P + 1)
    out = []
    for i, gi in enumerate(gens):
        if i == r0:
            out.append(TruncatedSeries.monomial(a_r, 1, P + 1))
        else:
            out.append(gi.substitute(tau, P + 1))
    # sanity: the substitution really monomializes generator r0
    check = g.substitute(tau, P + 1) * (1 / lam)
    assert check == TruncatedSeries.monomial(a_r, 1, P + 1)
    return out


def _assert_same_profile(a, b, what):
    pa, pb = a.profile, b.profile
    window = min(pa.precision, pb.precision)
    occ_a = tuple(v for v in pa.occupied if v < window)
    occ_b = tuple(v for v in pb.occupied if v < window)
    if (pa.conductor, pa.reduced_type_exponents, occ_a) != \
            (pb.conductor, pb.reduced_type_exponents, occ_b):
        raise PrecisionExhausted(
            "%s changed the value profile (c %d -> %d); raise the precision"
            % (what, pa.conductor, pb.conductor))


# ---------------------------------------------------------------------------
# analyze

def _normalize_source(generators):
    if callable(generators):
        return generators
    gen_list = list(generators)

    def source(P):
        out = []
        for g in gen_list:
            if g.precision is not None and g.precision < P:
                raise PrecisionExhausted(
                    "input series only known to t^%d, need t^%d"
                    % (g.precision, P))
            out.append(g.truncated(P))
        return out

    return source


def analyze(generators, precision=None, name=None, check_minimal=True):
    """Build the CurveRing: staircase basis, value semigroup and conductor.

    generators: a list of TruncatedSeries (exact polynomials parse to
    precision None) or a callable precision -> list of series.  Generators
    are sorted by order; all orders must be determinate and >= 1.

    The working precision is chosen automatically: a bootstrap run based on
    the conductor of the exponent semigroup (a guaranteed upper bound, since
    the value semigroup contains the additive closure of the exponents),
    confirmed by a second run at 2*c + a_n + 8; runs double until the
    conductor and the staircase below c + a_n agree twice in a row.
    """
    source = _normalize_source(generators)

    probe = source(64)
    if not probe:
        raise NotACurve("empty generator list")
    orders = [g.order() for g in probe]
    if any(o is None for o in orders):
        # orders may exceed the probe precision; look farther out
        probe = source(512)
        orders = [g.order() for g in probe]
        if any(o is None for o in orders):
            raise NotACurve("a generator vanishes to very high order")
    if any(o == 0 for o in orders):
        raise NotACurve("a generator is a unit (order 0)")

    order_of = sorted(range(len(probe)), key=lambda i: (orders[i], i))
    base = source

    def sorted_source(P):
        gens = base(P)
        return [gens[i] for i in order_of]

    exponents = sorted(orders)
    a_min, a_max = exponents[0], exponents[-1]

    if precision is not None:
        result = _analyze_at(sorted_source, precision, exponents, name,
                             history=())
        if result is None:
            raise PrecisionExhausted(
                "no conductor below the requested precision %d" % precision)
        ring = result
    else:
        shadow = _shadow_conductor(tuple(set(exponents)))
        if shadow is not None:
            N1 = shadow + a_max + 8
        else:
            N1 = 2 * (a_min + a_max) + 8
        history = []
        ring = None
        cap = max(4 * a_min * a_max + 2 * a_max + 64, 4 * N1)
        for _ in range(_HARD_DOUBLINGS):
            first = _analyze_at(sorted_source, N1, exponents, name,
                                history=tuple(history))
            if first is not None:
                ring = first
                break
            history.append((N1, None))
            N1 *= 2
            if N1 > cap:
                break
        if ring is None:
            raise PrecisionExhausted(
                "no conductor exponent found below precision %d" % cap)
        # confirmation runs: double until two consecutive agreeing profiles
        for _ in range(_HARD_DOUBLINGS):
            c = ring.conductor
            N2 = max(2 * c + a_max + 8, ring.precision)
            if N2 == ring.precision:
                break
            nxt = _analyze_at(sorted_source, N2, exponents, name,
                              history=ring.profile.history)
            if nxt is None:
                raise PrecisionExhausted("conductor unstable at %d" % N2)
            window = min(ring.conductor + a_max, ring.precision)
            stable = (nxt.conductor == ring.conductor and
                      tuple(v for v in nxt.profile.occupied if v < window) ==
                      tuple(v for v in ring.profile.occupied if v < window))
            ring = nxt
            if stable:
                break
        else:
            raise PrecisionExhausted("profile never stabilized")

    if check_minimal and ring.n >= 2:
        _check_minimality(ring)
    return ring


def _analyze_at(source, N, exponents, name, history):
    gens = source(N)
    table = _closure([({0: Q(1)}, Poly.constant(len(gens), 1))],
                     [_series_dict(g, N) for g in gens],
                     len(gens), N)
    occupied = sorted(table)
    occ_set = set(occupied)
    a_min = exponents[0]
    gaps_all = [v for v in range(N) if v not in occ_set]
    c = gaps_all[-1] + 1 if gaps_all else 0
    # need a full window of length a_min above c inside the precision
    if c + a_min + 1 > N or any(c + j not in occ_set for j in range(a_min)):
        return None
    b_list = tuple(v for v in gaps_all if c - a_min <= v <= c - 1)
    profile = ValueProfile(
        occupied=tuple(occupied),
        gaps=tuple(v for v in gaps_all),
        conductor=c,
        reduced_type_exponents=b_list,
        reduced_type=len(b_list),
        precision=N,
        history=tuple(history) + ((N, c),),
    )
    return CurveRing(source, N, gens, table, profile, name=name)


def _check_minimality(ring):
    """Reject generator lists that do not minimally generate (edim < n)."""
    for i in range(ring.n):
        if _is_redundant(ring, i):
            raise NotACurve(
                "generator %d (%s) lies in the subring generated by the "
                "others; the embedding dimension is smaller than the list"
                % (i + 1, ring.generators[i]))


def _is_redundant(ring, i):
    others = [g for j, g in enumerate(ring.generators) if j != i]
    if not others:
        return False
    target = ring.generators[i]
    # quick pass at low precision: non-membership usually shows immediately
    Nq = min(ring.precision, target.order() + 24)
    table = _closure([({0: Q(1)}, None)],
                     [_series_dict(g, Nq) for g in others],
                     len(others), Nq, with_witness=False)
    residue, _, _ = reduce_by_staircase(_series_dict(target, Nq), table, Nq)
    if residue:
        return False
    # suspicious: decide honestly with a full sub-analysis
    def sub_source(P, _i=i):
        gens = ring._source(P)
        return [g for j, g in enumerate(gens) if j != _i]

    try:
        sub = analyze(sub_source, check_minimal=False)
    except (NotACurve, PrecisionExhausted) as exc:
        raise NotACurve(
            "generator %d reduces to zero against the others up to t^%d but "
            "the subring has no usable conductor (%s); cannot certify "
            "minimality" % (i + 1, Nq, exc))
    return sub.contains_series(target.truncated(sub.precision))
