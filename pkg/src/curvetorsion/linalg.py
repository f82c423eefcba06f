"""Sparse exact row reduction over the rationals.

Vectors are dicts {column_id: rational}; the column ids carry the intended
pivot order (smaller id = earlier pivot), so callers encode priorities such
as t-valuation directly into the ids.  Everything here is deterministic.
"""

from .rationals import Q, ZERO


def vec_scale(vec, c):
    return {k: v * c for k, v in vec.items()}


def vec_axpy(target, c, source):
    """target += c * source, dropping cancelled entries."""
    for k, v in source.items():
        w = target.get(k, ZERO) + c * v
        if w:
            target[k] = w
        else:
            target.pop(k, None)


def primitive_integer(vec, key_order=None):
    """Rescale to integer entries with content 1 and a positive lead.

    The lead is the entry at the smallest column id (or the smallest under
    key_order when given).
    """
    if not vec:
        return vec
    from math import gcd
    den = 1
    for v in vec.values():
        den = den * v.denominator // gcd(den, v.denominator)
    num = 0
    for v in vec.values():
        num = gcd(num, abs(v.numerator * (den // v.denominator)))
    lead = min(vec, key=key_order) if key_order else min(vec)
    sign = 1 if vec[lead] > 0 else -1
    scale = Q(sign * den, num)
    return {k: v * scale for k, v in vec.items()}


class Echelon:
    """A growing reduced row-echelon form with optional combination tags.

    Each stored row is normalized to pivot coefficient 1 and fully reduced
    against the other rows, so reducing an incoming vector is a single
    ascending pass over its support.
    """

    def __init__(self, track=False):
        self.rows = {}        # pivot column -> row dict
        self.tags = {}        # pivot column -> tag dict (combination of inserts)
        self.track = track
        self._n_inserted = 0

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec, tag=None):
        """Reduce a copy of vec against the echelon.

        Returns (residue, combination) where combination maps insert labels
        to coefficients such that  vec - sum(comb * inserted rows) = residue.
        The combination is only maintained when track=True.
        """
        import heapq
        res = dict(vec)
        comb = dict(tag) if tag else {}
        heap = list(res)
        heapq.heapify(heap)
        seen = set()
        while heap:
            col = heapq.heappop(heap)
            if col in seen:
                continue
            seen.add(col)
            c = res.get(col)
            if not c:
                continue
            row = self.rows.get(col)
            if row is None:
                continue
            before = set(res)
            vec_axpy(res, -c, row)
            if self.track:
                vec_axpy(comb, c, self.tags[col])
            for k in res:
                # fill-in lands strictly right of the pivot being cleared
                if k not in before and k not in seen:
                    heapq.heappush(heap, k)
        return res, comb

    def insert(self, vec, label=None):
        """Insert a vector; returns its pivot column, or None if dependent.

        When track=True the row's tag records it as `label` plus the
        combination of previously inserted rows that was subtracted.
        """
        res, comb = self.reduce(vec)
        if not res:
            return None, comb
        pivot = min(res)
        inv = 1 / res[pivot]
        row = vec_scale(res, inv)
        if self.track:
            if label is None:
                label = self._n_inserted
            tag = vec_scale(comb, -inv)
            tag[label] = Q(inv)
            self.tags[pivot] = tag
        self._n_inserted += 1
        # keep fully reduced: clear this pivot from existing rows
        for p, other in self.rows.items():
            c = other.get(pivot)
            if c:
                vec_axpy(other, -c, row)
                if self.track:
                    vec_axpy(self.tags[p], -c, self.tags[pivot])
        self.rows[pivot] = row
        return pivot, comb

    def contains(self, vec):
        res, _ = self.reduce(vec)
        return not res


def kernel_basis(columns, labels=None):
    """Kernel of the matrix whose columns are the given sparse vectors.

    Columns are inserted in order; each dependent column yields one kernel
    vector expressed over the column labels (default: positional indices).
    Deterministic, and the kernel vectors are in "echelon" position w.r.t.
    the column order (the triggering column has coefficient -1 before
    normalization).
    """
    ech = Echelon(track=True)
    if labels is None:
        labels = list(range(len(columns)))
    kernel = []
    for lab, col in zip(labels, columns):
        res, comb = ech.reduce(col)
        if not res:
            vec = dict(comb)
            vec[lab] = Q(-1)
            kernel.append(vec)
        else:
            ech.insert(col, label=lab)
    return kernel


def rank_of(columns):
    ech = Echelon()
    for col in columns:
        ech.insert(col)
    return ech.rank
