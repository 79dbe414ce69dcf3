"""Truncated three-variable expansions in q11, q12, q22 over Z[i].

Terms are keyed by integer exponent triples (e11, e12, e22) meaning
q11^(e11/den) q12^(e12/den) q22^(e22/den).  Truncation is on the total
diagonal exponent: stored terms satisfy e11 + e22 < lim and e11, e22 >= 0,
while e12 may take either sign, bounded by |e12| <= e11 + e22 + cross_bound.
"""

from __future__ import annotations

import json

from .qseries import ZERO, ONE, GaussInt


class MultiSeries:
    __slots__ = ("den", "lim", "cross", "terms")

    def __init__(self, den, lim, cross=0, terms=None):
        if den < 1:
            raise ValueError("denominator must be a positive integer")
        self.den = den
        self.lim = lim
        self.cross = cross
        self.terms = {}
        if terms:
            for key, c in terms.items():
                if not c:
                    continue
                e11, e12, e22 = key
                if e11 < 0 or e22 < 0:
                    raise ValueError("diagonal exponents must be nonnegative")
                if abs(e12) > e11 + e22 + cross:
                    raise ValueError("cross exponent exceeds the recorded bound")
                if e11 + e22 < lim:
                    self.terms[key] = c

    @classmethod
    def zero(cls, den, lim, cross=0):
        return cls(den, lim, cross)

    @classmethod
    def one(cls, den, lim, cross=0):
        return cls(den, lim, cross, {(0, 0, 0): ONE})

    def is_zero(self):
        return not self.terms

    def items_sorted(self):
        return sorted(self.terms.items())

    def diag_valuation(self):
        """Smallest e11+e22 among stored terms (None if zero)."""
        if not self.terms:
            return None
        return min(k[0] + k[2] for k in self.terms)

    def copy_with(self, terms):
        return MultiSeries(self.den, self.lim, self.cross, terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        lim = min(self.lim, other.lim)
        cross = max(self.cross, other.cross)
        terms = {k: c for k, c in self.terms.items() if k[0] + k[2] < lim}
        for k, c in other.terms.items():
            if k[0] + k[2] < lim:
                s = terms.get(k, ZERO) + c
                if s:
                    terms[k] = s
                elif k in terms:
                    del terms[k]
        return MultiSeries(self.den, lim, cross, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MultiSeries(self.den, self.lim, self.cross,
                           {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, GaussInt)):
            if isinstance(other, int):
                other = GaussInt(other, 0)
            return MultiSeries(self.den, self.lim, self.cross,
                               {k: c * other for k, c in self.terms.items()})
        self._check(other)
        va = self.diag_valuation()
        vb = other.diag_valuation()
        if va is None or vb is None:
            lim = min(self.lim + (vb or 0), other.lim + (va or 0))
            return MultiSeries(self.den, lim, self.cross + other.cross)
        lim = min(self.lim + vb, other.lim + va)
        cross = self.cross + other.cross
        acc = {}
        bitems = sorted(other.terms.items(), key=lambda kv: kv[0][0] + kv[0][2])
        bdiag = [k[0] + k[2] for k, _ in bitems]
        for (a11, a12, a22), ca in self.terms.items():
            bound = lim - a11 - a22
            ra, ia = ca.re, ca.im
            for (k, cb), d in zip(bitems, bdiag):
                if d >= bound:
                    break
                key = (a11 + k[0], a12 + k[1], a22 + k[2])
                re = ra * cb.re - ia * cb.im
                im = ra * cb.im + ia * cb.re
                prev = acc.get(key)
                if prev is None:
                    acc[key] = [re, im]
                else:
                    prev[0] += re
                    prev[1] += im
        terms = {k: GaussInt(p[0], p[1]) for k, p in acc.items() if p[0] or p[1]}
        return MultiSeries(self.den, lim, cross, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers not supported for MultiSeries")
        result = MultiSeries.one(self.den, self.lim, 0)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        if self.den != other.den:
            raise ValueError("mismatched denominators")
        lim = min(self.lim, other.lim)
        return ({k: c for k, c in self.terms.items() if k[0] + k[2] < lim}
                == {k: c for k, c in other.terms.items() if k[0] + k[2] < lim})

    def __repr__(self):
        parts = [f"{c!r}*q11^({k[0]}/{self.den})q12^({k[1]}/{self.den})"
                 f"q22^({k[2]}/{self.den})" for k, c in self.items_sorted()[:6]]
        more = " + ..." if len(self.terms) > 6 else ""
        return f"MultiSeries({' + '.join(parts) or '0'}{more}; diag lim {self.lim}/{self.den})"

    def _check(self, other):
        if self.den != other.den:
            raise ValueError("mismatched denominators; rescale first")

    # -- specializations ---------------------------------------------------

    def truncate(self, lim):
        if lim > self.lim:
            raise ValueError("cannot extend a truncated series")
        return MultiSeries(self.den, lim, self.cross,
                           {k: c for k, c in self.terms.items() if k[0] + k[2] < lim})

    def set_q12_to_one(self):
        """Diagonal specialization T12 = 0, i.e. q12 -> 1 (collapse e12)."""
        terms = {}
        for (e11, e12, e22), c in self.terms.items():
            key = (e11, 0, e22)
            s = terms.get(key, ZERO) + c
            if s:
                terms[key] = s
            elif key in terms:
                del terms[key]
        return MultiSeries(self.den, self.lim, 0, terms)

    def flip_q12(self):
        """The substitution T12 -> -T12 (negate every cross exponent)."""
        return MultiSeries(self.den, self.lim, self.cross,
                           {(k[0], -k[1], k[2]): c for k, c in self.terms.items()})

    def sub_series_e22_zero(self):
        """Terms with e22 = 0 as a map e11 -> coefficient (q22 -> 0 limit)."""
        out = {}
        for (e11, e12, e22), c in self.terms.items():
            if e22 == 0:
                if e12 != 0:
                    raise ValueError("boundary sub-series has a residual cross term")
                out[e11] = out.get(e11, ZERO) + c
        return {e: c for e, c in out.items() if c}

    def rescale_den(self, new_den):
        if new_den % self.den:
            raise ValueError("new denominator must be a multiple of the old one")
        r = new_den // self.den
        return MultiSeries(new_den, self.lim * r, self.cross * r,
                           {(k[0] * r, k[1] * r, k[2] * r): c for k, c in self.terms.items()})

    def integer_coeffs_or_raise(self):
        for k, c in self.terms.items():
            if c.im != 0:
                raise ArithmeticError(f"non-real coefficient {c!r} at {k}")
        return True

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "den": self.den,
            "order": self.lim,
            "cross_bound": self.cross,
            "terms": [[k[0], k[1], k[2], c.re, c.im] for k, c in self.items_sorted()],
        }

    @classmethod
    def from_json(cls, obj):
        terms = {(e11, e12, e22): GaussInt(re, im)
                 for e11, e12, e22, re, im in obj["terms"]}
        return cls(obj["den"], obj["order"], obj.get("cross_bound", 0), terms)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def tensor_from_univariate(s1, s2, den, lim):
    """MultiSeries from two single-variable series: s1(q11) * s2(q22).

    Both inputs must use the same denominator convention as the target.
    """
    a = s1.rescale_den(den) if s1.den != den else s1
    b = s2.rescale_den(den) if s2.den != den else s2
    va = a.valuation() or 0
    vb = b.valuation() or 0
    if va < 0 or vb < 0:
        raise ValueError("tensor factors must be power series")
    lim = min(lim, a.lim + vb, b.lim + va)
    terms = {}
    for e1, c1 in a.terms.items():
        for e2, c2 in b.terms.items():
            if e1 + e2 < lim:
                terms[(e1, 0, e2)] = c1 * c2
    return MultiSeries(den, lim, 0, terms)
