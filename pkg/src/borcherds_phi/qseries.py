"""Exact truncated Laurent/Puiseux series over the Gaussian integers.

A series carries a global exponent denominator ``den``: the stored integer
exponent ``e`` stands for ``q**(e/den)``.  Truncation is tracked exactly:
``lim`` is the scaled bound, i.e. every stored exponent satisfies
``e < lim`` and nothing is known at or beyond ``lim/den``.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction


class GaussInt:
    """Gaussian integer ``re + im*i`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re
        self.im = im

    def __add__(self, other):
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussInt(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, int):
            return GaussInt(self.re * other, self.im * other)
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conj(self):
        return GaussInt(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        if isinstance(other, int):
            return self.re == other and self.im == 0
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{self.im:+d}i)"

    def to_complex(self):
        return complex(self.re, self.im)


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
# i**k for k mod 4; the only roots of unity the expansions ever need.
I_POW = (GaussInt(1, 0), GaussInt(0, 1), GaussInt(-1, 0), GaussInt(0, -1))


def binom_int(k, j):
    """Binomial coefficient C(k, j) for integer k of either sign, j >= 0."""
    if j < 0:
        return 0
    if k >= 0:
        return math.comb(k, j) if j <= k else 0
    # C(k, j) = (-1)^j C(-k+j-1, j)
    return (-1) ** j * math.comb(-k + j - 1, j)


class ExactSeries:
    """Truncated series sum_e c_e q^(e/den), c_e in Z[i], exponents e < lim."""

    __slots__ = ("den", "lim", "terms")

    def __init__(self, den, lim, terms=None):
        if den < 1:
            raise ValueError("denominator must be a positive integer")
        self.den = den
        self.lim = lim
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if c and e < lim:
                    self.terms[e] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, den, order):
        return cls(den, order * den)

    @classmethod
    def one(cls, den, order):
        return cls(den, order * den, {0: ONE})

    @classmethod
    def monomial(cls, den, order, e, coeff=ONE):
        return cls(den, order * den, {e: coeff})

    # -- basic views -------------------------------------------------------

    @property
    def order(self):
        """Truncation bound as an exact rational (in q-units)."""
        return Fraction(self.lim, self.den)

    def coeff(self, e_num, e_den=1):
        """Coefficient of q^(e_num/e_den); exponent must be representable."""
        e, r = divmod(e_num * self.den, e_den)
        if r:
            return ZERO
        if e >= self.lim:
            raise ValueError("coefficient requested at or beyond truncation order")
        return self.terms.get(e, ZERO)

    def valuation(self):
        """Scaled exponent of the lowest term (None for the zero series)."""
        return min(self.terms) if self.terms else None

    def is_zero(self):
        return not self.terms

    def items_sorted(self):
        return sorted(self.terms.items())

    # -- structural ops ----------------------------------------------------

    def truncate(self, lim):
        if lim > self.lim:
            raise ValueError("cannot extend a truncated series")
        return ExactSeries(self.den, lim, {e: c for e, c in self.terms.items() if e < lim})

    def rescale_den(self, new_den):
        """Re-express with a finer denominator (new_den a multiple of den)."""
        if new_den % self.den:
            raise ValueError("new denominator must be a multiple of the old one")
        k = new_den // self.den
        return ExactSeries(new_den, self.lim * k, {e * k: c for e, c in self.terms.items()})

    def unify(self, other):
        den = self.den * other.den // math.gcd(self.den, other.den)
        return self.rescale_den(den), other.rescale_den(den)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if self.den != other.den:
            raise ValueError("mismatched denominators; rescale first")
        lim = min(self.lim, other.lim)
        terms = {e: c for e, c in self.terms.items() if e < lim}
        for e, c in other.terms.items():
            if e < lim:
                s = terms.get(e, ZERO) + c
                if s:
                    terms[e] = s
                elif e in terms:
                    del terms[e]
        return ExactSeries(self.den, lim, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ExactSeries(self.den, self.lim, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, GaussInt)):
            if isinstance(other, int):
                other = GaussInt(other, 0)
            return ExactSeries(self.den, self.lim,
                               {e: c * other for e, c in self.terms.items()})
        if self.den != other.den:
            raise ValueError("mismatched denominators; rescale first")
        if not self.terms or not other.terms:
            # 0 * X is 0, but validity still propagates pessimistically
            va = self.valuation()
            vb = other.valuation()
            lim = min(self.lim + (vb or 0), other.lim + (va or 0))
            return ExactSeries(self.den, lim)
        va, vb = min(self.terms), min(other.terms)
        lim = min(self.lim + vb, other.lim + va)
        acc = {}
        bitems = sorted(other.terms.items())
        for ea, ca in sorted(self.terms.items()):
            bound = lim - ea
            ra, ia = ca.re, ca.im
            for eb, cb in bitems:
                if eb >= bound:
                    break
                e = ea + eb
                re = ra * cb.re - ia * cb.im
                im = ra * cb.im + ia * cb.re
                prev = acc.get(e)
                if prev is None:
                    acc[e] = [re, im]
                else:
                    prev[0] += re
                    prev[1] += im
        terms = {e: GaussInt(p[0], p[1]) for e, p in acc.items() if p[0] or p[1]}
        return ExactSeries(self.den, lim, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = ExactSeries(self.den, self.lim, {0: ONE})
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self):
        """Inverse of a series whose lowest coefficient is a unit of Z[i]."""
        if not self.terms:
            raise ZeroDivisionError("cannot invert the zero series")
        v = min(self.terms)
        lead = self.terms[v]
        if lead.norm() != 1:
            raise ValueError("leading coefficient must be a Gaussian unit")
        lead_inv = lead.conj()  # unit inverse
        len_lim = self.lim - v  # relative (scaled) precision past the lead
        tail = {e - v: lead_inv * c for e, c in self.terms.items() if e != v}
        inv = {0: ONE}
        # Newton-free triangular solve: inv[e] determined by lower terms.
        for e in range(1, len_lim):
            s = ZERO
            for et, ct in tail.items():
                if et <= e:
                    prev = inv.get(e - et)
                    if prev is not None:
                        s = s + ct * prev
            if s:
                inv[e] = -s
        terms = {e - v: lead_inv * c for e, c in inv.items()}
        return ExactSeries(self.den, len_lim - v, terms)

    def shift(self, e):
        """Multiply by q^(e/den)."""
        return ExactSeries(self.den, self.lim + e, {k + e: c for k, c in self.terms.items()})

    def substitute_monomial(self, unit, k, den, order):
        """Exact substitution q -> unit * q^(k/den) with a Gaussian unit."""
        lim = order * den
        terms = {}
        for e, c in self.terms.items():
            # q^(e/self.den) -> unit^e * q^(e*k/(self.den*den))
            num = e * k
            ee, r = divmod(num, self.den)
            if r:
                raise ValueError("substitution produces a non-representable exponent")
            if ee < lim:
                u = unit_power(unit, e)
                terms[ee] = terms.get(ee, ZERO) + u * c
        sub_lim = min(lim, (self.lim * k) // self.den)
        return ExactSeries(den, sub_lim, {e: c for e, c in terms.items() if c})

    def __eq__(self, other):
        if not isinstance(other, ExactSeries):
            return NotImplemented
        a, b = self.unify(other)
        lim = min(a.lim, b.lim)
        return ({e: c for e, c in a.terms.items() if e < lim}
                == {e: c for e, c in b.terms.items() if e < lim})

    def __repr__(self):
        parts = [f"{c!r}*q^({e}/{self.den})" for e, c in self.items_sorted()[:8]]
        more = " + ..." if len(self.terms) > 8 else ""
        return f"ExactSeries({' + '.join(parts) or '0'}{more}; O(q^{self.order}))"

    def evaluate(self, q):
        """Numerical value at a complex q (principal branch for q^(1/den))."""
        qd = complex(q) ** (1.0 / self.den)
        return sum(c.to_complex() * qd ** e for e, c in self.items_sorted())

    # -- serialization -----------------------------------------------------

    def to_json(self):
        order = Fraction(self.lim, self.den)
        return {
            "den": self.den,
            "order": order.numerator if order.denominator == 1
            else f"{order.numerator}/{order.denominator}",
            "terms": [[e, c.re, c.im] for e, c in self.items_sorted()],
        }

    @classmethod
    def from_json(cls, obj):
        den = obj["den"]
        order = obj["order"]
        lim = (Fraction(order) * den)
        if lim.denominator != 1:
            raise ValueError("order * den must be an integer")
        terms = {e: GaussInt(re, im) for e, re, im in obj["terms"]}
        return cls(den, int(lim), terms)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def unit_power(unit, e):
    """unit**e for a Gaussian unit (power of i), reduced via the unit's order."""
    if unit == ONE:
        return ONE
    if unit.re == -1:
        return I_POW[(2 * e) % 4]
    if unit.im == 1:
        return I_POW[e % 4]
    if unit.im == -1:
        return I_POW[(3 * e) % 4]
    raise ValueError("not a Gaussian unit")


def factor_power(m, sign, k, order, den=1):
    """Truncated expansion of (1 + sign*q^(m/den))^k, k of either sign.

    Exact for all integer k via the binomial series.
    """
    if m < 1:
        raise ValueError("exponent scale m must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    lim = order * den
    terms = {}
    j = 0
    while j * m < lim:
        c = binom_int(k, j) * (sign ** j)
        if c:
            terms[j * m] = GaussInt(c, 0)
        j += 1
    return ExactSeries(den, lim, terms)


def euler_product(order_scaled, den, step):
    """prod_{n>=1} (1 - q^(step*n/den)) via Euler's pentagonal recursion."""
    terms = {0: ONE}
    k = 1
    while True:
        for kk in (k, -k):
            e = step * (kk * (3 * kk - 1) // 2)
            if e < order_scaled:
                terms[e] = GaussInt((-1) ** (kk % 2), 0)
        if step * (k * (3 * k - 1) // 2) >= order_scaled and \
           step * (k * (3 * k + 1) // 2) >= order_scaled:
            break
        k += 1
    return ExactSeries(den, order_scaled, {e: c for e, c in terms.items() if e < order_scaled})


def eta_series(m, order):
    """q-expansion of eta(m*tau) in q = e^(2 pi i tau), den = 24.

    Leading term q^(m/24); the product part uses the pentagonal-number
    recursion.
    """
    if m < 1:
        raise ValueError("scale must be a positive integer")
    lim = order * 24
    prod = euler_product(lim, 24, 24 * m)
    return prod.shift(m)


def eta_power_factors(m, k, order, rel_lim=None):
    """eta(m*tau)^k assembled factor by factor: q^(mk/24) prod (1-q^(mn))^k.

    Independent of the pentagonal route; used as the alternative factor
    grouping oracle and for negative powers.  ``rel_lim`` is the scaled
    precision relative to the leading exponent ``mk`` (default 24*order).
    """
    if rel_lim is None:
        rel_lim = order * 24
    acc = ExactSeries(24, rel_lim, {0: ONE})
    n = 1
    while 24 * m * n < rel_lim:
        fac = factor_power(24 * m * n, -1, k, -(-rel_lim // 24), 24).truncate(rel_lim)
        acc = acc * fac
        n += 1
    return acc.shift(m * k)


def eta_quotient(pairs, order):
    """prod_i eta(m_i tau)^(k_i) as an ExactSeries with den 24.

    ``pairs`` is a sequence of (scale, exponent).  The result may be a
    Laurent series (negative leading exponent); all exponents below
    ``order`` are exact.
    """
    v_total = sum(m * k for m, k in pairs)
    rel = order * 24 - min(0, v_total)
    acc = None
    for m, k in pairs:
        f = eta_power_factors(m, k, order, rel_lim=rel)
        acc = f if acc is None else acc * f
    if acc is None:
        return ExactSeries.one(24, order)
    return acc.truncate(order * 24)


def c_coeffs(N):
    """The integers c(-1..N) with sum c(n) q^n = eta^-8 eta(2.)^8 eta(4.)^-8.

    c(n) = 0 for n < -1 by convention; the generating series is an exact
    eta quotient, so every coefficient is a rational integer.
    """
    if N < -1:
        raise ValueError("N must be >= -1")
    series = eta_quotient([(1, -8), (2, 8), (4, -8)], N + 1)
    out = []
    for n in range(-1, N + 1):
        c = series.terms.get(24 * n, ZERO)
        if c.im != 0:
            raise ArithmeticError("c(n) must be a rational integer")
        out.append(c.re)
    for e, c in series.terms.items():
        if e % 24 and c:
            raise ArithmeticError("eta quotient has a non-integral exponent term")
    return out
