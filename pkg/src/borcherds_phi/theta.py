"""Theta constants: genus 1 (series and numeric), genus 2, and the
Hermitian theta over Z[i]^2, plus the fixed correspondence tables.

Series conventions: the genus-1 variable is q = e^(pi i tau) with
denominator 4 (theta_2 has a q^(1/4) prefactor); the genus-2 variables are
q_mn = e^(pi i T_mn) with denominator 4.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .qseries import ZERO, ONE, GaussInt, I_POW, ExactSeries, factor_power
from .multiseries import MultiSeries

# -- genus 1 -----------------------------------------------------------------

KINDS = (0, 2, 3)


def theta1_series(kind, order):
    """Product-form expansion of theta_kind in q = e^(pi i tau), den 4."""
    if kind not in KINDS:
        raise ValueError("kind must be 0, 2 or 3")
    lim = 4 * order
    acc = ExactSeries(4, lim, {0: ONE})
    n = 1
    while 8 * n - 4 < lim:  # smallest factor exponent this n contributes
        if kind == 0:
            fs = [(8 * n, -1, 1), (4 * (2 * n - 1), -1, 2)]
        elif kind == 2:
            fs = [(8 * n, -1, 1), (8 * n, 1, 2)]
        else:
            fs = [(8 * n, -1, 1), (4 * (2 * n - 1), 1, 2)]
        for e, sign, k in fs:
            if e < lim:
                acc = acc * factor_power(e, sign, k, order, 4)
        n += 1
    if kind == 2:
        acc = (acc * 2).shift(1).truncate(lim)
    return acc


def theta1_sum_series(kind, order):
    """Sum-form oracle: theta_3 = sum q^(n^2), theta_2 = sum q^((n+1/2)^2),
    theta_0 = sum (-1)^n q^(n^2)."""
    lim = 4 * order
    terms = {}
    n = 0
    while True:
        if kind in (0, 3):
            e = 4 * n * n
            if e >= lim:
                break
            c = GaussInt((-1) ** n if kind == 0 else 1, 0)
            mult = 1 if n == 0 else 2
            terms[e] = terms.get(e, ZERO) + mult * c
        else:
            e = (2 * n + 1) ** 2
            if e >= lim:
                break
            terms[e] = terms.get(e, ZERO) + GaussInt(2, 0)
        n += 1
    return ExactSeries(4, lim, terms)


def theta1_numeric(kind, tau, tol=1e-16):
    """Numerical theta constant at tau (Im tau > 0), by the rapidly
    convergent sum form."""
    if tau.imag <= 0:
        raise ValueError("tau must be in the upper half-plane")
    q = cmath.exp(1j * cmath.pi * tau)
    total = 0j
    n = 0
    while True:
        if kind == 3:
            term = q ** (n * n) * (2 if n else 1)
        elif kind == 0:
            term = (-1) ** n * q ** (n * n) * (2 if n else 1)
        else:
            term = 2 * q ** ((n + 0.5) ** 2)
        total += term
        if n > 2 and abs(term) < tol * max(1.0, abs(total)):
            break
        n += 1
    return total


def eta_numeric(tau, nmax=400):
    """eta(tau) = q^(1/24) prod (1 - q^n), q = e^(2 pi i tau)."""
    q = cmath.exp(2j * cmath.pi * tau)
    prod = 1 + 0j
    qp = 1 + 0j
    for n in range(1, nmax + 1):
        qp *= q
        prod *= 1 - qp
        if abs(qp) < 1e-19:
            break
    return cmath.exp(2j * cmath.pi * tau / 24) * prod


def lambda_eval(tau):
    """The elliptic modulus lambda(tau) = theta_2^4 / theta_3^4."""
    return (theta1_numeric(2, tau) / theta1_numeric(3, tau)) ** 4


# -- genus 2 -----------------------------------------------------------------

def even_characteristics():
    """The ten even (a, b), a, b in {0, 1/2}^2, with 4 a.b even."""
    h = Fraction(1, 2)
    out = []
    for a1 in (0, h):
        for a2 in (0, h):
            for b1 in (0, h):
                for b2 in (0, h):
                    if (4 * (a1 * b1 + a2 * b2)) % 2 == 0:
                        out.append(((a1, a2), (b1, b2)))
    return out


def char2_parity(a, b):
    return int(4 * (a[0] * b[0] + a[1] * b[1])) % 2


def theta2_series(a, b, order):
    """Genus-2 theta constant as a MultiSeries in q_mn = e^(pi i T_mn).

    Exponent denominator 4; the lattice sum is truncated by the diagonal
    exponents with an over-inclusive box, then cut at the order bound.
    """
    if char2_parity(a, b) != 0:
        raise ValueError("only even characteristics define nonzero constants")
    lim = 4 * order
    # 4*(n+a_i)^2 <= lim suffices for each diagonal exponent separately
    terms = {}
    nmax = math.isqrt(lim) + 2
    for n1 in range(-nmax, nmax + 1):
        x1 = Fraction(n1) + a[0]
        e11 = 4 * x1 * x1
        if e11.denominator != 1:
            raise AssertionError
        e11 = int(e11)
        if e11 >= lim:
            continue
        for n2 in range(-nmax, nmax + 1):
            x2 = Fraction(n2) + a[1]
            e22 = int(4 * x2 * x2)
            if e11 + e22 >= lim:
                continue
            e12 = 8 * x1 * x2
            if e12.denominator != 1:
                raise AssertionError
            e12 = int(e12)
            # phase e^(2 pi i (n+a).b) is a power of i
            ph = 4 * (x1 * b[0] + x2 * b[1])
            if ph.denominator != 1:
                raise AssertionError
            coeff = I_POW[int(ph) % 4]
            key = (e11, e12, e22)
            s = terms.get(key, ZERO) + coeff
            if s:
                terms[key] = s
            elif key in terms:
                del terms[key]
    return MultiSeries(4, lim, 0, terms)


def theta2_pow8(a, b, order):
    """theta_{a,b}(T)^8 as a MultiSeries; coefficients are rational
    integers (checked)."""
    base = theta2_series(a, b, order)
    p2 = base * base
    p4 = p2 * p2
    p8 = p4 * p4
    p8.integer_coeffs_or_raise()
    return p8


def theta2_numeric(a, b, T, tol=1e-16):
    """Numerical genus-2 theta constant at T in the Siegel upper half-space."""
    (t11, t12), (t21, t22) = (T[0][0], T[0][1]), (T[1][0], T[1][1])
    total = 0j
    N = 1
    prev = None
    while N <= 64:
        total = 0j
        for n1 in range(-N, N + 1):
            x1 = n1 + float(a[0])
            for n2 in range(-N, N + 1):
                x2 = n2 + float(a[1])
                quad = x1 * x1 * t11 + 2 * x1 * x2 * t12 + x2 * x2 * t22
                lin = x1 * float(b[0]) + x2 * float(b[1])
                total += cmath.exp(1j * cmath.pi * quad + 2j * cmath.pi * lin)
        if prev is not None and abs(total - prev) <= tol * max(1.0, abs(total)):
            break
        prev = total
        N += 4
    return total


def petersson_theta2_sq(a, b, T):
    """|theta_{a,b}(T)|^2 (det Im T)^(1/2), the genus-2 Petersson norm^2."""
    im = [[T[0][0].imag, T[0][1].imag], [T[1][0].imag, T[1][1].imag]]
    det = im[0][0] * im[1][1] - im[0][1] * im[1][0]
    return math.sqrt(det) * abs(theta2_numeric(a, b, T)) ** 2


# -- Hermitian (Freitag) theta over Z[i]^2 ------------------------------------

# Ev classes as pairs of pairs over {0, i} subject to a.conj(b) = 0 mod (1+i).
def ev_classes():
    reps = (0, 1j)
    out = []
    for a1 in reps:
        for a2 in reps:
            for b1 in reps:
                for b2 in reps:
                    par = sum(1 for x, y in ((a1, b1), (a2, b2)) if x and y)
                    if par % 2 == 0:
                        out.append(((a1, a2), (b1, b2)))
    return out


def ev_to_riemann(ev, part="re"):
    """The {0,1/2}^2-characteristic Re(a/(1+i)) or Im(a/(1+i)) of an Ev class."""
    (a1, a2), (b1, b2) = ev

    def half(x):
        z = x / (1 + 1j)
        v = z.real if part == "re" else z.imag
        return Fraction(1, 2) if abs(v - 0.5) < 1e-9 else Fraction(0)

    return (half(a1), half(a2)), (half(b1), half(b2))


def freitag_theta(ev, Omega, tol=1e-15):
    """Hermitian theta sum over n in Z[i]^2 at Omega with (Omega -
    conj(Omega)^T)/2i positive definite.

    The box over Gaussian integers is grown until the accumulated value is
    stable to ``tol`` relatively; Gaussian decay makes this fast.
    """
    import numpy as np

    o = [[complex(Omega[0][0]), complex(Omega[0][1])],
         [complex(Omega[1][0]), complex(Omega[1][1])]]
    h = [[(o[i][j] - o[j][i].conjugate()) / 2j for j in range(2)] for i in range(2)]
    if h[0][0].real <= 0 or (h[0][0] * h[1][1] - h[0][1] * h[1][0]).real <= 0:
        raise ValueError("Omega is not in the domain D")
    (a1, a2), (b1, b2) = ev
    ash = (a1 / (1 + 1j), a2 / (1 + 1j))
    bsh = (b1 / (1 + 1j), b2 / (1 + 1j))

    prev = None
    total = 0j
    N = 4
    while N <= 24:
        rng = np.arange(-N, N + 1)
        g = (rng[:, None] + 1j * rng[None, :]).ravel()
        v1 = (g + ash[0])[:, None]
        v2 = (g + ash[1])[None, :]
        quad = (v1 * (o[0][0] * v1.conjugate() + o[0][1] * v2.conjugate())
                + v2 * (o[1][0] * v1.conjugate() + o[1][1] * v2.conjugate())) / 2
        lin = (v1 * bsh[0].conjugate() + v2 * bsh[1].conjugate()).real
        total = complex(np.exp(2j * np.pi * (quad + lin)).sum())
        if prev is not None and abs(total - prev) <= tol * max(1.0, abs(total)):
            break
        prev = total
        N += 4
    return total


def petersson_freitag_sq(ev, Omega):
    """det((Omega - conj(Omega)^T)/2i) |Theta|^2."""
    o = [[complex(Omega[0][0]), complex(Omega[0][1])],
         [complex(Omega[1][0]), complex(Omega[1][1])]]
    h = [[(o[i][j] - o[j][i].conjugate()) / 2j for j in range(2)] for i in range(2)]
    det = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).real
    return det * abs(freitag_theta(ev, Omega)) ** 2


# -- correspondence tables -----------------------------------------------------

def _part(top, bottom):
    return (tuple(top), tuple(bottom))


# Ev class <-> partition (columns of the published table, in order).
EV_PARTITION_TABLE = [
    (((0, 0), (0, 0)), _part((1, 3, 5), (2, 4, 6))),
    (((1j, 0), (0, 0)), _part((1, 4, 6), (2, 3, 5))),
    (((0, 1j), (0, 0)), _part((1, 3, 6), (2, 4, 5))),
    (((0, 0), (1j, 0)), _part((1, 2, 5), (3, 4, 6))),
    (((0, 0), (0, 1j)), _part((1, 3, 4), (2, 5, 6))),
    (((1j, 1j), (0, 0)), _part((1, 4, 5), (2, 3, 6))),
    (((1j, 0), (0, 1j)), _part((1, 5, 6), (2, 3, 4))),
    (((0, 0), (1j, 1j)), _part((1, 2, 4), (3, 5, 6))),
    (((0, 1j), (1j, 0)), _part((1, 2, 6), (3, 4, 5))),
    (((1j, 1j), (1j, 1j)), _part((1, 2, 3), (4, 5, 6))),
]

# (epsilon, delta) genus-1 kinds <-> partition (period-integral table).
EPS_DELTA_TABLE = [
    ((2, 2), _part((1, 3, 5), (2, 4, 6))),
    ((2, 0), _part((1, 3, 4), (2, 5, 6))),
    ((2, 3), _part((1, 3, 6), (2, 4, 5))),
    ((0, 2), _part((1, 4, 6), (2, 3, 5))),
    ((0, 0), _part((1, 5, 6), (2, 3, 4))),
    ((0, 3), _part((1, 4, 5), (2, 3, 6))),
    ((3, 2), _part((1, 2, 5), (3, 4, 6))),
    ((3, 0), _part((1, 2, 4), (3, 5, 6))),
    ((3, 3), _part((1, 2, 6), (3, 4, 5))),
]

# half-period translation data (a1 a2 / b1 b2) <-> partition (even-type
# involutions; the degenerate partition 123/456 is excluded).
TRANSLATION_TABLE = [
    (((1, 0), (1, 0)), _part((1, 3, 5), (2, 4, 6))),
    (((1, 0), (0, 1)), _part((1, 3, 4), (2, 5, 6))),
    (((1, 0), (1, 1)), _part((1, 3, 6), (2, 4, 5))),
    (((0, 1), (1, 0)), _part((1, 4, 6), (2, 3, 5))),
    (((0, 1), (0, 1)), _part((1, 5, 6), (2, 3, 4))),
    (((0, 1), (1, 1)), _part((1, 4, 5), (2, 3, 6))),
    (((1, 1), (1, 0)), _part((1, 2, 5), (3, 4, 6))),
    (((1, 1), (0, 1)), _part((1, 2, 4), (3, 5, 6))),
    (((1, 1), (1, 1)), _part((1, 2, 6), (3, 4, 5))),
]

# Minor table: partition -> Delta^2 as a polynomial identity in (l1, l2),
# and the matching theta-quotient exponents (numerator kinds per factor).
MINOR_TABLE = {
    _part((1, 2, 4), (3, 5, 6)): ("(l2-1)^2", lambda l1, l2: (l2 - 1) ** 2, (None, 0)),
    _part((1, 2, 5), (3, 4, 6)): ("l2^2", lambda l1, l2: l2 ** 2, (None, 2)),
    _part((1, 2, 6), (3, 4, 5)): ("1", lambda l1, l2: l1 * 0 + l2 * 0 + 1, (None, None)),
    _part((1, 3, 4), (2, 5, 6)): ("l1^2(l2-1)^2", lambda l1, l2: l1 ** 2 * (l2 - 1) ** 2, (2, 0)),
    _part((1, 3, 5), (2, 4, 6)): ("l1^2 l2^2", lambda l1, l2: l1 ** 2 * l2 ** 2, (2, 2)),
    _part((1, 3, 6), (2, 4, 5)): ("l1^2", lambda l1, l2: l1 ** 2, (2, None)),
    _part((1, 4, 5), (2, 3, 6)): ("(l1-1)^2", lambda l1, l2: (l1 - 1) ** 2, (0, None)),
    _part((1, 4, 6), (2, 3, 5)): ("(l1-1)^2 l2^2", lambda l1, l2: (l1 - 1) ** 2 * l2 ** 2, (0, 2)),
    _part((1, 5, 6), (2, 3, 4)): ("(l1-1)^2(l2-1)^2",
                                  lambda l1, l2: (l1 - 1) ** 2 * (l2 - 1) ** 2, (0, 0)),
}


def correspondence_tables():
    """The three fixed tables as JSON-ready data."""
    return {
        "ev_partition": [
            {"a": [_cstr(x) for x in ev[0]], "b": [_cstr(x) for x in ev[1]],
             "partition": [list(p[0]), list(p[1])]}
            for ev, p in EV_PARTITION_TABLE
        ],
        "eps_delta_partition": [
            {"eps": ed[0], "delta": ed[1], "partition": [list(p[0]), list(p[1])]}
            for ed, p in EPS_DELTA_TABLE
        ],
        "translation_partition": [
            {"a": list(ab[0]), "b": list(ab[1]), "partition": [list(p[0]), list(p[1])]}
            for ab, p in TRANSLATION_TABLE
        ],
        "minor_table": [
            {"partition": [list(p[0]), list(p[1])], "delta_sq": s}
            for p, (s, _, _) in sorted(MINOR_TABLE.items())
        ],
    }


def _cstr(x):
    return "i" if x else "0"


def partition_for_eps_delta(eps, delta):
    for ed, p in EPS_DELTA_TABLE:
        if ed == (eps, delta):
            return p
    raise KeyError((eps, delta))


def eps_delta_for_partition(part):
    for ed, p in EPS_DELTA_TABLE:
        if p == part:
            return ed
    raise KeyError(part)


def ev_for_partition(part):
    for ev, p in EV_PARTITION_TABLE:
        if p == part:
            return ev
    raise KeyError(part)
