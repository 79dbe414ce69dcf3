"""Exact resultant of three ternary quadratic forms (Macaulay construction).

The resultant R is normalized so that R(diag(1,0,0), diag(0,1,0),
diag(0,0,1)) = 1; it vanishes exactly when the three conics share a
projective point, has degree 4 in the coefficients of each form, and obeys
R(A.P) = det(P)^4 R(A) and R(A^P) = det(P)^8 R(A).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement, permutations


class QuadricTriple:
    """Three ternary quadrics given by symmetric 3x3 rational matrices."""

    def __init__(self, mats):
        self.mats = []
        for m in mats:
            m = [[Fraction(x) for x in row] for row in m]
            if len(m) != 3 or any(len(r) != 3 for r in m):
                raise ValueError("each quadric needs a 3x3 matrix")
            for i in range(3):
                for j in range(3):
                    if m[i][j] != m[j][i]:
                        raise ValueError("quadric matrices must be symmetric")
            self.mats.append(m)
        if len(self.mats) != 3:
            raise ValueError("a triple needs exactly three quadrics")

    @classmethod
    def diagonal(cls, rows):
        """Triple of diagonal quadrics from a 3x3 coefficient matrix."""
        return cls([[[Fraction(rows[i][0]) if a == b == 0 else
                      Fraction(rows[i][1]) if a == b == 1 else
                      Fraction(rows[i][2]) if a == b == 2 else Fraction(0)
                      for a in range(3)] for b in range(3)] for i in range(3)])

    def coeff_dict(self, i):
        """Monomial coefficients of quadric i: {(e1,e2,e3): c} with sum e = 2."""
        m = self.mats[i]
        out = {}
        for a in range(3):
            for b in range(a, 3):
                c = m[a][b] if a == b else 2 * m[a][b]
                if c:
                    mono = [0, 0, 0]
                    mono[a] += 1
                    mono[b] += 1
                    out[tuple(mono)] = c
        return out

    def evaluate(self, i, x):
        m = self.mats[i]
        return sum(m[a][b] * x[a] * x[b] for a in range(3) for b in range(3))

    def apply_linear_combination(self, P):
        """A.P: new quadric j is sum_i P[i][j] * Q_i."""
        mats = []
        for j in range(3):
            m = [[sum(Fraction(P[i][j]) * self.mats[i][a][b] for i in range(3))
                  for b in range(3)] for a in range(3)]
            mats.append(m)
        return QuadricTriple(mats)

    def apply_substitution(self, P):
        """A^P: substitute x -> P x, i.e. each matrix becomes P^T A P."""
        mats = []
        P = [[Fraction(x) for x in row] for row in P]
        for m in self.mats:
            mp = [[sum(P[a][i] * m[a][b] * P[b][j] for a in range(3) for b in range(3))
                   for j in range(3)] for i in range(3)]
            mats.append(mp)
        return QuadricTriple(mats)

    def to_json(self):
        return {"quadrics": [[[str(x) for x in row] for row in m] for m in self.mats]}

    @classmethod
    def from_json(cls, obj):
        return cls([[[Fraction(x) for x in row] for row in m] for m in obj["quadrics"]])


def _det_fraction(m):
    """Exact determinant by rational Gaussian elimination."""
    n = len(m)
    m = [row[:] for row in m]
    det = Fraction(1)
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


_DEG4 = sorted(
    {tuple(sorted((a, b, c, d))) for a, b, c, d in
     combinations_with_replacement(range(3), 4)}
)


def _monomials_deg4():
    """All exponent triples of total degree 4, in a fixed sorted order."""
    out = []
    for e1 in range(4, -1, -1):
        for e2 in range(4 - e1, -1, -1):
            out.append((e1, e2, 4 - e1 - e2))
    return out


def _macaulay_quotient(triple, roles):
    """det(Macaulay)/det(extraneous minor) for one assignment of quadric
    roles to variables; returns None when the minor vanishes."""
    monos = _monomials_deg4()
    col = {m: i for i, m in enumerate(monos)}
    coeffs = [triple.coeff_dict(roles[v]) for v in range(3)]

    def classify(mono):
        # smallest variable index with exponent >= 2 picks the row's quadric
        for v in range(3):
            if mono[v] >= 2:
                return v
        raise AssertionError

    rows = []
    reduced_twice = []
    for mono in monos:
        v = classify(mono)
        rest = list(mono)
        rest[v] -= 2
        row = [Fraction(0)] * len(monos)
        for cm, c in coeffs[v].items():
            target = (rest[0] + cm[0], rest[1] + cm[1], rest[2] + cm[2])
            row[col[target]] += c
        rows.append(row)
        if sum(1 for x in mono if x >= 2) >= 2:
            reduced_twice.append(len(rows) - 1)

    big = _det_fraction(rows)
    minor = _det_fraction([[rows[i][col[monos[j]]] for j in reduced_twice]
                           for i in reduced_twice])
    if minor == 0:
        return None
    return big / minor


# Normalization constants: quotient value on the unit diagonal triple, one
# per role permutation (fixed once, exact).
_NORMS = {}


def _norm_constant(roles):
    if roles not in _NORMS:
        unit = QuadricTriple.diagonal([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        val = _macaulay_quotient(unit, roles)
        if val is None or val == 0:
            raise ArithmeticError("degenerate normalization instance")
        _NORMS[roles] = val
    return _NORMS[roles]


def macaulay_resultant(triple):
    """The normalized resultant of a QuadricTriple, as an exact Fraction.

    If the extraneous minor vanishes for the default variable/quadric role
    assignment, the other role permutations are tried; as a last resort the
    value is recovered by interpolating R(A + t*unit) along small integer t
    (R is a polynomial of degree 12, so 13 good points suffice).
    """
    for roles in permutations(range(3)):
        val = _macaulay_quotient(triple, roles)
        if val is not None:
            return val / _norm_constant(roles)
    # deterministic interpolation fallback along A + t * unit-diagonal
    unit = QuadricTriple.diagonal([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    pts = []
    t = 1
    roles = (0, 1, 2)
    while len(pts) < 13 and t < 200:
        shifted = QuadricTriple(
            [[[triple.mats[i][a][b] + t * unit.mats[i][a][b] for b in range(3)]
              for a in range(3)] for i in range(3)])
        val = _macaulay_quotient(shifted, roles)
        if val is not None:
            pts.append((Fraction(t), val / _norm_constant(roles)))
        t += 1
    if len(pts) < 13:
        raise ArithmeticError("resultant fallback failed to find good points")
    return _lagrange_at_zero(pts)


def _lagrange_at_zero(pts):
    total = Fraction(0)
    for i, (xi, yi) in enumerate(pts):
        term = yi
        for j, (xj, _) in enumerate(pts):
            if i != j:
                term *= (0 - xj) / (xi - xj)
        total += term
    return total


def covariance_check(triple, P):
    """Verify R(A.P) = det(P)^4 R(A) and R(A^P) = det(P)^8 R(A) exactly."""
    detP = _det_fraction([[Fraction(x) for x in row] for row in P])
    if detP == 0:
        raise ValueError("P must be invertible")
    r = macaulay_resultant(triple)
    r_comb = macaulay_resultant(triple.apply_linear_combination(P))
    r_subs = macaulay_resultant(triple.apply_substitution(P))
    return {
        "R": r,
        "R_combination": r_comb,
        "R_substitution": r_subs,
        "detP": detP,
        "combination_ok": r_comb == detP ** 4 * r,
        "substitution_ok": r_subs == detP ** 8 * r,
    }
