"""Integral lattices with Gram matrices: constructors, pairings, enumeration.

Vectors are integer tuples in the lattice's fixed basis.  Enumeration is
exact: Fincke-Pohst ranges are derived from rational LDL data with integer
square roots, so no float roundoff can drop a vector.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction


def _frac_isqrt_floor(x):
    """floor(sqrt(x)) for a nonnegative Fraction."""
    if x < 0:
        raise ValueError("negative argument")
    return math.isqrt(x.numerator * x.denominator) // x.denominator


def _floor_plus_sqrt(t, v):
    """floor(t + sqrt(v)) for Fractions, v >= 0, computed exactly."""
    k = math.floor(t) + _frac_isqrt_floor(v)
    while (k + 1 - t) <= 0 or (k + 1 - t) ** 2 <= v:
        k += 1
    while k - t > 0 and (k - t) ** 2 > v:
        k -= 1
    return k


def _ceil_minus_sqrt(t, v):
    """ceil(t - sqrt(v)) for Fractions, v >= 0, computed exactly."""
    return -_floor_plus_sqrt(-t, v)


def enumeration_budget():
    return int(os.environ.get("BORCHERDS_PHI_BUDGET", 50_000_000))


class BudgetExceeded(RuntimeError):
    pass


class IntegralLattice:
    """Nondegenerate integral lattice given by a symmetric Gram matrix."""

    def __init__(self, gram, name=None):
        self.gram = tuple(tuple(int(x) for x in row) for row in gram)
        self.rank = len(self.gram)
        for i in range(self.rank):
            if len(self.gram[i]) != self.rank:
                raise ValueError("gram matrix must be square")
            for j in range(self.rank):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        self.name = name
        self._signature = None

    def inner(self, x, y):
        if len(x) != self.rank or len(y) != self.rank:
            raise ValueError("coordinate length does not match rank")
        g = self.gram
        return sum(x[i] * sum(g[i][j] * y[j] for j in range(self.rank))
                   for i in range(self.rank))

    def norm(self, x):
        return self.inner(x, x)

    def gram_times(self, x):
        """The integer vector G @ x (pairing functional of x)."""
        g = self.gram
        return tuple(sum(g[i][j] * x[j] for j in range(self.rank))
                     for i in range(self.rank))

    def is_even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def det(self):
        m = [[Fraction(v) for v in row] for row in self.gram]
        return _bareiss_det(m)

    @property
    def signature(self):
        """(p, q) from exact rational congruence diagonalization."""
        if self._signature is None:
            diag = _symmetric_diagonalize([[Fraction(v) for v in row] for row in self.gram])
            p = sum(1 for d in diag if d > 0)
            q = sum(1 for d in diag if d < 0)
            if p + q != self.rank:
                raise ValueError("gram matrix is degenerate")
            self._signature = (p, q)
        return self._signature

    def direct_sum(self, other, name=None):
        n, m = self.rank, other.rank
        gram = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                gram[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                gram[n + i][n + j] = other.gram[i][j]
        return IntegralLattice(gram, name=name)

    def basis_vector(self, i):
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def to_json(self):
        return {"name": self.name, "gram": [list(r) for r in self.gram]}

    def __repr__(self):
        return f"IntegralLattice({self.name or ''} rank {self.rank}, sig {self.signature})"


def _bareiss_det(m):
    """Exact determinant by fraction-free-style elimination over Fractions."""
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


def _symmetric_diagonalize(m):
    """Diagonal entries of a congruent diagonal form (exact Fractions)."""
    n = len(m)
    m = [row[:] for row in m]
    diag = []
    for s in range(n):
        if m[s][s] == 0:
            # prefer swapping in a nonzero diagonal entry
            found = None
            for r in range(s + 1, n):
                if m[r][r] != 0:
                    found = r
                    break
            if found is not None:
                m[s], m[found] = m[found], m[s]
                for row in m:
                    row[s], row[found] = row[found], row[s]
            else:
                r = None
                for j in range(s + 1, n):
                    if m[s][j] != 0:
                        r = j
                        break
                if r is None:
                    diag.append(Fraction(0))
                    continue
                # add +-(row/col r) to make the diagonal entry nonzero;
                # one of the signs always works when m[s][s] = m[r][r] = 0
                t = 1 if 2 * m[s][r] + m[r][r] != 0 else -1
                for k in range(n):
                    m[s][k] += t * m[r][k]
                for k in range(n):
                    m[k][s] += t * m[k][r]
        d = m[s][s]
        diag.append(d)
        for r in range(s + 1, n):
            f = m[r][s] / d
            if f:
                for k in range(n):
                    m[r][k] -= f * m[s][k]
                for k in range(n):
                    m[k][r] -= f * m[k][s]
    return diag


# -- named lattices ---------------------------------------------------------

# Standard E8 Cartan matrix (Bourbaki node order), negated: even negative
# definite, all diagonal entries -2, determinant 1.
_E8_POS = (
    (2, 0, -1, 0, 0, 0, 0, 0),
    (0, 2, 0, -1, 0, 0, 0, 0),
    (-1, 0, 2, -1, 0, 0, 0, 0),
    (0, -1, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, -1),
    (0, 0, 0, 0, 0, 0, -1, 2),
)


def U(k=1):
    return IntegralLattice(((0, k), (k, 0)), name=f"U({k})" if k != 1 else "U")


def E8(scale=1):
    gram = [[-scale * v for v in row] for row in _E8_POS]
    return IntegralLattice(gram, name=f"E8({scale})" if scale != 1 else "E8")


def E8_2():
    return E8(2)


def Lambda():
    """The rank-12 lattice U(2) + U + E8(2), signature (2, 10).

    Basis order: e2, f2 (the U(2) pair), e1, f1 (the U pair), then the
    eight E8(2) coordinates.
    """
    return U(2).direct_sum(U(1)).direct_sum(E8_2(), name="Lambda")


def M_level(level):
    """M_l = U(2/l) + E8(2): the tube-domain lattice at the level-l cusp.

    Basis order: e, f of the hyperbolic part, then E8(2).
    """
    if level == 1:
        return U(2).direct_sum(E8_2(), name="M1")
    if level == 2:
        return U(1).direct_sum(E8_2(), name="M2")
    raise ValueError("level must be 1 or 2")


NAMED = {
    "U": lambda: U(1),
    "U2": lambda: U(2),
    "E8_2": E8_2,
    "Lambda": Lambda,
    "M1": lambda: M_level(1),
    "M2": lambda: M_level(2),
}


def by_name(name):
    try:
        return NAMED[name]()
    except KeyError:
        raise ValueError(f"unknown lattice name {name!r}") from None


# Cusp vectors inside Lambda (basis order e2,f2,e1,f1,E8(2)^8).
def lambda_cusp_vectors():
    zero8 = (0,) * 8
    e2 = (1, 0, 0, 0) + zero8
    f2 = (0, 1, 0, 0) + zero8
    e1 = (0, 0, 1, 0) + zero8
    f1 = (0, 0, 0, 1) + zero8
    return {"e2": e2, "f2": f2, "e1": e1, "f1": f1}


class ConeReference:
    """A fixed choice of positive-cone component of a Lorentzian lattice."""

    def __init__(self, lattice, ref):
        self.lattice = lattice
        self.ref = tuple(ref)
        if lattice.signature[0] != 1:
            raise ValueError("cone reference requires signature (1, n)")
        if lattice.norm(self.ref) < 0:
            raise ValueError("reference vector must have nonnegative norm")

    def contains_open(self, x):
        """x (rational/integer coords) lies in the open cone C+."""
        n = _pair_vec(self.lattice, x, x)
        return n > 0 and _pair_vec(self.lattice, x, self.ref) > 0

    def contains_closed(self, x):
        n = _pair_vec(self.lattice, x, x)
        if n < 0:
            return False
        p = _pair_vec(self.lattice, x, self.ref)
        if p > 0:
            return True
        if p < 0:
            return False
        return all(v == 0 for v in x)


def _pair_vec(lat, x, y):
    g = lat.gram
    r = lat.rank
    return sum(x[i] * sum(g[i][j] * y[j] for j in range(r)) for i in range(r))


def cone_reference(level):
    """The designated C+ component of M_l: closure contains the e,f pair."""
    m = M_level(level)
    ref = tuple(a + b for a, b in zip(m.basis_vector(0), m.basis_vector(1)))
    return ConeReference(m, ref)


def level_of_isotropic(lat, v):
    """Level of a primitive isotropic vector: gcd of its pairings with lat."""
    if lat.norm(v) != 0:
        raise ValueError("vector is not isotropic")
    if math.gcd(*[abs(c) for c in v]) != 1:
        raise ValueError("vector is not primitive")
    gv = lat.gram_times(v)
    return math.gcd(*[abs(c) for c in gv])


def canonical_sign(v):
    for c in v:
        if c > 0:
            return tuple(v)
        if c < 0:
            return tuple(-x for x in v)
    return tuple(v)


def _ldl(P):
    """q(x) = sum_i d_i (x_i + sum_{j>i} l_ij x_j)^2 for positive definite P."""
    n = len(P)
    P = [[Fraction(P[i][j]) for j in range(n)] for i in range(n)]
    L = [[Fraction(0)] * n for _ in range(n)]
    d = [Fraction(0)] * n
    for i in range(n):
        d[i] = P[i][i] - sum(d[k] * L[k][i] * L[k][i] for k in range(i))
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            L[i][j] = (P[i][j] - sum(d[k] * L[k][i] * L[k][j] for k in range(i))) / d[i]
    return d, L


def enumerate_ellipsoid(P, R, center=None, budget=None):
    """All integer x with q(x - center) <= R for positive definite rational P.

    Exact Fincke-Pohst: per-level bounds via integer square roots of
    rationals; deterministic lexicographic-from-last order.
    """
    n = len(P)
    if center is None:
        center = [Fraction(0)] * n
    center = [Fraction(c) for c in center]
    R = Fraction(R)
    if R < 0:
        return []
    d, L = _ldl(P)
    out = []
    x = [0] * n
    budget = budget if budget is not None else enumeration_budget()
    count = 0

    def rec(i, rem):
        nonlocal count
        # offset t_i = center_i - sum_{j>i} L[i][j] (x_j - center_j)
        t = center[i] - sum(L[i][j] * (x[j] - center[j]) for j in range(i + 1, n))
        v = rem / d[i]
        lo = _ceil_minus_sqrt(t, v)
        hi = _floor_plus_sqrt(t, v)
        for xi in range(lo, hi + 1):
            count += 1
            if count > budget:
                raise BudgetExceeded(f"ellipsoid enumeration exceeded budget {budget}")
            x[i] = xi
            used = d[i] * (xi - t) ** 2
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, rem - used)
        x[i] = 0

    rec(n - 1, R)
    out.sort()
    return out


def short_vectors(lat, bound):
    """Nonzero v with |<v,v>| <= bound in a definite lattice, one per +-pair.

    The canonical representative has its first nonzero coordinate positive;
    output is sorted.
    """
    sig = lat.signature
    if sig[0] != 0 and sig[1] != 0:
        raise ValueError("short_vectors requires a definite lattice")
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    sign = -1 if sig[0] == 0 else 1
    P = [[sign * v for v in row] for row in lat.gram]
    seen = set()
    for v in enumerate_ellipsoid(P, bound):
        if any(v):
            seen.add(canonical_sign(v))
    return sorted(seen)


# -- integer Smith normal form ----------------------------------------------

def smith_normal_form(mat):
    """(S, U, V) with S = U @ mat @ V, U and V unimodular, S in Smith form."""
    a = [list(map(int, row)) for row in mat]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    Um = [[int(i == j) for j in range(nr)] for i in range(nr)]
    Vm = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(i, j, q):  # row i -= q * row j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        Um[i] = [x - q * y for x, y in zip(Um[i], Um[j])]

    def col_op(i, j, q):  # col i -= q * col j
        for r in range(nr):
            a[r][i] -= q * a[r][j]
        for r in range(nc):
            Vm[r][i] -= q * Vm[r][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        Um[i], Um[j] = Um[j], Um[i]

    def swap_cols(i, j):
        for r in range(nr):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(nc):
            Vm[r][i], Vm[r][j] = Vm[r][j], Vm[r][i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        Um[i] = [-x for x in Um[i]]

    t = 0
    while t < min(nr, nc):
        # find pivot: smallest nonzero |entry| in the remaining block
        piv = None
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    best = abs(a[i][j])
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        if a[t][t] < 0:
            negate_row(t)
        dirty = False
        for i in range(t + 1, nr):
            if a[i][t]:
                q = a[i][t] // a[t][t]
                row_op(i, t, q)
                if a[i][t]:
                    dirty = True
        for j in range(t + 1, nc):
            if a[t][j]:
                q = a[t][j] // a[t][t]
                col_op(j, t, q)
                if a[t][j]:
                    dirty = True
        if dirty:
            continue
        # divisibility pass: a[t][t] must divide everything below/right
        ok = True
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if a[i][j] % a[t][t]:
                    row_op(t, i, -1)  # add row i to row t, retry
                    ok = False
                    break
            if not ok:
                break
        if ok:
            t += 1
    return a, Um, Vm


def elementary_divisors(mat):
    s, _, _ = smith_normal_form(mat)
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0)) if s[i][i] != 0]


def solve_integer_system(C, t):
    """One integer solution x of C x = t, plus a kernel basis, or None.

    C is an m-by-n integer matrix, t an integer m-vector.
    """
    m = len(C)
    n = len(C[0])
    S, Um, Vm = smith_normal_form(C)
    ut = [sum(Um[i][k] * t[k] for k in range(m)) for i in range(m)]
    x_s = [0] * n
    r = 0
    for i in range(min(m, n)):
        if S[i][i]:
            if ut[i] % S[i][i]:
                return None
            x_s[i] = ut[i] // S[i][i]
            r = i + 1
    for i in range(r, m):
        if ut[i] != 0:
            return None
    part = [sum(Vm[i][k] * x_s[k] for k in range(n)) for i in range(n)]
    kernel = []
    for k in range(r, n):
        kernel.append(tuple(Vm[i][k] for i in range(n)))
    return tuple(part), kernel


def slice_vectors(lat, B, D, m, n, min_norm=-2, budget=None):
    """All x in lat with <x,B> = m, <x,D> = n, <x,x> >= min_norm.

    B, D must be non-proportional isotropic vectors spanning a hyperbolic
    plane (so the kernel of the two pairing constraints is negative
    definite and the slice is finite).  For (m, n) = (0, 0) only the
    canonical representatives of +-pairs are returned, 0 excluded.
    """
    bd = lat.inner(B, D)
    if bd == 0 or lat.norm(B) != 0 or lat.norm(D) != 0:
        raise ValueError("B, D must be non-proportional isotropic vectors")
    gB = lat.gram_times(B)
    gD = lat.gram_times(D)
    sol = solve_integer_system([list(gB), list(gD)], [m, n])
    if sol is None:
        return []
    part, kernel = sol
    if len(kernel) != lat.rank - 2:
        raise ValueError("pairing constraints are degenerate")
    # negative definite Gram on the kernel
    K = kernel
    GK = [[_pair_vec(lat, K[i], K[j]) for j in range(len(K))] for i in range(len(K))]
    P = [[-v for v in row] for row in GK]
    part_norm = lat.norm(part)
    cross = [_pair_vec(lat, part, K[i]) for i in range(len(K))]
    # norm(part + sum y_i K_i) = part_norm + 2 cross.y + y^T GK y >= min_norm
    # <=> y^T P y - 2 cross.y <= part_norm - min_norm
    # complete the square around center c = P^-1 cross
    c = _solve_rational(P, cross)
    const = sum(ci * cr for ci, cr in zip(c, cross))
    R = Fraction(part_norm - min_norm) + const
    out = []
    for y in enumerate_ellipsoid(P, R, center=c, budget=budget):
        v = tuple(p + sum(y[i] * K[i][j] for i in range(len(K)))
                  for j, p in enumerate(part))
        if lat.norm(v) >= min_norm:
            out.append(v)
    if m == 0 and n == 0:
        seen = {canonical_sign(v) for v in out if any(v)}
        return sorted(seen)
    return sorted(out)


def _solve_rational(P, b):
    """Solve P c = b exactly (P symmetric positive definite over Q)."""
    n = len(P)
    aug = [[Fraction(P[i][j]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]
