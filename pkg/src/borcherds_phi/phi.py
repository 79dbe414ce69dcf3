"""The Borcherds Phi-function: boundary eta-quotient series, restricted
Fourier expansions along affine period families, numerical evaluation on
the tube domains, and the level-1 to level-2 transformation.

Conventions.  The tube domain at level l is M_l tensor R + i C+, with
M_1 = U(2) + E8(2) and M_2 = U + E8(2) (basis e, f, then E8(2)), and
iota_l(u) = -(u^2/2) e_l + f_l/l + (-1)^(2/l) u.  The level-1 product runs
over the closed positive cone; the level-2 product carries the Weyl-vector
prefactor 2^8 e(2 pi i <e1, w>) and the alternating sign rule.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from . import lattice as lat
from .multiseries import MultiSeries, tensor_from_univariate
from .qseries import ZERO, ONE, I_POW, GaussInt, ExactSeries, binom_int, c_coeffs, factor_power


# -- boundary series -----------------------------------------------------------

def phi1_boundary(order):
    """prod_{n>0} ((1-q^n)/(1+q^n))^8 in q = e^(pi i tau), den 1.

    This is the value of the level-1 expansion along the deepest boundary
    direction; it equals eta(tau/2)^16 / eta(tau)^8 term for term.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    acc = ExactSeries(1, order, {0: ONE})
    for n in range(1, order + 1):
        if n < order:
            acc = acc * factor_power(n, -1, 8, order, 1)
            acc = acc * factor_power(n, 1, -8, order, 1)
    return acc


def phi2_boundary(order):
    """2^8 q^2 prod_{n>0} (1-q^(2n))^((-1)^n 8) in q = e^(pi i sigma).

    Equals 2^8 eta(2 sigma)^16 / eta(sigma)^8; the normalizing constant
    2^8 is pinned by the eta modularity relation between the two cusps.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    acc = ExactSeries(1, order, {0: GaussInt(256, 0)})
    n = 1
    while 2 * n < order:
        acc = acc * factor_power(2 * n, -1, 8 * (-1) ** n, order, 1)
        n += 1
    return acc.shift(2).truncate(order)


def phi1_boundary_eta(order):
    """The eta-quotient route: eta(tau/2)^16/eta(tau)^8 in q = e^(pi i tau)."""
    from .qseries import eta_quotient
    s = eta_quotient([(1, 16), (2, -8)], order)  # in tau' = tau/2 units
    out = {}
    for e, c in s.terms.items():
        if e % 24:
            raise ArithmeticError("boundary eta quotient has fractional exponents")
        out[e // 24] = c
    return ExactSeries(1, order, out)


def phi2_boundary_eta(order):
    """2^8 eta(2 sigma)^16/eta(sigma)^8 in q = e^(pi i sigma)."""
    from .qseries import eta_quotient
    s = eta_quotient([(4, 16), (2, -8)], order)  # in sigma' = sigma/2 units
    out = {}
    for e, c in s.terms.items():
        if e % 24:
            raise ArithmeticError("boundary eta quotient has fractional exponents")
        out[e // 24] = c * 256
    return ExactSeries(1, order, out)


# -- tube-domain points --------------------------------------------------------

class TubePoint:
    """A point z in M_l tensor C with Im z in the open positive cone."""

    def __init__(self, level, z):
        self.level = level
        self.M = lat.M_level(level)
        self.z = np.asarray(z, dtype=complex)
        if self.z.shape != (self.M.rank,):
            raise ValueError("coordinate length does not match the lattice rank")
        self.G = np.array(self.M.gram, dtype=float)
        y = self.z.imag
        ysq = y @ self.G @ y
        ref = np.array(lat.cone_reference(level).ref, dtype=float)
        if ysq <= 0 or y @ self.G @ ref <= 0:
            raise ValueError("Im z must lie in the designated open positive cone")

    def pair(self, v):
        return complex(np.asarray(v, dtype=complex) @ self.G @ self.z)

    def zsq(self):
        return complex(self.z @ self.G @ self.z)

    def im_norm(self):
        y = self.z.imag
        return float(y @ self.G @ y)

    def translate(self, v):
        return TubePoint(self.level, self.z + np.asarray(v, dtype=float))

    def to_json(self):
        return {"level": self.level,
                "z": [[c.real, c.imag] for c in self.z]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["level"], [complex(a, b) for a, b in obj["z"]])


def level_transform(p):
    """The level-1 to level-2 coordinate change w with iota_1(z)/<z,e2> =
    iota_2(w); requires <z, e2> != 0 and checks the image cone condition."""
    if p.level != 1:
        raise ValueError("input must be a level-1 tube point")
    m1 = p.M
    e2 = np.zeros(m1.rank)
    e2[0] = 1
    f2 = np.zeros(m1.rank)
    f2[1] = 1
    G = p.G
    pe2 = complex(e2 @ G @ p.z)
    pf2 = complex(f2 @ G @ p.z)
    if pe2 == 0:
        raise ValueError("<z, e2> must be nonzero")
    zsq = p.zsq()
    zE = p.z - pf2 * e2 / 2 - pe2 * f2 / 2
    w = np.zeros(10, dtype=complex)
    w[0] = (zsq / 2) / pe2          # e1 coefficient
    w[1] = -1 / pe2                 # f1 coefficient
    w[2:] = -zE[2:] / pe2           # E8(2) block
    if (-1 / pe2).imag <= 0:
        raise ValueError("image fails the positive-cone condition")
    return TubePoint(2, w)


def iota_vector(p):
    """iota_l(z) as a 12-vector over the ambient lattice basis."""
    amb = lat.Lambda()
    cusp = lat.lambda_cusp_vectors()
    e_l = np.array(cusp["e1" if p.level == 1 else "e2"], dtype=float)
    f_l = np.array(cusp["f1" if p.level == 1 else "f2"], dtype=float)
    ell = p.level
    keep = ([0, 1] + list(range(4, 12))) if p.level == 1 else ([2, 3] + list(range(4, 12)))
    sign = 1 if p.level == 1 else -1
    out = np.zeros(12, dtype=complex)
    for i, zi in zip(keep, p.z):
        out[i] += sign * zi
    out += -(p.zsq() / 2) * e_l + f_l / ell
    return out


# -- restricted expansions -------------------------------------------------------

class ExpansionError(RuntimeError):
    pass


class MixedRootError(ExpansionError):
    """Roots with mixed slice signs: the restriction leaves Z{q11,q12,q22}."""


class RestrictedExpansion:
    """Truncated expansion of Phi_l along z(T) = (A + B T11 + C T12 + D T22)/2.

    ``series`` is a MultiSeries in q_mn = e^(pi i T_mn) (den 4); for level 2
    a vanishing expansion (mirror case) is the zero series.
    """

    def __init__(self, level, coeffs, series, order, mirror_vanishing=False):
        self.level = level
        self.coeffs = coeffs
        self.series = series
        self.order = order
        self.mirror_vanishing = mirror_vanishing

    def is_zero(self):
        return self.series.is_zero()

    def to_json(self):
        return {"level": self.level, "order": self.order,
                "mirror_vanishing": self.mirror_vanishing,
                "series": self.series.to_json()}


def _slice_enumerator(pc):
    """Precomputed data for fast per-slice lattice enumeration."""
    M = pc.M
    gB = M.gram_times(pc.B)
    gD = M.gram_times(pc.D)
    C2 = [list(gB), list(gD)]
    S, U, V = lat.smith_normal_form(C2)
    r = M.rank
    kernel = [tuple(V[i][k] for i in range(r)) for k in range(2, r)]
    GK = np.array([[lat._pair_vec(M, a, b) for b in kernel] for a in kernel],
                  dtype=np.int64)
    P = -GK
    # float Cholesky for range bounds; exact integer filters afterwards
    Lc = np.linalg.cholesky(np.array(P, dtype=float))
    return {
        "M": M, "S": S, "U": U, "V": V, "kernel": np.array(kernel, dtype=np.int64),
        "GK": GK, "P": P, "Lc": Lc,
        "gB": np.array(gB, dtype=np.int64), "gD": np.array(gD, dtype=np.int64),
        "gram": np.array(M.gram, dtype=np.int64),
    }


def _particular_solution(data, m, n):
    S, U, V = data["S"], data["U"], data["V"]
    r = data["M"].rank
    ut = [U[0][0] * m + U[0][1] * n, U[1][0] * m + U[1][1] * n]
    mu = [0] * r
    for i in range(2):
        if S[i][i] == 0:
            if ut[i]:
                return None
            continue
        if ut[i] % S[i][i]:
            return None
        mu[i] = ut[i] // S[i][i]
    return np.array([sum(V[i][k] * mu[k] for k in range(r)) for i in range(r)],
                    dtype=np.int64)


def _slice_setup(data, m, n, min_norm):
    """Shared geometry for enumerating one slice: particular solution,
    ellipsoid center and radius; None when the slice is empty."""
    part = _particular_solution(data, m, n)
    if part is None:
        return None
    K = data["kernel"]
    G = data["gram"]
    P = np.array(data["P"], dtype=float)
    part_norm = int(part @ G @ part)
    cross = (K @ (G @ part)).astype(float)
    c = np.linalg.solve(P, cross)
    R = float(part_norm - min_norm) + float(cross @ c)
    if R < -1e-9:
        return None
    return part, K, G, P, c, R


def _enumerate_slice(data, m, n, min_norm=-2, budget=None):
    """Integer matrix of all lattice vectors in the (m, n) slice with
    norm >= min_norm; rows sorted lexicographically.  Only suitable for
    small slices; big ones go through _stream_slice_classes."""
    setup = _slice_setup(data, m, n, min_norm)
    if setup is None:
        return np.zeros((0, data["M"].rank), dtype=np.int64)
    part, K, G, P, c, R = setup
    ys = _enumerate_pd_numpy(P, R + 1e-6, c, budget=budget)
    if ys.shape[0] == 0:
        return np.zeros((0, data["M"].rank), dtype=np.int64)
    vecs = part[None, :] + ys @ K
    norms = np.einsum("ij,jk,ik->i", vecs, G, vecs)
    vecs = vecs[norms >= min_norm]
    order = np.lexsort(vecs.T[::-1])
    return vecs[order]


def _stream_slice_classes(data, m, n, gA, gC, gef, level, budget=None):
    """Aggregate one slice into factor classes without materializing it.

    Returns {(phase, cross): K} where K sums c(lambda^2/2) over the class
    (level 1) or the sign-twisted sum (level 2); phases are <lambda, A>
    mod 4 (level 1) or mod 2 (level 2).
    """
    min_norm = -2
    setup = _slice_setup(data, m, n, min_norm)
    if setup is None:
        return {}
    part, K, G, P, c, R = setup
    # precompute reduced linear data: val(v) = val(part) + y @ (K @ g)
    base_A = int(part @ gA)
    kA = K @ gA
    base_C = int(part @ gC) if gC is not None else 0
    kC = K @ gC if gC is not None else None
    base_ef = int(part @ gef) if gef is not None else 0
    kef = K @ gef if gef is not None else None
    base_norm = int(part @ G @ part)
    kcross2 = 2 * (K @ (G @ part))  # 2 <K_i, part>
    GK = data["GK"]

    counts = {}
    for ys in _iter_pd_chunks(P, R + 1e-6, c, budget=budget):
        norms = base_norm + ys @ kcross2 + np.einsum("ij,jk,ik->i", ys, GK, ys)
        keep = norms >= min_norm
        if level == 1:
            keep &= norms >= 0
        if not keep.any():
            continue
        ys = ys[keep]
        norms = norms[keep]
        phases = (base_A + ys @ kA) % (4 if level == 1 else 2)
        crosses = (base_C + ys @ kC) if kC is not None else np.zeros(len(ys), dtype=np.int64)
        if level == 2:
            signs = (base_ef + ys @ kef) % 2
            packed = (norms.astype(np.int64) + 8) * 2 ** 24 \
                + (crosses.astype(np.int64) + 2 ** 11) * 2 ** 3 \
                + phases.astype(np.int64) * 2 + signs.astype(np.int64)
        else:
            packed = (norms.astype(np.int64) + 8) * 2 ** 24 \
                + (crosses.astype(np.int64) + 2 ** 11) * 2 ** 3 \
                + phases.astype(np.int64)
        uniq, cnt = np.unique(packed, return_counts=True)
        for u, k in zip(uniq.tolist(), cnt.tolist()):
            counts[u] = counts.get(u, 0) + k
    return counts


def _unpack_class(u, level):
    if level == 2:
        sign = u & 1
        phase = (u >> 1) & 1
        rest = u >> 3
    else:
        sign = 0
        phase = u & 3
        rest = u >> 3
    cross = (rest & (2 ** 13 - 1)) - 2 ** 11
    norm = (u >> 24) - 8
    return norm, phase, cross, sign


def _iter_pd_chunks(P, R, center, budget=None, chunk_rows=262144):
    """Yield integer points with (y-center)^T P (y-center) <= R in chunks.

    The recursion vectorizes the innermost level; chunks of at most
    ``chunk_rows`` integer rows are yielded so callers can aggregate
    without materializing huge slices.  Float bounds carry a small safety
    margin; exact filtering happens in the caller.
    """
    nvar = P.shape[0]
    L = np.linalg.cholesky(P)  # P = L L^T
    LT = L.T
    budget = budget if budget is not None else lat.enumeration_budget()
    state = {"count": 0, "rows": 0}
    y = np.zeros(nvar)
    pending = []

    def rec(i, rem, partial):
        d = LT[i, i]
        t = center[i] - partial[i] / d
        s = math.sqrt(max(rem, 0.0)) / d
        lo = math.ceil(t - s - 1e-9)
        hi = math.floor(t + s + 1e-9)
        if lo > hi:
            return
        state["count"] += hi - lo + 1
        if state["count"] > budget:
            raise lat.BudgetExceeded(
                f"enumeration budget {budget} exceeded; raise "
                "BORCHERDS_PHI_BUDGET or lower the cutoff/order")
        if i == 0:
            block = np.empty((hi - lo + 1, nvar))
            block[:, 0] = np.arange(lo, hi + 1)
            block[:, 1:] = y[1:]
            pending.append(block)
            state["rows"] += block.shape[0]
            if state["rows"] >= chunk_rows:
                out = np.array(np.rint(np.vstack(pending)), dtype=np.int64)
                pending.clear()
                state["rows"] = 0
                yield out
            return
        for yi in range(lo, hi + 1):
            y[i] = yi
            used = (d * (yi - t)) ** 2
            yield from rec(i - 1, rem - used, partial + LT[:, i] * (yi - center[i]))

    yield from rec(nvar - 1, R, np.zeros(nvar))
    if pending:
        yield np.array(np.rint(np.vstack(pending)), dtype=np.int64)


def _enumerate_pd_numpy(P, R, center, budget=None):
    """All integer points with (y-center)^T P (y-center) <= R as one array."""
    chunks = list(_iter_pd_chunks(P, R, center, budget=budget))
    if not chunks:
        return np.zeros((0, P.shape[0]), dtype=np.int64)
    return np.vstack(chunks)


def _quotient_factor_coeffs(K, jmax):
    """Coefficients t_j of ((1-y)/(1+y))^K up to y^jmax, exact integers."""
    num = [binom_int(K, j) * (-1) ** j for j in range(jmax + 1)]
    den = [binom_int(-K, j) for j in range(jmax + 1)]
    out = [0] * (jmax + 1)
    for i, a in enumerate(num):
        if a:
            for j, b in enumerate(den[: jmax + 1 - i]):
                out[i + j] += a * b
    return out


def _power_factor_coeffs(K, jmax):
    """Coefficients of (1-y)^K up to y^jmax, exact integers."""
    return [binom_int(K, j) * (-1) ** j for j in range(jmax + 1)]


def restricted_expansion(pc, order, budget=None):
    """Assemble the truncated expansion of Phi_l along the period family.

    Slices are indexed by the pairings (m, n) = (<lambda,B>, <lambda,D>) >=
    (0, 0); the (0, 0) slice contributes constant root factors (level 2),
    where a trivial-phase root annihilates the whole expansion (the mirror
    case).  All coefficients must come out rational integers.
    """
    pc.validate()
    level = pc.level
    den = 4
    lim = den * order
    data = _slice_enumerator(pc)
    M = pc.M
    G = data["gram"]
    gA = np.array(M.gram_times(pc.A), dtype=np.int64)
    gC = (np.array(M.gram_times(pc.C), dtype=np.int64)
          if pc.C is not None else None)

    # diag degree (in den-4 units) of the basic slice monomial
    unit = 2 if level == 1 else 4
    cmax = (2 * order) ** 2 // 2 + 4
    cs = c_coeffs(cmax)

    def cval(nu2):  # c(lambda^2 / 2), lambda^2 = nu2
        half = nu2 // 2
        if half < -1:
            return 0
        return cs[half + 1]

    acc = MultiSeries(den, lim, cross=8 * lim + 64, terms={(0, 0, 0): ONE})
    pow2 = 8 if level == 2 else 0
    sign_unit = ONE
    mirror = False

    if level == 2:
        e1 = np.zeros(M.rank, dtype=np.int64)
        e1[0] = 1
        f1 = np.zeros(M.rank, dtype=np.int64)
        f1[1] = 1
        gef = np.array(M.gram_times(tuple(e1 - f1)), dtype=np.int64)
        # mixed-root guard (exact; these slices are tiny)
        for (mm, nn) in ((1, -1), (-1, 1), (2, -1), (-1, 2), (1, -2), (-2, 1)):
            vs = _enumerate_slice(data, mm, nn, -2, budget=budget)
            if vs.shape[0]:
                norms = np.einsum("ij,jk,ik->i", vs, G, vs)
                bad = vs[norms == -2]
                if bad.shape[0]:
                    raise MixedRootError(
                        f"slice ({mm},{nn}) contains roots {bad[:2].tolist()}; "
                        "the restriction is not a power series for this marking")
        # prefactor 2^8 e(<e1, z(T)>): exponents (den-4) = 4<e1,B> etc.
        pA, pB, pC, pD = pc.pair_all(tuple(int(x) for x in e1))
        if pB < 0 or pD < 0:
            raise ExpansionError("Weyl vector pairs negatively with the family")
        sign_unit = sign_unit * (ONE if pA % 2 == 0 else GaussInt(-1, 0))
        prefactor_key = (den * pB, den * pC, den * pD)
        # (0,0)-slice roots: constant factors
        zero_slice = _enumerate_slice(data, 0, 0, -2, budget=budget)
        if zero_slice.shape[0]:
            norms = np.einsum("ij,jk,ik->i", zero_slice, G, zero_slice)
            roots = zero_slice[norms == -2]
            seen = set()
            for v in map(tuple, roots):
                cv = lat.canonical_sign([int(x) for x in v])
                if cv in seen:
                    continue
                seen.add(cv)
                varr = np.array(cv, dtype=np.int64)
                if gC is not None and int(varr @ gC) != 0:
                    raise MixedRootError(
                        f"(0,0)-slice root {cv} pairs with C; the restriction "
                        "has an unbounded cross-variable factor")
                rho = (-1) ** (int(varr @ gA) % 2)
                s = (-1) ** (int(varr @ gef) % 2)
                if rho == 1:
                    mirror = True
                else:
                    pow2 += s
    else:
        prefactor_key = (0, 0, 0)

    if mirror:
        series = MultiSeries(den, lim, cross=8 * lim + 64)
        return RestrictedExpansion(level, pc, series, order, mirror_vanishing=True)

    # positive slices, cheapest (lowest diag degree) first
    slices = [(m, n) for m in range(0, lim // unit + 1)
              for n in range(0, lim // unit + 1)
              if 0 < unit * (m + n) < lim]
    slices.sort(key=lambda mn: (mn[0] + mn[1], mn[0]))

    gef_arr = None
    if level == 2:
        gef_arr = gef
    for (m, n) in slices:
        counts = _stream_slice_classes(data, m, n, gA, gC, gef_arr, level,
                                       budget=budget)
        if not counts:
            continue
        groups = {}
        for u, cnt in counts.items():
            nu, ph, cr, sg = _unpack_class(u, level)
            k = cval(nu)
            if not k:
                continue
            if level == 2:
                k *= (-1) ** sg
            key = (ph, cr)
            groups[key] = groups.get(key, 0) + k * cnt
        base_deg = unit * (m + n)
        jmax = (lim - 1) // base_deg
        for (ph, cr), K in sorted(groups.items()):
            if K == 0:
                continue
            if level == 1:
                tj = _quotient_factor_coeffs(K, jmax)
                rho = I_POW[ph % 4]
                key = (2 * m, 2 * cr, 2 * n)
            else:
                tj = _power_factor_coeffs(K, jmax)
                rho = I_POW[(2 * ph) % 4]
                key = (4 * m, 4 * cr, 4 * n)
            terms = {}
            rho_j = ONE
            for j, t in enumerate(tj):
                if t:
                    terms[(key[0] * j, key[1] * j, key[2] * j)] = rho_j * t
                rho_j = rho_j * rho
            fac = MultiSeries(den, lim, cross=8 * lim + 64, terms=terms)
            acc = acc * fac

    # apply prefactor monomial, sign and the exact power of two
    if pow2 < 0:
        raise ExpansionError("assembled constant is not an integer (negative "
                             "power of two); invariant violation")
    scale = (2 ** pow2)
    shifted = {}
    pk = prefactor_key
    for (a, b, c), coeff in acc.terms.items():
        if a + pk[0] + c + pk[2] < lim:
            shifted[(a + pk[0], b + pk[1], c + pk[2])] = coeff * scale * sign_unit
    series = MultiSeries(den, lim, cross=8 * lim + 64, terms=shifted)
    series.integer_coeffs_or_raise()
    if level == 1:
        const = series.terms.get((0, 0, 0), ZERO)
        if const != ONE:
            raise ExpansionError(f"level-1 constant term is {const!r}, not 1")
    else:
        val = series.diag_valuation()
        if val is not None and val <= 0:
            raise ExpansionError("level-2 expansion must have positive valuation")
    return RestrictedExpansion(level, pc, series, order)


# -- numerical evaluation --------------------------------------------------------

class PhiValue:
    def __init__(self, value, tail_bound, nfactors, cutoff):
        self.value = value
        self.tail_bound = tail_bound
        self.nfactors = nfactors
        self.cutoff = cutoff

    def __repr__(self):
        return (f"PhiValue({self.value!r}, tail<={self.tail_bound:.2e}, "
                f"{self.nfactors} factors, cutoff {self.cutoff})")

    def to_json(self):
        return {"value": [self.value.real, self.value.imag],
                "tail_bound": self.tail_bound,
                "nfactors": self.nfactors, "cutoff": self.cutoff}


def _slab_vectors(M, y, H, min_norm, budget=None):
    """All lattice vectors with 0 < <v, y> <= H and norm >= min_norm,
    via the positive-definite majorant 2<v,y>^2/y^2 - v^2."""
    G = np.array(M.gram, dtype=np.int64)
    Gf = np.array(M.gram, dtype=float)
    gy = Gf @ y
    ysq = float(y @ gy)
    if ysq <= 0:
        raise ValueError("y must lie in the positive cone")
    P = 2.0 * np.outer(gy, gy) / ysq - Gf
    R = 2.0 * H * H / ysq - min_norm + 1e-6
    ys = _enumerate_pd_numpy(P, R, np.zeros(M.rank), budget=budget)
    if ys.shape[0] == 0:
        return ys, np.zeros(0), np.zeros(0, dtype=np.int64)
    pair = ys @ gy
    norms = np.einsum("ij,jk,ik->i", ys, G, ys)
    keep = (pair > 1e-9) & (pair <= H + 1e-9) & (norms >= min_norm)
    vecs = ys[keep]
    order = np.lexsort(vecs.T[::-1])
    return vecs[order], pair[keep][order], norms[keep][order]


def eval_numeric(p, cutoff=8.0, budget=4_000_000):
    """Truncated product value of Phi_l at a tube point.

    Factors indexed by lattice vectors of pairing height <= ``cutoff``
    against Im z are retained; the reported tail bound is a geometric
    envelope on the dropped log-factors (a stated heuristic, not a proof).

    Level 2 additionally requires the point to lie in the Weyl chamber
    adjacent to the cusp vector e1: every root factor must contract, else
    the product formula does not converge there and the call refuses.
    """
    level = p.level
    M = p.M
    y = p.z.imag
    min_norm = 0 if level == 1 else -2
    vecs, pairs, norms = _slab_vectors(M, y, cutoff, min_norm, budget=budget)
    cmax = int(max(int(norms.max(initial=0)) // 2 + 2, 8))
    cs = c_coeffs(cmax)
    G = np.array(M.gram, dtype=np.int64)
    gz = np.array(M.gram, dtype=float) @ p.z

    log_total = 0j
    nfac = 0
    shell_weight = 0.0
    if level == 2:
        e1 = np.zeros(M.rank, dtype=np.int64)
        e1[0] = 1
        f1 = np.zeros(M.rank, dtype=np.int64)
        f1[1] = 1
        ge1 = G @ e1
        gef = G @ (e1 - f1)
        # prefactor 2^8 e(<e1, w>)
        log_total += 8 * math.log(2) + 2j * cmath.pi * complex(e1 @ gz)

    for v, pr, nu in zip(vecs, pairs, norms):
        half = int(nu) // 2
        c = cs[half + 1] if half >= -1 else 0
        if c == 0:
            continue
        zpair = complex(v @ gz)
        if level == 1:
            x = cmath.exp(1j * cmath.pi * zpair)
            if abs(x) >= 1:
                raise ValueError(f"point too shallow: |q| >= 1 at height {pr:.3f}")
            term = c * (cmath.log(1 - x) - cmath.log(1 + x))
            weight = 2 * abs(c) * abs(x)
        else:
            if int(nu) == -2 and int(v @ ge1) <= 0:
                # the mirror of this root separates Im w from the cusp
                # chamber; the level-2 product formula does not apply here
                raise ValueError(
                    "point is outside the chamber adjacent to e1: root "
                    f"{v.tolist()} has nonpositive pairing with e1")
            s = (-1) ** (int(v @ gef) % 2)
            x = cmath.exp(2j * cmath.pi * zpair)
            if abs(x) >= 1:
                raise ValueError(f"point too shallow at height {pr:.3f}")
            term = s * c * cmath.log(1 - x)
            weight = abs(c) * abs(x)
        log_total += term
        nfac += 1
        if pr > cutoff - 1:
            shell_weight += weight
    tail = 3.0 * shell_weight  # geometric envelope past the cutoff shell
    return PhiValue(cmath.exp(log_total), tail, nfac, cutoff)


def petersson_sq(p, value=None, cutoff=12.0):
    """<Im z, Im z>^4 |Phi_l(z)|^2, the modular-invariant square norm."""
    if value is None:
        value = eval_numeric(p, cutoff=cutoff).value
    return p.im_norm() ** 4 * abs(value) ** 2


def phi_along_family(pc, tau1, tau2, t12=0.0, cutoff=8.0):
    """Numeric Phi_l at z(T) for T = [[tau1, t12], [t12, tau2]]."""
    z = [(pc.A[i] + pc.B[i] * tau1
          + (pc.C[i] * t12 if pc.C is not None else 0.0)
          + pc.D[i] * tau2) / 2.0 for i in range(pc.M.rank)]
    return eval_numeric(TubePoint(pc.level, z), cutoff=cutoff)
