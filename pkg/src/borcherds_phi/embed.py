"""Pinned primitive isometric embeddings of the period sublattices into
the rank-12 lattice, and the affine-linear period coefficients they induce.

The source Gram matrices are not hard-coded: they are derived from the
cup-product oracle on a rank-4 symplectic H^1 (wedge pairings evaluated by
the Pfaffian rule, orientation pinned by the positive self-pairing of the
period vector) and doubled by the push-pull rule <phi(l), phi(m)> = 2<l, m>.
"""

from __future__ import annotations

import json
import math
from itertools import product as iproduct

from . import lattice as lat

# Basis labels in search order (most constrained first after the pin).
PRODUCT_LABELS = ("fprime", "e", "a", "b")
JACOBIAN_LABELS = ("fprime", "e", "a", "b", "c")


def _pfaffian_pairing(Q, x, y, z, w):
    """<x^y, z^w> on wedge 2-forms of a symplectic rank-4 space."""
    def q(u, v):
        return sum(u[i] * Q[i][j] * v[j] for i in range(4) for j in range(4))

    return q(x, y) * q(z, w) - q(x, z) * q(y, w) + q(x, w) * q(y, z)


class SourceGram:
    """Gram matrix of the period sublattice with named basis labels."""

    def __init__(self, labels, gram, case):
        self.labels = tuple(labels)
        self.gram = tuple(tuple(int(v) for v in row) for row in gram)
        self.case = case
        self.rank = len(self.labels)

    def index(self, label):
        return self.labels.index(label)

    def pairing(self, l1, l2):
        return self.gram[self.index(l1)][self.index(l2)]

    def lattice(self):
        return lat.IntegralLattice(self.gram, name=f"source:{self.case}")

    def __repr__(self):
        return f"SourceGram({self.case}, {self.labels}, {self.gram})"


def derive_source_gram(case):
    """Compute the source Gram by the cup-product oracle.

    H^1 carries the symplectic basis (a1, a2, b1, b2); wedge monomials pair
    by the Pfaffian rule with the orientation normalized so that the theta
    divisor class has self-intersection +2.  The doubling rule then scales
    everything by 2.  The resulting signature and the positivity of
    <period, conj(period)> are verified, not assumed.
    """
    if case not in ("product", "jacobian"):
        raise ValueError("case must be 'product' or 'jacobian'")
    a1, a2, b1, b2 = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    Q = [[0, 0, 1, 0],
         [0, 0, 0, 1],
         [-1, 0, 0, 0],
         [0, -1, 0, 0]]
    # orientation check: [C]^2 = +2 for [C] = a1^b1 + a2^b2
    csq = (_pfaffian_pairing(Q, a1, b1, a1, b1)
           + 2 * _pfaffian_pairing(Q, a1, b1, a2, b2)
           + _pfaffian_pairing(Q, a2, b2, a2, b2))
    if csq != 2:
        raise AssertionError("orientation oracle failed")

    # wedge monomials, as formal combinations [(coeff, (u, v)), ...]
    g12 = [(1, (a1, a2))]
    g34 = [(1, (b1, b2))]
    g23 = [(1, (a2, b1))]
    g14 = [(1, (a1, b2))]
    g13m24 = [(1, (a1, b1)), (-1, (a2, b2))]

    basis = [("fprime", g12), ("e", g34), ("a", g23), ("b", g14)]
    if case == "jacobian":
        basis.append(("c", g13m24))

    def pair(u, v):
        s = 0
        for cu, (x, y) in u:
            for cv, (z, w) in v:
                s += cu * cv * _pfaffian_pairing(Q, x, y, z, w)
        return 2 * s  # the doubling rule

    labels = [l for l, _ in basis]
    gram = [[pair(u, v) for _, v in basis] for _, u in basis]
    src = SourceGram(labels, gram, case)

    # signature check
    sig = src.lattice().signature
    want = (2, 2) if case == "product" else (2, 3)
    if sig != want:
        raise AssertionError(f"oracle signature {sig} != {want}")

    # positivity of <period(T), conj period(T)> at T = diag(i, i)
    # period = fprime + detT*e + T11*a - T22*b (- T12*c), T = diag(i s, i s)
    i_f, i_e, i_a, i_b = (labels.index(x) for x in ("fprime", "e", "a", "b"))
    g = src.gram
    # <p, conj p> = 2 Re(t1 t2bar...) expanded for T = diag(i, i):
    # p = f' - e + i a - i b; conj p = f' - e - i a + i b
    val = (g[i_f][i_f] + g[i_e][i_e] - 2 * g[i_f][i_e]
           + g[i_a][i_a] + g[i_b][i_b] - 2 * g[i_a][i_b])
    if val <= 0:
        raise AssertionError("period positivity oracle failed; wrong orientation")
    return src


class PinnedEmbedding:
    """Images in the rank-12 lattice of a SourceGram basis, with e pinned."""

    def __init__(self, source, level, images):
        self.source = source
        self.level = level
        self.images = {k: tuple(v) for k, v in images.items()}
        self.ambient = lat.Lambda()
        self.flips = []

    def image_matrix(self):
        return [list(self.images[l]) for l in self.source.labels]

    def verify(self):
        """Exact re-verification: Gram equality, primitivity, pin."""
        amb = self.ambient
        labs = self.source.labels
        for i, li in enumerate(labs):
            for j, lj in enumerate(labs):
                got = amb.inner(self.images[li], self.images[lj])
                if got != self.source.gram[i][j]:
                    raise AssertionError(
                        f"gram mismatch at ({li},{lj}): {got} != {self.source.gram[i][j]}")
        pin = lat.lambda_cusp_vectors()["e1" if self.level == 1 else "e2"]
        if self.images["e"] != pin:
            raise AssertionError("pinned image of e does not match the cusp vector")
        divs = lat.elementary_divisors(self.image_matrix())
        if any(d != 1 for d in divs):
            raise AssertionError(f"image sublattice is not primitive: divisors {divs}")
        return True

    def flip_ab(self):
        """Gram-preserving remarking (a, b) -> (-a, -b); recorded."""
        self.images["a"] = tuple(-x for x in self.images["a"])
        self.images["b"] = tuple(-x for x in self.images["b"])
        self.flips.append("ab")

    def flip_c(self):
        self.images["c"] = tuple(-x for x in self.images["c"])
        self.flips.append("c")

    def to_json(self):
        return {
            "case": self.source.case,
            "level": self.level,
            "gram": [list(r) for r in self.source.gram],
            "pins": {"e": "e1" if self.level == 1 else "e2"},
            "images": {k: list(v) for k, v in self.images.items()},
            "flips": list(self.flips),
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return f"PinnedEmbedding({self.source.case}, level {self.level}, {self.images})"


class PeriodCoeffs:
    """Affine-linear period data: z(T) = (A + B T11 + C T12 + D T22)/2 in M_l."""

    def __init__(self, level, A, B, D, C=None):
        self.level = level
        self.A = tuple(A)
        self.B = tuple(B)
        self.D = tuple(D)
        self.C = tuple(C) if C is not None else None
        self.M = lat.M_level(level)
        self.cone = lat.cone_reference(level)

    def validate(self):
        M = self.M
        if M.norm(self.B) != 0 or M.norm(self.D) != 0:
            raise AssertionError("B and D must be isotropic")
        if not self.cone.contains_closed(self.B) or not self.cone.contains_closed(self.D):
            raise AssertionError("B and D must lie in the closed positive cone")
        if M.inner(self.B, self.D) <= 0:
            raise AssertionError("B, D must be non-proportional (positive pairing)")
        return True

    def pair_all(self, v):
        """(<v,A>, <v,B>, <v,C> or 0, <v,D>)."""
        M = self.M
        c = M.inner(v, self.C) if self.C is not None else 0
        return (M.inner(v, self.A), M.inner(v, self.B), c, M.inner(v, self.D))

    def to_json(self):
        return {
            "level": self.level,
            "A": list(self.A),
            "B": list(self.B),
            "C": list(self.C) if self.C is not None else None,
            "D": list(self.D),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(obj["level"], obj["A"], obj["B"], obj["D"],
                   C=obj.get("C"))


# -- embedding search ---------------------------------------------------------

def _e8_pool(max_abs_norm, height):
    """E8(2) vectors with |norm| <= max_abs_norm and |coords| <= height,
    including 0, sorted."""
    e8 = lat.E8_2()
    out = [(0,) * 8]
    for v in lat.enumerate_ellipsoid([[-x for x in row] for row in e8.gram],
                                     max_abs_norm):
        if any(v) and max(abs(c) for c in v) <= height:
            out.append(v)
    return sorted(set(out))


def find_embeddings(src, level, max_results=1, height=6, umax=2, budget=None,
                    diversify=False, accept=None):
    """Backtracking search for pinned primitive embeddings into Lambda.

    Candidate images are assembled from U(2)/U coordinates bounded by
    ``umax`` and an E8(2) pool of coordinate height <= ``height``; linear
    pairing constraints are solved in closed form wherever possible, so
    the tree stays small.  Results are deterministic (lexicographic) and
    each is exactly re-verified before being returned.

    Embeddings whose restricted family would cross a mirror transversally
    in a non-power-series way (mixed-sign root pairings at level 2) are
    filtered out here; the paper's marking freedom guarantees clean ones.

    With ``diversify`` set, at most one result is taken per choice of the
    first image, so consecutive results differ structurally (different
    isometry orbits) instead of exhausting sibling leaves.
    """
    if level not in (1, 2):
        raise ValueError("level must be 1 or 2")
    amb = lat.Lambda()
    cusp = lat.lambda_cusp_vectors()
    pin = cusp["e1"] if level == 1 else cusp["e2"]

    labels = src.labels
    want = {(l1, l2): src.pairing(l1, l2) for l1 in labels for l2 in labels}

    e8 = lat.E8_2()
    # E8(2) parts down to norm -8 are needed: level 2 for even-type
    # markings, level 1 for markings whose phase vector lands in a
    # norm-(-8) class (the ones the theta identity selects).
    max_mu_norm = max([8] + [abs(src.pairing(l, l)) for l in labels])
    pool8 = sorted(_e8_pool(max_mu_norm, height),
                   key=lambda mu: (sum(1 for c in mu if c), sum(abs(c) for c in mu), mu))
    mu_norms = {mu: e8.norm(mu) for mu in pool8}
    results = []
    count = [0]
    budget = budget if budget is not None else lat.enumeration_budget()

    def pool_for(label):
        """Vectors of the required norm with the required pin pairing,
        sorted simplest-first.  Coordinates: (x, y, u, v | mu) for the
        U(2), U and E8(2) summands."""
        need_norm = want[(label, label)]
        p = want[(label, "e")]
        out = []
        for mu in pool8:
            mn = mu_norms[mu]
            for x in range(-umax, umax + 1):
                for y in range(-umax, umax + 1):
                    if level == 1:
                        v = p
                        rem = need_norm - 4 * x * y - mn
                        if v != 0:
                            if rem % (2 * v):
                                continue
                            u = rem // (2 * v)
                            if abs(u) <= 3 * umax:
                                out.append((x, y, u, v) + mu)
                        else:
                            if rem != 0:
                                continue
                            for u in range(-umax, umax + 1):
                                out.append((x, y, u, 0) + mu)
                    else:
                        if p % 2 or 2 * y != p:
                            continue
                        rem = need_norm - 4 * x * y - mn
                        for u in range(-umax, umax + 1):
                            if u != 0:
                                if rem % (2 * u):
                                    continue
                                v = rem // (2 * u)
                                if abs(v) <= 3 * umax:
                                    out.append((x, y, u, v) + mu)
                            elif rem == 0:
                                for v in range(-umax, umax + 1):
                                    out.append((x, y, u, v) + mu)
        if level == 2 and label in ("a", "b"):
            # even-type first: U-coordinates both even make the induced
            # period directions pair evenly with all of M2, which excludes
            # mixed-sign root slices outright
            out.sort(key=lambda w: (w[2] % 2 + w[3] % 2, sum(1 for c in w if c),
                                    sum(abs(c) for c in w), w))
        elif level == 1 and label == "fprime":
            # prefer E8(2) parts of norm -8: the induced phase vector then
            # lands in the quadratic-form class the theta identity selects
            out.sort(key=lambda w: (0 if e8.norm(w[4:]) == -8 else 1,
                                    sum(1 for c in w if c), sum(abs(c) for c in w), w))
        else:
            out.sort(key=lambda w: (sum(1 for c in w if c), sum(abs(c) for c in w), w))
        return out

    import numpy as np

    order = [l for l in labels if l != "e"]
    pools = {label: np.array(pool_for(label), dtype=np.int64).reshape(-1, 12)
             for label in order}

    def backtrack(idx, chosen, pair_rows, cap):
        if len(results) >= cap:
            return
        if idx == len(order):
            emb = PinnedEmbedding(src, level, dict(chosen))
            try:
                emb.verify()
                pc = period_coeffs(emb)
                _mixed_root_guard(pc)
            except (AssertionError, MixedRootFamily):
                return
            if accept is not None and not accept(pc):
                return
            results.append(emb)
            return
        label = order[idx]
        pool = pools[label]
        mask = np.ones(pool.shape[0], dtype=bool)
        for lab in chosen:
            if lab == "e":
                continue
            mask &= (pool @ np.array(pair_rows[lab], dtype=np.int64)
                     == want[(label, lab)])
        count[0] += int(mask.sum()) + 1
        if count[0] > budget:
            raise lat.BudgetExceeded("embedding search budget exceeded")
        partial = [list(chosen[l]) for l in labels if l in chosen]
        for w in map(tuple, pool[mask]):
            if len(results) >= cap:
                return
            w = tuple(int(c) for c in w)
            # a subset of a basis of a primitive sublattice is primitive,
            # so pruning imprimitive partial spans loses no solutions
            if any(d != 1 for d in lat.elementary_divisors(partial + [list(w)])):
                continue
            chosen[label] = w
            pair_rows[label] = amb.gram_times(w)
            # under diversify, each first-image branch yields at most one
            sub_cap = min(cap, len(results) + 1) if (diversify and idx == 0) else cap
            backtrack(idx + 1, chosen, pair_rows, sub_cap)
            del chosen[label]
            del pair_rows[label]

    backtrack(0, {"e": pin}, {"e": amb.gram_times(pin)}, max_results)
    return results


class MixedRootFamily(RuntimeError):
    """The restricted family crosses a root mirror with mixed slice signs."""


def _mixed_root_guard(pc):
    """Raise if level-2 coefficients admit roots with mixed (m, n) signs.

    Mixed roots need <l,B> <l,D> in {-1, -2}; if both B and D pair evenly
    with all of M2 (an even-type marking) no such root exists, so that
    case passes without enumeration.  Otherwise the six candidate slices
    are enumerated exactly.
    """
    if pc.level != 2:
        return
    M = pc.M
    gb = M.gram_times(pc.B)
    gd = M.gram_times(pc.D)
    if all(x % 2 == 0 for x in gb) and all(x % 2 == 0 for x in gd):
        return
    for (m, n) in ((1, -1), (2, -1), (1, -2)):
        for mm, nn in ((m, n), (n, m)):
            vs = [v for v in lat.slice_vectors(M, pc.B, pc.D, mm, nn, -2)
                  if M.norm(v) == -2]
            if vs:
                raise MixedRootFamily(
                    f"roots with slice signs ({mm},{nn}): {vs[:3]}")


def period_coeffs(emb):
    """The constants A, B, C, D of the affine-linear period family.

    Derived from iota_l(z(T)) = period(T)/<period(T), e_l>, where
    period(T) = f' + det T e + T11 a - T22 b - T12 c, projected to the
    designated M_l complement of the hyperbolic plane (e_l, f_l).  The
    normalizer and the (-1)^(2/l) sign of iota_l are taken from the data,
    not assumed.  If B, D land in the negative cone the (a, b) pair is
    flipped (a Gram-preserving remarking), and the flip is recorded.
    """
    amb = emb.ambient
    level = emb.level
    cusp = lat.lambda_cusp_vectors()
    e_l = cusp["e1"] if level == 1 else cusp["e2"]
    f_l = cusp["f1"] if level == 1 else cusp["f2"]
    ell = 1 if level == 1 else 2

    norm_const = amb.inner(emb.images["fprime"], e_l)
    if norm_const == 0:
        raise AssertionError("degenerate pin pairing")

    def to_M(w):
        """M_l component of w in Lambda = span(e_l, f_l) + M_l."""
        pe = amb.inner(w, e_l)
        pf = amb.inner(w, f_l)
        if pf % ell or pe % ell:
            raise AssertionError("projection is not integral")
        ce = pf // ell  # coefficient of e_l
        cf = pe // ell  # coefficient of f_l
        full = [wi - ce * ei - cf * fi for wi, ei, fi in zip(w, e_l, f_l)]
        # drop the hyperbolic-plane coordinates, keep the M_l ones
        if level == 1:
            keep = [0, 1] + list(range(4, 12))
        else:
            keep = [2, 3] + list(range(4, 12))
        for i in (2, 3) if level == 1 else (0, 1):
            if full[i] != 0:
                raise AssertionError("nonzero residue in the hyperbolic plane")
        return tuple(full[i] for i in keep)

    sign_iota = 1 if level == 1 else -1  # (-1)^(2/l)
    s = sign_iota * (1 if norm_const > 0 else -1)
    scale = abs(norm_const)
    if scale != 2:
        raise AssertionError("period normalizer must be +-2 for these sources")

    fM = to_M(emb.images["fprime"])
    aM = to_M(emb.images["a"])
    bM = to_M(emb.images["b"])
    A = tuple(s * x for x in fM)
    B = tuple(s * x for x in aM)
    D = tuple(-s * x for x in bM)
    C = None
    if "c" in emb.images:
        cM = to_M(emb.images["c"])
        C = tuple(-s * x for x in cM)

    pc = PeriodCoeffs(level, A, B, D, C=C)
    if not pc.cone.contains_closed(B):
        emb.flip_ab()
        B = tuple(-x for x in B)
        D = tuple(-x for x in D)
        pc = PeriodCoeffs(level, A, B, D, C=C)
    pc.validate()
    return pc


def theta_character_probe(pc):
    """Necessary condition for a product-type level-1 theta match.

    Along the family, the slice through B + D carries the phase character
    w -> (-1)^(<w,A>/2) on the rank-8 kernel lattice; the theta identity
    forces its sum over the 240 norm-(-4) kernel vectors to be -16 (the
    norm-(-8) class value), not +16 (a root class) or 240 (trivial).
    """
    M = pc.M
    vs = lat.slice_vectors(M, pc.B, pc.D, 0, 0, min_norm=-4)
    gA = M.gram_times(pc.A)
    total = 0
    for v in vs:
        if M.norm(v) != -4:
            continue
        p = sum(a * b for a, b in zip(v, gA))
        if p % 2:
            return False  # phases must be +-1 on the kernel
        total += 2 * (-1) ** ((p // 2) % 2)  # each canonical pair counts twice
    return total == -16


def eichler_transvection(e, a, gram_lat):
    """The isometry x -> x - <a,x> e + <e,x> a - (a^2/2) <e,x> e of an even
    lattice, for isotropic e and a orthogonal to e.  Fixes e."""
    if gram_lat.norm(e) != 0 or gram_lat.inner(e, a) != 0:
        raise ValueError("need e isotropic and a orthogonal to e")
    half = gram_lat.norm(a) // 2

    def act(x):
        pe = gram_lat.inner(e, x)
        pa = gram_lat.inner(a, x)
        return tuple(xi - pa * ei + pe * ai - half * pe * ei
                     for xi, ei, ai in zip(x, e, a))

    return act


def transvected_embedding(emb, a_vec):
    """A second pinned embedding of the same source: apply an Eichler
    transvection fixing the pinned cusp vector."""
    amb = emb.ambient
    pin = emb.images["e"]
    act = eichler_transvection(pin, tuple(a_vec), amb)
    out = PinnedEmbedding(emb.source, emb.level,
                          {k: act(v) for k, v in emb.images.items()})
    out.verify()
    return out


def reconstruct_family_check(emb, pc, samples=((1, 1, 0), (2, 1, 1), (3, 2, -1))):
    """Symbolic-in-T check: iota_l(z(T)) is proportional to the image of
    the period vector, verified at integer T samples (degree-1 data, so a
    few points prove the identity)."""
    amb = emb.ambient
    level = emb.level
    ell = 1 if level == 1 else 2
    cusp = lat.lambda_cusp_vectors()
    e_l = cusp["e1"] if level == 1 else cusp["e2"]
    f_l = cusp["f1"] if level == 1 else cusp["f2"]
    M = pc.M
    keep = ([0, 1] + list(range(4, 12))) if level == 1 else ([2, 3] + list(range(4, 12)))
    sign_iota = 1 if level == 1 else -1

    from fractions import Fraction

    for (t11, t22, t12) in samples:
        if pc.C is None:
            t12 = 0
        # period vector in Lambda coordinates
        det = t11 * t22 - t12 * t12
        w = [Fraction(fp) + det * Fraction(ei) + t11 * Fraction(ai)
             - t22 * Fraction(bi) - (t12 * Fraction(ci) if "c" in emb.images else 0)
             for fp, ei, ai, bi, ci in zip(
                 emb.images["fprime"], emb.images["e"], emb.images["a"],
                 emb.images["b"], emb.images.get("c", (0,) * 12))]
        lam = sum(wi * Fraction(x) for wi, x in zip(w, amb.gram_times(e_l)))
        # z(T) in M coords
        z = [Fraction(pc.A[i] + pc.B[i] * t11 + (pc.C[i] if pc.C else 0) * t12
                      + pc.D[i] * t22, 2) for i in range(M.rank)]
        zsq = sum(z[i] * M.gram[i][j] * z[j] for i in range(M.rank) for j in range(M.rank))
        # iota_l(z) in Lambda coordinates
        iota = [Fraction(0)] * 12
        for i, zi in zip(keep, z):
            iota[i] += sign_iota * zi
        for i in range(12):
            iota[i] += -zsq / 2 * e_l[i] + Fraction(f_l[i], ell)
        for i in range(12):
            if lam * iota[i] != w[i]:
                raise AssertionError(f"family reconstruction failed at T sample {(t11, t22, t12)}")
    return True
