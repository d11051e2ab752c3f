"""Bitangent lines of the Fermat quintic: contact conditions, the map m, its base locus,
the Z4^4 exceptional tags and the linear system for rational curves in the Dwork pencil."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .polyalg import QQ, MultiPoly, PolyRing, PrimeField


class BaseLocus(ValueError):
    """All five M_i vanish at the given point."""


class EmptyKernel(ArithmeticError):
    """The evaluation matrix has full column rank."""


class FatKernel(ArithmeticError):
    """The kernel has dimension > 1; the basis is attached."""

    def __init__(self, basis):
        super().__init__(f"kernel of dimension {len(basis)}")
        self.basis = basis


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class PointP4:
    """Homogeneous coordinates; equality is proportionality."""

    coords: tuple
    domain: object = QQ

    def __post_init__(self):
        if len(self.coords) != 5:
            raise ValueError("a point of P^4 needs five coordinates")
        coords = tuple(self.domain.convert(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if all(self.domain.is_zero(c) for c in coords):
            raise ValueError("all coordinates are zero")

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other):
        if not isinstance(other, PointP4):
            return NotImplemented
        return proportional(self.coords, other.coords, self.domain)

    def __hash__(self):
        return hash(sum(1 for c in self.coords if not self.domain.is_zero(c)))

    def __repr__(self):
        return "[" + ":".join(self.domain.to_str(c) for c in self.coords) + "]"


def proportional(a, b, dom):
    """True when every 2x2 minor of the 2 x n matrix (a; b) vanishes."""
    for i, j in itertools.combinations(range(len(a)), 2):
        if not dom.is_zero(dom.sub(dom.mul(a[i], b[j]), dom.mul(a[j], b[i]))):
            return False
    return True


def _sum(dom, items):
    out = dom.zero
    for x in items:
        out = dom.add(out, x)
    return out


def contact_residuals(P, Q):
    """sum_i q_i^k p_i^(5-k) for k = 0, 1, 4, 5."""
    dom = P.domain
    out = []
    for k in (0, 1, 4, 5):
        out.append(_sum(dom, (dom.mul(dom.pow(q, k), dom.pow(p, 5 - k)) for p, q in zip(P, Q))))
    return tuple(out)


# ---------------------------------------------------------------------------
# the map m


def _vdm(dom, vals):
    out = dom.one
    for j in range(len(vals)):
        for k in range(j):
            out = dom.mul(out, dom.sub(vals[j], vals[k]))
    return out


def _esym(dom, vals):
    """e_0..e_len(vals) by the product expansion."""
    e = [dom.one] + [dom.zero] * len(vals)
    for v in vals:
        for k in range(len(e) - 1, 0, -1):
            e[k] = dom.add(e[k], dom.mul(v, e[k - 1]))
    return e


def kernel_factors(U):
    """Pointwise (d_i, n_i, M_i) with M_i = (-1)^i d_i n_i."""
    dom = U.domain
    us = list(U)
    d, n, M = [], [], []
    for i in range(5):
        rest = us[:i] + us[i + 1:]
        e = _esym(dom, rest)
        di = _vdm(dom, rest)
        ni = dom.sub(dom.mul(e[2], e[2]), dom.mul(e[1], e[3]))
        mi = dom.mul(di, ni)
        d.append(di)
        n.append(ni)
        M.append(mi if i % 2 == 0 else dom.neg(mi))
    return tuple(d), tuple(n), tuple(M)


def m_map(U):
    """[M_0(U):...:M_4(U)], raising BaseLocus when every M_i vanishes."""
    M = kernel_factors(U)[2]
    if all(U.domain.is_zero(x) for x in M):
        raise BaseLocus(f"{U!r} lies in the base locus of m")
    return PointP4(M, U.domain)


def iota(U):
    """u_i -> 1/u_i, written projectively as u_i -> prod_{j != i} u_j."""
    dom = U.domain
    us = list(U)
    out = []
    for i in range(5):
        term = dom.one
        for j in range(5):
            if j != i:
                term = dom.mul(term, us[j])
        out.append(term)
    return PointP4(tuple(out), dom)


V_VARS = ("v0", "v1", "v2", "v3", "v4")


@dataclass
class BitangentDatum:
    """u-coordinates, the kernel vector M and the two linear forms cutting the plane."""

    U: PointP4
    M: tuple
    lambda_forms: tuple

    def kernel_residuals(self):
        dom = self.U.domain
        return {
            m: _sum(dom, (dom.mul(Mi, dom.pow(u, m)) for Mi, u in zip(self.M, self.U)))
            for m in (0, 1, 4, 5)
        }


def bitangent_datum(U):
    M = m_map(U).coords
    ring = PolyRing(V_VARS, U.domain)
    vs = ring.gens()
    dom = U.domain
    first = ring.zero()
    second = ring.zero()
    for i in range(5):
        first = first + vs[i].scale(M[i])
        second = second + vs[i].scale(dom.mul(M[i], dom.pow(U[i], 4)))
    return BitangentDatum(U, M, (first, second))


# ---------------------------------------------------------------------------
# base locus


@dataclass(frozen=True)
class PlanePair:
    """V(u_i - u_j, u_k - u_l) with {i,j}, {k,l} disjoint, or V(u_i - u_j, u_j - u_k) when j == k."""

    i: int
    j: int
    k: int
    l: int


@dataclass(frozen=True)
class QuarticSurface:
    """V(u_i - u_j, n_i)."""

    i: int
    j: int


@dataclass(frozen=True)
class SexticComponent:
    """V(e_2, e_3)."""


@dataclass(frozen=True)
class NotInBaseLocus:
    pass


def base_locus_planes():
    """The 15 planes from two disjoint coincidences and the 10 from a triple coincidence."""
    planes = []
    pairs = list(itertools.combinations(range(5), 2))
    for a, b in itertools.combinations(pairs, 2):
        if not set(a) & set(b):
            planes.append(PlanePair(*a, *b))
    for i, j, k in itertools.combinations(range(5), 3):
        planes.append(PlanePair(i, j, j, k))
    return planes


def base_locus_classify(U):
    """First listed component of the base locus of m containing U."""
    dom = U.domain
    eq = dom.eq
    for pl in base_locus_planes():
        if eq(U[pl.i], U[pl.j]) and eq(U[pl.k], U[pl.l]):
            return pl
    e = _esym(dom, list(U))
    if dom.is_zero(e[2]) and dom.is_zero(e[3]):
        return SexticComponent()
    n = kernel_factors(U)[1]
    for i, j in itertools.combinations(range(5), 2):
        if eq(U[i], U[j]) and dom.is_zero(n[i]):
            return QuarticSurface(i, j)
    return NotInBaseLocus()


# ---------------------------------------------------------------------------
# exceptional tags


@dataclass(frozen=True)
class ExceptionalTag:
    """k in Z4^4 (exponents of sqrt(-1) relative to the first coordinate); None when no tag fits."""

    k: tuple | None
    searched: int = 256
    even_only: bool = False

    @property
    def found(self):
        return self.k is not None

    @property
    def nontrivial(self):
        return self.k is not None and any(x % 4 for x in self.k)

    @property
    def full(self):
        """The tag as a five-vector with leading zero."""
        return None if self.k is None else (0, *self.k)


def _sqrt_minus_one(dom):
    if isinstance(dom, PrimeField):
        r = dom.sqrt(dom.convert(-1))
        return None if r is None else dom.convert(r)
    return None


def exceptional_tag(P, Q, i_unit=None):
    """Search k in Z4^4 with Q proportional to [p_0 : i^k1 p_1 : ... : i^k4 p_4].

    ``i_unit`` is a square root of -1 in the domain; for prime fields it is found
    automatically.  Without one only the 16 even tags are tried.
    """
    dom = P.domain
    if i_unit is None:
        i_unit = _sqrt_minus_one(dom)
    if i_unit is None:
        units = [dom.one, None, dom.convert(-1), None]
        choices = (0, 2)
    else:
        units = [dom.pow(i_unit, e) for e in range(4)]
        choices = range(4)
    tried = 0
    for ks in itertools.product(choices, repeat=4):
        tried += 1
        image = [P[0]] + [dom.mul(units[k], p) for k, p in zip(ks, P.coords[1:])]
        if proportional(image, Q.coords, dom):
            return ExceptionalTag(tuple(ks), tried, i_unit is None)
    return ExceptionalTag(None, tried, i_unit is None)


def sigma(P, ks, i_unit):
    """Coordinatewise multiplication by (sqrt(-1))^k for k = (0, k1..k4)."""
    dom = P.domain
    full = (0, *ks) if len(ks) == 4 else tuple(ks)
    return PointP4(tuple(dom.mul(dom.pow(i_unit, k % 4), p) for k, p in zip(full, P)), dom)


# ---------------------------------------------------------------------------
# rational curves in the Dwork pencil


LIFTS_PER_SOLUTION = 5 ** 4


@dataclass
class DworkSolution:
    """Projective (c_i^5) with the residual of every condition row."""

    fifth_powers: tuple
    kernel_basis: list
    residuals: list
    lifts: int = LIFTS_PER_SOLUTION

    @property
    def certified(self):
        return all(not r for r in self.residuals)


def dwork_matrix(roots, dom):
    """Rows indexed by the root values r, entries prod_j (r - r_ij)^5."""
    flat = [r for row in roots for r in row]
    matrix = []
    for r in flat:
        row = []
        for i in range(5):
            val = dom.one
            for rij in roots[i]:
                val = dom.mul(val, dom.pow(dom.sub(r, rij), 5))
            row.append(val)
        matrix.append(row)
    return matrix


def dwork_cover_solve(roots, d, dom):
    """Kernel of the 5(d+1) x 5 evaluation matrix; the unique projective solution when it is a line."""
    roots = [[dom.convert(r) for r in row] for row in roots]
    if len(roots) != 5 or any(len(row) != d + 1 for row in roots):
        raise ValueError(f"expected a 5 x {d + 1} root matrix")
    matrix = dwork_matrix(roots, dom)
    basis = linalg.nullspace(matrix, dom)
    if not basis:
        raise EmptyKernel("no curve with these roots lies on a Dwork quintic")
    if len(basis) > 1:
        raise FatKernel(basis)
    sol = basis[0]
    residuals = [_sum(dom, (dom.mul(a, x) for a, x in zip(row, sol))) for row in matrix]
    return DworkSolution(tuple(sol), basis, residuals)


def _poly_roots_mod_p(coeffs, p, grid):
    """Roots in F_p of sum coeffs[k] t^k, by evaluation on the whole field."""
    acc = np.zeros_like(grid)
    for c in reversed(coeffs):
        acc = (acc * grid + c) % p
    return [int(t) for t in np.nonzero(acc == 0)[0]]


def _det5_all(fixed, p):
    """det of the line system for every choice of the fifth root value (vectorised)."""
    r = [np.full(p, x, dtype=np.int64) for x in fixed] + [np.arange(p, dtype=np.int64)]

    def fifth(v):
        sq = v * v % p
        return sq * sq % p * v % p

    A = [[fifth((r[i] - r[k]) % p) for k in range(5)] for i in range(5)]
    det = np.zeros(p, dtype=np.int64)
    for perm in itertools.permutations(range(5)):
        inversions = sum(1 for a in range(5) for b in range(a) if perm[b] > perm[a])
        term = np.ones(p, dtype=np.int64)
        for i in range(5):
            term = term * A[i][perm[i]] % p
        det = (det - term) % p if inversions % 2 else (det + term) % p
    return det


def find_dwork_line(p, rng):
    """A line c_i (s - r_i w) on some Dwork quintic over F_p: (r, c^5)."""
    dom = PrimeField(p)
    while True:
        fixed = rng.sample(range(p), 4)
        det = _det5_all(fixed, p)
        cands = [int(t) for t in np.nonzero(det == 0)[0] if int(t) not in fixed]
        rng.shuffle(cands)
        for r4 in cands:
            rs = fixed + [r4]
            A = [[pow((rs[i] - rs[k]) % p, 5, p) for k in range(5)] for i in range(5)]
            basis = linalg.nullspace(A, dom)
            if len(basis) == 1 and all(basis[0]):
                return rs, tuple(basis[0])


@dataclass
class PlantedInstance:
    p: int
    d: int
    roots: list
    fifth_powers: tuple


def plant_dwork_instance(p, d, rng=None, line=None):
    """Compose a Dwork line with a random degree-(d+1) map P^1 -> P^1.

    The roots of coordinates 0 and 1 are drawn first, which fixes the map; the
    remaining coordinates are resampled until they split into distinct roots over F_p.
    """
    rng = rng or random.Random()
    rs, y = line or find_dwork_line(p, rng)
    grid = np.arange(p, dtype=np.int64)
    deg = d + 1
    inv = lambda x: pow(x % p, -1, p)  # noqa: E731
    for _ in range(100000):
        pts = rng.sample(range(p), 2 * deg)
        A = _from_roots(pts[:deg], p)
        B = _from_roots(pts[deg:], p)
        lam0, lam1 = rng.randrange(1, p), rng.randrange(1, p)
        # P - r0 Q = lam0 A and P - r1 Q = lam1 B
        den = inv(rs[1] - rs[0])
        Q = [(lam0 * a - lam1 * b) * den % p for a, b in zip(A, B)]
        P = [(lam0 * a + rs[0] * q) % p for a, q in zip(A, Q)]
        roots = [pts[:deg], pts[deg:]]
        lead = []
        ok = True
        for i in range(5):
            poly = [(pc - rs[i] * qc) % p for pc, qc in zip(P, Q)]
            if not poly[deg]:
                ok = False
                break
            lead.append(poly[deg])
            if i >= 2:
                found = _poly_roots_mod_p(poly, p, grid)
                if len(found) != deg:
                    ok = False
                    break
                roots.append(found)
        if not ok:
            continue
        flat = [r for row in roots for r in row]
        if len(set(flat)) != len(flat):
            continue
        fifth = tuple(y[i] * pow(lead[i], 5, p) % p for i in range(5))
        return PlantedInstance(p, d, roots, fifth)
    raise RuntimeError("could not split the planted curve over F_p")


def _from_roots(rts, p):
    coeffs = [1]
    for r in rts:
        nxt = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] = (nxt[k + 1] + c) % p
            nxt[k] = (nxt[k] - r * c) % p
        coeffs = nxt
    return coeffs


def curve_on_pencil(inst):
    """sum_i y_i x_i(t)^5 is a scalar multiple of prod_i x_i(t) for monic x_i with the given roots."""
    p = inst.p
    dom = PrimeField(p)
    ring = PolyRing(("t",), dom)
    t = ring.gen("t")
    xs = []
    for row in inst.roots:
        x = ring.one()
        for r in row:
            x = x * (t - r)
        xs.append(x)
    lhs = ring.zero()
    for yi, x in zip(inst.fifth_powers, xs):
        lhs = lhs + (x ** 5).scale(yi)
    prod = xs[0] * xs[1] * xs[2] * xs[3] * xs[4]
    if not lhs:
        return True
    # both sides have degree 5(d+1); compare after matching leading coefficients
    ratio = dom.div(lhs.leading_coefficient(), prod.leading_coefficient()) if lhs.total_degree() == prod.total_degree() else None
    return ratio is not None and lhs == prod.scale(ratio)


# ---------------------------------------------------------------------------
# reports


def bitangent_report(samples=20, seed=0, field_sizes=(5,)):
    """Pointwise checks at random rational U plus an exhaustive base-locus sweep over small fields."""
    from .symfun import Report

    rng = random.Random(seed)
    rep = Report("bitangent lines")
    kernel_ok = contact_ok = involution_ok = True
    for _ in range(samples):
        U = PointP4(tuple(rng.randint(-30, 30) for _ in range(5)), QQ)
        try:
            datum = bitangent_datum(U)
        except BaseLocus:
            continue
        kernel_ok &= all(not v for v in datum.kernel_residuals().values())
        M = datum.M
        if all(U):
            lhs = m_map(iota(U))
            rhs = PointP4(tuple(QQ.mul(Mi, QQ.pow(u, 5)) for Mi, u in zip(M, U)), QQ)
            involution_ok &= lhs == rhs
    # over GF(1013) fifth roots are unique, so P = (c_i), Q = (c_i u_i) with c_i^5 = M_i exist
    p = 1013
    F = PrimeField(p)
    inv5 = pow(5, -1, p - 1)
    for _ in range(samples):
        U = PointP4(tuple(rng.randrange(p) for _ in range(5)), F)
        try:
            M = m_map(U).coords
        except BaseLocus:
            continue
        cs = [pow(m, inv5, p) for m in M]
        if not any(cs) or not any(F.mul(c, u) for c, u in zip(cs, U)):
            continue
        P = PointP4(tuple(cs), F)
        Q = PointP4(tuple(F.mul(c, u) for c, u in zip(cs, U)), F)
        contact_ok &= all(F.is_zero(r) for r in contact_residuals(P, Q))
    rep.add("sum M_i u_i^m = 0 at random U (m = 0, 1, 4, 5)", kernel_ok)
    rep.add("P = (c_i), Q = (c_i u_i) with c_i^5 = M_i is bitangent over GF(1013)", contact_ok)
    rep.add("m(iota(U)) = [M_i(U) u_i^5]", involution_ok)
    for p in field_sizes:
        F = PrimeField(p)
        agree = True
        for coords in itertools.product(range(p), repeat=5):
            if not any(coords):
                continue
            U = PointP4(coords, F)
            in_locus = not isinstance(base_locus_classify(U), NotInBaseLocus)
            vanishes = all(F.is_zero(x) for x in kernel_factors(U)[2])
            agree &= in_locus == vanishes
        rep.add(f"base-locus classification matches M = 0 on all of F_{p}^5", agree)
    # an exceptional pair over GF(13), where sqrt(-1) exists
    F = PrimeField(13)
    P = PointP4((1, 2, 3, 4, 5), F)
    i = _sqrt_minus_one(F)
    tag = exceptional_tag(P, sigma(P, (1, 2, 3, 0), i))
    rep.add("exceptional_tag recovers a planted Z4^4 tag", tag.k == (1, 2, 3, 0))
    return rep


def dwork_roundtrip(count=50, degrees=(1, 2), p=1009, seed=0):
    """Plant ``count`` curves of each degree and recover their c_i^5 projectively."""
    from .symfun import Report

    rng = random.Random(seed)
    dom = PrimeField(p)
    rep = Report("Dwork pencil round trip")
    for d in degrees:
        recovered = certified = 0
        for _ in range(count):
            inst = plant_dwork_instance(p, d, rng)
            try:
                sol = dwork_cover_solve(inst.roots, d, dom)
            except (EmptyKernel, FatKernel):
                continue
            recovered += proportional(sol.fifth_powers, inst.fifth_powers, dom)
            certified += sol.certified
        rep.add(f"degree {d}: {recovered}/{count} planted c_i^5 recovered", recovered == count, recovered=recovered)
        rep.add(f"degree {d}: {certified}/{count} solutions certified", certified == count)
    return rep
