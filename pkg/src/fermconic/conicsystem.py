"""Conics through the two tangency points: tangent cones, the quintic F_Lambda in frame
coordinates, the conic/cubic recursion and the five residual equations in d."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

from . import bitangent
from .polyalg import (
    QQ,
    AlphaBetaExtension,
    DegenerateExtension,
    FractionField,
    MultiPoly,
    NotDivisible,
    PolyRing,
    PrimeField,
    resultant,
)
from .symfun import Report, build_kernel

XYD = ("x", "y", "d")
XYZ = ("x", "y", "z")

# S_mn that enter the equations; S00, S10, S40, S50 vanish for every frame and
# S01, S41 vanish because R lies in the plane.
GENERIC_INDICES = (
    (2, 0), (3, 0), (1, 1), (2, 1), (3, 1), (0, 2), (1, 2), (2, 2), (3, 2),
    (0, 3), (1, 3), (2, 3), (0, 4), (1, 4), (0, 5),
)
STRUCTURAL_ZEROS = ((0, 0), (1, 0), (4, 0), (5, 0), (0, 1), (4, 1))


class DegeneratePencil(ArithmeticError):
    """g_1(P) vanishes, so E_1 cannot be solved for d."""


class CertificateFailure(AssertionError):
    def __init__(self, difference):
        super().__init__("f*g differs from F_Lambda")
        self.difference = difference


def s_name(m, n):
    return f"S{m}{n}"


def tau_index(m, n):
    """The involution on indices: S_mn -> S_(5-m-n) n."""
    return (5 - m - n, n)


class STable(dict):
    """(m, n) -> domain element with the structural zeros filled in."""

    def __init__(self, values, dom):
        super().__init__(values)
        self.dom = dom

    def __missing__(self, key):
        m, n = key
        if m + n > 5 or key in STRUCTURAL_ZEROS:
            return self.dom.zero
        raise KeyError(key)


# ---------------------------------------------------------------------------
# frames


@dataclass
class SimplexFrame:
    """The frame (P, Q, R) of a plane: u-coordinates, R's coordinates l_i and the S table."""

    U: object
    l: tuple
    S: STable
    tag: str
    domain: object
    M: tuple = ()
    delta: object = None

    def plane_residuals(self):
        dom = self.domain
        a = b = dom.zero
        for Mi, u, li in zip(self.M, self.U, self.l):
            a = dom.add(a, dom.mul(Mi, li))
            b = dom.add(b, dom.mul(dom.mul(Mi, dom.pow(u, 4)), li))
        return a, b


@lru_cache(maxsize=None)
def generic_s_ring():
    return PolyRing(tuple(s_name(m, n) for m, n in GENERIC_INDICES), QQ)


@lru_cache(maxsize=None)
def generic_field():
    ring = generic_s_ring()
    return FractionField(ring, atoms=(ring.gen("S20"), ring.gen("S30")))


def generic_table():
    F = generic_field()
    ring = F.ring
    return STable({mn: F.convert(ring.gen(s_name(*mn))) for mn in GENERIC_INDICES}, F)


def numeric_frame(us, p, option=1, ls=None):
    """Exact frame over GF(p) at the point U = us.

    option 1: l_i = S80 u_i^5 - S90 u_i^4; option 2: l_i = e2(i) prod_{j != i} n_j;
    otherwise the supplied ``ls``.
    """
    F = PrimeField(p)
    U = bitangent.PointP4(tuple(us), F)
    d, n, M = bitangent.kernel_factors(U)
    delta = bitangent._vdm(F, list(U))
    if F.is_zero(delta):
        raise DegenerateExtension("u-coordinates must be distinct")
    inv_delta = F.inv(delta)

    def raw(m, ls_, k):
        tot = 0
        for i in range(5):
            tot += M[i] * pow(U[i], m, p) * pow(ls_[i], k, p)
        return tot * inv_delta % p

    if option == 1:
        ones = (1,) * 5
        S80, S90 = raw(8, ones, 0), raw(9, ones, 0)
        ls = tuple((S80 * pow(u, 5, p) - S90 * pow(u, 4, p)) % p for u in U)
    elif option == 2:
        out = []
        for i in range(5):
            e = bitangent._esym(F, [U[j] for j in range(5) if j != i])
            prod = 1
            for j in range(5):
                if j != i:
                    prod = prod * n[j] % p
            out.append(e[2] * prod % p)
        ls = tuple(out)
    else:
        ls = tuple(F.convert(x) for x in ls)
    S = STable({(m, k): raw(m, ls, k) for k in range(6) for m in range(6 - k)}, F)
    return SimplexFrame(U, ls, S, f"option{option}" if option in (1, 2) else "custom", F, M, delta)


# ---------------------------------------------------------------------------
# tangent cones and the discriminant lemma


def tangent_cone_quadrics(kernel=None):
    """Gamma_U = sum M_i v_i^2 and Gamma_iota(U) = sum M_i u_i^3 v_i^2 in Q[u, v]."""
    kernel = kernel or build_kernel()
    ring = kernel.ring.extend(*bitangent.V_VARS)
    us = [ring.gen(f"u{i}") for i in range(5)]
    vs = [ring.gen(f"v{i}") for i in range(5)]
    M = [m.to_ring(ring) for m in kernel.M]
    g_p = sum((M[i] * vs[i] ** 2 for i in range(5)), ring.zero())
    g_q = sum((M[i] * us[i] ** 3 * vs[i] ** 2 for i in range(5)), ring.zero())
    return g_p, g_q


@lru_cache(maxsize=None)
def _free_ring():
    names = tuple(f"m{i}" for i in range(5)) + tuple(f"u{i}" for i in range(5)) + tuple(f"l{i}" for i in range(5)) + XYZ
    return PolyRing(names, QQ)


def _weighted(ring, ws, vals):
    return sum((w * v for w, v in zip(ws, vals)), ring.zero())


def discriminant_forms(ms, us, vs, ring):
    """Delta(V) and Delta'(V) as defined by the two tangent-cone quadrics."""
    mu = [m * u for m, u in zip(ms, us)]
    mu3 = [m * u ** 3 for m, u in zip(ms, us)]
    dlt = _weighted(ring, mu, vs) ** 2 - _weighted(ring, mu, us) * _weighted(ring, ms, [v * v for v in vs])
    dlt_p = _weighted(ring, mu3, vs) ** 2 - _weighted(ring, mu3, [ring.one()] * 5) * _weighted(ring, mu3, [v * v for v in vs])
    return dlt, dlt_p


def discriminant_certificate():
    """Free-symbol identities reducing the discriminant lemma to linear constraints.

    Returns a Report.  With K_j = sum m_i u_i^j, A = K2, C = sum m u l, C3 = sum m u^3 l,
    L1 = sum m l and L4 = sum m u^4 l:
      Delta(V) - Delta(R) z^2 = x^2 (K1^2 - A K0) + 2xz (K1 C - A L1)
      Delta'(V) - Delta'(R) z^2 = y^2 (K4^2 - K3 K5) + 2yz (K4 C3 - K3 L4)
    so both vanish once K0 = K1 = K4 = K5 = 0 and L1 = L4 = 0.
    """
    ring = _free_ring()
    g = ring.gens()
    ms, us, ls = g[0:5], g[5:10], g[10:15]
    x, y, z = g[15:18]
    vs = [x + y * u + z * l for u, l in zip(us, ls)]
    dV, dpV = discriminant_forms(ms, us, vs, ring)
    dR, dpR = discriminant_forms(ms, us, list(ls), ring)
    K = [_weighted(ring, ms, [u ** j for u in us]) for j in range(6)]
    C = _weighted(ring, ms, [u * l for u, l in zip(us, ls)])
    C3 = _weighted(ring, ms, [u ** 3 * l for u, l in zip(us, ls)])
    L1 = _weighted(ring, ms, ls)
    L4 = _weighted(ring, ms, [u ** 4 * l for u, l in zip(us, ls)])
    A = K[2]
    rep = Report("discriminant certificate")
    lhs = dV - dR * z ** 2
    rhs = x ** 2 * (K[1] ** 2 - A * K[0]) + (x * z) * (K[1] * C - A * L1) * 2
    rep.add("Delta(V) - Delta(R) z^2 = x^2(K1^2 - A K0) + 2xz(K1 C - A L1)", lhs == rhs, lhs - rhs)
    lhs = dpV - dpR * z ** 2
    rhs = y ** 2 * (K[4] ** 2 - K[3] * K[5]) + (y * z) * (K[4] * C3 - K[3] * L4) * 2
    rep.add("Delta'(V) - Delta'(R) z^2 = y^2(K4^2 - K3 K5) + 2yz(K4 C3 - K3 L4)", lhs == rhs, lhs - rhs)
    cross = ring.zero()
    for i in range(5):
        for j in range(i):
            cross = cross + ms[i] * ms[j] * (us[i] - us[j]) * (us[i] * ls[j] - us[j] * ls[i])
    rep.add("cross term = A L1 - C K1", cross == A * L1 - C * K[1], cross - (A * L1 - C * K[1]))
    dQ, _ = discriminant_forms(ms, us, list(us), ring)
    _, dpP = discriminant_forms(ms, us, [ring.one()] * 5, ring)
    rep.add("Delta(Q) = 0", dQ.is_zero())
    rep.add("Delta'(P) = 0", dpP.is_zero())
    return rep


def plane_elimination(kernel=None):
    """Solve the two plane equations for l3, l4 over Q(u)[l0, l1, l2].

    Returns (l3, l4) as (numerator polynomials, common denominator) in Q[u, l0, l1, l2].
    """
    kernel = kernel or build_kernel()
    ring = kernel.ring.extend("l0", "l1", "l2")
    us = [ring.gen(f"u{i}") for i in range(5)]
    ls = [ring.gen(f"l{i}") for i in range(3)]
    M = [m.to_ring(ring) for m in kernel.M]
    a = [M[i] for i in range(5)]
    b = [M[i] * us[i] ** 4 for i in range(5)]
    r1 = -(a[0] * ls[0] + a[1] * ls[1] + a[2] * ls[2])
    r2 = -(b[0] * ls[0] + b[1] * ls[1] + b[2] * ls[2])
    minor = a[3] * b[4] - a[4] * b[3]
    if minor.is_zero():
        raise DegenerateExtension("the 2x2 elimination minor vanishes identically")
    l3 = r1 * b[4] - a[4] * r2
    l4 = a[3] * r2 - r1 * b[3]
    return ring, (l3, l4), minor


def discriminant_check(kernel=None, p=(1 << 61) - 1, samples=3, rng=None):
    """The discriminant lemma: free-symbol certificate, exact constraints, and F_p frames."""
    kernel = kernel or build_kernel()
    rep = discriminant_certificate()
    ring = kernel.ring
    us = ring.gens()
    for j in (0, 1, 4, 5):
        kj = sum((kernel.M[i] * us[i] ** j for i in range(5)), ring.zero())
        rep.add(f"K{j} = 0 in Q[u]", kj.is_zero())
    lring, (l3, l4), minor = plane_elimination(kernel)
    lus = [lring.gen(f"u{i}") for i in range(5)]
    M = [m.to_ring(lring) for m in kernel.M]
    cleared = [lring.gen("l0") * minor, lring.gen("l1") * minor, lring.gen("l2") * minor, l3, l4]
    L1 = sum((M[i] * cleared[i] for i in range(5)), lring.zero())
    L4 = sum((M[i] * lus[i] ** 4 * cleared[i] for i in range(5)), lring.zero())
    rep.add("L1 = 0 after eliminating l3, l4", L1.is_zero())
    rep.add("L4 = 0 after eliminating l3, l4", L4.is_zero())
    # direct evaluation of both sides over GF(p) with R drawn from the plane
    rng = rng or random.Random(11)
    F = PrimeField(p)
    xyz = PolyRing(XYZ, F)
    x, y, z = xyz.gens()
    ok_all = ok_delta_r = True
    for _ in range(samples):
        U = tuple(rng.randrange(1, p) for _ in range(5))
        fr = numeric_frame(U, p, option=1)
        vs = [x + y * fr.U[i] + z * fr.l[i] for i in range(5)]
        ms = [xyz.const(m) for m in fr.M]
        uu = [xyz.const(u) for u in fr.U]
        dV, dpV = discriminant_forms(ms, uu, vs, xyz)
        dR, dpR = discriminant_forms(ms, uu, [xyz.const(v) for v in fr.l], xyz)
        ok_all &= dV == dR * z ** 2 and dpV == dpR * z ** 2
        S = fr.S
        d2 = F.mul(fr.delta, fr.delta)
        ok_delta_r &= dR == xyz.const(F.mul(d2, F.sub(F.mul(S[1, 1], S[1, 1]), F.mul(S[2, 0], S[0, 2]))))
    rep.add("Delta(xP+yQ+zR) = Delta(R) z^2 over GF(p) (option-1 frames)", ok_all)
    rep.add("Delta(R) = delta^2 (S11^2 - S20 S02) over GF(p)", ok_delta_r)
    return rep


# ---------------------------------------------------------------------------
# F_Lambda and the recursion


def multinomial(j, l, k):
    return factorial(j + l + k) // (factorial(j) * factorial(l) * factorial(k))


def flambda_expand(S, dom):
    """[F_0, ..., F_5] with F_k = sum_{j+l=5-k} 5!/(j! l! k!) S_jk x^l y^j."""
    ring = PolyRing(("x", "y"), dom)
    out = []
    for k in range(6):
        Fk = ring.zero()
        for j in range(6 - k):
            l = 5 - k - j
            c = S[j, k]
            if not dom.is_zero(c):
                Fk = Fk + ring.monomial((l, j), 1).scale(dom.mul(dom.convert(multinomial(j, l, k)), c))
        out.append(Fk)
    return out


def flambda_poly(S, dom):
    """F_Lambda as one polynomial in x, y, z."""
    ring = PolyRing(XYZ, dom)
    z = ring.gen("z")
    total = ring.zero()
    for k, Fk in enumerate(flambda_expand(S, dom)):
        total = total + Fk.to_ring(ring) * z ** k
    return total


def flambda_direct(M, us, ls, delta, dom):
    """sum_i M_i (x + u_i y + l_i z)^5 / delta by substitution and exact division."""
    ring = PolyRing(XYZ, dom)
    vring = PolyRing(("v",), dom)
    v5 = vring.gen("v") ** 5
    x, y, z = ring.gens()
    total = ring.zero()
    for Mi, u, l in zip(M, us, ls):
        total = total + v5.substitute({"v": x + y.scale(u) + z.scale(l)}, ring).scale(Mi)
    return total.scale(dom.inv(delta)) if dom.is_field else total.divide_exact(ring.const(delta))


def flambda_symbolic_check(kernel=None):
    """Multinomial path against substitution for the frame l_i = u_i^2, exactly over Q[u]."""
    kernel = kernel or build_kernel()
    ring = kernel.ring
    us = ring.gens()
    ls = [u ** 2 for u in us]
    from .symfun import smn_from_frame

    from .polyalg import PolynomialDomain

    dom = PolynomialDomain(ring)
    S = STable({(m, n): smn_from_frame(m, n, ls, kernel) for n in range(6) for m in range(6 - n)}, dom)
    via_formula = flambda_poly(S, dom)
    direct = flambda_direct(kernel.M, us, ls, kernel.delta, dom)
    return via_formula == direct


# ---------------------------------------------------------------------------
# pencils


@dataclass
class PencilChoice:
    alpha: object
    beta: object
    labels: tuple


def make_extension(S, base):
    return AlphaBetaExtension(base, S[2, 0], S[1, 1], S[0, 2], S[3, 0], S[3, 1], S[3, 2])


def pencil_roots(S, base):
    """The four (alpha, beta) branch pairs, carried formally in the alpha/beta extension."""
    B = base
    for name, v in (("S20", S[2, 0]), ("S30", S[3, 0])):
        if B.is_zero(v):
            raise DegenerateExtension(f"{name} vanishes")
    disc = B.sub(B.mul(S[1, 1], S[1, 1]), B.mul(S[2, 0], S[0, 2]))
    disc_p = B.sub(B.mul(S[3, 1], S[3, 1]), B.mul(S[3, 0], S[3, 2]))
    if B.is_zero(disc) or B.is_zero(disc_p):
        raise DegenerateExtension("a tangent-cone discriminant vanishes")
    ext = make_extension(S, B)
    a, b = ext.alpha, ext.beta
    ac, bc = ext.alpha_conjugate(), ext.beta_conjugate()
    return ext, [
        PencilChoice(a, b, ("+", "+")),
        PencilChoice(ac, b, ("-", "+")),
        PencilChoice(a, bc, ("+", "-")),
        PencilChoice(ac, bc, ("-", "-")),
    ]


def explicit_roots(S, F):
    """Over GF(p): the roots of a w^2 + 2 b w + c for alpha and beta, or None for a non-residue.

    A vanishing leading coefficient means the tangent cone contains the line PQ;
    the one remaining branch is then w = -c / (2b).
    """
    out = {}
    for key, (lead, mid, const) in {"alpha": ((3, 0), (3, 1), (3, 2)), "beta": ((2, 0), (1, 1), (0, 2))}.items():
        a, b, c = S[lead], S[mid], S[const]
        if F.is_zero(a):
            if F.is_zero(b):
                return None
            out[key] = [F.div(F.neg(c), F.mul(2, b))]
            continue
        disc = F.sub(F.mul(b, b), F.mul(a, c))
        r = F.sqrt(disc)
        if r is None:
            return None
        out[key] = [F.div(F.add(F.neg(b), s), a) for s in {r % F.p, (-r) % F.p}]
    return out


# ---------------------------------------------------------------------------
# cubic coefficients and the five equations


@dataclass
class ConicSystem:
    """Five residuals E_1..E_5 in Dom[d] plus the auxiliary cubic coefficients."""

    E: tuple
    aux: dict
    S: STable
    alpha: object
    beta: object
    domain: object

    def degrees(self):
        return tuple(e.degree("d") for e in self.E)

    def evaluate(self, dval):
        return tuple(e.evaluate({"x": 0, "y": 0, "d": dval} if "x" in e.ring.vars else {"d": dval}) for e in self.E)


def cubic_coefficients(S, alpha, beta, dom):
    """g_0..g_3 in Dom[x, y, d] from the closed forms, plus the auxiliary scalars."""
    ring = PolyRing(XYD, dom)
    x, y, d = ring.gens()
    C = lambda v: ring.const(v)  # noqa: E731
    a, b = C(alpha), C(beta)
    k = x * C(S[2, 0]) + y * C(S[3, 0])
    l = b * x + a * y
    g0 = x * y * k * 10
    g1 = (x * x * C(S[1, 1]) * 20 + x * y * C(S[2, 1]) * 30 + y * y * C(S[3, 1]) * 20) + k * l * 10
    g1P = C(S[1, 1]) * 20 + C(S[2, 0]) * b * 10
    g1Q = C(S[3, 1]) * 20 + C(S[3, 0]) * a * 10
    g1xy = C(S[2, 1]) * 30 + C(S[2, 0]) * a * 10 + C(S[3, 0]) * b * 10
    g2P = C(S[1, 2]) * 30 + a * g1P + b * g1xy - C(S[2, 0]) * d * 10
    g2Q = C(S[2, 2]) * 30 + b * g1Q + a * g1xy - C(S[3, 0]) * d * 10
    g2 = g2P * x + g2Q * y
    g3 = C(S[1, 3]) * 20 + a * g2P + b * g2Q - d * g1xy
    aux = {"g1P": g1P, "g1Q": g1Q, "g1xy": g1xy, "g2P": g2P, "g2Q": g2Q, "l": l, "k": k}
    return (g0, g1, g2, g3), aux


def build_system(S, alpha, beta, dom):
    """E_1..E_5 as polynomials in d (in the ring x, y, d; free of x and y)."""
    (g0, g1, g2, g3), aux = cubic_coefficients(S, alpha, beta, dom)
    ring = g0.ring
    d = ring.gen("d")
    C = ring.const
    a, b = C(alpha), C(beta)
    g1P, g1Q, g2P, g2Q = aux["g1P"], aux["g1Q"], aux["g2P"], aux["g2Q"]
    E1 = C(S[0, 3]) * 10 + b * g2P - g1P * d
    E2 = C(S[2, 3]) * 10 + a * g2Q - g1Q * d
    E3 = C(S[0, 4]) * 5 + b * g3 - g2P * d
    E4 = C(S[1, 4]) * 5 + a * g3 - g2Q * d
    E5 = C(S[0, 5]) - g3 * d
    aux.update({"g0": g0, "g1": g1, "g2": g2, "g3": g3})
    return ConicSystem((E1, E2, E3, E4, E5), aux, S, alpha, beta, dom)


def conic_poly(alpha, beta, dval, dom, ring=None):
    """f = xy - (beta x + alpha y) z + d z^2."""
    ring = ring or PolyRing(XYZ, dom)
    x, y, z = ring.gens()
    C = ring.const
    return x * y - (C(beta) * x + C(alpha) * y) * z + C(dval) * z ** 2


def recursion_residuals(system):
    """sum_{i+j=k} g_i f_j - F_k for k = 0..5 in Dom[x, y, d]."""
    dom = system.domain
    ring = system.aux["g0"].ring
    x, y, d = ring.gens()
    f = [x * y, -system.aux["l"], d]
    g = [system.aux[f"g{i}"] for i in range(4)]
    F = [Fk.to_ring(ring) for Fk in flambda_expand(system.S, dom)]
    out = []
    for k in range(6):
        acc = -F[k]
        for i in range(4):
            j = k - i
            if 0 <= j <= 2:
                acc = acc + g[i] * f[j]
        out.append(acc)
    return out


def recursion_report(system):
    """The recursion for k = 0..3 plus the identification of the residuals with E_1..E_5."""
    res = recursion_residuals(system)
    ring = res[0].ring
    x, y, _ = ring.gens()
    E1, E2, E3, E4, E5 = system.E
    rep = Report("conic/cubic recursion")
    for k in range(4):
        rep.add(f"k={k}: sum g_i f_j - F_k = 0", res[k].is_zero(), res[k])
    rep.add("k=3 residual = -(E1 x^2 + E2 y^2)", res[3] == -(E1 * x ** 2 + E2 * y ** 2), gated=False)
    rep.add("k=4 residual = -(E3 x + E4 y)", res[4] == -(E3 * x + E4 * y), gated=False)
    rep.add("k=5 residual = -E5", res[5] == -E5, gated=False)
    g2 = system.aux["g2"]
    F2 = flambda_expand(system.S, system.domain)[2].to_ring(ring)
    xyg2 = x * y * g2 - (F2 + system.aux["g1"] * system.aux["l"] - system.aux["g0"] * ring.gen("d"))
    rep.add("xy g2 = F2 + g1 l - g0 d", xyg2.is_zero(), xyg2)
    return rep


# ---------------------------------------------------------------------------
# the involution on the generic system


def tau_generic_map():
    """Ring map S_mn -> S_(5-m-n) n on the generic S ring."""
    ring = generic_s_ring()
    return {s_name(m, n): ring.gen(s_name(*tau_index(m, n))) for m, n in GENERIC_INDICES}


def tau_check(system):
    """tau maps E1 <-> E2 and E3 <-> E4 and fixes E5 on the generic system."""
    F = system.domain.base
    ext = system.domain
    mapping = tau_generic_map()

    def fn(rf):
        return F(rf.num.substitute(mapping), rf.den.substitute(mapping))

    def tau_poly(p):
        return MultiPoly(p.ring, {k: c.map_base(fn, ext, swap=True) for k, c in p.terms.items()})

    E = system.E
    rep = Report("involution on the five equations")
    for i, j in ((0, 1), (1, 0), (2, 3), (3, 2), (4, 4)):
        rep.add(f"tau(E{i + 1}) = E{j + 1}", tau_poly(E[i]) == E[j])
    return rep


def generic_system():
    """The five equations over Frac(S)[alpha, beta] with the + + branch."""
    S = generic_table()
    ext, choices = pencil_roots(S, S.dom)
    return build_system(S, choices[0].alpha, choices[0].beta, ext)


# ---------------------------------------------------------------------------
# eliminating d


def _linear_in_d(p):
    by = p.collect("d")
    return by.get(0, p.ring.zero()), by.get(1, p.ring.zero())


def _clear_d(p, num, den):
    """den^deg * p(d = num/den) for p in Dom[x, y, d]."""
    by = p.collect("d")
    top = max(by) if by else 0
    out = p.ring.zero()
    for k, c in by.items():
        out = out + c * num ** k * den ** (top - k)
    return out


def eliminate_d(system):
    """R1..R4: E3 and E5 with d from E1, E4 with d from E2, and the E1/E2 compatibility."""
    E1, E2, E3, E4, E5 = system.E
    a1, b1 = _linear_in_d(E1)
    a2, b2 = _linear_in_d(E2)
    if b1.is_zero():
        raise DegeneratePencil("g1(P) vanishes; treat the S11 = 0 branch separately")
    if b2.is_zero():
        raise DegeneratePencil("g1(Q) vanishes")
    # E1 = a1 + b1 d, so d = -a1 / b1
    R1 = _clear_d(E3, -a1, b1)
    R2 = _clear_d(E4, -a2, b2)
    R3 = _clear_d(E5, -a1, b1)
    R4 = a1 * b2 - a2 * b1
    return R1, R2, R3, R4


# ---------------------------------------------------------------------------
# certificates


@dataclass
class SectionFactorization:
    f: MultiPoly
    g: MultiPoly
    F: MultiPoly
    d: object
    resultant_over_xy: MultiPoly | None = None


def factor_certificate(S, alpha, beta, dval, dom):
    """Conic f, cubic g with f g = F_Lambda checked by multiplication, and Res_z(f, g) / (xy)."""
    system = build_system(S, alpha, beta, dom)
    ring = PolyRing(XYZ, dom)
    x, y, z = ring.gens()
    sub = {"d": dval}
    gs = []
    for name in ("g0", "g1", "g2", "g3"):
        gxy = system.aux[name].substitute(sub)
        gs.append(gxy.to_ring(PolyRing(("x", "y"), dom)).to_ring(ring) if gxy.degree("d") <= 0 else None)
    g = sum((gi * z ** i for i, gi in enumerate(gs)), ring.zero())
    f = conic_poly(alpha, beta, dval, dom, ring)
    F = flambda_poly(S, dom)
    diff = f * g - F
    if not diff.is_zero():
        raise CertificateFailure(diff)
    res = resultant(f, g, "z")
    try:
        quotient = res.divide_exact(x * y)
    except NotDivisible as exc:
        raise CertificateFailure(exc.remainder) from exc
    return SectionFactorization(f, g, F, dval, quotient)


def solve_system_fp(S, F):
    """Over GF(p): every (alpha, beta, d) making E_1..E_5 vanish, over the explicit branches."""
    roots = explicit_roots(S, F)
    if roots is None:
        return None
    sols = []
    for alpha, beta in itertools.product(roots["alpha"], roots["beta"]):
        system = build_system(S, alpha, beta, F)
        sols.extend((alpha, beta, dv) for dv in common_d_roots(system))
    return sols


def common_d_roots(system):
    """Values of d in GF(p) where all five residuals vanish (E1 linear or identically zero)."""
    F = system.domain
    dring = PolyRing(("d",), F)
    E = [e.to_ring(dring) for e in system.E]
    a1, b1 = _coeffs01(E[0])
    a2, b2 = _coeffs01(E[1])
    cands = None
    for a, b in ((a1, b1), (a2, b2)):
        if b:
            cands = [F.div(F.neg(a), b)]
            break
    if cands is None:
        if a1 or a2:
            return []
        # E1, E2 vanish identically; use the quadratics
        cands = _roots_fp([e for e in E[2:] if not e.is_zero()], F)
    return [dv for dv in cands if all(F.is_zero(e.evaluate([dv])) for e in E)]


def _coeffs01(p):
    by = p.collect("d")
    c0 = by.get(0)
    c1 = by.get(1)
    return (c0.leading_coefficient() if c0 else 0), (c1.leading_coefficient() if c1 else 0)


def _roots_fp(polys, F):
    if not polys:
        return list(range(F.p)) if F.p < 5000 else []
    p0 = min(polys, key=lambda q: q.degree("d"))
    if p0.degree("d") <= 0:
        return []
    by = {k: v.leading_coefficient() for k, v in p0.collect("d").items()}
    deg = max(by)
    if deg == 1:
        return [F.div(F.neg(by.get(0, 0)), by[1])]
    a, b, c = by.get(2, 0), by.get(1, 0), by.get(0, 0)
    disc = F.sub(F.mul(b, b), F.mul(4, F.mul(a, c)))
    r = F.sqrt(disc)
    if r is None:
        return []
    inv = F.inv(F.mul(2, a))
    return list({F.mul(F.sub(s, b), inv) for s in {r % F.p, (-r) % F.p}})


# ---------------------------------------------------------------------------
# export


@lru_cache(maxsize=None)
def export_ring():
    return PolyRing(tuple(s_name(m, n) for m, n in GENERIC_INDICES) + ("alpha", "beta", "d"), QQ)


def _monomial_lcm(polys, ring):
    """lcm of monomial denominators (leading coefficient 1); a plain product otherwise."""
    out = ring.one()
    for p in polys:
        if len(p) == 1 and p.leading_coefficient() == 1:
            exps = p.items()[0][0]
            cur = out.items()[0][0] if len(out) == 1 else None
            if cur is not None:
                out = ring.monomial(tuple(max(a, b) for a, b in zip(cur, exps)))
                continue
        out = out * p
    return out


def generic_to_export(p):
    """A polynomial over Frac(S)[alpha, beta] in d, as (numerator, denominator) over Q."""
    ring = export_ring()
    alpha, beta, d = ring.gen("alpha"), ring.gen("beta"), ring.gen("d")
    basis = (ring.one(), alpha, beta, alpha * beta)
    dvar = p.ring.index["d"]
    pieces = []
    for exps, c in p.items():
        if any(e for i, e in enumerate(exps) if i != dvar):
            raise ValueError("expected a polynomial in d alone")
        for b, rf in zip(basis, c.c):
            if rf:
                pieces.append((exps[dvar], b, rf.num.to_ring(ring), rf.den.to_ring(ring)))
    den = _monomial_lcm([pc[3] for pc in pieces], ring)
    num = ring.zero()
    for k, b, n, dd in pieces:
        num = num + d ** k * b * n * den.divide_exact(dd)
    return num, den


def export_system(option=1, eliminate=False):
    """The generic five equations, the alpha/beta relations and the option's S table as JSON data."""
    from .symfun import option1_table, option2_table

    system = generic_system()
    ring = export_ring()
    g = ring.gen
    out = {
        "variables": list(ring.vars),
        "relations": {
            "alpha": (g("S30") * g("alpha") ** 2 + g("S31") * g("alpha") * 2 + g("S32")).to_json(),
            "beta": (g("S20") * g("beta") ** 2 + g("S11") * g("beta") * 2 + g("S02")).to_json(),
        },
        "equations": [],
        "option": option,
        "smn": (option1_table() if option == 1 else option2_table()).to_json(),
    }
    for i, E in enumerate(system.E, 1):
        num, den = generic_to_export(E)
        out["equations"].append({"name": f"E{i}", "numerator": num.to_json(), "denominator": den.to_json()})
    if eliminate:
        out["eliminated"] = []
        for i, R in enumerate(eliminate_d(system), 1):
            num, den = generic_to_export(R)
            out["eliminated"].append({"name": f"R{i}", "numerator": num.to_json(), "denominator": den.to_json()})
    return out
