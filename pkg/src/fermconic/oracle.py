"""Independent checks over prime fields.

``identity_test`` compares two polynomials at random points.  ``brute_force_conics``
finds every conic through [1:0:0] and [0:1:0] dividing a ternary quintic by
sweeping the whole three-parameter family with numpy.  ``cross_validate`` runs
that sweep against the equations solved by ``conicsystem``.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

import numpy as np

from . import bitangent, linalg
from .bitangent import BaseLocus
from .conicsystem import STable, build_system, common_d_roots, explicit_roots, flambda_poly, multinomial, numeric_frame
from .polyalg import QQ, DegenerateExtension, MultiPoly, PolyRing, PrimeField

MERSENNE61 = (1 << 61) - 1
ENUMERATION_BOUND = 101
SZ_TARGET = 2.0 ** -40


class PrimeTooLarge(ValueError):
    pass


class AgreementFailure(AssertionError):
    def __init__(self, instance, system, brute):
        super().__init__(f"system found {sorted(system)}, enumeration found {sorted(brute)}")
        self.instance = instance
        self.system = system
        self.brute = brute


# ---------------------------------------------------------------------------
# identity testing


@dataclass
class IdentityCheck:
    lhs: MultiPoly
    rhs: MultiPoly
    p: int = MERSENNE61
    trials: int = 3
    seed: int = 0
    name: str = "identity"


@dataclass
class IdentityVerdict:
    name: str
    passed: bool
    bound: float
    witness: dict | None = None

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "bound": self.bound, "witness": self.witness}


def _reduce_coeff(c, F):
    return F.convert(c)


def identity_test(check):
    """Evaluate lhs - rhs at ``trials`` uniform points of GF(p)^n.

    The reported bound is (total degree / p)^trials, the Schwartz-Zippel
    probability that a nonzero difference survives every trial.
    """
    F = PrimeField(check.p)
    names = sorted(set(check.lhs.ring.vars) | set(check.rhs.ring.vars))
    deg = max(check.lhs.total_degree(), check.rhs.total_degree(), 1)
    if check.p < (deg << 10):
        raise ValueError(f"p must exceed 2^10 times the degree {deg}")
    rng = random.Random(check.seed)
    lhs = check.lhs.map_coeffs(lambda c: _reduce_coeff(c, F), check.lhs.ring.with_domain(F))
    rhs = check.rhs.map_coeffs(lambda c: _reduce_coeff(c, F), check.rhs.ring.with_domain(F))
    for _ in range(check.trials):
        point = {v: rng.randrange(check.p) for v in names}
        a = lhs.evaluate({v: point[v] for v in lhs.ring.vars})
        b = rhs.evaluate({v: point[v] for v in rhs.ring.vars})
        if F.sub(a, b):
            return IdentityVerdict(check.name, False, 1.0, point)
    return IdentityVerdict(check.name, True, (deg / check.p) ** check.trials)


def standard_identity_checks(p=MERSENNE61, trials=3, seed=0):
    """The kernel and base-locus identities as random-evaluation checks."""
    from .symfun import build_kernel

    kernel = build_kernel()
    e = kernel.esym.e
    ring = kernel.ring
    checks = [
        IdentityCheck(sum(kernel.n, ring.zero()), e[2] ** 2 * 3 - e[1] * e[3] * 4, p, trials, seed,
                      "sum n_i = 3 e2^2 - 4 e1 e3"),
        IdentityCheck(sum((u * n for u, n in zip(ring.gens(), kernel.n)), ring.zero()), e[2] * e[3], p, trials, seed + 1,
                      "sum u_i n_i = e2 e3"),
    ]
    for m in (0, 1, 4, 5):
        lhs = sum((Mi * u ** m for Mi, u in zip(kernel.M, ring.gens())), ring.zero())
        checks.append(IdentityCheck(lhs, ring.zero(), p, trials, seed + 2 + m, f"sum M_i u_i^{m} = 0"))
    return [identity_test(c) for c in checks]


# ---------------------------------------------------------------------------
# sections and the enumeration oracle


@dataclass
class SectionInstance:
    """A plane quintic section F_Lambda over GF(p) with P = [1:0:0] and Q = [0:1:0] singular."""

    p: int
    coeffs: dict  # (i, j, k) exponent of x, y, z -> coefficient
    S: dict | None = None
    source: dict = field(default_factory=dict)

    @classmethod
    def from_poly(cls, F_lambda, p, S=None, source=None):
        coeffs = {tuple(e): int(c) % p for e, c in F_lambda.items()}
        return cls(p, coeffs, None if S is None else dict(S), source or {})

    def s_table(self):
        """S_mn read back from the coefficient of x^(5-m-n) y^m z^n."""
        if self.S is not None:
            return dict(self.S)
        F = PrimeField(self.p)
        return {(m, n): F.div(self.coeffs.get((5 - m - n, m, n), 0), multinomial(m, 5 - m - n, n))
                for n in range(6) for m in range(6 - n)}

    def poly(self):
        ring = PolyRing(("x", "y", "z"), PrimeField(self.p))
        return ring.from_dict(dict(self.coeffs))

    def singular_at_p_and_q(self):
        f = self.poly()
        F = f.ring.domain
        ok = True
        for point in ((1, 0, 0), (0, 1, 0)):
            for v in ("x", "y", "z"):
                ok &= F.is_zero(f.partial_derivative(v).evaluate(list(point)))
        return ok

    def swapped(self):
        """The same section with x and y exchanged (P and Q relabelled)."""
        coeffs = {(j, i, k): c for (i, j, k), c in self.coeffs.items()}
        S = None if self.S is None else {(m, n): c for (m, n), c in _swap_table(self.S).items()}
        return SectionInstance(self.p, coeffs, S, dict(self.source, swapped=not self.source.get("swapped", False)))

    def to_json(self):
        return {
            "p": self.p,
            "coeffs": [[list(k), v] for k, v in sorted(self.coeffs.items())],
            "S": None if self.S is None else [[list(k), int(v)] for k, v in sorted(self.S.items())],
            "source": self.source,
        }

    @classmethod
    def from_json(cls, data):
        coeffs = {tuple(k): v for k, v in data["coeffs"]}
        S = None if data.get("S") is None else {tuple(k): v for k, v in data["S"]}
        return cls(data["p"], coeffs, S, data.get("source", {}))


def _swap_table(S):
    """S'_mn for the frame (Q, P, R): the roles of x and y swap, so m -> 5 - m - n."""
    return {(5 - m - n, n): v for (m, n), v in S.items()}


def _check_prime(p, bound):
    if p > bound:
        raise PrimeTooLarge(f"full enumeration is limited to p <= {bound}")
    if p in (2, 3, 5):
        raise ValueError("characteristic 2, 3 and 5 are excluded")


def _coeff_arrays(inst):
    items = list(inst.coeffs.items())
    exps = np.array([e for e, _ in items], dtype=np.int64).reshape(-1, 3)
    cs = np.array([c for _, c in items], dtype=np.int64)
    return exps, cs


def _eval_grid(exps, cs, X, Y, Z, p):
    """Sum of c x^i y^j z^k mod p over arrays X, Y, Z."""
    pw = {}
    for name, arr in (("x", X), ("y", Y), ("z", Z)):
        table = [np.ones_like(arr)]
        for _ in range(5):
            table.append(table[-1] * arr % p)
        pw[name] = table
    out = np.zeros_like(X)
    for (i, j, k), c in zip(exps, cs):
        out = (out + c * (pw["x"][i] * pw["y"][j] % p) % p * pw["z"][k]) % p
    return out


def _cubic_cofactor(inst, alpha, beta, dval):
    """Solve f g = F_Lambda for the cubic g by exact linear algebra; None when f does not divide."""
    F = PrimeField(inst.p)
    cubic = [(i, j, 3 - i - j) for i in range(4) for j in range(4 - i)]
    quintic = [(i, j, 5 - i - j) for i in range(6) for j in range(6 - i)]
    row = {m: r for r, m in enumerate(quintic)}
    conic = {(1, 1, 0): 1, (1, 0, 1): (-beta) % inst.p, (0, 1, 1): (-alpha) % inst.p, (0, 0, 2): dval % inst.p}
    A = [[0] * len(cubic) for _ in quintic]
    for col, (a, b, c) in enumerate(cubic):
        for (i, j, k), v in conic.items():
            A[row[(a + i, b + j, c + k)]][col] = (A[row[(a + i, b + j, c + k)]][col] + v) % inst.p
    rhs = [inst.coeffs.get(m, 0) for m in quintic]
    sol = linalg.solve(A, rhs, F)
    if sol is None:
        return None
    return dict(zip(cubic, sol))


@dataclass(frozen=True)
class ConicFactor:
    alpha: int
    beta: int
    d: int

    @property
    def line_pair(self):
        """f = (x - alpha z)(y - beta z) - lambda z^2 splits exactly when lambda = alpha beta - d = 0."""
        return self.alpha * self.beta == self.d

    def key(self):
        return (self.alpha, self.beta, self.d)


def brute_force_conics(inst, bound=ENUMERATION_BOUND, with_cofactors=False):
    """All conics xy - beta xz - alpha yz + d z^2 dividing F_Lambda, by exhaustive search.

    Every conic through P and Q that does not contain the line PQ has this form.
    With lambda = alpha beta - d, the points [lambda s^2 + alpha st : t^2 + beta st : st]
    lie on it, so f | F forces F to vanish there for every s, t.  That condition
    filters the full p^3 grid; each survivor is then confirmed by solving
    f g = F_Lambda for the cubic g.
    """
    p = inst.p
    _check_prime(p, bound)
    exps, cs = _coeff_arrays(inst)
    A, B, L = np.meshgrid(np.arange(p), np.arange(p), np.arange(p), indexing="ij")
    A, B, L = A.ravel(), B.ravel(), L.ravel()
    # 11 values of t with s = 1 decide a binary form of degree 10
    for t in range(1, 12):
        X = (L + A * t) % p
        Y = (t * t + B * t) % p
        Z = np.full_like(X, t % p)
        keep = _eval_grid(exps, cs, X, Y, Z, p) == 0
        A, B, L = A[keep], B[keep], L[keep]
        if not len(A):
            break
    found = []
    for a, b, lam in zip(A.tolist(), B.tolist(), L.tolist()):
        d = (a * b - lam) % p
        g = _cubic_cofactor(inst, a, b, d)
        if g is not None:
            found.append((ConicFactor(a, b, d), g) if with_cofactors else ConicFactor(a, b, d))
    return found


# ---------------------------------------------------------------------------
# instances


def u_instance(us, p, option=1):
    """The section through the bitangent line with u-coordinates ``us``."""
    frame = numeric_frame(us, p, option)
    F = frame.domain
    rank = linalg.rank([[F.one] * 5, list(frame.U), list(frame.l)], F)
    if rank < 3:
        raise DegenerateExtension("frame does not span a plane")
    poly = flambda_poly(frame.S, F)
    return SectionInstance.from_poly(poly, p, dict(frame.S), {"kind": "u", "U": [int(u) for u in frame.U], "option": option})


def exceptional_instance(t, a, b, c, p):
    """P = [a:b:c:1:-1], Q = [a:b:c:-1:1], R = tT + S over GF(p); needs a^5 + b^5 + c^5 = 0."""
    F = PrimeField(p)
    if (a ** 5 + b ** 5 + c ** 5) % p:
        raise ValueError("(a, b, c) is not on a^5 + b^5 + c^5 = 0")
    P = (a, b, c, 1, -1)
    Q = (a, b, c, -1, 1)
    R = (0, -b, -t * c, t * c ** 5, b ** 5)
    S = {}
    for n in range(6):
        for m in range(6 - n):
            S[m, n] = sum(pi ** (5 - m - n) * qi ** m * ri ** n for pi, qi, ri in zip(P, Q, R)) % p
    poly = flambda_poly(STable(S, F), F)
    return SectionInstance.from_poly(poly, p, S, {"kind": "exceptional", "t": t, "a": a, "b": b, "c": c})


def planted_instance(p, rng):
    """f g with f = xy - beta xz - alpha yz + d z^2 and a random cubic g through P and Q."""
    F = PrimeField(p)
    ring = PolyRing(("x", "y", "z"), F)
    x, y, z = ring.gens()
    alpha, beta, d = (rng.randrange(p) for _ in range(3))
    f = x * y - x * z * beta - y * z * alpha + z * z * d
    g = ring.zero()
    for i in range(4):
        for j in range(4 - i):
            if (i, j) not in ((3, 0), (0, 3)):
                g = g + ring.monomial((i, j, 3 - i - j), rng.randrange(p))
    inst = SectionInstance.from_poly(f * g, p, None, {"kind": "planted", "conic": [alpha, beta, d]})
    return inst


def _affine_points(p):
    """One representative of each point of P^2(F_p) as an (N, 3) array."""
    pts = [(1, y, z) for y in range(p) for z in range(p)] + [(0, 1, z) for z in range(p)] + [(0, 0, 1)]
    return np.array(pts, dtype=np.int64)


def _grid_values(poly, pts, p):
    items = poly.items()
    if not items:
        return np.zeros(len(pts), dtype=np.int64)
    exps = np.array([e for e, _ in items], dtype=np.int64)
    cs = np.array([int(c) % p for _, c in items], dtype=np.int64)
    return _eval_grid(exps, cs, pts[:, 0], pts[:, 1], pts[:, 2], p)


def s3_family_instance(p, rng, max_tries=2000):
    """A section of the S3-symmetric family over GF(p) with two conic/cubic meeting points moved
    to [1:0:0] and [0:1:0]; returns (instance, (alpha, beta, d) of the family's conic).

    The curve a^5 + b^5 + c^5 - 5 psi a^3 b c + 5 psi^2 a b^2 c^2 = 0 is the one for which the
    conic e1^2 - e2 - psi x3 x4 lies on the plane section.
    """
    F = PrimeField(p)
    plane = PolyRing(("x0", "x1", "w"), F)
    x0, x1, w = plane.gens()
    pts = _affine_points(p)
    for _ in range(max_tries):
        psi, b, c = rng.randrange(1, p), rng.randrange(1, p), rng.randrange(1, p)
        avals = [a for a in range(1, p)
                 if (a ** 5 + b ** 5 + c ** 5 - 5 * psi * a ** 3 * b * c + 5 * psi ** 2 * a * b ** 2 * c ** 2) % p == 0]
        if not avals:
            continue
        a = rng.choice(avals)
        xs = (x0, x1, w.scale(a) - x0 - x1, w.scale(b), w.scale(c))
        G = sum((x ** 5 for x in xs), plane.zero()) - (xs[0] * xs[1] * xs[2] * xs[3] * xs[4]).scale(5 * psi)
        e1 = xs[0] + xs[1] + xs[2]
        e2 = xs[0] * xs[1] + xs[0] * xs[2] + xs[1] * xs[2]
        C = e1 * e1 - e2 - (xs[3] * xs[4]).scale(psi)
        on = _grid_values(C, pts, p) == 0
        for v in ("x0", "x1", "w"):
            on &= _grid_values(G.partial_derivative(v), pts, p) == 0
        sing = pts[on]
        if len(sing) < 2:
            continue
        P, Q = (tuple(int(t) for t in r) for r in sing[:2])
        R = next(r for r in ((0, 0, 1), (0, 1, 0), (1, 0, 0))
                 if linalg.rank([list(P), list(Q), list(r)], F) == 3)
        xyz = PolyRing(("x", "y", "z"), F)
        x, y, z = xyz.gens()
        images = {n: x.scale(P[k]) + y.scale(Q[k]) + z.scale(R[k]) for k, n in enumerate(("x0", "x1", "w"))}
        Gl = G.substitute(images, xyz)
        Cl = C.substitute(images, xyz)
        lead = Cl.coeff((1, 1, 0))
        if not lead or Cl.coeff((2, 0, 0)) or Cl.coeff((0, 2, 0)):
            continue
        Cl = Cl.scale(F.inv(lead))
        conic = ((-Cl.coeff((0, 1, 1))) % p, (-Cl.coeff((1, 0, 1))) % p, Cl.coeff((0, 0, 2)) % p)
        inst = SectionInstance.from_poly(Gl, p, None, {"kind": "s3", "psi": psi, "a": a, "b": b, "c": c})
        return inst, conic
    raise RuntimeError("no S3-family plane with two rational meeting points found")


def system_conics(inst):
    """Solutions of the five equations over GF(p) on the explicit branches."""
    F = PrimeField(inst.p)
    S = STable(inst.s_table(), F)
    roots = explicit_roots(S, F)
    if roots is None:
        return set()
    out = set()
    for alpha in roots["alpha"]:
        for beta in roots["beta"]:
            system = build_system(S, alpha, beta, F)
            for dv in common_d_roots(system):
                out.add((alpha, beta, dv))
    return out


class Rejected(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


def _admissible(us, p):
    """A SectionInstance for ``us`` or Rejected with the reason."""
    F = PrimeField(p)
    if len(set(us)) < 5:
        raise Rejected("repeated u")
    try:
        bitangent.m_map(bitangent.PointP4(tuple(us), F))
    except BaseLocus:
        raise Rejected("BaseLocus") from None
    try:
        inst = u_instance(us, p)
    except (DegenerateExtension, ZeroDivisionError):
        raise Rejected("degenerate frame") from None
    S = inst.S
    if any(S[k] == 0 for k in ((2, 0), (3, 0))):
        raise Rejected("degenerate extension")
    for lead, mid, const in (((2, 0), (1, 1), (0, 2)), ((3, 0), (3, 1), (3, 2))):
        disc = (S[mid] ** 2 - S[lead] * S[const]) % p
        if disc == 0:
            raise Rejected("degenerate extension")
        if F.sqrt(disc) is None:
            raise Rejected("non-residue discriminant")
    return inst


def sample_admissible(p, rng, count, max_draws=100000):
    """``count`` admissible instances by rejection sampling, plus the rejection tally."""
    out, rejected = [], {}
    draws = 0
    while len(out) < count:
        draws += 1
        if draws > max_draws:
            raise RuntimeError("rejection sampling did not converge")
        us = [rng.randrange(p) for _ in range(5)]
        try:
            out.append(_admissible(us, p))
        except Rejected as exc:
            rejected[exc.reason] = rejected.get(exc.reason, 0) + 1
    return out, rejected


def compare(inst, bound=ENUMERATION_BOUND):
    """(agrees, system solutions, enumerated factorizations)."""
    sys_sols = system_conics(inst)
    brute = {c.key() for c in brute_force_conics(inst, bound)}
    return sys_sols == brute, sys_sols, brute


def _on_family(t, a, b, c, p):
    """Membership in the families t = 0, b^20 = 1 and t = 1, a^20 = 1 (which carry conics)."""
    return (t == 0 and pow(b, 20, p) == 1) or (t == 1 and a and pow(a, 20, p) == 1)


def exceptional_samples(p, rng, count):
    """Exceptional-pair sections, alternating between a conic-carrying family and a random t.

    Points with bc != 0 on a^5 + b^5 + c^5 = 0 are enumerated; over GF(101) they all have a = 0.
    """
    pts = [(a, b, c) for b in range(1, p) for c in range(1, p) for a in range(p)
           if (pow(a, 5, p) + pow(b, 5, p) + pow(c, 5, p)) % p == 0]
    fam = [(t, *pt) for pt in pts for t in (0, 1) if _on_family(t, *pt, p)]
    out = []
    tries = 0
    while len(out) < count and tries < 10000:
        tries += 1
        if len(out) % 2 == 0 and fam:
            t, a, b, c = rng.choice(fam)
        else:
            (a, b, c), t = rng.choice(pts), rng.randrange(2, p)
        inst = exceptional_instance(t, a, b, c, p)
        if inst.S[1, 1] == 0:
            continue
        out.append(inst)
    return out


@dataclass
class AgreementReport:
    p: int
    seed: int
    samples: int
    agreed: int
    with_conics: int
    rejected: dict
    exceptional: list
    planted: list
    identity: list
    failures: list

    @property
    def ok(self):
        return (self.agreed == self.samples and not self.failures
                and all(v.passed and v.bound <= SZ_TARGET for v in self.identity)
                and all(e["agrees"] for e in self.exceptional + self.planted))

    def lines(self):
        out = [f"== oracle cross-validation over GF({self.p}), seed {self.seed}"]
        out.append(f"agreement: {self.agreed}/{self.samples} samples ({self.with_conics} with conics)")
        out.append("rejections: " + ", ".join(f"{k}={v}" for k, v in sorted(self.rejected.items())))
        for e in self.exceptional:
            out.append(f"exceptional t={e['t']}: {len(e['conics'])} conics, {'OK' if e['agrees'] else 'FAIL'}")
        hit = sum(1 for e in self.planted if e["agrees"] and tuple(e["conic"]) in map(tuple, e["conics"]))
        out.append(f"planted conic times cubic: {hit}/{len(self.planted)} recovered by both sides")
        for v in self.identity:
            out.append(f"{v.name}: {'OK' if v.passed else 'FAIL'} (bound 2^{math.log2(v.bound):.0f})")
        out.append(f"overall: {'OK' if self.ok else 'FAIL'}")
        return out

    def to_json(self):
        return {
            "p": self.p, "seed": self.seed, "samples": self.samples, "agreed": self.agreed,
            "with_conics": self.with_conics, "rejected": self.rejected, "exceptional": self.exceptional,
            "planted": self.planted,
            "identity": [v.to_json() for v in self.identity], "failures": self.failures, "ok": self.ok,
        }


def cross_validate(samples=100, p=ENUMERATION_BOUND, seed=7, exceptional=4, planted=6, bound=ENUMERATION_BOUND):
    """Rejection-sampled bitangent sections, exceptional-pair sections and planted products,
    each solved both ways and compared."""
    _check_prime(p, bound)
    rng = random.Random(seed)
    insts, rejected = sample_admissible(p, rng, samples)
    agreed = with_conics = 0
    failures = []
    for inst in insts:
        ok, sys_sols, brute = compare(inst, bound)
        agreed += ok
        with_conics += bool(brute)
        if not ok:
            failures.append({"instance": inst.to_json(), "system": sorted(sys_sols), "brute": sorted(brute)})
    ex = []
    for inst in exceptional_samples(p, rng, exceptional):
        ok, sys_sols, brute = compare(inst, bound)
        ex.append({**inst.source, "agrees": ok, "conics": sorted(brute)})
        if not ok:
            failures.append({"instance": inst.to_json(), "system": sorted(sys_sols), "brute": sorted(brute)})
    pl = []
    for _ in range(planted):
        inst = planted_instance(p, rng)
        ok, sys_sols, brute = compare(inst, bound)
        pl.append({**inst.source, "agrees": ok, "conics": sorted(brute)})
        if not ok:
            failures.append({"instance": inst.to_json(), "system": sorted(sys_sols), "brute": sorted(brute)})
    identity = standard_identity_checks(seed=seed)
    return AgreementReport(p, seed, len(insts), agreed, with_conics, rejected, ex, pl, identity, failures)


def replay(path, bound=ENUMERATION_BOUND):
    with open(path) as fh:
        data = json.load(fh)
    inst = SectionInstance.from_json(data)
    return compare(inst, bound)
