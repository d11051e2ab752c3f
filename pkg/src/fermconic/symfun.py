"""Symmetric functions of u0..u4, the bitangent kernel M_i and the S_mn tables.

Two independent routes produce S_mn:

* the u-route forms sum_i M_i u_i^m l_i^n in Q[u0..u4] and divides exactly by
  the discriminant delta;
* the e-route works in Q[e1..e5][X] / (E(X)), E(X) = prod (X - u_i).  Because
  (-1)^i d_i / delta = 1 / E'(u_i) and n_i = g(u_i) for a quadratic g with
  coefficients in e, Lagrange interpolation gives
  S_mn = [X^4] (g(X) X^m L(X)^n mod E) whenever l_i = L(u_i).

The Newton recurrence with the binomial lift is a third route for the first
coordinate-simplex choice.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb

from .polyalg import QQ, DomainError, MultiPoly, NotDivisible, PolyRing, resultant

U_VARS = ("u0", "u1", "u2", "u3", "u4")
E_VARS = ("e1", "e2", "e3", "e4", "e5")

U_RING = PolyRing(U_VARS, QQ)
E_RING = PolyRing(E_VARS, QQ)


def elementary(vals, k, ring):
    """e_k of a list of ring elements."""
    if k == 0:
        return ring.one()
    out = ring.zero()
    for combo in itertools.combinations(vals, k):
        term = combo[0]
        for v in combo[1:]:
            term = term * v
        out = out + term
    return out


@dataclass(frozen=True)
class ESymTable:
    """e_k(u) for k=0..5 and the partial e_k(i) of the four variables other than u_i."""

    e: tuple
    partial: tuple  # partial[i][k], k = 0..4

    @classmethod
    def build(cls, ring=U_RING):
        us = ring.gens()
        e = tuple(elementary(us, k, ring) for k in range(6))
        partial = tuple(
            tuple(elementary([u for j, u in enumerate(us) if j != i], k, ring) for k in range(5))
            for i in range(5)
        )
        return cls(e, partial)

    def check_splitting(self, ring=U_RING):
        """e_k = e_k(i) + u_i e_{k-1}(i) for all i and k >= 1."""
        us = ring.gens()
        for i in range(5):
            for k in range(1, 6):
                ek_i = self.partial[i][k] if k < 5 else ring.zero()
                if self.e[k] != ek_i + us[i] * self.partial[i][k - 1]:
                    return False
        return True


def vandermonde(vals):
    """prod_{j>k} (v_j - v_k)."""
    out = vals[0].ring.one() if isinstance(vals[0], MultiPoly) else 1
    for j in range(len(vals)):
        for k in range(j):
            out = out * (vals[j] - vals[k])
    return out


@dataclass(frozen=True)
class BitangentKernel:
    """delta, the partial discriminants d_i, the quartics n_i and M_i = (-1)^i d_i n_i."""

    esym: ESymTable
    delta: MultiPoly
    d: tuple
    n: tuple
    M: tuple

    @property
    def ring(self):
        return self.delta.ring


@lru_cache(maxsize=None)
def build_kernel(ring=U_RING):
    esym = ESymTable.build(ring)
    us = ring.gens()
    delta = vandermonde(us)
    d = tuple(vandermonde([u for j, u in enumerate(us) if j != i]) for i in range(5))
    n = tuple(esym.partial[i][2] ** 2 - esym.partial[i][1] * esym.partial[i][3] for i in range(5))
    M = tuple((d[i] * n[i]) * (-1) ** i for i in range(5))
    return BitangentKernel(esym, delta, d, n, M)


def weighted_power_sum(kernel, m, ls=None, n=0):
    """sum_i M_i u_i^m l_i^n in the u-ring."""
    ring = kernel.ring
    us = ring.gens()
    out = ring.zero()
    for i in range(5):
        term = kernel.M[i] * us[i] ** m
        if n:
            term = term * ls[i] ** n
        out = out + term
    return out


@dataclass
class Report:
    """Named boolean checks with optional residuals and free-form notes."""

    title: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name, ok, residual=None, **extra):
        entry = {"name": name, "ok": bool(ok)}
        if residual is not None and not ok:
            entry["residual"] = str(residual)
        entry.update(extra)
        self.checks.append(entry)
        return ok

    @property
    def ok(self):
        """True when every gated check holds; ``gated=False`` entries are informational."""
        return all(c["ok"] for c in self.checks if c.get("gated", True))

    def check(self, name):
        for c in self.checks:
            if c["name"] == name:
                return c["ok"]
        raise KeyError(name)

    def failed(self):
        return [c for c in self.checks if not c["ok"] and c.get("gated", True)]

    def to_json(self):
        return {"title": self.title, "ok": self.ok, "checks": self.checks, "notes": self.notes}

    def lines(self):
        out = [f"== {self.title}"]
        for c in self.checks:
            tag = "OK" if c["ok"] else ("FAIL" if c.get("gated", True) else "no")
            out.append(f"{c['name']}: {tag}")
        out.extend(f"note: {n}" for n in self.notes)
        return out


def verify_vandermonde_kernel(kernel=None):
    kernel = kernel or build_kernel()
    rep = Report("kernel identities")
    for m in (0, 1, 4, 5):
        s = weighted_power_sum(kernel, m)
        rep.add(f"sum M_i u_i^{m} = 0", s.is_zero(), None if s.is_zero() else s)
    s2 = weighted_power_sum(kernel, 2)
    try:
        q = s2.divide_exact(kernel.delta)
        rep.add("sum M_i u_i^2 = delta*e2 (control)", q == kernel.esym.e[2] and bool(s2))
    except NotDivisible as exc:
        rep.add("sum M_i u_i^2 = delta*e2 (control)", False, exc.remainder)
    for i in range(5):
        rep.add(f"M_{i} homogeneous of degree 10", kernel.M[i].is_homogeneous() and kernel.M[i].total_degree() == 10)
    return rep


def base_locus_identities(kernel=None):
    kernel = kernel or build_kernel()
    e = kernel.esym.e
    n = kernel.n
    us = kernel.ring.gens()
    rep = Report("base-locus identities")
    for i, j, k in itertools.combinations(range(5), 3):
        lhs = n[i] * (us[j] - us[k]) + n[j] * (us[k] - us[i]) + n[k] * (us[i] - us[j])
        rhs = (us[j] - us[k]) * (us[k] - us[i]) * (us[i] - us[j]) * e[2]
        rep.add(f"triple ({i},{j},{k})", lhs == rhs, lhs - rhs)
        rep.add(f"triple ({i},{j},{k}) with -e2", lhs == -rhs, lhs + rhs, gated=False)
    sums = [
        ("sum n_i = 3e2^2 - 4e1e3", sum(n, kernel.ring.zero()), e[2] ** 2 * 3 - e[1] * e[3] * 4),
        ("sum u_i n_i = e2e3", sum((us[i] * n[i] for i in range(5)), kernel.ring.zero()), e[2] * e[3]),
        ("sum u_i^2 n_i = 3e3^2 - 4e4e2", sum((us[i] ** 2 * n[i] for i in range(5)), kernel.ring.zero()), e[3] ** 2 * 3 - e[4] * e[2] * 4),
    ]
    for name, lhs, rhs in sums:
        rep.add(name, lhs == rhs, lhs - rhs)
    return rep


# ---------------------------------------------------------------------------
# involution u_i -> 1/u_i


def involute(p, power=None):
    """p(1/u0, ..., 1/u4) * e5^power as a polynomial, with power defaulting to the minimum.

    Returns (polynomial, power).  Raises DomainError when ``power`` is too small
    to clear denominators.
    """
    ring = p.ring
    unpack = ring.unpack
    need = max((max(unpack(k)) for k in p.terms), default=0)
    if power is None:
        power = need
    if power < need:
        raise DomainError(f"e5^{power} does not clear the denominators (need {need})")
    return ring.from_dict({tuple(power - a for a in unpack(k)): c for k, c in p.terms.items()}), power


def involution_relations(kernel=None):
    kernel = kernel or build_kernel()
    ring = kernel.ring
    e = kernel.esym.e
    us = ring.gens()
    rep = Report("involution relations")

    def scaled_matches(p, power, rhs):
        """p(iota) * e5^power == rhs as Laurent polynomials."""
        clear = max(power, involute(p)[1])
        lhs, _ = involute(p, clear)
        return lhs == rhs * e[5] ** (clear - power)

    for k in range(6):
        rep.add(f"e{k}(iota)*e5 = e{5 - k}", scaled_matches(e[k], 1, e[5 - k]))
    for i in range(5):
        plus = scaled_matches(kernel.d[i], 3, kernel.d[i] * us[i] ** 3)
        minus = scaled_matches(kernel.d[i], 3, -kernel.d[i] * us[i] ** 3)
        rep.add(f"d{i}(iota)*e5^3 = +d{i}*u{i}^3", plus, sign="+" if plus else ("-" if minus else "?"))
    for i in range(5):
        rep.add(f"n{i}(iota)*e5^2 = n{i}*u{i}^2", scaled_matches(kernel.n[i], 2, kernel.n[i] * us[i] ** 2))
    for i in range(5):
        rep.add(f"M{i}(iota)*e5^5 = M{i}*u{i}^5", scaled_matches(kernel.M[i], 5, kernel.M[i] * us[i] ** 5))
    # the alternative exponents (e5^k, e5^2 for d_i, e5^4 for n_i) are recorded, not required
    stated = {
        "e_k(iota)*e5^k = e_(5-k)": all(scaled_matches(e[k], k, e[5 - k]) for k in range(6)),
        "d_i(iota)*e5^2 = d_i*u_i^2": all(scaled_matches(kernel.d[i], 2, kernel.d[i] * us[i] ** 2) for i in range(5)),
        "n_i(iota)*e5^4 = n_i*u_i^2": all(scaled_matches(kernel.n[i], 4, kernel.n[i] * us[i] ** 2) for i in range(5)),
    }
    for name, holds in stated.items():
        rep.notes.append(f"alternative scaling {name}: {'holds' if holds else 'does not hold'}")
    rep.alternative_scalings = stated
    return rep


# ---------------------------------------------------------------------------
# e-basis arithmetic in Q[e][X] / (E(X))


class QuotientX:
    """Element c0 + c1 X + ... + c4 X^4 of Q[e1..e5][X] modulo E(X)."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) > 5:
            coeffs = _reduce_mod_E(coeffs)
        while len(coeffs) < 5:
            coeffs.append(E_RING.zero())
        self.c = tuple(coeffs)

    @classmethod
    def X(cls, k=1):
        return cls([E_RING.zero()] * k + [E_RING.one()])

    @classmethod
    def const(cls, p):
        return cls([E_RING.convert(p)])

    @classmethod
    def from_poly(cls, p, var="X"):
        """From a polynomial in X (other variables in e1..e5)."""
        by = p.collect(var)
        top = max(by) if by else 0
        ring = p.ring.drop(var)
        coeffs = [E_RING.zero()] * (top + 1)
        for k, c in by.items():
            coeffs[k] = c.to_ring(ring).to_ring(E_RING)
        return cls(coeffs)

    def __add__(self, o):
        return QuotientX([a + b for a, b in zip(self.c, o.c)])

    def __sub__(self, o):
        return QuotientX([a - b for a, b in zip(self.c, o.c)])

    def __mul__(self, o):
        if not isinstance(o, QuotientX):
            return QuotientX([a * o for a in self.c])
        out = [E_RING.zero() for _ in range(9)]
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(o.c):
                if b:
                    out[i + j] = out[i + j] + a * b
        return QuotientX(out)

    def __pow__(self, k):
        out = QuotientX.const(1)
        for _ in range(k):
            out = out * self
        return out

    def top(self):
        return self.c[4]

    def __eq__(self, o):
        return all(a == b for a, b in zip(self.c, o.c))


def _reduce_mod_E(coeffs):
    e1, e2, e3, e4, e5 = E_RING.gens()
    # X^5 = e1 X^4 - e2 X^3 + e3 X^2 - e4 X + e5
    rel = (e5, -e4, e3, -e2, e1)
    coeffs = list(coeffs)
    for top in range(len(coeffs) - 1, 4, -1):
        c = coeffs[top]
        coeffs[top] = E_RING.zero()
        if not c:
            continue
        for k in range(5):
            coeffs[top - 5 + k] = coeffs[top - 5 + k] + c * rel[k]
    return coeffs[:5]


def n_quadratic():
    """g(X) with n_i = g(u_i): e2 X^2 + (e3 - e1 e2) X + (e2^2 - e1 e3)."""
    e1, e2, e3, e4, e5 = E_RING.gens()
    return QuotientX([e2 ** 2 - e1 * e3, e3 - e1 * e2, e2])


def ebasis_smn(m, n, L):
    """S_mn = [X^4](g X^m L^n mod E) for the frame l_i = L(u_i)."""
    h = n_quadratic() * QuotientX.X(m) if m < 5 else n_quadratic() * (QuotientX.X(1) ** m)
    for _ in range(n):
        h = h * L
    return h.top()


@lru_cache(maxsize=None)
def newton_s(m):
    """S_m0 in e1..e5 from the Newton-type recurrence, seeded by 0, 0, e2, e3, 0, 0."""
    e1, e2, e3, e4, e5 = E_RING.gens()
    seeds = {0: E_RING.zero(), 1: E_RING.zero(), 2: e2, 3: e3, 4: E_RING.zero(), 5: E_RING.zero()}
    if m < 0:
        raise ValueError("m must be non-negative")
    if m in seeds:
        return seeds[m]
    return e1 * newton_s(m - 1) - e2 * newton_s(m - 2) + e3 * newton_s(m - 3) - e4 * newton_s(m - 4) + e5 * newton_s(m - 5)


@lru_cache(maxsize=None)
def smn_option1(m, n):
    """S_mn for l_i = S80 u_i^5 - S90 u_i^4 through the signed binomial lift."""
    S80, S90 = newton_s(8), newton_s(9)
    out = E_RING.zero()
    for k in range(n + 1):
        out = out + S80 ** k * (-S90) ** (n - k) * newton_s(m + 4 * n + k) * comb(n, k)
    return out


def option1_generator():
    """L(X) = S80 X^5 - S90 X^4 reduced mod E."""
    return QuotientX([E_RING.zero()] * 4 + [-newton_s(9), newton_s(8)])


def option1_u_coordinates():
    """The five l_i of the first simplex choice as polynomials in u."""
    S80 = to_u(newton_s(8))
    S90 = to_u(newton_s(9))
    us = U_RING.gens()
    return tuple(S80 * u ** 5 - S90 * u ** 4 for u in us)


@lru_cache(maxsize=None)
def _pcof_poly():
    """prod_{j != i} g(u_j) as a polynomial in X = u_i, via Res_Y(E(Y)/(Y - X), g(Y))."""
    ring = PolyRing(("X", "Y") + E_VARS, QQ)
    X, Y, e1, e2, e3, e4, e5 = ring.gens()
    # E(Y)/(Y - X) by synthetic division: Horner partial sums
    ecoef = [ring.one(), -e1, e2, -e3, e4]
    quotient = []
    acc = ring.zero()
    for c in ecoef:
        acc = acc * X + c
        quotient.append(acc)
    Ei = sum((q * Y ** (4 - k) for k, q in enumerate(quotient)), ring.zero())
    g = e2 * Y ** 2 + (e3 - e1 * e2) * Y + (e2 ** 2 - e1 * e3)
    return resultant(Ei, g, "Y").to_ring(ring.drop("Y"))


def option2_generator():
    """L(X) = e2(i)(X) * prod_{j != i} n_j as an element of Q[e][X]/(E)."""
    e1, e2, e3, e4, e5 = E_RING.gens()
    pcof = QuotientX.from_poly(_pcof_poly())
    return QuotientX([e2, -e1, E_RING.one()]) * pcof


@lru_cache(maxsize=None)
def n_product():
    """prod_i n_i = Res_X(E, g), an element of Q[e1..e5]."""
    ring = PolyRing(("X",) + E_VARS, QQ)
    X, e1, e2, e3, e4, e5 = ring.gens()
    E = X ** 5 - e1 * X ** 4 + e2 * X ** 3 - e3 * X ** 2 + e4 * X - e5
    g = e2 * X ** 2 + (e3 - e1 * e2) * X + (e2 ** 2 - e1 * e3)
    return resultant(E, g, "X").to_ring(ring.drop("X")).to_ring(E_RING)


def option2_u_coordinates(kernel=None):
    kernel = kernel or build_kernel()
    out = []
    for i in range(5):
        prod = U_RING.one()
        for j in range(5):
            if j != i:
                prod = prod * kernel.n[j]
        out.append(kernel.esym.partial[i][2] * prod)
    return tuple(out)


# ---------------------------------------------------------------------------
# tables


class SmnTable:
    """Lazily computed S_mn entries with memoization keyed by (frame tag, m, n)."""

    def __init__(self, tag, compute, ring, seeds=None):
        self.tag = tag
        self.ring = ring
        self._compute = compute
        self._cache = dict(seeds or {})

    def __getitem__(self, mn):
        mn = tuple(mn)
        if mn not in self._cache:
            self._cache[mn] = self._compute(*mn)
        return self._cache[mn]

    def get(self, m, n):
        return self[m, n]

    def entries(self, max_total=5):
        return {(m, n): self[m, n] for n in range(max_total + 1) for m in range(max_total + 1 - n)}

    def computed(self):
        return dict(self._cache)

    def to_json(self, max_total=5):
        return {f"S_{m}_{n}": p.to_json() for (m, n), p in sorted(self.entries(max_total).items(), key=lambda kv: (kv[0][1], kv[0][0]))}


def ebasis_table(tag, L):
    powers = {}

    def compute(m, n):
        if n == 0:
            return newton_s(m)
        if n not in powers:
            powers[n] = L ** n
        h = n_quadratic() * _x_power(m) * powers[n]
        return h.top()

    return SmnTable(tag, compute, E_RING)


def _x_power(m):
    return QuotientX.X(m) if m <= 4 else QuotientX.X(1) ** m


@lru_cache(maxsize=None)
def option1_table():
    return ebasis_table("option1", option1_generator())


@lru_cache(maxsize=None)
def option2_table():
    return ebasis_table("option2", option2_generator())


def smn_from_frame(m, n, ls, kernel=None):
    """Exact quotient of sum_i M_i u_i^m l_i^n by delta (u-route)."""
    kernel = kernel or build_kernel()
    return weighted_power_sum(kernel, m, ls, n).divide_exact(kernel.delta)


def frame_table(tag, ls, kernel=None):
    kernel = kernel or build_kernel()
    return SmnTable(tag, lambda m, n: smn_from_frame(m, n, ls, kernel), U_RING)


def option2_cofactor(m, n, kernel=None):
    """T_mn in u with S'_mn = (prod n_i) * T_mn, for n >= 1 (u-route)."""
    if n < 1:
        raise ValueError("cofactor form needs n >= 1")
    kernel = kernel or build_kernel()
    us = U_RING.gens()
    total = U_RING.zero()
    for i in range(5):
        P = U_RING.one()
        for j in range(5):
            if j != i:
                P = P * kernel.n[j]
        term = kernel.d[i] * us[i] ** m * kernel.esym.partial[i][2] ** n
        if n > 1:
            term = term * P ** (n - 1)
        total = total + term * (-1) ** i
    return total.divide_exact(kernel.delta)


def option2_initial_values():
    """The displayed S' values and the corrected S'12 combination (e-route)."""
    T = option2_table()
    e1, e2, e3, e4, e5 = E_RING.gens()
    N = n_product()
    S80 = newton_s(8)
    rep = Report("option-2 initial values")
    for m in (0, 1, 3, 4):
        rep.add(f"S'_{m}1 = 0", T[m, 1].is_zero())
    rep.add("S'_21 = prod n_i", T[2, 1] == N)
    rep.add("S'_02 = -e2 e3^2 S80 prod n_i", T[0, 2] == -e2 * e3 ** 2 * S80 * N)
    lhs = T[1, 2] * e2 + T[0, 2] * e3
    stated = -e2 * e3 ** 2 * (e3 ** 2 * e2 ** 2 * e1 + e5 * e3 ** 3 + e4 ** 2 * e3 * e2 * e1 - e3 ** 2 * e2) * N
    corrected = e2 ** 2 * e3 ** 2 * (e1 * e2 ** 2 * e4 - e1 * e2 * e3 ** 2 - e2 ** 2 * e5 + e3 ** 3) * N
    rep.add("S'_12 e2 + S'_02 e3 = -e2e3^2(e3^2e2^2e1+e5e3^3+e4^2e3e2e1-e3^2e2) prod n_i", lhs == stated)
    rep.add("S'_12 e2 + S'_02 e3 = e2^2e3^2(e1e2^2e4-e1e2e3^2-e2^2e5+e3^3) prod n_i", lhs == corrected)
    return rep


def seeds_report(table, label):
    rep = Report(f"{label} seeds")
    e = E_RING.gens()
    ring = table.ring
    if ring == E_RING:
        e2, e3 = e[1], e[2]
    else:
        es = build_kernel().esym.e
        e2, e3 = es[2], es[3]
    for m in (0, 1, 4, 5):
        rep.add(f"S_{m}0 = 0", table[m, 0].is_zero())
    rep.add("S_20 = e2", table[2, 0] == e2)
    rep.add("S_30 = e3", table[3, 0] == e3)
    return rep


# ---------------------------------------------------------------------------
# conversions between the e- and u-bases


@lru_cache(maxsize=None)
def _e_in_u():
    return build_kernel().esym.e


def to_u(p):
    """Expand a polynomial in e1..e5 into u0..u4."""
    e = _e_in_u()
    return p.substitute({f"e{k}": e[k] for k in range(1, 6)}, U_RING)


def tau_swap_ebasis(p, power):
    """p(e_k -> e_{5-k}/e5) * e5^power, the involution on a symmetric polynomial."""
    unpack = E_RING.unpack
    out = {}
    for k, c in p.terms.items():
        a1, a2, a3, a4, a5 = unpack(k)
        t5 = power - (a1 + a2 + a3 + a4 + a5)
        if t5 < 0:
            raise DomainError(f"e5^{power} does not clear the denominators")
        out[(a4, a3, a2, a1, t5)] = c
    return E_RING.from_dict(out)


def is_symmetric(p, rng=None, samples=10):
    """Invariance of a u-polynomial under random transpositions."""
    rng = rng or random.Random(0)
    for _ in range(samples):
        i, j = rng.sample(range(5), 2)
        perm = {f"u{i}": U_RING.gen(f"u{j}"), f"u{j}": U_RING.gen(f"u{i}")}
        if p.substitute(perm, U_RING) != p:
            return False
    return True
