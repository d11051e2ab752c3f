"""Exact sparse multivariate polynomials over pluggable coefficient domains.

Monomials are packed into Python integers: one 16-bit field per variable with
the total degree in the topmost field.  Integer comparison of packed keys is
then the degree-lexicographic order, which is what exact division uses for
leading terms; the canonical (serialization) order is graded reverse
lexicographic and is only materialized when terms are listed.
"""

from __future__ import annotations

import ast
import heapq
import operator
from fractions import Fraction
from functools import reduce

BITS = 16
FIELD_MASK = (1 << BITS) - 1
MAX_EXP = (1 << (BITS - 1)) - 1


class DomainError(ValueError):
    """Operands live in incompatible rings or domains."""


class NotDivisible(ArithmeticError):
    """Exact division failed; ``remainder`` is a nonzero witness f - q*g."""

    def __init__(self, remainder, message="polynomial is not divisible"):
        super().__init__(message)
        self.remainder = remainder


class NotInvertible(ZeroDivisionError):
    pass


class DegenerateExtension(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# coefficient domains


class Domain:
    """Coefficient domain protocol.

    Elements are plain Python values that support ``+ - *`` and truthiness.
    ``norm`` canonicalizes the raw output of those operators (reduction mod p,
    collapsing integral fractions) and is applied by the polynomial kernel.
    """

    name = "domain"
    zero = 0
    one = 1
    is_field = True

    def convert(self, x):
        raise NotImplementedError

    def norm(self, c):
        return c

    def add(self, a, b):
        return self.norm(a + b)

    def sub(self, a, b):
        return self.norm(a - b)

    def mul(self, a, b):
        return self.norm(a * b)

    def neg(self, a):
        return self.norm(-a)

    def div(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        return self.div(self.one, a)

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def pow(self, a, k):
        out = self.one
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def to_str(self, c):
        return str(c)

    def from_str(self, s):
        return self.convert(Fraction(s))

    def __repr__(self):
        return self.name


class Rationals(Domain):
    """QQ with int/Fraction elements; integral fractions collapse to int."""

    name = "QQ"

    def convert(self, x):
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, str):
            return self.norm(Fraction(x))
        raise DomainError(f"cannot convert {x!r} to QQ")

    def norm(self, c):
        if type(c) is Fraction and c.denominator == 1:
            return c.numerator
        return c

    def div(self, a, b):
        if not b:
            raise NotInvertible("division by zero in QQ")
        if b == 1:
            return a
        if b == -1:
            return -a
        return self.norm(Fraction(a) / b)

    def to_str(self, c):
        c = Fraction(c)
        return f"{c.numerator}/{c.denominator}"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")


QQ = Rationals()


class PrimeField(Domain):
    """GF(p) with elements stored as ints in [0, p)."""

    def __init__(self, p):
        if p < 2:
            raise DomainError("modulus must be a prime >= 2")
        self.p = p
        self.name = f"GF({p})"

    def convert(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self.convert(Fraction(x))
        raise DomainError(f"cannot convert {x!r} to {self.name}")

    def norm(self, c):
        return c % self.p

    def div(self, a, b):
        b %= self.p
        if not b:
            raise NotInvertible(f"division by zero in {self.name}")
        return a * pow(b, -1, self.p) % self.p

    def sqrt(self, a):
        """A square root of ``a`` or None when ``a`` is a non-residue."""
        from sympy.ntheory import sqrt_mod

        return sqrt_mod(a % self.p, self.p)

    def to_str(self, c):
        return str(c % self.p)

    def from_str(self, s):
        return self.convert(int(s) if "/" not in s else Fraction(s))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


# ---------------------------------------------------------------------------
# rings and polynomials


class PolyRing:
    """Polynomial ring over ``domain`` in an ordered tuple of named variables."""

    def __init__(self, names, domain=QQ):
        if isinstance(names, str):
            names = tuple(n for n in names.replace(",", " ").split())
        names = tuple(names)
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate variable names in {names}")
        self.vars = names
        self.domain = domain
        self.nvars = len(names)
        self.index = {v: i for i, v in enumerate(names)}
        n = self.nvars
        self._shifts = tuple(BITS * (n - 1 - i) for i in range(n))
        self._deg_shift = BITS * n
        self._unit = tuple((1 << s) + (1 << self._deg_shift) for s in self._shifts)
        self._guard = sum(1 << (BITS * k + BITS - 1) for k in range(n + 1))
        self._hash = hash((self.vars, self.domain))

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.vars == self.vars and other.domain == self.domain

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PolyRing({', '.join(self.vars)}; {self.domain!r})"

    # monomial packing ------------------------------------------------------
    def pack(self, exps):
        if len(exps) != self.nvars:
            raise DomainError(f"exponent vector {exps} has wrong length for {self.vars}")
        key = 0
        deg = 0
        for e, s in zip(exps, self._shifts):
            if e < 0 or e > MAX_EXP:
                raise DomainError(f"exponent {e} out of range")
            key |= e << s
            deg += e
        if deg > MAX_EXP:
            raise DomainError("total degree out of range")
        return key | (deg << self._deg_shift)

    def unpack(self, key):
        return tuple((key >> s) & FIELD_MASK for s in self._shifts)

    def key_degree(self, key):
        return key >> self._deg_shift

    def divides(self, small, big):
        g = self._guard
        return ((big | g) - small) & g == g

    # constructors ------------------------------------------------------------
    def zero(self):
        return MultiPoly(self, {})

    def one(self):
        return MultiPoly(self, {0: self.domain.one})

    def const(self, c):
        c = self.domain.convert(c)
        return MultiPoly(self, {0: c} if c else {})

    def gen(self, name):
        if name not in self.index:
            raise DomainError(f"unknown variable {name!r} in {self.vars}")
        return MultiPoly(self, {self._unit[self.index[name]]: self.domain.one})

    def gens(self):
        return tuple(self.gen(v) for v in self.vars)

    def monomial(self, exps, coeff=1):
        c = self.domain.convert(coeff)
        return MultiPoly(self, {self.pack(tuple(exps)): c} if c else {})

    def from_dict(self, d):
        terms = {}
        norm = self.domain.norm
        conv = self.domain.convert
        for exps, c in d.items():
            c = norm(conv(c))
            if c:
                k = self.pack(tuple(exps))
                terms[k] = norm(terms[k] + c) if k in terms else c
        return MultiPoly(self, {k: c for k, c in terms.items() if c})

    def convert(self, x):
        """Coerce a scalar or polynomial of this ring into this ring."""
        if isinstance(x, MultiPoly):
            if x.ring != self:
                raise DomainError(f"polynomial over {x.ring} used in {self}")
            return x
        return self.const(x)

    def parse(self, text):
        """Parse an arithmetic expression in this ring's variables (``^`` is power)."""
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        return self._eval_ast(tree.body)

    def _eval_ast(self, node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return self.const(node.value)
        if isinstance(node, ast.Name):
            return self.gen(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self._eval_ast(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = self._eval_ast(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise DomainError("exponent must be an integer literal")
                return a ** node.right.value
            b = self._eval_ast(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if not b.is_constant():
                    return a.divide_exact(b)
                return a * self.domain.inv(b.constant_value())
        raise DomainError(f"unsupported expression element {ast.dump(node)}")

    def drop(self, *names):
        return PolyRing([v for v in self.vars if v not in names], self.domain)

    def extend(self, *names, front=False):
        new = [v for v in names if v not in self.index]
        return PolyRing((new + list(self.vars)) if front else (list(self.vars) + new), self.domain)

    def with_domain(self, domain):
        return PolyRing(self.vars, domain)

    def grevlex_key(self, exps):
        return (sum(exps), tuple(-e for e in reversed(exps)))


class MultiPoly:
    """Immutable sparse polynomial; ``terms`` maps packed monomials to coefficients."""

    __slots__ = ("ring", "terms", "_deg")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._deg = None

    # coercion ----------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise DomainError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    # basic predicates ------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise DomainError("polynomial is not constant")
        return self.terms.get(0, self.ring.domain.zero)

    def constant_term(self):
        return self.terms.get(0, self.ring.domain.zero)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                return False
            return self.terms == other.terms if _plain(self.ring.domain) else (self - other).is_zero()
        try:
            other = self.ring.const(other)
        except DomainError:
            return NotImplemented
        return self == other

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # arithmetic ----------------------------------------------------------------
    def __neg__(self):
        norm = self.ring.domain.norm
        return MultiPoly(self.ring, {k: norm(-c) for k, c in self.terms.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        return MultiPoly(self.ring, _add_terms(self.terms, other.terms, self.ring.domain.norm, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return MultiPoly(self.ring, _add_terms(self.terms, other.terms, self.ring.domain.norm, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = self.ring.domain.convert(other)
            return self.scale(c)
        if other.ring != self.ring:
            raise DomainError(f"ring mismatch: {self.ring} vs {other.ring}")
        a, b = self.terms, other.terms
        if not a or not b:
            return MultiPoly(self.ring, {})
        if self.total_degree() + other.total_degree() > MAX_EXP:
            raise DomainError("total degree overflow")
        if len(a) < len(b):
            a, b = b, a
        return MultiPoly(self.ring, _mul_terms(a, b, self.ring.domain.norm))

    __rmul__ = __mul__

    def scale(self, c):
        norm = self.ring.domain.norm
        if not c:
            return MultiPoly(self.ring, {})
        out = {}
        for k, v in self.terms.items():
            w = norm(v * c)
            if w:
                out[k] = w
        return MultiPoly(self.ring, out)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DomainError("exponent must be a non-negative integer")
        if k == 0:
            return self.ring.one()
        if len(self.terms) == 1:
            (key, c), = self.terms.items()
            exps = self.ring.unpack(key)
            return MultiPoly(self.ring, {self.ring.pack(tuple(e * k for e in exps)): self.ring.domain.pow(c, k)})
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if other.is_constant() and other:
                return self.scale(self.ring.domain.inv(other.constant_value()))
            return self.divide_exact(other)
        return self.scale(self.ring.domain.inv(self.ring.domain.convert(other)))

    # degrees -----------------------------------------------------------------
    def total_degree(self):
        if self._deg is None:
            self._deg = self.ring.key_degree(max(self.terms)) if self.terms else -1
        return self._deg

    def degree(self, name=None):
        if name is None:
            return self.total_degree()
        s = self.ring._shifts[self._var_index(name)]
        return max(((k >> s) & FIELD_MASK for k in self.terms), default=-1)

    def is_homogeneous(self):
        ks = self.ring.key_degree
        return len({ks(k) for k in self.terms}) <= 1

    def _var_index(self, name):
        try:
            return self.ring.index[name]
        except KeyError:
            raise DomainError(f"unknown variable {name!r} in {self.ring.vars}") from None

    # term access -------------------------------------------------------------
    def items(self):
        """(exponent tuple, coefficient) pairs in canonical grevlex order, leading first."""
        unpack = self.ring.unpack
        rows = [(unpack(k), c) for k, c in self.terms.items()]
        rows.sort(key=lambda t: self.ring.grevlex_key(t[0]), reverse=True)
        return rows

    def coeff(self, exps):
        return self.terms.get(self.ring.pack(tuple(exps)), self.ring.domain.zero)

    def leading_coefficient(self):
        if not self.terms:
            return self.ring.domain.zero
        return self.items()[0][1]

    def variables(self):
        """Names of variables that actually occur."""
        used = set()
        for k in self.terms:
            for i, e in enumerate(self.ring.unpack(k)):
                if e:
                    used.add(i)
        return [self.ring.vars[i] for i in sorted(used)]

    def coefficient_in(self, name, power):
        """Coefficient of name**power, as a polynomial of the same ring."""
        i = self._var_index(name)
        s = self.ring._shifts[i]
        strip = (power << s) + (power << self.ring._deg_shift)
        out = {}
        for k, c in self.terms.items():
            if (k >> s) & FIELD_MASK == power:
                out[k - strip] = c
        return MultiPoly(self.ring, out)

    def collect(self, name):
        """Dict power -> coefficient polynomial, w.r.t. one variable."""
        i = self._var_index(name)
        s = self.ring._shifts[i]
        ds = self.ring._deg_shift
        buckets = {}
        for k, c in self.terms.items():
            e = (k >> s) & FIELD_MASK
            buckets.setdefault(e, {})[k - (e << s) - (e << ds)] = c
        return {e: MultiPoly(self.ring, t) for e, t in buckets.items()}

    # calculus and substitution -----------------------------------------------
    def partial_derivative(self, name):
        i = self._var_index(name)
        s = self.ring._shifts[i]
        unit = self.ring._unit[i]
        dom = self.ring.domain
        out = {}
        for k, c in self.terms.items():
            e = (k >> s) & FIELD_MASK
            if e:
                v = dom.norm(c * e)
                if v:
                    out[k - unit] = v
        return MultiPoly(self.ring, out)

    diff = partial_derivative

    def substitute(self, bindings, target=None):
        """Compose with ``bindings`` (name -> polynomial or scalar).

        Unbound variables map to the same-named generator of the target ring.
        When no binding is a polynomial the target is this ring.
        """
        for name in bindings:
            self._var_index(name)
        rings = {b.ring for b in bindings.values() if isinstance(b, MultiPoly)}
        if target is None:
            if len(rings) > 1:
                raise DomainError("substitution images live in different rings")
            target = rings.pop() if rings else self.ring
        elif any(r != target for r in rings):
            raise DomainError("substitution images live in different rings")
        images = []
        for v in self.ring.vars:
            if v in bindings:
                images.append(target.convert(bindings[v]))
            elif v in target.index:
                images.append(target.gen(v))
            else:
                raise DomainError(f"variable {v!r} has no image in {target}")
        return _compose(self, images, target)

    def evaluate(self, values):
        """Value at a point given as a sequence or name->value mapping (domain elements)."""
        dom = self.ring.domain
        if isinstance(values, dict):
            values = [values[v] for v in self.ring.vars]
        values = [dom.convert(v) if isinstance(v, (int, Fraction)) else v for v in values]
        powers = [dict() for _ in values]
        total = dom.zero
        unpack = self.ring.unpack
        for k, c in self.terms.items():
            term = c
            for i, e in enumerate(unpack(k)):
                if e:
                    cache = powers[i]
                    if e not in cache:
                        cache[e] = dom.pow(values[i], e)
                    term = dom.mul(term, cache[e])
            total = dom.add(total, term)
        return total

    def map_coeffs(self, fn, ring=None):
        ring = ring or self.ring
        if ring.nvars != self.ring.nvars:
            raise DomainError("map_coeffs needs rings with identical variables")
        norm = ring.domain.norm
        out = {}
        for k, c in self.terms.items():
            v = norm(fn(c))
            if v:
                out[k] = v
        return MultiPoly(ring, out)

    def to_ring(self, ring):
        """Re-embed into a ring whose variables include all used variables."""
        if ring == self.ring:
            return self
        conv = ring.domain.convert
        if ring.vars == self.ring.vars:
            return self.map_coeffs(conv, ring)
        pos = []
        for i, v in enumerate(self.ring.vars):
            pos.append(ring.index.get(v))
        out = {}
        norm = ring.domain.norm
        for k, c in self.terms.items():
            exps = [0] * ring.nvars
            for i, e in enumerate(self.ring.unpack(k)):
                if e:
                    if pos[i] is None:
                        raise DomainError(f"variable {self.ring.vars[i]!r} missing from {ring}")
                    exps[pos[i]] = e
            v = norm(conv(c))
            if v:
                kk = ring.pack(tuple(exps))
                out[kk] = norm(out[kk] + v) if kk in out else v
        return MultiPoly(ring, {k: c for k, c in out.items() if c})

    def content_monomial(self):
        """Exponents of the largest monomial dividing every term."""
        if not self.terms:
            return (0,) * self.ring.nvars
        unpack = self.ring.unpack
        return tuple(map(min, zip(*(unpack(k) for k in self.terms))))

    def shift_down(self, exps):
        key = self.ring.pack(tuple(exps))
        return MultiPoly(self.ring, {k - key: c for k, c in self.terms.items()})

    # division ------------------------------------------------------------------
    def divide_exact(self, g):
        g = self._coerce(g)
        if not g:
            raise DomainError("division by the zero polynomial")
        q, r = _divide(self.terms, g, exact=True)
        return MultiPoly(self.ring, q)

    def divides(self, f):
        try:
            f.divide_exact(self)
        except NotDivisible:
            return False
        return True

    def pseudo_remainder(self, g, name):
        """lc(g)^k * self reduced modulo g as a polynomial in ``name``."""
        g = self._coerce(g)
        dg = g.degree(name)
        if dg < 0:
            raise DomainError("pseudo-remainder by zero")
        by = g.collect(name)
        lc = by[dg]
        var = self.ring.gen(name)
        r = self
        while r and r.degree(name) >= dg:
            dr = r.degree(name)
            lead = r.coefficient_in(name, dr)
            r = r * lc - lead * var ** (dr - dg) * g
        return r

    def reduce_monic(self, g, name):
        """Remainder modulo g, which must be monic in ``name``; a normal form."""
        g = self._coerce(g)
        dg = g.degree(name)
        if g.coefficient_in(name, dg) != 1:
            raise DomainError(f"reduce_monic needs a divisor monic in {name}")
        tail = g - self.ring.gen(name) ** dg
        by = self.collect(name)
        if not by or max(by) < dg:
            return self
        top = max(by)
        coeffs = [by.get(e, self.ring.zero()) for e in range(top + 1)]
        var = self.ring.gen(name)
        for e in range(top, dg - 1, -1):
            c = coeffs[e]
            if not c:
                continue
            coeffs[e] = self.ring.zero()
            # var^e = var^(e-dg) * (-tail)
            sub = (c * tail).collect(name)
            for f, p in sub.items():
                coeffs[e - dg + f] = coeffs[e - dg + f] - p
        out = self.ring.zero()
        for e in range(min(dg, len(coeffs))):
            if coeffs[e]:
                out = out + coeffs[e] * var ** e
        return out

    def resultant(self, g, name):
        return resultant(self, g, name)

    # serialization and display -------------------------------------------------
    def to_json(self):
        dom = self.ring.domain
        return {
            "vars": list(self.ring.vars),
            "terms": [{"e": list(e), "c": dom.to_str(c)} for e, c in self.items()],
        }

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.ring.vars, exps) if e
            )
            cs = _coeff_str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            elif cs.startswith("(") or _is_atomic_number(cs):
                parts.append(f"{cs}*{mono}")
            else:
                parts.append(f"({cs})*{mono}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def from_json(data, domain=QQ, ring=None):
    ring = ring or PolyRing(data["vars"], domain)
    if list(ring.vars) != list(data["vars"]):
        raise DomainError("JSON variable list does not match the ring")
    return ring.from_dict({tuple(t["e"]): ring.domain.from_str(t["c"]) for t in data["terms"]})


def _plain(domain):
    return isinstance(domain, (Rationals, PrimeField))


def _coeff_str(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def _is_atomic_number(s):
    try:
        Fraction(s)
        return True
    except (ValueError, ZeroDivisionError):
        return False


# ---------------------------------------------------------------------------
# term-dictionary kernels


def _add_terms(a, b, norm, sign):
    out = dict(a)
    for k, c in b.items():
        if k in out:
            v = norm(out[k] + c if sign > 0 else out[k] - c)
            if v:
                out[k] = v
            else:
                del out[k]
        else:
            out[k] = c if sign > 0 else norm(-c)
    return out


def _mul_terms(a, b, norm):
    out = {}
    get = out.get
    bi = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bi:
            k = ka + kb
            v = get(k)
            out[k] = ca * cb if v is None else v + ca * cb
    res = {}
    for k, c in out.items():
        c = norm(c)
        if c:
            res[k] = c
    return res


def _divide(f_terms, g, exact=True):
    ring = g.ring
    dom = ring.domain
    norm = dom.norm
    glead = max(g.terms)
    gc = g.terms[glead]
    gtail = [(k, c) for k, c in g.terms.items() if k != glead]
    r = dict(f_terms)
    heap = [-k for k in r]
    heapq.heapify(heap)
    q = {}
    divides = ring.divides
    while heap:
        k = -heapq.heappop(heap)
        c = r.pop(k, None)
        if c is None:
            continue
        c = norm(c)
        if not c:
            continue
        if not divides(glead, k):
            if exact:
                r[k] = c
                rem = {kk: norm(v) for kk, v in r.items()}
                raise NotDivisible(MultiPoly(ring, {kk: v for kk, v in rem.items() if v}))
            continue
        qk = k - glead
        qc = dom.div(c, gc)
        q[qk] = qc
        for kg, cg in gtail:
            kk = qk + kg
            if kk in r:
                r[kk] = r[kk] - qc * cg
            else:
                r[kk] = -(qc * cg)
                heapq.heappush(heap, -kk)
    return q, {}


def _compose(f, images, target):
    """Evaluate f at polynomial images by a sparse Horner scheme on the first variable."""
    out = target.zero()
    if not f.terms:
        return out
    unpack = f.ring.unpack
    conv = target.domain.convert if not _same_domain(f.ring.domain, target.domain) else None
    power_cache = [dict() for _ in images]

    def pw(i, e):
        cache = power_cache[i]
        if e not in cache:
            if e == 1:
                cache[e] = images[i]
            else:
                half = pw(i, e // 2)
                sq = half * half
                cache[e] = sq * images[i] if e % 2 else sq
        return cache[e]

    # group terms by all-but-last exponents to share partial products
    groups = {}
    for k, c in f.terms.items():
        exps = unpack(k)
        groups.setdefault(exps[:-1], []).append((exps[-1], c))
    prefix_cache = {(): target.one()}

    def prefix(p):
        if p in prefix_cache:
            return prefix_cache[p]
        head = prefix(p[:-1])
        e = p[-1]
        val = head if e == 0 else head * pw(len(p) - 1, e)
        prefix_cache[p] = val
        return val

    last = len(images) - 1
    for p, tail in groups.items():
        inner = target.zero()
        for e, c in tail:
            c = conv(c) if conv else c
            if not c:
                continue
            inner = inner + (pw(last, e).scale(c) if e else MultiPoly(target, {0: c}))
        if len(p) == 0:
            out = out + inner
        else:
            out = out + prefix(p) * inner
    return out


def _same_domain(a, b):
    return a == b


# ---------------------------------------------------------------------------
# resultants and determinants


def bareiss_determinant(matrix):
    """Fraction-free determinant of a square matrix of MultiPoly entries."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        raise DomainError("empty matrix")
    ring = m[0][0].ring
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return ring.zero()
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                num = m[i][j] * pivot
                if mik and m[k][j]:
                    num = num - mik * m[k][j]
                m[i][j] = num.divide_exact(prev) if not prev.is_constant() or prev.constant_value() != 1 else num
            m[i][k] = ring.zero()
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def sylvester_matrix(f, g, name):
    df, dg = f.degree(name), g.degree(name)
    ring = f.ring
    fc = f.collect(name)
    gc = g.collect(name)
    frow = [fc.get(df - i, ring.zero()) for i in range(df + 1)]
    grow = [gc.get(dg - i, ring.zero()) for i in range(dg + 1)]
    size = df + dg
    rows = []
    for s in range(dg):
        rows.append([ring.zero()] * s + frow + [ring.zero()] * (size - s - df - 1))
    for s in range(df):
        rows.append([ring.zero()] * s + grow + [ring.zero()] * (size - s - dg - 1))
    return rows


def resultant(f, g, name):
    """Sylvester resultant in ``name`` (rows of f first), by Bareiss elimination."""
    g = f._coerce(g)
    if not f or not g:
        raise DomainError("resultant of a zero polynomial")
    df, dg = f.degree(name), g.degree(name)
    if df <= 0 or dg <= 0:
        raise DomainError(f"resultant needs positive degree in {name}")
    return bareiss_determinant(sylvester_matrix(f, g, name))


# ---------------------------------------------------------------------------
# fraction field


class PolynomialDomain(Domain):
    """A polynomial ring used as a coefficient domain (division must be exact)."""

    is_field = False

    def __init__(self, ring):
        self.ring = ring
        self.name = f"Poly({', '.join(ring.vars)})"
        self.zero = ring.zero()
        self.one = ring.one()

    def __eq__(self, other):
        return isinstance(other, PolynomialDomain) and other.ring == self.ring

    def __hash__(self):
        return hash(("Poly", self.ring))

    def convert(self, x):
        return self.ring.convert(x)

    def div(self, a, b):
        if not b:
            raise NotInvertible("division by the zero polynomial")
        return self.convert(a).divide_exact(self.convert(b))

    def is_zero(self, a):
        return not a

    def pow(self, a, k):
        return a ** k


class FractionField(Domain):
    """Rational functions over a polynomial ring.

    Denominators are kept with leading coefficient 1 in the canonical order and
    common monomial factors are cancelled.  There is no multivariate gcd, so
    further cancellation only happens against the optional ``atoms`` (trial
    division) or when one side divides the other; equality is decided by
    cross-multiplication and therefore never depends on the representation.
    """

    is_field = True

    def __init__(self, ring, atoms=()):
        self.ring = ring
        self.atoms = tuple(ring.convert(a) for a in atoms)
        self.name = f"Frac({', '.join(ring.vars)})"
        self.zero = RationalFunction(self, ring.zero(), ring.one(), _raw=True)
        self.one = RationalFunction(self, ring.one(), ring.one(), _raw=True)

    def __eq__(self, other):
        return isinstance(other, FractionField) and other.ring == self.ring and other.atoms == self.atoms

    def __hash__(self):
        return hash(("Frac", self.ring))

    def convert(self, x):
        if isinstance(x, RationalFunction):
            if x.field != self:
                raise DomainError("rational function from a different field")
            return x
        if isinstance(x, MultiPoly):
            return RationalFunction(self, self.ring.convert(x), self.ring.one(), _raw=True)
        return RationalFunction(self, self.ring.const(x), self.ring.one(), _raw=True)

    def __call__(self, num, den=None):
        num = self.ring.convert(num)
        den = self.ring.one() if den is None else self.ring.convert(den)
        return RationalFunction(self, num, den)

    def div(self, a, b):
        return self.convert(a) / self.convert(b)

    def to_str(self, c):
        return str(c)


class RationalFunction:
    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den, _raw=False):
        self.field = field
        if _raw:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize_fraction(field, num, den)

    def _other(self, o):
        if isinstance(o, RationalFunction):
            return o
        return self.field.convert(o)

    def __add__(self, o):
        o = self._other(o)
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return RationalFunction(self.field, self.num + o.num, self.den)
        if o.den.is_constant():
            return RationalFunction(self.field, self.num + o.num * self.den, self.den)
        if self.den.is_constant():
            return RationalFunction(self.field, self.num * o.den + o.num, o.den)
        lcm, fa, fb = _cheap_lcm(self.den, o.den)
        return RationalFunction(self.field, self.num * fa + o.num * fb, lcm)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.field, -self.num, self.den, _raw=True)

    def __sub__(self, o):
        return self + (-self._other(o))

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        if isinstance(o, int) and not isinstance(o, bool):
            return RationalFunction(self.field, self.num * o, self.den) if o else self.field.zero
        o = self._other(o)
        if not self.num or not o.num:
            return self.field.zero
        if self.den == o.num:
            return RationalFunction(self.field, self.num, o.den)
        if o.den == self.num:
            return RationalFunction(self.field, o.num, self.den)
        return RationalFunction(self.field, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise NotInvertible("zero rational function")
        return RationalFunction(self.field, self.den, self.num)

    def __truediv__(self, o):
        return self * self._other(o).inverse()

    def __rtruediv__(self, o):
        return self._other(o) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.field, self.num ** k, self.den ** k, _raw=True)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, o):
        try:
            o = self._other(o)
        except DomainError:
            return NotImplemented
        if self.den == o.den:
            return self.num == o.num
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        raise TypeError("rational functions are not hashable")

    def is_polynomial(self):
        return self.den.is_constant()

    def as_polynomial(self):
        if not self.den.is_constant():
            q = self.num.divide_exact(self.den)
            return q
        return self.num * self.field.ring.domain.inv(self.den.constant_value())

    def substitute(self, bindings, field):
        num = self.num.substitute(bindings, field.ring)
        den = self.den.substitute(bindings, field.ring)
        if not den:
            raise NotInvertible("denominator vanishes under substitution")
        return RationalFunction(field, num, den)

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.den == 1:
            return f"({self.num})" if len(self.num) > 1 else str(self.num)
        return f"({self.num})/({self.den})"


def _cheap_lcm(a, b):
    """Return (m, m/a, m/b) for a common multiple m, preferring divisibility."""
    try:
        return a, a.ring.one(), a.divide_exact(b)
    except NotDivisible:
        pass
    try:
        return b, b.divide_exact(a), b.ring.one()
    except NotDivisible:
        pass
    return a * b, b, a


def _normalize_fraction(field, num, den):
    ring = field.ring
    if not den:
        raise NotInvertible("zero denominator")
    if not num:
        return ring.zero(), ring.one()
    # cancel a common monomial factor
    cm = tuple(map(min, num.content_monomial(), den.content_monomial()))
    if any(cm):
        num = num.shift_down(cm)
        den = den.shift_down(cm)
    if not den.is_constant():
        for atom in field.atoms:
            while den.total_degree() >= atom.total_degree():
                try:
                    d2 = den.divide_exact(atom)
                except NotDivisible:
                    break
                try:
                    n2 = num.divide_exact(atom)
                except NotDivisible:
                    break
                num, den = n2, d2
    if not den.is_constant() and num.total_degree() >= den.total_degree():
        try:
            return num.divide_exact(den), ring.one()
        except NotDivisible:
            pass
    lc = den.leading_coefficient()
    if lc != 1:
        inv = ring.domain.inv(lc)
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


# ---------------------------------------------------------------------------
# quadratic tower adjoining alpha and beta


class AlphaBetaExtension(Domain):
    """base[alpha, beta] / (S30 a^2 + 2 S31 a + S32, S20 b^2 + 2 S11 b + S02)."""

    is_field = False

    def __init__(self, base, S20, S11, S02, S30, S31, S32):
        self.base = base
        conv = base.convert
        self.relations = tuple(conv(v) for v in (S20, S11, S02, S30, S31, S32))
        S20, S11, S02, S30, S31, S32 = self.relations
        if base.is_zero(S30) or base.is_zero(S20):
            raise DegenerateExtension("S20 and S30 must be nonzero to adjoin alpha and beta")
        two = conv(2)
        # alpha^2 = a1*alpha + a0, beta^2 = b1*beta + b0
        self.a1 = base.neg(base.div(base.mul(two, S31), S30))
        self.a0 = base.neg(base.div(S32, S30))
        self.b1 = base.neg(base.div(base.mul(two, S11), S20))
        self.b0 = base.neg(base.div(S02, S20))
        self.name = "AlphaBeta"
        self.zero = ABElement(self, base.zero, base.zero, base.zero, base.zero)
        self.one = ABElement(self, base.one, base.zero, base.zero, base.zero)
        self.alpha = ABElement(self, base.zero, base.one, base.zero, base.zero)
        self.beta = ABElement(self, base.zero, base.zero, base.one, base.zero)

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def convert(self, x):
        if isinstance(x, ABElement):
            if x.ext is not self:
                raise DomainError("element of a different alpha/beta extension")
            return x
        z = self.base.zero
        return ABElement(self, self.base.convert(x), z, z, z)

    def element(self, c00, c10=0, c01=0, c11=0):
        conv = self.base.convert
        return ABElement(self, conv(c00), conv(c10), conv(c01), conv(c11))

    def div(self, a, b):
        return self.convert(a) * self.convert(b).inverse()

    def alpha_conjugate(self):
        return ABElement(self, self.a1, self.base.neg(self.base.one), self.base.zero, self.base.zero)

    def beta_conjugate(self):
        return ABElement(self, self.b1, self.base.zero, self.base.neg(self.base.one), self.base.zero)


class ABElement:
    __slots__ = ("ext", "c")

    def __init__(self, ext, c00, c10, c01, c11):
        self.ext = ext
        self.c = (c00, c10, c01, c11)

    def _other(self, o):
        if isinstance(o, ABElement):
            if o.ext is not self.ext:
                raise DomainError("alpha/beta elements from different extensions")
            return o
        return self.ext.convert(o)

    @property
    def c00(self):
        return self.c[0]

    @property
    def c10(self):
        return self.c[1]

    @property
    def c01(self):
        return self.c[2]

    @property
    def c11(self):
        return self.c[3]

    def __add__(self, o):
        o = self._other(o)
        add = self.ext.base.add
        return ABElement(self.ext, *(add(a, b) for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        neg = self.ext.base.neg
        return ABElement(self.ext, *(neg(a) for a in self.c))

    def __sub__(self, o):
        o = self._other(o)
        sub = self.ext.base.sub
        return ABElement(self.ext, *(sub(a, b) for a, b in zip(self.c, o.c)))

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        B = self.ext.base
        if isinstance(o, int) and not isinstance(o, bool):
            k = B.convert(o)
            return ABElement(self.ext, *(B.mul(a, k) for a in self.c))
        o = self._other(o)
        mul, add, isz = B.mul, B.add, B.is_zero
        # product table P[i][j] = coefficient of alpha^i beta^j, i, j in 0..2
        P = [[B.zero] * 3 for _ in range(3)]
        for idx_a, a in enumerate(self.c):
            if isz(a):
                continue
            ia, ja = idx_a & 1, idx_a >> 1
            for idx_b, b in enumerate(o.c):
                if isz(b):
                    continue
                ib, jb = idx_b & 1, idx_b >> 1
                P[ia + ib][ja + jb] = add(P[ia + ib][ja + jb], mul(a, b))
        ext = self.ext
        for j in range(3):
            top = P[2][j]
            if not isz(top):
                P[1][j] = add(P[1][j], mul(ext.a1, top))
                P[0][j] = add(P[0][j], mul(ext.a0, top))
        for i in range(2):
            top = P[i][2]
            if not isz(top):
                P[i][1] = add(P[i][1], mul(ext.b1, top))
                P[i][0] = add(P[i][0], mul(ext.b0, top))
        return ABElement(ext, P[0][0], P[1][0], P[0][1], P[1][1])

    __rmul__ = __mul__

    def __pow__(self, k):
        out = self.ext.one
        for _ in range(k):
            out = out * self
        return out

    def conj_alpha(self):
        B = self.ext.base
        c00, c10, c01, c11 = self.c
        a1 = self.ext.a1
        return ABElement(self.ext, B.add(c00, B.mul(c10, a1)), B.neg(c10), B.add(c01, B.mul(c11, a1)), B.neg(c11))

    def conj_beta(self):
        B = self.ext.base
        c00, c10, c01, c11 = self.c
        b1 = self.ext.b1
        return ABElement(self.ext, B.add(c00, B.mul(c01, b1)), B.add(c10, B.mul(c11, b1)), B.neg(c01), B.neg(c11))

    def norm(self):
        """Product over the four conjugates; an element of the base."""
        x = self * self.conj_alpha()
        x = x * x.conj_beta()
        B = self.ext.base
        if not all(B.is_zero(v) for v in x.c[1:]):
            raise ArithmeticError("norm did not land in the base domain")
        return x.c[0]

    def inverse(self):
        B = self.ext.base
        ca = self.conj_alpha()
        cb = self.conj_beta()
        cab = ca.conj_beta()
        cofactor = ca * cb * cab
        n = (self * cofactor).c
        if not all(B.is_zero(v) for v in n[1:]):
            raise ArithmeticError("norm did not land in the base domain")
        if B.is_zero(n[0]):
            raise NotInvertible("element has zero norm")
        inv = B.inv(n[0])
        return ABElement(self.ext, *(B.mul(v, inv) for v in cofactor.c))

    def __truediv__(self, o):
        return self * self._other(o).inverse()

    def __bool__(self):
        B = self.ext.base
        return not all(B.is_zero(v) for v in self.c)

    def __eq__(self, o):
        try:
            o = self._other(o)
        except DomainError:
            return NotImplemented
        return not (self - o)

    def __hash__(self):
        raise TypeError("alpha/beta elements are not hashable")

    def in_base(self):
        B = self.ext.base
        return all(B.is_zero(v) for v in self.c[1:])

    def map_base(self, fn, ext=None, swap=False):
        """Apply a base map to the coefficients; ``swap`` exchanges alpha and beta."""
        ext = ext or self.ext
        c00, c10, c01, c11 = (fn(v) for v in self.c)
        if swap:
            c10, c01 = c01, c10
        return ABElement(ext, c00, c10, c01, c11)

    def __repr__(self):
        return f"ABElement({self})"

    def __str__(self):
        labels = ("", "alpha", "beta", "alpha*beta")
        parts = []
        for lab, v in zip(labels, self.c):
            if self.ext.base.is_zero(v):
                continue
            parts.append(f"({v})" + (f"*{lab}" if lab else ""))
        return " + ".join(parts) if parts else "0"


def product(items, start):
    return reduce(operator.mul, items, start)
