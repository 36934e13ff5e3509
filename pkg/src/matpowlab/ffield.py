"""Arithmetic in F_p and F_{p^2}, multiplicative orders, and additive characters.

Quadratic extensions are realized as F_p[w] / (w^2 - r) with r the least
quadratic non-residue mod p, so the Frobenius map x -> x^p is plain
conjugation (c0, c1) -> (c0, -c1) and trace / norm have closed forms.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import (
    BudgetExceeded,
    CompositeModulus,
    DegenerateParameters,
    MixedContext,
    WrongDegree,
    ZeroElement,
)

_MAX_P = 10 ** 6


def _is_prime(n: int) -> bool:
    """Trial-division primality test; fine at desk scale."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def _factorize(n: int) -> list[tuple[int, int]]:
    """Factor n >= 1 by trial division into (prime, exponent) pairs."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _merge_factors(a: list[tuple[int, int]], b: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged = dict(a)
    for prime, e in b:
        merged[prime] = merged.get(prime, 0) + e
    return sorted(merged.items())


def _least_nonresidue(p: int) -> int:
    """Least quadratic non-residue mod p, by direct scan."""
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise CompositeModulus(f"{p} has no quadratic non-residue; not an odd prime")


class FieldCtx:
    """F_p (degree 1) or F_{p^2} (degree 2); immutable after construction.

    Elements are indexed canonically by c0 + p * c1, and the degree-2 group
    order p^2 - 1 is factored as (p - 1)(p + 1) so each half stays tiny.
    """

    def __init__(self, p: int, degree: int = 1):
        if degree not in (1, 2):
            raise WrongDegree(f"degree must be 1 or 2, got {degree}")
        if p > _MAX_P:
            raise BudgetExceeded(f"p = {p} exceeds the desk-scale cap {_MAX_P}", estimated_work=p)
        if p == 2 or not _is_prime(p):
            raise CompositeModulus(f"modulus {p} is not an odd prime")
        self.p = p
        self.degree = degree
        self.q = p ** degree
        self.group_order = self.q - 1
        if degree == 2:
            self.r = _least_nonresidue(p)
            self.group_order_factorization = _merge_factors(_factorize(p - 1), _factorize(p + 1))
        else:
            self.r = None
            self.group_order_factorization = _factorize(p - 1)
        self._root_table: np.ndarray | None = None
        self._primitive_root: FFElem | None = None
        self._nonresidue: FFElem | None = None

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.degree) == (other.p, other.degree)

    def __hash__(self):
        return hash((self.p, self.degree))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, degree={self.degree})"

    def elem(self, c0: int, c1: int = 0) -> FFElem:
        """Element from integer coordinates, reduced mod p."""
        if c1 % self.p and self.degree == 1:
            raise WrongDegree("c1 component in a prime field")
        return FFElem(self, c0 % self.p, c1 % self.p)

    @property
    def zero(self) -> FFElem:
        return FFElem(self, 0, 0)

    @property
    def one(self) -> FFElem:
        return FFElem(self, 1, 0)

    def omega(self) -> FFElem:
        """The extension generator w with w^2 = r."""
        if self.degree != 2:
            raise WrongDegree("omega lives in the quadratic extension")
        return FFElem(self, 0, 1)

    def iter_elements(self):
        """All q elements in canonical order, index = c0 + p * c1."""
        for w in range(self.q):
            yield FFElem(self, w % self.p, w // self.p)

    def element_index(self, x: FFElem) -> int:
        return x.c0 + self.p * x.c1

    def from_index(self, w: int) -> FFElem:
        return FFElem(self, w % self.p, (w // self.p) % self.p)

    def roots_of_unity(self) -> np.ndarray:
        """Cached table exp(2 pi i k / p), k = 0..p-1."""
        if self._root_table is None:
            self._root_table = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        return self._root_table

    def base_field(self) -> FieldCtx:
        """The degree-1 context over the same p."""
        return self if self.degree == 1 else make_field(self.p, 1)

    def ext_field(self) -> FieldCtx:
        """The degree-2 context over the same p."""
        return self if self.degree == 2 else make_field(self.p, 2)

    def lift(self, x: FFElem) -> FFElem:
        """Embed a base-field element into this context."""
        if x.ctx == self:
            return x
        if x.ctx.p != self.p or x.ctx.degree != 1:
            raise MixedContext(f"cannot lift {x!r} into {self!r}")
        return FFElem(self, x.c0, 0)


@lru_cache(maxsize=None)
def make_field(p: int, degree: int = 1) -> FieldCtx:
    """Construct (and cache) the field context for F_p or F_{p^2}."""
    return FieldCtx(p, degree)


class FFElem:
    """Immutable element c0 + c1 * w of a FieldCtx."""

    __slots__ = ("ctx", "c0", "c1")

    def __init__(self, ctx: FieldCtx, c0: int, c1: int = 0):
        self.ctx = ctx
        self.c0 = c0
        self.c1 = c1

    def _coerce(self, other):
        if isinstance(other, FFElem):
            if other.ctx != self.ctx:
                raise MixedContext(f"mixing {other.ctx!r} with {self.ctx!r}")
            return other
        if isinstance(other, int):
            return FFElem(self.ctx, other % self.ctx.p, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.ctx.p
        return FFElem(self.ctx, (self.c0 + o.c0) % p, (self.c1 + o.c1) % p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.ctx.p
        return FFElem(self.ctx, (self.c0 - o.c0) % p, (self.c1 - o.c1) % p)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        p = self.ctx.p
        return FFElem(self.ctx, (-self.c0) % p, (-self.c1) % p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.ctx.p
        if self.ctx.degree == 1:
            return FFElem(self.ctx, (self.c0 * o.c0) % p, 0)
        r = self.ctx.r
        return FFElem(
            self.ctx,
            (self.c0 * o.c0 + r * self.c1 * o.c1) % p,
            (self.c0 * o.c1 + self.c1 * o.c0) % p,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self) -> FFElem:
        if not self:
            raise ZeroElement("zero has no inverse")
        p = self.ctx.p
        if self.ctx.degree == 1:
            return FFElem(self.ctx, pow(self.c0, p - 2, p), 0)
        # conjugate over norm; the norm sits in F_p
        r = self.ctx.r
        nrm_inv = pow((self.c0 * self.c0 - r * self.c1 * self.c1) % p, p - 2, p)
        return FFElem(self.ctx, (self.c0 * nrm_inv) % p, (-self.c1 * nrm_inv) % p)

    def __pow__(self, e: int) -> FFElem:
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if self.ctx.degree == 1:
            return FFElem(self.ctx, pow(self.c0, e, self.ctx.p), 0)
        out = self.ctx.one
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __bool__(self):
        return bool(self.c0 or self.c1)

    def __eq__(self, other):
        if isinstance(other, int):
            other = FFElem(self.ctx, other % self.ctx.p, 0)
        if not isinstance(other, FFElem):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.c0 == other.c0
            and self.c1 == other.c1
        )

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.degree, self.c0, self.c1))

    def __repr__(self):
        if self.ctx.degree == 1:
            return f"{self.c0} (mod {self.ctx.p})"
        return f"{self.c0}+{self.c1}w (mod {self.ctx.p})"

    def frobenius(self) -> FFElem:
        """The p-power map; conjugation in degree 2, identity in degree 1."""
        if self.ctx.degree == 1:
            return self
        return FFElem(self.ctx, self.c0, (-self.c1) % self.ctx.p)

    def residues(self) -> tuple[int, ...]:
        """Canonical integer coordinates, length = degree."""
        if self.ctx.degree == 1:
            return (self.c0,)
        return (self.c0, self.c1)


def trace_norm(x: FFElem) -> tuple[FFElem, FFElem]:
    """Frobenius trace x + x^p and norm x * x^p of a degree-2 element, in F_p."""
    ctx = x.ctx
    if ctx.degree != 2:
        raise WrongDegree("trace_norm needs a quadratic-extension element")
    base = ctx.base_field()
    return base.elem(2 * x.c0), base.elem(x.c0 * x.c0 - ctx.r * x.c1 * x.c1)


def mult_order(x: FFElem) -> int:
    """Multiplicative order of x, via the factored group order."""
    if not x:
        raise ZeroElement("zero has no multiplicative order")
    t = x.ctx.group_order
    one = x.ctx.one
    for prime, _ in x.ctx.group_order_factorization:
        while t % prime == 0 and x ** (t // prime) == one:
            t //= prime
    return t


def primitive_root(ctx: FieldCtx) -> FFElem:
    """First multiplicative generator in canonical scan order (cached)."""
    if ctx._primitive_root is not None:
        return ctx._primitive_root
    n = ctx.group_order
    cofactors = [n // prime for prime, _ in ctx.group_order_factorization]
    if ctx.degree == 1:
        candidates = (FFElem(ctx, c0, 0) for c0 in range(2, ctx.p))
    else:
        # elements of F_p generate at most the order-(p-1) part, so start at c1 = 1
        candidates = (FFElem(ctx, c0, c1) for c1 in range(1, ctx.p) for c0 in range(ctx.p))
    one = ctx.one
    for x in candidates:
        if all(x ** c != one for c in cofactors):
            ctx._primitive_root = x
            return x
    raise CompositeModulus(f"no generator found for {ctx!r}")


class SubgroupSpec:
    """Cyclic subgroup of the multiplicative group, held as (generator, exact order)."""

    def __init__(self, generator: FFElem, order: int):
        if not generator:
            raise ZeroElement("subgroup generator must be nonzero")
        ctx = generator.ctx
        if order < 1 or ctx.group_order % order != 0:
            raise DegenerateParameters(
                f"order {order} does not divide the group order {ctx.group_order}"
            )
        if generator ** order != ctx.one:
            raise DegenerateParameters("declared order is not an exponent of the generator")
        for prime, _ in _factorize(order):
            if generator ** (order // prime) == ctx.one:
                raise DegenerateParameters("generator has smaller order than declared")
        self.ctx = ctx
        self.generator = generator
        self.order = order

    def __repr__(self):
        return f"SubgroupSpec(order={self.order}, gen={self.generator!r})"

    def elements(self):
        """Yield g, g^2, ..., g^order (= 1), in power order."""
        x = self.generator
        for _ in range(self.order):
            yield x
            x = x * self.generator


def norm_subgroup(ctx: FieldCtx) -> SubgroupSpec:
    """The norm-one subgroup of F_{p^2}: generated by g^(p-1), order p + 1."""
    if ctx.degree != 2:
        raise WrongDegree("the norm-one subgroup lives in a quadratic extension")
    g = primitive_root(ctx)
    return SubgroupSpec(g ** (ctx.p - 1), ctx.p + 1)


def subgroup_of_order(ctx: FieldCtx, m: int) -> SubgroupSpec:
    """The unique subgroup of order m dividing q - 1."""
    if m < 1 or ctx.group_order % m != 0:
        raise DegenerateParameters(
            f"no subgroup of order {m} in a cyclic group of order {ctx.group_order}"
        )
    g = primitive_root(ctx)
    return SubgroupSpec(g ** (ctx.group_order // m), m)


class CharacterSpec:
    """Additive character z -> e_p(Tr(alpha z)) with a nonzero twist alpha."""

    def __init__(self, alpha: FFElem):
        if not alpha:
            raise ZeroElement("character twist must be nonzero")
        self.alpha = alpha
        self.ctx = alpha.ctx

    def __repr__(self):
        return f"CharacterSpec(alpha={self.alpha!r})"


def standard_character(ctx: FieldCtx) -> CharacterSpec:
    """The character with alpha = 1."""
    return CharacterSpec(ctx.one)


def char_argument(chi: CharacterSpec, z: FFElem) -> int:
    """The residue Tr(alpha z) mod p that indexes the root-of-unity table."""
    if z.ctx != chi.ctx:
        raise MixedContext("character and argument live in different fields")
    w = chi.alpha * z
    if chi.ctx.degree == 1:
        return w.c0
    return (2 * w.c0) % chi.ctx.p


def char_eval(chi: CharacterSpec, z: FFElem) -> complex:
    """Evaluate the additive character at z."""
    return complex(chi.ctx.roots_of_unity()[char_argument(chi, z)])


def is_square(x: FFElem) -> bool:
    """Euler test x^((q-1)/2) == 1; zero counts as square."""
    if not x:
        return True
    return x ** (x.ctx.group_order // 2) == x.ctx.one


def _nonresidue_elem(ctx: FieldCtx) -> FFElem:
    """A fixed non-square of the field, cached (canonical scan)."""
    if ctx._nonresidue is None:
        if ctx.degree == 1:
            ctx._nonresidue = FFElem(ctx, _least_nonresidue(ctx.p), 0)
        else:
            for x in ctx.iter_elements():
                if x and not is_square(x):
                    ctx._nonresidue = x
                    break
    return ctx._nonresidue


def sqrt(x: FFElem) -> FFElem:
    """A square root by Tonelli-Shanks; DegenerateParameters if x is no square."""
    ctx = x.ctx
    if not x:
        return ctx.zero
    if not is_square(x):
        raise DegenerateParameters(f"{x!r} is not a square")
    t = ctx.group_order
    s = 0
    while t % 2 == 0:
        t //= 2
        s += 1
    c = _nonresidue_elem(ctx) ** t
    u = x ** t
    root = x ** ((t + 1) // 2)
    m = s
    one = ctx.one
    while u != one:
        i, v = 0, u
        while v != one:
            v = v * v
            i += 1
        b = c ** (2 ** (m - i - 1))
        m = i
        c = b * b
        u = u * c
        root = root * b
    return root
