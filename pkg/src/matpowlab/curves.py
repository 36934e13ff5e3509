"""Bivariate power-sum curves: evaluation, exact point counts, factor exclusion.

The working polynomial is

    F(X, Y) = (X^s + Y^s + a)(X^s + Y^s + b X^s Y^s) - X^s Y^s

with ab(ab - 1) != 0 and gcd(s, p) = 1; its total degree is d = 3s.  Points
are counted over the affine plane only.  count_points is exact (a table-lookup
grid, never an estimate); see the bound helpers for what the count is compared
against.  For s = 1 the three candidate linear-factor shapes X - c, Y - c and
X + Y - c can be excluded computationally, which is the desk-scale half of the
irreducibility argument; s > 1 is out of certification reach and is treated as
trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counting import CountResult
from .errors import BudgetExceeded, DegenerateParameters, MixedContext
from .ffield import FFElem, FieldCtx

CURVE_WORK_CAP = 10 ** 8  # q^2 grid evaluations
_GRID_BLOCK = 10 ** 6  # grid cells per vectorized row block


class CurveSpec:
    """Curve parameters (s, a, b) over a field context; degree is 3s."""

    def __init__(self, ctx: FieldCtx, s: int, a: FFElem, b: FFElem):
        if s < 1:
            raise ValueError(f"exponent must be positive, got {s}")
        if math.gcd(s, ctx.p) != 1:
            raise DegenerateParameters(f"exponent {s} shares a factor with p = {ctx.p}")
        if a.ctx != ctx or b.ctx != ctx:
            raise MixedContext("curve coefficients live in a different field")
        ab = a * b
        if not a or not b or ab == ctx.one:
            raise DegenerateParameters("need ab(ab - 1) != 0")
        self.ctx = ctx
        self.s = s
        self.a = a
        self.b = b

    @property
    def degree(self) -> int:
        return 3 * self.s

    def __repr__(self):
        return (f"CurveSpec(p={self.ctx.p}, degree_ext={self.ctx.degree}, "
                f"s={self.s}, a={self.a!r}, b={self.b!r})")


def curve_eval(spec: CurveSpec, x: FFElem, y: FFElem) -> FFElem:
    """Exact evaluation of the curve polynomial at one point."""
    if x.ctx != spec.ctx or y.ctx != spec.ctx:
        raise MixedContext("point does not live in the curve's field")
    xs = x ** spec.s
    ys = y ** spec.s
    prod = xs * ys
    head = xs + ys
    return (head + spec.a) * (head + spec.b * prod) - prod


def _power_table(ctx: FieldCtx, s: int):
    """Componentwise residue table of w -> w^s over the whole field."""
    p = ctx.p
    idx = np.arange(ctx.q, dtype=np.int64)
    if ctx.degree == 1:
        acc = np.ones(ctx.q, dtype=np.int64)
        base = idx % p
        e = s
        while e:
            if e & 1:
                acc = (acc * base) % p
            base = (base * base) % p
            e >>= 1
        return acc, None
    r = ctx.r
    a0 = np.ones(ctx.q, dtype=np.int64)
    a1 = np.zeros(ctx.q, dtype=np.int64)
    b0, b1 = idx % p, idx // p
    e = s
    while e:
        if e & 1:
            a0, a1 = (a0 * b0 + r * a1 * b1) % p, (a0 * b1 + a1 * b0) % p
        b0, b1 = (b0 * b0 + r * b1 * b1) % p, (2 * b0 * b1) % p
        e >>= 1
    return a0, a1


def count_points(spec: CurveSpec, max_work: int | None = None) -> CountResult:
    """Exact affine point count of the curve by a table-lookup grid."""
    ctx = spec.ctx
    q = ctx.q
    work = q * q
    cap = CURVE_WORK_CAP if max_work is None else max_work
    if work > cap:
        raise BudgetExceeded(f"grid work {work} exceeds the cap {cap}",
                             estimated_work=work)
    p = ctx.p
    block = max(1, _GRID_BLOCK // q)
    total = 0
    if ctx.degree == 1:
        tab, _ = _power_table(ctx, spec.s)
        a = spec.a.c0
        b = spec.b.c0
        for start in range(0, q, block):
            u = tab[start:start + block, None]
            v = tab[None, :]
            w = (u * v) % p
            head = (u + v) % p
            f = ((head + a) * (head + b * w % p) - w) % p
            total += int(np.count_nonzero(f == 0))
    else:
        t0, t1 = _power_table(ctx, spec.s)
        r = ctx.r
        a0, a1 = spec.a.c0, spec.a.c1
        b0, b1 = spec.b.c0, spec.b.c1
        for start in range(0, q, block):
            u0, u1 = t0[start:start + block, None], t1[start:start + block, None]
            v0, v1 = t0[None, :], t1[None, :]
            w0 = (u0 * v0 + r * u1 * v1) % p
            w1 = (u0 * v1 + u1 * v0) % p
            g0 = (u0 + v0 + a0) % p
            g1 = (u1 + v1 + a1) % p
            h0 = (u0 + v0 + b0 * w0 + r * b1 * w1) % p
            h1 = (u1 + v1 + b0 * w1 + b1 * w0) % p
            f0 = (g0 * h0 + r * g1 * h1 - w0) % p
            f1 = (g0 * h1 + g1 * h0 - w1) % p
            total += int(np.count_nonzero((f0 == 0) & (f1 == 0)))
    params = {"p": p, "degree": ctx.degree, "q": q, "s": spec.s, "d": spec.degree,
              "a": spec.a.residues(), "b": spec.b.residues()}
    return CountResult(total, "table-grid", params)


def high_degree_bound(d: int, p: int) -> float:
    """4 d^(4/3) p^(2/3): the explicit prime-field count bound, valid for d < p."""
    return 4.0 * d ** (4.0 / 3.0) * p ** (2.0 / 3.0)


def extension_regime_bound(s: int, p: int) -> float:
    """s^(6/5) p^(8/5) + p^3: report-only shape for s = k(p-1) over F_{p^2}."""
    return s ** 1.2 * p ** 1.6 + float(p) ** 3


@dataclass(frozen=True)
class ExclusionWitness:
    """Nonzero coefficient killing one candidate linear factor."""

    shape: str
    c: tuple[int, ...]
    degree: int
    coeff: tuple[int, ...]


@dataclass(frozen=True)
class ExclusionReport:
    """Outcome of the s = 1 linear-factor scan."""

    excluded: bool
    witnesses: tuple[ExclusionWitness, ...]
    counterexamples: tuple


def cubic_factor_exclusion(a: FFElem, b: FFElem) -> ExclusionReport:
    """Check no factor X - c, Y - c or X + Y - c divides the s = 1 curve.

    Restricting to X = c leaves the quadratic
        (1 + bc) Y^2 + (a + c)(1 + bc) Y + c(a + c)
    and restricting to the line X + Y = c leaves
        -(b(a + c) - 1) X^2 + c(b(a + c) - 1) X + c(a + c);
    a linear factor exists exactly when one of these vanishes identically.
    The Y - c shape needs no separate scan because the curve is symmetric.
    """
    ctx = a.ctx
    if b.ctx != ctx:
        raise MixedContext("coefficients live in different fields")
    ab = a * b
    if not a or not b or ab == ctx.one:
        raise DegenerateParameters("need ab(ab - 1) != 0")
    one = ctx.one
    witnesses = []
    counterexamples = []
    for c in ctx.iter_elements():
        lead = one + b * c
        mid = (a + c) * lead
        const = c * (a + c)
        slope = b * (a + c) - one
        for shape, coeffs in (
            ("X-c", (const, mid, lead)),
            ("X+Y-c", (const, c * slope, -slope)),
        ):
            for degree in (2, 1, 0):
                if coeffs[degree]:
                    witnesses.append(ExclusionWitness(
                        shape, c.residues(), degree, coeffs[degree].residues()))
                    break
            else:
                counterexamples.append((shape, c.residues()))
    return ExclusionReport(not counterexamples, tuple(witnesses),
                           tuple(counterexamples))
