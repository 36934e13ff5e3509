"""Square matrices and vectors over a FieldCtx: orders, eigenvalues, independence.

Characteristic polynomials use per-dimension closed forms (n <= 3) and roots
are located by discriminant analysis (n = 2) or a direct scan of the field
(n = 3), with eigenvalues landing in the quadratic extension when needed.
Anything the eigenvalue machinery cannot settle falls back to honest power
iteration under an explicit cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BudgetExceeded,
    DegenerateParameters,
    MixedContext,
    NormNotOne,
    OrderCapExceeded,
    UnsupportedDimension,
    WrongDegree,
    ZeroElement,
    ZeroVector,
)
from .ffield import FFElem, FieldCtx, is_square, mult_order, sqrt, trace_norm

ORDER_ITERATION_CAP = 10 ** 6
_ROOT_SCAN_CAP = 10 ** 6


class VecEntity:
    """Immutable row or column vector over a FieldCtx."""

    __slots__ = ("ctx", "entries", "orientation")

    def __init__(self, entries, orientation: str = "row"):
        entries = tuple(entries)
        if not entries:
            raise ZeroVector("empty vector")
        if orientation not in ("row", "column"):
            raise ValueError(f"bad orientation {orientation!r}")
        ctx = entries[0].ctx
        for x in entries:
            if x.ctx != ctx:
                raise MixedContext("vector entries from different fields")
        self.ctx = ctx
        self.entries = entries
        self.orientation = orientation

    @property
    def n(self) -> int:
        return len(self.entries)

    def __bool__(self):
        return any(self.entries)

    def __eq__(self, other):
        if not isinstance(other, VecEntity):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.orientation == other.orientation
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.ctx, self.orientation, self.entries))

    def __repr__(self):
        shape = "row" if self.orientation == "row" else "col"
        return f"VecEntity({shape}, {list(self.entries)!r})"

    def __add__(self, other):
        if not isinstance(other, VecEntity) or other.orientation != self.orientation:
            return NotImplemented
        if other.n != self.n:
            raise ValueError("vector length mismatch")
        return VecEntity([a + b for a, b in zip(self.entries, other.entries)], self.orientation)

    def __neg__(self):
        return VecEntity([-a for a in self.entries], self.orientation)

    def __sub__(self, other):
        if not isinstance(other, VecEntity):
            return NotImplemented
        return self + (-other)

    def scaled(self, c: FFElem) -> VecEntity:
        return VecEntity([c * a for a in self.entries], self.orientation)

    def dot(self, other: VecEntity) -> FFElem:
        """Plain coordinate dot product."""
        if other.n != self.n:
            raise ValueError("vector length mismatch")
        acc = self.ctx.zero
        for a, b in zip(self.entries, other.entries):
            acc = acc + a * b
        return acc

    def transposed(self) -> VecEntity:
        flip = "column" if self.orientation == "row" else "row"
        return VecEntity(self.entries, flip)

    def __matmul__(self, other):
        if isinstance(other, MatEntity):
            if self.orientation != "row":
                raise ValueError("left-multiplication needs a row vector")
            if self.n != other.n:
                raise ValueError("dimension mismatch")
            cols = range(other.n)
            return VecEntity(
                [
                    sum((self.entries[k] * other.rows[k][j] for k in range(self.n)),
                        self.ctx.zero)
                    for j in cols
                ],
                "row",
            )
        if isinstance(other, VecEntity):
            if self.orientation == "row" and other.orientation == "column":
                return self.dot(other)
            return NotImplemented
        return NotImplemented

    def residues(self) -> tuple[int, ...]:
        """Flat canonical coordinates, length n * degree."""
        out = []
        for x in self.entries:
            out.extend(x.residues())
        return tuple(out)


class MatEntity:
    """Immutable n x n matrix over a FieldCtx, with cached eigen analysis."""

    __slots__ = ("ctx", "n", "rows", "_charpoly", "_order", "_det")

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and nonempty")
        ctx = rows[0][0].ctx
        for r in rows:
            for x in r:
                if x.ctx != ctx:
                    raise MixedContext("matrix entries from different fields")
        self.ctx = ctx
        self.n = n
        self.rows = rows
        self._charpoly = None
        self._order = None
        self._det = None

    # ---- construction helpers -------------------------------------------------

    @staticmethod
    def from_ints(ctx: FieldCtx, rows) -> MatEntity:
        return MatEntity([[ctx.elem(v) for v in r] for r in rows])

    @staticmethod
    def identity(ctx: FieldCtx, n: int) -> MatEntity:
        return MatEntity(
            [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def scalar(ctx: FieldCtx, c: FFElem, n: int) -> MatEntity:
        return MatEntity([[c if i == j else ctx.zero for j in range(n)] for i in range(n)])

    @staticmethod
    def diagonal(entries) -> MatEntity:
        entries = list(entries)
        ctx = entries[0].ctx
        n = len(entries)
        return MatEntity(
            [[entries[i] if i == j else ctx.zero for j in range(n)] for i in range(n)]
        )

    # ---- basic algebra ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MatEntity):
            return NotImplemented
        return self.ctx == other.ctx and self.rows == other.rows

    def __hash__(self):
        return hash((self.ctx, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(repr(x) for x in r) for r in self.rows)
        return f"MatEntity[{body}]"

    def __add__(self, other):
        if not isinstance(other, MatEntity):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return MatEntity(
            [
                [self.rows[i][j] + other.rows[i][j] for j in range(self.n)]
                for i in range(self.n)
            ]
        )

    def __sub__(self, other):
        if not isinstance(other, MatEntity):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return MatEntity(
            [
                [self.rows[i][j] - other.rows[i][j] for j in range(self.n)]
                for i in range(self.n)
            ]
        )

    def __matmul__(self, other):
        if isinstance(other, MatEntity):
            if other.n != self.n:
                raise ValueError("dimension mismatch")
            n = self.n
            return MatEntity(
                [
                    [
                        sum((self.rows[i][k] * other.rows[k][j] for k in range(n)),
                            self.ctx.zero)
                        for j in range(n)
                    ]
                    for i in range(n)
                ]
            )
        if isinstance(other, VecEntity):
            if other.orientation != "column":
                raise ValueError("right-multiplication needs a column vector")
            if other.n != self.n:
                raise ValueError("dimension mismatch")
            return VecEntity(
                [
                    sum((self.rows[i][k] * other.entries[k] for k in range(self.n)),
                        self.ctx.zero)
                    for i in range(self.n)
                ],
                "column",
            )
        return NotImplemented

    def __pow__(self, e: int) -> MatEntity:
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out = MatEntity.identity(self.ctx, self.n)
        base = self
        while e:
            if e & 1:
                out = out @ base
            e >>= 1
            if e:
                base = base @ base
        return out

    def is_identity(self) -> bool:
        one, zero = self.ctx.one, self.ctx.zero
        return all(
            self.rows[i][j] == (one if i == j else zero)
            for i in range(self.n)
            for j in range(self.n)
        )

    def trace(self) -> FFElem:
        acc = self.ctx.zero
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def det(self) -> FFElem:
        if self._det is None:
            self._det = _det_eliminate([list(r) for r in self.rows], self.ctx)
        return self._det

    def inverse(self) -> MatEntity:
        inv = _invert([list(r) for r in self.rows], self.ctx)
        if inv is None:
            raise DegenerateParameters("matrix is singular")
        return MatEntity(inv)

    def transposed(self) -> MatEntity:
        return MatEntity(
            [[self.rows[j][i] for j in range(self.n)] for i in range(self.n)]
        )

    def residues(self) -> tuple[int, ...]:
        """Row-major flat canonical coordinates, length n^2 * degree."""
        out = []
        for r in self.rows:
            for x in r:
                out.extend(x.residues())
        return tuple(out)


# ---- elimination helpers ---------------------------------------------------------


def _det_eliminate(rows, ctx):
    n = len(rows)
    det = ctx.one
    for col in range(n):
        pivot = next((i for i in range(col, n) if rows[i][col]), None)
        if pivot is None:
            return ctx.zero
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det = det * rows[col][col]
        inv = rows[col][col].inverse()
        for i in range(col + 1, n):
            if rows[i][col]:
                f = rows[i][col] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return det


def _invert(rows, ctx):
    n = len(rows)
    aug = [rows[i] + [ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col]), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [inv * a for a in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def rank(rows_in) -> int:
    """Rank of a list of FFElem rows by elimination."""
    rows = [list(r) for r in rows_in]
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    rk = 0
    for col in range(n):
        pivot = next((i for i in range(rk, m) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rk], rows[pivot] = rows[pivot], rows[rk]
        inv = rows[rk][col].inverse()
        rows[rk] = [inv * a for a in rows[rk]]
        for i in range(m):
            if i != rk and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rk])]
        rk += 1
        if rk == m:
            break
    return rk


# ---- polynomial helpers (coefficient lists, ascending, over one ctx) -------------


def _poly_trim(c):
    while len(c) > 1 and not c[-1]:
        c.pop()
    return c


def _poly_deriv(c):
    ctx = c[0].ctx
    if len(c) == 1:
        return [ctx.zero]
    return _poly_trim([ctx.elem(k) * c[k] for k in range(1, len(c))])


def _poly_divmod(a, b):
    ctx = a[0].ctx
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv = lb.inverse()
    quo = [ctx.zero] * max(1, len(a) - db)
    while len(a) - 1 >= db and any(a):
        da = len(a) - 1
        if not a[-1]:
            a.pop()
            continue
        f = a[-1] * inv
        quo[da - db] = f
        for i in range(db + 1):
            a[da - db + i] = a[da - db + i] - f * b[i]
        a.pop()
    if not a:
        a = [ctx.zero]
    return _poly_trim(quo), _poly_trim(a)


def _poly_gcd(a, b):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while any(b):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    # monic normalization
    if any(a) and a[-1] != a[0].ctx.one:
        inv = a[-1].inverse()
        a = [inv * x for x in a]
    return a


def _poly_eval(c, x: FFElem) -> FFElem:
    acc = c[-1]
    for k in range(len(c) - 2, -1, -1):
        acc = acc * x + c[k]
    return acc


def _poly_eval_matrix(c, A: MatEntity) -> MatEntity:
    acc = MatEntity.scalar(A.ctx, c[-1], A.n)
    for k in range(len(c) - 2, -1, -1):
        acc = acc @ A + MatEntity.scalar(A.ctx, c[k], A.n)
    return acc


# ---- characteristic polynomial and eigenvalues ------------------------------------


@dataclass
class CharPolyData:
    """Monic characteristic polynomial plus its factorization shape.

    coeffs: ascending coefficients, length n + 1, leading term one.
    tag: split | irreducible | repeated | mixed.
    eigenvalues: all n roots with multiplicity in eigen_ctx, or None when they
    live beyond a quadratic extension of the base field.
    """

    coeffs: tuple
    tag: str
    eigenvalues: tuple | None
    eigen_ctx: FieldCtx | None


def _quadratic_roots(c0, c1, ctx):
    """Roots of X^2 + c1 X + c0 over ctx, or its quadratic extension, or None."""
    inv2 = ctx.elem(2).inverse()
    disc = c1 * c1 - ctx.elem(4) * c0
    if not disc:
        lam = -c1 * inv2
        return (lam, lam), ctx, True
    if is_square(disc):
        s = sqrt(disc)
        return ((-c1 + s) * inv2, (-c1 - s) * inv2), ctx, False
    if ctx.degree == 2:
        return None, None, False  # roots would need a quartic extension
    ext = ctx.ext_field()
    # disc = r * w^2 with w = sqrt(disc / r) in F_p, so sqrt(disc) = w * omega
    w = sqrt(ctx.elem(disc.c0 * pow(ext.r, ctx.p - 2, ctx.p)))
    s = ext.elem(0, w.c0)
    c1e, inv2e = ext.lift(c1), ext.lift(inv2)
    return ((-c1e + s) * inv2e, (-c1e - s) * inv2e), ext, False


def char_poly_factor(A: MatEntity) -> CharPolyData:
    """Characteristic polynomial with factorization tag and eigenvalues (n <= 3)."""
    if A._charpoly is not None:
        return A._charpoly
    ctx, n = A.ctx, A.n
    if n > 3:
        raise UnsupportedDimension(f"eigen analysis implemented for n <= 3, got {n}")
    one = ctx.one
    if n == 1:
        lam = A.rows[0][0]
        data = CharPolyData((-lam, one), "split", (lam,), ctx)
    elif n == 2:
        tr, det = A.trace(), A.det()
        coeffs = (det, -tr, one)
        roots, ectx, rep = _quadratic_roots(det, -tr, ctx)
        if roots is None:
            data = CharPolyData(coeffs, "irreducible", None, None)
        else:
            tag = "repeated" if rep else ("split" if ectx == ctx else "irreducible")
            data = CharPolyData(coeffs, tag, roots, ectx)
    else:
        tr = A.trace()
        m2 = _principal_minor_sum(A)
        det = A.det()
        coeffs = (-det, m2, -tr, one)
        data = _cubic_factor(coeffs, ctx)
    A._charpoly = data
    return data


def _principal_minor_sum(A: MatEntity) -> FFElem:
    acc = A.ctx.zero
    r = A.rows
    for i in range(3):
        for j in range(i + 1, 3):
            acc = acc + r[i][i] * r[j][j] - r[i][j] * r[j][i]
    return acc


def _cubic_factor(coeffs, ctx) -> CharPolyData:
    if ctx.q > _ROOT_SCAN_CAP:
        raise BudgetExceeded(
            f"cubic root scan over q = {ctx.q} exceeds {_ROOT_SCAN_CAP}",
            estimated_work=ctx.q,
        )
    poly = list(coeffs)
    roots = []
    for x in ctx.iter_elements():
        if not _poly_eval(poly, x):
            roots.append(x)
            if len(roots) == 3:
                break
    # peel off each root (with multiplicity) by synthetic division
    with_mult = []
    rem = poly
    for z in roots:
        while len(rem) > 1 and not _poly_eval(rem, z):
            rem, r0 = _poly_divmod(rem, [-z, ctx.one])
            assert not any(r0)
            with_mult.append(z)
    with_mult.sort(key=lambda t: ctx.element_index(t))
    k = len(with_mult)
    if k == 3:
        tag = "repeated" if len(set(with_mult)) < 3 else "split"
        return CharPolyData(tuple(coeffs), tag, tuple(with_mult), ctx)
    if k == 0:
        return CharPolyData(tuple(coeffs), "irreducible", None, None)
    # one base root, quadratic cofactor (k == 1; k == 2 impossible over a field)
    quad = rem
    qroots, ectx, rep = _quadratic_roots(quad[0] / quad[2], quad[1] / quad[2], ctx)
    if rep:
        # separable quadratic expected here; repeated means discriminant zero
        lam = qroots[0]
        return CharPolyData(tuple(coeffs), "repeated", (with_mult[0], lam, lam), ctx)
    if qroots is None:
        return CharPolyData(tuple(coeffs), "mixed", None, None)
    lifted = tuple([ectx.lift(with_mult[0])] + list(qroots))
    return CharPolyData(tuple(coeffs), "mixed", lifted, ectx)


def is_diagonalizable(A: MatEntity) -> bool:
    """True iff the squarefree part of the characteristic polynomial kills A."""
    data = char_poly_factor(A)
    coeffs = list(data.coeffs)
    g = _poly_gcd(coeffs, _poly_deriv(coeffs))
    if len(g) == 1:
        return True
    radical, r = _poly_divmod(coeffs, g)
    assert not any(r)
    vanished = _poly_eval_matrix(radical, A)
    return all(not x for row in vanished.rows for x in row)


def matrix_order(A: MatEntity) -> int:
    """Order of A in GL_n: lcm of eigenvalue orders when available, else iteration."""
    if A._order is not None:
        return A._order
    if not A.det():
        raise DegenerateParameters("singular matrix has no multiplicative order")
    tau = None
    if A.n <= 3:
        data = char_poly_factor(A)
        if data.eigenvalues is not None and is_diagonalizable(A):
            tau = 1
            for lam in data.eigenvalues:
                tau = math.lcm(tau, mult_order(lam))
    if tau is None:
        B = A
        tau = 1
        while not B.is_identity():
            B = B @ A
            tau += 1
            if tau > ORDER_ITERATION_CAP:
                raise OrderCapExceeded(f"order exceeds the cap {ORDER_ITERATION_CAP}")
    A._order = tau
    return tau


def det_order(A: MatEntity) -> int:
    """Multiplicative order t of det(A)."""
    d = A.det()
    if not d:
        raise DegenerateParameters("singular matrix")
    return mult_order(d)


def independence_check(v: VecEntity, A: MatEntity) -> bool:
    """Whether v, vA, ..., vA^(n-1) (rows) or v, Av, ... (columns) span F_q^n."""
    if not v:
        raise ZeroVector("independence check needs a nonzero vector")
    if v.n != A.n:
        raise ValueError("dimension mismatch")
    vecs = []
    cur = v
    for _ in range(A.n):
        vecs.append(list(cur.entries))
        cur = cur @ A if v.orientation == "row" else A @ cur
    return rank(vecs) == A.n


def companion_realization(lam: FFElem, a: FFElem):
    """Rewrite x -> Tr(a lam^x) as a_vec A^x b_vec with A the trace companion in SL2.

    lam must lie on the norm-one subgroup of F_{p^2}; the returned data live
    over F_p.
    """
    ctx = lam.ctx
    if ctx.degree != 2:
        raise WrongDegree("companion realization needs a quadratic-extension element")
    if not a:
        raise ZeroElement("coefficient a must be nonzero")
    if a.ctx != ctx:
        raise MixedContext("a and lam must share a field")
    u, nrm = trace_norm(lam)
    if nrm != nrm.ctx.one:
        raise NormNotOne(f"norm of {lam!r} is {nrm!r}, need 1")
    base = ctx.base_field()
    A = MatEntity(
        [
            [base.zero, -base.one],
            [base.one, u],
        ]
    )
    tr_a, _ = trace_norm(a)
    tr_alam, _ = trace_norm(a * lam)
    a_vec = VecEntity([tr_a, tr_alam], "row")
    b_vec = VecEntity([base.one, base.zero], "column")
    return a_vec, b_vec, A


def sl2_companion(ctx: FieldCtx, u: int) -> MatEntity:
    """The determinant-one companion matrix [[0, -1], [1, u]] with trace u."""
    return MatEntity(
        [
            [ctx.zero, -ctx.one],
            [ctx.one, ctx.elem(u)],
        ]
    )
