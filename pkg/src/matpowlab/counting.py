"""Solution counts for power-sum equations via convolution of orbit multisets.

The central quantity is the number of solutions of

    A^{x_1} + ... + A^{x_nu} = A^{x_{nu+1}} + ... + A^{x_{2 nu}},   1 <= x_i <= tau,

computed as sum(c^2) over the nu-fold sum multiset of the power orbit, never
by enumerating exponent tuples. Orbit entries are serialized to flat integer
residue rows; aggregation happens in numpy (int64 keys when p^d fits below
2^63, lexicographic row sort otherwise), so counts are exact integers and the
result is independent of chunking or worker layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExceeded,
    DegenerateParameters,
    MixedContext,
    ZeroLambda,
    ZeroVector,
    ZeroXi1,
)
from .ffield import FFElem, mult_order
from .matgrp import MatEntity, VecEntity, char_poly_factor, is_diagonalizable, matrix_order

DEFAULT_TAU_CAP = {1: 10 ** 6, 2: 3000, 3: 400}
PRODUCT_EQ_CAP = 10 ** 5
DISTRIBUTION_WORK_CAP = 10 ** 8
COVER_SPACE_CAP = 10 ** 7

_CHUNK_TARGET = 1 << 20  # pairwise rows materialized per chunk
_MERGE_SLACK = 8 * 10 ** 6


@dataclass
class CountResult:
    """An exact solution count plus how it was obtained."""

    value: int
    method: str
    parameters: dict = field(default_factory=dict)


@dataclass
class SumDistribution:
    """Multiset of k-fold orbit sums: residue-row key -> multiplicity."""

    arity: int
    counts: dict
    total: int


@dataclass
class CoverResult:
    """Sumset coverage record: first covering k (None if never) and misses per k."""

    covered_at: int | None
    missing: tuple
    space: int


# ---- aggregation kernel ------------------------------------------------------------


def _aggregate_encoded(keys: np.ndarray, counts: np.ndarray):
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    c = counts[order]
    if k.size == 0:
        return k, c
    starts = np.flatnonzero(np.r_[True, k[1:] != k[:-1]])
    return k[starts], np.add.reduceat(c, starts)


def _aggregate_rows(rows: np.ndarray, counts: np.ndarray):
    if rows.shape[0] == 0:
        return rows, counts
    order = np.lexsort(rows.T[::-1])
    r = rows[order]
    c = counts[order]
    change = np.any(r[1:] != r[:-1], axis=1)
    starts = np.flatnonzero(np.r_[True, change])
    return r[starts], np.add.reduceat(c, starts)


class _SumAccumulator:
    """Streams (rows, counts) blocks and keeps a merged exact multiset."""

    def __init__(self, p: int, d: int):
        self.p = p
        self.d = d
        self.encodable = p ** d < 2 ** 63
        if self.encodable:
            self._weights = (p ** np.arange(d)).astype(np.int64)
        self._pending = []
        self._pending_size = 0
        self._merged = None

    def _encode(self, rows):
        return rows @ self._weights

    def _decode(self, keys):
        rows = np.empty((keys.size, self.d), dtype=np.int64)
        rem = keys.copy()
        for j in range(self.d):
            rows[:, j] = rem % self.p
            rem //= self.p
        return rows

    def add(self, rows: np.ndarray, counts: np.ndarray):
        if self.encodable:
            item = _aggregate_encoded(self._encode(rows), counts)
        else:
            item = _aggregate_rows(rows, counts)
        self._pending.append(item)
        self._pending_size += item[1].size
        if self._pending_size > _MERGE_SLACK:
            self._merge()

    def _merge(self):
        items = self._pending
        if self._merged is not None:
            items = items + [self._merged]
        if self.encodable:
            keys = np.concatenate([k for k, _ in items])
            counts = np.concatenate([c for _, c in items])
            self._merged = _aggregate_encoded(keys, counts)
        else:
            rows = np.vstack([r for r, _ in items])
            counts = np.concatenate([c for _, c in items])
            self._merged = _aggregate_rows(rows, counts)
        self._pending = []
        self._pending_size = 0

    def result_rows(self):
        """Final (rows, counts) with unique rows."""
        self._merge()
        key_part, counts = self._merged
        if self.encodable:
            return self._decode(key_part), counts
        return key_part, counts

    def result_counts(self) -> np.ndarray:
        self._merge()
        return self._merged[1]


def _fold_once(base_rows, base_counts, orbit_rows, p):
    """One convolution step: all sums (base + orbit), aggregated exactly."""
    d = orbit_rows.shape[1]
    acc = _SumAccumulator(p, d)
    tau = orbit_rows.shape[0]
    block = max(1, _CHUNK_TARGET // max(tau, 1))
    for lo in range(0, base_rows.shape[0], block):
        hi = min(lo + block, base_rows.shape[0])
        sums = (base_rows[lo:hi, None, :] + orbit_rows[None, :, :]) % p
        sums = sums.reshape(-1, d)
        counts = np.repeat(base_counts[lo:hi], tau)
        acc.add(sums, counts)
    return acc.result_rows()


def _folded_distribution(orbit_rows: np.ndarray, p: int, arity: int):
    """(rows, counts) of the arity-fold sum multiset of the orbit sequence."""
    start = _SumAccumulator(p, orbit_rows.shape[1])
    start.add(orbit_rows, np.ones(orbit_rows.shape[0], dtype=np.int64))
    rows, counts = start.result_rows()
    for _ in range(arity - 1):
        rows, counts = _fold_once(rows, counts, orbit_rows, p)
    return rows, counts


def _rows_from_residues(residue_tuples) -> np.ndarray:
    return np.array(residue_tuples, dtype=np.int64)


def sequence_energy(residue_tuples, p: int, nu: int) -> int:
    """sum(c_nu^2) for the nu-fold sum multiset of an explicit residue-row sequence."""
    rows = _rows_from_residues(residue_tuples)
    _, counts = _folded_distribution(rows, p, nu)
    return int(np.sum(counts * counts))


# ---- matrix power orbits ----------------------------------------------------------


def power_orbit(A: MatEntity, tau: int | None = None):
    """Residue rows of A^1, ..., A^tau (tau defaults to the order of A)."""
    if tau is None:
        tau = matrix_order(A)
    out = []
    cur = A
    for _ in range(tau):
        out.append(cur.residues())
        cur = cur @ A
    return _rows_from_residues(out)


def vector_orbit(v: VecEntity, A: MatEntity, tau: int | None = None):
    """Residue rows of v A^x (row) or A^x v (column), x = 1..tau."""
    if tau is None:
        tau = matrix_order(A)
    out = []
    cur = v
    for _ in range(tau):
        cur = cur @ A if v.orientation == "row" else A @ cur
        out.append(cur.residues())
    return _rows_from_residues(out)


def _check_tau_budget(tau: int, nu: int, max_tau: int | None):
    cap = DEFAULT_TAU_CAP[nu] if max_tau is None else max_tau
    if tau > cap:
        raise BudgetExceeded(
            f"tau = {tau} exceeds the nu = {nu} cap {cap}",
            estimated_work=tau ** nu,
        )


def count_Q(A: MatEntity, nu: int, max_tau: int | None = None) -> CountResult:
    """Exact count of 2 nu - term power-sum solutions, by orbit convolution."""
    if nu not in (1, 2, 3):
        raise ValueError(f"nu must be 1, 2, or 3, got {nu}")
    tau = matrix_order(A)
    _check_tau_budget(tau, nu, max_tau)
    orbit = power_orbit(A, tau)
    _, counts = _folded_distribution(orbit, A.ctx.p, nu)
    value = int(np.sum(counts * counts))
    return CountResult(
        value,
        "convolution",
        {"nu": nu, "tau": tau, "p": A.ctx.p, "degree": A.ctx.degree, "n": A.n},
    )


def count_Q_eigen(A: MatEntity, nu: int, max_tau: int | None = None) -> CountResult:
    """Same count as count_Q through the eigenvalue system of a diagonalizable A."""
    if nu not in (1, 2, 3):
        raise ValueError(f"nu must be 1, 2, or 3, got {nu}")
    data = char_poly_factor(A)
    if data.eigenvalues is None or not is_diagonalizable(A):
        raise DegenerateParameters("eigenvalue reduction needs a diagonalizable matrix")
    tau = matrix_order(A)
    _check_tau_budget(tau, nu, max_tau)
    lams = list(data.eigenvalues)
    rows = []
    powers = [lam.ctx.one for lam in lams]
    for _ in range(tau):
        powers = [w * lam for w, lam in zip(powers, lams)]
        flat = []
        for w in powers:
            flat.extend(w.residues())
        rows.append(tuple(flat))
    _, counts = _folded_distribution(_rows_from_residues(rows), A.ctx.p, nu)
    value = int(np.sum(counts * counts))
    return CountResult(
        value,
        "eigenvalue-reduction",
        {"nu": nu, "tau": tau, "p": A.ctx.p, "degree": A.ctx.degree, "n": A.n},
    )


def additive_energy(A: MatEntity, max_tau: int | None = None) -> CountResult:
    """The 4-term count (nu = 2)."""
    return count_Q(A, 2, max_tau)


def count_JK(v: VecEntity, A: MatEntity, k: int, max_tau: int | None = None) -> CountResult:
    """Vector-orbit analogue of count_Q over the sequence v A^x (or A^x v).

    Repeats in the orbit are kept with multiplicity, so the count matches the
    raw exponent-tuple definition whether or not v and A are in general
    position.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"k must be 1, 2, or 3, got {k}")
    if not v:
        raise ZeroVector("orbit of the zero vector is trivial")
    if v.ctx != A.ctx:
        raise MixedContext("vector and matrix field contexts differ")
    if v.n != A.n:
        raise ValueError("dimension mismatch")
    tau = matrix_order(A)
    _check_tau_budget(tau, k, max_tau)
    orbit = vector_orbit(v, A, tau)
    _, counts = _folded_distribution(orbit, A.ctx.p, k)
    value = int(np.sum(counts * counts))
    return CountResult(
        value,
        "convolution",
        {
            "k": k,
            "tau": tau,
            "p": A.ctx.p,
            "degree": A.ctx.degree,
            "n": A.n,
            "side": v.orientation,
        },
    )


# ---- product equation --------------------------------------------------------------


def count_product_eq(xi0: FFElem, xis, lambdas, max_tau: int | None = None) -> CountResult:
    """Count x in [1, tau] with prod_j (xi_j - lambda_j^x) = xi_0.

    tau is the lcm of the base orders; powers advance incrementally so the
    scan costs one multiplication per factor per step.
    """
    xis = list(xis)
    lambdas = list(lambdas)
    if not xis or len(xis) != len(lambdas):
        raise ValueError("need matching nonempty coefficient and base lists")
    ctx = xi0.ctx
    for x in xis + lambdas:
        if x.ctx != ctx:
            raise MixedContext("product equation pieces from different fields")
    if not xis[0]:
        raise ZeroXi1("leading coefficient xi_1 must be nonzero")
    if not xi0:
        raise DegenerateParameters("target xi_0 must be nonzero")
    for lam in lambdas:
        if not lam:
            raise ZeroLambda("bases must be nonzero")
    orders = [mult_order(lam) for lam in lambdas]
    tau = 1
    for o in orders:
        tau = math.lcm(tau, o)
    cap = PRODUCT_EQ_CAP if max_tau is None else max_tau
    if tau > cap:
        raise BudgetExceeded(f"lcm period {tau} exceeds {cap}", estimated_work=tau)
    powers = [ctx.one for _ in lambdas]
    hits = 0
    for _ in range(tau):
        powers = [w * lam for w, lam in zip(powers, lambdas)]
        prod = ctx.one
        for xi, w in zip(xis, powers):
            prod = prod * (xi - w)
        if prod == xi0:
            hits += 1
    return CountResult(
        hits,
        "direct-scan",
        {"tau": tau, "L": max(orders), "n": len(lambdas), "p": ctx.p, "degree": ctx.degree},
    )


# ---- orbit sum distribution and sumset coverage ------------------------------------


def orbit_sum_distribution(a: VecEntity, A: MatEntity, k: int,
                           max_work: int | None = None) -> SumDistribution:
    """Full multiset of k-fold sums of the vector orbit, as a key -> count dict."""
    if k < 1:
        raise ValueError("arity must be positive")
    if not a:
        raise ZeroVector("orbit of the zero vector is trivial")
    if a.ctx != A.ctx:
        raise MixedContext("vector and matrix field contexts differ")
    tau = matrix_order(A)
    cap = DISTRIBUTION_WORK_CAP if max_work is None else max_work
    if tau ** k > cap:
        raise BudgetExceeded(f"tau^k = {tau ** k} exceeds {cap}", estimated_work=tau ** k)
    orbit = vector_orbit(a, A, tau)
    rows, counts = _folded_distribution(orbit, A.ctx.p, k)
    dist = {tuple(int(x) for x in row): int(c) for row, c in zip(rows, counts)}
    return SumDistribution(k, dist, tau ** k)


def sumset_cover(a: VecEntity, A: MatEntity, k_max: int,
                 max_space: int | None = None) -> CoverResult:
    """Smallest k <= k_max with S_k = F_q^n for S_1 = orbit, S_{k+1} = S_k + S_1.

    Stops early when the sumset stagnates: S_{k+1} = S_k forces S_{k+m} = S_k
    for all m, so no later k can cover.
    """
    if k_max < 1:
        raise ValueError("k_max must be positive")
    if not a:
        raise ZeroVector("orbit of the zero vector is trivial")
    ctx = A.ctx
    d = A.n * ctx.degree
    space = ctx.p ** d
    cap = COVER_SPACE_CAP if max_space is None else max_space
    if space > cap:
        raise BudgetExceeded(f"q^n = {space} exceeds {cap}", estimated_work=space)
    tau = matrix_order(A)
    orbit = vector_orbit(a, A, tau)
    weights = (ctx.p ** np.arange(d)).astype(np.int64)
    orbit_keys = np.unique(orbit @ weights)
    orbit_rows = _decode_keys(orbit_keys, ctx.p, d)
    current = orbit_keys
    missing = []
    covered_at = None
    for k in range(1, k_max + 1):
        gap = space - current.size
        missing.append(int(gap))
        if gap == 0:
            covered_at = k
            break
        if k == k_max:
            break
        rows = _decode_keys(current, ctx.p, d)
        block = max(1, _CHUNK_TARGET // max(orbit_keys.size, 1))
        pieces = []
        for lo in range(0, rows.shape[0], block):
            hi = min(lo + block, rows.shape[0])
            sums = (rows[lo:hi, None, :] + orbit_rows[None, :, :]) % ctx.p
            pieces.append(np.unique(sums.reshape(-1, d) @ weights))
        nxt = np.unique(np.concatenate(pieces))
        if nxt.size == current.size and np.array_equal(nxt, current):
            # S_{k+1} = S_k forces S_{k+m} = S_k: no later arity can cover
            missing.extend([int(gap)] * (k_max - k))
            break
        current = nxt
    return CoverResult(covered_at, tuple(missing), space)


def _decode_keys(keys: np.ndarray, p: int, d: int) -> np.ndarray:
    rows = np.empty((keys.size, d), dtype=np.int64)
    rem = keys.copy()
    for j in range(d):
        rows[:, j] = rem % p
        rem //= p
    return rows
