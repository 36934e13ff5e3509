"""Instance grids and row generators for every experiment kind."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..catmap import (
    CatMatrix,
    Observable,
    cat_unitary,
    delta_Nf,
    egorov_defect,
    matrix_element_check,
)
from ..charsums import (
    MOMENT_WORK_CAP,
    SUM_TAU_CAP,
    analyze_instance,
    evaluate_bounds,
    gauss_subgroup,
    kloosterman_subgroup,
    matrix_exp_sum,
    nonsplit_pair_bound,
    split_pair_bound,
    sum_moment,
    weil_explicit_bound,
)
from ..counting import (
    DEFAULT_TAU_CAP,
    count_Q,
    count_product_eq,
    orbit_sum_distribution,
    sumset_cover,
)
from ..curves import (
    CURVE_WORK_CAP,
    CurveSpec,
    count_points,
    extension_regime_bound,
    high_degree_bound,
)
from ..errors import (
    BudgetExceeded,
    CompositeModulus,
    DegenerateParameters,
    DependentVectors,
    SingularLowerLeft,
)
from ..ffield import (
    SubgroupSpec,
    _is_prime,
    is_square,
    make_field,
    mult_order,
    primitive_root,
    subgroup_of_order,
)
from ..matgrp import VecEntity, char_poly_factor, det_order, matrix_order, sl2_companion
from .config import EXPERIMENT_NAMES, ExperimentConfig
from .prng import derive_stream

# Fixed hyperbolic automorphism for the quantization experiments.
CAT_A11, CAT_A12, CAT_A21, CAT_A22 = 2, 1, 3, 2
_CAT_MODES = {(1, 0): 0.5, (-1, 0): 0.5}


@dataclass(frozen=True)
class InstanceRecord:
    """One CSV row: an observed quantity against at most one bound."""

    experiment: str
    p: int
    q: int
    n: int | None
    trace: int | None
    class_tag: str
    tau: int | None
    t: int | None
    quantity: str
    value_re: float | None
    value_im: float | None
    abs_value: float | None
    bound_name: str
    bound_value: float | None
    ratio: float | None
    status: str
    seconds: float = 0.0


def _row(cfg, ctxinfo, quantity, value, bound_name="", bound_value=None,
         status="report"):
    """Build a record; the ratio column is always abs over bound."""
    if value is None:
        value_re = value_im = abs_value = None
    else:
        cval = complex(value)
        value_re, value_im = cval.real, cval.imag
        abs_value = abs(cval)
    ratio = None
    if abs_value is not None and bound_value:
        ratio = abs_value / bound_value
    return InstanceRecord(
        experiment=cfg.experiment,
        quantity=quantity,
        value_re=value_re,
        value_im=value_im,
        abs_value=abs_value,
        bound_name=bound_name,
        bound_value=bound_value,
        ratio=ratio,
        status=status,
        **ctxinfo,
    )


def _checked(cfg, ctxinfo, quantity, value, bound_name, bound_value, slack=0.0):
    status = "pass" if abs(complex(value)) <= bound_value * (1 + slack) else "fail"
    return _row(cfg, ctxinfo, quantity, value, bound_name, bound_value, status)


def _skipped(cfg, ctxinfo, quantity, err):
    cap = getattr(err, "estimated_work", None)
    return _row(cfg, ctxinfo, quantity, None, "budget",
                float(cap) if cap else None, "skipped")


def _ctxinfo(p, q, n=None, trace=None, class_tag="", tau=None, t=None):
    return dict(p=p, q=q, n=n, trace=trace, class_tag=class_tag, tau=tau, t=t)


def scan_sl2(p: int, class_filter: str = "all"):
    """Companion representatives [[0,-1],[1,u]] per trace, minus repeated-root traces."""
    ctx = make_field(p)
    out = []
    for u in range(p):
        disc = (u * u - 4) % p
        if disc == 0:
            continue
        tag = "split" if is_square(ctx.elem(disc)) else "irreducible"
        if class_filter != "all" and tag != class_filter:
            continue
        out.append(sl2_companion(ctx, u))
    return out


def _primes(cfg):
    return [p for p in range(cfg.p_min, cfg.p_max + 1) if p % 2 and _is_prime(p)]


def _trace_grid(cfg):
    grid = []
    for p in _primes(cfg):
        ctx = make_field(p)
        for u in range(p):
            disc = (u * u - 4) % p
            if disc == 0:
                continue
            tag = "split" if is_square(ctx.elem(disc)) else "irreducible"
            if cfg.class_filter != "all" and tag != cfg.class_filter:
                continue
            grid.append((p, u))
    return grid


def _divisors(n):
    out = [d for d in range(2, n + 1) if n % d == 0]
    return out


def _tau_selected(cfg, tau):
    if tau < cfg.tau_min:
        return False
    return cfg.tau_max is None or tau <= cfg.tau_max


def _scaled(cap, budget):
    return max(1, int(cap * budget))


def build_instances(cfg: ExperimentConfig):
    """Plain-tuple descriptors for the full grid, in deterministic order."""
    kind = cfg.experiment
    if kind in ("energy", "q3", "orbit"):
        return _trace_grid(cfg)
    if kind == "sums":
        return [(p, u, j) for (p, u) in _trace_grid(cfg) for j in range(cfg.samples)]
    if kind == "kloosterman":
        return [(p, m, j) for p in _primes(cfg) for m in _divisors(p - 1)
                for j in range(cfg.samples)]
    if kind == "gauss":
        grid = []
        for p in _primes(cfg):
            grid.append((p, 0, 0))
            grid.extend((p, m, j) for m in _divisors(p + 1) for j in range(cfg.samples))
        return grid
    if kind == "curves":
        grid = []
        for p in _primes(cfg):
            for s in range(cfg.s_min, cfg.s_max + 1):
                if s % p == 0:
                    continue
                grid.extend((p, s, j) for j in range(cfg.samples))
            grid.extend((p, 0, j) for j in range(cfg.samples))
        return grid
    if kind == "catmap":
        return [(p,) for p in _primes(cfg)]
    if kind == "lemma81":
        return [(p, nu) for p in _primes(cfg) for nu in cfg.nu]
    raise ValueError(f"unknown experiment {kind!r}")


def _stream(cfg, *tags):
    return derive_stream(cfg.seed, EXPERIMENT_NAMES.index(cfg.experiment), *tags)


def _companion_context(cfg, p, u):
    ctx = make_field(p)
    A = sl2_companion(ctx, u)
    data = char_poly_factor(A)
    tau = matrix_order(A)
    if not _tau_selected(cfg, tau):
        return None
    info = _ctxinfo(p, p, n=2, trace=u, class_tag=data.tag, tau=tau, t=det_order(A))
    return ctx, A, data, tau, info


def _energy_rows(cfg, desc):
    p, u = desc
    built = _companion_context(cfg, p, u)
    if built is None:
        return []
    ctx, A, data, tau, info = built
    try:
        count = count_Q(A, 2, max_tau=_scaled(DEFAULT_TAU_CAP[2], cfg.budget)).value
    except BudgetExceeded as err:
        return [_skipped(cfg, info, "energy2", err)]
    t = info["t"]
    rows = [
        _checked(cfg, info, "energy2", count, "three-tau-squared", 3.0 * tau * tau),
        _row(cfg, info, "energy2", count, "diag-energy",
             tau**3 * min(t * tau**-0.25, t * t * tau**-0.5)),
    ]
    if data.tag == "irreducible":
        rows.append(_row(cfg, info, "energy2", count, "irred-energy", t * tau**2.5))
    return rows


def _q3_rows(cfg, desc):
    p, u = desc
    built = _companion_context(cfg, p, u)
    if built is None:
        return []
    ctx, A, data, tau, info = built
    try:
        count = count_Q(A, 3, max_tau=_scaled(DEFAULT_TAU_CAP[3], cfg.budget)).value
    except BudgetExceeded as err:
        return [_skipped(cfg, info, "orbit-count-6term", err)]
    if data.tag == "split":
        bound_name, bound = "split-six", tau ** (11 / 3)
    else:
        bound_name, bound = "nonsplit-six", tau ** (19 / 5) + tau**5 / p
    return [_row(cfg, info, "orbit-count-6term", count, bound_name, bound)]


def _nonzero_pair(stream, p):
    while True:
        pair = (stream.below(p), stream.below(p))
        if pair != (0, 0):
            return pair


def _sums_rows(cfg, desc):
    p, u, j = desc
    built = _companion_context(cfg, p, u)
    if built is None:
        return []
    ctx, A, data, tau, info = built
    stream = _stream(cfg, p, u, j)
    left = VecEntity([ctx.elem(x) for x in _nonzero_pair(stream, p)], "row")
    right = VecEntity([ctx.elem(x) for x in _nonzero_pair(stream, p)], "column")
    quantity = f"matrix-sum-{j}"
    try:
        result = matrix_exp_sum(left, right, A,
                                max_tau=_scaled(SUM_TAU_CAP, cfg.budget))
    except BudgetExceeded as err:
        return [_skipped(cfg, info, quantity, err)]
    hyp = analyze_instance(left, right, A)
    report = evaluate_bounds(result, A, left, right, hyp)
    return [
        _row(cfg, info, quantity, result.value, entry.name, entry.value, entry.status)
        for entry in report.bounds
    ]


def _kloosterman_rows(cfg, desc):
    p, m, j = desc
    if not _tau_selected(cfg, m):
        return []
    ctx = make_field(p)
    group = subgroup_of_order(ctx, m)
    info = _ctxinfo(p, p, n=1, tau=m)
    stream = _stream(cfg, p, m, j)
    a = ctx.elem(stream.unit_nonzero(p))
    b = ctx.elem(stream.unit_nonzero(p))
    value = kloosterman_subgroup(group, a, b).value
    quantity = f"kloosterman-{j}"
    rows = [
        _checked(cfg, info, quantity, value, "trivial", float(m), slack=1e-9),
        _row(cfg, info, quantity, value, "split-pair", split_pair_bound(m, p)),
    ]
    if m == p - 1:
        rows.append(_checked(cfg, info, quantity, value, "weil",
                             weil_explicit_bound(p), slack=1e-9))
    if j == 0:
        try:
            moment = sum_moment("kloosterman", group, cfg.moment,
                                max_work=_scaled(MOMENT_WORK_CAP, cfg.budget))
        except BudgetExceeded as err:
            rows.append(_skipped(cfg, info, f"moment{cfg.moment}", err))
        else:
            if cfg.moment == 6:
                rows.append(_row(cfg, info, "moment6", moment.value,
                                 "sixth-moment-split", p * p * m ** (11 / 3)))
            else:
                rows.append(_row(cfg, info, f"moment{cfg.moment}", moment.value))
    return rows


def _gauss_rows(cfg, desc):
    p, m, j = desc
    ctx = make_field(p, 2)
    q = p * p
    if m == 0:
        group = SubgroupSpec(primitive_root(ctx), q - 1)
        value = gauss_subgroup(group, ctx.one).value
        info = _ctxinfo(p, q, n=1, tau=q - 1)
        # The sum over every invertible element is exactly minus one.
        return [_checked(cfg, info, "gauss-full-deviation", value + 1,
                         "tolerance", 1e-9)]
    if not _tau_selected(cfg, m):
        return []
    group = subgroup_of_order(ctx, m)
    info = _ctxinfo(p, q, n=1, tau=m)
    stream = _stream(cfg, p, m, j)
    a = ctx.from_index(1 + stream.below(q - 1))
    value = gauss_subgroup(group, a).value
    quantity = f"gauss-{j}"
    rows = [
        _checked(cfg, info, quantity, value, "trivial", float(m), slack=1e-9),
        _row(cfg, info, quantity, value, "nonsplit-pair", nonsplit_pair_bound(m, p)),
    ]
    if j == 0:
        try:
            moment = sum_moment("gauss", group, cfg.moment,
                                max_work=_scaled(MOMENT_WORK_CAP, cfg.budget))
        except BudgetExceeded as err:
            rows.append(_skipped(cfg, info, f"moment{cfg.moment}", err))
        else:
            if cfg.moment == 6:
                rows.append(_row(cfg, info, "moment6", moment.value,
                                 "sixth-moment-nonsplit",
                                 q * (m ** (19 / 5) + m**5 / p)))
            else:
                rows.append(_row(cfg, info, f"moment{cfg.moment}", moment.value))
    return rows


def _curve_pair(stream, ctx):
    q = ctx.q
    while True:
        a = ctx.from_index(stream.unit_nonzero(q))
        b = ctx.from_index(stream.unit_nonzero(q))
        if a * b != ctx.one:
            return a, b


def _curves_rows(cfg, desc):
    p, s, j = desc
    stream = _stream(cfg, p, s, j)
    if s == 0:
        ctx = make_field(p, 2)
        s_eff = p - 1
        a, b = _curve_pair(stream, ctx)
        info = _ctxinfo(p, ctx.q, n=None, tau=None)
        quantity = f"point-count-ext-{j}"
        try:
            count = count_points(CurveSpec(ctx, s_eff, a, b),
                                 max_work=_scaled(CURVE_WORK_CAP, cfg.budget)).value
        except BudgetExceeded as err:
            return [_skipped(cfg, info, quantity, err)]
        return [_row(cfg, info, quantity, count, "extension-regime",
                     extension_regime_bound(s_eff, p))]
    ctx = make_field(p)
    a, b = _curve_pair(stream, ctx)
    info = _ctxinfo(p, p)
    quantity = f"point-count-s{s}-{j}"
    try:
        count = count_points(CurveSpec(ctx, s, a, b),
                             max_work=_scaled(CURVE_WORK_CAP, cfg.budget)).value
    except BudgetExceeded as err:
        return [_skipped(cfg, info, quantity, err)]
    if 3 * s < p:
        return [_checked(cfg, info, quantity, count, "high-degree",
                         high_degree_bound(3 * s, p))]
    return [_row(cfg, info, quantity, count)]


def _orbit_rows(cfg, desc):
    p, u = desc
    built = _companion_context(cfg, p, u)
    if built is None:
        return []
    ctx, A, data, tau, info = built
    start = VecEntity((ctx.one, ctx.zero), "row")
    rows = []
    try:
        dist = orbit_sum_distribution(start, A, 2)
        rows.append(_row(cfg, info, "distinct-sums-2", len(dist.counts)))
    except BudgetExceeded as err:
        rows.append(_skipped(cfg, info, "distinct-sums-2", err))
    try:
        cover = sumset_cover(start, A, 4)
        rows.append(_row(cfg, info, "cover-arity", cover.covered_at or 0))
    except BudgetExceeded as err:
        rows.append(_skipped(cfg, info, "cover-arity", err))
    lam1, lam2 = data.eigenvalues[0], data.eigenvalues[1]
    ectx = data.eigen_ctx
    stream = _stream(cfg, p, u)
    xi0 = ectx.from_index(stream.unit_nonzero(ectx.q))
    xi1 = ectx.from_index(stream.unit_nonzero(ectx.q))
    xi2 = ectx.from_index(stream.below(ectx.q))
    count = count_product_eq(xi0, (xi1, xi2), (lam1, lam2)).value
    longest = max(mult_order(lam1), mult_order(lam2))
    rows.append(_row(cfg, info, "product-eq-count", count,
                     "product-decay", tau / longest**0.5))
    return rows


def _catmap_rows(cfg, desc):
    (N,) = desc
    cat = CatMatrix(CAT_A11, CAT_A12, CAT_A21, CAT_A22)
    tau = matrix_order(cat.mod_matrix(N))
    info = _ctxinfo(N, N, n=2, trace=cat.trace, tau=tau)
    try:
        propagator = cat_unitary(N, cat)
    except SingularLowerLeft as err:
        return [_skipped(cfg, info, "propagator", err)]
    unit_dev = float(np.linalg.norm(
        propagator.entries @ propagator.entries.conj().T - np.eye(N)))
    rows = [_checked(cfg, info, "unitary-deviation", unit_dev, "tolerance", 1e-9)]
    for vec in ((1, 0), (0, 1)):
        defect = egorov_defect(propagator, cat, vec)
        rows.append(_checked(cfg, info, f"egorov-{vec[0]}{vec[1]}", defect,
                             "tolerance", 1e-8))
    try:
        defect = delta_Nf(cat, N, Observable(_CAT_MODES))
        rows.append(_row(cfg, info, "delta", defect, "ergodic-trend",
                         N ** (-1 / 60)))
    except BudgetExceeded as err:
        rows.append(_skipped(cfg, info, "delta", err))
    return rows


def _lemma81_rows(cfg, desc):
    p, nu = desc
    cat = CatMatrix(CAT_A11, CAT_A12, CAT_A21, CAT_A22)
    info = _ctxinfo(p, p, n=2, trace=cat.trace)
    quantity = f"element-power-{nu}"
    try:
        report = matrix_element_check(cat, p, (1, 0), nu)
    except (DependentVectors, DegenerateParameters, SingularLowerLeft,
            CompositeModulus, BudgetExceeded) as err:
        return [_skipped(cfg, info, quantity, err)]
    except AssertionError as err:
        report = err.report
    info = _ctxinfo(p, p, n=2, trace=cat.trace, tau=report.tau)
    return [_checked(cfg, info, quantity, report.sup_power, "count-ceiling",
                     report.bound, slack=1e-6)]


_GENERATORS = {
    "energy": _energy_rows,
    "q3": _q3_rows,
    "sums": _sums_rows,
    "kloosterman": _kloosterman_rows,
    "gauss": _gauss_rows,
    "curves": _curves_rows,
    "orbit": _orbit_rows,
    "catmap": _catmap_rows,
    "lemma81": _lemma81_rows,
}


def compute_instance(cfg: ExperimentConfig, desc) -> list:
    """All rows for one grid descriptor; pure and deterministic."""
    return _GENERATORS[cfg.experiment](cfg, desc)
