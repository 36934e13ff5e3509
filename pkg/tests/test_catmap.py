"""Tests for quantized torus automorphisms and eigenspace defects."""

import numpy as np
import pytest

from matpowlab.catmap import (
    CatMatrix,
    EIGEN_DIM_CAP,
    Observable,
    QOperator,
    QState,
    _numerical_radius,
    cat_unitary,
    delta_Nf,
    egorov_defect,
    eigenbasis,
    matrix_element_check,
    quantize,
    translation_op,
)
from matpowlab.errors import (
    BudgetExceeded,
    CompositeModulus,
    DegenerateParameters,
    DependentVectors,
    EvenModulus,
    NonRealObservable,
    SingularLowerLeft,
)

HYPERBOLIC = CatMatrix(2, 1, 3, 2)


def test_qstate_validation():
    state = QState(4, [1, 1, 1, 1])
    assert state.modulus == 4
    with pytest.raises(ValueError):
        QState(4, [1, 1, 1])
    with pytest.raises(ValueError):
        QState(4, [1, 1, 1, 2])
    with pytest.raises(ValueError):
        QState.normalized(3, [0, 0, 0])
    scaled = QState.normalized(3, [2j, 0, 0])
    assert abs(np.sum(np.abs(scaled.amplitudes) ** 2) - 3) < 1e-12
    assert abs(scaled.inner(scaled) - 1) < 1e-12


def test_qoperator_tags():
    with pytest.raises(ValueError):
        QOperator(2, [[1, 1], [0, 1]], kind="unitary")
    with pytest.raises(ValueError):
        QOperator(2, [[0, 1], [0, 0]], kind="hermitian")
    with pytest.raises(ValueError):
        QOperator(2, np.eye(2), kind="special")
    op = QOperator(2, [[0, 1], [1, 0]], kind="unitary")
    assert op.adjoint().kind == "unitary"
    state = QState(2, [1, 1])
    assert np.allclose(op.apply(state), [1, 1])


def test_translation_identity_cases():
    for n in (1, 6, 7):
        assert np.allclose(translation_op(n, (0, 0)).entries, np.eye(n))
        assert np.allclose(translation_op(n, (2 * n, 0)).entries, np.eye(n))


def test_translation_heisenberg_relation():
    rng = np.random.default_rng(41)
    n = 7
    for _ in range(12):
        a = tuple(int(x) for x in rng.integers(-10, 11, 2))
        b = tuple(int(x) for x in rng.integers(-10, 11, 2))
        lhs = translation_op(n, a).entries @ translation_op(n, b).entries
        phase = np.exp(1j * np.pi * (a[0] * b[1] - a[1] * b[0]) / n)
        rhs = phase * translation_op(n, (a[0] + b[0], a[1] + b[1])).entries
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_translation_adjoint_is_negation():
    for n, a in ((5, (1, 2)), (7, (3, 4)), (9, (-2, 5))):
        fwd = translation_op(n, a).entries
        rev = translation_op(n, (-a[0], -a[1])).entries
        assert np.max(np.abs(fwd.conj().T - rev)) <= 1e-12


def test_translation_depends_on_pair_mod_2n():
    n = 5
    bumped = translation_op(n, (1, n)).entries
    base = translation_op(n, (1, 0)).entries
    assert np.max(np.abs(bumped + base)) <= 1e-12
    full = translation_op(n, (2 * n, 3)).entries
    assert np.max(np.abs(full - translation_op(n, (0, 3)).entries)) <= 1e-12


def test_observable_reality_flag():
    good = Observable({(1, 0): 0.5 + 0.25j, (-1, 0): 0.5 - 0.25j, (0, 0): 2.0})
    assert good.mean == 2.0
    assert abs(good.mode_mass() - 2 * abs(0.5 + 0.25j)) < 1e-12
    with pytest.raises(NonRealObservable):
        Observable({(1, 0): 1.0})
    with pytest.raises(NonRealObservable):
        Observable({(0, 0): 1j})
    loose = Observable({(1, 0): 1.0}, real=False)
    assert not loose.real


def test_quantize_constant_is_identity():
    op = quantize(6, Observable({(0, 0): 1.0}))
    assert np.allclose(op.entries, np.eye(6))
    assert op.kind == "hermitian"


def test_quantize_symmetric_pair_is_hermitian():
    op = quantize(11, Observable({(2, 3): 0.5, (-2, -3): 0.5}))
    assert op.kind == "hermitian"
    assert np.max(np.abs(op.entries - op.entries.conj().T)) <= 1e-12


def test_quantize_norm_below_coefficient_mass():
    rng = np.random.default_rng(99)
    n = 11
    for _ in range(20):
        modes = {}
        for _ in range(rng.integers(1, 5)):
            a = (int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
            c = complex(rng.normal(), rng.normal())
            modes[a] = modes.get(a, 0) + c
            modes[(-a[0], -a[1])] = modes.get((-a[0], -a[1]), 0) + c.conjugate()
        f = Observable(modes)
        op_norm = np.linalg.norm(quantize(n, f).entries, 2)
        mass = sum(abs(c) for c in f.fourier.values())
        assert op_norm <= mass + 1e-9


def test_cat_matrix_validation():
    with pytest.raises(DegenerateParameters):
        CatMatrix(2, 1, 1, 2)
    with pytest.raises(DegenerateParameters):
        CatMatrix(1, 2, 0, 1)
    with pytest.raises(DegenerateParameters):
        CatMatrix(3, 1, 5, 2)
    with pytest.raises(ValueError):
        CatMatrix(2.0, 1, 3, 2)
    assert HYPERBOLIC.trace == 4
    assert HYPERBOLIC.image_of((1, 0)) == (2, 1)
    assert HYPERBOLIC.image_of((0, 1)) == (3, 2)
    reduced = HYPERBOLIC.mod_matrix(5)
    assert reduced.rows[0][0].residues() == (2,)


def test_cat_unitary_unitarity_and_phase():
    op = cat_unitary(5, HYPERBOLIC)
    assert op.kind == "unitary"
    defect = np.linalg.norm(op.entries @ op.entries.conj().T - np.eye(5))
    assert defect <= 1e-10
    anchor = op.entries[0, 0]
    assert abs(anchor.imag) <= 1e-12 and anchor.real > 0


def test_cat_unitary_modulus_errors():
    with pytest.raises(EvenModulus):
        cat_unitary(4, HYPERBOLIC)
    with pytest.raises(EvenModulus):
        cat_unitary(2, HYPERBOLIC)
    with pytest.raises(CompositeModulus):
        cat_unitary(9, HYPERBOLIC)
    with pytest.raises(CompositeModulus):
        cat_unitary(1, HYPERBOLIC)
    # Lower-left entry 3 collapses mod 3, so the propagator is undefined there.
    with pytest.raises(SingularLowerLeft):
        cat_unitary(3, HYPERBOLIC)


def test_egorov_relation_on_generators():
    for n in (5, 7, 13):
        op = cat_unitary(n, HYPERBOLIC)
        for a in ((1, 0), (0, 1), (1, 1), (2, 3)):
            assert egorov_defect(op, HYPERBOLIC, a) <= 1e-8


def test_conjugation_preserves_frobenius_norm():
    n = 11
    op = cat_unitary(n, HYPERBOLIC)
    for a in ((1, 0), (2, 5)):
        shift = translation_op(n, a).entries
        moved = op.entries.conj().T @ shift @ op.entries
        assert abs(np.linalg.norm(moved) - np.linalg.norm(shift)) <= 1e-9


def test_eigenbasis_identity_operator():
    spaces = eigenbasis(translation_op(9, (0, 0)))
    assert len(spaces) == 1
    assert spaces[0].dim == 9
    assert abs(spaces[0].eigenvalue - 1) <= 1e-12


def test_eigenbasis_spectral_reconstruction():
    n = 13
    op = cat_unitary(n, HYPERBOLIC)
    spaces = eigenbasis(op)
    assert sorted(s.dim for s in spaces) == [1] * 11 + [2]
    rebuilt = np.zeros((n, n), dtype=complex)
    for lam, basis in spaces:
        assert abs(abs(lam) - 1) <= 1e-9
        gram = basis.conj().T @ basis / n
        assert np.max(np.abs(gram - np.eye(basis.shape[1]))) <= 1e-9
        rebuilt += lam * (basis @ basis.conj().T) / n
    assert np.linalg.norm(rebuilt - op.entries) <= 1e-8


def test_eigenbasis_requires_unitary_and_caps_size():
    with pytest.raises(ValueError):
        eigenbasis(QOperator(2, [[0, 1], [0, 0]]))
    big = EIGEN_DIM_CAP + 1
    with pytest.raises(BudgetExceeded) as info:
        eigenbasis(QOperator(big, np.eye(big), kind="unitary"))
    assert info.value.estimated_work == big**3


def test_delta_constant_observable_vanishes():
    assert delta_Nf(HYPERBOLIC, 7, Observable({(0, 0): 3.75})) == 0.0


def test_delta_constant_shift_cancels_exactly():
    f = Observable({(1, 0): 0.5, (-1, 0): 0.5})
    g = Observable({(1, 0): 0.5, (-1, 0): 0.5, (0, 0): 2.25})
    assert delta_Nf(HYPERBOLIC, 13, f) == delta_Nf(HYPERBOLIC, 13, g)


def test_delta_bounded_by_mode_mass():
    f = Observable(
        {
            (0, 0): 1.0,
            (1, 2): 0.3,
            (-1, -2): 0.3,
            (2, 0): 0.1 + 0.2j,
            (-2, 0): 0.1 - 0.2j,
        }
    )
    for n in (7, 13):
        assert delta_Nf(HYPERBOLIC, n, f) <= f.mode_mass() + 1e-12


def test_delta_rejects_nonreal_observable():
    with pytest.raises(NonRealObservable):
        delta_Nf(HYPERBOLIC, 7, Observable({(1, 0): 1.0}, real=False))


def test_delta_matches_randomized_sup_oracle():
    n = 13
    f = Observable({(1, 0): 0.5, (-1, 0): 0.5})
    reported = delta_Nf(HYPERBOLIC, n, f)
    op = quantize(n, Observable({(1, 0): 0.5, (-1, 0): 0.5})).entries
    rng = np.random.default_rng(20260816)
    sampled = 0.0
    for _, basis in eigenbasis(cat_unitary(n, HYPERBOLIC)):
        comp = basis.conj().T @ op @ basis / n
        draws = rng.normal(size=(10000, comp.shape[0])) + 1j * rng.normal(
            size=(10000, comp.shape[0])
        )
        draws /= np.linalg.norm(draws, axis=1)[:, None]
        vals = np.abs(np.einsum("ij,jk,ik->i", draws.conj(), comp, draws))
        sampled = max(sampled, float(np.max(vals)))
    assert abs(reported - sampled) <= 1e-6


def test_numerical_radius_agrees_with_hermitian_spectrum():
    rng = np.random.default_rng(5)
    raw = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    herm = (raw + raw.conj().T) / 2
    exact = float(np.max(np.abs(np.linalg.eigvalsh(herm))))
    assert abs(_numerical_radius(herm) - exact) <= 1e-4 * exact
    # Classical worst case: a 2x2 Jordan cell has radius exactly one half.
    cell = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    assert abs(_numerical_radius(cell) - 0.5) <= 1e-6


def test_matrix_element_inequality_reports():
    rep = matrix_element_check(HYPERBOLIC, 11, (1, 0), 2)
    assert rep.passed and rep.tau == 10
    assert rep.sup_power <= rep.bound
    assert 0 < rep.ratio <= 1
    rep3 = matrix_element_check(HYPERBOLIC, 13, (1, 0), 3)
    assert rep3.passed and rep3.tau == 12
    assert rep3.nu == 3 and rep3.p == 13


def test_matrix_element_rejects_dependent_pairs():
    with pytest.raises(DependentVectors):
        matrix_element_check(HYPERBOLIC, 11, (0, 0), 2)
    # (6, 1) spans a stable line mod 11, so the pair and its image align.
    with pytest.raises(DependentVectors):
        matrix_element_check(HYPERBOLIC, 11, (6, 1), 2)


def test_matrix_element_rejects_degenerate_reduction():
    # Trace 10 is 1 mod 3 with a repeated root, and the reduction is not scalar.
    stuck = CatMatrix(5, 4, 6, 5)
    with pytest.raises(DegenerateParameters):
        matrix_element_check(stuck, 3, (1, 0), 2)
    with pytest.raises(ValueError):
        matrix_element_check(HYPERBOLIC, 11, (1, 0), 1)
