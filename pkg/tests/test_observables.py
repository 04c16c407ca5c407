import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spstruct import (
    ClassicalModel,
    HilbertModel,
    Morphism,
    NotHermitian,
    Observable,
    SchemaError,
    SectoredModel,
    apply,
    check_invariant_basis,
    check_morphism,
    check_omega_signs,
    fixed_point_check,
    hermitian_to_observable,
    image_is_basis,
    load_observable,
    mean_continuity_slack,
    mean_value,
    mean_value_from_basis,
    observable_from_values,
    project,
    span,
    states_equivalent,
)
from spstruct.checker import random_observable
from spstruct.observables import is_eigenvector, transition_defect

from conftest import haar, oracle_p, oracle_projector


def _diag(lams):
    return hermitian_to_observable(np.diag(np.asarray(lams, dtype=float)))


def test_apply_example():
    r = _diag([2, 1])
    m = r.model
    ra = apply(r, m.state([1, 1]))
    assert m.similarity(ra, m.state([1, 0])) == pytest.approx(0.8, abs=1e-12)
    assert not fixed_point_check(r, m.state([1, 1]))


def test_apply_matches_direct_operator(rng):
    for _ in range(20):
        H = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        H = H + H.conj().T
        r = hermitian_to_observable(H)
        a = haar(4, rng)
        v = H @ a
        assert oracle_p(apply(r, a), v / np.linalg.norm(v)) == pytest.approx(1.0, abs=1e-10)
        assert transition_defect(r, a) <= 1e-9


def test_eigenvectors_are_fixed(rng):
    r = _diag([3, -1, 0.5])
    m = r.model
    for lam, X in r.parts:
        x = m.random_state_in(list(X.basis), rng)
        assert is_eigenvector(r, x) and fixed_point_check(r, x)


def test_zero_eigenvalue_sends_state_orthogonal():
    r = _diag([0, 1, 2])
    m = r.model
    a = m.state([1, 1, 1])
    assert r.subspaces[0].weight(apply(r, a)) <= 1e-15


def test_kernel_state_is_left_alone():
    # sum lambda^2 p = 0 branch: r(a) = a
    r = _diag([0, 1])
    m = r.model
    a = m.state([1, 0])
    assert states_equivalent(m, apply(r, a), a)
    assert transition_defect(r, a) <= 1e-12


def test_eigenspace_items(rng):
    r = random_observable(HilbertModel(5), rng)
    m = r.model
    for _ in range(30):
        a = m.random_state(rng)
        ra = apply(r, a)
        w = r.weights(a)
        lam2 = np.asarray(r.lambdas) ** 2
        expected = lam2 * w / np.dot(lam2, w) if np.dot(lam2, w) > 0 else w
        assert np.allclose(r.weights(ra), expected, atol=1e-9)
        for i, X in enumerate(r.subspaces):
            if w[i] <= 1e-9:
                assert X.weight(ra) <= 1e-8
            if X.weight(ra) > 1e-12:
                assert states_equivalent(m, project(m, ra, X), project(m, a, X))


def test_classical_observable_is_identity():
    m = ClassicalModel(4)
    r = observable_from_values(m, [1.0, 2.0, 2.0, -3.0])
    assert len(r.parts) == 3
    for x in range(4):
        assert apply(r, x) == x and is_eigenvector(r, x)
    assert mean_value(r, 3) == -3.0


def test_sectored_observable(rng):
    m = SectoredModel([2, 2])
    H = np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)
    H[0, 1] = H[1, 0] = 0.5
    r = hermitian_to_observable(H, m)
    x = m.random_state(rng)
    assert transition_defect(r, x) <= 1e-9
    H[0, 3] = H[3, 0] = 0.1
    with pytest.raises(ValueError):
        hermitian_to_observable(H, m)


def test_omega_signs_same_sign(rng):
    r = _diag([2, 2, 1, 1])
    m = r.model
    seen = 0
    for _ in range(20):
        a, b = m.random_state(rng), m.random_state(rng)
        chk = check_omega_signs(r, a, b, 0, 1)
        assert chk.verdict in ("pass", "skipped") and chk.expected_sign == 1
        seen += chk.verdict == "pass"
    assert seen > 10


def test_omega_signs_opposite_sign(rng):
    r = _diag([1, 1, -1, -1])
    m = r.model
    for _ in range(20):
        a, b = m.random_state(rng), m.random_state(rng)
        chk = check_omega_signs(r, a, b, 0, 1)
        assert chk.verdict == "pass" and chk.expected_sign == -1
        assert chk.after == pytest.approx(-chk.before, abs=1e-7)


def test_omega_skipped_for_eigenvector():
    r = _diag([1, -1])
    m = r.model
    assert check_omega_signs(r, m.state([1, 0]), m.state([1, 1]), 0, 1).verdict == "skipped"
    assert check_omega_signs(_diag([0, 1]), m.state([1, 1]), m.state([1, 1]), 0, 1).verdict == "skipped"


def test_mean_value_examples():
    r = _diag([1, -1])
    m = r.model
    x = m.state([math.sqrt(0.8), math.sqrt(0.2)])
    assert mean_value(r, x) == pytest.approx(0.6, abs=1e-12)
    assert mean_value(r, m.state([0, 1])) == -1.0


def test_mean_from_any_eigenbasis(rng):
    r = _diag([2, 2, -1])
    m = r.model
    U = np.eye(3, dtype=complex)
    U[:2, :2] = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    basis = [m.state(U[:, j]) for j in range(3)]
    for _ in range(10):
        x = m.random_state(rng)
        assert mean_value_from_basis(r, x, basis) == pytest.approx(mean_value(r, x), abs=1e-12)
        assert mean_value_from_basis(r, x) == pytest.approx(mean_value(r, x), abs=1e-12)


def test_rescaling(rng):
    r = random_observable(HilbertModel(4), rng)
    m = r.model
    r2 = r.scaled(-2.5)
    for _ in range(10):
        a = m.random_state(rng)
        assert states_equivalent(m, apply(r, a), apply(r2, a))
        assert mean_value(r2, a) == pytest.approx(-2.5 * mean_value(r, a), abs=1e-12)
    with pytest.raises(ValueError):
        r.scaled(0)


def test_mean_continuity_signed_sum_is_void():
    # lambda = (1, -1): the signed sum is zero, so the bound is zero
    r = _diag([1, -1])
    m = r.model
    x, y = m.state([1, 0]), m.state([math.sqrt(0.9), math.sqrt(0.1)])
    assert mean_continuity_slack(r, x, y) == pytest.approx(-0.2, abs=1e-12)


def test_mean_continuity_equal_states():
    r = _diag([1, -1])
    x = r.model.state([1, 1])
    assert mean_continuity_slack(r, x, x) == pytest.approx(0.0, abs=1e-12)


def test_mean_continuity_absolute_form_holds(rng):
    worst = math.inf
    for d in range(2, 7):
        m = HilbertModel(d)
        for _ in range(200):
            r = random_observable(m, rng)
            x = m.random_state(rng)
            y = m.state(m.embed(x) + 10 ** rng.uniform(-3, 0) * haar(d, rng))
            worst = min(worst, mean_continuity_slack(r, x, y, coefficient=1.0, absolute=True))
    assert worst >= -1e-9


def test_hermitian_examples():
    r = _diag([2, 1])
    assert r.lambdas == (1.0, 2.0)
    px = hermitian_to_observable([[0, 1], [1, 0]])
    m = px.model
    assert px.lambdas == (-1.0, 1.0)
    assert px.subspaces[1].contains(m.state([1, 1]))
    assert px.subspaces[0].contains(m.state([1, -1]))
    ident = hermitian_to_observable(np.eye(3))
    assert len(ident.parts) == 1 and ident.parts[0][1].dim == 3
    a = ident.model.state([1, 2j, 3])
    assert states_equivalent(ident.model, apply(ident, a), a)


def test_hermitian_clustering_snaps_to_zero():
    H = np.diag([0.0, 1e-12, 1.0])
    r = hermitian_to_observable(H)
    assert r.lambdas == (0.0, 1.0) and r.subspaces[0].dim == 2


def test_hermitian_errors():
    with pytest.raises(NotHermitian):
        hermitian_to_observable([[0, 1], [0, 0]])
    with pytest.raises(NotHermitian):
        hermitian_to_observable(np.ones((2, 3)))


def test_observable_validation():
    m = HilbertModel(2)
    e1, e2 = m.state([1, 0]), m.state([0, 1])
    with pytest.raises(ValueError):
        Observable(m, [(1.0, [e1]), (1.0, [e2])])
    with pytest.raises(ValueError):
        Observable(m, [(1.0, [e1])])
    with pytest.raises(Exception):
        Observable(m, [(1.0, [e1]), (2.0, [m.state([1, 1])])])


def test_load_observable_kinds():
    herm = {"kind": "hermitian", "dim": 2, "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}
    r = load_observable(json.dumps(herm))
    assert r.lambdas == (-1.0, 1.0)
    spec = {"kind": "spectral", "parts": [
        {"lambda": 1, "basis": [[[1, 0], [0, 0]]]},
        {"lambda": -1, "basis": [[[0, 0], [1, 0]]]},
    ]}
    r = load_observable(json.dumps(spec))
    assert sorted(r.lambdas) == [-1.0, 1.0]
    with pytest.raises(SchemaError):
        load_observable('{"kind": "hermitian", "dim": 2, "matrix": [[[0, 0]]]}')
    with pytest.raises(SchemaError):
        load_observable('{"kind": "tensor"}')


def test_fixture_pauli_x():
    path = Path(__file__).parent / "fixtures" / "pauli_x.json"
    r = load_observable(path.read_bytes())
    assert r.lambdas == (-1.0, 1.0)


# -- morphisms ----------------------------------------------------------------

def test_identity_morphism(rng):
    m = HilbertModel(3)
    f = Morphism.identity(m)
    samples = [m.random_state(rng) for _ in range(8)]
    assert check_morphism(f, samples).ok
    B = m.canonical_states()
    v = check_invariant_basis(f, B, B[:2], samples, members=[m.random_state_in(B[:2], rng)])
    assert v.applicable and v.ok


def test_diagonal_phase_morphism(rng):
    m = HilbertModel(4)
    U = np.diag(np.exp(1j * rng.uniform(0, 2 * math.pi, 4)))
    f = Morphism.unitary(m, U)
    samples = [m.random_state(rng) for _ in range(10)]
    assert check_morphism(f, samples).ok
    B = m.canonical_states()
    members = [m.random_state_in(B[1:3], rng) for _ in range(3)]
    v = check_invariant_basis(f, B, B[1:3], samples, members)
    assert v.applicable and v.ok and v.maps_into and v.projection_commutes
    assert image_is_basis(f, B)


def test_hadamard_is_not_applicable(rng):
    m = HilbertModel(2)
    f = Morphism.unitary(m, np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    B = m.canonical_states()
    v = check_invariant_basis(f, B, B[:1], [m.random_state(rng)])
    assert not v.applicable
    assert image_is_basis(f, B)


def test_non_morphism_detected(rng):
    m = HilbertModel(2)
    e1 = m.state([1, 0])
    f = Morphism(m, lambda x: e1)
    v = check_morphism(f, [e1, m.state([0, 1]), m.state([1, 1])])
    assert not v.ok and not v.injective
    assert not image_is_basis(f, m.canonical_states())


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_unitaries_preserve_similarity(d, seed):
    rng = np.random.default_rng(seed)
    m = HilbertModel(d)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    U = np.linalg.qr(z)[0]
    f = Morphism.unitary(m, U)
    samples = [m.random_state(rng) for _ in range(5)]
    assert check_morphism(f, samples).ok
    assert image_is_basis(f, m.canonical_states())
    P = oracle_projector([U[:, 0]])
    x = samples[0]
    assert span(m, [f(m.canonical_states()[0])]).weight(x) == pytest.approx(np.vdot(x, P @ x).real, abs=1e-12)
