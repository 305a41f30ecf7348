from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catgate.errors import DimensionError, InputError
from catgate.hilbert import (
    Operator,
    Ops,
    SpaceDescriptor,
    adjoint,
    annihilation,
    commutator,
    compose,
    creation,
    embed,
    hermiticity_error,
    identity,
    number,
    qutrit_transition,
)


def test_annihilation_small_cases():
    np.testing.assert_array_equal(annihilation(2).matrix, [[0, 1], [0, 0]])
    assert annihilation(3).matrix[1, 2] == pytest.approx(np.sqrt(2))


def test_number_from_ladder_product():
    a = annihilation(4)
    np.testing.assert_allclose((adjoint(a) @ a).matrix, np.diag([0, 1, 2, 3]), atol=1e-15)
    np.testing.assert_allclose(number(4).matrix, np.diag([0, 1, 2, 3]))
    np.testing.assert_allclose(creation(4).matrix, a.matrix.T)


@given(st.integers(min_value=2, max_value=25))
def test_canonical_commutator_below_truncation(n):
    c = commutator(annihilation(n), creation(n)).matrix
    np.testing.assert_allclose(c[: n - 1, : n - 1], np.eye(n - 1), atol=1e-12)


def test_qutrit_transitions():
    eg = qutrit_transition("g", "e").matrix
    expected = np.zeros((3, 3))
    expected[1, 0] = 1
    np.testing.assert_array_equal(eg, expected)
    np.testing.assert_array_equal(qutrit_transition("f", "f").matrix, np.diag([0, 0, 1]))
    fg = np.zeros((3, 3))
    fg[0, 2] = 1
    np.testing.assert_array_equal(qutrit_transition("f", "g").matrix, fg)


def test_space_indexing_order():
    s = SpaceDescriptor(4, 5)
    assert s.dim == 60
    assert s.shape == (3, 4, 5)
    assert s.index("e", 2, 3) == (1 * 4 + 2) * 5 + 3
    v = np.zeros(s.dim)
    v[s.index("f", 3, 1)] = 1
    assert np.argwhere(v.reshape(s.shape))[0].tolist() == [2, 3, 1]


def test_embed_identity_and_commuting_slots():
    s = SpaceDescriptor(3, 4)
    np.testing.assert_array_equal(embed(identity(3), "qutrit", s).matrix, np.eye(s.dim))
    na = embed(number(3), "a", s)
    nb = embed(number(4), "b", s)
    np.testing.assert_allclose((na @ nb).matrix, (nb @ na).matrix)


@settings(max_examples=25)
@given(
    st.integers(min_value=2, max_value=5),
    st.integers(min_value=2, max_value=5),
    st.sampled_from(["qutrit", "a", "b"]),
    st.integers(min_value=0, max_value=2**31),
)
def test_embed_trace_and_entry_multiplicity(n_a, n_b, slot, seed):
    s = SpaceDescriptor(n_a, n_b)
    n = s.slot_dim(slot)
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    big = embed(Operator(m), slot, s)
    others = s.dim // n
    assert big.trace() == pytest.approx(np.trace(m) * others, rel=1e-12)
    # each source entry appears exactly `others` times
    assert np.count_nonzero(big.matrix) == np.count_nonzero(m) * others
    assert np.sum(np.abs(big.matrix) ** 2) == pytest.approx(np.sum(np.abs(m) ** 2) * others, rel=1e-12)


def test_embed_rejects_wrong_dimension():
    with pytest.raises((DimensionError, InputError)):
        embed(number(3), "a", SpaceDescriptor(4, 4))


def test_compose_cancellation_and_hermitian_pair():
    a = annihilation(3)
    assert np.all(compose([(1.0, a), (-1.0, a)]).matrix == 0)
    c = 0.3 + 0.7j
    h = compose([(c, a), (np.conj(c), adjoint(a))])
    assert hermiticity_error(h) < 1e-15


def test_stage1_pairs_hermitian_at_t0():
    s = SpaceDescriptor(4, 4)
    o = Ops(s)
    half = compose([(1.0, o.a @ o.s_eg_plus), (0.8, o.b @ o.s_fe_plus)])
    h = half + half.dag
    assert hermiticity_error(h) < 1e-12


def test_operator_is_read_only():
    op = number(3)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5
