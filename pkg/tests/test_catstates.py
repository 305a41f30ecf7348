from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catgate.catstates import (
    PAPER_STATES,
    CatEncoding,
    InitialStateSpec,
    cat_coefficients,
    ideal_output,
    input_superposition,
    logical_one,
    logical_zero,
    parity_expectation,
    required_n_trunc,
    tail_population,
    two_qubit_logical,
)
from catgate.errors import DegenerateEncodingError, TruncationError
from catgate.hilbert import SpaceDescriptor


def coherent(alpha, n):
    """Truncated coherent state from the Poisson amplitudes, computed term by term."""
    return np.array([np.exp(-abs(alpha) ** 2 / 2) * alpha**k / math.sqrt(math.factorial(k)) for k in range(n)])


def cat_oracle(alpha, n, sign):
    # |alpha> + sign |-alpha>, normalized with the untruncated norm
    overlap = np.exp(-2 * abs(alpha) ** 2)
    norm = math.sqrt(2 * (1 + sign * overlap))
    return (coherent(alpha, n) + sign * coherent(-alpha, n)) / norm


def test_logical_states_match_coherent_superpositions():
    enc = CatEncoding(0.5, 10)
    np.testing.assert_allclose(logical_zero(enc).amplitudes, cat_oracle(0.5, 10, +1), atol=1e-12)
    np.testing.assert_allclose(logical_one(enc).amplitudes, cat_oracle(0.5, 10, -1), atol=1e-12)


@given(st.floats(min_value=0.1, max_value=2.0))
def test_coefficient_identity(alpha):
    n = 30
    for parity, sign in ((0, +1), (1, -1)):
        np.testing.assert_allclose(cat_coefficients(alpha, n, parity), cat_oracle(alpha, n, sign), atol=1e-12)


def test_norm_and_orthogonality_default_encoding():
    enc = CatEncoding(0.5, 10)
    z, o = logical_zero(enc), logical_one(enc)
    assert z.norm() == pytest.approx(1.0, abs=1e-10)
    assert o.norm() == pytest.approx(1.0, abs=1e-10)
    assert abs(z.inner(o)) == 0.0


def test_parity_support_is_exact():
    enc = CatEncoding(0.5, 10)
    assert np.all(logical_zero(enc).amplitudes[1::2] == 0)
    assert np.all(logical_one(enc).amplitudes[0::2] == 0)
    assert parity_expectation(logical_zero(enc)) == pytest.approx(1.0, abs=1e-9)
    assert parity_expectation(logical_one(enc)) == pytest.approx(-1.0, abs=1e-9)


def test_vacuum_limit_and_degenerate_odd_cat():
    z = logical_zero(CatEncoding(0.0, 4))
    np.testing.assert_array_equal(z.amplitudes, [1, 0, 0, 0])
    with pytest.raises(DegenerateEncodingError):
        logical_one(CatEncoding(1e-8, 4))


def test_tail_population():
    # normalized weights: x^k/k!/cosh(x) (even), x^k/k!/sinh(x) (odd), x = |alpha|^2
    x = 0.25
    odd_tail = sum(x**k / math.factorial(k) for k in range(11, 60, 2)) / math.sinh(x)
    assert tail_population(CatEncoding(0.5, 10)) == pytest.approx(odd_tail, rel=1e-10)
    assert tail_population(CatEncoding(0.5, 10)) < 1e-9
    assert tail_population(CatEncoding(0.0, 10)) == 0.0
    assert tail_population(CatEncoding(0.5, 6)) >= tail_population(CatEncoding(0.5, 10))


def test_truncation_error_reports_requirement():
    with pytest.raises(TruncationError) as info:
        logical_zero(CatEncoding(2.0, 6))
    assert info.value.required_n_trunc == required_n_trunc(2.0)
    assert tail_population(CatEncoding(2.0, info.value.required_n_trunc)) < 1e-9


@settings(max_examples=20)
@given(st.floats(min_value=0.1, max_value=2.0))
def test_two_qubit_gram_matrix(alpha):
    n = required_n_trunc(alpha)
    enc = CatEncoding(alpha, n)
    s = SpaceDescriptor(n, n)
    basis = np.array([two_qubit_logical(b, enc, s).amplitudes for b in ("00", "01", "10", "11")])
    # renormalize away the (sub-eps) truncation tail before checking orthonormality
    basis /= np.linalg.norm(basis, axis=1, keepdims=True)
    np.testing.assert_allclose(basis.conj() @ basis.T, np.eye(4), atol=1e-9)


def test_two_qubit_states_live_in_ground_block():
    enc = CatEncoding(0.5, 10)
    s = SpaceDescriptor(10, 10)
    v = two_qubit_logical("00", enc, s)
    blocks = v.amplitudes.reshape(s.shape)
    assert np.all(blocks[1:] == 0)
    assert v.norm() == pytest.approx(1.0, abs=1e-10)
    assert abs(v.inner(two_qubit_logical("11", enc, s))) < 1e-15
    assert abs(two_qubit_logical("01", enc, s).inner(two_qubit_logical("10", enc, s))) < 1e-15


def test_input_amplitudes():
    assert np.allclose(InitialStateSpec(0, 0).amplitudes, [1, 0, 0, 0])
    assert np.allclose(PAPER_STATES["pi4-pi4"].amplitudes, [0.5] * 4)
    assert np.allclose(InitialStateSpec(math.pi / 2, 0).amplitudes, [0, 0, 1, 0])


def test_input_and_ideal_output_states():
    enc = CatEncoding(0.5, 10)
    s = SpaceDescriptor(10, 10)
    zero = InitialStateSpec(0, 0)
    np.testing.assert_array_equal(input_superposition(zero, enc, s).amplitudes, ideal_output(zero, enc, s).amplitudes)
    both = InitialStateSpec(math.pi / 2, math.pi / 2)
    np.testing.assert_allclose(ideal_output(both, enc, s).amplitudes, -two_qubit_logical("11", enc, s).amplitudes,
                               atol=1e-15)


@given(st.floats(0, math.pi / 2), st.floats(0, math.pi / 2))
def test_ideal_overlap_closed_form(theta, phi):
    enc = CatEncoding(0.5, 10)
    s = SpaceDescriptor(10, 10)
    spec = InitialStateSpec(theta, phi)
    overlap = ideal_output(spec, enc, s).inner(input_superposition(spec, enc, s))
    expected = 1 - 2 * math.sin(theta) ** 2 * math.sin(phi) ** 2
    # the truncated logical states are normalized to within the tail
    assert overlap.real == pytest.approx(expected, abs=1e-9)
