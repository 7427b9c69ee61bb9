import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from esav import InvalidArgumentError, check_symplectic, extrapolation_coeffs, gauss_tableau

R3, R15 = np.sqrt(3.0), np.sqrt(15.0)

# Printed extrapolation weights: columns weight z^{n-1}, z_1^{n-1}, ..., rows are stages.
PRINTED_S2 = np.array([
    [-2 * R3 + 6, -3 * R3 + 1, 5 * R3 - 6],
    [2 * R3 + 6, -5 * R3 - 6, 3 * R3 + 1],
])
PRINTED_S3 = np.array([
    [6 * R15 - 26, -5 * R15 / 3 + 11, 16 * R15 / 3 - 24, -29 * R15 / 3 + 40],
    [-17, 5 * R15 / 2 + 35 / 2, -17, -5 * R15 / 2 + 35 / 2],
    [-6 * R15 - 26, 29 * R15 / 3 + 40, -16 * R15 / 3 - 24, 5 * R15 / 3 + 11],
])


def test_extrapolation_two_stage_matches_printed():
    np.testing.assert_allclose(extrapolation_coeffs(gauss_tableau(2).c), PRINTED_S2, atol=1e-12, rtol=0)


def test_extrapolation_three_stage_matches_table():
    np.testing.assert_allclose(extrapolation_coeffs(gauss_tableau(3).c), PRINTED_S3, atol=1e-12, rtol=0)


def test_one_stage_extrapolation_is_linear():
    # nodes {0, 1/2}, target 3/2: z_s = -2 z^{n-1} + 3 z_1^{n-1}
    np.testing.assert_allclose(extrapolation_coeffs([0.5]), [[-2.0, 3.0]], atol=1e-15)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_symplectic_residual(s):
    assert check_symplectic(gauss_tableau(s)) < 1e-15


@pytest.mark.parametrize("s", [1, 2, 3])
def test_collocation_order_conditions(s):
    t = gauss_tableau(s)
    assert t.s == s
    np.testing.assert_allclose(t.c, t.A.sum(axis=1), atol=1e-15)
    # B(2s): sum b c^{k-1} = 1/k ; C(s): sum_j a_ij c_j^{k-1} = c_i^k / k
    for k in range(1, 2 * s + 1):
        assert t.b @ t.c ** (k - 1) == pytest.approx(1.0 / k, abs=1e-14)
    for k in range(1, s + 1):
        np.testing.assert_allclose(t.A @ t.c ** (k - 1), t.c**k / k, atol=1e-14)


def test_gauss_nodes_closed_form():
    np.testing.assert_allclose(gauss_tableau(2).c, [0.5 - R3 / 6, 0.5 + R3 / 6], atol=1e-15)
    np.testing.assert_allclose(gauss_tableau(3).c, [0.5 - R15 / 10, 0.5, 0.5 + R15 / 10], atol=1e-15)


@pytest.mark.parametrize("s", [0, 4, -1])
def test_unsupported_stage_counts(s):
    with pytest.raises(InvalidArgumentError):
        gauss_tableau(s)


def test_bad_nodes():
    with pytest.raises(InvalidArgumentError):
        extrapolation_coeffs([0.0, 0.5])
    with pytest.raises(InvalidArgumentError):
        extrapolation_coeffs([0.5, 0.5])


@given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=3, unique=True).filter(
    lambda c: min(abs(a - b) for a in c for b in c + [0.0] if a != b) > 0.05))
def test_extrapolation_reproduces_polynomials(c):
    E = extrapolation_coeffs(c)
    nodes = np.concatenate(([0.0], c))
    targets = 1.0 + np.asarray(c)
    for k in range(len(nodes)):
        np.testing.assert_allclose(E @ nodes**k, targets**k, rtol=1e-9, atol=1e-9)
