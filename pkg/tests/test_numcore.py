import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subalg.errors import Singular
from subalg.numcore import (
    Tolerance,
    canonical_columns,
    column_basis,
    left_inverse,
    null_space,
    rank,
    rref_backend,
    solve_linear,
)

M1 = np.array([[0, 0, 0], [1, 1, 1], [0, 1, 1]], dtype=complex)


def test_rank_examples():
    assert rank(np.eye(3)) == 3
    assert rank(np.zeros((2, 4))) == 0
    assert rank(M1) == 2


def test_null_space_examples():
    assert null_space(np.eye(3)).shape == (3, 0)
    k = null_space(M1)
    assert k.shape == (3, 1)
    assert np.abs(M1 @ k).max() < 1e-12
    k = null_space(np.array([[1, 1], [1, 1]]))
    assert k.shape == (2, 1)
    assert abs(k[0, 0] + k[1, 0]) < 1e-12


@given(st.integers(0, 10_000), st.floats(1e-6, 1e6))
def test_rank_is_scale_invariant(seed, scale):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((5, 3)) @ rng.standard_normal((3, 6))
    assert rank(a) == rank(scale * a) == 3


@given(st.integers(0, 10_000))
def test_null_space_dimension(seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, 5))
    a = rng.standard_normal((6, r)) @ rng.standard_normal((r, 7)) + 0j
    k = null_space(a)
    assert k.shape[1] == 7 - r
    assert np.abs(a @ k).max() < 1e-9
    assert rank(k) == k.shape[1]


def test_solve_linear_square_and_overdetermined(rng):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    x = rng.standard_normal((4, 2))
    assert np.abs(solve_linear(a, a @ x) - x).max() < 1e-10
    tall = rng.standard_normal((6, 3))
    assert np.abs(solve_linear(tall, tall @ x[:3]) - x[:3]).max() < 1e-10


def test_solve_linear_singular_raises():
    with pytest.raises(Singular):
        solve_linear(np.ones((2, 2)), np.array([1.0, 0.0]))


def test_column_basis_and_left_inverse(rng):
    a = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 5))
    b = column_basis(a)
    assert b.shape == (6, 2)
    assert np.abs(left_inverse(b) @ b - np.eye(2)).max() < 1e-12


def test_tolerance_rejects_bad_values():
    with pytest.raises(ValueError):
        Tolerance(rank_rel=0)
    with pytest.raises(ValueError):
        Tolerance(residual_abs=-1)


@given(st.integers(0, 10_000))
def test_canonical_columns_backends_agree(seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, 5))
    a = (rng.standard_normal((7, r)) + 1j * rng.standard_normal((7, r))) @ rng.standard_normal((r, 5))
    py = canonical_columns(a, backend="python")
    assert py.shape == (7, r)
    assert np.abs(canonical_columns(a) - py).max() < 1e-10
    # same span after a change of basis
    assert np.abs(canonical_columns(a @ rng.standard_normal((5, 5)), backend="python") - py).max() < 1e-8


def test_backend_reported():
    assert rref_backend() in ("compiled", "python")
