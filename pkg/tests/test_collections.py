import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from subalg import atoms
from subalg.algebra import additive_zero
from subalg.collections import YCollection, l_operator, validate
from subalg.generators import random_superfunction, random_y_collection, random_z_collection
from subalg.spaces import Subspace


def test_l_operator_examples(rng):
    c = random_z_collection(rng, 6, m=1, n=3)
    assert np.abs(l_operator(c, [1, 1, 1]) - np.eye(6)).max() < 1e-10
    one = atoms.single_phase_z(2)
    assert np.allclose(l_operator(one, [2 - 1j]), (2 - 1j) * np.eye(2))
    e0, e1 = Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1])
    two = YCollection(e0, e1, Subspace.zero(2), (e0, e1))
    assert np.allclose(l_operator(two, [3, 5]), np.diag([3, 5]))


@given(st.integers(0, 100_000))
def test_l_operator_is_multiplicative(seed):
    rng = np.random.default_rng(seed)
    c = random_z_collection(rng, 7, m=2, n=3)
    z, w = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    prod = l_operator(c, z) @ l_operator(c, w)
    assert np.abs(prod - l_operator(c, z * w)).max() < 1e-9


def test_linear_y_validates():
    rep = validate(atoms.linear_y([1.0, 0.0, 0.0]))
    assert rep.ok, str(rep)


def test_v_inside_j_fails():
    eye = np.eye(2)
    c = YCollection(Subspace(eye[:, [0]]), Subspace(eye[:, [1]]), Subspace(eye[:, [1]]),
                    (Subspace(eye[:, [0]]),))
    rep = validate(c)
    assert not rep.ok
    assert any("J" in chk.name and "V" in chk.name for chk in rep.failed())


def test_additive_zero_flags_only_v_meeting_e():
    rep = validate(additive_zero(2))
    assert rep.ok
    notes = [chk for chk in rep.checks if not chk.passed]
    assert len(notes) == 1 and not notes[0].required
    assert "E" in notes[0].name and "V" in notes[0].name


def test_random_collections_validate(rng):
    for _ in range(5):
        assert validate(random_z_collection(rng, 6, m=2, n=3)).ok
        assert validate(random_y_collection(rng, 6, m=2, n=2)).ok
        assert validate(random_superfunction(rng, 1, 2, 1)).ok


def test_validate_is_repeatable(rng):
    c = random_z_collection(rng, 5)
    first, second = str(validate(c)), str(validate(c))
    assert first == second
