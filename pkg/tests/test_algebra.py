import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subalg import algebra as A
from subalg import atoms
from subalg.errors import (
    ConditionViolated,
    DegeneratePorts,
    DimensionMismatch,
    NoInverse,
    NotSubspaceOfU,
    PlugNotScalar,
    SingularG,
    SingularT,
    SlotOutOfRange,
)
from subalg.generators import (
    random_matrix,
    random_superfunction,
    random_y_collection,
    random_z_collection,
)
from subalg.solvers import solve_superfunction, solve_y, solve_z
from subalg.spaces import Subspace

from conftest import complex_points, max_err


def Y(c, z):
    return solve_y(c, z).value


def Z(c, z):
    return solve_z(c, z).value


def F(s, z):
    return solve_superfunction(s, z).value


# --- addition -------------------------------------------------------------

@given(st.integers(0, 100_000))
def test_sum_rule(seed):
    rng = np.random.default_rng(seed)
    c1 = random_y_collection(rng, 5, m=2, n=2)
    c2 = random_y_collection(rng, 6, m=2, n=2)
    s1, s2 = random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)
    c = A.add_y(c1, c2, s1, s2)
    z = complex_points(rng, 2, 1)[0]
    want = s1 @ Y(c1, z) @ np.linalg.inv(s1) + s2 @ Y(c2, z) @ np.linalg.inv(s2)
    assert max_err(Y(c, z), want) < 1e-8 * max(1, np.abs(want).max())


def test_sum_of_variables(rng):
    c = A.add_y(atoms.linear_y([1, 0]), atoms.linear_y([0, 1]))
    for z in complex_points(rng, 2, 5):
        assert abs(Y(c, z)[0, 0] - z.sum()) < 1e-10


def test_sum_is_associative_and_commutative(rng):
    a, b, c = (random_y_collection(rng, 4, m=1, n=2) for _ in range(3))
    left = A.add_y(A.add_y(a, b), c)
    right = A.add_y(a, A.add_y(b, c))
    swapped = A.add_y(b, a)
    for z in complex_points(rng, 2, 20):
        assert max_err(Y(left, z), Y(right, z)) < 1e-8
        assert max_err(Y(A.add_y(a, b), z), Y(swapped, z)) < 1e-8


def test_add_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        A.add_y(atoms.linear_y([1.0]), atoms.matrix_linear_y(np.eye(2)))


def test_embed(rng):
    c = random_y_collection(rng, 4, m=1, n=2)
    z = complex_points(rng, 2, 1)[0]
    assert max_err(Y(A.embed(c, 1), z), Y(c, z)) < 1e-12
    big = Y(A.embed(c, 2), z)
    assert max_err(big, np.diag([Y(c, z)[0, 0], 0])) < 1e-10
    full = random_y_collection(rng, 5, m=2, n=2)
    total = Y(A.add_y(A.embed(c, 2), full), z)
    want = Y(full, z) + np.diag([Y(c, z)[0, 0], 0])
    assert max_err(total, want) < 1e-8


# --- multiplication -------------------------------------------------------

@given(st.integers(0, 100_000))
def test_product_rule(seed):
    rng = np.random.default_rng(seed)
    sa = random_superfunction(rng, 1, 2, 1)
    sb = random_superfunction(rng, 1, 2, 1)
    pm = A.PortMaps(random_matrix(rng, 1, 1), random_matrix(rng, 1, 1))
    pr = A.multiply_superfunctions(sa, sb, pm)
    assert pr.base.e.dim == sa.base.e.dim + sb.base.e.dim - 1
    assert pr.base.j.dim == sa.base.j.dim + sb.base.j.dim - 1
    z = complex_points(rng, 1, 1)[0]
    want = F(sa, z) @ np.diag([pm.m_e[0, 0], pm.m_j[0, 0]]) @ F(sb, z)
    assert max_err(F(pr, z), want) < 1e-8 * np.abs(want).max()


def test_default_ports_product(rng):
    sa, sb = random_superfunction(rng, 1, 2, 1), random_superfunction(rng, 1, 3, 1)
    pr = A.multiply_superfunctions(sa, sb, A.PortMaps.default(1))
    z = complex_points(rng, 1, 1)[0]
    want = F(sa, z) @ np.diag([1, -1]) @ F(sb, z)
    assert max_err(F(pr, z), want) < 1e-8 * np.abs(want).max()


def test_identity_superfunction(rng):
    assert max_err(F(A.identity_superfunction(A.PortMaps.default(1)), []), np.diag([1, -1])) < 1e-12
    assert max_err(F(A.identity_superfunction(A.PortMaps([[2.0]], [[-2.0]])), []),
                   np.diag([0.5, -0.5])) < 1e-12
    with pytest.raises(DegeneratePorts):
        A.identity_superfunction(A.PortMaps(np.eye(1), np.eye(1)))


def test_multiplicative_inverse(rng):
    ports = A.PortMaps.default(1)
    for _ in range(5):
        s = random_superfunction(rng, 1, 2, 1)
        inv = A.multiplicative_inverse(s)
        z = complex_points(rng, 1, 1)[0]
        assert max_err(F(A.multiply_superfunctions(s, inv, ports), z), np.diag([1, -1])) < 1e-8
        assert max_err(F(A.multiply_superfunctions(inv, s, ports), z), np.diag([1, -1])) < 1e-8
        again = A.multiplicative_inverse(inv)
        assert max_err(F(again, z), F(s, z)) < 1e-8 * np.abs(F(s, z)).max()


def test_inverse_needs_the_technical_condition():
    with pytest.raises(NoInverse):
        A.multiplicative_inverse(atoms.two_port_superfunction(np.eye(2), -np.eye(2)))


# --- substitution ---------------------------------------------------------

@given(st.integers(0, 100_000), st.integers(0, 1))
def test_substitution_law(seed, slot):
    rng = np.random.default_rng(seed)
    host_z = random_z_collection(rng, 5, m=2, n=2)
    host_y = random_y_collection(rng, 5, m=2, n=2)
    plug = random_z_collection(rng, 4, m=1, n=2)
    z = complex_points(rng, 3, 1)[0]
    zp = Z(plug, z[:2])[0, 0]
    outer = [zp, z[2]] if slot == 0 else [z[2], zp]
    sub_z = A.substitute_into_z(host_z, plug, slot)
    assert max_err(Z(sub_z, z), Z(host_z, outer)) < 1e-8 * max(1, np.abs(Z(host_z, outer)).max())
    sub_y = A.substitute_into_y(host_y, plug, slot)
    assert max_err(Y(sub_y, z), Y(host_y, outer)) < 1e-8 * max(1, np.abs(Y(host_y, outer)).max())


def test_substitution_examples(rng):
    host = atoms.linear_y([1.0])
    same = A.substitute_into_y(host, atoms.single_phase_z(1), 0)
    sq = A.substitute_into_y(host, atoms.square_z(), 0)
    avg = A.substitute_into_z(atoms.weighted_average_z(0.25), atoms.square_z(), 0)
    for z in complex_points(rng, 3, 5):
        assert abs(Y(same, z[:1])[0, 0] - z[0]) < 1e-10
        assert abs(Y(sq, z[:2])[0, 0] - z[0] ** 2 / z[1]) < 1e-10
        assert abs(Z(avg, z)[0, 0] - (0.25 * z[0] ** 2 / z[1] + 0.75 * z[2])) < 1e-10


def test_substitution_errors():
    with pytest.raises(SlotOutOfRange):
        A.substitute_into_z(atoms.square_z(), atoms.square_z(), 5)
    with pytest.raises(PlugNotScalar):
        A.substitute_into_z(atoms.square_z(), atoms.single_phase_z(2), 0)


# --- duality, merge, projection -------------------------------------------

@given(st.integers(0, 100_000))
def test_duality_law(seed):
    rng = np.random.default_rng(seed)
    y = random_y_collection(rng, 5, m=2, n=2)
    c = random_z_collection(rng, 6, m=2, n=2)
    z = complex_points(rng, 2, 1)[0]
    assert max_err(Y(A.duality(y), z) @ Y(y, 1 / z), np.eye(2)) < 1e-8
    assert max_err(Z(A.duality(c), z) @ Z(c, 1 / z), np.eye(2)) < 1e-8


def test_duality_examples(rng):
    c = random_z_collection(rng, 5, m=1, n=2)
    twice = A.duality(A.duality(c))
    assert twice.u == c.u and twice.e == c.e and twice.j == c.j
    assert all(a == b for a, b in zip(twice.phases, c.phases))
    avg, sq = A.duality(atoms.weighted_average_z(0.4)), A.duality(atoms.square_z())
    for z in complex_points(rng, 2, 5):
        assert abs(Z(avg, z)[0, 0] - 1 / (0.4 / z[0] + 0.6 / z[1])) < 1e-10
        assert abs(Z(sq, z)[0, 0] - z[0] ** 2 / z[1]) < 1e-10


def test_merge_phases(rng):
    c = random_z_collection(rng, 7, m=1, n=3)
    once = A.merge_phases(c, 0, 1)
    all3 = A.merge_phases(once, 0, 1)
    for z in complex_points(rng, 1, 5):
        x = z[0]
        assert max_err(Z(once, [x, 1.3]), Z(c, [x, x, 1.3])) < 1e-8
        assert max_err(Z(all3, [x]), x * np.eye(1)) < 1e-8
    with pytest.raises(ConditionViolated):
        A.merge_phases(c, 1, 1)


def test_merge_of_product_gives_square(rng):
    m = A.merge_phases(atoms.product_z(), 0, 1)
    for z in complex_points(rng, 2, 5):
        assert abs(Z(m, z)[0, 0] - z[0] ** 2 / z[1]) < 1e-10


def test_project_u(rng):
    c = random_z_collection(rng, 7, m=2, n=2)
    first = A.project_u(c, Subspace(c.u.frame[:, [0]]))
    same = A.project_u(c, c.u)
    for z in complex_points(rng, 2, 5):
        assert abs(Z(first, z)[0, 0] - Z(c, z)[0, 0]) < 1e-8
        assert max_err(Z(same, z), Z(c, z)) < 1e-8
    with pytest.raises(NotSubspaceOfU):
        A.project_u(atoms.square_z(), Subspace(np.eye(3)[:, [1]]))


# --- extension, reference transforms, basis change ------------------------

def test_extension(rng):
    c1 = random_z_collection(rng, 5, m=1, n=2)
    c2 = random_z_collection(rng, 6, m=2, n=2)
    t = random_matrix(rng, 2, 2)
    for z in complex_points(rng, 2, 5):
        assert max_err(Y(A.extension(c1, np.eye(1)), z), Z(c1, z)) < 1e-8
        assert max_err(Y(A.extension(c2, 2 * np.eye(2)), z), Z(c2, z)) < 1e-8
        assert max_err(Y(A.extension(c2, t), z), Z(c2, z)) < 1e-8
    with pytest.raises(SingularT):
        A.extension(c1, np.zeros((1, 1)))


@given(st.integers(0, 100_000))
def test_reference_scaling_law(seed):
    rng = np.random.default_rng(seed)
    c = random_y_collection(rng, 5, m=2, n=2)
    ce = rng.standard_normal(2) + 1j
    cj = rng.standard_normal(2) - 0.5j
    rt = A.reference_transform(c, A.ScalingVector(ce, cj))
    z = complex_points(rng, 2, 1)[0]
    want = Y(c, z * ce / cj)
    assert max_err(Y(rt, z), want) < 1e-8 * max(1, np.abs(want).max())


def test_reference_examples(rng):
    c = random_y_collection(rng, 5, m=2, n=2)
    same = A.reference_transform(c, A.ScalingVector([2, 3j], [2, 3j]))
    lin = A.reference_transform(atoms.linear_y([1, 0]), A.ScalingVector([2, 1], [1, 1]))
    for z in complex_points(rng, 2, 5):
        assert max_err(Y(same, z), Y(c, z)) < 1e-9
        assert abs(Y(lin, z)[0, 0] - 2 * z[0]) < 1e-10


def test_additive_inverse(rng):
    for _ in range(5):
        c = random_y_collection(rng, 5, m=2, n=2)
        inv = A.additive_inverse(c)
        total = A.add_y(c, inv)
        for z in complex_points(rng, 2, 4):
            assert max_err(Y(inv, z), -Y(c, z)) < 1e-8
            assert np.abs(Y(total, z)).max() < 1e-8


def test_basis_change(rng):
    c = random_z_collection(rng, 6, m=2, n=2)
    y = random_y_collection(rng, 5, m=1, n=2)
    perm = np.eye(6)[::-1]
    for _ in range(5):
        g = random_matrix(rng, 6, 6)
        z = complex_points(rng, 2, 1)[0]
        assert max_err(Z(A.basis_change(c, g), z), Z(c, z)) < 1e-9 * max(1, np.abs(Z(c, z)).max())
        assert max_err(Z(A.basis_change(c, perm), z), Z(c, z)) < 1e-9 * max(1, np.abs(Z(c, z)).max())
        gy = random_matrix(rng, 5, 5)
        assert max_err(Y(A.basis_change(y, gy), z), Y(y, z)) < 1e-9 * max(1, np.abs(Y(y, z)).max())
    same = A.basis_change(c, np.eye(6))
    assert same.u == c.u and same.e == c.e
    with pytest.raises(SingularG):
        A.basis_change(c, np.zeros((6, 6)))
