import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subalg import atoms
from subalg.errors import (
    DegenerateQuadratic,
    DegreeMismatch,
    DimensionConstraintViolated,
    NotExpressible,
    NotPruned,
    UNotScalar,
)
from subalg.generators import random_z_collection
from subalg.numcore import rank
from subalg.ratfunc import (
    MultiPoly,
    MultiRational,
    OneVarParams,
    canonical_collection,
    coefficient_count,
    count_exponents,
    denominator_from_j,
    det_polynomial,
    extract_pq,
    functions_agree,
    nonuniqueness_collection,
    nonuniqueness_demo,
    nonuniqueness_z,
    onevar_z,
    partner_gamma3,
    recover_1var,
)
from subalg.reduction import prune_z
from subalg.solvers import solve_z

from conftest import complex_points

M1 = np.array([[0, 0, 0], [1, 1, 1], [0, 1, 1]], dtype=float)


# --- extraction -----------------------------------------------------------

@given(st.integers(0, 100_000))
def test_extract_degrees_and_values(seed):
    rng = np.random.default_rng(seed)
    c, _ = prune_z(random_z_collection(rng, int(rng.integers(3, 8)), m=1, n=int(rng.integers(2, 4))))
    r = extract_pq(c)
    q1 = c.e.dim
    assert r.p.degree == 1 + q1 and r.q.degree == q1
    assert abs(r.p.coefficient_sum() - 1) < 1e-9 and abs(r.q.coefficient_sum() - 1) < 1e-9
    dims = [ph.dim for ph in c.phases]
    for exps in r.p.terms:
        assert all(a <= p for a, p in zip(exps, dims))
    for z in complex_points(rng, c.n, 20):
        want = solve_z(c, z).value[0, 0]
        assert abs(r(z) - want) < 1e-7 * max(1, abs(want))


def test_extract_square_collection():
    r = extract_pq(atoms.square_z())
    assert functions_agree(r, MultiRational.from_polys(
        MultiPoly.variable(2, 0) ** 2, MultiPoly.variable(2, 1)), 2)


def test_denominator_from_j_agrees(rng):
    for _ in range(5):
        c, _ = prune_z(random_z_collection(rng, 6, m=1, n=3))
        q = extract_pq(c).q
        qj = denominator_from_j(c)
        z = complex_points(rng, 3, 1)[0]
        ratio = qj(z) / q(z)
        for w in complex_points(rng, 3, 5):
            assert abs(qj(w) - ratio * q(w)) < 1e-8 * max(1, abs(qj(w)))


def test_extract_preconditions(rng):
    with pytest.raises(UNotScalar):
        extract_pq(prune_z(random_z_collection(rng, 6, m=2, n=2))[0])
    c, _ = prune_z(random_z_collection(rng, 5, m=1, n=2))
    from conftest import pad_z
    with pytest.raises(NotPruned):
        extract_pq(pad_z(c, 2, rng))


def test_rank_caveat():
    d = det_polynomial([M1, np.eye(3) - M1], bounds=[3, 3])
    z1, z2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    want = z2 * z2 * (z1 * 2.0 - z2)
    diff = d - want
    assert max((abs(c) for c in diff.terms.values()), default=0.0) < 1e-12
    assert d.degree_in(0) == 1
    assert rank(M1) == 2


# --- one variable ---------------------------------------------------------

def _random_params(rng, parity, d):
    g = tuple(rng.standard_normal(d - 1) + 1j * rng.standard_normal(d - 1))
    k = d if parity == "even" else d - 1
    dl = tuple(rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return OneVarParams(parity, g, dl)


def _as_rational(c):
    return extract_pq(prune_z(c)[0])


@pytest.mark.parametrize("parity", ["even", "odd"])
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_onevar_roundtrip(parity, d):
    rng = np.random.default_rng(100 * d + len(parity))
    params = _random_params(rng, parity, d)
    c = canonical_collection(params)
    assert c.ambient_dim == params.h
    for z in complex_points(rng, 1, 5):
        assert abs(solve_z(c, [z[0], 1]).value[0, 0] - onevar_z(params, z[0])) < 1e-8
    got = recover_1var(_as_rational(c), parity, d)
    assert np.abs(np.array(got.gammas) - params.gammas).max() < 1e-8
    assert np.abs(np.array(got.deltas) - params.deltas).max() < 1e-8


def test_onevar_affine_case():
    t0 = 0.3 - 0.2j
    params = OneVarParams("even", (), (t0,))
    for z1 in (0.5, 2 + 1j):
        assert abs(onevar_z(params, z1) - (1 - t0 * (1 - z1))) < 1e-14
    got = recover_1var(_as_rational(canonical_collection(params)), "even", 1)
    assert got.gammas == () and abs(got.deltas[0] - t0) < 1e-12


def test_onevar_errors():
    with pytest.raises(DegreeMismatch):
        recover_1var(extract_pq(atoms.square_z()), "even", 1)
    z1, z2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    scaled = MultiRational(z1, MultiPoly.constant(2), 2.0)
    with pytest.raises(NotExpressible):
        recover_1var(scaled, "even", 1)


# --- counting -------------------------------------------------------------

def _admissible(h):
    for q1 in range(h):
        q2 = h - 1 - q1
        for p1 in range(h + 1):
            for p2 in range(h + 1 - p1):
                p3 = h - p1 - p2
                p = (p1, p2, p3)
                if max(p) > 1 + min(q1, q2) or q1 > 2 * (1 + q2) or q2 > 2 * (1 + q1):
                    continue
                yield p, q1, q2


def test_counting_matches_enumeration():
    seen = 0
    for h in range(1, 9):
        for p, q1, q2 in _admissible(h):
            k1, k2 = coefficient_count(*p, q1, q2)
            assert k1 + 1 == count_exponents(p, 1 + q1)
            assert k2 + 1 == count_exponents(p, 1 + q2)
            assert k1 + k2 == h * h - sum(x * x for x in p) - q1 * q1 - q2 * q2
            seen += 1
    assert seen > 50


def test_counting_example_and_errors():
    k1, k2 = coefficient_count(1, 1, 3, 2, 2)
    assert k1 + k2 == 6
    with pytest.raises(DimensionConstraintViolated):
        coefficient_count(1, 1, 1, 2, 2)


# --- non-uniqueness -------------------------------------------------------

def test_nonuniqueness_collection_matches_formula(rng):
    g2, g3, d1, d2 = 0.7, -1.3, 0.4, 0.9
    c = nonuniqueness_collection(0, g2, g3, 0, d1, d2)
    r = nonuniqueness_z(g2, g3, d1, d2)
    for z in complex_points(rng, 3, 20):
        assert abs(solve_z(c, z).value[0, 0] - r(z)) < 1e-8 * max(1, abs(r(z)))


def test_nonuniqueness_roots_give_same_z(rng):
    g2, g3, d1, d2 = 0.7, -1.3, 0.4, 0.9
    r, roots = nonuniqueness_demo(g2, g3, d1, d2)
    assert min(abs(x - g2) for x in roots) < 1e-12
    t2 = g3 * d1 + g2 * d2
    for root in roots:
        c = nonuniqueness_collection(0, root, partner_gamma3(root, t2, d1, d2), 0, d1, d2)
        for z in complex_points(rng, 3, 20):
            assert abs(solve_z(c, z).value[0, 0] - r(z)) < 1e-8 * max(1, abs(r(z)))


def test_nonuniqueness_special_cases():
    _, roots = nonuniqueness_demo(0.5, 0.0, 0.3, 0.8)
    assert min(abs(x) for x in roots) < 1e-14
    # γ2δ2 = γ3δ1 gives a double root
    with pytest.raises(DegenerateQuadratic) as err:
        nonuniqueness_demo(0.6, 0.6 * 0.8 / 0.3, 0.3, 0.8)
    assert abs(err.value.root - 0.6) < 1e-6
    with pytest.raises(DimensionConstraintViolated):
        nonuniqueness_demo(1.0, 1.0, 1.0, 0.0)
