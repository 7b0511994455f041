"""One test per acceptance criterion."""

import math
import time

import numpy as np

from subalg import algebra as A
from subalg import atoms
from subalg.errors import AssumptionViolated
from subalg.generators import (
    random_matrix,
    random_multirational,
    random_orthogonal_z_collection,
    random_superfunction,
    random_y_collection,
    random_z_collection,
)
from subalg.hexmap import GridSpec, hex_coords, pole_counts, pole_trajectory
from subalg.numcore import rank
from subalg.ratfunc import (
    MultiPoly,
    OneVarParams,
    canonical_collection,
    coefficient_count,
    count_exponents,
    det_polynomial,
    extract_pq,
    nonuniqueness_collection,
    nonuniqueness_demo,
    partner_gamma3,
    recover_1var,
)
from subalg.ratfunc.realize import product_by_squares, realize_scalar, variable
from subalg.reduction import (
    continued_fraction,
    evaluate_expansion,
    normalize_y,
    prune_inequalities,
    prune_z,
    reconstruct_z,
    reduce_z,
)
from subalg.solvers import solve_superfunction, solve_y, solve_z

from conftest import complex_points, max_err, pad_z


def Z(c, z, **kw):
    return solve_z(c, z, **kw).value


def Y(c, z, **kw):
    return solve_y(c, z, **kw).value


def F(s, z):
    return solve_superfunction(s, z).value


def rel(a, b):
    return max_err(a, b) / max(1.0, float(np.abs(b).max()))


def test_criterion_01_normalization_identity():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 3))
        c = random_z_collection(rng, int(rng.integers(n + m, 11)), m=m, n=n)
        assert c.validate().ok
        worst = max(worst, max_err(Z(c, np.ones(n)), np.eye(m)))
    assert worst < 1e-9
    assert time.perf_counter() - start < 5


def test_criterion_02_golden_scalar_functions():
    rng = np.random.default_rng(2)
    sq, avg, aff = atoms.square_z(), atoms.weighted_average_z(0.35), atoms.affine_z(0.35)
    for z in complex_points(rng, 2, 20):
        assert abs(Z(sq, z)[0, 0] - z[0] ** 2 / z[1]) < 1e-9
        want = 0.35 * z[0] + 0.65 * z[1]
        assert abs(Z(avg, z)[0, 0] - want) < 1e-9
        assert abs(Z(aff, z)[0, 0] - want) < 1e-9


def test_criterion_03_direct_and_shifted_agree():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        c = random_z_collection(rng, int(rng.integers(n + 2, 11)), m=2, n=n)
        y = random_y_collection(rng, int(rng.integers(n + 2, 11)), m=2, n=n)
        z = complex_points(rng, n, 1, lo=0.8, hi=1.25)[0]
        assert rel(Z(c, z, method="direct"), Z(c, z, method="shifted", z0=1.0)) < 1e-8
        assert rel(Y(y, z, method="direct"), Y(y, z, method="shifted", z0=1.0)) < 1e-8


def test_criterion_04_realization_compiler():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    for i in range(50):
        r = random_multirational(rng, int(rng.integers(1, 4)), int(rng.integers(1, 5)))
        cert = realize_scalar(r, seed=i)
        assert cert.passed and cert.max_residual < 1e-7
    lab = product_by_squares(variable(0), variable(1), 2)
    for z1 in range(-3, 4):
        for z2 in range(-3, 4):
            z = [float((z1, z2, 1)[v]) for v in lab.labels]
            assert abs(Z(lab.collection, z)[0, 0] - z1 * z2) < 1e-9
    assert time.perf_counter() - start < 60


def test_criterion_05_algebra_laws():
    rng = np.random.default_rng(5)
    for _ in range(20):
        sa, sb = random_superfunction(rng, 1, 2, 1), random_superfunction(rng, 1, 2, 1)
        pm = A.PortMaps(random_matrix(rng, 1, 1), random_matrix(rng, 1, 1))
        prod = A.multiply_superfunctions(sa, sb, pm)
        y1, y2 = random_y_collection(rng, 5, m=2, n=2), random_y_collection(rng, 6, m=2, n=2)
        total = A.add_y(y1, y2)
        host, plug = random_z_collection(rng, 5, m=2, n=2), random_z_collection(rng, 4, m=1, n=2)
        sub = A.substitute_into_z(host, plug, 0)
        dual = A.duality(y1)
        ce, cj = rng.standard_normal(2) + 1j, rng.standard_normal(2) - 0.5j
        scaled = A.reference_transform(y1, A.ScalingVector(ce, cj))
        for z in complex_points(rng, 3, 20):
            w = z[:2]
            want = F(sa, z[:1]) @ np.diag([pm.m_e[0, 0], pm.m_j[0, 0]]) @ F(sb, z[:1])
            assert rel(F(prod, z[:1]), want) < 1e-8
            assert rel(Y(total, w), Y(y1, w) + Y(y2, w)) < 1e-8
            outer = [Z(plug, z[:2])[0, 0], z[2]]
            assert rel(Z(sub, z), Z(host, outer)) < 1e-8
            assert rel(Y(dual, w), np.linalg.inv(Y(y1, 1 / w))) < 1e-8
            assert rel(Y(scaled, w), Y(y1, w * ce / cj)) < 1e-8


def test_criterion_06_identity_elements():
    rng = np.random.default_rng(6)
    ports = A.PortMaps(random_matrix(rng, 1, 1), random_matrix(rng, 1, 1))
    ident = A.identity_superfunction(ports)
    for _ in range(10):
        s = random_superfunction(rng, 1, 2, 1)
        y = random_y_collection(rng, 5, m=2, n=2)
        right = A.multiply_superfunctions(s, ident, ports)
        left = A.multiply_superfunctions(ident, s, ports)
        plus_zero = A.add_y(y, A.additive_zero(2))
        cancel = A.add_y(y, A.additive_inverse(y))
        for z in complex_points(rng, 2, 5):
            assert rel(F(right, z[:1]), F(s, z[:1])) < 1e-9
            assert rel(F(left, z[:1]), F(s, z[:1])) < 1e-9
            assert rel(Y(plus_zero, z), Y(y, z)) < 1e-9
            assert np.abs(Y(cancel, z)).max() < 1e-8


def test_criterion_07_pruning():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        base, _ = prune_z(random_z_collection(rng, int(rng.integers(n + 1, 8)), m=1, n=n))
        padded = pad_z(base, int(rng.integers(1, 4)), rng)
        out, rep = prune_z(padded)
        assert rep.ok and all(chk.passed for chk in prune_inequalities(out))
        assert out.ambient_dim == base.ambient_dim
        for z in complex_points(rng, n, 3):
            assert rel(Z(out, z), Z(padded, z)) < 1e-8


def test_criterion_08_extraction():
    rng = np.random.default_rng(8)
    for _ in range(20):
        c, _ = prune_z(random_z_collection(rng, int(rng.integers(3, 8)), m=1, n=3))
        r = extract_pq(c)
        assert (r.p.degree, r.q.degree) == (1 + c.e.dim, c.e.dim)
        assert abs(r.p.coefficient_sum() - 1) < 1e-9
        assert abs(r.q.coefficient_sum() - 1) < 1e-9
    m1 = np.array([[0, 0, 0], [1, 1, 1], [0, 1, 1]], dtype=float)
    d = det_polynomial([m1, np.eye(3) - m1], bounds=[3, 3])
    z1, z2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    diff = d - z2 * z2 * (z1 * 2.0 - z2)
    assert max((abs(v) for v in diff.terms.values()), default=0.0) < 1e-12
    assert d.degree_in(0) == 1 and rank(m1) == 2


def test_criterion_09_one_variable_recovery():
    rng = np.random.default_rng(9)
    for parity in ("even", "odd"):
        for d in range(1 if parity == "even" else 2, 6):
            g = tuple(rng.standard_normal(d - 1) + 1j * rng.standard_normal(d - 1))
            k = d if parity == "even" else d - 1
            dl = tuple(rng.standard_normal(k) + 1j * rng.standard_normal(k))
            params = OneVarParams(parity, g, dl)
            r = extract_pq(prune_z(canonical_collection(params))[0])
            got = recover_1var(r, parity, d)
            assert np.abs(np.array(got.gammas) - g).max(initial=0) < 1e-8
            assert np.abs(np.array(got.deltas) - dl).max() < 1e-8


def test_criterion_10_counting():
    start = time.perf_counter()
    checked = 0
    for h in range(1, 9):
        for q1 in range(h):
            q2 = h - 1 - q1
            for p1 in range(h + 1):
                for p2 in range(h + 1 - p1):
                    p = (p1, p2, h - p1 - p2)
                    if max(p) > 1 + min(q1, q2) or q1 > 2 * (1 + q2) or q2 > 2 * (1 + q1):
                        continue
                    k1, k2 = coefficient_count(*p, q1, q2)
                    assert (k1 + 1, k2 + 1) == (count_exponents(p, 1 + q1), count_exponents(p, 1 + q2))
                    checked += 1
    assert checked > 0
    assert sum(coefficient_count(1, 1, 3, 2, 2)) == 6
    assert time.perf_counter() - start < 5


def test_criterion_11_nonuniqueness():
    rng = np.random.default_rng(11)
    g2, g3, d1, d2 = 0.7, -1.3, 0.4, 0.9
    r, roots = nonuniqueness_demo(g2, g3, d1, d2)
    assert abs(roots[0] - roots[1]) > 1e-3
    t2 = g3 * d1 + g2 * d2
    cols = [nonuniqueness_collection(0, x, partner_gamma3(x, t2, d1, d2), 0, d1, d2) for x in roots]
    for z in complex_points(rng, 3, 20):
        a, b = Z(cols[0], z)[0, 0], Z(cols[1], z)[0, 0]
        assert abs(a - b) < 1e-8 * max(1, abs(a))
        assert abs(a - r(z)) < 1e-8 * max(1, abs(a))


def test_criterion_12_normalization_and_reduction():
    rng = np.random.default_rng(12)
    for _ in range(10):
        zc = random_z_collection(rng, 7, m=2, n=3)
        ext = A.extension(zc, random_matrix(rng, 2, 2))
        _, m_mat, k_mat = normalize_y(ext)
        assert max_err(Y(ext, np.ones(3)), m_mat @ k_mat) < 1e-9
    for _ in range(10):
        c, _ = prune_z(random_z_collection(rng, 7, m=1, n=2))
        y, w = reduce_z(c)
        cf = continued_fraction(c)
        assert cf.stop_reason == "exhausted"
        for z in complex_points(rng, 2, 5):
            if y.k > y.m:
                y_v = Y(y, z)
            else:
                y_v = np.zeros((y.m, y.m)) if y.j.dim == 0 else None
            assert rel(reconstruct_z(w, y_v, z), Z(c, z)) < 1e-8
            assert rel(evaluate_expansion(cf, z), Z(c, z)) < 1e-7
    done = 0
    while done < 5:
        c, _ = prune_z(random_z_collection(rng, 9, m=2, n=3))
        try:
            _, w = reduce_z(c)
        except AssumptionViolated:
            continue
        done += 1
        step = 1e-5
        for i in range(2):
            zp, zm = np.ones(3, complex), np.ones(3, complex)
            zp[i] += step
            zm[i] -= step
            assert max_err((Z(c, zp) - Z(c, zm)) / (2 * step), w[i].T) < 1e-6


def test_criterion_13_hexmap():
    origin = hex_coords((-2.0, 2.0, 2.0))
    assert (origin.x, origin.y) == (0.0, 0.0)
    p = hex_coords((-1.0, 2.0, 1.0))
    assert abs(p.x + 0.5) < 1e-12 and abs(p.y + 1 / (2 * math.sqrt(3))) < 1e-12
    rng = np.random.default_rng(13)
    corpus = 0
    while corpus < 20:
        c, _ = prune_z(random_orthogonal_z_collection(rng, int(rng.integers(3, 10))))
        if c.n != 3 or any(ph.dim == 0 for ph in c.phases):
            continue
        counts = pole_counts(pole_trajectory(c, GridSpec(count=9)))
        assert all(counts[i + 1] <= c.phases[i].dim for i in range(3))
        corpus += 1
