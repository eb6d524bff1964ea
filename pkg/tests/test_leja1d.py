import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lejagrid import leja1d as lj
from lejagrid import orthopoly as op
from oracles import brute_force_leja, moments


def _zero(z):
    return np.zeros_like(z)


def _log_jacobi_1_2(z):
    with np.errstate(divide="ignore"):
        return 0.5 * np.log1p(-z) + np.log1p(z)


# canonical log square-root weights written out independently of the library
BRUTE = {
    "uniform": (op.uniform(), _zero, _zero, -1.0, 1.0),
    "jacobi(1,2)": (op.jacobi(1, 2),
                    _log_jacobi_1_2,
                    lambda z: -0.5 / (1 - z) + 1 / (1 + z), -1.0, 1.0),
    "gaussian": (op.hermite(), lambda z: -z**2 / 2, lambda z: -z, -10.0, 10.0),
    "freud4": (op.hermite(4, 0.0), lambda z: -z**4 / 2, lambda z: -2 * z**3, -5.0, 5.0),
    "laguerre": (op.laguerre(), lambda z: -z / 2, lambda z: np.full_like(z, -0.5), 0.0, 120.0),
}


@pytest.mark.parametrize("name", sorted(BRUTE))
def test_nodes_match_brute_force_maximizer(name):
    spec, log_v, dlog_v, lo, hi = BRUTE[name]
    N = 10
    ref = brute_force_leja(log_v, dlog_v, lo, hi, N)
    got = lj.build_sequence(spec, N).canonical
    np.testing.assert_allclose(got, ref, atol=1e-8)


def test_first_uniform_nodes():
    z = lj.build_sequence(op.uniform(), 4).nodes
    np.testing.assert_allclose(z, [0, 1, -1, 1 / math.sqrt(3)], atol=1e-14)


def test_symmetric_tie_goes_to_nonnegative():
    z = lj.build_sequence(op.hermite(), 2).canonical
    assert z[0] == 0 and z[1] > 0


def test_sequence_is_nested_and_resumable():
    spec = op.jacobi(0.5, -0.3)
    full = lj.build_sequence(spec, 20)
    head = lj.build_sequence(spec, 9)
    np.testing.assert_array_equal(full.canonical[:9], head.canonical)
    np.testing.assert_array_equal(lj.build_sequence(spec, 20, head).canonical, full.canonical)
    np.testing.assert_array_equal(full.prefix(9).canonical, head.canonical)


def test_affine_map_of_nodes():
    ref = lj.build_sequence(op.uniform(), 8).nodes
    got = lj.build_sequence(op.uniform(2, 6), 8).nodes
    np.testing.assert_allclose(got, 2 * ref + 4, rtol=1e-15)
    g = lj.build_sequence(op.gaussian(1.0, 0.5), 6).nodes
    np.testing.assert_allclose(g, 1.0 + 0.5 * math.sqrt(2) * lj.build_sequence(op.hermite(), 6).nodes,
                               rtol=1e-15)


def test_next_point_of_empty_sequence():
    seq = lj.LejaSequence(op.laguerre(2.0), np.array([]))
    # argmax of z^s exp(-z), square-rooted, is z = s
    assert lj.next_leja_point(seq) == pytest.approx(2.0, rel=1e-13)


def test_construction_errors():
    with pytest.raises(ValueError):
        lj.build_sequence(op.uniform(), 0)
    with pytest.raises(ValueError):
        lj.LejaSequence(op.uniform(), np.array([0.0, 0.0]))


def _newton_interpolant(x, y, t):
    c = np.array(y, dtype=float)
    for j in range(1, len(x)):
        c[j:] = (c[j:] - c[j - 1:-1]) / (x[j:] - x[:-j])
    out = np.full_like(t, c[-1])
    for j in range(len(x) - 2, -1, -1):
        out = out * (t - x[j]) + c[j]
    return out


@pytest.mark.parametrize("spec", [op.uniform(), op.hermite(), op.laguerre(0.5)])
def test_barycentric_matches_newton_form(spec):
    seq = lj.build_sequence(spec, 12)
    x = np.asarray(seq.nodes)
    y = np.cos(0.3 * x)
    t = np.linspace(x.min(), x.max(), 41)
    np.testing.assert_allclose(seq.interpolate(y, t), _newton_interpolant(x, y, t), rtol=1e-9, atol=1e-9)


def test_interpolation_reproduces_polynomials_and_data():
    seq = lj.build_sequence(op.jacobi(2, 1), 9)
    p = np.polynomial.Polynomial([0.3, -1, 2, 0.5, 0, 1, -2, 0.25, 1])
    t = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(seq.interpolate(p(seq.nodes), t), p(t), atol=1e-12)
    np.testing.assert_array_equal(seq.interpolate(p(seq.nodes), seq.nodes), p(seq.nodes))
    assert isinstance(seq.interpolate(p(seq.nodes), 0.1), float)
    with pytest.raises(ValueError):
        seq.interpolate(np.ones(3), t)


def test_weighted_barycentric_weights_scaled():
    seq = lj.build_sequence(op.hermite(), 30)
    b = seq.barycentric
    assert np.max(np.abs(b)) == 1 and np.all(np.isfinite(b))
    # weighted weights are b_n / v(z_n) up to a common factor
    plain = lj.classical_barycentric(seq.nodes)
    ratio = b / (plain / np.exp(-seq.canonical**2 / 2))
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)


def test_lagrange_basis_partition_of_unity():
    nodes = lj.build_sequence(op.uniform(), 15).nodes
    L = lj.lagrange_basis(nodes, np.linspace(-1, 1, 57))
    np.testing.assert_allclose(L.sum(axis=1), 1, atol=1e-12)
    np.testing.assert_allclose(lj.lagrange_basis(nodes, nodes), np.eye(15), atol=0)


def test_quadrature_weights_three_uniform_nodes():
    seq = lj.build_sequence(op.uniform(), 3)
    np.testing.assert_allclose(seq.quadrature_weights(), [2 / 3, 1 / 6, 1 / 6], atol=1e-14)


@pytest.mark.parametrize("family, params, spec", [
    ("jacobi", {}, op.uniform()),
    ("jacobi", dict(alpha=1.0, beta=2.0), op.jacobi(1, 2)),
    ("hermite", {}, op.hermite()),
    ("hermite", dict(exponent=3.0, mu=0.2), op.hermite(3, 0.2)),
    ("laguerre", dict(s=0.5), op.laguerre(0.5)),
])
def test_quadrature_exact_for_interpolated_degree(family, params, spec):
    N = 10
    seq = lj.build_sequence(spec, N)
    w = seq.quadrature_weights()
    mom = [float(m) for m in moments(family, N - 1, **params)]
    z = seq.canonical
    for k, m in enumerate(mom):
        terms = w * z**k
        assert terms.sum() == pytest.approx(m, rel=1e-10, abs=1e-12 * np.abs(terms).sum())


@pytest.mark.parametrize("spec", [op.uniform(), op.jacobi(-0.5, -0.5), op.hermite(), op.laguerre()])
def test_quadrature_sums_and_condition(spec):
    seq = lj.build_sequence(spec, 50)
    for n in range(1, 51):
        w = seq.quadrature_weights(n)
        assert abs(w.sum() - 1) <= 1e-12
        assert lj.condition_number(w) < 3


def test_condition_number_errors():
    assert lj.condition_number([0.5, 0.5]) == 1
    assert lj.condition_number([1.5, -0.5]) == 2
    with pytest.raises(ValueError):
        lj.condition_number([])
    with pytest.raises(ZeroDivisionError):
        lj.condition_number([1.0, -1.0])


@pytest.mark.parametrize("level", range(0, 6))
def test_clenshaw_curtis_nested_exactness(level):
    x = lj.clenshaw_curtis_nodes(level)
    w = lj.clenshaw_curtis_weights(x.size)
    assert w.sum() == pytest.approx(1, abs=1e-14)
    for k in range(x.size):
        exact = 0.0 if k % 2 else 1.0 / (k + 1)
        assert np.dot(w, x**k) == pytest.approx(exact, abs=1e-13)
    if level:
        assert set(lj.clenshaw_curtis_nodes(level - 1)) <= set(x)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 40))
def test_clenshaw_curtis_weights_any_size(N):
    w = lj.clenshaw_curtis_weights(N)
    assert w.size == N and np.all(w > 0) and w.sum() == pytest.approx(1, abs=1e-13)
    np.testing.assert_allclose(w, w[::-1], atol=1e-15)


def test_growth_counts():
    assert [lj.growth_count("linear", l) for l in range(4)] == [1, 2, 3, 4]
    assert [lj.growth_count("doubling", l) for l in range(5)] == [1, 3, 5, 9, 17]
    assert lj.growth_count("linear", -1) == 0
    with pytest.raises(ValueError):
        lj.growth_count("tripling", 1)


def test_rules_and_roundtrip():
    rule = lj.LejaRule(op.hermite(), "doubling")
    assert rule.num_points(2) == 5 and list(rule.new_indices(2)) == [3, 4]
    assert rule.level_of(0) == 0 and rule.level_of(4) == 2 and rule.level_of(5) == 3
    again = lj.rule_from_dict(rule.to_dict(9))
    np.testing.assert_array_equal(again.nodes(9), rule.nodes(9))
    np.testing.assert_array_equal(again.nodes(12), rule.nodes(12))

    cc = lj.ClenshawCurtisRule(op.uniform(0, 2))
    np.testing.assert_allclose(cc.nodes(5), [1, 0, 2, 1 - math.sqrt(0.5), 1 + math.sqrt(0.5)], atol=1e-15)
    np.testing.assert_array_equal(lj.rule_from_dict(cc.to_dict(5)).nodes(5), cc.nodes(5))
    with pytest.raises(ValueError):
        lj.ClenshawCurtisRule(op.hermite())
    with pytest.raises(ValueError):
        lj.make_rule("gauss", op.uniform())


def test_csv_roundtrip_full_precision():
    spec = op.laguerre(1.0)
    seq = lj.build_sequence(spec, 7)
    text = lj.sequence_to_csv(seq, condition=True)
    lines = text.splitlines()
    assert lines[0] == "node,barycentric_weight,quadrature_weight,condition_number"
    assert len(lines) == 8 and "\r" not in text
    assert float(lines[1].split(",")[3]) == 1.0
    back = lj.sequence_from_csv(io.StringIO(text), spec)
    np.testing.assert_array_equal(back.nodes, seq.nodes)
