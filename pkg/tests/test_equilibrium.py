import math

import numpy as np
import pytest
from scipy.integrate import quad

from lejagrid import equilibrium as eq
from lejagrid import leja1d as lj
from lejagrid import orthopoly as op


@pytest.mark.parametrize("alpha", [1, 2, 3, 4, 5, 6])
def test_tabulated_hermite_density_matches_integral_form(alpha):
    b = eq.hermite_support_radius(alpha)
    t = np.array([0.01, 0.2, 0.5, 0.77, 0.99]) * b
    np.testing.assert_allclose(eq._hermite_pdf_closed(alpha, t, b),
                               eq._hermite_pdf_numeric(alpha, t, b), rtol=1e-10)


def test_support_radii():
    assert eq.hermite_support_radius(2) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert eq.hermite_support_radius(1) == pytest.approx(math.pi, rel=1e-15)
    assert eq.EquilibriumLaw("laguerre").support == (0.0, 4.0)


LAWS = [eq.EquilibriumLaw("jacobi"), eq.EquilibriumLaw("laguerre")] + \
    [eq.EquilibriumLaw("hermite", a) for a in (1, 1.5, 2, 2.5, 4, 6)]


@pytest.mark.parametrize("law", LAWS, ids=lambda l: f"{l.family}-{l.alpha}")
def test_density_normalized_and_cdf_consistent(law):
    lo, hi = law.support
    mid = 0.5 * (lo + hi)
    total = sum(quad(lambda s: float(law.pdf(s)), a, b, limit=200)[0] for a, b in [(lo, mid), (mid, hi)])
    assert total == pytest.approx(1, abs=1e-8)
    s = lo + (hi - lo) * np.array([0.03, 0.2, 0.4, 0.61, 0.85, 0.97])
    h = 1e-5 * (hi - lo)
    dF = (law.cdf(s + h) - law.cdf(s - h)) / (2 * h)
    np.testing.assert_allclose(dF, law.pdf(s), rtol=1e-6)
    assert law.cdf(lo) == 0 and law.cdf(hi) == 1
    assert law.cdf(lo - 1) == 0 and law.cdf(hi + 1) == 1
    assert np.all(np.diff(law.cdf(np.linspace(lo, hi, 50))) >= 0)


def test_known_cdf_values():
    assert eq.EquilibriumLaw("jacobi").cdf(1 / math.sqrt(2)) == pytest.approx(0.75, abs=1e-15)
    assert eq.EquilibriumLaw("laguerre").cdf(2.0) == pytest.approx(0.5 + 1 / math.pi, abs=1e-15)
    for alpha in (2, 3, 2.5):
        law = eq.EquilibriumLaw("hermite", alpha)
        t = 0.37 * law.support[1]
        assert law.cdf(-t) == pytest.approx(1 - law.cdf(t), abs=1e-10)
        assert law.cdf(0.0) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("law", LAWS[:3] + LAWS[4:5], ids=lambda l: f"{l.family}-{l.alpha}")
def test_ppf_inverts_cdf(law):
    q = np.array([0.01, 0.3, 0.5, 0.9, 0.999])
    np.testing.assert_allclose(law.cdf(law.ppf(q)), q, atol=1e-10)
    assert law.ppf(0.0) == law.support[0] and law.ppf(1.0) == law.support[1]


@pytest.mark.parametrize("spec", [op.uniform(), op.jacobi(1, 2), op.laguerre(), op.laguerre(1.5),
                                  op.hermite(), op.hermite(4), op.hermite(1.5, 0.3)])
def test_contracted_gauss_nodes_follow_the_law(spec):
    law = eq.law_for(spec)
    n = 200
    x, _ = op.gauss_rule(op.recurrence_coefficients(spec, n), n)
    assert eq.kolmogorov_distance(law.contract(x, n), law) < 0.01


def test_affine_laws():
    law = eq.law_for(op.uniform(2, 6))
    assert law.support == (2.0, 6.0)
    assert law.cdf(4.0) == pytest.approx(0.5)
    assert law.pdf(4.0) == pytest.approx(1 / (2 * math.pi))
    flipped = eq.affine_transform_law(eq.EquilibriumLaw("laguerre"), -1.0, 0.0)
    assert flipped.support == (-4.0, 0.0)
    assert flipped.cdf(-2.0) == pytest.approx(0.5 - 1 / math.pi, abs=1e-15)
    g = eq.law_for(op.gaussian(1.0, 2.0))
    base = eq.EquilibriumLaw("hermite")
    assert g.cdf(1.0 + 2 * math.sqrt(2) * 0.4) == pytest.approx(base.cdf(0.4), abs=1e-15)
    with pytest.raises(ValueError):
        eq.affine_transform_law(base, 0.0, 1.0)


def test_contraction_factors():
    assert eq.contraction_factor(eq.EquilibriumLaw("jacobi"), 50) == 1
    assert eq.contraction_factor(eq.EquilibriumLaw("laguerre"), 50) == 1 / 50
    assert eq.contraction_factor(eq.EquilibriumLaw("hermite", 4), 16) == 0.5
    with pytest.raises(ValueError):
        eq.EquilibriumLaw("jacobi").contraction(0)
    law = eq.law_for(op.laguerre(0.0, 2.0, 1.0))
    # contraction acts on the canonical variable
    assert law.contract(np.array([1.0 + 2 * 10.0]), 10)[0] == pytest.approx(1.0 + 2 * 1.0)


def test_law_errors():
    with pytest.raises(ValueError):
        eq.law_for(op.tabulated([0, 1, 2], [1, 2, 1]))
    with pytest.raises(ValueError):
        eq.EquilibriumLaw("hermite", -1.0)
    with pytest.raises(ValueError):
        eq.EquilibriumLaw("jacobi", scale=0.0)


def test_kolmogorov_distance_reference_values():
    law = eq.EquilibriumLaw("jacobi")
    assert eq.kolmogorov_distance([0.0], law) == pytest.approx(0.5)
    n = 40
    mid = law.ppf((np.arange(n) + 0.5) / n)
    assert eq.kolmogorov_distance(mid, law) == pytest.approx(0.5 / n, abs=1e-12)
    with pytest.raises(ValueError):
        eq.kolmogorov_distance([], law)


def test_leja_kolmogorov_distance_shrinks():
    for spec in (op.uniform(), op.hermite(), op.laguerre()):
        rows = [eq.kolmogorov_distance(eq.law_for(spec).contract(s.nodes, len(s)), eq.law_for(spec))
                for s in (lj.build_sequence(spec, n) for n in (20, 40, 80))]
        assert rows[0] > rows[1] > rows[2]


def test_fekete_ratio_interval_capacity():
    law = eq.EquilibriumLaw("jacobi")
    N = 100
    lobatto = eq.fekete_determinant_ratio(eq.gauss_lobatto_nodes(N + 1), law, N)
    cheb = eq.fekete_determinant_ratio(np.cos(np.pi * np.arange(N + 1) / N), law, N)
    leja = eq.fekete_determinant_ratio(lj.build_sequence(op.uniform(), N + 1), law, N)
    assert abs(lobatto - 0.5) < 0.05 and abs(cheb - 0.5) < 0.05
    assert abs(leja - 0.5) < 0.05
    # Fekete points maximize the determinant
    assert leja <= lobatto * (1 + 1e-12)


def test_fekete_ratio_small_case_and_errors():
    law = eq.EquilibriumLaw("jacobi")
    # N = 1 on {-1, 1}: |1 - (-1)|^(2/2)
    assert eq.fekete_determinant_ratio(np.array([-1.0, 1.0]), law, 1) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        eq.fekete_determinant_ratio(np.array([0.0, 1.0]), law, 2)
    with pytest.raises(ValueError):
        eq.fekete_determinant_ratio(np.array([0.0, 0.0]), law, 1)


def test_gauss_lobatto_nodes():
    np.testing.assert_allclose(eq.gauss_lobatto_nodes(3), [-1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(eq.gauss_lobatto_nodes(4), [-1, -1 / math.sqrt(5), 1 / math.sqrt(5), 1],
                               atol=1e-15)
    with pytest.raises(ValueError):
        eq.gauss_lobatto_nodes(1)
