from __future__ import annotations

import math

import numpy as np
import pytest

from orthofit.bench.functions import get_function
from orthofit.core.cubature import disk_rule, integrate, integrate_operator, mapped_rule, rule_for_domain
from orthofit.core.domains import DomainSpec, gram_weight_xy, jacobian_forward_polar, map_forward_xy, mapped_basis_matrix
from orthofit.core.sampling import uniform_sample
from orthofit.core.solver import fit_sample
from orthofit.core.zernike import basis_matrix
from orthofit.errors import ConfigError, CubatureError, ParameterError


def _disk_monomial(a: int, b: int) -> float:
    if a % 2 or b % 2:
        return 0.0
    beta = math.gamma((a + 1) / 2) * math.gamma((b + 1) / 2) / math.gamma((a + b + 2) / 2)
    return 2.0 * beta / (a + b + 2)


def test_disk_rule_examples():
    one = get_function(0)
    assert integrate(disk_rule(1), one) == pytest.approx(math.pi, rel=1e-14)
    assert integrate(disk_rule(2), lambda x, y: x * x) == pytest.approx(math.pi / 4, rel=1e-14)
    assert abs(disk_rule(40).weights.sum() - math.pi) <= 1e-13
    assert integrate(disk_rule(10), lambda x, y: np.zeros_like(x)) == 0.0


def test_disk_rule_shape():
    rule = disk_rule(40)
    assert rule.n_radial == 21
    assert rule.n_angular == 41
    assert rule.size == 21 * 41
    assert rule.exactness_space == "polynomials"
    assert np.all(rule.rho > 0)


def test_disk_monomial_exactness():
    rule = disk_rule(20)
    x, y = rule.nodes[:, 0], rule.nodes[:, 1]
    for a in range(21):
        for b in range(21 - a):
            got = float(np.sum(x**a * y**b * rule.weights))
            exact = _disk_monomial(a, b)
            if exact == 0.0:
                assert abs(got) <= 1e-13, (a, b)
            else:
                assert got == pytest.approx(exact, rel=1e-12), (a, b)


def test_ellipse_monomial_exactness():
    A, B = 1.5, 1.0
    rule = rule_for_domain(DomainSpec.ellipse(A, B), 20)
    x, y = rule.nodes[:, 0], rule.nodes[:, 1]
    for a in range(21):
        for b in range(21 - a):
            got = float(np.sum(x**a * y**b * rule.weights))
            exact = A ** (a + 1) * B ** (b + 1) * _disk_monomial(a, b)
            if exact == 0.0:
                assert abs(got) <= 1e-10, (a, b)
            else:
                assert got == pytest.approx(exact, rel=1e-12), (a, b)


@pytest.mark.parametrize(
    "dom,area",
    [
        (DomainSpec.ellipse(1.5, 1.0), 4.71238898038469),
        (DomainSpec.annulus(1.0, 0.25), 2.945243112740431),
        (DomainSpec.polygon(12), 3.0),
    ],
    ids=lambda v: v.label if isinstance(v, DomainSpec) else "",
)
def test_mapped_weight_sums_are_areas(dom, area):
    rule = rule_for_domain(dom, 40)
    assert rule.weights.sum() == pytest.approx(area, rel=1e-12)
    assert rule.domain == dom


def test_polygon_rule_uses_sector_angles():
    rule = rule_for_domain(DomainSpec.polygon(12), 40)
    assert rule.n_angular == 12 * (math.ceil(40 * math.pi / 12) + 16)
    assert rule.exactness_space == "mapped_basis"


def test_zernike_orthonormal_on_disk():
    rule = disk_rule(40)
    B = basis_matrix(10, rule.rho, rule.phi, "unit")
    G = B.T @ (rule.weights[:, None] * B)
    np.testing.assert_allclose(G, np.eye(B.shape[1]), atol=1e-10)


def test_zernike_orthonormal_with_config_switch(monkeypatch):
    import orthofit.config as config

    monkeypatch.setattr(config, "ZERNIKE_NORM", "unit")
    rule = disk_rule(30)
    B = basis_matrix(6, rule.rho, rule.phi)
    G = B.T @ (rule.weights[:, None] * B)
    np.testing.assert_allclose(G, np.eye(B.shape[1]), atol=1e-10)


def test_ellipse_basis_orthonormal():
    dom = DomainSpec.ellipse(1.5, 1.0)
    rule = rule_for_domain(dom, 40)
    B = mapped_basis_matrix(dom, None, 10, rule.nodes[:, 0], rule.nodes[:, 1], "unit")
    G = B.T @ (rule.weights[:, None] * B)
    np.testing.assert_allclose(G, np.eye(B.shape[1]), atol=1e-10)


@pytest.mark.parametrize("dom", [DomainSpec.annulus(1.0, 0.25), DomainSpec.polygon(12)], ids=lambda d: d.label)
@pytest.mark.parametrize("variant", ["plain", "jacobian_weighted"])
def test_mapped_space_gram_identity(dom, variant):
    rule = rule_for_domain(dom, 40)
    x, y = rule.nodes[:, 0], rule.nodes[:, 1]
    B = mapped_basis_matrix(dom, variant, 15, x, y, "unit")
    w = rule.weights * gram_weight_xy(dom, variant, x, y)
    G = B.T @ (w[:, None] * B)
    np.testing.assert_allclose(G, np.eye(B.shape[1]), atol=1e-8)


@pytest.mark.parametrize(
    "dom",
    [DomainSpec.ellipse(2.0, 0.5, 0.4), DomainSpec.annulus(1.0, 0.25), DomainSpec.polygon(7)],
    ids=lambda d: d.label,
)
def test_change_of_variables_consistency(dom):
    f = get_function(5)
    sectors = dom.p if dom.tag == "polygon" else None
    disk = disk_rule(24, sectors=sectors)
    mapped = mapped_rule(dom, disk)

    def pulled_back(u, v):
        x, y = map_forward_xy(dom, u, v)
        return f(x, y) * jacobian_forward_polar(dom, np.hypot(u, v), np.arctan2(v, u))

    assert integrate(mapped, f) == pytest.approx(integrate(disk, pulled_back), rel=1e-12, abs=1e-14)


def test_known_integrals_of_test_functions():
    ell = rule_for_domain(DomainSpec.ellipse(1.5, 1.0), 40)
    assert integrate(ell, get_function(2)) == pytest.approx(4.93799, rel=1e-5)
    poly = rule_for_domain(DomainSpec.polygon(12), 40)
    assert integrate(poly, get_function(6)) == pytest.approx(1.11736, rel=1e-3)
    assert integrate(poly, get_function(0)) == pytest.approx(3.0, rel=1e-12)


def test_symmetry_zeros():
    for dom in (DomainSpec.ellipse(1.5, 1.0), DomainSpec.annulus(1.0, 0.25), DomainSpec.polygon(12)):
        rule = rule_for_domain(dom, 40)
        assert abs(integrate(rule, get_function(1))) < 1e-6
        assert abs(integrate(rule, get_function(5))) < 1e-6


def test_weight_function():
    rule = disk_rule(10)
    assert integrate(rule, get_function(0), weight=lambda x, y: x * x) == pytest.approx(math.pi / 4, rel=1e-13)


def test_integrand_failure_reports_node():
    rule = disk_rule(8)

    def bad(x, y):
        if np.any(x > 0.8):
            raise ValueError("blow-up")
        return np.ones_like(x)

    with pytest.raises(CubatureError) as ex:
        integrate(rule, bad)
    assert ex.value.index == int(np.flatnonzero(rule.nodes[:, 0] > 0.8)[0])

    with pytest.raises(CubatureError) as ex:
        integrate(rule, lambda x, y: np.where(y < -0.5, np.nan, 1.0))
    assert ex.value.index == int(np.flatnonzero(rule.nodes[:, 1] < -0.5)[0])


def test_rule_parameter_errors():
    with pytest.raises(ParameterError):
        disk_rule(-1)
    with pytest.raises(ParameterError):
        disk_rule(4, sectors=0)
    with pytest.raises(ParameterError):
        mapped_rule(DomainSpec.polygon(5), rule_for_domain(DomainSpec.ellipse(1.5, 1.0), 4))


def test_integrate_operator():
    dom = DomainSpec.polygon(12)
    sample = uniform_sample(dom, 40, 1).evaluate(get_function(0))
    _, model = fit_sample(dom, sample, 20, 24)
    rule = rule_for_domain(dom, 40)
    assert integrate_operator(rule, model) == pytest.approx(3.0, rel=1e-3)
    assert integrate_operator(rule, model.with_coeffs(np.zeros(model.R))) == 0.0
    with pytest.raises(ConfigError):
        integrate_operator(disk_rule(40), model)


def test_integrate_operator_annulus_f4():
    dom = DomainSpec.annulus(1.0, 0.25)
    sample = uniform_sample(dom, 40, 3).evaluate(get_function(4))
    _, model = fit_sample(dom, sample, 20, 24)
    assert integrate_operator(rule_for_domain(dom, 40), model) == pytest.approx(1.98713, rel=1e-2)
