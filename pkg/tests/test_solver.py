from __future__ import annotations

import json
import math

import numpy as np
import pytest

from orthofit.bench.functions import get_function
from orthofit.core.domains import DomainSpec, mapped_basis_matrix
from orthofit.core.sampling import SampleSet, mock_optimal_select, optimal_nodes, uniform_points, uniform_sample
from orthofit.core.solver import (
    OperatorModel,
    build_design,
    evaluate_operator,
    fit,
    fit_sample,
    kkt_solve,
    norm_bound,
)
from orthofit.core.zernike import basis_size
from orthofit.errors import DegenerateConstraintsError, DegenerateDesignError, DomainError, ParameterError


DOMAINS = [
    DomainSpec.disk(),
    DomainSpec.ellipse(1.5, 1.0),
    DomainSpec.annulus(1.0, 0.25),
    DomainSpec.polygon(12),
]


def _sample(dom, n, seed, f):
    return uniform_sample(dom, n, seed).evaluate(f)


def _kkt_close(a, ref, rtol=1e-7):
    return np.linalg.norm(a - ref) <= rtol * max(np.linalg.norm(ref), 1e-300)


def test_kkt_oracle_example():
    dom = DomainSpec.ellipse(1.5, 1.0)
    sys_, model = fit_sample(dom, _sample(dom, 10, 3, get_function(2)), 3, 5)
    a, z = kkt_solve(sys_)
    assert _kkt_close(model.coeffs, a)
    assert z.shape == (sys_.M,)


def test_kkt_oracle_random_instances():
    rng = np.random.default_rng(2024)
    for k in range(20):
        dom = DOMAINS[k % 4]
        m = int(rng.integers(1, 6))
        rt = int(rng.integers(m, 9))
        n = int(rng.integers(math.isqrt(2 * basis_size(rt)) + 1, 16))
        f = get_function(int(rng.integers(1, 7)))
        sys_, model = fit_sample(dom, _sample(dom, n, 100 + k, f), m, rt)
        a, _ = kkt_solve(sys_)
        assert _kkt_close(model.coeffs, a), (dom.label, m, rt, n)


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: d.label)
def test_interpolation_at_mock_nodes(dom):
    sys_, model = fit_sample(dom, _sample(dom, 12, 5, get_function(3)), 4, 6)
    ev = evaluate_operator(model, sys_.mock.points)
    np.testing.assert_allclose(ev.values, sys_.d, atol=1e-9)
    assert model.diagnostics["constraint_residual"] < 1e-9
    assert model.diagnostics["M"] == 15
    assert model.diagnostics["Rtilde"] == 28


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: d.label)
def test_basis_function_is_reproduced(dom):
    k = 7
    rt = 5

    def u_k(x, y):
        return mapped_basis_matrix(dom, None, rt, x, y)[:, k]

    _, model = fit_sample(dom, _sample(dom, 12, 8, u_k), 3, rt)
    e = np.zeros(basis_size(rt))
    e[k] = 1.0
    np.testing.assert_allclose(model.coeffs, e, atol=1e-10)


@pytest.mark.parametrize(
    "dom",
    [DomainSpec.disk(), DomainSpec.ellipse(1.5, 1.0), DomainSpec.polygon(12)],
    ids=lambda d: d.label,
)
def test_mid_size_constraints_and_span_reproduction(dom):
    m, rt, n = 5, 7, 20

    sys_, model = fit_sample(dom, _sample(dom, n, 21, get_function(6)), m, rt)
    assert model.diagnostics["constraint_residual"] < 1e-9 * (1.0 + np.abs(sys_.d).max())

    # Random combination of the degree-5 mapped basis lies in the degree-7 span.
    coef = np.random.default_rng(5).standard_normal(basis_size(5))

    def poly(x, y):
        return mapped_basis_matrix(dom, None, 5, x, y) @ coef

    _, model = fit_sample(dom, _sample(dom, n, 22, poly), m, rt)
    dense = uniform_points(dom, 5000, np.random.default_rng(6))
    truth = poly(dense[:, 0], dense[:, 1])
    err = np.abs(evaluate_operator(model, dense).values - truth).max()
    assert err <= 1e-8 * np.abs(truth).max()


def test_constants_are_reproduced_on_every_domain():
    for dom in DOMAINS:
        _, model = fit_sample(dom, _sample(dom, 10, 1, get_function(0)), 3, 4)
        pts = uniform_points(dom, 200, np.random.default_rng(0))
        np.testing.assert_allclose(evaluate_operator(model, pts).values, 1.0, atol=1e-10)


def test_linearity_in_the_data():
    dom = DomainSpec.polygon(12)
    base = uniform_sample(dom, 12, 2)
    f, g = get_function(2), get_function(5)
    s_f, s_g = base.evaluate(f), base.evaluate(g)
    s_h = base.with_values(2.0 * s_f.values - 3.0 * s_g.values)
    _, mf = fit_sample(dom, s_f, 4, 6)
    _, mg = fit_sample(dom, s_g, 4, 6)
    _, mh = fit_sample(dom, s_h, 4, 6)
    np.testing.assert_allclose(mh.coeffs, 2.0 * mf.coeffs - 3.0 * mg.coeffs, atol=1e-12)


def test_square_case_is_pure_interpolation():
    dom = DomainSpec.disk()
    sys_, model = fit_sample(dom, _sample(dom, 8, 4, get_function(4)), 4, 4)
    assert sys_.R == sys_.M
    a, _ = kkt_solve(sys_)
    np.testing.assert_allclose(model.coeffs, a, rtol=1e-8, atol=1e-12)


def test_ellipse_accuracy_improves_with_degree():
    dom = DomainSpec.ellipse(1.5, 1.0)
    f = get_function(2)
    sample = _sample(dom, 30, 11, f)
    test = uniform_points(dom, 500, np.random.default_rng(1))
    truth = f(test[:, 0], test[:, 1])
    errs = []
    for m, rt in ((3, 4), (8, 10)):
        _, model = fit_sample(dom, sample, m, rt)
        errs.append(np.mean((evaluate_operator(model, test).values - truth) ** 2))
    assert errs[1] < 1e-3 * errs[0]


def test_build_design_orders_mock_first():
    dom = DomainSpec.disk()
    sample = _sample(dom, 6, 1, get_function(1))
    mock = mock_optimal_select(sample, optimal_nodes(dom, 2), m=2)
    sys_ = build_design(dom, None, 3, sample, mock)
    np.testing.assert_array_equal(sys_.order[: mock.M], mock.indices)
    assert sorted(sys_.order.tolist()) == list(range(sample.N))
    assert sys_.C_mat.shape == (6, 10)


def test_build_design_errors():
    dom = DomainSpec.disk()
    sample = uniform_sample(dom, 3, 1)
    mock = mock_optimal_select(sample, optimal_nodes(dom, 2), m=2)
    with pytest.raises(ParameterError):
        build_design(dom, None, 3, sample, mock)  # no values
    s = sample.evaluate(get_function(1))
    with pytest.raises(ParameterError):
        build_design(dom, None, 1, s, mock)  # rtilde < m
    with pytest.raises(ParameterError):
        build_design(dom, None, 6, s, mock)  # R~ = 28 > N = 16


def test_degenerate_constraints():
    # All nodes on one circle: a degree-2 interpolation set cannot be unisolvent.
    dom = DomainSpec.disk()
    t = 2 * math.pi * np.arange(40) / 40
    pts = 0.5 * np.column_stack([np.cos(t), np.sin(t)])
    sample = SampleSet(domain=dom, n=5, seed=None, points=pts, values=np.ones(40))
    mock = mock_optimal_select(sample, optimal_nodes(dom, 2), m=2)
    with pytest.raises(DegenerateConstraintsError):
        build_design(dom, None, 2, sample, mock)


def test_degenerate_design():
    # Unisolvent nodes for m=1 plus a sample on one circle: degree 4 is underdetermined.
    dom = DomainSpec.disk()
    t = 2 * math.pi * np.arange(30) / 30
    ring = 0.7 * np.column_stack([np.cos(t), np.sin(t)])
    pts = np.vstack([[[0.0, 0.0]], ring])
    sample = SampleSet(domain=dom, n=5, seed=None, points=pts, values=np.ones(31))
    mock = mock_optimal_select(sample, optimal_nodes(dom, 1), m=1)
    with pytest.raises(DegenerateDesignError):
        build_design(dom, None, 4, sample, mock)


def test_condition_warning_is_diagnostic_only(monkeypatch):
    import orthofit.config as config

    monkeypatch.setattr(config, "COND_WARN", 1.0)
    dom = DomainSpec.annulus(1.0, 0.25)
    logs = []
    _, model = fit_sample(dom, _sample(dom, 10, 2, get_function(3)), 3, 5, log_fn=logs.append)
    assert model.diagnostics["warnings"]
    assert any("warning" in line for line in logs)


def test_evaluate_operator_examples():
    dom = DomainSpec.polygon(12)
    _, model = fit_sample(dom, _sample(dom, 8, 3, get_function(6)), 3, 4)
    pts = uniform_points(dom, 50, np.random.default_rng(3))
    one = model.with_coeffs(np.eye(model.R)[0])
    np.testing.assert_allclose(evaluate_operator(one, pts).values, 1.0, atol=1e-14)
    zero = model.with_coeffs(np.zeros(model.R))
    assert np.all(evaluate_operator(zero, pts).values == 0.0)
    with pytest.raises(ParameterError):
        model.with_coeffs([1.0])


def test_evaluate_operator_reports_offending_index(monkeypatch):
    import orthofit.core.solver as solver

    monkeypatch.setattr(solver, "_EVAL_CHUNK", 4)
    dom = DomainSpec.disk()
    _, model = fit_sample(dom, _sample(dom, 5, 3, get_function(1)), 2, 3)
    pts = np.zeros((10, 2))
    pts[6] = [1.2, 0.0]
    with pytest.raises(DomainError) as ex:
        evaluate_operator(model, pts)
    assert ex.value.index == 6


def test_model_json_roundtrip():
    dom = DomainSpec.annulus(1.0, 0.25)
    _, model = fit_sample(dom, _sample(dom, 8, 3, get_function(2)), 3, 4, variant="jacobian_weighted")
    text = json.dumps(model.to_dict())
    back = OperatorModel.from_dict(json.loads(text))
    assert back.domain == dom
    assert back.variant.value == "jacobian_weighted"
    np.testing.assert_array_equal(back.coeffs, model.coeffs)
    pts = uniform_points(dom, 20, np.random.default_rng(1))
    np.testing.assert_array_equal(evaluate_operator(back, pts).values, evaluate_operator(model, pts).values)
    with pytest.raises(ParameterError):
        OperatorModel.from_dict({"format": "something-else"})
    bad = model.to_dict()
    bad["coeffs"] = bad["coeffs"][:-1]
    with pytest.raises(ParameterError):
        OperatorModel.from_dict(bad)


def test_norm_bound_dominates_operator_on_random_data():
    dom = DomainSpec.ellipse(1.5, 1.0)
    base = uniform_sample(dom, 10, 6)
    mock = mock_optimal_select(base.evaluate(get_function(0)), optimal_nodes(dom, 3), m=3)
    rng = np.random.default_rng(0)
    grid = uniform_points(dom, 400, np.random.default_rng(4))
    report = None
    worst = 0.0
    for _ in range(20):
        v = rng.uniform(-1.0, 1.0, base.N)
        sys_ = build_design(dom, None, 5, base.with_values(v), mock)
        model = fit(sys_)
        if report is None:
            report = norm_bound(sys_, model, grid_points=2000)
        ratio = np.max(np.abs(evaluate_operator(model, grid).values)) / np.max(np.abs(v))
        worst = max(worst, ratio)
    assert report.K1 > 0 and report.K2 > 0
    assert report.bound >= worst
    assert report.bound == pytest.approx(report.sup_estimate * (report.K1_inverse + report.K2))
    assert report.to_dict()["variant"] == "inverse"


def test_norm_bound_square_case_is_interpolation_term_only():
    dom = DomainSpec.disk()
    sys_, model = fit_sample(dom, _sample(dom, 8, 4, get_function(4)), 4, 4)
    report = norm_bound(sys_, model, grid_points=500)
    assert report.K2 == 0.0
    assert report.K1 > 0
    assert report.bound == pytest.approx(report.sup_estimate * report.K1)


def test_norm_bound_needs_factors():
    dom = DomainSpec.disk()
    sys_, model = fit_sample(dom, _sample(dom, 6, 3, get_function(1)), 2, 3)
    stripped = model.with_coeffs(model.coeffs)
    with pytest.raises(ParameterError):
        norm_bound(sys_, stripped)
