from __future__ import annotations

import math

import numpy as np
import pytest

from orthofit.core.zernike import (
    PolarPoint,
    ZernikeIndex,
    basis_matrix,
    basis_row,
    basis_size,
    index_to_pair,
    norm_factor,
    pair_to_index,
    radial_poly,
    zernike_eval,
)
from orthofit.errors import DomainError, ParameterError


def _radial_factorial(m: int, l: int, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho)
    for i in range((m - l) // 2 + 1):
        c = (-1) ** i * math.factorial(m - i)
        c /= math.factorial(i) * math.factorial((m + l) // 2 - i) * math.factorial((m - l) // 2 - i)
        out += c * rho ** (m - 2 * i)
    return out


@pytest.mark.parametrize(
    "m,l,rho,expected",
    [(0, 0, 0.7, 1.0), (3, 3, 0.5, 0.125), (2, 0, 0.5, -0.5), (4, 0, 1.0, 1.0), (2, 2, 0.3, 0.09)],
)
def test_radial_poly_values(m, l, rho, expected):
    assert radial_poly(m, l, rho) == pytest.approx(expected, abs=1e-14)


def test_radial_poly_matches_factorial_sum(rng):
    rho = rng.random(50)
    for m in range(21):
        for l in range(m % 2, m + 1, 2):
            ref = _radial_factorial(m, l, rho)
            got = radial_poly(m, l, rho)
            np.testing.assert_allclose(got, ref, rtol=1e-9, atol=1e-9)


def test_radial_poly_high_degree_stays_bounded(rng):
    rho = rng.random(200)
    vals = radial_poly(60, 0, rho)
    assert np.all(np.isfinite(vals))
    # |R_m^l| <= 1 on [0, 1]
    assert np.max(np.abs(vals)) <= 1.0 + 1e-9
    assert radial_poly(60, 0, 1.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m,l", [(2, 1), (1, 3), (-1, 0), (3, 1.5)])
def test_radial_poly_rejects_bad_pairs(m, l):
    with pytest.raises(ParameterError):
        radial_poly(m, l, 0.5)


def test_radial_poly_negative_l_rejected():
    with pytest.raises(ParameterError):
        radial_poly(2, -2, 0.5)


def test_rho_clamp_and_domain_error():
    assert radial_poly(2, 0, 1.0 + 1e-13) == pytest.approx(1.0)
    with pytest.raises(DomainError) as ex:
        radial_poly(2, 0, 1.001)
    assert ex.value.preimage_radius == pytest.approx(1.001)


def test_zernike_eval_examples():
    pt = PolarPoint.of(0.3, 1.2)
    assert zernike_eval(ZernikeIndex(0, 0), pt) == pytest.approx(1.0)
    assert zernike_eval(ZernikeIndex(1, 1), PolarPoint(1.0, 0.0)) == pytest.approx(2.0)
    assert zernike_eval(ZernikeIndex(2, -2), PolarPoint(1.0, math.pi / 4)) == pytest.approx(math.sqrt(6.0))


def test_unit_normalization_scales_by_inverse_sqrt_pi():
    pt = PolarPoint(0.4, 0.9)
    idx = ZernikeIndex(3, -1)
    ratio = zernike_eval(idx, pt, "unit") / zernike_eval(idx, pt, "paper")
    assert ratio == pytest.approx(1.0 / math.sqrt(math.pi))
    assert norm_factor(4, 0, "paper") == pytest.approx(math.sqrt(5.0))
    with pytest.raises(ParameterError):
        norm_factor(4, 0, "orthonormal")


def test_polar_point_normalizes_angle():
    pt = PolarPoint.of(0.5, -math.pi / 2)
    assert pt.phi == pytest.approx(1.5 * math.pi)
    assert PolarPoint.of(1.0 + 1e-13, 0.0).rho == 1.0


def test_index_pair_examples():
    assert pair_to_index(0, 0) == 0
    assert pair_to_index(1, -1) == 1
    assert pair_to_index(1, 1) == 2
    assert index_to_pair(4) == ZernikeIndex(2, 0)
    assert ZernikeIndex(3, 1).j == 8
    assert ZernikeIndex.from_j(8) == ZernikeIndex(3, 1)


def test_index_bijection_and_order():
    seen = []
    for m in range(15):
        for l in range(-m, m + 1, 2):
            j = pair_to_index(m, l)
            assert index_to_pair(j) == ZernikeIndex(m, l)
            seen.append(j)
    assert sorted(seen) == list(range(basis_size(14)))


def test_index_errors():
    with pytest.raises(ParameterError):
        ZernikeIndex(2, 1)
    with pytest.raises(ParameterError):
        index_to_pair(-1)
    with pytest.raises(ParameterError):
        basis_size(-1)


def test_basis_row_examples():
    np.testing.assert_allclose(basis_row(0, PolarPoint(0.3, 2.0)), [1.0])
    np.testing.assert_allclose(basis_row(1, PolarPoint(0.0, 0.7)), [1.0, 0.0, 0.0], atol=1e-15)
    pt = PolarPoint(1.0, 0.0)
    row = basis_row(2, pt)
    assert row.shape == (6,)
    expected = [zernike_eval(index_to_pair(j), pt) for j in range(6)]
    np.testing.assert_allclose(row, expected, rtol=1e-13, atol=1e-14)


def test_basis_matrix_matches_elementwise(rng):
    rho = rng.random(20)
    phi = 2 * math.pi * rng.random(20)
    mat = basis_matrix(2, rho, phi)
    assert mat.shape == (20, 6)
    for i in range(20):
        pt = PolarPoint(float(rho[i]), float(phi[i]))
        for j in range(6):
            assert mat[i, j] == pytest.approx(zernike_eval(index_to_pair(j), pt), abs=1e-13)


def test_basis_matrix_uses_config_normalization(monkeypatch):
    import orthofit.config as config

    monkeypatch.setattr(config, "ZERNIKE_NORM", "unit")
    assert basis_matrix(0, 0.2, 0.0)[0] == pytest.approx(1.0 / math.sqrt(math.pi))
