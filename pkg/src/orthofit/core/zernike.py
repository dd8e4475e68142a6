"""Zernike polynomials on the unit disk.

Single-index ordering (signed l, OSA style):

    j = (m(m+2) + l) / 2,    |l| <= m,  m - |l| even

Z_j(rho, phi) = N_m^|l| R_m^|l|(rho) cos(|l| phi)   for l >= 0
              = N_m^|l| R_m^|l|(rho) sin(|l| phi)   for l <  0

with N_m^l = sqrt(2(m+1)) (l != 0) or sqrt(m+1) (l == 0). With
``normalization="unit"`` every function is additionally scaled by 1/sqrt(pi)
so that the family is orthonormal for dx dy on the disk.

Radial polynomials are evaluated through the Jacobi identity

    R_m^l(rho) = (-1)^n rho^l P_n^(l,0)(1 - 2 rho^2),   n = (m - l)/2

and the three-term Jacobi recurrence, which stays accurate well past the
degree where factorial sums overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .. import config
from ..errors import DomainError, ParameterError


NORMALIZATIONS = ("paper", "unit")


@dataclass(frozen=True)
class ZernikeIndex:
    m: int
    l: int

    def __post_init__(self) -> None:
        _check_pair(self.m, self.l)

    @property
    def j(self) -> int:
        return pair_to_index(self.m, self.l)

    @classmethod
    def from_j(cls, j: int) -> "ZernikeIndex":
        return index_to_pair(j)


@dataclass(frozen=True)
class PolarPoint:
    rho: float
    phi: float

    @classmethod
    def of(cls, rho: float, phi: float) -> "PolarPoint":
        """Build a point with phi wrapped to [0, 2pi) and rho clamped near 1."""

        r = float(check_rho(np.asarray(float(rho))))
        return cls(rho=r, phi=float(normalize_angle(float(phi))))


def _check_pair(m: int, l: int) -> None:
    if int(m) != m or int(l) != l:
        raise ParameterError(f"Zernike indices must be integers, got m={m!r} l={l!r}")
    if m < 0:
        raise ParameterError(f"radial order m must be >= 0, got {m}")
    if abs(l) > m:
        raise ParameterError(f"|l| must not exceed m (m={m}, l={l})")
    if (m - abs(l)) % 2:
        raise ParameterError(f"m - |l| must be even (m={m}, l={l})")


def pair_to_index(m: int, l: int) -> int:
    _check_pair(m, l)
    return (m * (m + 2) + l) // 2


def index_to_pair(j: int) -> ZernikeIndex:
    if int(j) != j or j < 0:
        raise ParameterError(f"linear index j must be a nonnegative integer, got {j!r}")
    j = int(j)
    m = (math.isqrt(8 * j + 1) - 1) // 2
    l = 2 * j - m * (m + 2)
    return ZernikeIndex(m=m, l=l)


def basis_size(r_tilde: int) -> int:
    """Number of Zernike functions of degree <= r_tilde."""

    if r_tilde < 0:
        raise ParameterError(f"degree must be >= 0, got {r_tilde}")
    return (r_tilde + 1) * (r_tilde + 2) // 2


def resolve_normalization(normalization: Optional[str] = None) -> str:
    norm = (normalization or getattr(config, "ZERNIKE_NORM", "paper") or "paper").strip().lower()
    if norm not in NORMALIZATIONS:
        raise ParameterError(f"unknown Zernike normalization {norm!r} (expected one of {NORMALIZATIONS})")
    return norm


def norm_factor(m: int, l: int, normalization: Optional[str] = None) -> float:
    base = math.sqrt(2.0 * (m + 1)) if l != 0 else math.sqrt(m + 1.0)
    if resolve_normalization(normalization) == "unit":
        base /= math.sqrt(math.pi)
    return base


def normalize_angle(phi):
    """Wrap angles to [0, 2pi)."""

    two_pi = 2.0 * math.pi
    out = np.mod(phi, two_pi)
    # np.mod can return exactly 2pi for tiny negative inputs.
    return np.where(out >= two_pi, 0.0, out)


def check_rho(rho: np.ndarray) -> np.ndarray:
    """Clamp radii in (1, 1 + RHO_CLAMP_TOL] to 1; reject anything further out."""

    tol = float(getattr(config, "RHO_CLAMP_TOL", 1e-12))
    rho = np.asarray(rho, dtype=float)
    if rho.size == 0:
        return rho
    bad = (rho > 1.0 + tol) | (rho < 0.0) | ~np.isfinite(rho)
    if np.any(bad):
        idx = int(np.flatnonzero(bad.ravel())[0])
        r = float(rho.ravel()[idx])
        raise DomainError(
            f"disk radius {r!r} outside [0, 1] (point {idx})",
            index=idx,
            preimage_radius=r,
        )
    return np.minimum(rho, 1.0)


# -----------------------------------------------------------------------------
# Radial polynomials
# -----------------------------------------------------------------------------


def _jacobi_family(n_max: int, a: int, x: np.ndarray) -> List[np.ndarray]:
    """P_0^(a,0)(x) .. P_{n_max}^(a,0)(x) by the three-term recurrence."""

    out = [np.ones_like(x)]
    if n_max >= 1:
        out.append((a + 1.0) + (a + 2.0) * (x - 1.0) / 2.0)
    for n in range(2, n_max + 1):
        s = 2 * n + a
        c0 = 2.0 * n * (n + a) * (s - 2)
        c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a)
        c2 = 2.0 * (n + a - 1) * (n - 1) * s
        out.append((c1 * out[n - 1] - c2 * out[n - 2]) / c0)
    return out


def radial_family(l: int, m_max: int, rho: np.ndarray) -> Dict[int, np.ndarray]:
    """R_m^l(rho) for m = l, l+2, ..., <= m_max, sharing one recurrence."""

    rho = np.asarray(rho, dtype=float)
    if l > m_max:
        return {}
    n_max = (m_max - l) // 2
    x = 1.0 - 2.0 * rho * rho
    rl = rho**l
    fam = _jacobi_family(n_max, l, x)
    return {l + 2 * n: (-1.0 if n % 2 else 1.0) * rl * p for n, p in enumerate(fam)}


def radial_poly(m: int, l: int, rho):
    """R_m^l(rho) for l >= 0; scalar in, scalar out (arrays broadcast)."""

    if l < 0:
        raise ParameterError(f"radial_poly expects l >= 0, got {l}")
    _check_pair(m, l)
    arr = check_rho(np.asarray(rho, dtype=float))
    val = radial_family(l, m, arr)[m]
    return float(val) if np.ndim(val) == 0 else val


def zernike_eval(idx: ZernikeIndex, pt: PolarPoint, normalization: Optional[str] = None) -> float:
    al = abs(idx.l)
    rad = radial_poly(idx.m, al, pt.rho)
    ang = math.cos(al * pt.phi) if idx.l >= 0 else math.sin(al * pt.phi)
    return norm_factor(idx.m, idx.l, normalization) * rad * ang


# -----------------------------------------------------------------------------
# Basis rows / matrices
# -----------------------------------------------------------------------------


def basis_matrix(
    r_tilde: int,
    rho,
    phi,
    normalization: Optional[str] = None,
) -> np.ndarray:
    """Evaluate Z_0..Z_{R~-1} at every point; result has shape rho.shape + (R~,)."""

    size = basis_size(r_tilde)
    norm = resolve_normalization(normalization)
    rho = check_rho(np.asarray(rho, dtype=float))
    phi = np.asarray(phi, dtype=float)
    rho, phi = np.broadcast_arrays(rho, phi)

    out = np.empty(rho.shape + (size,), dtype=float)
    for l in range(r_tilde + 1):
        fam = radial_family(l, r_tilde, rho)
        if l == 0:
            for m, rad in fam.items():
                out[..., pair_to_index(m, 0)] = norm_factor(m, 0, norm) * rad
            continue
        cos_l = np.cos(l * phi)
        sin_l = np.sin(l * phi)
        for m, rad in fam.items():
            nr = norm_factor(m, l, norm) * rad
            out[..., pair_to_index(m, l)] = nr * cos_l
            out[..., pair_to_index(m, -l)] = nr * sin_l
    return out


def basis_row(r_tilde: int, pt: PolarPoint, normalization: Optional[str] = None) -> np.ndarray:
    return basis_matrix(r_tilde, pt.rho, pt.phi, normalization)
