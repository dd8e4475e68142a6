"""Node sets and samples.

- OCS (optimal concentric sampling) nodes on the disk: K = m//2 + 1 rings with
  quasi-optimal radii and m_nu = 2m - 4nu + 5 equispaced nodes on ring nu.
- Scattered samples of N = (n+1)^2 points, area-uniform on a domain.
- Mock-optimal nodes: for each OCS node (mapped to the domain) the nearest
  sample point not already taken.

Everything here is deterministic given the seed; each call owns its RNG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..errors import InsufficientSampleError, ParameterError
from .domains import DomainSpec, contains_xy, map_forward_polar


# Coefficients of the quasi-optimal radius cubic in xi.
_RHO_C1 = 1.1565
_RHO_C2 = -0.76535
_RHO_C3 = 0.60517

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _check_degree(m: int) -> int:
    if int(m) != m or m < 0:
        raise ParameterError(f"degree must be a nonnegative integer, got {m!r}")
    return int(m)


def ring_count(m: int) -> int:
    return _check_degree(m) // 2 + 1


def ring_sizes(m: int) -> Tuple[int, ...]:
    m = _check_degree(m)
    return tuple(2 * m - 4 * nu + 5 for nu in range(1, ring_count(m) + 1))


def interpolation_size(m: int) -> int:
    m = _check_degree(m)
    return (m + 1) * (m + 2) // 2


# -----------------------------------------------------------------------------
# OCS nodes
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class OCSNodeSet:
    m: int
    radii: np.ndarray
    counts: Tuple[int, ...]
    rho: np.ndarray
    phi: np.ndarray
    ring: np.ndarray  # nu, 1-based
    sigma: np.ndarray  # sigma, 1-based

    @property
    def K(self) -> int:
        return len(self.counts)

    @property
    def M(self) -> int:
        return int(self.rho.size)

    def points(self) -> np.ndarray:
        return np.column_stack([self.rho * np.cos(self.phi), self.rho * np.sin(self.phi)])


def ocs_radii(m: int) -> np.ndarray:
    """rho_nu = 1.1565 xi - 0.76535 xi^2 + 0.60517 xi^3, xi = cos((2nu-1)pi/(2(m+1)))."""

    m = _check_degree(m)
    nu = np.arange(1, ring_count(m) + 1, dtype=float)
    xi = np.cos((2.0 * nu - 1.0) * math.pi / (2.0 * (m + 1)))
    rho = _RHO_C1 * xi + _RHO_C2 * xi**2 + _RHO_C3 * xi**3
    if m % 2 == 0:
        # xi is cos(pi/2) on the last ring.
        rho[-1] = 0.0
    return rho


def ocs_nodes_disk(m: int) -> OCSNodeSet:
    m = _check_degree(m)
    radii = ocs_radii(m)
    counts = ring_sizes(m)
    rho, phi, ring, sigma = [], [], [], []
    for nu, (r, cnt) in enumerate(zip(radii, counts), start=1):
        s = np.arange(1, cnt + 1)
        rho.append(np.full(cnt, r))
        phi.append(2.0 * math.pi * (s - 1) / cnt)
        ring.append(np.full(cnt, nu))
        sigma.append(s)
    return OCSNodeSet(
        m=m,
        radii=radii,
        counts=counts,
        rho=np.concatenate(rho),
        phi=np.concatenate(phi),
        ring=np.concatenate(ring),
        sigma=np.concatenate(sigma),
    )


def optimal_nodes(dom: DomainSpec, m: int) -> np.ndarray:
    """OCS nodes mapped into the domain, shape (M, 2), in (nu, sigma) order."""

    ocs = ocs_nodes_disk(m)
    x, y = map_forward_polar(dom, ocs.rho, ocs.phi)
    return np.column_stack([x, y])


# -----------------------------------------------------------------------------
# Samples
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleSet:
    domain: DomainSpec
    n: int
    seed: Optional[int]
    points: np.ndarray
    values: Optional[np.ndarray] = None
    layout: str = "uniform"

    @property
    def N(self) -> int:
        return int(self.points.shape[0])

    def with_values(self, values) -> "SampleSet":
        v = np.asarray(values, dtype=float).reshape(-1)
        if v.size != self.N:
            raise ParameterError(f"expected {self.N} sample values, got {v.size}")
        return replace(self, values=v)

    def evaluate(self, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "SampleSet":
        return self.with_values(f(self.points[:, 0], self.points[:, 1]))


def _check_grid(n: int) -> int:
    if int(n) != n or n < 0:
        raise ParameterError(f"grid parameter n must be a nonnegative integer, got {n!r}")
    return int(n)


def uniform_points(dom: DomainSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` area-uniform points on the domain with the given generator."""

    if count <= 0:
        return np.empty((0, 2))

    if dom.tag in ("disk", "ellipse"):
        u = rng.random(count)
        t = rng.random(count)
        x, y = map_forward_polar(dom, np.sqrt(u), 2.0 * math.pi * t)
        return np.column_stack([x, y])

    if dom.tag == "annulus":
        a = dom.inner_radius
        u = rng.random(count)
        t = rng.random(count)
        r = np.sqrt(a * a + u * (dom.A**2 - a * a))
        th = 2.0 * math.pi * t
        return np.column_stack([r * np.cos(th), r * np.sin(th)])

    # Polygon: rejection from the circumscribed unit disk.
    accept_rate = dom.area / math.pi
    out = []
    have = 0
    while have < count:
        batch = int(math.ceil((count - have) / accept_rate * 1.1)) + 16
        r = np.sqrt(rng.random(batch))
        th = 2.0 * math.pi * rng.random(batch)
        x, y = r * np.cos(th), r * np.sin(th)
        keep = contains_xy(dom, x, y, tol=0.0)
        pts = np.column_stack([x[keep], y[keep]])
        out.append(pts)
        have += pts.shape[0]
    return np.concatenate(out)[:count]


def uniform_sample(dom: DomainSpec, n: int, seed: int) -> SampleSet:
    """(n+1)^2 i.i.d. area-uniform points on the domain."""

    n = _check_grid(n)
    rng = np.random.default_rng(seed)
    pts = uniform_points(dom, (n + 1) ** 2, rng)
    return SampleSet(domain=dom, n=n, seed=int(seed), points=pts)


def polar_grid_sample(dom: DomainSpec, n: int) -> SampleSet:
    """Structured (n+1) x (n+1) polar grid: rho_eta = (eta+1)/(n+1), theta_k = 2pi k/(n+1), mapped."""

    n = _check_grid(n)
    k = np.arange(n + 1, dtype=float)
    rho = (k + 1.0) / (n + 1.0)
    theta = 2.0 * math.pi * k / (n + 1.0)
    rr, tt = np.meshgrid(rho, theta, indexing="ij")
    x, y = map_forward_polar(dom, rr.ravel(), tt.ravel())
    return SampleSet(domain=dom, n=n, seed=None, points=np.column_stack([x, y]), layout="grid")


def quasi_uniform_grid(dom: DomainSpec, count: int) -> np.ndarray:
    """Deterministic dense point set: Vogel spiral plus boundary ring(s), mapped.

    Used for sup-norm estimates, so the boundary of the domain is always
    sampled (both circles for the annulus).
    """

    count = max(int(count), 16)
    n_b = max(8, int(round(2.0 * math.sqrt(count))))
    n_in = max(count - n_b, 1)
    i = np.arange(n_in, dtype=float)
    rho = np.sqrt((i + 0.5) / n_in)
    phi = i * _GOLDEN_ANGLE
    ring = 2.0 * math.pi * np.arange(n_b) / n_b
    rho_all = [rho, np.ones(n_b)]
    phi_all = [phi, ring]
    if dom.tag == "annulus":
        rho_all.append(np.zeros(n_b))
        phi_all.append(ring + math.pi / n_b)
    x, y = map_forward_polar(dom, np.concatenate(rho_all), np.concatenate(phi_all))
    return np.column_stack([x, y])


# -----------------------------------------------------------------------------
# Mock-optimal selection
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class MockOptimalSet:
    indices: np.ndarray
    points: np.ndarray
    ring: np.ndarray
    sigma: np.ndarray
    distances: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return int(self.indices.size)

    @property
    def max_distance(self) -> float:
        return float(self.distances.max()) if self.distances.size else 0.0

    def pairing(self) -> dict:
        """(nu, sigma) -> sample index."""

        return {(int(a), int(b)): int(i) for a, b, i in zip(self.ring, self.sigma, self.indices)}


def mock_optimal_select(
    sample: SampleSet,
    optimal: np.ndarray,
    *,
    m: Optional[int] = None,
    log_fn: Optional[Callable[[str], None]] = None,
) -> MockOptimalSet:
    """Greedy nearest-available assignment in OCS order.

    ``optimal`` must be in (nu, sigma) order, outermost ring first, as returned
    by ``optimal_nodes``. Ties in distance go to the lowest sample index.
    """

    pts = np.asarray(sample.points, dtype=float)
    opt = np.asarray(optimal, dtype=float).reshape(-1, 2)
    N, M = pts.shape[0], opt.shape[0]
    if N < M:
        raise InsufficientSampleError(f"sample has {N} points but {M} interpolation nodes are required")
    if np.unique(pts, axis=0).shape[0] != N:
        raise ParameterError("sample points must be pairwise distinct")

    if m is None:
        # Recover the degree from M = (m+1)(m+2)/2.
        m = (math.isqrt(8 * M + 1) - 3) // 2
    if interpolation_size(m) == M:
        ocs = ocs_nodes_disk(m)
        ring, sigma = ocs.ring, ocs.sigma
    else:
        ring = np.ones(M, dtype=int)
        sigma = np.arange(1, M + 1)

    tree = cKDTree(pts)
    claimed = np.zeros(N, dtype=bool)
    chosen = np.empty(M, dtype=int)
    dist = np.empty(M, dtype=float)
    for i in range(M):
        k = min(N, i + 1)
        d, idx = tree.query(opt[i], k=k)
        d = np.atleast_1d(d)
        idx = np.atleast_1d(idx)
        free = ~claimed[idx]
        d, idx = d[free], idx[free]
        dmin = float(d.min())
        # The k-query may cut through a tie; collect everything at dmin.
        cand = np.asarray(tree.query_ball_point(opt[i], r=dmin * (1.0 + 1e-12) + 1e-300), dtype=int)
        cand = cand[~claimed[cand]]
        dc = np.hypot(pts[cand, 0] - opt[i, 0], pts[cand, 1] - opt[i, 1])
        best = np.lexsort((cand, dc))[0]
        chosen[i] = cand[best]
        dist[i] = dc[best]
        claimed[chosen[i]] = True

    out = MockOptimalSet(
        indices=chosen,
        points=pts[chosen].copy(),
        ring=np.asarray(ring, dtype=int),
        sigma=np.asarray(sigma, dtype=int),
        distances=dist,
    )
    if log_fn is not None:
        log_fn(f"[sample] mock-optimal M={M} from N={N}, max distance {out.max_distance:.3g}")
    return out
