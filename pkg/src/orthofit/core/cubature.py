"""Product cubature on the disk and on mapped domains.

Disk rule of degree q:

- radial: Gauss-Legendre in rho on (0, 1) with n_r = ceil((q+2)/2) points,
  the polar factor rho folded into the weights;
- angular: q+1 equispaced angles, or, with ``sectors=p``, Gauss-Legendre
  panels on the p sectors [(2k-1)pi/p, (2k+1)pi/p].

A mapped rule keeps the disk nodes' images and multiplies the weights by the
forward Jacobian. For the ellipse that is exact on polynomials of degree <= q;
for the annulus and polygon it is exact on the mapped space instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import ConfigError, CubatureError, ParameterError
from .domains import DomainSpec, jacobian_forward_polar, map_forward_polar
from .solver import OperatorModel, evaluate_operator


Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Extra Gauss points per polygon sector on top of ceil(q pi / p).
_SECTOR_PAD = 16


@dataclass(frozen=True)
class CubatureRule:
    domain: DomainSpec
    degree: int
    nodes: np.ndarray  # (n, 2) plane points
    weights: np.ndarray
    exactness_space: str  # "polynomials" | "mapped_basis"
    rho: np.ndarray  # disk preimage of each node
    phi: np.ndarray
    n_radial: int
    n_angular: int

    @property
    def size(self) -> int:
        return int(self.weights.size)


def _check_degree(q: int) -> int:
    if int(q) != q or q < 0:
        raise ParameterError(f"cubature degree must be a nonnegative integer, got {q!r}")
    return int(q)


def _gauss(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    t, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (t + 1.0), half * w


def disk_rule(q: int, sectors: Optional[int] = None) -> CubatureRule:
    q = _check_degree(q)
    n_r = int(math.ceil((q + 2) / 2.0))
    rho, wr = _gauss(n_r, 0.0, 1.0)
    wr = wr * rho

    if sectors is None:
        n_t = q + 1
        theta = 2.0 * math.pi * np.arange(n_t) / n_t
        wt = np.full(n_t, 2.0 * math.pi / n_t)
    else:
        p = int(sectors)
        if p != sectors or p < 1:
            raise ParameterError(f"sector count must be a positive integer, got {sectors!r}")
        alpha = math.pi / p
        per = int(math.ceil(q * math.pi / p)) + _SECTOR_PAD
        parts = [_gauss(per, (2 * k - 1) * alpha, (2 * k + 1) * alpha) for k in range(p)]
        theta = np.mod(np.concatenate([t for t, _ in parts]), 2.0 * math.pi)
        wt = np.concatenate([w for _, w in parts])
        n_t = theta.size

    rr, tt = np.meshgrid(rho, theta, indexing="ij")
    ww = np.outer(wr, wt)
    rr, tt, ww = rr.ravel(), tt.ravel(), ww.ravel()
    nodes = np.column_stack([rr * np.cos(tt), rr * np.sin(tt)])
    return CubatureRule(
        domain=DomainSpec.disk(),
        degree=q,
        nodes=nodes,
        weights=ww,
        exactness_space="polynomials",
        rho=rr,
        phi=tt,
        n_radial=n_r,
        n_angular=int(n_t),
    )


def mapped_rule(dom: DomainSpec, disk: CubatureRule) -> CubatureRule:
    if disk.domain.tag != "disk":
        raise ParameterError("mapped_rule expects a rule on the unit disk")
    x, y = map_forward_polar(dom, disk.rho, disk.phi)
    w = disk.weights * jacobian_forward_polar(dom, disk.rho, disk.phi)
    space = "polynomials" if dom.tag in ("disk", "ellipse") else "mapped_basis"
    return CubatureRule(
        domain=dom,
        degree=disk.degree,
        nodes=np.column_stack([x, y]),
        weights=w,
        exactness_space=space,
        rho=disk.rho,
        phi=disk.phi,
        n_radial=disk.n_radial,
        n_angular=disk.n_angular,
    )


def rule_for_domain(dom: DomainSpec, q: int) -> CubatureRule:
    """Default rule per domain; polygons get sector-aligned angles."""

    if dom.tag == "polygon":
        return mapped_rule(dom, disk_rule(q, sectors=dom.p))
    disk = disk_rule(q)
    if dom.tag == "disk":
        return disk
    return mapped_rule(dom, disk)


def _evaluate(f: Integrand, nodes: np.ndarray, what: str) -> np.ndarray:
    x, y = nodes[:, 0], nodes[:, 1]
    try:
        vals = np.broadcast_to(np.asarray(f(x, y), dtype=float), x.shape)
    except Exception:
        # Locate the failing node.
        for i in range(x.size):
            try:
                float(np.asarray(f(x[i : i + 1], y[i : i + 1]), dtype=float).reshape(-1)[0])
            except Exception as e:
                raise CubatureError(f"{what} failed at node {i}: {e}", index=i) from e
        raise
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise CubatureError(f"{what} is not finite at node {i} ({x[i]:.6g}, {y[i]:.6g})", index=i)
    return vals


def integrate(rule: CubatureRule, f: Integrand, weight: Optional[Integrand] = None) -> float:
    """sum_i f(psi_i) w(psi_i) w_i."""

    vals = _evaluate(f, rule.nodes, "integrand")
    if weight is not None:
        vals = vals * _evaluate(weight, rule.nodes, "weight function")
    return float(np.sum(vals * rule.weights))


def integrate_operator(rule: CubatureRule, model: OperatorModel, weight: Optional[Integrand] = None) -> float:
    if rule.domain != model.domain:
        raise ConfigError(
            f"cubature rule is on {rule.domain.to_json()} but the model is on {model.domain.to_json()}"
        )
    vals = evaluate_operator(model, rule.nodes).values
    if weight is not None:
        vals = vals * _evaluate(weight, rule.nodes, "weight function")
    return float(np.sum(vals * rule.weights))
