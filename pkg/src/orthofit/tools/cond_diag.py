#!/usr/bin/env python3
"""Conditioning of the interpolation matrix at OCS nodes vs. random nodes.

Preferred run methods:
  - orthofit-cond-diag             (after install)
  - python -m orthofit.tools.cond_diag
"""

from __future__ import annotations

import argparse
from typing import List, Sequence

import numpy as np

from .. import config
from ..core.domains import DomainSpec, mapped_basis_matrix
from ..core.sampling import interpolation_size, optimal_nodes, uniform_points


def _parse_m_values(text: str) -> List[int]:
    s = (text or "").strip()
    if not s:
        return []
    if ":" in s:
        lo, hi = (int(p) for p in s.split(":", 1))
        return list(range(lo, hi + 1))
    return [int(p) for p in s.replace(",", " ").split()]


def interpolation_cond(dom: DomainSpec, pts: np.ndarray, m: int) -> float:
    """2-norm condition number of the square M x M basis matrix at ``pts``."""

    A = mapped_basis_matrix(dom, None, m, pts[:, 0], pts[:, 1])
    return float(np.linalg.cond(A))


def cond_rows(dom: DomainSpec, m_values: Sequence[int], *, seed: int, trials: int = 5) -> List[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for m in m_values:
        M = interpolation_size(m)
        ocs = interpolation_cond(dom, optimal_nodes(dom, m), m)
        rand = [interpolation_cond(dom, uniform_points(dom, M, rng), m) for _ in range(max(1, int(trials)))]
        rows.append({"m": int(m), "M": M, "ocs": ocs, "random_median": float(np.median(rand)), "random_max": float(np.max(rand))})
    return rows


def _build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description="orthofit interpolation-matrix conditioning")
    p.add_argument("--domain", default='{"tag":"disk"}', help="Domain JSON or @file (default: unit disk)")
    p.add_argument("--m", default="1:12", help="Degrees: '1:12' or '2,4,8' (default 1:12)")
    p.add_argument("--trials", type=int, default=5, help="Random node sets per degree")
    p.add_argument("--seed", type=int, default=int(getattr(config, "DEFAULT_SEED", 0)))
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_arg_parser().parse_args(argv)

    try:
        dom = DomainSpec.from_text(args.domain)
        m_values = _parse_m_values(args.m)
    except ValueError as e:
        print(f"Bad arguments: {e}")
        return 1
    if not m_values:
        print("No degrees requested.")
        return 1

    print("=== orthofit conditioning diagnostics ===")
    print(f"domain={dom.to_json()} trials={int(args.trials)} seed={int(args.seed)}")
    print()
    print(f"{'m':>4} {'M':>6} {'cond(OCS)':>12} {'cond(rand) med':>15} {'cond(rand) max':>15}")
    for r in cond_rows(dom, m_values, seed=int(args.seed), trials=int(args.trials)):
        print(f"{r['m']:>4} {r['M']:>6} {r['ocs']:>12.4e} {r['random_median']:>15.4e} {r['random_max']:>15.4e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
