"""Interpolation-regression operator: design, fit, evaluate, norm bound.

Problem: minimise ||M a - b||_2 subject to C a = d, where the rows of M are the
mapped basis at all N sample points (mock-optimal points first) and C is the
first M rows of M.

Elimination used by ``fit``:

    C = Q [R11 R12]                    (Householder QR, no pivoting)
    X = R11^-1 R12,  y = R11^-1 Q^T d
    V1 = M2 - M1 X,  b1 = b - M1 y
    a2 = argmin ||V1 a2 - b1||        (QR of V1)
    a1 = y - X a2
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Union

import numpy as np
from scipy import linalg

from .. import config
from ..errors import DegenerateConstraintsError, DegenerateDesignError, DomainError, ParameterError
from .domains import BasisVariant, DomainSpec, check_variant, mapped_basis_matrix
from .sampling import MockOptimalSet, SampleSet, interpolation_size, mock_optimal_select, optimal_nodes, quasi_uniform_grid
from .zernike import basis_size, resolve_normalization


MODEL_FORMAT = "orthofit-model/1"

# Rows per chunk when evaluating a model on large point sets.
_EVAL_CHUNK = 20000

LogFn = Optional[Callable[[str], None]]


@dataclass(frozen=True)
class DesignSystem:
    domain: DomainSpec
    variant: BasisVariant
    normalization: str
    m: int
    r_tilde: int
    M_mat: np.ndarray
    b: np.ndarray
    order: np.ndarray  # sample indices, mock-optimal first
    mock: MockOptimalSet = field(repr=False)

    @property
    def M(self) -> int:
        return interpolation_size(self.m)

    @property
    def R(self) -> int:
        return basis_size(self.r_tilde)

    @property
    def N(self) -> int:
        return int(self.M_mat.shape[0])

    @property
    def C_mat(self) -> np.ndarray:
        return self.M_mat[: self.M]

    @property
    def d(self) -> np.ndarray:
        return self.b[: self.M]


@dataclass(frozen=True)
class FitFactors:
    """Intermediate factors kept for the norm-bound report."""

    Q: np.ndarray
    R11: np.ndarray
    R12: np.ndarray
    V1: np.ndarray
    M1: np.ndarray


@dataclass(frozen=True)
class OperatorModel:
    domain: DomainSpec
    variant: BasisVariant
    normalization: str
    m: int
    r_tilde: int
    coeffs: np.ndarray
    mock_indices: np.ndarray
    mock_points: np.ndarray
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    factors: Optional[FitFactors] = field(default=None, repr=False, compare=False)

    @property
    def R(self) -> int:
        return int(self.coeffs.size)

    def with_coeffs(self, coeffs) -> "OperatorModel":
        c = np.asarray(coeffs, dtype=float).reshape(-1)
        if c.size != basis_size(self.r_tilde):
            raise ParameterError(f"expected {basis_size(self.r_tilde)} coefficients, got {c.size}")
        return OperatorModel(
            domain=self.domain,
            variant=self.variant,
            normalization=self.normalization,
            m=self.m,
            r_tilde=self.r_tilde,
            coeffs=c,
            mock_indices=self.mock_indices,
            mock_points=self.mock_points,
            diagnostics=dict(self.diagnostics),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": MODEL_FORMAT,
            "domain": self.domain.to_dict(),
            "variant": self.variant.value,
            "normalization": self.normalization,
            "m": int(self.m),
            "rtilde": int(self.r_tilde),
            "coeffs": [float(c) for c in self.coeffs],
            "mock_indices": [int(i) for i in self.mock_indices],
            "mock_points": [[float(a), float(b)] for a, b in self.mock_points],
            "diagnostics": _jsonable(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "OperatorModel":
        if not isinstance(d, dict) or d.get("format") != MODEL_FORMAT:
            raise ParameterError(f"not an orthofit model (expected format {MODEL_FORMAT!r})")
        try:
            dom = DomainSpec.from_dict(d["domain"])
            model = cls(
                domain=dom,
                variant=check_variant(dom, d["variant"]),
                normalization=resolve_normalization(d["normalization"]),
                m=int(d["m"]),
                r_tilde=int(d["rtilde"]),
                coeffs=np.asarray(d["coeffs"], dtype=float),
                mock_indices=np.asarray(d.get("mock_indices", []), dtype=int),
                mock_points=np.asarray(d.get("mock_points", []), dtype=float).reshape(-1, 2),
                diagnostics=dict(d.get("diagnostics") or {}),
            )
        except KeyError as e:
            raise ParameterError(f"model is missing key {e.args[0]!r}") from None
        if model.coeffs.size != basis_size(model.r_tilde):
            raise ParameterError("model coefficient count does not match its degree")
        return model


@dataclass(frozen=True)
class Evaluation:
    values: np.ndarray
    seconds: float


@dataclass(frozen=True)
class NormBoundReport:
    K1: float
    K2: float
    bound: float
    variant: str
    sup_estimate: float
    K1_direct: float
    K1_inverse: float
    bound_direct: float
    grid_points: int

    def to_dict(self) -> Dict[str, Any]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def _norm1(a: np.ndarray) -> float:
    """Induced 1-norm (max column sum); 0 for empty matrices."""

    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=0).max())


def _cond(a: np.ndarray) -> float:
    if a.size == 0:
        return 1.0
    return float(np.linalg.cond(a))


# -----------------------------------------------------------------------------
# Design
# -----------------------------------------------------------------------------


def build_design(
    dom: DomainSpec,
    variant: Union[str, BasisVariant, None],
    r_tilde: int,
    sample: SampleSet,
    mock: MockOptimalSet,
    *,
    normalization: Optional[str] = None,
) -> DesignSystem:
    if sample.values is None:
        raise ParameterError("sample has no function values attached")
    v = check_variant(dom, variant)
    norm = resolve_normalization(normalization)
    M = mock.M
    m = (math.isqrt(8 * M + 1) - 3) // 2
    if interpolation_size(m) != M:
        raise ParameterError(f"{M} mock-optimal nodes is not (m+1)(m+2)/2 for any m")
    if int(r_tilde) != r_tilde or r_tilde < m:
        raise ParameterError(f"regression degree must satisfy rtilde >= m (m={m}, rtilde={r_tilde})")
    R = basis_size(int(r_tilde))
    N = sample.N
    if R > N:
        raise ParameterError(f"basis dimension {R} exceeds sample size {N}")

    idx = np.asarray(mock.indices, dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= N or np.unique(idx).size != idx.size):
        raise ParameterError("mock-optimal indices must be distinct indices into the sample")
    rest = np.setdiff1d(np.arange(N), idx, assume_unique=False)
    order = np.concatenate([idx, rest])

    pts = sample.points[order]
    M_mat = mapped_basis_matrix(dom, v, int(r_tilde), pts[:, 0], pts[:, 1], norm)
    b = np.asarray(sample.values, dtype=float)[order]

    if np.linalg.matrix_rank(M_mat[:M]) < M:
        raise DegenerateConstraintsError(f"rank(C) < M={M}: mock-optimal nodes are not unisolvent")
    if np.linalg.matrix_rank(M_mat) < R:
        raise DegenerateDesignError(f"rank(M) < R~={R}: sample does not determine the regression basis")

    return DesignSystem(
        domain=dom,
        variant=v,
        normalization=norm,
        m=m,
        r_tilde=int(r_tilde),
        M_mat=M_mat,
        b=b,
        order=order,
        mock=mock,
    )


# -----------------------------------------------------------------------------
# Fit
# -----------------------------------------------------------------------------


def fit(sys: DesignSystem, log_fn: LogFn = None) -> OperatorModel:
    M, R = sys.M, sys.R
    C = sys.C_mat
    d = sys.d

    Q, RC = linalg.qr(C, mode="economic")
    R11 = RC[:, :M]
    R12 = RC[:, M:]

    diag = np.abs(np.diag(R11))
    if diag.size and diag.min() <= M * np.finfo(float).eps * diag.max():
        raise DegenerateConstraintsError("R11 is singular to working precision")

    qtd = Q.T @ d
    X = linalg.solve_triangular(R11, R12) if R > M else np.zeros((M, 0))
    y = linalg.solve_triangular(R11, qtd)
    M1 = sys.M_mat[:, :M]
    M2 = sys.M_mat[:, M:]
    V1 = M2 - M1 @ X
    b1 = sys.b - M1 @ y

    if R > M:
        Qv, Rv = linalg.qr(V1, mode="economic")
        dv = np.abs(np.diag(Rv))
        if dv.min() <= max(V1.shape) * np.finfo(float).eps * dv.max():
            raise DegenerateDesignError("reduced regression matrix V1 is rank deficient")
        a2 = linalg.solve_triangular(Rv, Qv.T @ b1)
    else:
        a2 = np.zeros(0)
    a1 = y - X @ a2
    coeffs = np.concatenate([a1, a2])

    cond_r11 = _cond(R11)
    cond_v1 = _cond(V1)
    residual = float(np.max(np.abs(C @ coeffs - d))) if M else 0.0
    diagnostics: Dict[str, Any] = {
        "cond_R11": cond_r11,
        "cond_V1tV1": cond_v1 * cond_v1,
        "constraint_residual": residual,
        "max_mock_distance": sys.mock.max_distance,
        "M": M,
        "Rtilde": R,
        "N": sys.N,
        "warnings": [],
    }
    warn = float(getattr(config, "COND_WARN", 1e12))
    if cond_v1 * cond_v1 > warn:
        msg = f"cond(V1^T V1) = {cond_v1 * cond_v1:.3g} exceeds {warn:.3g}"
        diagnostics["warnings"].append(msg)
        if log_fn is not None:
            log_fn(f"[fit] warning: {msg}")
    if log_fn is not None:
        log_fn(
            f"[fit] {sys.domain.label} m={sys.m} rtilde={sys.r_tilde} N={sys.N}: "
            f"cond(R11)={cond_r11:.3g} residual={residual:.3g}"
        )

    return OperatorModel(
        domain=sys.domain,
        variant=sys.variant,
        normalization=sys.normalization,
        m=sys.m,
        r_tilde=sys.r_tilde,
        coeffs=coeffs,
        mock_indices=np.asarray(sys.mock.indices, dtype=int),
        mock_points=np.asarray(sys.mock.points, dtype=float),
        diagnostics=diagnostics,
        factors=FitFactors(Q=Q, R11=R11, R12=R12, V1=V1, M1=M1),
    )


def fit_sample(
    dom: DomainSpec,
    sample: SampleSet,
    m: int,
    r_tilde: int,
    *,
    variant: Union[str, BasisVariant, None] = None,
    normalization: Optional[str] = None,
    log_fn: LogFn = None,
) -> tuple[DesignSystem, OperatorModel]:
    """Mock-optimal selection, design assembly and fit in one call."""

    mock = mock_optimal_select(sample, optimal_nodes(dom, m), m=m, log_fn=log_fn)
    sys = build_design(dom, variant, r_tilde, sample, mock, normalization=normalization)
    return sys, fit(sys, log_fn=log_fn)


def kkt_solve(sys: DesignSystem) -> tuple[np.ndarray, np.ndarray]:
    """Dense KKT solve [[2 M^T M, C^T], [C, 0]] [a; z] = [2 M^T b; d].

    Reference for the elimination in ``fit``; returns (a, multipliers).
    """

    A = sys.M_mat
    C = sys.C_mat
    R, M = sys.R, sys.M
    K = np.zeros((R + M, R + M))
    K[:R, :R] = 2.0 * A.T @ A
    K[:R, R:] = C.T
    K[R:, :R] = C
    rhs = np.concatenate([2.0 * A.T @ sys.b, sys.d])
    sol = np.linalg.solve(K, rhs)
    return sol[:R], sol[R:]


# -----------------------------------------------------------------------------
# Evaluation
# -----------------------------------------------------------------------------


def evaluate_operator(model: OperatorModel, pts) -> Evaluation:
    """Evaluate sum_i a_i u_i at each point; times the batch."""

    arr = np.asarray(pts, dtype=float).reshape(-1, 2)
    t0 = time.perf_counter()
    out = np.empty(arr.shape[0])
    for start in range(0, arr.shape[0], _EVAL_CHUNK):
        chunk = arr[start : start + _EVAL_CHUNK]
        try:
            B = mapped_basis_matrix(
                model.domain, model.variant, model.r_tilde, chunk[:, 0], chunk[:, 1], model.normalization
            )
        except DomainError as e:
            if e.index is not None:
                e.index = start + e.index
            raise
        out[start : start + chunk.shape[0]] = B @ model.coeffs
    return Evaluation(values=out, seconds=time.perf_counter() - t0)


# -----------------------------------------------------------------------------
# Norm bound
# -----------------------------------------------------------------------------


def norm_bound(
    sys: DesignSystem,
    factors: Union[FitFactors, OperatorModel],
    *,
    grid_points: Optional[int] = None,
) -> NormBoundReport:
    """Upper bound of the operator sup-norm from the fit factors.

    K2 = ||(V1^T V1)^-1 V1^T||_1 (N + M ||M1 R11^-1 Q^T||_1)
    K1 = ||R11^{+-1}||_1 (M ||Q^T||_1 + ||R12||_1 K2)

    Both K1 prefactors are reported; the R11^-1 one drives ``bound``.

    When rtilde == m (R~ == M) there is no regression block: V1 and R12 are
    empty, K2 is 0 and ``bound`` is the interpolation term sup * K1 alone.
    """

    f = factors.factors if isinstance(factors, OperatorModel) else factors
    if f is None:
        raise ParameterError("norm bound needs the factors of a fitted model")
    M, N = sys.M, sys.N

    if f.V1.size:
        G = f.V1.T @ f.V1
        pinv_v1 = np.linalg.solve(G, f.V1.T)
    else:
        pinv_v1 = np.zeros((0, N))
    R11_inv = linalg.solve_triangular(f.R11, np.eye(M))
    proj = f.M1 @ R11_inv @ f.Q.T

    K2 = _norm1(pinv_v1) * (N + M * _norm1(proj))
    tail = M * _norm1(f.Q.T) + _norm1(f.R12) * K2
    K1_direct = _norm1(f.R11) * tail
    K1_inverse = _norm1(R11_inv) * tail

    count = int(grid_points or getattr(config, "SUP_GRID_POINTS", 10000))
    grid = quasi_uniform_grid(sys.domain, count)
    B = mapped_basis_matrix(sys.domain, sys.variant, sys.r_tilde, grid[:, 0], grid[:, 1], sys.normalization)
    sup = float(np.abs(B).max())

    return NormBoundReport(
        K1=K1_inverse,
        K2=K2,
        bound=sup * (K1_inverse + K2),
        variant="inverse",
        sup_estimate=sup,
        K1_direct=K1_direct,
        K1_inverse=K1_inverse,
        bound_direct=sup * (K1_direct + K2),
        grid_points=int(grid.shape[0]),
    )
