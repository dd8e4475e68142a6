"""Planar domains and their maps from the unit disk.

Supported domains (all centred at the origin):

- ``disk``     unit disk, identity map
- ``ellipse``  semi-axes A >= B > 0, optional rotation ``alpha_rot``;
               linear map (u, v) -> rotate(A u, B v)
- ``annulus``  outer radius A, obscuration h (inner radius a = hA);
               radial map r = A((1-h) rho + h)
- ``polygon``  regular p-gon with circumradius 1 and a vertex at angle pi/p;
               radial map r = rho R_alpha(phi)

Every map keeps the polar angle except the ellipse. Mapped Zernike bases are
Z_j composed with the inverse map; the ``jacobian_weighted`` variant multiplies
by sqrt(J) of the inverse map so the family is orthonormal for plain dx dy.

The array functions (``*_xy``) are what the solver and cubature use; the
scalar helpers exist for the CLI and for readability in tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .. import config
from ..errors import DomainError, ParameterError
from .zernike import PolarPoint, basis_matrix, index_to_pair, normalize_angle


TAGS = ("disk", "ellipse", "annulus", "polygon")

_FIELDS: Dict[str, Tuple[str, ...]] = {
    "disk": (),
    "ellipse": ("A", "B", "alpha_rot"),
    "annulus": ("A", "h"),
    "polygon": ("p",),
}


class BasisVariant(str, Enum):
    PLAIN = "plain"
    JACOBIAN_WEIGHTED = "jacobian_weighted"

    @classmethod
    def parse(cls, value: Union[str, "BasisVariant", None]) -> Optional["BasisVariant"]:
        if value is None or isinstance(value, BasisVariant):
            return value
        s = str(value).strip().lower().replace("-", "_")
        if s in ("weighted", "jacobian"):
            s = cls.JACOBIAN_WEIGHTED.value
        try:
            return cls(s)
        except ValueError:
            raise ParameterError(f"unknown basis variant {value!r}") from None


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float


@dataclass(frozen=True)
class DomainSpec:
    tag: str
    A: float = 1.0
    B: float = 1.0
    alpha_rot: float = 0.0
    h: float = 0.0
    p: int = 0

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise ParameterError(f"unknown domain tag {self.tag!r} (expected one of {TAGS})")
        if self.tag == "ellipse":
            if not (self.A > 0 and self.B > 0):
                raise ParameterError(f"ellipse semi-axes must be positive (A={self.A}, B={self.B})")
            if self.B > self.A:
                raise ParameterError(f"ellipse requires A >= B (A={self.A}, B={self.B})")
            if not math.isfinite(self.alpha_rot):
                raise ParameterError("ellipse rotation must be finite")
        elif self.tag == "annulus":
            if not self.A > 0:
                raise ParameterError(f"annulus outer radius must be positive (A={self.A})")
            if not 0.0 < self.h < 1.0:
                raise ParameterError(f"annulus obscuration must satisfy 0 < h < 1 (h={self.h})")
        elif self.tag == "polygon":
            if int(self.p) != self.p or self.p < 3:
                raise ParameterError(f"polygon needs an integer p >= 3 (p={self.p})")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def disk(cls) -> "DomainSpec":
        return cls(tag="disk")

    @classmethod
    def ellipse(cls, A: float, B: float, alpha_rot: float = 0.0) -> "DomainSpec":
        return cls(tag="ellipse", A=float(A), B=float(B), alpha_rot=float(alpha_rot))

    @classmethod
    def annulus(cls, A: float, h: float) -> "DomainSpec":
        return cls(tag="annulus", A=float(A), h=float(h))

    @classmethod
    def polygon(cls, p: int) -> "DomainSpec":
        return cls(tag="polygon", p=int(p) if float(p).is_integer() else p)

    # ------------------------------------------------------------------
    # Derived quantities
    # ------------------------------------------------------------------

    @property
    def alpha(self) -> float:
        """Half sector angle pi/p (polygon only)."""

        if self.tag != "polygon":
            raise ParameterError("alpha is only defined for polygons")
        return math.pi / self.p

    @property
    def inner_radius(self) -> float:
        return self.h * self.A if self.tag == "annulus" else 0.0

    @property
    def outer_radius(self) -> float:
        """Radius of the smallest origin-centred disk containing the domain."""

        if self.tag in ("ellipse", "annulus"):
            return self.A
        return 1.0

    @property
    def area(self) -> float:
        if self.tag == "disk":
            return math.pi
        if self.tag == "ellipse":
            return math.pi * self.A * self.B
        if self.tag == "annulus":
            return math.pi * (self.A**2 - self.inner_radius**2)
        return 0.5 * self.p * math.sin(2.0 * math.pi / self.p)

    @property
    def label(self) -> str:
        if self.tag == "polygon":
            return f"polygon{self.p}"
        return self.tag

    # ------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        out: Dict[str, Any] = {"tag": self.tag}
        for k in _FIELDS[self.tag]:
            out[k] = d[k]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "DomainSpec":
        if not isinstance(d, dict):
            raise ParameterError("domain spec must be a JSON object")
        tag = str(d.get("tag", "")).strip().lower()
        if tag not in TAGS:
            raise ParameterError(f"unknown domain tag {d.get('tag')!r} (expected one of {TAGS})")
        extra = set(d) - {"tag"} - set(_FIELDS[tag])
        if extra:
            raise ParameterError(f"unexpected keys for {tag}: {sorted(extra)}")
        try:
            if tag == "disk":
                return cls.disk()
            if tag == "ellipse":
                return cls.ellipse(d["A"], d["B"], d.get("alpha_rot", 0.0))
            if tag == "annulus":
                return cls.annulus(d["A"], d["h"])
            return cls.polygon(d["p"])
        except KeyError as e:
            raise ParameterError(f"missing key {e.args[0]!r} for {tag}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, ParameterError):
                raise
            raise ParameterError(f"bad {tag} parameters: {e}") from None

    @classmethod
    def from_text(cls, text: str) -> "DomainSpec":
        """Parse inline JSON or ``@path/to/file.json``."""

        s = str(text or "").strip()
        if s.startswith("@"):
            path = Path(s[1:])
            try:
                s = path.read_text(encoding="utf-8")
            except OSError as e:
                raise ParameterError(f"cannot read domain file {path}: {e}") from None
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as e:
            raise ParameterError(f"malformed domain JSON: {e}") from None
        return cls.from_dict(obj)


def default_variant(dom: DomainSpec) -> BasisVariant:
    if dom.tag == "annulus":
        return BasisVariant.parse(getattr(config, "ANNULUS_VARIANT", "plain"))
    if dom.tag == "polygon":
        return BasisVariant.parse(getattr(config, "POLYGON_VARIANT", "plain"))
    return BasisVariant.PLAIN


def check_variant(dom: DomainSpec, variant: Union[str, BasisVariant, None]) -> BasisVariant:
    v = BasisVariant.parse(variant) or default_variant(dom)
    if dom.tag == "ellipse" and v is not BasisVariant.PLAIN:
        raise ParameterError("the ellipse has a constant Jacobian; only the plain basis is defined")
    return v


# -----------------------------------------------------------------------------
# Point containers
# -----------------------------------------------------------------------------


def as_xy(points: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Accept an (n, 2) array, PlanePoints, or (x, y) pairs; return float arrays."""

    if isinstance(points, PlanePoint):
        return np.array([points.x]), np.array([points.y])
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        seq = list(points)
        if seq and isinstance(seq[0], PlanePoint):
            arr = np.array([[q.x, q.y] for q in seq], dtype=float)
        else:
            arr = np.asarray(seq, dtype=float)
    if arr.size == 0:
        return np.empty(0), np.empty(0)
    arr = arr.reshape(-1, 2)
    return arr[:, 0].copy(), arr[:, 1].copy()


def to_points(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.column_stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])


# -----------------------------------------------------------------------------
# Polygon radial profile
# -----------------------------------------------------------------------------


def r_alpha(p: int, phi):
    """R_alpha(phi) = cos(alpha) / cos(U_alpha(phi)), alpha = pi/p."""

    if int(p) != p or p < 3:
        raise ParameterError(f"polygon needs an integer p >= 3 (p={p})")
    alpha = math.pi / p
    phi = normalize_angle(np.asarray(phi, dtype=float))
    u = phi - np.floor((phi + alpha) / (2.0 * alpha)) * 2.0 * alpha
    out = math.cos(alpha) / np.cos(u)
    return float(out) if np.ndim(out) == 0 else out


# -----------------------------------------------------------------------------
# Forward / inverse maps (array form)
# -----------------------------------------------------------------------------


def map_forward_polar(dom: DomainSpec, rho, phi) -> Tuple[np.ndarray, np.ndarray]:
    """Map disk points given in polar form to the domain."""

    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    tol = float(getattr(config, "DOMAIN_TOL", 1e-10))
    bad = (rho > 1.0 + tol) | (rho < 0.0)
    if np.any(bad):
        idx = int(np.flatnonzero(bad.ravel())[0])
        r = float(rho.ravel()[idx])
        raise DomainError(f"disk point {idx} has radius {r!r} outside the unit disk", index=idx, preimage_radius=r)
    rho = np.minimum(rho, 1.0)

    if dom.tag == "ellipse":
        u = rho * np.cos(phi)
        v = rho * np.sin(phi)
        ca, sa = math.cos(dom.alpha_rot), math.sin(dom.alpha_rot)
        return dom.A * u * ca - dom.B * v * sa, dom.A * u * sa + dom.B * v * ca

    if dom.tag == "annulus":
        r = dom.A * ((1.0 - dom.h) * rho + dom.h)
    elif dom.tag == "polygon":
        r = rho * r_alpha(dom.p, phi)
    else:
        r = rho
    return r * np.cos(phi), r * np.sin(phi)


def map_forward_xy(dom: DomainSpec, u, v) -> Tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return map_forward_polar(dom, np.hypot(u, v), np.arctan2(v, u))


def preimage_polar(dom: DomainSpec, x, y) -> Tuple[np.ndarray, np.ndarray]:
    """Unchecked inverse map: disk polar coordinates of plane points."""

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if dom.tag == "ellipse":
        ca, sa = math.cos(dom.alpha_rot), math.sin(dom.alpha_rot)
        u = (x * ca + y * sa) / dom.A
        v = (-x * sa + y * ca) / dom.B
        return np.hypot(u, v), normalize_angle(np.arctan2(v, u))

    r = np.hypot(x, y)
    theta = normalize_angle(np.arctan2(y, x))
    if dom.tag == "annulus":
        rho = (r - dom.h * dom.A) / (dom.A * (1.0 - dom.h))
    elif dom.tag == "polygon":
        rho = r / r_alpha(dom.p, theta)
    else:
        rho = r
    return rho, theta


def contains_xy(dom: DomainSpec, x, y, tol: Optional[float] = None) -> np.ndarray:
    t = float(getattr(config, "DOMAIN_TOL", 1e-10) if tol is None else tol)
    rho, _ = preimage_polar(dom, x, y)
    return (rho <= 1.0 + t) & (rho >= -t)


def map_inverse_xy(dom: DomainSpec, x, y) -> Tuple[np.ndarray, np.ndarray]:
    """Checked inverse map; raises DomainError naming the first offending point."""

    rho, phi = preimage_polar(dom, x, y)
    tol = float(getattr(config, "DOMAIN_TOL", 1e-10))
    bad = (rho > 1.0 + tol) | (rho < -tol) | ~np.isfinite(rho)
    if np.any(bad):
        idx = int(np.flatnonzero(np.ravel(bad))[0])
        r = float(np.ravel(rho)[idx])
        raise DomainError(
            f"point {idx} lies outside the {dom.label} (disk preimage radius {r:.12g})",
            index=idx,
            preimage_radius=r,
        )
    return np.clip(rho, 0.0, 1.0), phi


def jacobian_inverse_xy(dom: DomainSpec, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if dom.tag == "ellipse":
        return np.full(np.broadcast(x, y).shape, 1.0 / (dom.A * dom.B))
    if dom.tag == "annulus":
        r = np.hypot(x, y)
        a = dom.h * dom.A
        return (r - a) / (r * dom.A**2 * (1.0 - dom.h) ** 2)
    if dom.tag == "polygon":
        theta = np.arctan2(y, x)
        return 1.0 / np.asarray(r_alpha(dom.p, theta)) ** 2
    return np.ones(np.broadcast(x, y).shape)


def jacobian_forward_polar(dom: DomainSpec, rho, phi) -> np.ndarray:
    """|J| of the forward map with respect to (u, v), at disk points."""

    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast(rho, phi).shape
    if dom.tag == "ellipse":
        return np.full(shape, dom.A * dom.B)
    if dom.tag == "annulus":
        r = dom.A * ((1.0 - dom.h) * rho + dom.h)
        return r * dom.A * (1.0 - dom.h) / rho
    if dom.tag == "polygon":
        return np.broadcast_to(np.asarray(r_alpha(dom.p, phi)) ** 2, shape).copy()
    return np.ones(shape)


# -----------------------------------------------------------------------------
# Mapped bases
# -----------------------------------------------------------------------------


def basis_scale_xy(dom: DomainSpec, variant: BasisVariant, x, y, rho, phi) -> Optional[np.ndarray]:
    """Per-point factor multiplying Z_j o phi^-1, or None when it is 1."""

    if dom.tag == "ellipse":
        return None
    if variant is not BasisVariant.JACOBIAN_WEIGHTED:
        return None
    if dom.tag == "annulus":
        return np.sqrt(np.maximum(jacobian_inverse_xy(dom, x, y), 0.0))
    if dom.tag == "polygon":
        return 1.0 / np.asarray(r_alpha(dom.p, phi))
    return None


def mapped_basis_matrix(
    dom: DomainSpec,
    variant: Union[str, BasisVariant, None],
    r_tilde: int,
    x,
    y,
    normalization: Optional[str] = None,
) -> np.ndarray:
    """Rows u_0(x_i) .. u_{R~-1}(x_i) of the mapped basis; shape (n, R~)."""

    v = check_variant(dom, variant)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    rho, phi = map_inverse_xy(dom, x, y)
    mat = basis_matrix(r_tilde, rho, phi, normalization)
    if dom.tag == "ellipse":
        mat *= 1.0 / math.sqrt(dom.A * dom.B)
        return mat
    scale = basis_scale_xy(dom, v, x, y, rho, phi)
    if scale is not None:
        mat *= scale[..., None]
    return mat


def gram_weight_xy(dom: DomainSpec, variant: Union[str, BasisVariant, None], x, y) -> np.ndarray:
    """Weight w such that the mapped basis is orthonormal for w dx dy (unit normalization)."""

    v = check_variant(dom, variant)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if dom.tag in ("annulus", "polygon") and v is BasisVariant.PLAIN:
        return jacobian_inverse_xy(dom, x, y)
    return np.ones(np.broadcast(x, y).shape)


# -----------------------------------------------------------------------------
# Scalar helpers
# -----------------------------------------------------------------------------


def map_forward(dom: DomainSpec, disk_pt: Union[PolarPoint, Sequence[float]]) -> PlanePoint:
    if isinstance(disk_pt, PolarPoint):
        x, y = map_forward_polar(dom, disk_pt.rho, disk_pt.phi)
    else:
        u, v = disk_pt
        x, y = map_forward_xy(dom, u, v)
    return PlanePoint(float(x), float(y))


def map_inverse(dom: DomainSpec, pt: Union[PlanePoint, Sequence[float]]) -> PolarPoint:
    x, y = (pt.x, pt.y) if isinstance(pt, PlanePoint) else pt
    rho, phi = map_inverse_xy(dom, float(x), float(y))
    return PolarPoint(rho=float(rho), phi=float(phi))


def jacobian_inverse_map(dom: DomainSpec, pt: Union[PlanePoint, Sequence[float]]) -> float:
    x, y = (pt.x, pt.y) if isinstance(pt, PlanePoint) else pt
    map_inverse_xy(dom, float(x), float(y))
    return float(jacobian_inverse_xy(dom, float(x), float(y)))


def mapped_basis_eval(
    dom: DomainSpec,
    variant: Union[str, BasisVariant, None],
    j: int,
    pt: Union[PlanePoint, Sequence[float]],
    normalization: Optional[str] = None,
) -> float:
    idx = index_to_pair(j)
    x, y = (pt.x, pt.y) if isinstance(pt, PlanePoint) else pt
    row = mapped_basis_matrix(dom, variant, idx.m, [float(x)], [float(y)], normalization)
    return float(row[0, j])

