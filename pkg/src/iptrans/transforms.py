"""Three involutions of the plane that swap coordinates measure-preservingly.

``f1``
    (x, y) |-> (y*(1 + b*x*y)/(1 + a*x*y), x*(1 + a*x*y)/(1 + b*x*y)) on the
    open positive quadrant, parameters a, b >= 0 with a != b.  Smooth, keeps
    the product x*y invariant, Jacobian determinant identically -1.
``f2``
    (x, y) |-> (min(x, 0) - y, min(x, y, 0) - x - y) on the whole plane.
    Piecewise linear on five open regions cut by the axes and by the diagonal
    x = y restricted to the third quadrant; each piece is a unimodular
    integer matrix with determinant -1.
``f3``
    (x, y) |-> (min(-x, y), y + x - min(-x, y)) on the whole plane, carrying
    shape parameters (c1, c2) only to name its rectangle-to-rectangle
    restriction [-c1, c2] x [-c2, inf) -> [-c2, c1] x [-c1, inf).  Piecewise
    linear on the two half-planes cut by x = -y, determinant -1 on each.

All maps are involutions: applying them twice returns the starting point.
Points are passed as separate x and y arrays (scalars broadcast) and all
operations vectorize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TransformSpec",
    "F1Partials",
    "POSITIVE_QUADRANT",
    "BOUNDARY",
    "R1",
    "R2",
    "R3",
    "R4",
    "R5",
    "apply",
    "region_of",
    "region_matrix",
    "jacobian_det",
    "f1_partials",
    "involution_defect",
    "f3_domain_map_check",
]

F1 = "f1"
F2 = "f2"
F3 = "f3"

POSITIVE_QUADRANT = "positive_quadrant"
BOUNDARY = "boundary"
R1, R2, R3, R4, R5 = "r1", "r2", "r3", "r4", "r5"


@dataclass(frozen=True)
class TransformSpec:
    kind: str
    alpha: float | None = None
    beta: float | None = None
    c1: float | None = None
    c2: float | None = None

    def __post_init__(self):
        if self.kind == F1:
            if self.alpha is None or self.beta is None:
                raise ValueError("f1 needs alpha and beta")
            a, b = float(self.alpha), float(self.beta)
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("alpha and beta must be finite")
            if a < 0.0 or b < 0.0:
                raise ValueError("alpha and beta must be nonnegative")
            if a == b:
                raise ValueError("alpha and beta must differ")
            object.__setattr__(self, "alpha", a)
            object.__setattr__(self, "beta", b)
        elif self.kind == F2:
            pass
        elif self.kind == F3:
            if self.c1 is None or self.c2 is None:
                raise ValueError("f3 needs c1 and c2")
            c1, c2 = float(self.c1), float(self.c2)
            if not (math.isfinite(c1) and math.isfinite(c2)):
                raise ValueError("c1 and c2 must be finite")
            if c1 <= 0.0 or c2 <= 0.0:
                raise ValueError("c1 and c2 must be strictly positive")
            object.__setattr__(self, "c1", c1)
            object.__setattr__(self, "c2", c2)
        else:
            raise ValueError(f"unknown transform kind {self.kind!r}")

    @classmethod
    def f1(cls, alpha: float, beta: float) -> "TransformSpec":
        return cls(kind=F1, alpha=alpha, beta=beta)

    @classmethod
    def f2(cls) -> "TransformSpec":
        return cls(kind=F2)

    @classmethod
    def f3(cls, c1: float, c2: float) -> "TransformSpec":
        return cls(kind=F3, c1=c1, c2=c2)

    def label(self) -> str:
        if self.kind == F1:
            return f"f1(alpha={self.alpha:g},beta={self.beta:g})"
        if self.kind == F3:
            return f"f3(c1={self.c1:g},c2={self.c2:g})"
        return "f2"


def _as_xy(x, y) -> tuple[np.ndarray, np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scalar = x.ndim == 0 and y.ndim == 0
    x, y = np.atleast_1d(x), np.atleast_1d(y)
    x, y = np.broadcast_arrays(x, y)
    return x, y, scalar


def apply(spec: TransformSpec, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Map (x, y) to (u, v); vectorized, scalars in means scalars out.

    f1 is only defined on the open positive quadrant and raises ValueError
    for any point off it; f2 and f3 accept the whole plane.
    """
    x, y, scalar = _as_xy(x, y)
    if spec.kind == F1:
        if np.any(x <= 0.0) or np.any(y <= 0.0):
            raise ValueError("f1 is defined on the open positive quadrant only")
        t = x * y
        ga = 1.0 + spec.alpha * t
        gb = 1.0 + spec.beta * t
        u = y * gb / ga
        v = x * ga / gb
    elif spec.kind == F2:
        u = np.minimum(x, 0.0) - y
        v = np.minimum(np.minimum(x, y), 0.0) - x - y
    else:
        m = np.minimum(-x, y)
        u = m
        v = y + x - m
    if scalar:
        return u[()].item(), v[()].item()
    return u, v


def region_of(spec: TransformSpec, x, y):
    """Open region containing each point, or the boundary indicator.

    f1: ``positive_quadrant`` inside the open quadrant, ``boundary`` anywhere
    else (the map is undefined off the closure, so everything outside the
    open quadrant gets the boundary label).

    f2: five open regions; r1 = {x>0, y>0}, r2 = {x<0, y>0},
    r3 = {x<y<0}, r4 = {y<x<0}, r5 = {x>0, y<0}.  The dividing set (either
    axis, or the diagonal x = y in the open third quadrant) is ``boundary``.

    f3: r1 = {x > -y}, r2 = {x < -y}, and ``boundary`` on the line x = -y.
    """
    x, y, scalar = _as_xy(x, y)
    out = np.full(x.shape, BOUNDARY, dtype=object)
    if spec.kind == F1:
        out[(x > 0.0) & (y > 0.0)] = POSITIVE_QUADRANT
    elif spec.kind == F2:
        out[(x > 0.0) & (y > 0.0)] = R1
        out[(x < 0.0) & (y > 0.0)] = R2
        out[(x < y) & (y < 0.0)] = R3
        out[(y < x) & (x < 0.0)] = R4
        out[(x > 0.0) & (y < 0.0)] = R5
    else:
        out[x > -y] = R1
        out[x < -y] = R2
    if scalar:
        return out[()].item() if out.shape == () else out[0]
    return out


# per-region Jacobian matrices of the piecewise-linear maps
_F2_MATRICES = {
    R1: np.array([[0.0, -1.0], [-1.0, -1.0]]),  # (x,y) -> (-y, -x-y)
    R2: np.array([[1.0, -1.0], [0.0, -1.0]]),   # (x,y) -> (x-y, -y)
    R3: np.array([[1.0, -1.0], [0.0, -1.0]]),   # (x,y) -> (x-y, -y)
    R4: np.array([[1.0, -1.0], [-1.0, 0.0]]),   # (x,y) -> (x-y, -x)
    R5: np.array([[0.0, -1.0], [-1.0, 0.0]]),   # (x,y) -> (-y, -x)
}
_F3_MATRICES = {
    R1: np.array([[-1.0, 0.0], [2.0, 1.0]]),    # (x,y) -> (-x, y+2x)
    R2: np.array([[0.0, 1.0], [1.0, 0.0]]),     # (x,y) -> (y, x)
}


def region_matrix(spec: TransformSpec, label: str) -> np.ndarray:
    """Constant Jacobian matrix of a piecewise-linear region (f2/f3 only)."""
    if spec.kind == F2:
        return _F2_MATRICES[label].copy()
    if spec.kind == F3:
        return _F3_MATRICES[label].copy()
    raise ValueError("region_matrix applies to the piecewise-linear maps f2 and f3")


@dataclass(frozen=True)
class F1Partials:
    du_dx: np.ndarray
    du_dy: np.ndarray
    dv_dx: np.ndarray
    dv_dy: np.ndarray
    d2u_dydx: np.ndarray
    d2v_dydx: np.ndarray


def f1_partials(spec: TransformSpec, x, y, via: str = "xy") -> F1Partials:
    """First partials and the two mixed second partials of f1.

    via="xy" evaluates the closed forms in the source coordinates; via="uv"
    evaluates the equivalent expressions written in the image coordinates
    (u, v) = apply(spec, x, y).  The two routes must agree to rounding, which
    is one of the identities the test suite pins down.
    """
    if spec.kind != F1:
        raise ValueError("partial derivatives are provided for f1 only")
    x, y, scalar = _as_xy(x, y)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("f1 is defined on the open positive quadrant only")
    a, b = spec.alpha, spec.beta
    if via == "xy":
        t = x * y
        ga = 1.0 + a * t
        gb = 1.0 + b * t
        du_dx = (b - a) * y * y / ga**2
        du_dy = (1.0 + 2.0 * b * t + a * b * t * t) / ga**2
        dv_dx = (1.0 + 2.0 * a * t + a * b * t * t) / gb**2
        dv_dy = (a - b) * x * x / gb**2
        d2u_dydx = 2.0 * (b - a) * y / ga**3
        d2v_dydx = 2.0 * (a - b) * x / gb**3
    elif via == "uv":
        u, v = apply(spec, x, y)
        u, v = np.atleast_1d(u), np.atleast_1d(v)
        t = u * v  # the product is invariant: u*v == x*y
        ga = 1.0 + a * t
        gb = 1.0 + b * t
        du_dx = (b - a) * u * u / gb**2
        du_dy = (1.0 + 2.0 * b * t + a * b * t * t) / ga**2
        dv_dx = (1.0 + 2.0 * a * t + a * b * t * t) / gb**2
        dv_dy = (a - b) * v * v / ga**2
        d2u_dydx = 2.0 * (b - a) * u / (ga**2 * gb)
        d2v_dydx = 2.0 * (a - b) * v / (gb**2 * ga)
    else:
        raise ValueError('via must be "xy" or "uv"')
    if scalar:
        return F1Partials(*(float(arr[0]) for arr in
                            (du_dx, du_dy, dv_dx, dv_dy, d2u_dydx, d2v_dydx)))
    return F1Partials(du_dx, du_dy, dv_dx, dv_dy, d2u_dydx, d2v_dydx)


def jacobian_det(spec: TransformSpec, x, y) -> np.ndarray:
    """Analytic Jacobian determinant at each point.

    For f1 the determinant is assembled from the closed-form partials (it
    equals -1 up to rounding); for f2/f3 it is the exact determinant of the
    region's constant matrix, -1.0 on every open region.  Points on the
    dividing lines, where the maps are not differentiable, raise.
    """
    x, y, scalar = _as_xy(x, y)
    if spec.kind == F1:
        parts = f1_partials(spec, x, y, via="xy")
        det = np.atleast_1d(parts.du_dx * parts.dv_dy - parts.du_dy * parts.dv_dx)
    else:
        regions = np.atleast_1d(region_of(spec, x, y))
        if np.any(regions == BOUNDARY):
            raise ValueError("jacobian is undefined on the region boundary set")
        matrices = _F2_MATRICES if spec.kind == F2 else _F3_MATRICES
        det = np.full(x.shape, np.nan)
        for label, m in matrices.items():
            det[regions == label] = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if scalar:
        return float(det[0])
    return det


def involution_defect(spec: TransformSpec, x, y) -> np.ndarray:
    """Max-norm of apply(apply(p)) - p, relative to the max-norm of p.

    Points with max-norm zero report the absolute defect instead.
    """
    x, y, scalar = _as_xy(x, y)
    u, v = apply(spec, x, y)
    xx, yy = apply(spec, u, v)
    diff = np.maximum(np.abs(xx - x), np.abs(yy - y))
    norm = np.maximum(np.abs(x), np.abs(y))
    defect = diff / np.where(norm > 0.0, norm, 1.0)
    if scalar:
        return float(np.atleast_1d(defect)[0])
    return defect


def f3_domain_map_check(spec: TransformSpec, x, y) -> np.ndarray:
    """True where an f3 source-rectangle point maps into the target rectangle.

    Source is [-c1, c2] x [-c2, inf); target is [-c2, c1] x [-c1, inf).
    Raises if any input point lies outside the source rectangle, so a False
    anywhere in the result is a genuine containment violation of the map.
    """
    if spec.kind != F3:
        raise ValueError("the rectangle containment check applies to f3 only")
    x, y, scalar = _as_xy(x, y)
    c1, c2 = spec.c1, spec.c2
    if np.any((x < -c1) | (x > c2) | (y < -c2)):
        raise ValueError("input points must lie in [-c1, c2] x [-c2, inf)")
    u, v = apply(spec, x, y)
    ok = (u >= -c2) & (u <= c1) & (v >= -c1)
    if scalar:
        return bool(np.atleast_1d(ok)[0])
    return ok
