"""Input/output law bookkeeping for the three independence-preserving maps.

Each case bundles a parameterized transform with the unique product law it
preserves, in the following sense: when X and Y are independent draws from
the stated input laws and (U, V) is the image of (X, Y) under the map, then
U and V are again independent with the stated output laws.

``gig``
    X ~ gig(lam, c1*alpha, c2), Y ~ gig(lam, c2*beta, c1) through the smooth
    quadrant map f1(alpha, beta) gives U ~ gig(lam, c2*alpha, c1),
    V ~ gig(lam, c1*beta, c2).
``al``
    X ~ al(p, q), Y ~ al(p+q, r) through the piecewise-linear map f2 gives
    U ~ al(r, q), V ~ al(q+r, p).
``sexp``
    X ~ stexp(lam, -c1, c2), Y ~ sexp(lam, -c2) through f3(c1, c2) gives
    U ~ stexp(lam, -c2, c1), V ~ sexp(lam, -c1).

Because every map has unit absolute Jacobian, the product density is
transported exactly: f_U(u) * f_V(v) == f_X(x) * f_Y(y) pointwise.  The
``density_transport_residual`` op measures that identity in the log domain;
``iterate_chain`` runs the stationary recursion X_{n+1} = first coordinate of
the map applied to (X_n, fresh Y) that exists at each family's fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dists
from . import transforms
from .distributions import DistributionSpec, _ppf
from .rng import make_generator, uniform_open

__all__ = [
    "GigCaseParams",
    "AlCaseParams",
    "SexpCaseParams",
    "TheoremCase",
    "LawQuadruple",
    "transform_of",
    "predicted_laws",
    "swapped_case",
    "fixed_point_case",
    "density_transport_residual",
    "iterate_chain",
]

GIG_CASE = "gig"
AL_CASE = "al"
SEXP_CASE = "sexp"


@dataclass(frozen=True)
class GigCaseParams:
    lam: float
    c1: float
    c2: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("lam", "c1", "c2", "alpha", "beta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.c1 <= 0.0 or self.c2 <= 0.0:
            raise ValueError("c1 and c2 must be strictly positive")
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise ValueError("alpha and beta must be strictly positive here: "
                             "a zero rate would leave an input law unnormalizable")
        if self.alpha == self.beta:
            raise ValueError("alpha and beta must differ")


@dataclass(frozen=True)
class AlCaseParams:
    p: float
    q: float
    r: float

    def __post_init__(self):
        for name in ("p", "q", "r"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and strictly positive")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class SexpCaseParams:
    lam: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("lam", "c1", "c2"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and strictly positive")
            object.__setattr__(self, name, value)


_CASE_TYPES = {GIG_CASE: GigCaseParams, AL_CASE: AlCaseParams, SEXP_CASE: SexpCaseParams}


@dataclass(frozen=True)
class TheoremCase:
    theorem: str
    params: GigCaseParams | AlCaseParams | SexpCaseParams

    def __post_init__(self):
        expected = _CASE_TYPES.get(self.theorem)
        if expected is None:
            raise ValueError(f"unknown theorem {self.theorem!r}")
        if not isinstance(self.params, expected):
            raise TypeError(
                f"theorem {self.theorem!r} needs {expected.__name__}, "
                f"got {type(self.params).__name__}"
            )

    @classmethod
    def gig(cls, lam: float, c1: float, c2: float, alpha: float, beta: float) -> "TheoremCase":
        return cls(GIG_CASE, GigCaseParams(lam, c1, c2, alpha, beta))

    @classmethod
    def al(cls, p: float, q: float, r: float) -> "TheoremCase":
        return cls(AL_CASE, AlCaseParams(p, q, r))

    @classmethod
    def sexp(cls, lam: float, c1: float, c2: float) -> "TheoremCase":
        return cls(SEXP_CASE, SexpCaseParams(lam, c1, c2))

    def to_config(self) -> dict:
        return {"theorem": self.theorem, "params": vars(self.params).copy()}

    @classmethod
    def from_config(cls, config: dict) -> "TheoremCase":
        theorem = config["theorem"]
        expected = _CASE_TYPES.get(theorem)
        if expected is None:
            raise ValueError(f"unknown theorem {theorem!r}")
        return cls(theorem, expected(**config["params"]))

    def label(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in vars(self.params).items())
        return f"{self.theorem}({inner})"


@dataclass(frozen=True)
class LawQuadruple:
    x_law: DistributionSpec
    y_law: DistributionSpec
    u_law: DistributionSpec
    v_law: DistributionSpec


def transform_of(case: TheoremCase) -> transforms.TransformSpec:
    """The plane involution the case's laws are matched to."""
    p = case.params
    if case.theorem == GIG_CASE:
        return transforms.TransformSpec.f1(p.alpha, p.beta)
    if case.theorem == AL_CASE:
        return transforms.TransformSpec.f2()
    return transforms.TransformSpec.f3(p.c1, p.c2)


def predicted_laws(case: TheoremCase) -> LawQuadruple:
    """The four marginal laws (X, Y, U, V) asserted by the case's theorem."""
    p = case.params
    if case.theorem == GIG_CASE:
        return LawQuadruple(
            x_law=DistributionSpec.gig(p.lam, p.c1 * p.alpha, p.c2),
            y_law=DistributionSpec.gig(p.lam, p.c2 * p.beta, p.c1),
            u_law=DistributionSpec.gig(p.lam, p.c2 * p.alpha, p.c1),
            v_law=DistributionSpec.gig(p.lam, p.c1 * p.beta, p.c2),
        )
    if case.theorem == AL_CASE:
        return LawQuadruple(
            x_law=DistributionSpec.al(p.p, p.q),
            y_law=DistributionSpec.al(p.p + p.q, p.r),
            u_law=DistributionSpec.al(p.r, p.q),
            v_law=DistributionSpec.al(p.q + p.r, p.p),
        )
    return LawQuadruple(
        x_law=DistributionSpec.stexp(p.lam, -p.c1, p.c2),
        y_law=DistributionSpec.sexp(p.lam, -p.c2),
        u_law=DistributionSpec.stexp(p.lam, -p.c2, p.c1),
        v_law=DistributionSpec.sexp(p.lam, -p.c1),
    )


def swapped_case(case: TheoremCase) -> TheoremCase:
    """The case describing the reverse direction of the same involution.

    Its input laws are the original case's output laws, so predicted_laws of
    the swap must return the original quadruple with (x, y) and (u, v)
    exchanged; that duality is exercised by the tests.
    """
    p = case.params
    if case.theorem == GIG_CASE:
        return TheoremCase.gig(p.lam, p.c2, p.c1, p.alpha, p.beta)
    if case.theorem == AL_CASE:
        return TheoremCase.al(p.r, p.q, p.p)
    return TheoremCase.sexp(p.lam, p.c2, p.c1)


def fixed_point_case(case: TheoremCase) -> TheoremCase | None:
    """The case itself when (U, V) has the same product law as (X, Y), else None.

    gig needs c1 == c2, al needs r == p, sexp needs c1 == c2.
    """
    p = case.params
    if case.theorem == GIG_CASE:
        return case if p.c1 == p.c2 else None
    if case.theorem == AL_CASE:
        return case if p.r == p.p else None
    return case if p.c1 == p.c2 else None


def density_transport_residual(case: TheoremCase, x, y) -> np.ndarray:
    """|exp(log f_U(u) + log f_V(v) - log f_X(x) - log f_Y(y)) - 1| per point.

    The points must lie in the open support of the input product law (and off
    the piecewise-linear boundary sets); everything is computed in the log
    domain, so the residual reflects the identity itself rather than
    normalizer overflow.
    """
    laws = predicted_laws(case)
    spec = transform_of(case)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    u, v = transforms.apply(spec, x, y)
    log_lhs = dists.log_pdf(laws.u_law, u) + dists.log_pdf(laws.v_law, v)
    log_rhs = dists.log_pdf(laws.x_law, x) + dists.log_pdf(laws.y_law, y)
    if not (np.all(np.isfinite(log_rhs)) and np.all(np.isfinite(log_lhs))):
        raise ValueError("points must lie in the open support of the input laws")
    return np.abs(np.expm1(log_lhs - log_rhs))


def iterate_chain(case: TheoremCase, steps: int, n_chains: int, seed: int) -> np.ndarray:
    """Trajectories of X_{n+1} = first_coordinate(map(X_n, Y_n)), Y_n fresh.

    Only defined at a fixed-point case (where the recursion is stationary by
    construction); raises ValueError otherwise.  Returns an array of shape
    (steps + 1, n_chains): row 0 is the initial draw X_0 ~ x_law and row k
    the state after k steps.  All chains advance in lockstep on independent
    uniforms from one Philox stream, so chains are mutually independent and
    the full array is reproducible from the seed.
    """
    if fixed_point_case(case) is None:
        raise ValueError("chain iteration is defined at fixed-point cases only")
    steps = int(steps)
    n_chains = int(n_chains)
    if steps < 0 or n_chains < 1:
        raise ValueError("steps must be >= 0 and n_chains positive")
    laws = predicted_laws(case)
    spec = transform_of(case)
    rng = make_generator(seed)
    out = np.empty((steps + 1, n_chains))
    out[0] = _ppf(laws.x_law, uniform_open(rng, n_chains))
    for k in range(1, steps + 1):
        y = _ppf(laws.y_law, uniform_open(rng, n_chains))
        u, _ = transforms.apply(spec, out[k - 1], y)
        out[k] = u
    return out
