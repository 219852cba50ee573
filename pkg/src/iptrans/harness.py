"""Experiment orchestration: configs in, deterministic JSON reports out.

A report is a plain dict with the shape

    {"theorem": ..., "mode": ..., "params": {...}, "n": ..., "seed": ...,
     "config": {...}, "checks": [{"name", "statistic", "threshold", "pass"},
     ...], "pass": bool}

and is serialized with sorted keys and no timestamps, so rerunning the same
resolved config and seed reproduces the file byte for byte.  Files are
written atomically (temp file plus rename).

Modes
-----
identity
    Deterministic map checks on quasi-random in-support points: involution
    defect, analytic and finite-difference Jacobian determinants, pointwise
    density transport, and (for the f3 case) rectangle containment.
montecarlo
    Fresh X, Y batches pushed through the map; KS tests of all four
    marginals against their predicted laws plus a permutation independence
    test on (U, V).
chain
    The stationary recursion at a fixed-point case; KS tests of X_n at
    checkpoints and a guard that the KS trajectory is not drifting upward.
power
    A negative control: one input-law rate is multiplied by a perturbation
    factor, and the independence test on (U, V) must reject.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import distributions as dists
from . import transforms
from .distributions import DistributionSpec, _ppf, pdf, sample
from .stats import KS_CRITICAL_1PCT, TestReport, independence_test, ks_one_sample
from .theorems import (
    TheoremCase,
    density_transport_residual,
    fixed_point_case,
    iterate_chain,
    predicted_laws,
    transform_of,
)

__all__ = [
    "DEFAULT_SEED",
    "SEED_ENV_VAR",
    "ExperimentConfig",
    "default_case_params",
    "perturbed_laws",
    "run_experiment",
    "fd_jacobian_det",
    "atomic_write_text",
    "write_report",
    "emit_plot_data",
]

SEED_ENV_VAR = "IPTRANS_SEED"
DEFAULT_SEED = 12345

# documented default cells; chain mode needs the fixed-point variants
_CASE_DEFAULTS = {
    "gig": {"lam": 0.5, "c1": 1.0, "c2": 2.0, "alpha": 1.0, "beta": 0.5},
    "al": {"p": 1.0, "q": 2.0, "r": 3.0},
    "sexp": {"lam": 1.0, "c1": 2.0, "c2": 3.0},
}
_FIXED_POINT_DEFAULTS = {
    "gig": {"lam": -0.5, "c1": 1.0, "c2": 1.0, "alpha": 2.0, "beta": 1.0},
    "al": {"p": 1.0, "q": 2.0, "r": 1.0},
    "sexp": {"lam": 1.0, "c1": 2.0, "c2": 2.0},
}
# cells where the documented perturbation has decisive power at n = 5000
_POWER_DEFAULTS = {
    "gig": {"lam": 0.5, "c1": 1.0, "c2": 2.0, "alpha": 5.0, "beta": 0.01},
    "al": {"p": 1.0, "q": 2.0, "r": 3.0},
    "sexp": {"lam": 1.0, "c1": 1.0, "c2": 1.0},
}

# deterministic-map tolerances
INVOLUTION_TOL = 1e-12
JACOBIAN_ANALYTIC_TOL = 1e-12
JACOBIAN_FD_TOL = 1e-6
TRANSPORT_TOL = {"gig": 1e-8, "al": 1e-12, "sexp": 1e-12}


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return DEFAULT_SEED
    return int(raw)


def default_case_params(theorem: str, mode: str) -> dict:
    if mode == "chain":
        table = _FIXED_POINT_DEFAULTS
    elif mode == "power":
        table = _POWER_DEFAULTS
    else:
        table = _CASE_DEFAULTS
    if theorem not in table:
        raise ValueError(f"unknown theorem {theorem!r}")
    return dict(table[theorem])


@dataclass
class ExperimentConfig:
    theorem: str = "gig"
    mode: str = "montecarlo"
    params: dict | None = None
    n: int = 100_000
    seed: int | None = None
    steps: int = 100
    chains: int = 10_000
    permutations: int = 200
    independence_n: int = 5000
    perturb: float = 1.5
    identity_points: int = 1000
    out: str | None = None

    def resolved(self) -> "ExperimentConfig":
        cfg = dataclasses.replace(self)
        if cfg.mode not in ("identity", "montecarlo", "chain", "power"):
            raise ValueError(f"unknown mode {cfg.mode!r}")
        if cfg.params is None:
            cfg.params = default_case_params(cfg.theorem, cfg.mode)
        if cfg.seed is None:
            cfg.seed = default_seed()
        return cfg

    def case(self) -> TheoremCase:
        return TheoremCase.from_config({"theorem": self.theorem, "params": self.params})

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


def _child_seeds(seed: int, count: int) -> list[int]:
    state = np.random.SeedSequence(int(seed)).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def _halton_support_points(case: TheoremCase, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic quasi-random points in the open input-law support."""
    laws = predicted_laws(case)
    engine = qmc.Halton(d=2, scramble=False)
    grid = engine.random(count + 1)[1:]  # the first Halton point is the origin
    lo, hi = 1e-3, 1.0 - 1e-3
    grid = lo + (hi - lo) * grid
    x = _ppf(laws.x_law, grid[:, 0])
    y = _ppf(laws.y_law, grid[:, 1])
    return x, y


def _distance_to_nondifferentiable_set(
    spec: transforms.TransformSpec, x: np.ndarray, y: np.ndarray
) -> np.ndarray:
    if spec.kind == transforms.F1:
        return np.minimum(x, y)
    if spec.kind == transforms.F2:
        diag = np.where((x < 0.0) & (y < 0.0), np.abs(x - y) / math.sqrt(2.0), np.inf)
        return np.minimum(np.minimum(np.abs(x), np.abs(y)), diag)
    return np.abs(x + y) / math.sqrt(2.0)


def fd_jacobian_det(spec: transforms.TransformSpec, x, y) -> np.ndarray:
    """Central finite-difference Jacobian determinant, step kept inside the
    point's smoothness region so the piecewise-linear maps differentiate
    cleanly."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    # relative step 1e-6 scaled by each coordinate's own magnitude (a shared
    # step would be far too coarse for the smaller coordinate of a skewed
    # point), floored at 1e-9 of the point scale so the difference quotient
    # stays above rounding noise from the larger coordinate
    room = 0.4 * _distance_to_nondifferentiable_set(spec, x, y)
    scale = 1.0 + np.maximum(np.abs(x), np.abs(y))
    hx = np.minimum(np.maximum(1e-6 * np.abs(x), 1e-9 * scale), room)
    hy = np.minimum(np.maximum(1e-6 * np.abs(y), 1e-9 * scale), room)
    if np.any(~(hx > 0.0)) or np.any(~(hy > 0.0)):
        raise ValueError("finite differences need points off the boundary set")
    ux1, vx1 = transforms.apply(spec, x + hx, y)
    ux0, vx0 = transforms.apply(spec, x - hx, y)
    uy1, vy1 = transforms.apply(spec, x, y + hy)
    uy0, vy0 = transforms.apply(spec, x, y - hy)
    du_dx = (ux1 - ux0) / (2.0 * hx)
    dv_dx = (vx1 - vx0) / (2.0 * hx)
    du_dy = (uy1 - uy0) / (2.0 * hy)
    dv_dy = (vy1 - vy0) / (2.0 * hy)
    return du_dx * dv_dy - du_dy * dv_dx


def _check(name: str, statistic: float, threshold: float, passed: bool, **extra) -> TestReport:
    return TestReport(name=name, statistic=float(statistic), threshold=float(threshold),
                      passed=bool(passed), **extra)


def _identity_checks(cfg: ExperimentConfig) -> list[TestReport]:
    case = cfg.case()
    spec = transform_of(case)
    x, y = _halton_support_points(case, cfg.identity_points)
    checks = []

    defect = float(transforms.involution_defect(spec, x, y).max())
    checks.append(_check("involution_defect_max", defect, INVOLUTION_TOL,
                         defect <= INVOLUTION_TOL, n=len(x)))

    jac_err = float(np.max(np.abs(transforms.jacobian_det(spec, x, y) + 1.0)))
    checks.append(_check("jacobian_analytic_max_err", jac_err, JACOBIAN_ANALYTIC_TOL,
                         jac_err <= JACOBIAN_ANALYTIC_TOL, n=len(x)))

    fd_err = float(np.max(np.abs(fd_jacobian_det(spec, x, y) + 1.0)))
    checks.append(_check("jacobian_fd_max_err", fd_err, JACOBIAN_FD_TOL,
                         fd_err <= JACOBIAN_FD_TOL, n=len(x)))

    tol = TRANSPORT_TOL[cfg.theorem]
    resid = float(density_transport_residual(case, x, y).max())
    checks.append(_check("transport_residual_max", resid, tol, resid <= tol, n=len(x)))

    if cfg.theorem == "sexp":
        violations = int((~transforms.f3_domain_map_check(spec, x, y)).sum())
        checks.append(_check("f3_containment_violations", violations, 1.0,
                             violations == 0, n=len(x)))
    return checks


def _montecarlo_checks(cfg: ExperimentConfig) -> list[TestReport]:
    case = cfg.case()
    laws = predicted_laws(case)
    spec = transform_of(case)
    sx, sy, sperm = _child_seeds(cfg.seed, 3)
    x = sample(laws.x_law, cfg.n, sx).values
    y = sample(laws.y_law, cfg.n, sy).values
    u, v = transforms.apply(spec, x, y)
    checks = [
        ks_one_sample(x, lambda t: dists.cdf(laws.x_law, t), name="ks_x"),
        ks_one_sample(y, lambda t: dists.cdf(laws.y_law, t), name="ks_y"),
        ks_one_sample(u, lambda t: dists.cdf(laws.u_law, t), name="ks_u"),
        ks_one_sample(v, lambda t: dists.cdf(laws.v_law, t), name="ks_v"),
    ]
    m = min(cfg.independence_n, cfg.n)
    checks.append(independence_test(u[:m], v[:m], permutations=cfg.permutations,
                                    seed=sperm, name="independence_uv"))
    return checks


def _chain_checkpoints(steps: int) -> list[int]:
    if steps >= 100:
        base = [1, 10, 50, 100]
    else:
        base = sorted({1, max(1, steps // 10), max(1, steps // 2), steps})
    return [c for c in base if c <= steps]


def _chain_checks(cfg: ExperimentConfig) -> list[TestReport]:
    case = cfg.case()
    if fixed_point_case(case) is None:
        raise ValueError(
            "chain mode needs a fixed-point case (gig/sexp: c1 == c2, al: r == p)"
        )
    laws = predicted_laws(case)
    traj = iterate_chain(case, steps=cfg.steps, n_chains=cfg.chains, seed=cfg.seed)
    checks = []
    ds = []
    for step in _chain_checkpoints(cfg.steps):
        rep = ks_one_sample(traj[step], lambda t: dists.cdf(laws.x_law, t),
                            name=f"ks_chain_step_{step}")
        ds.append(rep.statistic)
        checks.append(rep)
    monotone_up = all(b > a for a, b in zip(ds, ds[1:])) if len(ds) > 1 else False
    checks.append(_check("ks_drift_monotone_up", 1.0 if monotone_up else 0.0, 1.0,
                         not monotone_up, n=len(ds)))
    return checks


def perturbed_laws(case: TheoremCase, factor: float):
    """The documented negative-control pair: one input-law rate scaled.

    gig: the reciprocal-side rate of the X law; al: the positive-side rate
    of the Y law; sexp: the rate of the X law.  Everything else keeps the
    law predicted by the case.
    """
    if not (math.isfinite(factor) and factor > 0.0):
        raise ValueError("perturbation factor must be positive and finite")
    laws = predicted_laws(case)
    p = case.params
    if case.theorem == "gig":
        x_law = DistributionSpec.gig(p.lam, p.c1 * p.alpha, p.c2 * factor)
        y_law = laws.y_law
    elif case.theorem == "al":
        x_law = laws.x_law
        y_law = DistributionSpec.al((p.p + p.q) * factor, p.r)
    else:
        x_law = DistributionSpec.stexp(p.lam * factor, -p.c1, p.c2)
        y_law = laws.y_law
    return x_law, y_law


def _power_checks(cfg: ExperimentConfig) -> list[TestReport]:
    case = cfg.case()
    spec = transform_of(case)
    x_law, y_law = perturbed_laws(case, cfg.perturb)
    sx, sy, sperm = _child_seeds(cfg.seed, 3)
    m = min(cfg.independence_n, cfg.n)
    x = sample(x_law, m, sx).values
    y = sample(y_law, m, sy).values
    u, v = transforms.apply(spec, x, y)
    rep = independence_test(u, v, permutations=cfg.permutations, seed=sperm,
                            name="independence_uv_perturbed")
    # the control passes when independence is rejected
    return [_check("power_reject", rep.p_value, 0.01, rep.p_value < 0.01,
                   n=rep.n, seed=rep.seed)]


def run_experiment(config: ExperimentConfig) -> dict:
    """Run one mode for one case and return the report dict."""
    cfg = config.resolved()
    runner = {
        "identity": _identity_checks,
        "montecarlo": _montecarlo_checks,
        "chain": _chain_checks,
        "power": _power_checks,
    }[cfg.mode]
    checks = runner(cfg)
    effective_n = {
        "identity": cfg.identity_points,
        "montecarlo": cfg.n,
        "chain": cfg.chains,
        "power": min(cfg.independence_n, cfg.n),
    }[cfg.mode]
    report = {
        "theorem": cfg.theorem,
        "mode": cfg.mode,
        "params": dict(cfg.params),
        "n": int(effective_n),
        "seed": int(cfg.seed),
        "config": {
            k: v for k, v in dataclasses.asdict(cfg).items() if k != "out"
        },
        "checks": [c.to_dict() for c in checks],
        "pass": all(c.passed for c in checks),
    }
    return report


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the target directory plus rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".out-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: dict, path: str) -> None:
    """Serialize deterministically (sorted keys, no timestamps) and write
    atomically, so equal reports produce equal bytes."""
    atomic_write_text(path, json.dumps(report, sort_keys=True, indent=2) + "\n")


def _histogram_csv(values: np.ndarray, spec: DistributionSpec, bins: int, path: str) -> None:
    hist, edges = np.histogram(values, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    analytic = pdf(spec, centers)
    lines = ["bin_center,empirical_density,analytic_pdf"]
    for c, e, a in zip(centers, hist, analytic):
        lines.append(f"{c:.17g},{e:.17g},{a:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def emit_plot_data(
    target: DistributionSpec | TheoremCase,
    n: int,
    seed: int,
    bins: int,
    out: str,
) -> list[str]:
    """Histogram-vs-density CSV files for a law or a theorem quadruple.

    For a DistributionSpec one file ``out`` is written; for a TheoremCase the
    four marginals go to ``out_x.csv`` .. ``out_v.csv``.  Returns the paths.
    """
    n = int(n)
    if n < 1:
        raise ValueError("plot data needs at least one draw")
    bins = int(bins)
    if bins < 4:
        raise ValueError("need at least 4 bins")
    if isinstance(target, DistributionSpec):
        values = sample(target, n, seed).values
        _histogram_csv(values, target, bins, out)
        return [out]
    laws = predicted_laws(target)
    spec = transform_of(target)
    sx, sy = _child_seeds(seed, 2)
    x = sample(laws.x_law, n, sx).values
    y = sample(laws.y_law, n, sy).values
    u, v = transforms.apply(spec, x, y)
    root, ext = os.path.splitext(out)
    ext = ext or ".csv"
    paths = []
    for tag, vals, law in (("x", x, laws.x_law), ("y", y, laws.y_law),
                           ("u", u, laws.u_law), ("v", v, laws.v_law)):
        path = f"{root}_{tag}{ext}"
        _histogram_csv(vals, law, bins, path)
        paths.append(path)
    return paths
