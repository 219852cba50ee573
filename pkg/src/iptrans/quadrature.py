"""Adaptive Gauss-Legendre panel quadrature with a reusable cumulative table.

This is plumbing for the continuous-distribution code: a density is integrated
once over a finite bracket into a panel table (edges plus cumulative masses),
after which CDF evaluation is a panel lookup plus one partial-panel rule, and
quantile evaluation is a safeguarded Newton iteration against that CDF.  The
integrand is assumed smooth on the bracket; panels are bisected wherever the
embedded 7/15-point error estimate exceeds its share of the budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PanelTable", "build_table", "cdf_values", "invert_cdf"]

_NODES15, _WEIGHTS15 = np.polynomial.legendre.leggauss(15)
_NODES7, _WEIGHTS7 = np.polynomial.legendre.leggauss(7)

REL_TOL = 1e-13
MAX_PANELS = 8192


@dataclass(frozen=True)
class PanelTable:
    """Cumulative integral of a fixed integrand over [edges[0], edges[-1]]."""

    edges: np.ndarray       # shape (K+1,), strictly increasing
    cumulative: np.ndarray  # shape (K+1,), cumulative[0] == 0.0

    @property
    def total(self) -> float:
        return float(self.cumulative[-1])


def _panel_integrals(f, edges: np.ndarray, nodes, weights) -> np.ndarray:
    lo = edges[:-1]
    half = 0.5 * (edges[1:] - lo)
    pts = lo[:, None] + half[:, None] * (nodes[None, :] + 1.0)
    vals = f(pts)
    return (vals * weights).sum(axis=1) * half


def build_table(f, a: float, b: float, rel_tol: float = REL_TOL) -> PanelTable:
    """Integrate ``f`` (vectorized, nonnegative) over [a, b] into a table."""
    if not b > a:
        raise ValueError("integration bracket must satisfy a < b")
    edges = np.linspace(a, b, 129)
    passes = 0
    while True:
        coarse = _panel_integrals(f, edges, _NODES7, _WEIGHTS7)
        fine = _panel_integrals(f, edges, _NODES15, _WEIGHTS15)
        err = np.abs(fine - coarse)
        total = float(fine.sum())
        budget = rel_tol * max(abs(total), np.finfo(float).tiny)
        passes += 1
        if err.sum() <= budget or len(edges) > MAX_PANELS or passes >= 40:
            break
        bad = err > budget / len(edges)
        mids = 0.5 * (edges[:-1][bad] + edges[1:][bad])
        edges = np.sort(np.concatenate([edges, mids]))
    cumulative = np.concatenate([[0.0], np.cumsum(fine)])
    return PanelTable(edges=edges, cumulative=cumulative)


def cdf_values(f, table: PanelTable, t) -> np.ndarray:
    """Cumulative integral from edges[0] up to each entry of ``t``.

    Entries outside the bracket clamp to 0 or the table total.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    edges = table.edges
    tc = np.clip(t, edges[0], edges[-1])
    idx = np.clip(np.searchsorted(edges, tc, side="right") - 1, 0, len(edges) - 2)
    lo = edges[idx]
    half = 0.5 * (tc - lo)
    pts = lo[:, None] + half[:, None] * (_NODES15[None, :] + 1.0)
    partial = (f(pts) * _WEIGHTS15).sum(axis=1) * half
    out = table.cumulative[idx] + partial
    out[t <= edges[0]] = 0.0
    out[t >= edges[-1]] = table.total
    return out[0] if scalar else out


def invert_cdf(f, table: PanelTable, u) -> np.ndarray:
    """Solve cumulative(t) == u * total for each u in (0, 1).

    Newton from a per-panel linear seed, falling back to bisection whenever a
    step leaves the current bracket, so convergence is unconditional for a
    positive integrand.
    """
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("quantile levels must lie strictly inside (0, 1)")
    edges = table.edges
    cum = table.cumulative
    target = u * table.total
    k = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(edges) - 2)
    lo = edges[k].copy()
    hi = edges[k + 1].copy()
    mass = cum[k + 1] - cum[k]
    frac = np.where(mass > 0, (target - cum[k]) / np.where(mass > 0, mass, 1.0), 0.5)
    t = lo + np.clip(frac, 0.0, 1.0) * (hi - lo)
    tol = 4e-15 * max(table.total, np.finfo(float).tiny)
    for _ in range(100):
        resid = cdf_values(f, table, t) - target
        below = resid < 0.0
        lo = np.where(below, t, lo)
        hi = np.where(below, hi, t)
        done = (np.abs(resid) <= tol) | (hi - lo <= 1e-14 * (1.0 + np.abs(t)))
        if np.all(done):
            break
        dens = f(t[:, None])[:, 0]
        step = np.divide(resid, dens, out=np.zeros_like(resid), where=dens > 0)
        cand = t - step
        inside = (cand > lo) & (cand < hi)
        t = np.where(done, t, np.where(inside & (dens > 0), cand, 0.5 * (lo + hi)))
    return t[0] if scalar else t
