"""Infimal convolution ``u_eps(x) = inf_y u(y) + |x - y|^q / (q eps^(q-1))``."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import WindowClipped
from .reports import CheckReport
from .sampled import SampledFunction

ARGMIN_TOL = 1e-10
ARGMIN_MERGE = 1e-8


def choose_q(p_minus: float, s: float) -> float:
    """``2`` if ``p_minus > 2/(2-s)``, else ``s p_minus/(p_minus - 1) + 1``."""
    if not p_minus > 1:
        raise ValueError("p_minus must exceed 1")
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if p_minus > 2.0 / (2.0 - s):
        return 2.0
    return s * p_minus / (p_minus - 1.0) + 1.0


@dataclass(frozen=True)
class InfConvParams:
    """``epsilon``, exponent ``q`` and the search radius ``(q eps^(q-1) osc u)^(1/q)``."""

    epsilon: float
    q: float = 2.0
    window_radius: float = math.inf

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.q >= 2:
            raise ValueError("q must be >= 2")
        if not (self.window_radius > 0 and math.isfinite(self.window_radius)):
            raise ValueError("window_radius must be positive and finite (u bounded)")

    @classmethod
    def for_function(cls, u: SampledFunction, epsilon: float, q: float = 2.0, osc: float | None = None):
        osc = u.oscillation() if osc is None else osc
        if not math.isfinite(osc):
            raise ValueError("infimal convolution needs bounded u")
        r = (q * epsilon ** (q - 1.0) * osc) ** (1.0 / q)
        # a constant function still needs a nondegenerate window
        return cls(float(epsilon), float(q), max(r, 1e-12))

    def penalty(self, d):
        return np.abs(d) ** self.q / (self.q * self.epsilon ** (self.q - 1.0))


@dataclass(frozen=True)
class InfConvResult:
    nodes: np.ndarray
    values: np.ndarray
    argmin_map: list
    semiconcavity_bound: float
    max_second_difference: float
    params: InfConvParams
    clipped: bool = False
    extra: dict = field(default_factory=dict)


def _candidates(u: SampledFunction, nodes):
    pts = [nodes, u.kinks]
    if u.nodes is not None:
        pts.append(u.nodes)
    return np.unique(np.concatenate(pts))


def inf_convolve(u: SampledFunction, params: InfConvParams, nodes=None, refine: bool = True) -> InfConvResult:
    """Infimal convolution on ``nodes`` (default: the grid of ``u``).

    Brute force over the candidate points in ``B(x, r)``, then a bounded
    Brent refinement on both cells adjacent to every discrete local minimum.
    ``Y_eps(x)`` collects the refined minimizers within ``1e-10`` of the
    minimum.
    """
    if nodes is None:
        if u.nodes is None:
            raise ValueError("nodes are required for closed-form input")
        nodes = u.nodes
    nodes = np.asarray(nodes, dtype=float)
    cand = _candidates(u, nodes)
    ucand = u(cand)
    r = params.window_radius
    clipped = False
    if u.kind == "grid" and (nodes.min() - r < -u.L or nodes.max() + r > u.L):
        clipped = True
        warnings.warn("infimal-convolution window exits the grid; tail values are used", WindowClipped, stacklevel=2)
    values = np.empty(nodes.size)
    argmins = []
    for i, x in enumerate(nodes):
        lo = np.searchsorted(cand, x - r, side="left")
        hi = np.searchsorted(cand, x + r, side="right")
        ys = cand[lo:hi]
        obj = ucand[lo:hi] + params.penalty(x - ys)
        # every discrete local minimum is refined; Y_eps keeps the near-optimal ones
        left = np.concatenate(([np.inf], obj[:-1]))
        right = np.concatenate((obj[1:], [np.inf]))
        local = np.flatnonzero((obj <= left) & (obj <= right))
        pts, vals = [], []
        for j in local:
            pts.append(float(ys[j]))
            vals.append(float(obj[j]))
            if not (refine and ys.size > 1):
                continue
            # the objective is convex on each cell, so each side is refined separately
            for a, b in ((ys[max(j - 1, 0)], ys[j]), (ys[j], ys[min(j + 1, ys.size - 1)])):
                if b <= a:
                    continue
                res = minimize_scalar(lambda y: float(u(np.array(y))) + float(params.penalty(x - y)),
                                      bounds=(a, b), method="bounded", options={"xatol": 1e-12})
                if res.fun < obj[j]:
                    pts.append(float(res.x))
                    vals.append(float(res.fun))
        vals = np.asarray(vals)
        best = float(vals.min())
        sel = np.unique(np.asarray(pts)[vals <= best + ARGMIN_TOL])
        if sel.size > 1:
            # one minimizer reached from both sides of a node counts once
            sel = sel[np.concatenate(([True], np.diff(sel) > ARGMIN_MERGE))]
        values[i] = best
        argmins.append(sel)
    C = (params.q - 1.0) * params.window_radius ** (params.q - 2.0) / params.epsilon ** (params.q - 1.0)
    d2 = _second_differences(nodes, values)
    return InfConvResult(nodes, values, argmins, float(C), float(d2.max()) if d2.size else -math.inf, params, clipped)


def _second_differences(x, v):
    if x.size < 3:
        return np.empty(0)
    h1 = np.diff(x)[:-1]
    h2 = np.diff(x)[1:]
    return 2.0 * (h1 * v[2:] - (h1 + h2) * v[1:-1] + h2 * v[:-2]) / (h1 * h2 * (h1 + h2))


def propinfconv_report(u: SampledFunction, epsilons, q: float = 2.0, nodes=None,
                       params: list[InfConvParams] | None = None, grad_tol: float = 1e-8,
                       value_tol: float = 1e-8) -> list[CheckReport]:
    """Check the infimal-convolution properties for a decreasing list of ``epsilon``.

    Reports ``u_eps <= u``, monotone convergence as ``epsilon`` decreases,
    semiconcavity (second differences at most ``2C``), ``u_eps = u`` where
    the discrete gradient vanishes and ``Y_eps(x)`` is a single point, and
    nonempty ``Y_eps(x)`` inside the window.
    """
    eps = [float(e) for e in epsilons]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    if params is None:
        params = [InfConvParams.for_function(u, e, q) for e in eps]
    results = [inf_convolve(u, p, nodes) for p in params]
    x = results[0].nodes
    ux = u(x)
    reports = []

    below = max(float(np.max(r.values - ux)) for r in results)
    reports.append(CheckReport("below_u", below <= 1e-12, (), below, "u_eps <= u at every node"))

    gaps = [float(np.max(ux - r.values)) for r in results]
    steps = [float(np.max(results[k].values - results[k + 1].values)) for k in range(len(results) - 1)]
    mono = all(s <= 1e-12 for s in steps) and all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    reports.append(CheckReport("monotone_convergence", mono, tuple(eps), max(steps, default=0.0),
                               "u_eps increases as eps decreases; sup |u - u_eps| nonincreasing",
                               extra={"sup_gaps": gaps}))

    worst = max(results, key=lambda r: r.max_second_difference / r.semiconcavity_bound)
    ratio = worst.max_second_difference / worst.semiconcavity_bound
    reports.append(CheckReport("semiconcavity", bool(ratio <= 2.0), (worst.params.epsilon,),
                               worst.max_second_difference, "max second difference <= 2C",
                               bound=2.0 * worst.semiconcavity_bound,
                               extra={"C": [r.semiconcavity_bound for r in results],
                                      "max_second_difference": [r.max_second_difference for r in results]}))

    crit_ok, crit_worst, crit_n = True, 0.0, 0
    for r in results:
        grad = np.gradient(r.values, x)
        for i in range(1, x.size - 1):
            if abs(grad[i]) < grad_tol and r.argmin_map[i].size == 1:
                crit_n += 1
                gap = abs(r.values[i] - ux[i])
                crit_worst = max(crit_worst, gap)
                crit_ok &= gap < value_tol
    reports.append(CheckReport("critical_points", bool(crit_ok), (), crit_worst,
                               "u_eps = u where the discrete gradient vanishes (single minimizer)",
                               extra={"points_checked": crit_n}))

    inside = all(a.size > 0 and np.all(np.abs(a - xi) <= r.params.window_radius * (1 + 1e-12))
                 for r in results for a, xi in zip(r.argmin_map, x))
    reports.append(CheckReport("argmin_in_window", bool(inside), (), float("nan"),
                               "Y_eps(x) nonempty and inside B(x, r(eps))"))
    return reports
