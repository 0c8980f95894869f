"""Composite Gauss-Legendre rules on graded panels.

Everything here returns plain ``(nodes, weights)`` arrays so that callers can
evaluate vectorized integrands once and reuse the rule (e.g. while bisecting
on a scale parameter).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _leggauss(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_panels(breaks, m):
    """Composite ``m``-point Gauss rule on consecutive ``breaks``."""
    b = np.asarray(breaks, dtype=float)
    if b.size < 2:
        return np.empty(0), np.empty(0)
    x, w = _leggauss(int(m))
    lo, hi = b[:-1], b[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def panel_sums(values, weights, npanels, m):
    """Per-panel partial sums of a composite rule."""
    return (values * weights).reshape(npanels, m).sum(axis=1)


def geometric_toward(a, b, point, levels, ratio=0.5):
    """Breakpoints in ``[a, b]`` refined geometrically toward ``point``.

    ``point`` must be ``a`` or ``b``.  The panel next to ``point`` has
    length ``(b - a) * ratio**levels``.
    """
    length = b - a
    d = length * ratio ** np.arange(1, levels + 1)
    if point == a:
        inner = a + d
    else:
        inner = b - d
    return np.unique(np.concatenate(([a, b], inner)))


def graded_breaks(a, b, singular=(), levels=24, base=None):
    """Panel breakpoints on ``[a, b]``.

    Splits at every ``singular`` point inside the interval and refines
    geometrically toward each of them.  ``base`` adds further plain splits
    (no grading), e.g. the nodes of a piecewise linear function.
    """
    pts = [a, b]
    sing = [p for p in np.atleast_1d(np.asarray(singular, dtype=float)) if a <= p <= b]
    pts.extend(sing)
    if base is not None:
        base = np.asarray(base, dtype=float)
        pts.extend(base[(base > a) & (base < b)])
    pts = np.unique(np.asarray(pts, dtype=float))
    if not sing or levels <= 0:
        return pts
    out = [pts]
    sing = set(float(p) for p in sing)
    for lo, hi in zip(pts[:-1], pts[1:]):
        if lo in sing:
            out.append(geometric_toward(lo, hi, lo, levels))
        if hi in sing:
            out.append(geometric_toward(lo, hi, hi, levels))
    return np.unique(np.concatenate(out))


def geometric_breaks(a, b, ratio=2.0):
    """Breakpoints ``a, a*ratio, a*ratio**2, ..., b`` for ``0 < a < b``."""
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    k = max(1, int(np.ceil(np.log(b / a) / np.log(ratio))))
    return np.geomspace(a, b, k + 1)


def power_graded(a, b, exponent, npanels, m):
    """Rule on ``[a, b]`` graded toward ``a`` by the map ``a + (b-a) t**exponent``.

    Gauss nodes in ``t`` on ``npanels`` uniform panels; the Jacobian is folded
    into the weights.
    """
    t, wt = gauss_panels(np.linspace(0.0, 1.0, npanels + 1), m)
    x = a + (b - a) * t**exponent
    w = wt * (b - a) * exponent * t ** (exponent - 1.0)
    return x, w


def tail_rule(R, kappa, m=16, levels=24):
    """Rule for ``int_R^inf F(r) dr`` when ``F(r) ~ r**(-1-kappa)``.

    Uses ``r = R * tau**(-1/kappa)`` on ``tau in (0, 1]``, which maps the
    model decay onto a constant, with geometric panels toward ``tau = 0``.
    """
    if kappa <= 0:
        raise ValueError("tail rule needs a positive decay exponent")
    brk = np.concatenate(([0.0], 0.5 ** np.arange(levels, -1, -1)))
    tau, wt = gauss_panels(brk, m)
    r = R * tau ** (-1.0 / kappa)
    w = wt * (R / kappa) * tau ** (-1.0 / kappa - 1.0)
    return r, w
