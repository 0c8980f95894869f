"""Orlicz modulars, Luxemburg norms and the L_g tail weight on 1-D domains."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DiagonalDivergence, NonFinite, TailDivergence
from .quadrature import gauss_panels, geometric_breaks, graded_breaks, tail_rule
from .reports import CheckReport
from .sampled import SampledFunction
from .young import YoungFunction

LUX_RTOL = 1e-13


@dataclass(frozen=True)
class Domain1D:
    """Interval ``[a, b]`` with a composite Gauss rule.

    ``panels`` uniform panels of ``order`` nodes each, split further at the
    kinks of the integrand and graded geometrically toward them.  ``grading``
    is the diagonal grading exponent used by the Gagliardo modular (default
    ``2 / (1 - s)``).
    """

    a: float = 0.0
    b: float = 1.0
    order: int = 16
    panels: int = 16
    grading: float | None = None
    kink_levels: int = 20

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"Domain1D needs a < b, got [{self.a}, {self.b}]")
        if self.order < 2 or self.panels < 1:
            raise ValueError("order >= 2 and panels >= 1 required")

    @property
    def length(self) -> float:
        return self.b - self.a

    def breaks(self, kinks=()):
        base = np.linspace(self.a, self.b, self.panels + 1)
        k = np.asarray(kinks, dtype=float)
        k = k[(k > self.a) & (k < self.b)]
        sing = np.concatenate((k, [self.a, self.b]))
        return graded_breaks(self.a, self.b, singular=sing if k.size else (), levels=self.kink_levels if k.size else 0,
                             base=base)

    def rule(self, kinks=(), order=None):
        """Nodes and positive weights summing to ``b - a``."""
        return gauss_panels(self.breaks(kinks), order or self.order)


def _finite(values, nodes, what):
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NonFinite(f"{what} is not finite at x = {float(np.ravel(nodes)[bad[0]]):.6g}")


def _kinks_for(u: SampledFunction, dom: Domain1D):
    k = u.kinks
    return k[(k > dom.a) & (k < dom.b)]


def modular_G(u: SampledFunction, dom: Domain1D, Y: YoungFunction, return_error: bool = False):
    """``int_a^b G(|u(x)|) dx``.

    With ``return_error`` the result is ``(value, error)`` where the error is
    the change against the half-order rule.
    """
    kinks = _kinks_for(u, dom)
    x, w = dom.rule(kinks)
    ux = u(x)
    _finite(ux, x, "u")
    Gx = Y.G(ux)
    _finite(Gx, x, "G(|u|)")
    val = float(np.sum(w * Gx))
    if not return_error:
        return val
    x2, w2 = dom.rule(kinks, order=max(2, dom.order // 2))
    coarse = float(np.sum(w2 * Y.G(u(x2))))
    return val, abs(val - coarse)


# -- Gagliardo modular -----------------------------------------------------------


@dataclass(frozen=True)
class PairRule:
    """Rule for ``int_a^b int_a^b F(x, y) dx dy / |x - y|`` with ``F`` symmetric.

    Nodes are pairs ``(x, x + h)`` with ``h > 0``; ``w`` already carries the
    factor ``2 / h``.  ``shell`` marks the dyadic near-diagonal shells in ``h``
    (``0`` outermost, ``-1`` for the remaining panels) so that the part below
    the innermost shell can be extrapolated geometrically.
    """

    x: np.ndarray
    h: np.ndarray
    w: np.ndarray
    shell: np.ndarray
    levels: int
    h0: float

    def integrate_values(self, vals, check=False):
        _finite(vals, self.x, "the double-integral integrand")
        total = float(np.sum(vals))
        inner = self.shell >= 0
        sh = np.bincount(self.shell[inner], weights=vals[inner], minlength=self.levels)
        rem = 0.0
        a, b = sh[-2], sh[-1]
        if a != 0.0 and b != 0.0 and np.sign(a) == np.sign(b):
            ratio = b / a
            if check and ratio >= 0.95:
                raise DiagonalDivergence(
                    f"near-diagonal shells do not decay (ratio {ratio:.3g}); input is not Lipschitz enough")
            if ratio < 1.0:
                rem = float(b * ratio / (1.0 - ratio))
        return total + rem, rem, sh


def pair_rule(a: float, b: float, kinks, s: float, order: int = 16, panels: int = 16,
              grading: float | None = None, levels: int = 40, x_order: int | None = None,
              max_split_kinks: int = 16) -> PairRule:
    """Graded product rule on ``[a, b]^2`` in ``(x, h = y - x)`` coordinates.

    The h-axis has dyadic shells ``(h0 2^-k-1, h0 2^-k]`` mapped by
    ``t -> t^grading`` (default ``2/(1-s)``) and Gauss panels above ``h0``
    split at differences of kinks.  For each ``h`` the x-rule on
    ``[a, b-h]`` is split where ``x`` or ``x + h`` meets a kink.

    With more than ``max_split_kinks`` kinks (grid data) the h-panels are not
    split at kink differences: after the exact split in x the h-integrand is
    already continuously differentiable there.
    """
    length = b - a
    m = order
    mx = order if x_order is None else x_order
    k = np.asarray(kinks, dtype=float)
    pts = np.unique(np.concatenate(([a, b], k[(k > a) & (k < b)])))
    # the h-integrand is smooth between differences of kinks
    diffs = np.abs(pts[:, None] - pts[None, :]).ravel() if pts.size <= max_split_kinks + 2 else np.empty(0)
    diffs = np.sort(diffs[(diffs > 1e-12 * length) & (diffs < length * (1 - 1e-12))])
    if diffs.size:
        diffs = diffs[np.concatenate(([True], np.diff(diffs) > 1e-9 * length))]
    spacing = float(np.min(np.diff(pts))) if pts.size > 2 else length
    h0 = min(spacing, length) / 2.0
    expo = grading if grading is not None else 2.0 / (1.0 - s)
    t, wt = gauss_panels(np.array([0.0, 1.0]), m)
    hs, ws, shell = [], [], []
    for lev in range(levels):
        lo, hi = h0 * 0.5 ** (lev + 1), h0 * 0.5**lev
        hs.append(lo + (hi - lo) * t**expo)
        ws.append(wt * (hi - lo) * expo * t ** (expo - 1.0))
        shell.append(np.full(m, lev))
    outer = np.unique(np.concatenate(([h0, length], diffs[diffs > h0], np.linspace(h0, length, panels + 1))))
    ho, wo = gauss_panels(outer, m)
    hs.append(ho)
    ws.append(wo)
    shell.append(np.full(ho.size, -1))

    xs, hh, wts, sh = [], [], [], []
    for h, wh, lev in zip(np.concatenate(hs), np.concatenate(ws), np.concatenate(shell)):
        xb = np.concatenate(([a, b - h], pts - h, pts))
        xb = np.unique(xb[(xb >= a) & (xb <= b - h)])
        if xb.size < 2:
            continue
        if xb.size < 4:
            xb = np.linspace(xb[0], xb[-1], 4)
        x, wx = gauss_panels(xb, mx)
        xs.append(x)
        hh.append(np.full(x.size, h))
        wts.append(wx * (2.0 * wh / h))
        sh.append(np.full(x.size, lev))
    return PairRule(np.concatenate(xs), np.concatenate(hh), np.concatenate(wts), np.concatenate(sh), levels, h0)


@dataclass(frozen=True)
class _DiagRule:
    """A pair rule with the quotients ``|u(x+h) - u(x)| / h^s`` frozen."""

    rule: PairRule
    q: np.ndarray
    lipschitz: float

    @property
    def h0(self):
        return self.rule.h0

    def integrate(self, F, check=False):
        return self.rule.integrate_values(self.rule.w * F(self.q), check=check)


def _diag_rule(u: SampledFunction, dom: Domain1D, s: float, levels: int = 40):
    rule = pair_rule(dom.a, dom.b, _kinks_for(u, dom), s, dom.order, dom.panels, dom.grading, levels)
    q = np.abs(u(rule.x + rule.h) - u(rule.x)) / rule.h**s
    _finite(q, rule.x, "D_s u")
    inner = rule.shell == levels - 1
    lip = float(np.max(q[inner] * rule.h[inner] ** (s - 1.0))) if np.any(inner) else 0.0
    return _DiagRule(rule, q, lip)


def modular_sG(u: SampledFunction, dom: Domain1D, Y: YoungFunction, s: float, return_error: bool = False,
               levels: int = 40):
    """``int_a^b int_a^b G(|u(x) - u(y)| / |x - y|^s) dx dy / |x - y|``.

    Symmetric ``(x, h = y - x)`` coordinates, dyadic shells in ``h`` toward
    the diagonal plus a geometric extrapolation of the rest.  With
    ``return_error`` returns ``(value, error, diagonal_envelope)``; the
    envelope bounds the strip ``|x - y| < h0`` by
    ``2 |Omega| G(K h0^(1-s)) / ((1-s) p_minus)`` for a Lipschitz constant K.

    Raises
    ------
    DiagonalDivergence
        if the near-diagonal shells stop decaying.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    rule = _diag_rule(u, dom, s, levels=levels)
    val, rem, sh = rule.integrate(Y.G, check=True)
    if not return_error:
        return val
    half = _diag_rule(u, Domain1D(dom.a, dom.b, max(2, dom.order // 2), dom.panels, dom.grading), s, levels=levels)
    coarse, _, _ = half.integrate(Y.G)
    K = u.lipschitz_hint if u.lipschitz_hint is not None else rule.lipschitz
    env = 2.0 * dom.length * float(Y.G(K * rule.h0 ** (1.0 - s))) / ((1.0 - s) * Y.p_minus)
    return val, abs(val - coarse) + rem, env


# -- Luxemburg norms ---------------------------------------------------------------


def _modular_fn(u, dom, Y, kind, s):
    """``lam -> Phi(u / lam)`` on a frozen rule."""
    if kind == "LG":
        kinks = _kinks_for(u, dom)
        x, w = dom.rule(kinks)
        ux = np.abs(u(x))
        _finite(ux, x, "u")
        return lambda lam: float(np.sum(w * Y.G(ux / lam))), bool(np.any(ux > 0))
    if kind == "seminorm_sG":
        if s is None or not 0 < s < 1:
            raise ValueError("seminorm_sG needs s in (0, 1)")
        rule = _diag_rule(u, dom, s)
        rule.integrate(Y.G, check=True)
        return lambda lam: rule.integrate(lambda q: Y.G(q / lam))[0], bool(np.any(rule.q > 0))
    raise ValueError(f"unknown norm kind {kind!r}; expected 'LG' or 'seminorm_sG'")


def luxemburg_norm(u: SampledFunction, dom: Domain1D, Y: YoungFunction, kind: str = "LG", s: float | None = None):
    """``inf{lam > 0 : Phi(u / lam) <= 1}`` on a frozen quadrature rule.

    ``kind`` is ``"LG"`` (``Phi = modular_G``) or ``"seminorm_sG"``
    (``Phi = modular_sG``, needs ``s``).  The zero function returns 0.
    """
    phi, nonzero = _modular_fn(u, dom, Y, kind, s)
    if not nonzero:
        return 0.0
    # Phi(u / lam) is strictly decreasing in lam: bracket geometrically, then Brent
    lo = hi = 1.0
    while phi(hi) > 1.0:
        lo, hi = hi, hi * 4.0
    while phi(lo) <= 1.0:
        lo, hi = lo / 4.0, lo
    lam = brentq(lambda l: phi(l) - 1.0, lo, hi, xtol=1e-300, rtol=LUX_RTOL, maxiter=200)
    # step to the side where Phi(u/lam) <= 1, as the infimum prescribes
    while phi(lam) > 1.0:
        lam *= 1.0 + LUX_RTOL
    return float(lam)


def xi_minus(t, Y: YoungFunction):
    return np.minimum(t**Y.p_minus, t**Y.p_plus)


def xi_plus(t, Y: YoungFunction):
    return np.maximum(t**Y.p_minus, t**Y.p_plus)


def sandwich_report(u: SampledFunction, dom: Domain1D, Y: YoungFunction, kind: str = "LG", s=None,
                    tol: float = 1e-6) -> CheckReport:
    """Check ``Phi(u/lam*) ~ 1`` and ``xi-(lam*) <= Phi(u) <= xi+(lam*)``."""
    phi, nonzero = _modular_fn(u, dom, Y, kind, s)
    lam = luxemburg_norm(u, dom, Y, kind, s)
    if not nonzero:
        return CheckReport(f"sandwich_{kind}", True, (0.0,), 0.0, "zero function")
    at_norm = phi(lam)
    full = phi(1.0)
    lo, hi = float(xi_minus(lam, Y)), float(xi_plus(lam, Y))
    slack = 1e-9 * max(1.0, hi)
    ok = abs(at_norm - 1.0) <= tol and lo - slack <= full <= hi + slack
    return CheckReport(
        name=f"sandwich_{kind}",
        passed=bool(ok),
        worst_sample=(lam,),
        achieved_constant=at_norm,
        bound=1.0,
        notes="Phi(u/lam*) = 1 and xi-(lam*) <= Phi(u) <= xi+(lam*)",
        extra={"norm": lam, "modular": full, "xi_minus": lo, "xi_plus": hi},
    )


# -- L_g weight ---------------------------------------------------------------------


def lg_tail_exponent(gamma: float, Y: YoungFunction, s: float) -> float:
    """``kappa`` with ``g(|u(y)| / (1+|y|^s)) / (1+|y|^(n+s)) |y|^(n-1) ~ |y|^(-1-kappa)``.

    ``gamma`` is the tail growth exponent of ``|u|``; the (gg product)
    envelope picks ``p_minus - 1`` for a vanishing argument and
    ``p_plus - 1`` for a growing one.
    """
    if gamma == -math.inf:
        return math.inf
    e = gamma - s
    if e < 0:
        return s - e * (Y.p_minus - 1.0)
    if e > 0:
        return s - e * (Y.p_plus - 1.0)
    return s


def lg_membership(u: SampledFunction, Y: YoungFunction, s: float, n: int = 1, return_parts: bool = False):
    """``int_{R^n} g(|u(x)| / (1 + |x|^s)) dx / (1 + |x|^(n+s))``.

    For ``n >= 2`` ``u`` is read as a radial profile ``u(|x|)``.  The core
    ``|x| <= R0`` is integrated by quadrature; the tail is integrated with a
    rule adapted to the envelope exponent.

    Raises
    ------
    TailDivergence
        if the envelope exponent is not positive.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    kappa = lg_tail_exponent(u.growth, Y, s)
    if kappa <= 0:
        raise TailDivergence(f"L_g tail envelope decays like |y|^(-1-{kappa:.6g}); the integral diverges")
    R0 = max(u.L, 1.0) * 2.0
    # the weight 1 + |x|^s is not smooth at the origin
    kinks = np.unique(np.concatenate((u.kinks[np.abs(u.kinks) < R0], [0.0])))

    def integrand(r, ur):
        return Y.g(np.abs(ur) / (1.0 + r**s)) / (1.0 + r ** (n + s))

    if n == 1:
        dom = Domain1D(-R0, R0, 16, 32)
        x, w = dom.rule(kinks)
        core = float(np.sum(w * integrand(np.abs(x), u(x))))
        sides = (1.0, -1.0)
        surface = 1.0
    else:
        dom = Domain1D(0.0, R0, 16, 32)
        x, w = dom.rule(kinks[kinks > 0])  # 0 is an endpoint here
        surface = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
        core = surface * float(np.sum(w * integrand(x, u(x)) * x ** (n - 1)))
        sides = (1.0,)
    tail = 0.0
    if math.isfinite(kappa):
        r, wr = tail_rule(R0, kappa)
        for sign in sides:
            tail += surface * float(np.sum(wr * integrand(r, u(sign * r)) * r ** (n - 1)))
    _finite(np.array([core, tail]), np.array([R0, R0]), "L_g integral")
    if return_parts:
        return core + tail, core, tail
    return core + tail


def lg_tail_integral(u: SampledFunction, Y: YoungFunction, s: float, R: float, n: int = 1) -> float:
    """The L_g integral restricted to ``|y| > R``."""
    kappa = lg_tail_exponent(u.growth, Y, s)
    if kappa <= 0:
        raise TailDivergence(f"L_g tail envelope decays like |y|^(-1-{kappa:.6g}); the integral diverges")
    R0 = max(R, 2.0 * max(u.L, 1.0))
    sides = (1.0, -1.0) if n == 1 else (1.0,)
    surface = 1.0 if n == 1 else 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)

    def integrand(r, ur):
        return Y.g(np.abs(ur) / (1.0 + r**s)) / (1.0 + r ** (n + s)) * r ** (n - 1)

    total = 0.0
    pieces = []
    if R0 > R:
        offs = np.abs(u.kinks)
        brk = np.unique(np.concatenate((geometric_breaks(R, R0, 2.0), offs[(offs > R) & (offs < R0)])))
        pieces.append(gauss_panels(brk, 16))
    if math.isfinite(kappa):
        pieces.append(tail_rule(R0, kappa))
    for r, w in pieces:
        for sign in sides:
            total += surface * float(np.sum(w * integrand(r, u(sign * r))))
    return total
