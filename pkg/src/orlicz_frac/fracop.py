"""The fractional g-Laplacian and the g-fractional gradient at a point.

Both are one-dimensional integrals in ``r = |x - y|`` once the two points
``y = x + r`` and ``y = x - r`` are paired.  For the principal value the
pairing is what removes the first-order singularity: ``g`` is odd, so the
linear part of ``u`` cancels exactly in

    g((u(x) - u(x+r)) / r^s) + g((u(x) - u(x-r)) / r^s).

The ``r`` axis is split into dyadic shells below ``rho_split`` (with a
geometric extrapolation of the remainder), graded panels up to ``R_max`` and
a mapped rule for the tail, whose decay exponent follows from the tail model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InsufficientDecades, NotConverged, SingularityAtCriticalPoint, TailDivergence
from .orlicz import lg_tail_integral
from .quadrature import gauss_panels, geometric_breaks, graded_breaks, tail_rule
from .sampled import SampledFunction, closed_form
from .young import YoungFunction

GRADIENT_ZERO = 1e-8
# beyond this many kinks the panels are split but not graded (grid data)
GRADE_MAX_KINKS = 16
# the even part of a paired difference is trusted once it exceeds its rounding floor this many times
ROUNDING_BAND = 1e6


@dataclass(frozen=True)
class QuadratureConfig:
    """Quadrature parameters for point evaluations.

    ``rho_split=None`` selects ``min(0.1, half the distance to the grid
    boundary)``.  ``rho_reg > 0`` replaces ``|x - y|^s`` inside ``g`` by
    ``(|x - y| + rho_reg)^s``.
    """

    rho_split: float | None = None
    R_max: float = 1e3
    inner_levels: int = 40
    nodes_per_shell: int = 16
    rho_reg: float = 0.0
    kink_levels: int = 24
    tail_levels: int = 24

    def __post_init__(self):
        if self.rho_split is not None and not 0 < self.rho_split < self.R_max:
            raise ValueError("need 0 < rho_split < R_max")
        if self.inner_levels < 4:
            raise ValueError("inner_levels must be >= 4")
        if self.nodes_per_shell < 2 or self.R_max <= 0 or self.rho_reg < 0:
            raise ValueError("nodes_per_shell >= 2, R_max > 0 and rho_reg >= 0 required")

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class PVResult:
    """``value = inner_part + outer_part + tail_part``."""

    value: float
    inner_part: float
    outer_part: float
    tail_part: float
    error_estimate: float
    notes: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {k: getattr(self, k) for k in ("value", "inner_part", "outer_part", "tail_part", "error_estimate", "notes")}
        out.update(self.extra)
        return out


# -- rules in r ------------------------------------------------------------------


def _offsets(u: SampledFunction, x: float):
    d = np.abs(u.kinks - x)
    return np.unique(d[d > 0])


def _default_rho(u: SampledFunction, x: float):
    rho = 0.1
    if u.kind == "grid":
        rho = min(rho, 0.5 * (u.L - abs(x)))
    return rho


def _inner_rule(rho, levels, m, offs, grade):
    lo = rho * 0.5**levels
    brk = rho * 0.5 ** np.arange(levels, -1, -1)
    inside = offs[(offs > lo) & (offs < rho)]
    if inside.size:
        if grade:
            brk = np.unique(np.concatenate([brk] + [graded_breaks(lo, rho, (o,), levels=12) for o in inside]))
        else:
            brk = np.unique(np.concatenate((brk, inside)))
    r, w = gauss_panels(brk, m)
    # shell k holds (rho 2^-k-1, rho 2^-k]
    upper = np.repeat(brk[1:], m)
    shell = np.floor(np.log2(rho / upper) + 1e-9).astype(int)
    return r, w, np.clip(shell, 0, levels - 1)


def _outer_rule(rho, R, m, offs, grade, kink_levels):
    brk = geometric_breaks(rho, R, 2.0)
    inside = offs[(offs > rho) & (offs < R)]
    if inside.size:
        if grade:
            brk = np.unique(np.concatenate((brk, graded_breaks(rho, R, inside, levels=kink_levels))))
        else:
            brk = np.unique(np.concatenate((brk, inside)))
    return gauss_panels(brk, m)


def _shell_remainder(shell_sums):
    """Geometric extrapolation of the shells below the innermost one."""
    a, b = shell_sums[-2], shell_sums[-1]
    if a == 0.0 or b == 0.0 or np.sign(a) != np.sign(b):
        return 0.0
    q = b / a
    if not 0 < q < 1:
        return 0.0
    return float(b * q / (1.0 - q))


def _quotients(u, x, r, s, rho_reg):
    """Paired quotients ``(u(x) - u(x+r)) / r^s`` and ``(u(x) - u(x-r)) / r^s``.

    Written as ``A + B`` and ``B - A`` with ``A`` the odd and ``B`` the even
    part in ``r``.  ``B`` below the rounding level of the three samples is set
    to zero, so linear data cancels exactly instead of amplifying roundoff
    by ``r^-(1+2s)``.
    """
    dp, dm, _, _ = _split_quotients(u, x, r, s, rho_reg)
    return dp, dm


def _split_quotients(u, x, r, s, rho_reg):
    """As :func:`_quotients`, plus the rounding floor of ``B`` (divided by the
    denominator) and a mask of nodes where ``B`` is nonzero but within
    ``ROUNDING_BAND`` of that floor, i.e. known to only a few digits."""
    ux = float(u(np.array(x)))
    up, um = u(x + r), u(x - r)
    A = 0.5 * (um - up)
    B = 0.5 * ((ux - up) + (ux - um))
    floor = 8.0 * np.finfo(float).eps * np.maximum(abs(ux), np.maximum(np.abs(up), np.abs(um)))
    aB = np.abs(B)
    band = (aB > floor) & (aB < ROUNDING_BAND * floor)
    B = np.where(aB <= floor, 0.0, B)
    den = (r + rho_reg) ** s if rho_reg > 0 else r**s
    return (A + B) / den, (B - A) / den, floor / den, band


def _roundoff(F, dp, dm, delta, r, w):
    """Sensitivity of the paired sum to a rounding-level change of the even part."""
    base = F(dp, dm, r)
    up = np.abs(F(dp + delta, dm + delta, r) - base)
    down = np.abs(F(dp - delta, dm - delta, r) - base)
    return float(np.sum(w * np.maximum(up, down)))


def _pv_integrand(Y, s):
    def F(dp, dm, r):
        return (Y.g(dp) + Y.g(dm)) / r ** (1.0 + s)

    return F


def _grad_integrand(Y, s):
    def F(dp, dm, r):
        return (Y.G(dp) + Y.G(dm)) / r

    return F


def _envelope_kappa(u, Y, s, kind):
    """Decay exponent of the paired integrand: ``F(r) ~ r^(-1-kappa)``."""
    gp = max(u.growth, 0.0)
    e = gp - s
    if kind == "pv":
        idx = (Y.p_minus - 1.0) if e < 0 else (Y.p_plus - 1.0) if e > 0 else 0.0
        return s - e * idx
    idx = Y.p_minus if e < 0 else Y.p_plus if e > 0 else 0.0
    return -e * idx


@dataclass
class _Parts:
    inner: float
    outer: float
    tail: float
    remainder: float
    shells: np.ndarray
    roundoff: float = 0.0


def _integrate(u, x, Y, s, cfg, F, kind, rho, m, with_tail=True):
    offs = _offsets(u, x)
    grade = offs.size <= GRADE_MAX_KINKS
    ri, wi, shell = _inner_rule(rho, cfg.inner_levels, m, offs, grade)
    dp, dm, delta, band = _split_quotients(u, x, ri, s, cfg.rho_reg)
    # smooth data: once the even part sinks into rounding, the deeper shells
    # are noise (or floored to 0); extrapolate from the last reliable ones
    keep = np.ones(ri.shape, dtype=bool)
    if np.any(band):
        k0 = int(shell[band].min())
        if k0 >= 2:
            keep = shell < k0
    vi = wi * F(dp, dm, ri)
    vi = np.where(keep, vi, 0.0)
    shells = np.bincount(shell[keep], weights=vi[keep], minlength=cfg.inner_levels)
    used = int(shell[keep].max()) + 1
    rem = _shell_remainder(shells[:used])
    inner = float(np.sum(vi)) + rem
    rnd = _roundoff(F, dp[keep], dm[keep], delta[keep], ri[keep], wi[keep])
    if not with_tail:
        return _Parts(inner, 0.0, 0.0, rem, shells, rnd)
    ro, wo = _outer_rule(rho, cfg.R_max, m, offs, grade, cfg.kink_levels)
    dp, dm = _quotients(u, x, ro, s, cfg.rho_reg)
    outer = float(np.sum(wo * F(dp, dm, ro)))
    tail = _tail(u, x, Y, s, cfg, F, kind, m)
    return _Parts(inner, outer, tail, rem, shells, rnd)


def _tail(u, x, Y, s, cfg, F, kind, m):
    R = cfg.R_max
    probe = R * np.array([1.0, 10.0, 1e3, 1e6])
    dp, dm = _quotients(u, x, probe, s, cfg.rho_reg)
    vals = F(dp, dm, probe)
    if np.all(vals == 0.0):
        return 0.0
    kappa = _envelope_kappa(u, Y, s, kind)
    if kappa <= 0:
        raise TailDivergence(
            f"integrand decays like r^(-1-{kappa:.6g}) beyond R_max; the tail integral diverges")
    r, w = tail_rule(R, kappa, m=m, levels=cfg.tail_levels)
    dp, dm = _quotients(u, x, r, s, cfg.rho_reg)
    return float(np.sum(w * F(dp, dm, r)))


def _check_critical_point(u, x, Y, s, beta, rho, cfg):
    """Admissibility at a critical point when ``p_minus <= 2 / (2 - s)``."""
    if Y.p_minus > 2.0 / (2.0 - s):
        return None
    grad = float(u.derivative(x))
    if abs(grad) >= GRADIENT_ZERO:
        return None
    if beta is None:
        raise SingularityAtCriticalPoint(
            f"u'(x) = 0 at x = {x} with p_minus = {Y.p_minus:.6g} <= 2/(2-s); supply beta for the C^2_beta check")
    need = s * Y.p_minus / (Y.p_minus - 1.0)
    if not beta > need:
        raise SingularityAtCriticalPoint(f"beta = {beta} must exceed s p_minus/(p_minus - 1) = {need:.6g}")
    ri, _, shell = _inner_rule(rho, cfg.inner_levels, 4, np.empty(0), False)
    ux = float(u(np.array(x)))
    ratio = np.maximum(np.abs(ux - u(x + ri)), np.abs(ux - u(x - ri))) / ri**beta
    K = np.array([ratio[shell == k].max() for k in range(cfg.inner_levels)])
    half = cfg.inner_levels // 2
    outer_K, inner_K = float(K[:half].max()), float(K[half:].max())
    if inner_K > 2.0 * outer_K and inner_K > 1e-12:
        raise SingularityAtCriticalPoint(
            f"|u(x) - u(y)| / |x - y|^beta grows toward x ({outer_K:.3g} -> {inner_K:.3g}); u is not C^2_beta here")
    return outer_K


def eval_pv_glaplacian(u: SampledFunction, x: float, Y: YoungFunction, s: float,
                       cfg: QuadratureConfig | None = None, beta: float | None = None,
                       tol: float | None = None) -> PVResult:
    """Principal value ``P.V. int g((u(x) - u(y)) / |x-y|^s) dy / |x-y|^(1+s)``.

    Parameters
    ----------
    beta : float, optional
        C^2_beta exponent, required at critical points when
        ``p_minus <= 2 / (2 - s)``.
    tol : float, optional
        Raise :class:`NotConverged` if the error estimate exceeds it.

    Notes
    -----
    The error estimate is the change against the half-order rule plus the
    extrapolated inner remainder plus the sensitivity of the inner shells to
    rounding of the even part of the paired difference.  Grid data is only piecewise linear; at a
    grid node the estimate is flagged in ``notes``.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    cfg = cfg or DEFAULT_CONFIG
    x = float(x)
    if u.kind == "grid" and not abs(x) < u.L:
        raise ValueError(f"x = {x} is not interior to the grid [-{u.L}, {u.L}]")
    rho = cfg.rho_split if cfg.rho_split is not None else _default_rho(u, x)
    K = _check_critical_point(u, x, Y, s, beta, rho, cfg)
    F = _pv_integrand(Y, s)
    m = cfg.nodes_per_shell
    fine = _integrate(u, x, Y, s, cfg, F, "pv", rho, m)
    coarse = _integrate(u, x, Y, s, cfg, F, "pv", rho, max(2, m // 2))
    vf = fine.inner + fine.outer + fine.tail
    vc = coarse.inner + coarse.outer + coarse.tail
    err = abs(vf - vc) + abs(fine.remainder) + fine.roundoff
    notes = ""
    if u.kind == "grid" and np.any(np.abs(u.kinks - x) < 1e-12 * max(1.0, abs(x))):
        notes = "x is a grid node: u is only piecewise linear there"
    extra = {"rho_split": rho}
    if K is not None:
        extra["c2beta_constant"] = K
    if tol is not None and err > tol:
        raise NotConverged(f"error estimate {err:.3g} exceeds tol {tol:.3g}", value=vf, error=err)
    return PVResult(fine.inner + fine.outer + fine.tail, fine.inner, fine.outer, fine.tail, err, notes, extra)


def eval_pv_regularized(u: SampledFunction, x: float, Y: YoungFunction, s: float, rho_reg: float,
                        cfg: QuadratureConfig | None = None, beta: float | None = None) -> float:
    """Principal value with ``(|x-y| + rho_reg)^s`` inside ``g``; the kernel is unchanged."""
    if not rho_reg > 0:
        raise ValueError("rho_reg must be positive")
    cfg = replace(cfg or DEFAULT_CONFIG, rho_reg=float(rho_reg))
    return eval_pv_glaplacian(u, x, Y, s, cfg, beta=beta).value


def eval_g_gradient(u: SampledFunction, x: float, Y: YoungFunction, s: float,
                    cfg: QuadratureConfig | None = None, tol: float | None = None,
                    return_error: bool = False):
    """``D_g^s u(x) = int G(|u(x) - u(y)| / |x-y|^s) dy / |x-y|``.

    The integrand is nonnegative and behaves like ``G(K r^(1-s)) / r`` near
    the diagonal for Lipschitz ``u``; no principal value is needed.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    cfg = cfg or DEFAULT_CONFIG
    x = float(x)
    rho = cfg.rho_split if cfg.rho_split is not None else _default_rho(u, x)
    if rho <= 0:
        rho = 0.1
    F = _grad_integrand(Y, s)
    m = cfg.nodes_per_shell
    fine = _integrate(u, x, Y, s, cfg, F, "grad", rho, m)
    coarse = _integrate(u, x, Y, s, cfg, F, "grad", rho, max(2, m // 2))
    vf = fine.inner + fine.outer + fine.tail
    err = abs(vf - (coarse.inner + coarse.outer + coarse.tail)) + abs(fine.remainder) + fine.roundoff
    if tol is not None and err > tol:
        raise NotConverged(f"error estimate {err:.3g} exceeds tol {tol:.3g}", value=vf, error=err)
    vf = max(vf, 0.0)
    return (vf, err) if return_error else vf


# -- decay probe -------------------------------------------------------------------


@dataclass(frozen=True)
class DecayProbe:
    rhos: np.ndarray
    magnitudes: np.ndarray
    slope: float
    target: float
    intercept: float
    cancelled: bool

    def to_rows(self):
        return [(float(r), float(m)) for r, m in zip(self.rhos, self.magnitudes)]


def inner_decay_probe(u: SampledFunction, x: float, Y: YoungFunction, s: float, rhos,
                      beta: float | None = None, cfg: QuadratureConfig | None = None,
                      atol: float = 1e-300) -> DecayProbe:
    """``|P.V. int_{B_rho(x)} ...|`` for each ``rho`` and its log-log slope.

    The target slope is ``(2 - s) p_minus - 2`` for a critical point of a C^2
    function and ``(beta - s) p_minus - beta`` for C^2_beta data.
    """
    rhos = np.asarray(rhos, dtype=float)
    if rhos.ndim != 1 or rhos.size < 2 or np.any(rhos <= 0):
        raise ValueError("rhos must be a 1-D sequence of positive radii")
    if math.log10(rhos.max() / rhos.min()) < 2.0:
        raise InsufficientDecades("rhos must span at least two decades")
    cfg = cfg or DEFAULT_CONFIG
    F = _pv_integrand(Y, s)
    mags = np.array([abs(_integrate(u, float(x), Y, s, cfg, F, "pv", float(rho), cfg.nodes_per_shell,
                                    with_tail=False).inner) for rho in rhos])
    target = (beta - s) * Y.p_minus - beta if beta is not None else (2.0 - s) * Y.p_minus - 2.0
    scale = max(1.0, float(np.max(np.abs(u(np.array([x - rhos.max(), x, x + rhos.max()]))))))
    if np.all(mags <= max(atol, 1e-13 * scale)):
        return DecayProbe(rhos, mags, math.nan, target, math.nan, True)
    good = mags > 0
    slope, icpt = np.polyfit(np.log(rhos[good]), np.log(mags[good]), 1)
    return DecayProbe(rhos, mags, float(slope), target, float(icpt), False)


# -- tail envelope -----------------------------------------------------------------


def tail_envelope(u: SampledFunction, x: float, Y: YoungFunction, s: float, R: float, n: int = 1) -> float:
    """Upper bound for ``|int_{|y| > R} g(D_s u) dy / |x - y|^(n+s)|``, ``R >= max(2|x|, 1)``.

    From ``|x - y| >= |y| / 2`` and ``1 + |y|^s <= 2^(1+s) |x - y|^s`` the
    quotient is at most ``2^(1+s) (|u(x)| + |u(y)|) / (1 + |y|^s)``; the
    (gg product) and the two-term inequality for ``g`` then give

        2^(n+1+s) (2^(1+s))^(p_plus - 1) C_t [g(|u(x)|/(1+|y|^s)) + g(|u(y)|/(1+|y|^s))]

    integrated against ``dy / (1 + |y|^(n+s))``, with ``C_t = p_plus 2^p_plus / (2 p_minus)``.
    """
    if R < max(2.0 * abs(x), 1.0):
        raise ValueError("the envelope needs R >= max(2|x|, 1)")
    pm, pp = Y.p_minus, Y.p_plus
    Ct = pp * 2.0**pp / (2.0 * pm)
    const = 2.0 ** (n + 1.0 + s) * (2.0 ** (1.0 + s)) ** (pp - 1.0) * Ct
    ux = abs(float(u(np.array(x))))
    # the |u(x)| piece is the L_g tail of the constant function |u(x)|
    const_part = lg_tail_integral(closed_form("constant", c=ux), Y, s, R, n) if ux > 0 else 0.0
    return const * (const_part + lg_tail_integral(u, Y, s, R, n))
