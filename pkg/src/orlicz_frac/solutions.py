"""Weak and viscosity supersolution checks for ``(-Delta_g)^s u = f(x, u, D_g^s u)``.

Conventions
-----------
``dmu = dx dy / |x - y|`` and ``D_s u = (u(x) - u(y)) / |x - y|^s``.  With
the principal value normalized with prefactor 1, symmetry gives

    int int g(D_s u) D_s psi dmu = 2 int psi (-Delta_g)^s u dx,

so the weak form is tested against ``2 int f psi``.  ``pairing`` exposes the
factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError, TouchViolation, ValidationError
from .fracop import (DEFAULT_CONFIG, GRADIENT_ZERO, QuadratureConfig, _offsets, _outer_rule, _pv_integrand,
                     _quotients, _tail, eval_g_gradient, eval_pv_glaplacian, GRADE_MAX_KINKS)
from .orlicz import pair_rule
from .quadrature import gauss_panels, geometric_breaks
from .reports import CheckReport
from .sampled import SampledFunction, closed_form, patched
from .young import YoungFunction, complementary_inverse

WEAK_PAIRING = 2.0


# -- sources -------------------------------------------------------------------------


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True, eq=False)
class SourceFunction:
    """Source ``f(x, r, eta)`` with its growth data.

    Parameters
    ----------
    evaluator : callable
        Vectorized ``f(x, r, eta)``.
    gamma : callable, optional
        Envelope ``gamma(|r|) >= 0`` (default 0).
    phi_sup : float
        ``sup |phi|`` in ``|f| <= gamma(|r|) G~^-1(|eta|) + phi``.
    monotone_r : bool
        ``f`` is nonincreasing in ``r``.
    uses_eta : bool
        ``f`` depends on ``eta``; otherwise ``D_g^s u`` is never computed.
    dr : callable, optional
        ``df/dr``, used by the Dirichlet solver's Newton step.
    """

    evaluator: object
    gamma: object = None
    phi_sup: float = 0.0
    lipschitz_eta: float = 0.0
    monotone_r: bool = False
    uses_eta: bool = False
    name: str = "source"
    params: dict = field(default_factory=dict)
    domain: tuple = (-1.0, 1.0)
    dr: object = None
    _validated: dict = field(default_factory=dict, repr=False)

    def __call__(self, x, r, eta=0.0):
        x, r, eta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, r, eta)))
        return np.asarray(self.evaluator(x, r, eta), dtype=float) * np.ones(x.shape)

    def gamma_of(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        return _zero(t) if self.gamma is None else np.asarray(self.gamma(t), dtype=float) * np.ones(t.shape)

    def gamma_inf(self, M: float) -> float:
        """``max gamma`` on ``[-M, M]``."""
        if self.gamma is None:
            return 0.0
        return float(np.max(self.gamma_of(np.linspace(0.0, abs(M), 1001))))

    def d_dr(self, x, r, eta=0.0):
        if self.dr is not None:
            x, r, eta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, r, eta)))
            return np.asarray(self.dr(x, r, eta), dtype=float) * np.ones(x.shape)
        h = 1e-6 * np.maximum(1.0, np.abs(r))
        return (self(x, r + h, eta) - self(x, r - h, eta)) / (2.0 * h)

    def check_growth(self, Y: YoungFunction, xs=None, rs=None, etas=None) -> CheckReport:
        """Sampled check of the growth envelope (and of monotonicity in ``r``).

        Raises :class:`ValidationError` on the first violation.  The result
        is cached per Young function.
        """
        key = id(Y)
        default = xs is None and rs is None and etas is None
        if default and key in self._validated:
            return self._validated[key]
        lo, hi = self.domain
        xs = np.linspace(lo, hi, 21) if xs is None else np.asarray(xs, dtype=float)
        if rs is None:
            pos = np.logspace(-6, 3, 37)
            rs = np.concatenate((-pos[::-1], [0.0], pos))
        rs = np.sort(np.asarray(rs, dtype=float))
        etas = np.concatenate(([0.0], np.logspace(-6, 6, 25))) if etas is None else np.asarray(etas, dtype=float)
        X, R, E = np.meshgrid(xs, rs, etas, indexing="ij")
        vals = self(X, R, E)
        if not np.all(np.isfinite(vals)):
            i = np.unravel_index(int(np.argmax(~np.isfinite(vals))), vals.shape)
            raise ValidationError("source is not finite", sample=(X[i], R[i], E[i]))
        ginv = complementary_inverse(Y, np.abs(etas))
        bound = self.gamma_of(R) * ginv[None, None, :] + self.phi_sup
        excess = np.abs(vals) - bound * (1.0 + 1e-9) - 1e-12
        if np.any(excess > 0):
            i = np.unravel_index(int(np.argmax(excess)), vals.shape)
            raise ValidationError(
                f"|f| = {abs(vals[i]):.6g} exceeds gamma(|r|) G~^-1(|eta|) + phi_sup = {bound[i]:.6g}",
                sample=(float(X[i]), float(R[i]), float(E[i])))
        worst_mono = 0.0
        if self.monotone_r:
            dif = np.diff(vals, axis=1)
            scale = 1e-12 * np.maximum(1.0, np.abs(vals[:, 1:]))
            if np.any(dif > scale):
                i = np.unravel_index(int(np.argmax(dif - scale)), dif.shape)
                raise ValidationError("source is flagged nonincreasing in r but increases",
                                      sample=(float(X[i]), float(R[i]), float(E[i])))
            worst_mono = float(dif.max(initial=0.0))
        rep = CheckReport("growth", True, (), float(np.max(excess)), "sampled growth envelope holds",
                          extra={"samples": int(vals.size), "monotone_increment": worst_mono})
        if default:
            self._validated[key] = rep
        return rep

    def to_dict(self):
        return {"kind": self.name, **self.params}

    # -- constructors --------------------------------------------------------

    @classmethod
    def constant(cls, c: float, domain=(-1.0, 1.0)) -> "SourceFunction":
        c = float(c)
        return cls(lambda x, r, e: np.full(np.shape(x), c), None, abs(c), 0.0, True, False, "constant", {"c": c},
                   tuple(domain), lambda x, r, e: np.zeros(np.shape(x)))

    @classmethod
    def affine_x(cls, a: float, b: float, domain=(-1.0, 1.0)) -> "SourceFunction":
        """``a + b x``; ``phi_sup`` is the sup over ``domain``."""
        a, b = float(a), float(b)
        lo, hi = domain
        return cls(lambda x, r, e: a + b * x, None, max(abs(a + b * lo), abs(a + b * hi)), 0.0, True, False,
                   "affine_x", {"a": a, "b": b}, tuple(domain), lambda x, r, e: np.zeros(np.shape(x)))

    @classmethod
    def tanh_r(cls, c0: float, c1: float, domain=(-1.0, 1.0)) -> "SourceFunction":
        """``c0 - c1 tanh(r)`` with ``c1 >= 0`` (nonincreasing in ``r``)."""
        c0, c1 = float(c0), float(c1)
        if c1 < 0:
            raise ValidationError("tanh_r needs c1 >= 0")
        return cls(lambda x, r, e: c0 - c1 * np.tanh(r), None, abs(c0) + c1, 0.0, True, False, "tanh_r",
                   {"c0": c0, "c1": c1}, tuple(domain), lambda x, r, e: -c1 / np.cosh(r) ** 2)

    @classmethod
    def tanh_eta(cls, c0: float, c1: float, domain=(-1.0, 1.0)) -> "SourceFunction":
        """``c0 - c1 tanh(eta)``: bounded, depends on the g-fractional gradient."""
        c0, c1 = float(c0), float(c1)
        return cls(lambda x, r, e: c0 - c1 * np.tanh(e), None, abs(c0) + abs(c1), abs(c1), True, True,
                   "tanh_eta", {"c0": c0, "c1": c1}, tuple(domain), lambda x, r, e: np.zeros(np.shape(x)))

    @classmethod
    def from_dict(cls, block, domain=(-1.0, 1.0)) -> "SourceFunction":
        if not isinstance(block, dict) or "kind" not in block:
            raise SchemaError("source block needs a 'kind'")
        kind = block["kind"]
        params = {k: v for k, v in block.items() if k != "kind"}
        makers = {"constant": cls.constant, "affine_x": cls.affine_x, "tanh_r": cls.tanh_r,
                  "tanh_eta": cls.tanh_eta}
        if kind not in makers:
            raise SchemaError(f"unknown source kind {kind!r}; known: {sorted(makers)}")
        try:
            return makers[kind](**params, domain=tuple(domain))
        except TypeError as exc:
            raise SchemaError(f"bad parameters for source {kind!r}: {exc}") from None


def f_epsilon(f: SourceFunction, r_eps: float, domain=None, samples: int = 129) -> SourceFunction:
    """``f_eps(x, t, eta) = inf over |y - x| < r_eps of f(y, t, eta)``.

    The ball is sampled with ``samples`` uniform points (endpoints included)
    and clamped to ``domain`` (default ``f.domain``).  Envelopes and flags are
    inherited.
    """
    if not r_eps > 0:
        raise ValueError("r_eps must be positive")
    lo, hi = f.domain if domain is None else domain
    offs = np.linspace(-r_eps, r_eps, samples)

    def ev(x, r, eta):
        y = np.clip(x[..., None] + offs, lo, hi)
        return np.min(f(y, r[..., None], eta[..., None]), axis=-1)

    return SourceFunction(ev, f.gamma, f.phi_sup, f.lipschitz_eta, f.monotone_r, f.uses_eta,
                          f"{f.name}_eps", {**f.params, "r_eps": float(r_eps)}, (lo, hi))


# -- test functions ------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Bump ``height exp(1 - 1/(1 - t^2))``, ``t = (x - center)/radius``; values in ``[0, height]``."""

    __test__ = False

    center: float
    radius: float
    height: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.height < 0:
            raise ValueError("test functions are nonnegative")

    @property
    def support(self):
        return (self.center - self.radius, self.center + self.radius)

    def __call__(self, x):
        t = (np.asarray(x, dtype=float) - self.center) / self.radius
        inside = np.abs(t) < 1
        ts = np.where(inside, t, 0.0)
        return np.where(inside, self.height * np.exp(1.0 - 1.0 / (1.0 - ts**2)), 0.0)

    def derivative(self, x):
        t = (np.asarray(x, dtype=float) - self.center) / self.radius
        inside = np.abs(t) < 1
        ts = np.where(inside, t, 0.0)
        d = 1.0 - ts**2
        return np.where(inside, self(x) * (-2.0 * ts / d**2) / self.radius, 0.0)

    def as_function(self) -> SampledFunction:
        return closed_form("bump", height=self.height, center=self.center, radius=self.radius)


def bump_basis(a: float, b: float, n_centers: int = 8, radii=(0.05, 0.1, 0.2)) -> list[TestFunction]:
    """``n_centers`` bumps per radius (radii as fractions of ``b - a``), supports inside ``(a, b)``."""
    length = b - a
    out = []
    for frac in radii:
        rho = frac * length
        lo, hi = a + 1.05 * rho, b - 1.05 * rho
        if hi < lo:
            raise ValueError(f"radius fraction {frac} does not fit into ({a}, {b})")
        for c in np.linspace(lo, hi, n_centers):
            out.append(TestFunction(float(c), float(rho)))
    return out


# -- weak form -----------------------------------------------------------------------


def _core_x_rule(u, lo, hi, m, panels):
    k = u.kinks[(u.kinks > lo) & (u.kinks < hi)]
    brk = np.unique(np.concatenate((np.linspace(lo, hi, panels + 1), k)))
    return gauss_panels(brk, m)


def _outside_integral(u, x, kl, kr, Y, s, cfg, m):
    """``int_{y outside [kl, kr]} g(D_s u(x, y)) dy / |x - y|^(1+s)`` for ``x`` in ``(kl, kr)``."""
    dl, dr = x - kl, kr - x
    dmin, D = min(dl, dr), max(dl, dr)
    sign = -1.0 if dl <= dr else 1.0
    offs = _offsets(u, x)
    total = 0.0
    if D > dmin * (1 + 1e-14):
        brk = np.unique(np.concatenate((geometric_breaks(dmin, D), offs[(offs > dmin) & (offs < D)])))
        r, w = gauss_panels(brk, m)
        ux = float(u(np.array(x)))
        q = (ux - u(x + sign * r)) / r**s
        total += float(np.sum(w * Y.g(q) / r ** (1.0 + s)))
    F = _pv_integrand(Y, s)
    grade = offs.size <= GRADE_MAX_KINKS
    ro, wo = _outer_rule(D, cfg.R_max, m, offs, grade, cfg.kink_levels)
    dp, dm = _quotients(u, x, ro, s, 0.0)
    total += float(np.sum(wo * F(dp, dm, ro)))
    total += _tail(u, x, Y, s, cfg, F, "pv", m)
    return total


def weak_form_pair(u: SampledFunction, psi: TestFunction, Y: YoungFunction, s: float, f: SourceFunction,
                   cfg: QuadratureConfig | None = None, order: int = 16, panels: int = 8, levels: int = 40,
                   pairing: float = WEAK_PAIRING, return_parts: bool = False):
    """``(lhs, rhs)`` of the weak inequality for one test function.

    ``lhs = int int g(D_s u) D_s psi dmu`` split over ``Q_K``: the ``K x K``
    block uses a diagonally graded pair rule; ``K x (R \\ K)`` and its mirror
    contribute ``2 int_K psi(x) J(x) dx`` with ``J`` the exterior integral in
    ``r`` (unpaired up to the far edge of ``K``, paired beyond, then the tail
    model).  ``rhs = pairing * int_K f(x, u, D_g^s u) psi dx``.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    cfg = cfg or DEFAULT_CONFIG
    f.check_growth(Y)
    kl, kr = psi.support
    inner_k = u.kinks[(u.kinks > kl) & (u.kinks < kr)]
    many = inner_k.size > GRADE_MAX_KINKS
    rule = pair_rule(kl, kr, inner_k, s, order, panels, None, levels, x_order=4 if many else None)
    qu = (u(rule.x) - u(rule.x + rule.h)) / rule.h**s
    qpsi = (psi(rule.x) - psi(rule.x + rule.h)) / rule.h**s
    A, _, _ = rule.integrate_values(rule.w * Y.g(qu) * qpsi)

    x, wx = _core_x_rule(u, kl, kr, order, panels)
    px = psi(x)
    keep = px > 1e-300
    x, wx, px = x[keep], wx[keep], px[keep]
    J = np.array([_outside_integral(u, float(xi), kl, kr, Y, s, cfg, order) for xi in x])
    B = float(np.sum(wx * px * J))
    lhs = A + 2.0 * B

    ux = u(x)
    if f.uses_eta:
        eta = np.array([eval_g_gradient(u, float(xi), Y, s, cfg) for xi in x])
    else:
        eta = np.zeros_like(x)
    rhs = pairing * float(np.sum(wx * px * f(x, ux, eta)))
    if return_parts:
        return lhs, rhs, {"KxK": A, "KxKc": B}
    return lhs, rhs


def weak_supersolution_report(u: SampledFunction, basis, Y: YoungFunction, s: float, f: SourceFunction,
                              cfg: QuadratureConfig | None = None, tol: float = 1e-3, **kw) -> CheckReport:
    """``lhs >= rhs`` over a basis of bumps; margin ``(lhs - rhs) / max(1, |rhs|)``."""
    rows = []
    for psi in basis:
        lhs, rhs = weak_form_pair(u, psi, Y, s, f, cfg, **kw)
        rows.append({"center": psi.center, "radius": psi.radius, "lhs": lhs, "rhs": rhs,
                     "margin": (lhs - rhs) / max(1.0, abs(rhs))})
    if not rows:
        return CheckReport("weak_supersolution", True, (), math.nan, "empty basis")
    worst = min(rows, key=lambda r: r["margin"])
    return CheckReport("weak_supersolution", worst["margin"] >= -tol, (worst["center"], worst["radius"]),
                       worst["margin"], "min over the basis of (lhs - rhs)/max(1, |rhs|)", bound=-tol,
                       extra={"rows": rows})


# -- viscosity -----------------------------------------------------------------------


def _touch_grid(u, x0, radius, factor):
    if u.nodes is not None and len(u.nodes) > 1:
        dx = float(np.min(np.diff(u.nodes))) / factor
    else:
        dx = 2.0 * radius / (200 * factor)
    n = max(int(math.ceil(2.0 * radius / dx)), 20) + 1
    return np.linspace(x0 - radius, x0 + radius, n)


def touching_paraboloid(u: SampledFunction, x0: float, radius: float, factor: int = 10):
    """``(gradient, curvature)`` of the largest paraboloid through ``(x0, u(x0))`` below ``u`` on the ball."""
    y = _touch_grid(u, x0, radius, factor)
    d = y - x0
    u0 = float(u(np.array(x0)))
    a = float(u.derivative(x0))
    mask = np.abs(d) > 1e-12 * max(1.0, radius)
    q = (u(y[mask]) - u0 - a * d[mask]) / d[mask] ** 2
    qmin = float(q.min())
    return a, 2.0 * qmin - 1e-9 * (1.0 + abs(qmin))


def viscosity_point_check(u: SampledFunction, x0: float, touch=None, Y: YoungFunction = None, s: float = 0.5,
                          f: SourceFunction = None, cfg: QuadratureConfig | None = None, radius: float | None = None,
                          beta: float | None = None, tol: float = 0.0, factor: int = 10) -> CheckReport:
    """Test ``(-Delta_g)^s psi(x0) >= f(x0, psi(x0), D_g^s psi(x0))`` for a touching paraboloid.

    ``psi = u(x0) + a (x - x0) + c (x - x0)^2 / 2`` on ``B_radius(x0)`` and
    ``psi = u`` outside.  ``touch = (a, c)``; when omitted, ``a = u'(x0)`` and
    the largest admissible ``c`` is used.  ``psi <= u`` is verified on a grid
    ``factor`` times finer than the data grid.

    At a critical point with ``p_minus <= 2/(2-s)`` the C^2_beta data
    ``beta`` is forwarded to the operator, which rejects inadmissible ``psi``.
    """
    if Y is None or f is None:
        raise ValueError("Y and f are required")
    cfg = cfg or DEFAULT_CONFIG
    f.check_growth(Y)
    x0 = float(x0)
    if radius is None:
        radius = 4.0 * float(np.min(np.diff(u.nodes))) if u.nodes is not None and len(u.nodes) > 1 else 0.05
    if beta is not None and not beta > 2:
        raise ValueError("the C^2_beta class needs beta > 2")
    if touch is None:
        a, c = touching_paraboloid(u, x0, radius, factor)
    else:
        a, c = float(touch[0]), float(touch[1])
    u0 = float(u(np.array(x0)))

    def para(y):
        d = np.asarray(y, dtype=float) - x0
        return u0 + a * d + 0.5 * c * d * d

    y = _touch_grid(u, x0, radius, factor)
    uy = u(y)
    excess = para(y) - uy
    slack = 1e-12 * max(1.0, float(np.max(np.abs(uy))))
    if np.any(excess > slack):
        i = int(np.argmax(excess))
        raise TouchViolation(f"psi exceeds u by {excess[i]:.3g} at x = {y[i]:.6g}", x=float(y[i]),
                             excess=float(excess[i]))
    psi = patched(u, x0 - radius, x0 + radius, para)
    case = "a" if (Y.p_minus > 2.0 / (2.0 - s) or abs(a) >= GRADIENT_ZERO) else "b"
    res = eval_pv_glaplacian(psi, x0, Y, s, cfg, beta=beta)
    eta = eval_g_gradient(psi, x0, Y, s, cfg) if f.uses_eta else 0.0
    rhs = float(f(x0, u0, eta))
    margin = (res.value - rhs) / max(1.0, abs(rhs))
    return CheckReport("viscosity_point", bool(margin >= -tol), (x0,), margin,
                       f"case ({case}); margin = (lhs - rhs)/max(1, |rhs|)", bound=-tol,
                       extra={"lhs": res.value, "rhs": rhs, "gradient": a, "curvature": c, "radius": radius,
                              "error_estimate": res.error_estimate, "eta": eta, "case": case})


# -- Caccioppoli ---------------------------------------------------------------------


def _cacc_parts(u, xi, Y, s, cfg, m, panels):
    kl, kr = xi.support
    x, w = _core_x_rule(u, kl, kr, m, panels)
    xi_fun = xi.as_function()
    Gx = Y.G(xi(x))
    du = np.array([eval_g_gradient(u, float(t), Y, s, cfg) for t in x])
    dxi = np.array([eval_g_gradient(xi_fun, float(t), Y, s, cfg) for t in x])
    return float(np.sum(w * Gx * du)), float(np.sum(w * dxi))


def caccioppoli_report(u: SampledFunction, xi: TestFunction, Y: YoungFunction, s: float, f: SourceFunction,
                       cfg: QuadratureConfig | None = None, order: int = 8, panels=(4, 8, 16),
                       stability: float = 0.1) -> CheckReport:
    """Ratio ``LHS / RHS`` of the Caccioppoli estimate.

    ``LHS = int_K int G(|D_s u|) G(xi(x)) dmu = int_K G(xi) D_g^s u dx`` and
    ``RHS = G(osc u) (int_K D_g^s xi dx + gamma_inf) + osc u``.  The ratio is
    recomputed on successively refined x-rules (``panels``) and must stay
    finite and change by at most ``stability`` (relative).
    """
    if not 0 <= xi.height <= 1:
        raise ValueError("xi must take values in [0, 1]")
    cfg = cfg or DEFAULT_CONFIG
    f.check_growth(Y)
    osc = u.oscillation()
    gam = f.gamma_inf(u.sup_abs())
    rows = []
    for p in panels:
        lhs, dxi = _cacc_parts(u, xi, Y, s, cfg, order, p)
        rhs = float(Y.G(osc)) * (dxi + gam) + osc
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
        rows.append({"panels": p, "lhs": lhs, "rhs": rhs, "ratio": ratio})
    ratios = np.array([r["ratio"] for r in rows])
    finite = bool(np.all(np.isfinite(ratios)))
    ref = abs(ratios[-1]) if finite else math.inf
    change = float(np.max(np.abs(np.diff(ratios)))) / ref if finite and ref > 0 else 0.0
    passed = finite and change <= stability
    return CheckReport("caccioppoli", passed, (xi.center, xi.radius), float(ratios[-1]),
                       "LHS/RHS, stable under refinement of the x-rule", bound=None,
                       extra={"rows": rows, "relative_change": change, "osc": osc, "gamma_inf": gam})
