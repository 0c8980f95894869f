"""Functions on the real line for the integral routines.

A :class:`SampledFunction` is either a named closed form from the generator
registry or piecewise-linear grid data on ``[-L, L]``; outside its core it
follows an explicit :class:`TailModel`.  Every integral in the package reads
only ``u(x)``, the kink list (panel split points) and the tail model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import SchemaError, ValidationError

TAIL_MODELS = ("zero", "constant", "decay")


@dataclass(frozen=True)
class TailModel:
    """Behaviour of ``u`` for ``|y| > L``.

    ``zero``: ``u = 0``; ``constant``: ``u = c``; ``decay``:
    ``u(y) = c |y|^(-alpha)`` (negative ``alpha`` means growth).  ``c_left``
    overrides the coefficient for ``y < -L``.
    """

    model: str = "zero"
    c: float = 0.0
    alpha: float = 0.0
    c_left: float | None = None

    def __post_init__(self):
        if self.model not in TAIL_MODELS:
            raise SchemaError(f"unknown tail model {self.model!r}; expected one of {TAIL_MODELS}")
        if not (math.isfinite(self.c) and math.isfinite(self.alpha)):
            raise ValidationError("tail parameters must be finite")

    def value(self, y):
        y = np.asarray(y, dtype=float)
        if self.model == "zero":
            return np.zeros_like(y)
        cl = self.c if self.c_left is None else self.c_left
        coef = np.where(y < 0, cl, self.c)
        if self.model == "constant":
            return coef * np.ones_like(y)
        with np.errstate(divide="ignore"):
            return coef * np.abs(y) ** (-self.alpha)

    @property
    def amplitude(self) -> float:
        cl = self.c if self.c_left is None else self.c_left
        return max(abs(self.c), abs(cl))

    @property
    def growth(self) -> float:
        """Exponent ``gamma`` with ``|u(y)| ~ |y|^gamma``; ``-inf`` for a vanishing tail."""
        if self.model == "zero" or self.amplitude == 0.0:
            return -math.inf
        if self.model == "constant":
            return 0.0
        return -self.alpha

    def to_dict(self):
        out = {"model": self.model, "c": self.c}
        if self.model == "decay":
            out["alpha"] = self.alpha
        if self.c_left is not None:
            out["c_left"] = self.c_left
        return out

    @classmethod
    def from_dict(cls, block):
        if block is None:
            return cls()
        if not isinstance(block, dict):
            raise SchemaError("tail must be an object")
        block = dict(block)
        model = str(block.pop("model", "zero")).lower()
        try:
            return cls(model, float(block.pop("c", 0.0)), float(block.pop("alpha", 0.0)),
                       None if block.get("c_left") is None else float(block.pop("c_left")))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad tail block: {exc}") from None


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """A real function with a core region and an analytic tail.

    Parameters
    ----------
    fun : callable
        Vectorized evaluator on the whole line (tail already included).
    kinks : ndarray
        Points where ``u`` may fail to be smooth; quadrature splits there.
    tail : TailModel
        Envelope of ``u`` beyond ``L``.
    L : float
        Half-width of the core; the tail model describes ``|y| > L``.
    """

    fun: Callable = field(repr=False)
    kinks: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    tail: TailModel = field(default_factory=TailModel)
    L: float = 0.0
    lipschitz_hint: float | None = None
    kind: str = "callable"
    name: str = ""
    params: dict = field(default_factory=dict)
    nodes: np.ndarray | None = field(repr=False, default=None)
    values: np.ndarray | None = field(repr=False, default=None)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.fun(x)

    @property
    def growth(self) -> float:
        return self.tail.growth

    @property
    def bounded(self) -> bool:
        return self.tail.growth <= 0

    def sup_abs(self, samples=4001) -> float:
        """Sampled ``sup |u|`` over the core plus the tail amplitude."""
        R = max(self.L, 1.0)
        x = np.concatenate((np.linspace(-R, R, samples), self.kinks))
        core = float(np.max(np.abs(self(x))))
        if not self.bounded:
            return math.inf
        return max(core, self.tail.amplitude if self.tail.model != "zero" else 0.0)

    def oscillation(self, samples=4001) -> float:
        R = max(self.L, 1.0)
        x = np.concatenate((np.linspace(-R, R, samples), self.kinks))
        v = self(x)
        lo, hi = float(v.min()), float(v.max())
        if self.tail.model != "zero":
            cl = self.tail.c if self.tail.c_left is None else self.tail.c_left
            if self.tail.model == "constant":
                lo, hi = min(lo, self.tail.c, cl), max(hi, self.tail.c, cl)
            elif self.tail.alpha < 0:
                return math.inf
        else:
            lo, hi = min(lo, 0.0), max(hi, 0.0)
        return hi - lo

    def derivative(self, x, h=None):
        """Central difference ``u'(x)``."""
        x = np.asarray(x, dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(x)) if h is None else h
        return (self(x + h) - self(x - h)) / (2.0 * h)

    # -- transformations used by the property tests -------------------------

    def scaled(self, c: float) -> "SampledFunction":
        """``c * u``."""
        t = self.tail
        tail = TailModel(t.model, c * t.c, t.alpha, None if t.c_left is None else c * t.c_left)
        f = self.fun
        return SampledFunction(lambda x: c * f(x), self.kinks, tail, self.L,
                               None if self.lipschitz_hint is None else abs(c) * self.lipschitz_hint,
                               "callable", self.name, {**self.params, "_scaled": c})

    def translated(self, h: float) -> "SampledFunction":
        """``u(. - h)``.  The tail envelope is kept; the core widens by ``|h|``."""
        f = self.fun
        return SampledFunction(lambda x: f(x - h), self.kinks + h, self.tail, self.L + abs(h),
                               self.lipschitz_hint, "callable", self.name, {**self.params, "_shift": h})

    def dilated(self, lam: float) -> "SampledFunction":
        """``u(lam .)`` for ``lam > 0``."""
        if not lam > 0:
            raise ValueError("dilation needs lam > 0")
        f = self.fun
        t = self.tail
        fac = lam ** (-t.alpha) if t.model == "decay" else 1.0
        tail = TailModel(t.model, t.c * fac, t.alpha, None if t.c_left is None else t.c_left * fac)
        return SampledFunction(lambda x: f(lam * x), self.kinks / lam, tail, self.L / lam,
                               None if self.lipschitz_hint is None else lam * self.lipschitz_hint,
                               "callable", self.name, {**self.params, "_dilate": lam})

    def to_dict(self):
        if self.kind == "grid":
            return {"kind": "grid", "L": self.L, "values": [float(v) for v in self.values],
                    "tail": self.tail.to_dict()}
        if self.kind == "closed_form":
            return {"kind": "closed_form", "name": self.name,
                    "params": {k: v for k, v in self.params.items() if not k.startswith("_")}}
        return {"kind": self.kind, "name": self.name}


# -- grid data -----------------------------------------------------------------


def from_grid(values, L: float, tail: TailModel | dict | None = None, lipschitz_hint=None,
              continuity_rtol: float = 0.1) -> SampledFunction:
    """Piecewise-linear interpolant of ``values`` on a uniform grid over ``[-L, L]``.

    The tail model must match the boundary values within ``continuity_rtol``
    of the function's scale.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValidationError("grid values must be a 1-D array with at least 2 entries")
    if not L > 0:
        raise ValidationError(f"grid half-width L must be positive, got {L}")
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.size:
        raise ValidationError("grid values must be finite", sample=(int(bad[0]),))
    tail = tail if isinstance(tail, TailModel) else TailModel.from_dict(tail)
    x = np.linspace(-L, L, v.size)
    scale = max(float(np.max(np.abs(v))), 1e-300)
    ends = tail.value(np.array([-L, L]))
    gap = np.abs(ends - v[[0, -1]])
    if np.any(gap > continuity_rtol * scale + 1e-14):
        side = int(np.argmax(gap))
        raise ValidationError(
            f"tail model differs from the boundary value by {gap[side]:.3g} (> {continuity_rtol:.0%} of scale)",
            sample=(float([-L, L][side]),),
        )
    if lipschitz_hint is not None:
        slopes = np.abs(np.diff(v)) / (x[1] - x[0])
        i = int(np.argmax(slopes))
        if slopes[i] > lipschitz_hint * (1.0 + 1e-9):
            raise ValidationError(f"grid slope {slopes[i]:.6g} exceeds lipschitz_hint {lipschitz_hint}",
                                  sample=(float(x[i]),))
    xv = x.copy()
    vv = v.copy()
    xv.setflags(write=False)
    vv.setflags(write=False)

    def fun(y):
        y = np.asarray(y, dtype=float)
        inside = np.abs(y) <= L
        return np.where(inside, np.interp(y, xv, vv), tail.value(y))

    return SampledFunction(fun, xv, tail, float(L), lipschitz_hint, "grid", "grid", {}, xv, vv)


def from_callable(fun, kinks=(), tail: TailModel | None = None, L: float = 0.0, name: str = "callable",
                  lipschitz_hint=None) -> SampledFunction:
    """Wrap a vectorized callable defined on the whole line."""
    return SampledFunction(fun, np.unique(np.asarray(kinks, dtype=float)), tail or TailModel(), float(L),
                           lipschitz_hint, "callable", name, {})


def patched(outer: SampledFunction, lo: float, hi: float, inner, kinks=()) -> SampledFunction:
    """``inner`` on ``[lo, hi]`` and ``outer`` elsewhere."""
    f = outer.fun

    def fun(y):
        y = np.asarray(y, dtype=float)
        return np.where((y >= lo) & (y <= hi), inner(y), f(y))

    ks = np.unique(np.concatenate((outer.kinks, [lo, hi], np.asarray(kinks, dtype=float))))
    return SampledFunction(fun, ks, outer.tail, max(outer.L, abs(lo), abs(hi)), None, "callable",
                           f"patched({outer.name})", {})


# -- closed-form registry ------------------------------------------------------


@dataclass(frozen=True)
class _Generator:
    name: str
    defaults: dict
    build: Callable
    doc: str


_REGISTRY: dict[str, _Generator] = {}


def _register(name, defaults, doc):
    def deco(build):
        _REGISTRY[name] = _Generator(name, defaults, build, doc)
        return build

    return deco


@_register("constant", {"c": 1.0}, "u(x) = c")
def _constant(c):
    return (lambda x: np.full(np.shape(x), float(c))), (), TailModel("constant", c) if c else TailModel(), 0.0, 0.0


@_register("linear", {"a": 1.0, "b": 0.0}, "u(x) = a x + b")
def _linear(a, b):
    tail = TailModel("decay", abs(a), -1.0) if a else TailModel("constant", b)
    return (lambda x: a * x + b), (), tail, max(1.0, 2.0 * abs(b) / max(abs(a), 1e-300)) if a else 0.0, abs(a)


@_register("abs", {"a": 1.0, "center": 0.0}, "u(x) = a |x - center|")
def _abs(a, center):
    return (lambda x: a * np.abs(x - center)), (center,), TailModel("decay", abs(a), -1.0), 2.0 * abs(center) + 1.0, abs(a)


@_register("quadratic", {"a": 1.0, "center": 0.0}, "u(x) = a (x - center)^2")
def _quadratic(a, center):
    return (lambda x: a * (x - center) ** 2), (), TailModel("decay", abs(a), -2.0), 2.0 * abs(center) + 1.0, None


@_register("abs_power", {"beta": 3.0, "a": 1.0, "center": 0.0}, "u(x) = a |x - center|^beta")
def _abs_power(beta, a, center):
    return ((lambda x: a * np.abs(x - center) ** beta), (center,), TailModel("decay", abs(a), -float(beta)),
            2.0 * abs(center) + 1.0, None)


@_register("bump", {"height": 1.0, "center": 0.0, "radius": 1.0},
           "u(x) = height exp(1 - 1/(1 - t^2)) for |t| < 1, t = (x - center)/radius")
def _bump(height, center, radius):
    if not radius > 0:
        raise ValidationError("bump radius must be positive")

    def fun(x):
        t = (np.asarray(x, dtype=float) - center) / radius
        inside = np.abs(t) < 1.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            v = height * np.exp(1.0 - 1.0 / (1.0 - t * t))
        return np.where(inside, v, 0.0)

    # max |u'| = height * 2 t / (1-t^2)^2 exp(1 - 1/(1-t^2)) at the inflection
    t = np.linspace(0.0, 0.999, 20001)
    d = 2.0 * t / (1.0 - t * t) ** 2 * np.exp(1.0 - 1.0 / (1.0 - t * t))
    lip = abs(height) * float(d.max()) / radius * 1.001
    return fun, (center - radius, center + radius), TailModel(), abs(center) + radius, lip


@_register("truncated_parabola_s", {"s": 0.5, "height": 1.0, "radius": 1.0, "center": 0.0},
           "u(x) = height (1 - t^2)_+^s, t = (x - center)/radius")
def _truncated_parabola_s(s, height, radius, center):
    if not (0 < s < 1 and radius > 0):
        raise ValidationError("truncated_parabola_s needs 0 < s < 1 and radius > 0")

    def fun(x):
        t = (np.asarray(x, dtype=float) - center) / radius
        return height * np.maximum(1.0 - t * t, 0.0) ** s

    return fun, (center - radius, center + radius), TailModel(), abs(center) + radius, None


def generators() -> list[dict]:
    """Registry listing in alphabetical order."""
    return [{"name": g.name, "params": dict(g.defaults), "doc": g.doc} for g in sorted(_REGISTRY.values(), key=lambda g: g.name)]


def closed_form(name: str, **params) -> SampledFunction:
    """Instantiate a registered closed-form generator."""
    if name not in _REGISTRY:
        raise SchemaError(f"unknown generator {name!r}; known: {sorted(_REGISTRY)}")
    gen = _REGISTRY[name]
    unknown = set(params) - set(gen.defaults)
    if unknown:
        raise SchemaError(f"generator {name!r} got unknown parameters {sorted(unknown)}")
    full = {k: float(params.get(k, v)) for k, v in gen.defaults.items()}
    fun, kinks, tail, L, lip = gen.build(**full)
    return SampledFunction(fun, np.unique(np.asarray(kinks, dtype=float)), tail, float(L), lip,
                           "closed_form", name, full)


def function_from_json(block) -> SampledFunction:
    """Parse ``{"kind": "grid", ...}`` or ``{"kind": "closed_form", ...}``."""
    if not isinstance(block, dict):
        raise SchemaError("function spec must be an object")
    kind = block.get("kind")
    if kind == "grid":
        if "values" not in block or "L" not in block:
            raise SchemaError("grid function needs 'L' and 'values'")
        return from_grid(block["values"], float(block["L"]), TailModel.from_dict(block.get("tail")),
                         block.get("lipschitz_hint"))
    if kind == "closed_form":
        if "name" not in block:
            raise SchemaError("closed_form function needs 'name'")
        params = block.get("params", {}) or {}
        if not isinstance(params, dict):
            raise SchemaError("closed_form params must be an object")
        return closed_form(block["name"], **params)
    raise SchemaError(f"unknown function kind {kind!r}")
