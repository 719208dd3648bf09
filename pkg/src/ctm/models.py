"""Categorical reference-dependent models: evaluation, mixtures, level sets.

Every model answers ``evaluate(x, r) -> (category, utility)``. A
:class:`CtmModel` additionally exposes per-category additive utilities
``U^k(x) = U^k_1(x1) + U^k_2(x2) + c_k`` and an optional reference-dependent
affine transform ``alpha(k, r) * U^k + beta(k, r)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, Sequence

import contourpy
import numpy as np
from scipy.optimize import brentq

from ctm.core import (
    BOUNDARY,
    POSITIVE,
    SIGNED,
    Alternative,
    Box,
    CategoryFunction,
    Domain,
    GainLoss,
    HalfPlanes,
    SingleCategory,
    as_alternative,
)
from ctm.errors import ConstructionError, RangeError
from ctm.salience import (
    SIGMA_BGS,
    SIGMA_BGS_SIGNED,
    SalienceFunction,
    categories_from_salience,
)

# ---------------------------------------------------------------------------
# Scalar utilities


@dataclass(frozen=True)
class ScalarUtility:
    """``coef * base(t)`` for an increasing ``base`` with optional inverse."""

    base: Callable[[float], float] = field(compare=False)
    inverse: Callable[[float], float] | None = field(default=None, compare=False)
    name: str = "linear"
    coef: float = 1.0

    def __call__(self, t: float) -> float:
        return self.coef * self.base(t)

    @property
    def direction(self) -> int:
        """+1 increasing, -1 decreasing, 0 constant."""
        return (self.coef > 0) - (self.coef < 0)

    def scaled(self, c: float) -> ScalarUtility:
        return replace(self, coef=self.coef * c)

    def invert(self, target: float, bracket: tuple[float, float]) -> float:
        """Solve ``self(t) = target`` for ``t`` inside ``bracket``."""
        if self.coef == 0:
            raise RangeError("a constant utility has no inverse")
        if self.inverse is not None:
            try:
                t = self.inverse(target / self.coef)
            except (ValueError, OverflowError, ZeroDivisionError) as exc:
                raise RangeError(f"{target} outside the range of {self.name}") from exc
            if bracket[0] <= t <= bracket[1]:
                return t
            raise RangeError(f"inverse {t} of {target} outside {bracket}")
        lo, hi = bracket
        flo, fhi = self(lo) - target, self(hi) - target
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if (flo > 0) == (fhi > 0):
            raise RangeError(f"{target} not attained by {self.name} on {bracket}")
        return brentq(lambda t: self(t) - target, lo, hi, xtol=1e-15, maxiter=200)

    def __repr__(self) -> str:
        return self.name if self.coef == 1 else f"{self.coef:g}*{self.name}"


LINEAR = ScalarUtility(lambda t: t, lambda v: v, "linear")
LOG = ScalarUtility(math.log, math.exp, "log")
SQRT = ScalarUtility(math.sqrt, lambda v: v * v if v >= 0 else math.nan, "sqrt")
CUBE = ScalarUtility(lambda t: t ** 3, lambda v: math.copysign(abs(v) ** (1 / 3), v), "cube")


def power_utility(p: float) -> ScalarUtility:
    if p <= 0:
        raise ConstructionError("power utility needs p > 0")
    return ScalarUtility(lambda t: t ** p, lambda v: v ** (1 / p), f"power({p:g})")


BUILTIN_UTILITIES = {"linear": LINEAR, "log": LOG, "sqrt": SQRT, "cube": CUBE}


def get_utility(name: str) -> ScalarUtility:
    if name in BUILTIN_UTILITIES:
        return BUILTIN_UTILITIES[name]
    if name.startswith("power:"):
        return power_utility(float(name.split(":", 1)[1]))
    raise ConstructionError(f"unknown utility {name!r}")


# ---------------------------------------------------------------------------
# Valuations and preferences


@dataclass(frozen=True)
class Valuation:
    category: Any
    utility: float | None
    label: str | None = None


class Preference(enum.Enum):
    FIRST = "Strict(x)"
    SECOND = "Strict(y)"
    INDIFFERENT = "Indifferent"
    UNDEFINED = "Undefined"


class ReferenceModel:
    """Anything that categorizes and values alternatives given a reference."""

    def __init__(self, name: str, catfn: CategoryFunction, box: Box | None = None,
                 ref_box: Box | None = None,
                 canned: Mapping[str, Sequence[dict]] | None = None,
                 params: Mapping[str, Any] | None = None) -> None:
        self.name = name
        self.catfn = catfn
        self.domain: Domain = catfn.domain
        self.box = box or catfn.domain_box
        self.ref_box = ref_box or self.box
        self.canned = {k: tuple(v) for k, v in (canned or {}).items()}
        self.params = dict(params or {})

    @property
    def tolerance(self) -> float:
        return self.catfn.tolerance

    def evaluate(self, x: Alternative, r: Alternative) -> tuple[Any, float]:
        """Unvalidated ``(category, utility)``; utility is NaN on a frontier."""
        raise NotImplementedError

    def utility_in(self, k: int, x: Alternative, r: Alternative) -> float:
        """Utility ``x`` would receive if it were in category ``k``."""
        raise NotImplementedError

    def value(self, x: Sequence[float], r: Sequence[float]) -> Valuation:
        x = as_alternative(x, self.domain)
        r = as_alternative(r, self.domain)
        k, u = self.evaluate(x, r)
        if k is BOUNDARY:
            return Valuation(BOUNDARY, None, None)
        return Valuation(k, u, self.catfn.labels[k - 1])

    def prefer(self, x: Sequence[float], y: Sequence[float], r: Sequence[float],
               tol: float | None = None) -> Preference:
        x = as_alternative(x, self.domain)
        y = as_alternative(y, self.domain)
        r = as_alternative(r, self.domain)
        if x == y:
            return Preference.INDIFFERENT
        kx, ux = self.evaluate(x, r)
        ky, uy = self.evaluate(y, r)
        if kx is BOUNDARY or ky is BOUNDARY:
            return Preference.UNDEFINED
        return compare_utilities(ux, uy, self.tolerance if tol is None else tol)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


def compare_utilities(ux: float, uy: float, tol: float) -> Preference:
    d = ux - uy
    if d > tol:
        return Preference.FIRST
    if d < -tol:
        return Preference.SECOND
    return Preference.INDIFFERENT


AffinePair = Callable[[int, Alternative], tuple[float, float]]


class CtmModel(ReferenceModel):
    """Category function plus additive category utilities.

    ``category_utilities[k-1]`` is the pair ``(U^k_1, U^k_2)``;
    ``constants[k-1]`` is an additive level shift of category ``k``.
    ``ref_transform(k, r)`` returns ``(alpha, beta)``; ``None`` means the
    identity for every category (a strong model).
    """

    def __init__(self, name: str, catfn: CategoryFunction,
                 category_utilities: Sequence[tuple[ScalarUtility, ScalarUtility]],
                 constants: Sequence[float] | None = None,
                 ref_transform: AffinePair | None = None,
                 increasing: bool = True, **kwargs: Any) -> None:
        super().__init__(name, catfn, **kwargs)
        if len(category_utilities) != catfn.m:
            raise ConstructionError(
                f"{catfn.m} categories but {len(category_utilities)} utility pairs")
        self.category_utilities = tuple(tuple(p) for p in category_utilities)
        self.constants = tuple(constants) if constants is not None else (0.0,) * catfn.m
        if len(self.constants) != catfn.m:
            raise ConstructionError("one constant per category required")
        self.ref_transform = ref_transform
        self.increasing = increasing
        self._spot_check()

    @property
    def strong(self) -> bool:
        return self.ref_transform is None

    def _spot_check(self) -> None:
        for k, pair in enumerate(self.category_utilities, 1):
            for i, u in enumerate(pair):
                if self.increasing and u.direction < 0:
                    raise ConstructionError(f"U^{k}_{i + 1} decreases in an increasing model")
                if u.direction == 0:
                    continue
                lo = self.box.x0 if i == 0 else self.box.y0
                hi = self.box.x1 if i == 0 else self.box.y1
                ts = np.linspace(lo, hi, 100)
                vals = np.array([u(float(t)) for t in ts])
                steps = np.diff(vals) * u.direction
                if not np.all(steps > 0):
                    raise ConstructionError(f"U^{k}_{i + 1} is not strictly monotone on [{lo}, {hi}]")

    def category_utility(self, k: int, x: Alternative) -> float:
        """``U^k(x)`` before the reference transform."""
        u1, u2 = self.category_utilities[k - 1]
        return u1(x[0]) + u2(x[1]) + self.constants[k - 1]

    def transform(self, k: int, r: Alternative, u: float) -> float:
        if self.ref_transform is None:
            return u
        alpha, beta = self.ref_transform(k, r)
        return alpha * u + beta

    def utility_in(self, k: int, x: Alternative, r: Alternative) -> float:
        """``U^k(x | r)`` regardless of the category ``x`` falls in."""
        return self.transform(k, r, self.category_utility(k, x))

    def evaluate(self, x: Alternative, r: Alternative) -> tuple[Any, float]:
        k = self.catfn._classify(x, r)
        if k is BOUNDARY:
            return BOUNDARY, math.nan
        return k, self.utility_in(k, x, r)


def mix(model: CtmModel, k: int, x: Sequence[float], y: Sequence[float],
        alpha: float) -> Alternative:
    """Utility-space mixture of ``x`` and ``y`` under category ``k``.

    Returns ``z`` with ``U^k_i(z_i) = alpha U^k_i(x_i) + (1 - alpha) U^k_i(y_i)``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    x = as_alternative(x, model.domain)
    y = as_alternative(y, model.domain)
    if alpha == 1.0:
        return x
    if alpha == 0.0:
        return y
    z = []
    for i, u in enumerate(model.category_utilities[k - 1]):
        if u.direction == 0:
            z.append(alpha * x[i] + (1 - alpha) * y[i])
            continue
        target = alpha * u(x[i]) + (1 - alpha) * u(y[i])
        zi = u.invert(target, model.domain.bracket(i))
        if abs(u(zi) - target) >= 1e-10 * max(1.0, abs(target)):
            raise RangeError(f"mixture residual too large on coordinate {i + 1}")
        z.append(zi)
    return (z[0], z[1])


# ---------------------------------------------------------------------------
# Level sets


@dataclass(frozen=True)
class Polyline:
    category: int
    label: str
    points: tuple[Alternative, ...]


def trace_indifference(model: CtmModel, r: Sequence[float], level: float, window: Box,
                       step: float) -> list[Polyline]:
    """Polylines where ``U(x | r) = level``, split at category frontiers."""
    r = as_alternative(r, model.domain)
    xs = np.arange(window.x0, window.x1 + 0.5 * step, step)
    ys = np.arange(window.y0, window.y1 + 0.5 * step, step)
    cats = np.zeros((len(ys), len(xs)), dtype=int)
    for iy, yv in enumerate(ys):
        for ix, xv in enumerate(xs):
            p = (float(xv), float(yv))
            if model.domain.contains(p):
                k = model.catfn._classify(p, r)
                cats[iy, ix] = 0 if k is BOUNDARY else k
    out: list[Polyline] = []
    for k in range(1, model.catfn.m + 1):
        inside = cats == k
        if not inside.any():
            continue
        field_k = np.full(cats.shape, np.nan)
        for iy, ix in zip(*np.nonzero(inside)):
            field_k[iy, ix] = model.utility_in(k, (float(xs[ix]), float(ys[iy])), r) - level
        gen = contourpy.contour_generator(
            xs, ys, np.ma.masked_array(np.nan_to_num(field_k), mask=~inside),
            line_type=contourpy.LineType.Separate,
        )
        for line in gen.lines(0.0):
            pts: list[Alternative] = []
            for a, b in line:
                p = (float(a), float(b))
                if not pts or math.dist(p, pts[-1]) > 1e-12:
                    pts.append(p)
            if len(pts) >= 2:
                out.append(Polyline(k, model.catfn.labels[k - 1], tuple(pts)))
    return out


# ---------------------------------------------------------------------------
# Category functions used by presets


class FrontierCategories(CategoryFunction):
    """``K1 = {f(x) > f(r)}`` and ``K2 = {f(x) < f(r)}`` for monotone ``f``."""

    def __init__(self, frontier: Callable[[float, float], float],
                 domain: Domain = POSITIVE, domain_box: Box | None = None,
                 tolerance: float = 1e-9, name: str = "frontier") -> None:
        super().__init__(("better", "not-better"), domain, domain_box, tolerance, name=name)
        self.frontier = frontier

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        g = self.frontier(x[0], x[1]) - self.frontier(r[0], r[1])
        return (g, -g)


class PrototypeCategories(CategoryFunction):
    """Nearest prototype under ``d_r(p, x) = r1 |x1 - p1| + r2 |x2 - p2|``."""

    def __init__(self, prototypes: Sequence[Alternative], domain_box: Box | None = None,
                 tolerance: float = 1e-9) -> None:
        if len(prototypes) < 1:
            raise ConstructionError("at least one prototype required")
        labels = tuple(f"near-p{i}" for i in range(1, len(prototypes) + 1))
        super().__init__(labels, POSITIVE, domain_box, tolerance, name="prototypes")
        self.prototypes = tuple(as_alternative(p) for p in prototypes)

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        d = [r[0] * abs(x[0] - p[0]) + r[1] * abs(x[1] - p[1]) for p in self.prototypes]
        if len(d) == 1:
            return (math.inf,)
        out = []
        for i, di in enumerate(d):
            out.append(min(dj for j, dj in enumerate(d) if j != i) - di)
        return tuple(out)


class DateCategories(CategoryFunction):
    """Short term ``t < r_t`` versus long term ``t > r_t`` for ``(c, t)``."""

    def __init__(self, domain_box: Box | None = None, tolerance: float = 1e-9) -> None:
        super().__init__(("short", "long"), Domain((True, False)),
                         domain_box or Box(0.5, 0.0, 5.0, 10.0), tolerance, name="dates")

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        g = r[1] - x[1]
        return (g, -g)


# ---------------------------------------------------------------------------
# Presets


def neoclassical(u1: ScalarUtility = LINEAR, u2: ScalarUtility = LINEAR,
                 box: Box | None = None) -> CtmModel:
    box = box or Box.square(0.5, 10.0)
    return CtmModel("neoclassical", SingleCategory(domain_box=box), [(u1, u2)],
                    params={"model": "neoclassical", "u1": u1.name, "u2": u2.name})


def tk(lam1: float = 2.0, lam2: float = 2.0, u1: ScalarUtility = LINEAR,
       u2: ScalarUtility = LINEAR, box: Box | None = None) -> CtmModel:
    """Loss aversion on each dimension, gains and losses measured from ``r``."""
    if lam1 <= 0 or lam2 <= 0:
        raise ConstructionError("loss-aversion coefficients must be positive")
    box = box or Box.square(1.0, 20.0)
    coefs = ((1.0, 1.0), (lam1, 1.0), (1.0, lam2), (lam1, lam2))
    utilities = [(u1.scaled(a), u2.scaled(b)) for a, b in coefs]

    def shift(k: int, r: Alternative) -> tuple[float, float]:
        a, b = coefs[k - 1]
        return 1.0, -(a * u1(r[0]) + b * u2(r[1]))

    canned = {"RefIrrel": [{"x": (12.0, 12.0), "y": (9.0, 16.0),
                            "r": (10.0, 10.0), "r_p": (11.0, 11.0)}]}
    return CtmModel("tk", GainLoss(domain_box=box), utilities, ref_transform=shift,
                    canned=canned,
                    params={"model": "tk", "lam1": lam1, "lam2": lam2,
                            "u1": u1.name, "u2": u2.name})


def mo(c: float | Callable[[Alternative], float] = 1.0,
       frontier: Callable[[float, float], float] | None = None,
       u1: ScalarUtility = LINEAR, u2: ScalarUtility = LINEAR,
       box: Box | None = None, frontier_name: str = "x1/2 + x2") -> CtmModel:
    """Alternatives not unambiguously better than ``r`` pay a cost ``c``."""
    box = box or Box.square(0.5, 5.0)
    frontier = frontier or (lambda a, b: 0.5 * a + b)
    catfn = FrontierCategories(frontier, domain_box=box, name="mo-frontier")
    canned = {"Cancel": [{"x1": 2.0, "y1": 1.0, "z1": 4.0, "x2": 1.0, "y2": 2.0,
                              "z2": 4.0, "r": (0.9, 1.9)}]}
    params = {"model": "mo", "frontier": frontier_name, "u1": u1.name, "u2": u2.name}
    if callable(c):
        cost = c
        params["c"] = "reference-dependent"
        return CtmModel("mo", catfn, [(u1, u2), (u1, u2)],
                        ref_transform=lambda k, r: (1.0, 0.0 if k == 1 else -cost(r)),
                        canned=canned, params=params)
    if c < 0:
        raise ConstructionError("the cost c must be nonnegative")
    params["c"] = c
    return CtmModel("mo", catfn, [(u1, u2), (u1, u2)], constants=(0.0, -float(c)),
                    canned=canned, params=params)


def bgs(w: float | None = 0.6, weights: Sequence[Sequence[float]] | None = None,
        sigma: SalienceFunction | None = None, u1: ScalarUtility = LINEAR,
        u2: ScalarUtility = LINEAR, signed: bool = False, box: Box | None = None,
        ref_box: Box | None = None) -> CtmModel:
    """Salient thinking: the salient dimension gets the larger weight.

    ``weights[k-1] = (w^k_1, w^k_2)``; by default ``w^1 = (w, 1-w)`` and
    ``w^2 = (1-w, w)``.
    """
    sigma = sigma or (SIGMA_BGS_SIGNED if signed else SIGMA_BGS)
    if signed and not sigma.signed:
        sigma = SalienceFunction(sigma.name, sigma.fn, True)
    if weights is None:
        if w is None or not 0 < w < 1:
            raise ConstructionError("w must lie in (0, 1)")
        weights = ((w, 1 - w), (1 - w, w))
    if any(v <= 0 for pair in weights for v in pair):
        raise ConstructionError("salience weights must be positive")
    box = box or (Box(-12.0, 4.0, -1.0, 10.0) if signed else Box.square(0.5, 5.0))
    catfn = categories_from_salience(sigma, domain_box=box)
    utilities = [(u1.scaled(a), u2.scaled(b)) for a, b in weights]
    canned: dict[str, list[dict]] = {}
    if signed:
        canned["Cancel"] = [{"x1": -8.0, "y1": -10.0, "z1": -2.0, "x2": 5.1,
                                 "y2": 6.9, "z2": 8.0, "r": (-9.0, 6.0)}]
    return CtmModel("bgs-wine" if signed else "bgs", catfn, utilities,
                    canned=canned, ref_box=ref_box,
                    params={"model": "bgs", "w": w, "weights": [list(p) for p in weights],
                            "salience": sigma.name, "signed": signed,
                            "u1": u1.name, "u2": u2.name})


def bgs_wine() -> CtmModel:
    """Linear salient thinker with prices as negative attribute levels."""
    return bgs(0.6, signed=True)


def pt(prototypes: Sequence[Alternative] = ((2.0, 8.0), (8.0, 2.0)),
       hedonic: Callable[[float, float], float] | None = None,
       slopes: Sequence[tuple[float, float]] | None = None,
       box: Box | None = None, ref_box: Box | None = None) -> CtmModel:
    """Prototype model: value the nearest prototype, adjust linearly.

    ``V(x) = U(p^i) + lambda^i_1 (x1 - p^i_1) + lambda^i_2 (x2 - p^i_2)``.
    By default ``U(p) = sqrt(p1 p2)`` and the slopes are its gradient at the
    prototype.
    """
    hedonic = hedonic or (lambda a, b: math.sqrt(a * b))
    protos = [as_alternative(p) for p in prototypes]
    if slopes is None:
        slopes = [(0.5 * math.sqrt(p[1] / p[0]), 0.5 * math.sqrt(p[0] / p[1])) for p in protos]
    if len(slopes) != len(protos):
        raise ConstructionError("one slope pair per prototype required")
    box = box or Box.square(1.0, 9.0)
    ref_box = ref_box or Box.square(0.5, 3.0)
    catfn = PrototypeCategories(protos, domain_box=box)
    utilities = [(LINEAR.scaled(a), LINEAR.scaled(b)) for a, b in slopes]
    constants = [hedonic(*p) - a * p[0] - b * p[1] for p, (a, b) in zip(protos, slopes)]
    return CtmModel("pt", catfn, utilities, constants=constants, ref_box=ref_box,
                    params={"model": "pt", "prototypes": [list(p) for p in protos],
                            "slopes": [list(s) for s in slopes]})


def qh(beta: float = 0.8, delta: float = 0.95, u: ScalarUtility = LINEAR,
       box: Box | None = None) -> CtmModel:
    """Quasi-hyperbolic discounting around a reference date, in log space.

    Alternatives are ``(c, t)``; the reference date is ``r[1]``. Before it
    the value is ``(beta delta)^t u(c)``; after it ``beta^{r_t} delta^t u(c)``.
    Utilities are logarithms of these values.
    """
    if not (0 < beta <= 1 and 0 < delta <= 1):
        raise ConstructionError("beta and delta must lie in (0, 1]")
    log_u = ScalarUtility(lambda c: math.log(u(c)), None, f"log({u.name})")
    if u.inverse is not None:
        log_u = replace(log_u, inverse=lambda v: u.inverse(math.exp(v)))
    date = ScalarUtility(lambda t: t, lambda v: v, "t")
    utilities = [(log_u, date.scaled(math.log(beta * delta))),
                 (log_u, date.scaled(math.log(delta)))]
    log_beta = math.log(beta)

    def shift(k: int, r: Alternative) -> tuple[float, float]:
        return 1.0, (r[1] * log_beta if k == 2 else 0.0)

    return CtmModel("qh", DateCategories(domain_box=box), utilities, ref_transform=shift,
                    increasing=False,
                    params={"model": "qh", "beta": beta, "delta": delta, "u": u.name})


def qh_level(utility: float) -> float:
    """Convert a log-space quasi-hyperbolic utility back to a discounted value."""
    return math.exp(utility)


def ria(alpha: float = 0.5, beta: float = 0.25, box: Box | None = None) -> CtmModel:
    """Inequity aversion measured against reference allocations.

    Category "guilt" holds allocations where own gain over the reference
    exceeds the other's; "envy" is the reverse.
    """
    if not (alpha >= beta >= 0 and beta < 1):
        raise ConstructionError("need alpha >= beta >= 0 and beta < 1")
    box = box or Box.square(-5.0, 5.0)
    catfn = HalfPlanes(1.0, -1.0, ("guilt", "envy"), SIGNED, box, name="ria")
    utilities = [(LINEAR.scaled(1 - beta), LINEAR.scaled(beta)),
                 (LINEAR.scaled(1 + alpha), LINEAR.scaled(-alpha))]

    def shift(k: int, r: Alternative) -> tuple[float, float]:
        if k == 1:
            return 1.0, beta * (r[0] - r[1])
        return 1.0, alpha * (r[1] - r[0])

    return CtmModel("ria", catfn, utilities, ref_transform=shift, increasing=False,
                    params={"model": "ria", "alpha": alpha, "beta": beta})


def rddp(lam: float = 0.5, delta: float = 0.5, box: Box | None = None) -> CtmModel:
    """Rank-dependent weighting of the worst gain relative to the reference."""
    if not (0 < lam < 1 and 0 < delta < 1):
        raise ConstructionError("lambda and delta must lie in (0, 1)")
    box = box or Box.square(-5.0, 5.0)
    catfn = HalfPlanes(-1.0, 1.0, ("worst-1", "worst-2"), SIGNED, box, name="rddp")
    coefs = ((1.0, lam * (1 - delta)), (1 - lam * delta, lam))
    utilities = [(LINEAR.scaled(a), LINEAR.scaled(b)) for a, b in coefs]

    def shift(k: int, r: Alternative) -> tuple[float, float]:
        a, b = coefs[k - 1]
        return 1.0, -(a * r[0] + b * r[1])

    return CtmModel("rddp", catfn, utilities, ref_transform=shift,
                    params={"model": "rddp", "lambda": lam, "delta": delta})


class CbgsModel(ReferenceModel):
    """Continuous salience weighting: ``sum_i w(x_i, r_i) x_i``.

    The weight varies smoothly with the reference inside every category,
    so within-category preferences depend on the reference.
    """

    def __init__(self, catfn: CategoryFunction, sigma: SalienceFunction = SIGMA_BGS,
                 base: float = 1.0, box: Box | None = None) -> None:
        if base <= 0:
            raise ConstructionError("the base weight must be positive")
        super().__init__("cbgs", catfn, box=box,
                         params={"model": "cbgs", "salience": sigma.name, "base": base,
                                 "categories": catfn.name})
        self.sigma = sigma
        self.base = base

    def weight(self, a: float, b: float) -> float:
        return self.base + self.sigma.fn(a, b)

    def utility_in(self, k: int, x: Alternative, r: Alternative) -> float:
        return self.weight(x[0], r[0]) * x[0] + self.weight(x[1], r[1]) * x[1]

    def evaluate(self, x: Alternative, r: Alternative) -> tuple[Any, float]:
        k = self.catfn._classify(x, r)
        if k is BOUNDARY:
            return BOUNDARY, math.nan
        return k, self.utility_in(k, x, r)


def cbgs(categories: str = "salience", sigma: SalienceFunction = SIGMA_BGS,
         base: float = 1.0, box: Box | None = None) -> CbgsModel:
    box = box or Box.square(0.5, 5.0)
    if categories == "salience":
        catfn: CategoryFunction = categories_from_salience(sigma, domain_box=box)
    elif categories == "gain-loss":
        catfn = GainLoss(domain_box=box)
    else:
        raise ConstructionError(f"unknown category family {categories!r}")
    return CbgsModel(catfn, sigma, base, box)
