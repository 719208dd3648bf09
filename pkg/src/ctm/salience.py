"""Salience functions, the categories they generate and their properties."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from ctm.core import (
    BOUNDARY,
    POSITIVE,
    SIGNED,
    Alternative,
    Box,
    CategoryFunction,
    Verdict,
    check_category_definition,
)
from ctm.errors import ArityError, ConstructionError, DomainError, PreconditionError
from ctm.expr import compile_expression
from ctm.sampling import SampleBudget, SampleStream


@dataclass(frozen=True)
class SalienceFunction:
    """A bivariate contrast measure ``sigma(attribute, reference)``.

    With ``signed`` set the function accepts any nonzero-denominator reals,
    which lets prices be encoded as negative attribute levels.
    """

    name: str
    fn: Callable[[float, float], float] = field(compare=False)
    signed: bool = False

    def __call__(self, a: float, b: float) -> float:
        return eval_salience(self, a, b)


def eval_salience(sigma: SalienceFunction, a: float, b: float) -> float:
    """Evaluate ``sigma`` with domain checks."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"non-finite salience arguments ({a}, {b})")
    if not sigma.signed and (a <= 0 or b <= 0):
        raise DomainError(f"{sigma.name} needs positive arguments, got ({a}, {b})")
    try:
        value = sigma.fn(a, b)
    except (ZeroDivisionError, ValueError) as exc:
        raise DomainError(f"{sigma.name} undefined at ({a}, {b})") from exc
    if not math.isfinite(value):
        raise DomainError(f"{sigma.name} not finite at ({a}, {b})")
    return value


def _bgs(a: float, b: float) -> float:
    return abs(a - b) / (abs(a) + abs(b))


def _ratio(a: float, b: float) -> float:
    return a / b if a >= b else b / a


def _s1(a: float, b: float) -> float:
    hi, lo = (a, b) if a >= b else (b, a)
    return hi * hi / lo


def _s2(a: float, b: float) -> float:
    return abs(a * a - b * b)


def _s3(a: float, b: float) -> float:
    return abs(math.sqrt(a) - math.sqrt(b))


SIGMA_BGS = SalienceFunction("bgs", _bgs)
SIGMA_BGS_SIGNED = SalienceFunction("bgs", _bgs, signed=True)
SIGMA_RATIO = SalienceFunction("ratio", _ratio)
S1 = SalienceFunction("s1", _s1)
S2 = SalienceFunction("s2", _s2)
S3 = SalienceFunction("s3", _s3)
S4 = SalienceFunction("s4", _ratio)

BUILTIN_SALIENCE = {s.name: s for s in (SIGMA_BGS, SIGMA_RATIO, S1, S2, S3, S4)}


def get_salience(spec: str, signed: bool = False) -> SalienceFunction:
    """Look up a built-in by id, or compile an expression in ``a`` and ``b``."""
    if spec in BUILTIN_SALIENCE:
        base = BUILTIN_SALIENCE[spec]
        return SalienceFunction(base.name, base.fn, signed) if signed else base
    fn = compile_expression(spec, ("a", "b"))
    return SalienceFunction(spec, fn, signed)


# ---------------------------------------------------------------------------
# Generated categories


class SalienceCategories(CategoryFunction):
    """Coordinate ``i`` is salient when ``sigma(x_i, r_i)`` is the larger."""

    def __init__(self, sigma: SalienceFunction, domain_box: Box | None = None,
                 tolerance: float = 1e-9) -> None:
        super().__init__(
            ("1-salient", "2-salient"),
            SIGNED if sigma.signed else POSITIVE,
            domain_box or Box.square(0.5, 5.0),
            tolerance,
            name=f"salience:{sigma.name}",
        )
        self.sigma = sigma

    def gap(self, x: Alternative, r: Alternative) -> float:
        """``sigma(x1, r1) - sigma(x2, r2)``."""
        f = self.sigma.fn
        return f(x[0], r[0]) - f(x[1], r[1])

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        try:
            g = self.gap(x, r)
        except ZeroDivisionError as exc:
            raise DomainError(f"salience undefined at x={x}, r={r}") from exc
        return (g, -g)

    def _classify(self, x: Alternative, r: Alternative):
        g = self.gap(x, r)
        if g > self.tolerance:
            return 1
        if g < -self.tolerance:
            return 2
        return BOUNDARY


# Spot-check points (a, b, eps) with a > b > eps > 0.
_SPOT = (
    (2.0, 1.0, 0.5), (5.0, 4.0, 0.1), (1.5, 0.5, 0.25), (9.0, 3.0, 1.0),
    (0.8, 0.3, 0.1), (7.0, 6.5, 0.4), (3.0, 2.9, 0.05), (4.0, 0.2, 0.1),
    (6.0, 1.0, 0.9), (2.5, 2.0, 1.5), (1.1, 1.0, 0.5), (8.0, 7.0, 3.0),
)


def _ordering_violation(f: Callable[[float, float], float], a: float, b: float,
                        eps: float) -> bool:
    base = f(a, b)
    return not (f(a + eps, b) > base and f(a, b - eps) > base)


def categories_from_salience(sigma: SalienceFunction, domain_box: Box | None = None,
                             tolerance: float = 1e-9) -> SalienceCategories:
    """Two-category function generated by ``sigma`` after spot checks."""
    f = sigma.fn
    for a, b, eps in _SPOT:
        try:
            if _ordering_violation(f, a, b, eps):
                raise ConstructionError(f"{sigma.name} does not increase in contrast at {(a, b, eps)}")
            if not math.isclose(f(a, b), f(b, a), rel_tol=1e-9, abs_tol=tolerance):
                raise ConstructionError(f"{sigma.name} is not symmetric at {(a, b)}")
        except (ZeroDivisionError, ValueError) as exc:
            raise ConstructionError(f"{sigma.name} undefined at spot point {(a, b)}") from exc
    return SalienceCategories(sigma, domain_box, tolerance)


# ---------------------------------------------------------------------------
# Property reports


@dataclass(frozen=True)
class SPropertyReport:
    verdicts: dict[str, Verdict]

    @property
    def passed(self) -> bool:
        return all(not v.failed for v in self.verdicts.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.verdicts.items() if v.failed]

    def to_dict(self) -> dict[str, Any]:
        return {k: v.to_dict() for k, v in self.verdicts.items()}


def _search(canned: Iterable[dict], sampled: Iterable[dict | None],
            violates: Callable[[dict], bool]) -> Verdict:
    """First violating candidate wins; canned candidates come first."""
    n = 0
    for cand in itertools.chain(canned, sampled):
        if cand is None:
            continue
        try:
            bad = violates(cand)
        except (ZeroDivisionError, ValueError, DomainError):
            continue
        n += 1
        if bad:
            return Verdict.fail(n, cand)
    return Verdict.ok(n)


def _scale(lo: float, hi: float, u: float) -> float:
    return lo + u * (hi - lo)


def check_salience_properties(sigma: SalienceFunction, budget: SampleBudget,
                              lo: float = 0.1, hi: float = 10.0) -> SPropertyReport:
    """Sample the defining properties of a salience function on ``[lo, hi]``."""
    f = sigma.fn
    tol = budget.tolerance
    n = max(1, budget.n_samples // 6)

    def rows(label: str, width: int = 4):
        return SampleStream(budget.seed, f"salience/{sigma.name}/{label}", width).rows(n)

    def close(u: float, v: float, rel: float = 1e-9) -> bool:
        return abs(u - v) <= max(tol, rel * max(abs(u), abs(v)))

    verdicts: dict[str, Verdict] = {}

    def ordering_cands():
        for u in rows("ordering"):
            a, b = sorted((_scale(lo, hi, u[0]), _scale(lo, hi, u[1])), reverse=True)
            if a - b < 1e-6:
                continue
            yield {"a": a, "b": b, "eps": b * (0.001 + 0.998 * u[2])}

    verdicts["ordering"] = _search(
        ({"a": a, "b": b, "eps": e} for a, b, e in _SPOT),
        ordering_cands(),
        lambda w: _ordering_violation(f, w["a"], w["b"], w["eps"]),
    )

    def continuity_cands():
        for u in rows("continuity"):
            a, b = _scale(lo, hi, u[0]), _scale(lo, hi, u[1])
            h = 1e-6 * max(abs(a), abs(b)) * (1 if u[2] < 0.5 else -1)
            yield {"a": a, "b": b, "h": h, "arg": 0 if u[3] < 0.5 else 1}

    def continuity_violation(w: dict) -> bool:
        a, b, h = w["a"], w["b"], w["h"]
        if w["arg"] == 0:
            d1, d10 = f(a + h, b) - f(a, b), f(a + 10 * h, b) - f(a, b)
        else:
            d1, d10 = f(a, b + h) - f(a, b), f(a, b + 10 * h) - f(a, b)
        return abs(d1) > 0.5 * abs(d10) + 1e-12

    verdicts["continuity"] = _search((), continuity_cands(), continuity_violation)

    def symmetry_cands():
        for u in rows("symmetry"):
            yield {"a": _scale(lo, hi, u[0]), "b": _scale(lo, hi, u[1])}

    verdicts["symmetry"] = _search(
        ({"a": 2.0, "b": 1.0},), symmetry_cands(),
        lambda w: not close(f(w["a"], w["b"]), f(w["b"], w["a"])),
    )

    def grounded_cands():
        for u in rows("grounded"):
            yield {"a": _scale(lo, hi, u[0]), "b": _scale(lo, hi, u[1])}

    verdicts["grounded"] = _search(
        ({"a": 2.0, "b": 1.0},), grounded_cands(),
        lambda w: not close(f(w["a"], w["a"]), f(w["b"], w["b"])),
    )

    def hod_cands():
        for u in rows("hod"):
            yield {"a": _scale(lo, hi, u[0]), "b": _scale(lo, hi, u[1]),
                   "alpha": 10 ** (-2 + 4 * u[2])}

    verdicts["HOD"] = _search(
        ({"a": 2.0, "b": 1.0, "alpha": 2.0},), hod_cands(),
        lambda w: not close(f(w["alpha"] * w["a"], w["alpha"] * w["b"]), f(w["a"], w["b"])),
    )

    def dimin_cands():
        for u in rows("dimin"):
            yield {"a": _scale(lo, hi, u[0]), "b": _scale(lo, hi, u[1]),
                   "eps": _scale(0, hi - lo, u[2])}

    verdicts["dimin_sens"] = _search(
        ({"a": 2.0, "b": 1.0, "eps": 1.0},), dimin_cands(),
        lambda w: f(w["a"] + w["eps"], w["b"] + w["eps"])
        > f(w["a"], w["b"]) + max(tol, 1e-9 * abs(f(w["a"], w["b"]))),
    )
    return SPropertyReport(verdicts)


def is_hod(sigma: SalienceFunction) -> bool:
    """Spot check homogeneity of degree zero on canned points."""
    f = sigma.fn
    for a, b, _ in _SPOT:
        for alpha in (0.01, 0.5, 3.0, 100.0):
            try:
                u, v = f(alpha * a, alpha * b), f(a, b)
            except (ZeroDivisionError, ValueError):
                return False
            if abs(u - v) > 1e-9 * max(1.0, abs(v)):
                return False
    return True


def hod_category_equivalence(sigma1: SalienceFunction, sigma2: SalienceFunction,
                             budget: SampleBudget, box: Box | None = None,
                             force: bool = False) -> Verdict:
    """Compare the categories of two salience functions on sampled ``(x, r)``.

    Samples where either salience gap is within ``budget.tolerance`` of zero
    are skipped. Without ``force`` both functions must pass HOD spot checks.
    """
    if not force:
        for s in (sigma1, sigma2):
            if not is_hod(s):
                raise PreconditionError(f"{s.name} is not homogeneous of degree zero")
    box = box or Box.square(0.1, 10.0)
    f1, f2 = sigma1.fn, sigma2.fn
    band = budget.tolerance
    n = 0
    stream = SampleStream(budget.seed, "hod-equivalence", 4)
    for row in stream.rows(budget.n_samples):
        x = box.point(row[0], row[1])
        r = box.point(row[2], row[3])
        g1 = f1(x[0], r[0]) - f1(x[1], r[1])
        g2 = f2(x[0], r[0]) - f2(x[1], r[1])
        if abs(g1) <= band or abs(g2) <= band:
            continue
        n += 1
        if (g1 > 0) != (g2 > 0):
            return Verdict.fail(n, {"x": x, "r": r, "gap1": g1, "gap2": g2})
    return Verdict.ok(n)


# ---------------------------------------------------------------------------
# S0-S6 on a two-category function

S_PROPERTIES = ("S0", "S1", "S2", "S3", "S4", "S5", "S6")
MODERATION_STEPS = (0.0, 0.25, 0.5, 0.75, 1.0)


def _s_violations(catfn: CategoryFunction) -> dict[str, Callable[[dict], bool]]:
    cls = catfn._classify

    def s1(w: dict) -> bool:
        x, r, k = w["x"], w["r"], w["k"]
        if cls(x, r) != k:
            return False
        o = 1 if k == 1 else 0
        y = [0.0, 0.0]
        y[k - 1] = x[k - 1]
        y[o] = w["lambda"] * x[o] + (1 - w["lambda"]) * r[o]
        return cls(tuple(y), r) != k

    def s2(w: dict) -> bool:
        (a, b), (c, d) = w["x"], w["r"]
        k = cls((a, b), (c, d))
        if k not in (1, 2):
            return False
        return cls((c, d), (a, b)) != k or cls((b, a), (d, c)) != 3 - k

    def s3(w: dict) -> bool:
        a1, a2, a3 = w["a"]
        r1, r2, r3 = w["r"]
        if cls((a1, a2), (r1, r2)) == 2 or cls((a2, a3), (r2, r3)) == 2:
            return False
        return cls((a1, a3), (r1, r3)) == 2

    def s4(w: dict) -> bool:
        x, r = w["x"], w["r"]
        want = 2 if w["clause"] == 1 else 1
        return cls(x, r) != want

    def s5(w: dict) -> bool:
        x, r, e = w["x"], w["r"], w["eps"]
        if cls(x, r) == 1:
            return False
        return cls((x[0] + e, x[1]), (r[0] + e, r[1])) == 1

    def s6(w: dict) -> bool:
        return cls(w["x"], w["r"]) in (1, 2)

    return {"S1": s1, "S2": s2, "S3": s3, "S4": s4, "S5": s5, "S6": s6}


def replay_s_witness(catfn: CategoryFunction, prop: str, witness: dict) -> bool:
    """True when ``witness`` still violates property ``prop``."""
    return _s_violations(catfn)[prop](witness)


def check_S_properties(catfn: CategoryFunction, budget: SampleBudget) -> SPropertyReport:
    """Sample S0 to S6 for a two-category function.

    Each property receives an equal share of the budget. A short list of
    classic configurations is tried before the random draws.
    """
    if catfn.m != 2:
        raise ArityError(f"S-properties need exactly 2 categories, got {catfn.m}")
    n = max(1, budget.n_samples // 7)
    box = catfn.domain_box
    lo, hi = min(box.x0, box.y0), max(box.x1, box.y1)
    tol = budget.tolerance
    cls = catfn._classify
    violations = _s_violations(catfn)

    def rows(label: str, width: int):
        return SampleStream(budget.seed, f"S/{label}", width).rows(n)

    def v(u: float) -> float:
        return _scale(lo, hi, u)

    verdicts: dict[str, Verdict] = {}
    s0 = check_category_definition(catfn, budget.with_samples(n))
    bad = [(k, w) for k, w in s0.verdicts.items() if w.failed]
    verdicts["S0"] = (
        Verdict.fail(n, {"check": bad[0][0], **(bad[0][1].witness or {})})
        if bad else Verdict.ok(sum(w.n for w in s0.verdicts.values()))
    )

    def s1_cands():
        for u in rows("S1", 4):
            x, r = (v(u[0]), v(u[1])), (v(u[2]), v(u[3]))
            k = cls(x, r)
            if k not in (1, 2):
                continue
            for lam in MODERATION_STEPS:
                yield {"x": x, "r": r, "k": k, "lambda": lam}

    verdicts["S1"] = _search((), s1_cands(), violations["S1"])

    def s2_cands():
        for u in rows("S2", 4):
            yield {"x": (v(u[0]), v(u[1])), "r": (v(u[2]), v(u[3]))}

    verdicts["S2"] = _search((), s2_cands(), violations["S2"])

    def s3_cands():
        for u in rows("S3", 6):
            yield {"a": (v(u[0]), v(u[1]), v(u[2])), "r": (v(u[3]), v(u[4]), v(u[5]))}

    verdicts["S3"] = _search((), s3_cands(), violations["S3"])

    def s4_cands():
        for u in rows("S4", 4):
            x, z = v(u[0]), v(u[1])
            eps = (0.001 + 0.5 * u[2]) * z * (1 if u[3] < 0.5 else -1)
            y = z + eps
            if abs(y - z) <= tol or not catfn.domain.contains((y, y)):
                continue
            yield {"x": (x, y), "r": (x, z), "clause": 1}
            yield {"x": (y, x), "r": (z, x), "clause": 2}

    canned_s4 = ({"x": (4.0, 2.5), "r": (4.0, 2.0), "clause": 1},
                 {"x": (4.0, 1.5), "r": (4.0, 2.0), "clause": 1})
    verdicts["S4"] = _search(canned_s4, s4_cands(), violations["S4"])

    def s5_cands():
        for u in rows("S5", 6):
            x1, r1, r2 = v(u[0]), v(u[1]), v(u[2])
            eps = (hi - lo) * u[3]
            if u[4] < 0.5:
                x2 = v(u[5])
            else:
                # place x2 just off the frontier on the non-1 side
                x2 = _frontier_coordinate(catfn, x1, r1, r2, lo, hi)
                if x2 is None:
                    continue
            yield {"x": (x1, x2), "r": (r1, r2), "eps": eps}

    canned_s5 = ({"x": (2.0, math.sqrt(5.0)), "r": (1.0, math.sqrt(2.0)), "eps": 1.0},)
    verdicts["S5"] = _search(canned_s5, s5_cands(), violations["S5"])

    def s6_cands():
        for u in rows("S6", 4):
            r = (v(u[0]), v(u[1]))
            x1 = v(u[2])
            x2 = r[1] * x1 / r[0] if u[3] < 0.5 else r[0] * r[1] / x1
            yield {"x": (x1, x2), "r": r}

    canned_s6 = ({"x": (3.0, 2.0), "r": (3.0, 2.0)}, {"x": (2.0, 2.0), "r": (4.0, 1.0)})
    verdicts["S6"] = _search(canned_s6, s6_cands(), violations["S6"])
    return SPropertyReport(verdicts)


def _frontier_coordinate(catfn: CategoryFunction, x1: float, r1: float, r2: float,
                         lo: float, hi: float) -> float | None:
    """A second coordinate putting ``(x1, x2)`` on the frontier, not in K1."""
    cls = catfn._classify
    a, b = lo, hi
    ka, kb = cls((x1, a), (r1, r2)), cls((x1, b), (r1, r2))
    if ka == kb:
        a = r2
        ka = cls((x1, a), (r1, r2))
        if ka == kb:
            return None
    for _ in range(80):
        mid = 0.5 * (a + b)
        if cls((x1, mid), (r1, r2)) == ka:
            a = mid
        else:
            b = mid
    for cand in (a, b):
        if cls((x1, cand), (r1, r2)) != 1:
            return cand
    return None
