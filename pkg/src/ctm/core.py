"""Domain types, the category-function contract and structural checks.

An alternative is a plain ``(x1, x2)`` tuple of floats. Category ids are the
integers ``1..m``; points on a frontier classify as :data:`BOUNDARY`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Sequence

from scipy.optimize import minimize_scalar

from ctm.errors import ConsistencyError, DomainError
from ctm.sampling import SampleBudget, SampleStream

Alternative = tuple[float, float]

DEFAULT_TOLERANCE = 1e-9


class _BoundaryType:
    """Sentinel for points on the frontier between categories."""

    _instance: _BoundaryType | None = None

    def __new__(cls) -> _BoundaryType:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Boundary"

    def __reduce__(self) -> str:
        return "BOUNDARY"


BOUNDARY = _BoundaryType()


@dataclass(frozen=True)
class Domain:
    """Per-coordinate admissibility: ``positive[i]`` requires ``x_i > 0``."""

    positive: tuple[bool, bool] = (True, True)

    @property
    def name(self) -> str:
        if all(self.positive):
            return "positive"
        if not any(self.positive):
            return "signed"
        return "mixed"

    def contains(self, x: Sequence[float]) -> bool:
        return all(not pos or v > 0 for pos, v in zip(self.positive, x))

    def bracket(self, i: int) -> tuple[float, float]:
        """Search interval for numeric inverses on coordinate ``i``."""
        return (1e-6, 1e6) if self.positive[i] else (-1e6, 1e6)


POSITIVE = Domain((True, True))
SIGNED = Domain((False, False))


def as_alternative(x: Sequence[float], domain: Domain = POSITIVE) -> Alternative:
    """Validate ``x`` and return it as a tuple of two floats."""
    try:
        coords = tuple(float(v) for v in x)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"not a numeric vector: {x!r}") from exc
    if len(coords) != 2:
        raise DomainError(f"alternatives have exactly 2 coordinates, got {len(coords)}")
    if not all(math.isfinite(v) for v in coords):
        raise DomainError(f"non-finite coordinate in {coords}")
    if not domain.contains(coords):
        raise DomainError(f"{coords} outside the {domain.name} domain")
    return coords  # type: ignore[return-value]


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle ``[x0, x1] x [y0, y1]``."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise DomainError(f"degenerate box {self}")

    @classmethod
    def square(cls, lo: float, hi: float) -> Box:
        return cls(lo, lo, hi, hi)

    def point(self, u: float, v: float) -> Alternative:
        """Map unit-square coordinates into the box."""
        return (self.x0 + u * (self.x1 - self.x0), self.y0 + v * (self.y1 - self.y0))

    @property
    def diameter(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    def contains(self, x: Sequence[float]) -> bool:
        return self.x0 <= x[0] <= self.x1 and self.y0 <= x[1] <= self.y1

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


@dataclass(frozen=True)
class CategoryId:
    index: int
    label: str

    def __str__(self) -> str:
        return f"K{self.index}({self.label})"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one sampled check: PASS(n), FAIL(witness) or NOT_TESTED."""

    status: str
    n: int = 0
    witness: dict[str, Any] | None = None

    @classmethod
    def ok(cls, n: int) -> Verdict:
        return cls("PASS", n)

    @classmethod
    def fail(cls, n: int, witness: dict[str, Any]) -> Verdict:
        return cls("FAIL", n, witness)

    @classmethod
    def not_tested(cls) -> Verdict:
        return cls("NOT_TESTED")

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    @property
    def failed(self) -> bool:
        return self.status == "FAIL"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.status, "n": self.n}
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def __str__(self) -> str:
        if self.status == "PASS":
            return f"PASS({self.n})"
        return self.status


class CategoryFunction:
    """A labeled family of open regions indexed by a reference point.

    Subclasses implement :meth:`margins`, returning one number per category
    that is positive exactly on that category's open set. A point belongs to
    category ``k`` when its margin exceeds the tolerance; when no margin does,
    it is on the frontier.
    """

    def __init__(
        self,
        labels: Sequence[str],
        domain: Domain = POSITIVE,
        domain_box: Box | None = None,
        tolerance: float = DEFAULT_TOLERANCE,
        name: str = "category-function",
    ) -> None:
        if len(labels) < 1:
            raise ValueError("a category function needs at least one category")
        if len(set(labels)) != len(labels):
            raise ValueError("category labels must be unique")
        self.labels = tuple(labels)
        self.domain = domain
        self.domain_box = domain_box or Box.square(0.5, 5.0)
        self.tolerance = tolerance
        self.name = name

    @property
    def m(self) -> int:
        return len(self.labels)

    def category(self, k: int) -> CategoryId:
        return CategoryId(k, self.labels[k - 1])

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        raise NotImplementedError

    def memberships(self, x: Alternative, r: Alternative) -> tuple[int, ...]:
        """All categories whose open set contains ``x`` (unvalidated)."""
        tol = self.tolerance
        return tuple(k for k, g in enumerate(self.margins(x, r), 1) if g > tol)

    def _classify(self, x: Alternative, r: Alternative) -> int | _BoundaryType:
        tol = self.tolerance
        found: int | None = None
        for k, g in enumerate(self.margins(x, r), 1):
            if g > tol:
                if found is not None:
                    raise ConsistencyError(
                        f"{x} lies in categories {found} and {k} at reference {r}"
                    )
                found = k
        return BOUNDARY if found is None else found

    def classify(self, x: Sequence[float], r: Sequence[float]) -> int | _BoundaryType:
        """Category index of ``x`` at reference ``r``, or ``BOUNDARY``."""
        return self._classify(as_alternative(x, self.domain), as_alternative(r, self.domain))

    def frontier_distance(
        self, x: Alternative, r: Alternative, directions: int = 16
    ) -> float:
        """Distance from ``x`` to the nearest point of another class.

        The generic version scans ``directions`` rays geometrically outward,
        bisects the first class change on each, then refines the angle of
        the two closest rays by bounded minimization. It is an estimate.
        """
        k = self._classify(x, r)
        if k is BOUNDARY:
            return 0.0
        reach = self.domain_box.diameter

        def along(theta: float) -> float:
            d = (math.cos(theta), math.sin(theta))

            def at(t: float) -> Alternative:
                return (x[0] + t * d[0], x[1] + t * d[1])

            lo = 0.0
            for s in range(25):
                t = reach * 2.0 ** (s - 24)
                last = not self.domain.contains(at(t))
                if last:
                    # Step back to the last admissible point on the ray.
                    a, b = lo, t
                    for _ in range(50):
                        mid = 0.5 * (a + b)
                        a, b = (mid, b) if self.domain.contains(at(mid)) else (a, mid)
                    t = a
                if self._classify(at(t), r) != k:
                    hi = t
                    for _ in range(40):
                        mid = 0.5 * (lo + hi)
                        if self._classify(at(mid), r) == k:
                            lo = mid
                        else:
                            hi = mid
                    return lo
                if last:
                    return reach
                lo = t
            return reach

        width = 2 * math.pi / directions
        coarse = sorted((along(0.1 + j * width), 0.1 + j * width) for j in range(directions))
        best = coarse[0][0]
        for dist, theta in coarse[:2]:
            if dist >= reach:
                break
            res = minimize_scalar(along, bounds=(theta - width, theta + width),
                                  method="bounded", options={"xatol": 1e-10})
            best = min(best, float(res.fun))
        return best

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r}, m={self.m})"


class SingleCategory(CategoryFunction):
    """The trivial function with one category covering everything."""

    def __init__(self, domain: Domain = POSITIVE, domain_box: Box | None = None,
                 tolerance: float = DEFAULT_TOLERANCE) -> None:
        super().__init__(("all",), domain, domain_box, tolerance, name="single")

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        return (math.inf,)

    def frontier_distance(self, x: Alternative, r: Alternative, directions: int = 16) -> float:
        return math.inf


class GainLoss(CategoryFunction):
    """Four categories by the sign pattern of ``x - r``."""

    def __init__(self, domain: Domain = POSITIVE, domain_box: Box | None = None,
                 tolerance: float = DEFAULT_TOLERANCE) -> None:
        super().__init__(
            ("gain-gain", "loss-gain", "gain-loss", "loss-loss"),
            domain, domain_box or Box.square(1.0, 20.0), tolerance, name="gain-loss",
        )

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        d1 = x[0] - r[0]
        d2 = x[1] - r[1]
        return (min(d1, d2), min(-d1, d2), min(d1, -d2), min(-d1, -d2))

    def _classify(self, x: Alternative, r: Alternative) -> int | _BoundaryType:
        d1 = x[0] - r[0]
        d2 = x[1] - r[1]
        tol = self.tolerance
        if abs(d1) <= tol or abs(d2) <= tol:
            return BOUNDARY
        if d1 > 0:
            return 1 if d2 > 0 else 3
        return 2 if d2 > 0 else 4

    def frontier_distance(self, x: Alternative, r: Alternative, directions: int = 16) -> float:
        return min(abs(x[0] - r[0]), abs(x[1] - r[1]))


class HalfPlanes(CategoryFunction):
    """Two categories split by ``a*(x1 - r1) + b*(x2 - r2)`` changing sign."""

    def __init__(self, a: float, b: float, labels: Sequence[str] = ("above", "below"),
                 domain: Domain = POSITIVE, domain_box: Box | None = None,
                 tolerance: float = DEFAULT_TOLERANCE, name: str = "half-planes") -> None:
        super().__init__(labels, domain, domain_box, tolerance, name=name)
        if a == 0 and b == 0:
            raise ValueError("half-plane normal must be nonzero")
        self.a = float(a)
        self.b = float(b)

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        g = self.a * (x[0] - r[0]) + self.b * (x[1] - r[1])
        return (g, -g)

    def frontier_distance(self, x: Alternative, r: Alternative, directions: int = 16) -> float:
        g = self.a * (x[0] - r[0]) + self.b * (x[1] - r[1])
        return abs(g) / math.hypot(self.a, self.b)


class PredicateCategories(CategoryFunction):
    """Categories given by arbitrary margin functions ``g_k(x, r)``.

    Nothing forces the sets to be disjoint, which makes this useful for
    building malformed functions that the structural checks must reject.
    """

    def __init__(self, margin_fns: Sequence[Callable[[Alternative, Alternative], float]],
                 labels: Sequence[str] | None = None, domain: Domain = POSITIVE,
                 domain_box: Box | None = None, tolerance: float = DEFAULT_TOLERANCE,
                 name: str = "predicates") -> None:
        labels = labels or tuple(f"K{k}" for k in range(1, len(margin_fns) + 1))
        super().__init__(labels, domain, domain_box, tolerance, name=name)
        self._fns = tuple(margin_fns)

    def margins(self, x: Alternative, r: Alternative) -> Sequence[float]:
        return tuple(f(x, r) for f in self._fns)


# ---------------------------------------------------------------------------
# Structural checks


@dataclass(frozen=True)
class StructureReport:
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(not v.failed for v in self.verdicts.values())

    def to_dict(self) -> dict[str, Any]:
        return {name: v.to_dict() for name, v in self.verdicts.items()}


def _circle(x: Alternative, radius: float, n: int = 8, phase: float = 0.3) -> Iterator[Alternative]:
    for j in range(n):
        t = phase + 2 * math.pi * j / n
        yield (x[0] + radius * math.cos(t), x[1] + radius * math.sin(t))


def frontier_point(catfn: CategoryFunction, a: Alternative, b: Alternative,
                   r: Alternative, iterations: int = 60) -> Alternative | None:
    """Bisect the segment ``a``-``b`` for a class change; None if none."""
    ka = catfn._classify(a, r)
    if ka == catfn._classify(b, r):
        return None
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        p = (a[0] + mid * (b[0] - a[0]), a[1] + mid * (b[1] - a[1]))
        if catfn._classify(p, r) == ka:
            lo = mid
        else:
            hi = mid
    return (a[0] + hi * (b[0] - a[0]), a[1] + hi * (b[1] - a[1]))


def _draw_point(catfn: CategoryFunction, row: Sequence[float], ref_box: Box,
                targeted: bool) -> tuple[Alternative, Alternative]:
    """Map a 6-wide unit row to ``(x, r)``; targeted rows land on a frontier."""
    box = catfn.domain_box
    r = ref_box.point(row[4], row[5])
    x = box.point(row[0], row[1])
    if targeted:
        try:
            p = frontier_point(catfn, x, box.point(row[2], row[3]), r)
        except ConsistencyError:
            # Overlapping sets: leave x for the disjointness check to report.
            p = None
        if p is not None and catfn.domain.contains(p):
            x = p
    return x, r


def check_category_definition(catfn: CategoryFunction, budget: SampleBudget,
                              ref_box: Box | None = None) -> StructureReport:
    """Sampled verification that the regions form a valid category function.

    Four checks split the budget evenly: pairwise disjointness, denseness of
    the union, an openness proxy (a small ball around each categorized point
    stays in its category) and continuity in the reference (a ball inside
    ``K^i(r)`` stays inside ``K^i(r')`` for some small reference shift).
    Half of each check's draws are placed on a frontier by bisection.
    """
    tol = budget.tolerance
    ref_box = ref_box or catfn.domain_box
    n = max(1, budget.n_samples // 4)
    verdicts: dict[str, Verdict] = {}

    # (a) disjointness
    stream = SampleStream(budget.seed, "structure/disjoint", 6)
    verdict = None
    for i, row in enumerate(stream.take(n)):
        x, r = _draw_point(catfn, row, ref_box, targeted=i % 2 == 1)
        ks = catfn.memberships(x, r)
        if len(ks) > 1:
            verdict = Verdict.fail(i + 1, {"x": x, "r": r, "categories": list(ks)})
            break
    verdicts["disjoint"] = verdict or Verdict.ok(n)

    # (b) denseness: a frontier point has a categorized neighbour nearby
    stream = SampleStream(budget.seed, "structure/dense", 6)
    verdict = None
    radii = (10 * tol, 100 * tol, 1e3 * tol, 1e4 * tol)
    for i, row in enumerate(stream.take(n)):
        x, r = _draw_point(catfn, row, ref_box, targeted=i % 2 == 1)
        if catfn.memberships(x, r):
            continue
        found = any(
            catfn.memberships(p, r)
            for rad in radii
            for p in _circle(x, rad)
            if catfn.domain.contains(p)
        )
        if not found:
            verdict = Verdict.fail(i + 1, {"x": x, "r": r, "radius": radii[-1]})
            break
    verdicts["dense"] = verdict or Verdict.ok(n)

    # (c) openness proxy
    stream = SampleStream(budget.seed, "structure/open", 6)
    verdict = None
    radius = 10 * tol
    for i, row in enumerate(stream.take(n)):
        x, r = _draw_point(catfn, row, ref_box, targeted=False)
        ks = catfn.memberships(x, r)
        if len(ks) != 1 or max(catfn.margins(x, r)) < 1e3 * tol:
            continue
        for p in _circle(x, radius):
            if catfn.domain.contains(p) and catfn.memberships(p, r) != ks:
                verdict = Verdict.fail(i + 1, {"x": x, "r": r, "y": p, "radius": radius})
                break
        if verdict:
            break
    verdicts["open"] = verdict or Verdict.ok(n)

    # (d) continuity of the regions in the reference point
    stream = SampleStream(budget.seed, "structure/ref-continuity", 8)
    verdict = None
    for i, row in enumerate(stream.take(n)):
        x, r = _draw_point(catfn, row, ref_box, targeted=False)
        ks = catfn.memberships(x, r)
        if len(ks) != 1:
            continue
        eps = _inner_radius(catfn, x, r, ks)
        # The probe ball must lie inside K(r) before asking about K(r').
        while eps is not None and not all(
                catfn.memberships(p, r) == ks
                for p in _circle(x, eps / 2, phase=row[7]) if catfn.domain.contains(p)):
            eps = eps / 2 if eps > 1e-9 else None
        if eps is None:
            continue
        theta = 2 * math.pi * row[6]
        u = (math.cos(theta), math.sin(theta))
        ok = False
        for delta in (1e-2 * eps, 1e-4 * eps, 1e-6 * eps):
            r2 = (r[0] + delta * u[0], r[1] + delta * u[1])
            if not catfn.domain.contains(r2):
                continue
            if all(catfn.memberships(p, r2) == ks
                   for p in (x, *_circle(x, eps / 2, phase=row[7]))
                   if catfn.domain.contains(p)):
                ok = True
                break
        if not ok:
            verdict = Verdict.fail(i + 1, {"x": x, "r": r, "radius": eps / 2})
            break
    verdicts["ref_continuity"] = verdict or Verdict.ok(n)
    return StructureReport(verdicts)


def _inner_radius(catfn: CategoryFunction, x: Alternative, r: Alternative,
                  ks: tuple[int, ...]) -> float | None:
    """Largest probed radius whose sampled ball stays in the category of ``x``."""
    eps = 0.25 * min(catfn.domain_box.x1 - catfn.domain_box.x0,
                     catfn.domain_box.y1 - catfn.domain_box.y0)
    for _ in range(30):
        if all(catfn.domain.contains(p) and catfn.memberships(p, r) == ks
               for p in _circle(x, eps, n=12)):
            return eps
        eps *= 0.5
    return None
