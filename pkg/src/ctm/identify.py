"""Recover categories from preference or value oracles at a fixed reference.

Two routes are offered. The local route compares the shape of the oracle's
indifference set through a point with the shapes implied by each candidate
category utility. The discontinuity route walks rays and flags jumps in a
cardinal value oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import ndimage

from ctm.core import BOUNDARY, POSITIVE, SIGNED, Alternative, Box, HalfPlanes, as_alternative
from ctm.errors import DegenerateError, OracleError, PreconditionError, ThresholdError
from ctm.models import Preference, ReferenceModel

BOUNDARY_LABEL = 0
AMBIGUOUS_LABEL = -1

SLOPE_TOLERANCE = 1e-4

PreferenceOracle = Callable[[Alternative, Alternative, Alternative], Preference]
ValueOracle = Callable[[Alternative, Alternative], "float | None"]

_SIGN = {Preference.FIRST: 1, Preference.SECOND: -1, Preference.INDIFFERENT: 0,
         Preference.UNDEFINED: None}


# ---------------------------------------------------------------------------
# Grids and region maps


@dataclass(frozen=True)
class Grid:
    """``nx`` by ``ny`` lattice over ``box``; points run row-major in ``x2``."""

    box: Box
    nx: int
    ny: int

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError("a grid needs at least 2 points per axis")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.box.x0, self.box.x1, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.box.y0, self.box.y1, self.ny)

    @property
    def spacing(self) -> float:
        return min((self.box.x1 - self.box.x0) / (self.nx - 1),
                   (self.box.y1 - self.box.y0) / (self.ny - 1))

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def points(self) -> Iterable[tuple[int, int, Alternative]]:
        xs, ys = self.xs.tolist(), self.ys.tolist()
        for iy, yv in enumerate(ys):
            for ix, xv in enumerate(xs):
                yield iy, ix, (xv, yv)

    def cell_of(self, p: Alternative) -> tuple[int, int] | None:
        fx = (p[0] - self.box.x0) / (self.box.x1 - self.box.x0) * (self.nx - 1)
        fy = (p[1] - self.box.y0) / (self.box.y1 - self.box.y0) * (self.ny - 1)
        ix, iy = int(round(fx)), int(round(fy))
        if 0 <= ix < self.nx and 0 <= iy < self.ny:
            return iy, ix
        return None


@dataclass(frozen=True)
class RegionMap:
    """Per-grid-point labels: a category index, 0 for Boundary, -1 for Ambiguous."""

    grid: Grid
    labels: np.ndarray
    reference: Alternative
    method: str = "local"

    def __post_init__(self) -> None:
        if self.labels.shape != (self.grid.ny, self.grid.nx):
            raise ValueError("labels must have shape (ny, nx)")

    def label(self, iy: int, ix: int) -> int:
        return int(self.labels[iy, ix])

    def counts(self) -> dict[int, int]:
        vals, cnt = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, cnt)}

    def accuracy(self, truth: Callable[[Alternative], int],
                 include: Callable[[Alternative], bool] | None = None,
                 ignore: Sequence[int] = ()) -> tuple[float, int]:
        """Share of included points whose label equals ``truth``.

        Points whose true category is in ``ignore`` are left out. Returns the
        accuracy and the number of points scored.
        """
        hits = total = 0
        for iy, ix, p in self.grid.points():
            if include is not None and not include(p):
                continue
            t = truth(p)
            if t in ignore:
                continue
            total += 1
            hits += int(self.labels[iy, ix] == t)
        return (hits / total if total else math.nan), total

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "reference": list(self.reference),
            "box": list(self.grid.box.as_tuple()),
            "shape": [self.grid.ny, self.grid.nx],
            "legend": {"0": "Boundary", "-1": "Ambiguous", "k>0": "category index"},
            "labels": [int(v) for v in self.labels.ravel()],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> RegionMap:
        ny, nx = data["shape"]
        grid = Grid(Box(*data["box"]), nx, ny)
        labels = np.asarray(data["labels"], dtype=int).reshape(ny, nx)
        return cls(grid, labels, as_alternative(data["reference"], SIGNED),
                   data.get("method", "local"))


# ---------------------------------------------------------------------------
# Oracles


def model_oracle(model: ReferenceModel) -> PreferenceOracle:
    """Fast preference oracle backed by a model (no input validation)."""
    tol = model.tolerance
    ev = model.evaluate

    def oracle(x: Alternative, y: Alternative, r: Alternative) -> Preference:
        kx, ux = ev(x, r)
        ky, uy = ev(y, r)
        if kx is BOUNDARY or ky is BOUNDARY:
            return Preference.UNDEFINED
        d = ux - uy
        if d > tol:
            return Preference.FIRST
        if d < -tol:
            return Preference.SECOND
        return Preference.INDIFFERENT

    return oracle


def value_oracle(model: ReferenceModel) -> ValueOracle:
    """Cardinal oracle ``(x, r) -> utility``, None on a frontier."""

    def oracle(x: Alternative, r: Alternative) -> float | None:
        k, u = model.evaluate(x, r)
        return None if k is BOUNDARY else u

    return oracle


def candidates_from_model(model: Any, r: Sequence[float]) -> list[Callable[[Alternative], float]]:
    """Category utilities ``U^k(. | r)`` of a model, in category order."""
    r = as_alternative(r, model.domain)
    return [(lambda x, k=k: model.utility_in(k, x, r)) for k in range(1, model.catfn.m + 1)]


# ---------------------------------------------------------------------------
# Local indifference sets on a probe circle


def _crossings(sign_at: Callable[[float], int | None], n: int = 12,
               iterations: int = 60) -> tuple[float, ...] | None:
    """Angles where the comparison with the centre changes sign; None on a frontier."""
    phase = 0.05
    width = 2 * math.pi / n
    thetas = [phase + j * width for j in range(n)]
    signs = [sign_at(t) for t in thetas]
    if any(s is None for s in signs):
        return None
    if all(s == 0 for s in signs):
        raise DegenerateError("the oracle is locally constant")
    out = []
    for j in range(n):
        sa, sb = signs[j], signs[(j + 1) % n]
        if sa == sb or sb == 0:
            continue
        if sa == 0:
            out.append(thetas[j])
            continue
        lo, hi = thetas[j], thetas[j] + width
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            sm = sign_at(mid)
            if sm is None:
                return None
            if sm == 0:
                lo = hi = mid
                break
            if sm == sa:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return tuple(out)


def lis_from_oracle(oracle: PreferenceOracle, x: Alternative, r: Alternative,
                    radius: float) -> tuple[float, ...] | None:
    def sign_at(t: float) -> int | None:
        y = (x[0] + radius * math.cos(t), x[1] + radius * math.sin(t))
        try:
            pref = oracle(y, x, r)
        except Exception as exc:  # noqa: BLE001 - surface as an oracle failure
            raise OracleError(f"oracle failed at {y}, {x}, {r}: {exc}") from exc
        return _SIGN[pref]

    return _crossings(sign_at)


def lis_from_utility(u: Callable[[Alternative], float], x: Alternative, radius: float,
                     tol: float = 1e-9) -> tuple[float, ...] | None:
    ux = u(x)

    def sign_at(t: float) -> int:
        d = u((x[0] + radius * math.cos(t), x[1] + radius * math.sin(t))) - ux
        return 1 if d > tol else (-1 if d < -tol else 0)

    return _crossings(sign_at)


def _same_slope(a: float, b: float, rel: float = SLOPE_TOLERANCE) -> bool:
    if math.cos(a - b) <= 0:
        return False
    ta, tb = math.tan(a), math.tan(b)
    return abs(ta - tb) <= rel * max(abs(ta), abs(tb), 1.0)


def lis_match(a: tuple[float, ...] | None, b: tuple[float, ...] | None,
              rel: float = SLOPE_TOLERANCE) -> bool:
    if a is None or b is None or len(a) != len(b) or not a:
        return False
    return all(_same_slope(s, t, rel) for s, t in zip(a, b))


def _decide(observed: tuple[float, ...] | None,
            candidates: Sequence[tuple[float, ...] | None], rel: float) -> int:
    if observed is None:
        return BOUNDARY_LABEL
    hits = [k for k, c in enumerate(candidates, 1) if lis_match(observed, c, rel)]
    if len(hits) == 1:
        return hits[0]
    if len(hits) > 1:
        return AMBIGUOUS_LABEL
    return BOUNDARY_LABEL


def _check_radius(grid: Grid, probe_radius: float | None) -> float:
    if probe_radius is None:
        return 0.01 * grid.spacing
    if not 0 < probe_radius < 0.5 * grid.spacing:
        raise PreconditionError(
            f"probe radius {probe_radius} must be positive and below half the grid spacing")
    return probe_radius


def identify_local(oracle: PreferenceOracle, r: Sequence[float], grid: Grid,
                   candidates: Sequence[Callable[[Alternative], float]],
                   probe_radius: float | None = None,
                   rel: float = SLOPE_TOLERANCE) -> RegionMap:
    """Label each grid point with the candidate whose indifference set matches.

    ``candidates[k-1]`` is category ``k``'s utility at reference ``r``.
    Points where two candidates match are Ambiguous; points where none
    does (a probe circle straddling a frontier) are Boundary.
    """
    r = tuple(float(v) for v in r)
    radius = _check_radius(grid, probe_radius)
    labels = np.zeros((grid.ny, grid.nx), dtype=int)
    for iy, ix, x in grid.points():
        observed = lis_from_oracle(oracle, x, r, radius)
        cands = [lis_from_utility(u, x, radius) for u in candidates]
        labels[iy, ix] = _decide(observed, cands, rel)
    return RegionMap(grid, labels, r, "local")


def identify_bgs(oracle: PreferenceOracle, r: Sequence[float], grid: Grid,
                 probe_radius: float | None = None,
                 rel: float = SLOPE_TOLERANCE) -> RegionMap:
    """Salience regions from probe references that force each category.

    At ``x`` the references ``(x1/2, x2)`` and ``(x1, x2/2)`` make ``x``
    1-salient and 2-salient respectively, so the oracle's indifference sets
    there serve as the two candidates.
    """
    r = tuple(float(v) for v in r)
    radius = _check_radius(grid, probe_radius)
    labels = np.zeros((grid.ny, grid.nx), dtype=int)
    for iy, ix, x in grid.points():
        observed = lis_from_oracle(oracle, x, r, radius)
        probes = [lis_from_oracle(oracle, x, (x[0] / 2, x[1]), radius),
                  lis_from_oracle(oracle, x, (x[0], x[1] / 2), radius)]
        labels[iy, ix] = _decide(observed, probes, rel)
    return RegionMap(grid, labels, r, "bgs")


# ---------------------------------------------------------------------------
# Discontinuities in cardinal values


def ray_directions(n: int, phase: float = 0.0) -> list[Alternative]:
    return [(math.cos(phase + 2 * math.pi * j / n), math.sin(phase + 2 * math.pi * j / n))
            for j in range(n)]


def _jumps(vals: Sequence[float], threshold: float, min_jump: float) -> list[int]:
    """Indices ``i`` where ``vals[i] -> vals[i+1]`` is a jump.

    A jump exceeds ``threshold`` times the median step change and ``min_jump``.
    """
    if len(vals) < 3:
        return []
    diffs = np.abs(np.diff(vals))
    cut = max(threshold * float(np.median(diffs)), min_jump)
    return [int(i) for i in np.nonzero(diffs > cut)[0]]


def identify_by_discontinuity(oracle: ValueOracle, r: Sequence[float],
                              rays: Sequence[Sequence[float]], step: float, window: Box,
                              origin: Sequence[float] | None = None,
                              jump_threshold: float = 5.0, min_jump: float = 1e-6,
                              require_boundary: bool = False) -> list[Alternative]:
    """Frontier points where values jump along rays walked from ``origin``.

    A step is flagged when its value change exceeds ``jump_threshold`` times
    the median step change on that ray (and ``min_jump``). The flagged point
    is the midpoint of the step. ``origin`` defaults to ``r``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    r = tuple(float(v) for v in r)
    o = tuple(float(v) for v in (origin if origin is not None else r))
    found: list[Alternative] = []
    for d in rays:
        norm = math.hypot(d[0], d[1])
        if norm == 0:
            raise ValueError("ray directions must be nonzero")
        dx, dy = d[0] / norm, d[1] / norm
        pts: list[Alternative] = []
        vals: list[float] = []
        s = 0
        while True:
            p = (o[0] + s * step * dx, o[1] + s * step * dy)
            if not window.contains(p):
                break
            v = oracle(p, r)
            if v is not None and math.isfinite(v):
                pts.append(p)
                vals.append(v)
            s += 1
        for i in _jumps(vals, jump_threshold, min_jump):
            a, b = pts[i], pts[i + 1]
            found.append((0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])))
    if require_boundary and not found:
        raise ThresholdError("no value jump exceeded the threshold on any ray")
    return found


def label_by_jumps(oracle: ValueOracle, r: Sequence[float], grid: Grid, step: float,
                   origin: Sequence[float] | None = None, jump_threshold: float = 5.0,
                   min_jump: float = 1e-6) -> RegionMap:
    """Region index ``1 + (jumps between origin and x)`` for each grid point.

    The segment from ``origin`` to each point is walked in steps of at most
    ``step`` and jumps are detected as in :func:`identify_by_discontinuity`.
    Points where the oracle has no value get the Boundary label.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    r = tuple(float(v) for v in r)
    o = tuple(float(v) for v in (origin if origin is not None else r))
    labels = np.zeros((grid.ny, grid.nx), dtype=int)
    for iy, ix, x in grid.points():
        end = oracle(x, r)
        if end is None or not math.isfinite(end):
            continue
        n = max(1, int(math.ceil(math.dist(o, x) / step)))
        vals = []
        for t in range(n + 1):
            v = oracle((o[0] + (x[0] - o[0]) * t / n, o[1] + (x[1] - o[1]) * t / n), r)
            if v is not None and math.isfinite(v):
                vals.append(v)
        labels[iy, ix] = 1 + len(_jumps(vals, jump_threshold, min_jump))
    return RegionMap(grid, labels, r, "discontinuity")


def label_regions(frontier: Iterable[Alternative], grid: Grid, r: Sequence[float],
                  thickness: int = 1) -> RegionMap:
    """Flood-fill the grid between frontier points; labels are component ids."""
    wall = np.zeros((grid.ny, grid.nx), dtype=bool)
    for p in frontier:
        cell = grid.cell_of(p)
        if cell is not None:
            wall[cell] = True
    if thickness > 1:
        wall = ndimage.binary_dilation(wall, iterations=thickness - 1)
    comps, _ = ndimage.label(~wall)
    return RegionMap(grid, comps.astype(int), tuple(float(v) for v in r), "discontinuity")


# ---------------------------------------------------------------------------
# The unidentifiable example


class AmbiguityModel(ReferenceModel):
    """Two categories that value alike on ``{x1 + x2 <= 1}``.

    Category 1 values ``s = x1 + x2``; category 2 values ``s`` up to 1 and
    ``2 s - 1`` beyond. Categories split along ``x1 - x2 = r1 - r2``.
    """

    def __init__(self, box: Box | None = None) -> None:
        box = box or Box.square(0.05, 2.0)
        catfn = HalfPlanes(1.0, -1.0, ("east", "north"), POSITIVE, box, name="ambiguity")
        super().__init__("ambiguity", catfn, box=box, params={"model": "ambiguity"})

    def utility_in(self, k: int, x: Alternative, r: Alternative) -> float:
        s = x[0] + x[1]
        if k == 1 or s <= 1.0:
            return s
        return 2.0 * s - 1.0

    def evaluate(self, x: Alternative, r: Alternative) -> tuple[Any, float]:
        k = self.catfn._classify(x, r)
        if k is BOUNDARY:
            return BOUNDARY, math.nan
        return k, self.utility_in(k, x, r)
