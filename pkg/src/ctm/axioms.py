"""Counterexample search for the behavioral axioms of reference-dependent models.

Every checker draws rows from a deterministic stream, alternating uniform
rows with targeted rows that land near category frontiers or near
indifference loci. The first violation wins and is returned as a witness
that :meth:`AxiomReport.replay` can recompute from scratch.

Relations used by the witnesses, for a model with utility ``U(x | r)``:

* ``x >=_r y`` iff ``U(x | r) >= U(y | r) - tol`` (both categorized);
* ``x >^k y`` at ``r`` additionally needs ``x, y`` in category ``k`` at ``r``.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Sequence

import networkx as nx
import numpy as np
from scipy.optimize import brentq

from ctm.core import BOUNDARY, Alternative, Box, Verdict, frontier_point
from ctm.errors import ArityError, PreconditionError, RangeError
from ctm.models import (
    LINEAR,
    CtmModel,
    ReferenceModel,
    mix,
)
from ctm.sampling import SampleBudget, SampleStream

AXIOMS = ("WRI", "CatCancel", "CatMono", "CatCont", "RefInterlock", "AAC",
          "RefIrrel", "SDO", "FullMono", "FullCancel")

CTM_BUNDLE = ("WRI", "CatCancel", "CatMono", "CatCont")

_CHECK_EVERY = 1024


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    model: str
    verdict: Verdict
    budget: SampleBudget = field(default_factory=SampleBudget)

    @property
    def passed(self) -> bool:
        return self.verdict.passed

    @property
    def witness(self) -> dict[str, Any] | None:
        return self.verdict.witness

    @property
    def n_checked(self) -> int:
        return self.verdict.n

    def replay(self, model: ReferenceModel) -> bool:
        """True when the witness still violates the axiom under ``model``."""
        if self.witness is None:
            return False
        return replay_witness(model, self.axiom, self.witness, self.budget.tolerance)

    def to_dict(self) -> dict[str, Any]:
        return {
            "axiom": self.axiom,
            "model": self.model,
            "verdict": self.verdict.to_dict(),
            "budget": {"n_samples": self.budget.n_samples, "seed": self.budget.seed,
                       "tolerance": self.budget.tolerance},
        }

    def __str__(self) -> str:
        return f"{self.axiom}[{self.model}]: {self.verdict}"


def _pt(v: Sequence[float]) -> Alternative:
    return (float(v[0]), float(v[1]))


# ---------------------------------------------------------------------------
# Shared helpers


class _Ctx:
    """Per-check conveniences bound to one model and budget."""

    def __init__(self, model: ReferenceModel, budget: SampleBudget, label: str) -> None:
        self.model = model
        self.budget = budget
        self.tol = budget.tolerance
        self.box = model.box
        self.ref_box = model.ref_box
        self.label = label
        self.cls = model.catfn._classify
        self.ev = model.evaluate
        self.scale = min(self.box.x1 - self.box.x0, self.box.y1 - self.box.y0)
        self.ref_scale = min(self.ref_box.x1 - self.ref_box.x0,
                             self.ref_box.y1 - self.ref_box.y0)

    def rows(self, width: int) -> Iterator[list[float]]:
        return SampleStream(self.budget.seed, f"axiom/{self.label}", width).rows(
            self.budget.n_samples)

    def rng(self, idx: int) -> np.random.Generator:
        """Auxiliary generator for variable-length work on sample ``idx``."""
        key = zlib.crc32(f"axiom/{self.label}/aux".encode())
        return np.random.default_rng([self.budget.seed & ((1 << 64) - 1), key, idx])

    def point(self, u: float, v: float) -> Alternative:
        return self.box.point(u, v)

    def ref(self, u: float, v: float) -> Alternative:
        return self.ref_box.point(u, v)

    def coord(self, j: int, u: float) -> float:
        lo, hi = self.span(j)
        return lo + u * (hi - lo)

    def span(self, j: int) -> tuple[float, float]:
        return (self.box.x0, self.box.x1) if j == 0 else (self.box.y0, self.box.y1)

    def inside(self, x: Alternative) -> bool:
        return self.model.domain.contains(x) and all(math.isfinite(v) for v in x)

    def nudge(self, r: Alternative, size: float, angle: float) -> Alternative:
        return (r[0] + size * self.ref_scale * math.cos(angle),
                r[1] + size * self.ref_scale * math.sin(angle))

    def small(self, u: float, lo_exp: float = -8.0, hi_exp: float = -2.0) -> float:
        """Log-uniform magnitude in ``[10^lo, 10^hi]`` times the box scale."""
        return self.scale * 10.0 ** (lo_exp + u * (hi_exp - lo_exp))


def _with(x: Alternative, j: int, t: float) -> Alternative:
    return (t, x[1]) if j == 0 else (x[0], t)


def solve_coordinate(model: ReferenceModel, k: int, r: Alternative, x: Alternative, j: int,
                     target: float, bracket: tuple[float, float]) -> float | None:
    """``t`` with ``U^k((x with x_j = t) | r) = target``, or None if unattainable."""
    if isinstance(model, CtmModel) and type(model).transform is CtmModel.transform:
        uj = model.category_utilities[k - 1][j]
        uo = model.category_utilities[k - 1][1 - j]
        if uj.direction == 0:
            return None
        alpha, beta = model.ref_transform(k, r) if model.ref_transform else (1.0, 0.0)
        base = (target - beta) / alpha - model.constants[k - 1] - uo(x[1 - j])
        try:
            return uj.invert(base, bracket)
        except RangeError:
            return None

    def f(t: float) -> float:
        return model.utility_in(k, _with(x, j, t), r) - target

    lo, hi = bracket
    try:
        flo, fhi = f(lo), f(hi)
    except (ValueError, ZeroDivisionError, OverflowError):
        return None
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        return None
    return brentq(f, lo, hi, xtol=1e-14, maxiter=200)


def _near_indifferent(ctx: _Ctx, x: Alternative, k: int, r: Alternative, u1: float,
                      gap: float, j: int = 1) -> Alternative | None:
    """A point in category ``k`` at ``r`` valued ``gap`` below ``x``."""
    kx, ux = ctx.ev(x, r)
    if kx is BOUNDARY:
        return None
    target = ux - gap
    y0 = _with(x, 1 - j, ctx.coord(1 - j, u1))
    t = solve_coordinate(ctx.model, k, r, y0, j, target, ctx.model.domain.bracket(j))
    if t is None:
        return None
    y = _with(y0, j, t)
    if not ctx.inside(y) or ctx.cls(y, r) != k:
        return None
    return y


def _run(ctx: _Ctx, canned: Sequence[dict], sampled: Callable[[int, list[float]], Any],
         violates: Callable[[dict], bool | None], width: int) -> Verdict:
    """Canned witnesses first, then stream rows; first violation wins.

    ``sampled(idx, row)`` yields zero or more candidate witnesses;
    ``violates`` returns True, False, or None when the candidate is not
    applicable. ``n`` counts applicable candidates.
    """
    n = 0
    for cand in canned:
        try:
            bad = violates(cand)
        except (ValueError, ZeroDivisionError, OverflowError, RangeError):
            continue
        if bad is None:
            continue
        n += 1
        if bad:
            return Verdict.fail(n, dict(cand))
    for idx, row in enumerate(ctx.rows(width)):
        try:
            cands = sampled(idx, row)
        except (ValueError, ZeroDivisionError, OverflowError, RangeError):
            continue
        for cand in cands or ():
            try:
                bad = violates(cand)
            except (ValueError, ZeroDivisionError, OverflowError, RangeError):
                continue
            if bad is None:
                continue
            n += 1
            if bad:
                return Verdict.fail(n, cand)
    return Verdict.ok(n)


def _require_ctm(model: ReferenceModel, axiom: str) -> None:
    if not isinstance(model, CtmModel):
        raise PreconditionError(f"{axiom} needs per-category utilities; {model.name} has none")


def _canned(model: ReferenceModel, key: str) -> list[dict]:
    return [dict(w) for w in model.canned.get(key, ())]


# ---------------------------------------------------------------------------
# Preference graphs for acyclicity and closure-based monotonicity


class _PreferenceGraph:
    """Sampled edges ``x -> y`` meaning ``x >=^k y`` at some reference."""

    def __init__(self, m: int) -> None:
        self.index: dict[Alternative, int] = {}
        self.alts: list[Alternative] = []
        self.edges: list[dict[tuple[int, int], tuple[bool, Alternative, int]]] = [
            {} for _ in range(m + 1)]

    def node(self, x: Alternative) -> int:
        i = self.index.get(x)
        if i is None:
            i = self.index[x] = len(self.alts)
            self.alts.append(x)
        return i

    def _add(self, k: int, u: int, v: int, strict: bool, r: Alternative, idx: int) -> None:
        old = self.edges[k].get((u, v))
        if old is None or (strict and not old[0]):
            self.edges[k][(u, v)] = (strict, r, idx)

    def compare(self, model: ReferenceModel, x: Alternative, y: Alternative, r: Alternative,
                idx: int, tol: float) -> None:
        if x == y:
            return
        kx, ux = model.evaluate(x, r)
        if kx is BOUNDARY:
            return
        ky, uy = model.evaluate(y, r)
        if ky != kx:
            return
        i, j = self.node(x), self.node(y)
        d = ux - uy
        if d > tol:
            self._add(kx, i, j, True, r, idx)
        elif d < -tol:
            self._add(kx, j, i, True, r, idx)
        else:
            self._add(kx, i, j, False, r, idx)
            self._add(kx, j, i, False, r, idx)

    def digraph(self, k: int) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_edges_from(self.edges[k])
        return g

    def step(self, k: int, u: int, v: int) -> dict[str, Any]:
        strict, r, _ = self.edges[k][(u, v)]
        return {"from": self.alts[u], "to": self.alts[v], "r": r, "strict": strict}

    def strict_cycle(self, k: int) -> dict[str, Any] | None:
        """Cycle through the earliest strict edge lying inside a strong component."""
        if not self.edges[k]:
            return None
        g = self.digraph(k)
        comp: dict[int, int] = {}
        for c, nodes in enumerate(nx.strongly_connected_components(g)):
            for v in nodes:
                comp[v] = c
        best = None
        for (u, v), (strict, _, idx) in self.edges[k].items():
            if strict and comp[u] == comp[v] and (best is None or idx < best[0]):
                best = (idx, u, v)
        if best is None:
            return None
        _, u, v = best
        path = nx.shortest_path(g, v, u)
        steps = [self.step(k, u, v)]
        steps += [self.step(k, a, b) for a, b in zip(path, path[1:])]
        return {"category": k, "cycle": steps}

    def dominance_chain(self, k: int) -> dict[str, Any] | None:
        """``y`` reaching a dominating ``x`` (a closure-level monotonicity failure)."""
        if not self.edges[k]:
            return None
        g = self.digraph(k)
        for yi in sorted(g.nodes):
            y = self.alts[yi]
            for xi in sorted(nx.descendants(g, yi)):
                x = self.alts[xi]
                if x[0] >= y[0] and x[1] >= y[1] and x != y:
                    path = nx.shortest_path(g, yi, xi)
                    chain = [self.step(k, a, b) for a, b in zip(path, path[1:])]
                    return {"category": k, "x": x, "y": y, "chain": chain}
        return None


def _weak_step_ok(model: ReferenceModel, k: int, step: Mapping[str, Any], tol: float) -> bool:
    a, b, r = _pt(step["from"]), _pt(step["to"]), _pt(step["r"])
    ka, ua = model.evaluate(a, r)
    kb, ub = model.evaluate(b, r)
    if ka != k or kb != k:
        return False
    return ua - ub > tol if step.get("strict") else ua - ub >= -tol


def _chain_ok(model: ReferenceModel, k: int, steps: Sequence[Mapping[str, Any]],
              tol: float) -> bool:
    for s, t in zip(steps, steps[1:]):
        if _pt(s["to"]) != _pt(t["from"]):
            return False
    return all(_weak_step_ok(model, k, s, tol) for s in steps)


# ---------------------------------------------------------------------------
# Axiom 1: weak reference irrelevance


def _wri_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float) -> bool:
    steps = w["cycle"]
    if not steps or _pt(steps[-1]["to"]) != _pt(steps[0]["from"]):
        return False
    if not any(s.get("strict") for s in steps):
        return False
    return _chain_ok(model, int(w["category"]), steps, tol)


def check_weak_reference_irrelevance(model: ReferenceModel, budget: SampleBudget,
                                     pool_size: int = 200) -> AxiomReport:
    """Search for a strict cycle in the within-category revealed relation."""
    ctx = _Ctx(model, budget, "WRI")
    graph = _PreferenceGraph(model.catfn.m)
    pool = [ctx.point(u, v) for u, v in SampleStream(budget.seed, "axiom/WRI/pool", 2).rows(pool_size)]
    n = 0
    witness = None
    next_check = _CHECK_EVERY
    for idx, row in enumerate(ctx.rows(8)):
        n = idx + 1
        if idx % 2 == 0:
            i, j = int(row[0] * pool_size), int(row[1] * pool_size)
            graph.compare(model, pool[i], pool[j], ctx.ref(row[2], row[3]), idx, ctx.tol)
        else:
            x, r0 = ctx.point(row[0], row[1]), ctx.ref(row[2], row[3])
            k = ctx.cls(x, r0)
            if k is not BOUNDARY:
                gap = ctx.small(row[4], -8.0, -1.0)
                try:
                    y = _near_indifferent(ctx, x, k, r0, row[5], gap)
                except (ValueError, ZeroDivisionError, OverflowError):
                    y = None
                if y is not None:
                    graph.compare(model, x, y, r0, idx, ctx.tol)
                    angle = 2 * math.pi * row[6]
                    for size in (0.3, 0.1, 0.03, 0.01):
                        r1 = ctx.nudge(r0, size * (0.5 + row[7]), angle)
                        if ctx.inside(r1):
                            graph.compare(model, x, y, r1, idx, ctx.tol)
        if n >= next_check or n == budget.n_samples:
            next_check *= 2
            for k in range(1, model.catfn.m + 1):
                witness = graph.strict_cycle(k)
                if witness is not None:
                    break
            if witness is not None:
                break
    verdict = Verdict.fail(n, witness) if witness is not None else Verdict.ok(n)
    return AxiomReport("WRI", model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Axiom 2 and its unrestricted form: cancellation


_CANCEL_KEYS = ("x1", "y1", "z1", "x2", "y2", "z2")


def _cancel_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float,
                      same_category: bool) -> bool | None:
    x1, y1, z1, x2, y2, z2 = (float(w[k]) for k in _CANCEL_KEYS)
    r = _pt(w["r"])
    pts = [(x1, z2), (z1, y2), (z1, x2), (y1, z2), (x1, x2), (y1, y2)]
    if not all(model.domain.contains(p) for p in pts + [r]):
        return None
    vals = [model.evaluate(p, r) for p in pts]
    cats = {k for k, _ in vals}
    if BOUNDARY in cats:
        return None
    if same_category and len(cats) != 1:
        return None
    ua, ub, uc, ud, ux, uy = (u for _, u in vals)
    if ua < ub - tol or uc < ud - tol:
        return None
    return ux < uy - tol


def _cancel_sampler(ctx: _Ctx) -> Callable[[int, list[float]], list[dict]]:
    model = ctx.model

    def sampled(idx: int, row: list[float]) -> list[dict]:
        x1, y1, z1 = (ctx.coord(0, u) for u in row[0:3])
        x2, y2, z2 = (ctx.coord(1, u) for u in row[3:6])
        r = ctx.ref(row[6], row[7])
        if idx % 2 == 1:
            # Solve x2 and y2 so both premises hold with small slack.
            k = ctx.cls((x1, z2), r)
            if k is BOUNDARY:
                return []
            g1 = 0.0 if row[8] < 0.2 else ctx.small(row[8], -9.0, -3.0)
            g2 = 0.0 if row[9] < 0.2 else ctx.small(row[9], -9.0, -3.0)
            t = solve_coordinate(model, k, r, (z1, 0.0), 1,
                                 model.utility_in(k, (x1, z2), r) - g1, model.domain.bracket(1))
            s = solve_coordinate(model, k, r, (z1, 0.0), 1,
                                 model.utility_in(k, (y1, z2), r) + g2, model.domain.bracket(1))
            if t is None or s is None:
                return []
            y2, x2 = t, s
        return [{"x1": x1, "y1": y1, "z1": z1, "x2": x2, "y2": y2, "z2": z2, "r": r}]

    return sampled


def check_category_cancellation(model: ReferenceModel, budget: SampleBudget) -> AxiomReport:
    """Cancellation restricted to sextuples whose six points share a category."""
    return _check_cancellation(model, budget, True)


def check_full_cancellation(model: ReferenceModel, budget: SampleBudget) -> AxiomReport:
    """Cancellation across categories."""
    return _check_cancellation(model, budget, False)


def _check_cancellation(model: ReferenceModel, budget: SampleBudget,
                        same: bool) -> AxiomReport:
    name = "CatCancel" if same else "FullCancel"
    ctx = _Ctx(model, budget, name)
    verdict = _run(ctx, _canned(model, "Cancel"), _cancel_sampler(ctx),
                   lambda w: _cancel_violation(model, w, ctx.tol, same), 10)
    return AxiomReport(name, model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Axiom 3 and its unrestricted form: monotonicity


def _dominated_pair(ctx: _Ctx, row: Sequence[float]) -> tuple[Alternative, Alternative]:
    """``(x, y)`` with ``x >= y``, ``x != y``; row uses four entries."""
    m = ctx.small(row[2], -4.0, 0.0)
    if row[3] < 1 / 3:
        d = (m, 0.0)
    elif row[3] < 2 / 3:
        d = (0.0, m)
    else:
        a = 3 * row[3] - 2
        d = (m * max(a, 1e-3), m * max(1 - a, 1e-3))
    y = ctx.point(row[0], row[1])
    return (y[0] + d[0], y[1] + d[1]), y


def _full_mono_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float) -> bool | None:
    x, y, r = _pt(w["x"]), _pt(w["y"]), _pt(w["r"])
    if not (x[0] >= y[0] and x[1] >= y[1] and x != y):
        return None
    kx, ux = model.evaluate(x, r)
    ky, uy = model.evaluate(y, r)
    if kx is BOUNDARY or ky is BOUNDARY:
        return None
    return ux - uy <= tol


def check_full_monotonicity(model: ReferenceModel, budget: SampleBudget) -> AxiomReport:
    """Dominance must be strictly preferred whatever the categories."""
    ctx = _Ctx(model, budget, "FullMono")

    def sampled(idx: int, row: list[float]) -> list[dict]:
        r = ctx.ref(row[4], row[5])
        if idx % 2 == 0:
            x, y = _dominated_pair(ctx, row)
            return [{"x": x, "y": y, "r": r}]
        p = frontier_point(model.catfn, ctx.point(row[0], row[1]), ctx.point(row[6], row[7]), r)
        if p is None:
            return []
        m = ctx.small(row[2], -5.0, -1.0)
        a = 0.05 + 0.9 * row[3]
        d = (m * a, m * (1 - a))
        x = (p[0] + d[0], p[1] + d[1])
        y = (p[0] - d[0], p[1] - d[1])
        if not (ctx.inside(x) and ctx.inside(y)):
            return []
        return [{"x": x, "y": y, "r": r}]

    verdict = _run(ctx, _canned(model, "FullMono"), sampled,
                   lambda w: _full_mono_violation(model, w, ctx.tol), 8)
    return AxiomReport("FullMono", model.name, verdict, budget)


def _cat_mono_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float) -> bool:
    x, y = _pt(w["x"]), _pt(w["y"])
    chain = w["chain"]
    if not (x[0] >= y[0] and x[1] >= y[1] and x != y) or not chain:
        return False
    if _pt(chain[0]["from"]) != y or _pt(chain[-1]["to"]) != x:
        return False
    return _chain_ok(model, int(w["category"]), chain, tol)


def check_category_monotonicity(model: ReferenceModel, budget: SampleBudget,
                                pool_size: int = 150) -> AxiomReport:
    """No dominated alternative may reach its dominator in ``>=^{k*}``.

    The closure is approximated by reachability in the sampled edge graph.
    """
    ctx = _Ctx(model, budget, "CatMono")
    graph = _PreferenceGraph(model.catfn.m)
    pool = [ctx.point(u, v) for u, v in
            SampleStream(budget.seed, "axiom/CatMono/pool", 2).rows(pool_size)]
    n = 0
    witness = None
    next_check = _CHECK_EVERY
    for idx, row in enumerate(ctx.rows(6)):
        n = idx + 1
        r = ctx.ref(row[4], row[5])
        if idx % 2 == 0:
            i, j = int(row[0] * pool_size), int(row[1] * pool_size)
            graph.compare(model, pool[i], pool[j], r, idx, ctx.tol)
        else:
            x, y = _dominated_pair(ctx, row)
            if ctx.inside(x):
                graph.compare(model, x, y, r, idx, ctx.tol)
        if n >= next_check or n == budget.n_samples:
            next_check *= 2
            for k in range(1, model.catfn.m + 1):
                witness = graph.dominance_chain(k)
                if witness is not None:
                    break
            if witness is not None:
                break
    verdict = Verdict.fail(n, witness) if witness is not None else Verdict.ok(n)
    return AxiomReport("CatMono", model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Axiom 4: category continuity (openness clause)


def _lipschitz(model: ReferenceModel, k: int, y: Alternative, r: Alternative,
               h: float) -> float:
    u0 = model.utility_in(k, y, r)
    best = 0.0
    for d in ((h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)):
        p = (y[0] + d[0], y[1] + d[1])
        if model.domain.contains(p):
            best = max(best, abs(model.utility_in(k, p, r) - u0) / h)
    return max(best, 1e-12)


def _cont_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float) -> bool | None:
    x, y, yp, r = _pt(w["x"]), _pt(w["y"]), _pt(w["y_p"]), _pt(w["r"])
    kx, ux = model.evaluate(x, r)
    ky, uy = model.evaluate(y, r)
    kp, up = model.evaluate(yp, r)
    if BOUNDARY in (kx, ky) or kp != ky:
        return None
    if w["side"] == "lower":
        if ux - uy <= 10 * tol:
            return None
        return ux - up <= tol
    if uy - ux <= 10 * tol:
        return None
    return up - ux <= tol


def check_category_continuity(model: ReferenceModel, budget: SampleBudget) -> AxiomReport:
    """Strict preference survives small moves of ``y`` inside its category.

    For ``x`` and ``y`` with utility margin ``m``, the ball radius is
    ``m / (4 L)`` where ``L`` is a finite-difference Lipschitz estimate of
    ``y``'s category utility. Only the openness clause is checked.
    """
    ctx = _Ctx(model, budget, "CatCont")
    catfn = model.catfn

    def sampled(idx: int, row: list[float]) -> list[dict]:
        y, r = ctx.point(row[0], row[1]), ctx.ref(row[2], row[3])
        ky, uy = model.evaluate(y, r)
        if ky is BOUNDARY or max(catfn.margins(y, r)) <= 1e3 * ctx.tol:
            return []
        if idx % 2 == 0:
            x = ctx.point(row[4], row[5])
        else:
            kx = ctx.cls(ctx.point(row[4], row[5]), r)
            if kx is BOUNDARY:
                return []
            gap = ctx.small(row[6], -6.0, 0.0) * (1 if row[7] < 0.5 else -1)
            target = uy + gap
            t = solve_coordinate(model, kx, r, (ctx.coord(0, row[4]), 0.0), 1, target,
                                 model.domain.bracket(1))
            if t is None:
                return []
            x = (ctx.coord(0, row[4]), t)
            if not ctx.inside(x):
                return []
        kx, ux = model.evaluate(x, r)
        if kx is BOUNDARY:
            return []
        margin = abs(ux - uy)
        if margin <= 10 * ctx.tol:
            return []
        side = "lower" if ux > uy else "upper"
        radius = min(margin / (4 * _lipschitz(model, ky, y, r, 1e-6 * ctx.scale)),
                     0.05 * ctx.scale)
        out = []
        for a, b in ((row[8], row[9]), (row[10], row[11])):
            ang, rad = 2 * math.pi * a, radius * math.sqrt(b)
            yp = (y[0] + rad * math.cos(ang), y[1] + rad * math.sin(ang))
            if ctx.inside(yp):
                out.append({"x": x, "y": y, "y_p": yp, "r": r, "side": side,
                            "radius": radius})
        return out

    verdict = _run(ctx, _canned(model, "CatCont"), sampled,
                   lambda w: _cont_violation(model, w, ctx.tol), 12)
    return AxiomReport("CatCont", model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Axiom 5: reference interlocking


def _interlock_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float) -> bool | None:
    i, k, j = int(w["i"]), int(w["k"]), int(w["j"])
    o = 1 - i
    x, y, a, b = (_pt(w[s]) for s in ("x", "y", "a", "b"))
    xp, yp, ap, bp = (_pt(w[s]) for s in ("x_p", "y_p", "a_p", "b_p"))
    shape = (x[o] == a[o] and y[o] == b[o] and xp[o] == ap[o] and yp[o] == bp[o]
             and x[i] == xp[i] and y[i] == yp[i] and a[i] == ap[i] and b[i] == bp[i])
    if not shape:
        return None
    refs = w["refs"]

    def rel(p: Alternative, q: Alternative, cat: int, key: str) -> float | None:
        r = _pt(refs[key])
        kp, up = model.evaluate(p, r)
        kq, uq = model.evaluate(q, r)
        if kp != cat or kq != cat:
            return None
        return up - uq

    d_xy = rel(x, y, k, "xy")
    d_ab = rel(a, b, k, "ab")
    d_xyp = rel(xp, yp, j, "xy_p")
    d_bap = rel(bp, ap, j, "ab_p")
    if None in (d_xy, d_ab, d_xyp, d_bap):
        return None
    if abs(d_xy) > tol or d_ab < -tol or abs(d_xyp) > tol:
        return None
    return d_bap > tol


def _find_ref(ctx: _Ctx, rng: np.random.Generator, p: Alternative, q: Alternative,
              k: int, tries: int = 20) -> Alternative | None:
    for u, v in rng.random((tries, 2)):
        r = ctx.ref(float(u), float(v))
        if ctx.cls(p, r) == k and ctx.cls(q, r) == k:
            return r
    return None


def check_reference_interlocking(model: CtmModel, budget: SampleBudget) -> AxiomReport:
    """Utility differences along one dimension must rank alike in every category.

    Indifferences are built from the inverse of the category utility; the
    references witnessing each relation are then found by random search.
    """
    _require_ctm(model, "RefInterlock")
    ctx = _Ctx(model, budget, "RefInterlock")
    m = model.catfn.m

    def sampled(idx: int, row: list[float]) -> list[dict]:
        i = 0 if row[0] < 0.5 else 1
        o = 1 - i
        k = 1 + min(int(row[1] * m), m - 1)
        j = 1 + min(int(row[2] * m), m - 1)
        xi, yi, ai, bi = (ctx.coord(i, u) for u in row[3:7])
        xo, xpo = ctx.coord(o, row[8]), ctx.coord(o, row[9])
        uk, uj = model.category_utilities[k - 1], model.category_utilities[j - 1]
        bracket = model.domain.bracket(o)
        try:
            if idx % 2 == 1:
                # Put a >=^k b just inside its edge, where rankings can disagree.
                gap = ctx.small(row[7], -8.0, -1.0)
                bi = uk[i].invert(uk[i](ai) + uk[i](yi) - uk[i](xi) - gap,
                                  model.domain.bracket(i))
            yo = uk[o].invert(uk[o](xo) + uk[i](xi) - uk[i](yi), bracket)
            ypo = uj[o].invert(uj[o](xpo) + uj[i](xi) - uj[i](yi), bracket)
        except RangeError:
            return []
        mk = lambda ci, co: _with(_with((0.0, 0.0), i, ci), o, co)  # noqa: E731
        x, y, a, b = mk(xi, xo), mk(yi, yo), mk(ai, xo), mk(bi, yo)
        xp, yp, ap, bp = mk(xi, xpo), mk(yi, ypo), mk(ai, xpo), mk(bi, ypo)
        if not all(ctx.inside(p) for p in (x, y, a, b, xp, yp, ap, bp)):
            return []
        rng = ctx.rng(idx)
        refs = {}
        for key, p, q, c in (("xy", x, y, k), ("ab", a, b, k), ("xy_p", xp, yp, j),
                             ("ab_p", ap, bp, j)):
            r = _find_ref(ctx, rng, p, q, c)
            if r is None:
                return []
            refs[key] = r
        return [{"i": i, "k": k, "j": j, "x": x, "y": y, "a": a, "b": b,
                 "x_p": xp, "y_p": yp, "a_p": ap, "b_p": bp, "refs": refs}]

    verdict = _run(ctx, _canned(model, "RefInterlock"), sampled,
                   lambda w: _interlock_violation(model, w, ctx.tol), 10)
    return AxiomReport("RefInterlock", model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Axiom 6: affine across categories


def _aac_violation(model: CtmModel, w: Mapping[str, Any], tol: float) -> bool | None:
    x, xp, y, yp, r = (_pt(w[s]) for s in ("x", "x_p", "y", "y_p", "r"))
    alpha = float(w["alpha"])
    kx, ux = model.evaluate(x, r)
    kxp, uxp = model.evaluate(xp, r)
    ky, uy = model.evaluate(y, r)
    kyp, uyp = model.evaluate(yp, r)
    if BOUNDARY in (kx, ky) or kxp != kx or kyp != ky:
        return None
    if ux < uy - tol or uxp < uyp - tol:
        return None
    mx = mix(model, kx, x, xp, alpha)
    my = mix(model, ky, y, yp, alpha)
    kmx, umx = model.evaluate(mx, r)
    kmy, umy = model.evaluate(my, r)
    if kmx != kx or kmy != ky:
        return None
    return umx < umy - tol


def check_affine_across_categories(model: CtmModel, budget: SampleBudget) -> AxiomReport:
    """Utility-space mixtures preserve preferences across categories."""
    _require_ctm(model, "AAC")
    ctx = _Ctx(model, budget, "AAC")

    def sampled(idx: int, row: list[float]) -> list[dict]:
        r = ctx.ref(row[0], row[1])
        x, xp = ctx.point(row[2], row[3]), ctx.point(row[4], row[5])
        y, yp = ctx.point(row[6], row[7]), ctx.point(row[8], row[9])
        if row[10] < 0.05:
            alpha = 0.0
        elif row[10] < 0.1:
            alpha = 1.0
        else:
            alpha = row[11]
        if idx % 2 == 1:
            ky = ctx.cls(y, r)
            if ky is BOUNDARY:
                return []
            g1, g2 = ctx.small(row[12], -8.0, -1.0), ctx.small(row[13], -8.0, -1.0)
            y = _near_indifferent(ctx, x, ky, r, row[6], g1)
            yp = _near_indifferent(ctx, xp, ky, r, row[8], g2)
            if y is None or yp is None:
                return []
        kx, ux = model.evaluate(x, r)
        kxp, uxp = model.evaluate(xp, r)
        ky, uy = model.evaluate(y, r)
        kyp, uyp = model.evaluate(yp, r)
        if BOUNDARY in (kx, ky) or kxp != kx or kyp != ky:
            return []
        if ux < uy and uxp < uyp:
            x, xp, y, yp = y, yp, x, xp
        return [{"x": x, "x_p": xp, "y": y, "y_p": yp, "r": r, "alpha": alpha}]

    verdict = _run(ctx, _canned(model, "AAC"), sampled,
                   lambda w: _aac_violation(model, w, ctx.tol), 14)
    return AxiomReport("AAC", model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Axiom 7: reference irrelevance


def _sign(d: float, tol: float) -> int:
    return 1 if d > tol else (-1 if d < -tol else 0)


def _ri_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float) -> bool | None:
    x, y, r, rp = (_pt(w[s]) for s in ("x", "y", "r", "r_p"))
    kx, ux = model.evaluate(x, r)
    ky, uy = model.evaluate(y, r)
    kxp, uxp = model.evaluate(x, rp)
    kyp, uyp = model.evaluate(y, rp)
    if BOUNDARY in (kx, ky) or kxp != kx or kyp != ky:
        return None
    return _sign(ux - uy, tol) != _sign(uxp - uyp, tol)


def check_reference_irrelevance(model: ReferenceModel, budget: SampleBudget) -> AxiomReport:
    """Preferences between two alternatives keep their categories fixed."""
    ctx = _Ctx(model, budget, "RefIrrel")

    def sampled(idx: int, row: list[float]) -> list[dict]:
        x, y = ctx.point(row[0], row[1]), ctx.point(row[2], row[3])
        r = ctx.ref(row[4], row[5])
        if idx % 2 == 0:
            return [{"x": x, "y": y, "r": r, "r_p": ctx.ref(row[6], row[7])}]
        ky = ctx.cls(y, r)
        if ky is BOUNDARY:
            return []
        gap = ctx.small(row[8], -8.0, -1.0)
        y = _near_indifferent(ctx, x, ky, r, row[2], gap)
        if y is None:
            return []
        rp = ctx.nudge(r, 10.0 ** (-3 + 2.5 * row[9]), 2 * math.pi * row[6])
        if not ctx.inside(rp):
            return []
        return [{"x": x, "y": y, "r": r, "r_p": rp}]

    verdict = _run(ctx, _canned(model, "RefIrrel"), sampled,
                   lambda w: _ri_violation(model, w, ctx.tol), 10)
    return AxiomReport("RefIrrel", model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Salient dimension overweighted


def _sdo_violation(model: ReferenceModel, w: Mapping[str, Any], tol: float) -> bool | None:
    x, y, r, rp = (_pt(w[s]) for s in ("x", "y", "r", "r_p"))
    kx, ux = model.evaluate(x, r)
    ky, uy = model.evaluate(y, r)
    lx, uxp = model.evaluate(x, rp)
    ly, uyp = model.evaluate(y, rp)
    if BOUNDARY in (kx, lx) or ky != kx or ly != lx or kx == lx:
        return None
    k, l = kx - 1, lx - 1
    if not (x[l] > y[l] and y[k] > x[k]):
        return None
    if ux - uy < -tol:
        return None
    return uxp - uyp <= tol


def check_sdo(model: ReferenceModel, budget: SampleBudget, ref_tries: int = 12) -> AxiomReport:
    """An alternative strong in dimension ``l`` gains when ``l`` is salient."""
    m = model.catfn.m
    if m > 2:
        raise ArityError(f"SDO needs categories indexed by dimensions, got {m} categories")
    ctx = _Ctx(model, budget, "SDO")
    if m == 1:
        return AxiomReport("SDO", model.name, Verdict.ok(0), budget)

    def refs_for(idx: int, x: Alternative, y: Alternative, k: int) -> Alternative | None:
        return _find_ref(ctx, ctx.rng(idx * 2 + k), x, y, k, ref_tries)

    def sampled(idx: int, row: list[float]) -> list[dict]:
        k = 1 if row[0] < 0.5 else 2
        l = 3 - k
        x = ctx.point(row[1], row[2])
        if idx % 2 == 0:
            y = ctx.point(row[3], row[4])
            r = refs_for(idx, x, y, k)
            if r is None:
                return []
        else:
            r0 = refs_for(idx, x, x, k)
            if r0 is None:
                return []
            yk = x[k - 1] + ctx.small(row[3], -4.0, -0.5)
            gap = ctx.small(row[4], -8.0, -1.0)
            target = model.utility_in(k, x, r0) - gap
            t = solve_coordinate(model, k, r0, _with(x, k - 1, yk), l - 1, target,
                                 model.domain.bracket(l - 1))
            if t is None:
                return []
            y = _with(_with(x, k - 1, yk), l - 1, t)
            if not ctx.inside(y) or ctx.cls(y, r0) != k:
                return []
            r = r0
        rp = refs_for(idx + budget.n_samples, x, y, l)
        if rp is None:
            return []
        return [{"x": x, "y": y, "r": r, "r_p": rp}]

    verdict = _run(ctx, _canned(model, "SDO"), sampled,
                   lambda w: _sdo_violation(model, w, ctx.tol), 5)
    return AxiomReport("SDO", model.name, verdict, budget)


# ---------------------------------------------------------------------------
# Dispatch, replay and the comparison table


CHECKERS: dict[str, Callable[[Any, SampleBudget], AxiomReport]] = {
    "WRI": check_weak_reference_irrelevance,
    "CatCancel": check_category_cancellation,
    "CatMono": check_category_monotonicity,
    "CatCont": check_category_continuity,
    "RefInterlock": check_reference_interlocking,
    "AAC": check_affine_across_categories,
    "RefIrrel": check_reference_irrelevance,
    "SDO": check_sdo,
    "FullMono": check_full_monotonicity,
    "FullCancel": check_full_cancellation,
}


def check_axiom(model: ReferenceModel, axiom: str, budget: SampleBudget) -> AxiomReport:
    try:
        checker = CHECKERS[axiom]
    except KeyError:
        raise ValueError(f"unknown axiom {axiom!r}; choose from {', '.join(AXIOMS)}") from None
    return checker(model, budget)


def replay_witness(model: ReferenceModel, axiom: str, witness: Mapping[str, Any],
                   tol: float = 1e-9) -> bool:
    """Recompute the violated inequality from ``witness`` alone."""
    if axiom == "WRI":
        return _wri_violation(model, witness, tol)
    if axiom == "CatMono":
        return _cat_mono_violation(model, witness, tol)
    predicates: dict[str, Callable[[], bool | None]] = {
        "CatCancel": lambda: _cancel_violation(model, witness, tol, True),
        "FullCancel": lambda: _cancel_violation(model, witness, tol, False),
        "FullMono": lambda: _full_mono_violation(model, witness, tol),
        "CatCont": lambda: _cont_violation(model, witness, tol),
        "RefInterlock": lambda: _interlock_violation(model, witness, tol),
        "AAC": lambda: _aac_violation(model, witness, tol),
        "RefIrrel": lambda: _ri_violation(model, witness, tol),
        "SDO": lambda: _sdo_violation(model, witness, tol),
    }
    if axiom not in predicates:
        raise ValueError(f"unknown axiom {axiom!r}")
    return bool(predicates[axiom]())


TABLE_ROWS = {
    "CTM": CTM_BUNDLE,
    "Monotonicity": ("FullMono",),
    "Reference Irrelevance": ("RefIrrel",),
    "Cancellation": ("FullCancel",),
}


@dataclass(frozen=True)
class ComparisonTable:
    models: tuple[str, ...]
    rows: tuple[str, ...]
    cells: dict[tuple[str, str], tuple[AxiomReport, ...]]

    def holds(self, row: str, model: str) -> bool:
        return all(rep.passed for rep in self.cells[(row, model)])

    def mark(self, row: str, model: str) -> str:
        return "✓" if self.holds(row, model) else "✗"

    def matrix(self) -> list[list[bool]]:
        return [[self.holds(row, m) for m in self.models] for row in self.rows]

    def render(self) -> str:
        width = max(len(r) for r in self.rows)
        head = " " * width + " | " + " | ".join(self.models)
        lines = [head]
        for row in self.rows:
            marks = " | ".join(self.mark(row, m).center(len(m)) for m in self.models)
            lines.append(f"{row:<{width}} | {marks}")
        return "\n".join(lines)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"models": list(self.models), "rows": []}
        for row in self.rows:
            cells = []
            for m in self.models:
                reps = self.cells[(row, m)]
                cells.append({"model": m, "holds": self.holds(row, m),
                              "reports": [rep.to_dict() for rep in reps]})
            out["rows"].append({"row": row, "cells": cells})
        return out


def model_comparison_table(models: Sequence[ReferenceModel],
                           budget: SampleBudget) -> ComparisonTable:
    """Run the CTM bundle, monotonicity, reference irrelevance and cancellation."""
    cells: dict[tuple[str, str], tuple[AxiomReport, ...]] = {}
    names = []
    for model in models:
        name = model.name
        if name in names:
            name = f"{name}#{len(names)}"
        names.append(name)
        for row, axioms in TABLE_ROWS.items():
            cells[(row, name)] = tuple(CHECKERS[a](model, budget) for a in axioms)
    return ComparisonTable(tuple(names), tuple(TABLE_ROWS), cells)


# ---------------------------------------------------------------------------
# Test models used as negative controls


class ConvexAcrossModel(CtmModel):
    """Category 2 utility squared and rescaled: additive within, not affine across.

    On the default box both categories span similar utility ranges, so
    cross-category indifferences are common.
    """

    def transform(self, k: int, r: Alternative, u: float) -> float:
        return u * u / 5.0 if k == 2 else u


def interlock_counterexample(box: Box | None = None) -> CtmModel:
    """Two salience categories valuing dimension 1 by ``t`` and ``t^3``."""
    from ctm.models import CUBE
    from ctm.salience import SIGMA_BGS, categories_from_salience

    box = box or Box.square(0.5, 5.0)
    catfn = categories_from_salience(SIGMA_BGS, domain_box=box)
    return CtmModel("interlock-test", catfn, [(LINEAR, LINEAR), (CUBE, LINEAR)])


def convex_counterexample(box: Box | None = None) -> CtmModel:
    from ctm.salience import SIGMA_BGS, categories_from_salience

    box = box or Box.square(0.5, 5.0)
    catfn = categories_from_salience(SIGMA_BGS, domain_box=box)
    return ConvexAcrossModel("convex-test", catfn,
                             [(LINEAR.scaled(0.6), LINEAR.scaled(0.4)),
                              (LINEAR.scaled(0.4), LINEAR.scaled(0.6))])


class StepModel(CtmModel):
    """Single-category model with a unit jump at ``x1 = step``."""

    def __init__(self, step: float = 2.5, box: Box | None = None) -> None:
        from ctm.core import SingleCategory

        box = box or Box.square(0.5, 5.0)
        super().__init__("step-test", SingleCategory(domain_box=box), [(LINEAR, LINEAR)])
        self.step = step

    def category_utility(self, k: int, x: Alternative) -> float:
        return x[0] + x[1] + (1.0 if x[0] > self.step else 0.0)
