"""Choice from menus with references generated from the menu itself.

A reference generator maps a menu to a reference point; a model then
chooses the maximal elements at that reference. Datasets of such choices
support an indirect revealed-preference graph whose reachability drives the
category-SARP test, and a menu construction that reveals categories.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Sequence

import networkx as nx
import numpy as np

from ctm.core import BOUNDARY, SIGNED, Alternative, Box, Verdict, as_alternative
from ctm.errors import ConsistencyError, ConstructionError, ExhaustionError, UnsupportedError
from ctm.identify import AMBIGUOUS_LABEL, BOUNDARY_LABEL, Grid, RegionMap
from ctm.models import ReferenceModel
from ctm.sampling import SampleBudget, SampleStream

DATASET_VERSION = 1


# ---------------------------------------------------------------------------
# Menus and generators


@dataclass(frozen=True)
class Menu:
    """A finite, nonempty set of alternatives in insertion order."""

    alternatives: tuple[Alternative, ...]

    def __post_init__(self) -> None:
        if not self.alternatives:
            raise ValueError("a menu needs at least one alternative")

    @classmethod
    def of(cls, points: Sequence[Sequence[float]], tol: float = 1e-9) -> Menu:
        """Build a menu, dropping points within ``tol`` (max-norm) of an earlier one."""
        kept: list[Alternative] = []
        for p in points:
            q = as_alternative(p, SIGNED)
            if all(max(abs(q[0] - k[0]), abs(q[1] - k[1])) > tol for k in kept):
                kept.append(q)
        return cls(tuple(kept))

    def __len__(self) -> int:
        return len(self.alternatives)

    def __iter__(self) -> Iterator[Alternative]:
        return iter(self.alternatives)


@dataclass(frozen=True)
class ReferenceGenerator:
    name: str
    fn: Callable[[Sequence[Alternative]], Alternative] = field(compare=False)
    generalized_average: bool = True
    strong_generalized_average: bool = False
    strategy: str | None = None

    def __call__(self, points: Sequence[Alternative]) -> Alternative:
        return self.fn(points)


def _mean(points: Sequence[Alternative]) -> Alternative:
    n = len(points)
    return (math.fsum(p[0] for p in points) / n, math.fsum(p[1] for p in points) / n)


def _median(points: Sequence[Alternative]) -> Alternative:
    return (float(np.median([p[0] for p in points])), float(np.median([p[1] for p in points])))


def _sup(points: Sequence[Alternative]) -> Alternative:
    return (max(p[0] for p in points), max(p[1] for p in points))


def _inf(points: Sequence[Alternative]) -> Alternative:
    return (min(p[0] for p in points), min(p[1] for p in points))


def default_weight(x: Alternative) -> float:
    """A continuous weight with values in ``[1, 2]``."""
    return 1.0 + 1.0 / (1.0 + math.hypot(x[0], x[1]))


def weighted_mean(w: Callable[[Alternative], float] = default_weight,
                  bounds: tuple[float, float] = (1.0, 2.0)) -> ReferenceGenerator:
    a, b = bounds
    if not 0 < a <= b:
        raise ConstructionError("weight bounds need 0 < a <= b")

    def fn(points: Sequence[Alternative]) -> Alternative:
        ws = [w(p) for p in points]
        if any(not a <= v <= b for v in ws):
            raise ConstructionError(f"weight outside [{a}, {b}]")
        tot = math.fsum(ws)
        return (math.fsum(v * p[0] for v, p in zip(ws, points)) / tot,
                math.fsum(v * p[1] for v, p in zip(ws, points)) / tot)

    return ReferenceGenerator("weighted-mean", fn, True, False, "replicate")


MEAN = ReferenceGenerator("mean", _mean, True, True, "replicate")
MEDIAN = ReferenceGenerator("median", _median, True, False, None)
SUP = ReferenceGenerator("sup", _sup, False, False, "replicate")
INF = ReferenceGenerator("inf", _inf, False, False, "replicate")

GENERATORS = {g.name: g for g in (MEAN, MEDIAN, SUP, INF)}


def get_generator(name: str) -> ReferenceGenerator:
    if name == "weighted-mean":
        return weighted_mean()
    try:
        return GENERATORS[name]
    except KeyError:
        raise ConstructionError(f"unknown reference generator {name!r}") from None


def generate_reference(gen: ReferenceGenerator, menu: Menu | Sequence[Alternative]) -> Alternative:
    points = menu.alternatives if isinstance(menu, Menu) else tuple(menu)
    if not points:
        raise ValueError("cannot generate a reference for an empty menu")
    return gen(points)


# ---------------------------------------------------------------------------
# Generalized-average checks


def replicate_menu(S: Sequence[Alternative], S_prime: Sequence[Alternative], eps: float,
                   copies: int) -> list[Alternative]:
    """``S`` plus ``S'`` plus ``copies`` near-duplicates of each ``S`` point.

    Every near-duplicate lies strictly within ``eps**2`` of its source.
    """
    out = list(S) + list(S_prime)
    for j in range(copies):
        ang = 2 * math.pi * (j + 0.5) / max(copies, 1)
        rad = 0.25 * eps * eps * (1 + j / max(copies, 1))
        for p in S:
            out.append((p[0] + rad * math.cos(ang), p[1] + rad * math.sin(ang)))
    return out


def _clause_ii_distance(gen: ReferenceGenerator, S: Sequence[Alternative],
                        S_prime: Sequence[Alternative], eps: float, copies: int) -> float:
    a = gen(list(S))
    b = gen(replicate_menu(S, S_prime, eps, copies))
    return math.dist(a, b)


def _clause_i_moves(gen: ReferenceGenerator, S: Sequence[Alternative], ang: float,
                    steps: Sequence[float]) -> list[float]:
    base = gen(list(S))
    out = []
    for t in steps:
        moved = [(S[0][0] + t * math.cos(ang), S[0][1] + t * math.sin(ang))] + list(S[1:])
        out.append(math.dist(gen(moved), base))
    return out


def _clause_i_bad(moves: Sequence[float], scale: float) -> bool:
    """The smallest move must be tiny and well below the largest one."""
    return moves[-1] > 1e-3 * scale or moves[-1] > 0.5 * moves[0] + 1e-12 * scale


def check_generalized_average(gen: ReferenceGenerator, budget: SampleBudget,
                              box: Box | None = None, max_copies: int = 4096) -> Verdict:
    """Sampled check of continuity (i) and approximation by augmentation (ii).

    Clause (ii) uses replication: ``S*`` adds ``S'`` and growing numbers of
    near-duplicates of ``S``; it fails when no replication count up to
    ``max_copies`` keeps the reference within ``eps``.
    """
    if gen.strategy != "replicate":
        raise UnsupportedError(f"no augmentation strategy registered for {gen.name!r}")
    box = box or Box.square(0.5, 10.0)
    scale = min(box.x1 - box.x0, box.y1 - box.y0)
    rows = SampleStream(budget.seed, f"choice/genavg/{gen.name}", 32).rows(budget.n_samples)
    n = 0
    for idx, row in enumerate(rows):
        m = 2 + int(row[0] * 5)
        S = [box.point(row[1 + 2 * i], row[2 + 2 * i]) for i in range(m)]
        n += 1
        if idx % 2 == 0:
            # Clause (i): the reference moves less and less as x1 moves less.
            steps = [eta * scale for eta in (1e-2, 1e-4, 1e-6)]
            ang = 2 * math.pi * row[20]
            moves = _clause_i_moves(gen, S, ang, steps)
            if _clause_i_bad(moves, scale):
                return Verdict.fail(n, {"clause": "i", "S": S, "direction": ang,
                                        "steps": steps, "scale": scale, "moves": moves})
        else:
            k = 1 + int(row[15] * 3)
            S_prime = [box.point(row[16 + 2 * i], row[17 + 2 * i]) for i in range(k)]
            eps = scale * 10.0 ** (-3 + 2 * row[30])
            copies = 1
            d = _clause_ii_distance(gen, S, S_prime, eps, 0)
            while d >= eps and copies <= max_copies:
                d = _clause_ii_distance(gen, S, S_prime, eps, copies)
                if d < eps:
                    break
                copies *= 2
            if d >= eps:
                return Verdict.fail(n, {"clause": "ii", "S": S, "S_prime": S_prime,
                                        "eps": eps, "copies": min(copies, max_copies),
                                        "distance": d})
    return Verdict.ok(n)


def replay_generalized_average(gen: ReferenceGenerator, witness: Mapping[str, Any]) -> bool:
    """True when the witness still shows a violation."""
    S = [as_alternative(p, SIGNED) for p in witness["S"]]
    if witness["clause"] == "ii":
        S_prime = [as_alternative(p, SIGNED) for p in witness["S_prime"]]
        eps = float(witness["eps"])
        top = int(witness["copies"])
        return all(_clause_ii_distance(gen, S, S_prime, eps, c) >= eps
                   for c in [0] + [2 ** i for i in range(int(math.log2(top)) + 1)])
    moves = _clause_i_moves(gen, S, float(witness["direction"]),
                            [float(v) for v in witness["steps"]])
    return _clause_i_bad(moves, float(witness["scale"]))


# ---------------------------------------------------------------------------
# Choosing


class _Uncategorized:
    _instance: _Uncategorized | None = None

    def __new__(cls) -> _Uncategorized:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UncategorizedMenu"

    def __bool__(self) -> bool:
        return False


UNCATEGORIZED = _Uncategorized()


def choose(model: ReferenceModel, gen: ReferenceGenerator,
           menu: Menu | Sequence[Sequence[float]]) -> tuple[Alternative, ...] | _Uncategorized:
    """Maximal elements at the generated reference, sorted; ties within tolerance kept.

    Returns ``UNCATEGORIZED`` when some alternative sits on a frontier.
    """
    if not isinstance(menu, Menu):
        menu = Menu.of(menu)
    for p in menu:
        as_alternative(p, model.domain)
    r = generate_reference(gen, menu)
    return _choose_at(model, menu.alternatives, r)


def _choose_at(model: ReferenceModel, points: Sequence[Alternative],
               r: Alternative) -> tuple[Alternative, ...] | _Uncategorized:
    vals = []
    for p in points:
        k, u = model.evaluate(p, r)
        if k is BOUNDARY:
            return UNCATEGORIZED
        vals.append(u)
    best = max(vals)
    tol = model.tolerance
    return tuple(sorted(p for p, u in zip(points, vals) if u >= best - tol))


def choice_oracle(model: ReferenceModel, gen: ReferenceGenerator) -> Callable[[Menu], Any]:
    return lambda menu: choose(model, gen, menu)


# ---------------------------------------------------------------------------
# Datasets


@dataclass(frozen=True)
class Observation:
    menu: tuple[Alternative, ...]
    chosen: tuple[int, ...]
    reference: Alternative
    categories: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.chosen:
            raise ValueError("an observation needs a nonempty chosen set")
        if any(not 0 <= i < len(self.menu) for i in self.chosen):
            raise ValueError("chosen indices must point into the menu")
        if len(self.categories) != len(self.menu):
            raise ValueError("one category per menu alternative required")

    def chosen_set(self) -> set[int]:
        return set(self.chosen)

    def to_dict(self) -> dict[str, Any]:
        return {"menu": [list(p) for p in self.menu], "chosen": list(self.chosen),
                "reference": list(self.reference), "categories": list(self.categories)}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Observation:
        return cls(tuple(as_alternative(p, SIGNED) for p in d["menu"]),
                   tuple(int(i) for i in d["chosen"]),
                   as_alternative(d["reference"], SIGNED),
                   tuple(int(k) for k in d["categories"]))


@dataclass(frozen=True)
class ChoiceDataset:
    generator: str
    observations: tuple[Observation, ...]
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.observations)

    def to_dict(self) -> dict[str, Any]:
        return {"version": DATASET_VERSION, "generator": self.generator,
                "observations": [o.to_dict() for o in self.observations],
                "metadata": self.metadata}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> ChoiceDataset:
        if d.get("version") != DATASET_VERSION:
            raise ValueError(f"unsupported dataset version {d.get('version')!r}")
        return cls(str(d["generator"]),
                   tuple(Observation.from_dict(o) for o in d["observations"]),
                   dict(d.get("metadata", {})))

    @classmethod
    def from_json(cls, text: str) -> ChoiceDataset:
        return cls.from_dict(json.loads(text))

    def content_hash(self) -> int:
        return zlib.crc32(self.to_json().encode())


class MenuSampler:
    """Menus of random size drawn from a fixed pool of alternatives in ``box``.

    Drawing from a pool makes alternatives recur across menus, which is
    what lets revealed-preference chains form.
    """

    def __init__(self, box: Box, min_size: int = 3, max_size: int = 6,
                 pool_size: int | None = 40) -> None:
        if not 1 <= min_size <= max_size:
            raise ValueError("need 1 <= min_size <= max_size")
        if pool_size is not None and pool_size < max_size:
            raise ValueError("the pool must hold at least max_size alternatives")
        self.box = box
        self.min_size = min_size
        self.max_size = max_size
        self.pool_size = pool_size

    def menus(self, seed: int) -> Iterator[Menu]:
        rng = np.random.default_rng([seed & ((1 << 64) - 1), zlib.crc32(b"choice/menus")])
        pool = None
        if self.pool_size is not None:
            pool = [self.box.point(float(u), float(v)) for u, v in rng.random((self.pool_size, 2))]
        while True:
            size = int(rng.integers(self.min_size, self.max_size + 1))
            if pool is None:
                pts = [self.box.point(float(u), float(v)) for u, v in rng.random((size, 2))]
            else:
                pts = [pool[i] for i in rng.choice(len(pool), size=size, replace=False)]
            yield Menu.of(pts)


def simulate_dataset(model: ReferenceModel, gen: ReferenceGenerator, sampler: MenuSampler,
                     n: int, seed: int) -> ChoiceDataset:
    """``n`` observations of the model's choices; uncategorized menus are skipped."""
    obs: list[Observation] = []
    draws = skipped = 0
    menus = sampler.menus(seed)
    while len(obs) < n:
        menu = next(menus)
        draws += 1
        r = generate_reference(gen, menu)
        chosen = _choose_at(model, menu.alternatives, r)
        if chosen is UNCATEGORIZED:
            skipped += 1
            if draws >= 100 and skipped > 0.9 * draws:
                raise ExhaustionError(f"{skipped} of {draws} menus were uncategorized")
            continue
        cats = tuple(int(model.catfn._classify(p, r)) for p in menu)
        idx = tuple(i for i, p in enumerate(menu.alternatives) if p in chosen)
        obs.append(Observation(menu.alternatives, idx, r, cats))
    meta = {"model": model.name, "seed": seed, "draws": draws, "skipped": skipped}
    return ChoiceDataset(gen.name, tuple(obs), meta)


def corrupt_dataset(data: ChoiceDataset, fraction: float, seed: int) -> tuple[ChoiceDataset, list[int]]:
    """Replace the chosen set of a random ``fraction`` of observations.

    Each picked observation now chooses a single previously unchosen
    alternative. Returns the new dataset and the corrupted indices.
    """
    rng = np.random.default_rng([seed & ((1 << 64) - 1), zlib.crc32(b"choice/corrupt")])
    eligible = [i for i, o in enumerate(data.observations) if len(o.chosen) < len(o.menu)]
    count = min(len(eligible), int(round(fraction * len(data.observations))))
    picked = sorted(int(i) for i in rng.choice(eligible, size=count, replace=False)) if count else []
    obs = list(data.observations)
    for i in picked:
        o = obs[i]
        others = [j for j in range(len(o.menu)) if j not in o.chosen_set()]
        j = others[int(rng.integers(len(others)))]
        obs[i] = Observation(o.menu, (j,), o.reference, o.categories)
    meta = dict(data.metadata, corrupted=picked)
    return ChoiceDataset(data.generator, tuple(obs), meta), picked


# ---------------------------------------------------------------------------
# Revealed preference


Node = tuple[Alternative, int]


class RevealedGraph:
    """One-step indirect revealed preference ``(x, k) -> (y, j)`` per observation.

    An edge records that ``x`` was chosen from a menu containing ``y`` with
    those categories; it is weak when ``y`` was chosen too. Chains link
    through nodes, so a link requires the same category in both menus.
    """

    def __init__(self, data: ChoiceDataset) -> None:
        self.data = data
        self.key = data.content_hash()
        g = nx.DiGraph()
        for s, o in enumerate(data.observations):
            chosen = o.chosen_set()
            for i in o.chosen:
                src = (o.menu[i], o.categories[i])
                for j, y in enumerate(o.menu):
                    if j == i:
                        continue
                    dst = (y, o.categories[j])
                    if g.has_edge(src, dst):
                        continue
                    g.add_edge(src, dst, observation=s, strict=j not in chosen)
            for i, p in enumerate(o.menu):
                g.add_node((p, o.categories[i]))
        self.graph = g
        self._reach: dict[Node, frozenset[Node]] = {}

    @property
    def nodes(self) -> list[Node]:
        return list(self.graph.nodes)

    def has_edge(self, a: Node, b: Node) -> bool:
        return self.graph.has_edge(a, b)

    def reachable(self, a: Node) -> frozenset[Node]:
        hit = self._reach.get(a)
        if hit is None:
            hit = frozenset(nx.descendants(self.graph, a)) if a in self.graph else frozenset()
            self._reach[a] = hit
        return hit

    def reaches(self, a: Node, b: Node) -> bool:
        return b in self.reachable(a)

    def chain(self, a: Node, b: Node) -> list[dict[str, Any]]:
        path = nx.shortest_path(self.graph, a, b)
        out = []
        for u, v in zip(path, path[1:]):
            e = self.graph.edges[u, v]
            out.append({"from": [list(u[0]), u[1]], "to": [list(v[0]), v[1]],
                        "observation": e["observation"], "strict": e["strict"]})
        return out


def revealed_graph(data: ChoiceDataset, model: ReferenceModel | None = None) -> RevealedGraph:
    """Build the graph; with ``model``, stored categories must match its classification."""
    if model is not None:
        for s, o in enumerate(data.observations):
            for p, k in zip(o.menu, o.categories):
                actual = model.catfn._classify(p, o.reference)
                if actual != k:
                    raise ConsistencyError(
                        f"observation {s}: {p} stored as {k} but classifies as {actual}")
    return RevealedGraph(data)


@dataclass(frozen=True)
class SarpReport:
    violations: tuple[dict[str, Any], ...]
    n_checked: int

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {"status": "PASS" if self.passed else "FAIL", "n": self.n_checked,
                "violations": list(self.violations)}


def check_category_sarp(data: ChoiceDataset, graph: RevealedGraph | None = None,
                        limit: int | None = None) -> SarpReport:
    """Every revealed-preferred available alternative must be chosen with ``y``."""
    graph = graph or RevealedGraph(data)
    out = []
    n = 0
    for s, o in enumerate(data.observations):
        chosen = o.chosen_set()
        for yi in o.chosen:
            y = (o.menu[yi], o.categories[yi])
            for xi, xp in enumerate(o.menu):
                if xi in chosen:
                    continue
                n += 1
                x = (xp, o.categories[xi])
                if graph.reaches(x, y):
                    out.append({"observation": s, "x": [list(x[0]), x[1]],
                                "y": [list(y[0]), y[1]], "chain": graph.chain(x, y)})
                    if limit is not None and len(out) >= limit:
                        return SarpReport(tuple(out), n)
    return SarpReport(tuple(out), n)


def replay_violation(data: ChoiceDataset, v: Mapping[str, Any]) -> bool:
    """Recheck a violation from the cited observations alone."""
    def node(d: Sequence[Any]) -> Node:
        return (as_alternative(d[0], SIGNED), int(d[1]))

    o = data.observations[int(v["observation"])]
    x, y = node(v["x"]), node(v["y"])
    pos = {(p, k): i for i, (p, k) in enumerate(zip(o.menu, o.categories))}
    if x not in pos or y not in pos:
        return False
    if pos[y] not in o.chosen_set() or pos[x] in o.chosen_set():
        return False
    chain = v["chain"]
    if not chain or node(chain[0]["from"]) != x or node(chain[-1]["to"]) != y:
        return False
    for a, b in zip(chain, chain[1:]):
        if node(a["to"]) != node(b["from"]):
            return False
    for step in chain:
        src, dst = node(step["from"]), node(step["to"])
        ob = data.observations[int(step["observation"])]
        members = list(zip(ob.menu, ob.categories))
        if src not in members or dst not in members:
            return False
        if members.index(src) not in ob.chosen_set():
            return False
    return True


def warp_violations(data: ChoiceDataset) -> list[tuple[int, int]]:
    """Pairs of observations reversing a choice under identical categorizations."""
    seen: dict[tuple[Node, Node], int] = {}
    out = []
    for s, o in enumerate(data.observations):
        chosen = o.chosen_set()
        nodes = list(zip(o.menu, o.categories))
        for i in o.chosen:
            for j in range(len(o.menu)):
                if j in chosen:
                    continue
                seen.setdefault((nodes[i], nodes[j]), s)
    for (a, b), s in seen.items():
        if (b, a) in seen:
            out.append((s, seen[(b, a)]))
    return sorted(set(tuple(sorted(p)) for p in out))


# ---------------------------------------------------------------------------
# Identification from choice


def balanced_cluster(r: Alternative, extra: Sequence[Alternative], eps: float,
                     domain_ok: Callable[[Alternative], bool], size: int = 8,
                     max_size: int = 256, phase: float = 0.3) -> list[Alternative]:
    """Points on a circle of radius ``eps`` whose union with ``extra`` averages to ``r``.

    The circle's centre solves the balance condition exactly; if it leaves
    the domain, the cluster doubles in size, which pulls the centre to ``r``.
    """
    m = size
    while m <= max_size:
        cx = ((m + len(extra)) * r[0] - math.fsum(p[0] for p in extra)) / m
        cy = ((m + len(extra)) * r[1] - math.fsum(p[1] for p in extra)) / m
        pts = [(cx + eps * math.cos(phase + 2 * math.pi * j / m),
                cy + eps * math.sin(phase + 2 * math.pi * j / m)) for j in range(m)]
        if all(domain_ok(p) for p in pts):
            return pts
        m *= 2
    achieved = math.dist(r, _mean(list(extra) + [r]))
    raise ConstructionError(
        f"no balanced cluster of at most {max_size} points fits the domain "
        f"(reference would sit {achieved:.3g} from target)")


def linear_candidates(w: float) -> tuple[Callable[[Alternative], float], Callable[[Alternative], float]]:
    """Category utilities ``w x1 + (1-w) x2`` and ``(1-w) x1 + w x2``."""
    return (lambda x: w * x[0] + (1 - w) * x[1], lambda x: (1 - w) * x[0] + w * x[1])


def _level_direction(u: Callable[[Alternative], float], y: Alternative, h: float) -> Alternative:
    g1 = (u((y[0] + h, y[1])) - u((y[0] - h, y[1]))) / (2 * h)
    g2 = (u((y[0], y[1] + h)) - u((y[0], y[1] - h))) / (2 * h)
    n = math.hypot(g1, g2)
    if n == 0:
        raise ConstructionError(f"flat candidate utility at {y}")
    return (-g2 / n, g1 / n)


def _on_level(u: Callable[[Alternative], float], y: Alternative, step: float,
              h: float) -> Alternative:
    """A point about ``step`` along ``u``'s level set through ``y``."""
    d = _level_direction(u, y, h)
    p = (y[0] + step * d[0], y[1] + step * d[1])
    target = u(y)
    for _ in range(50):
        g = (-d[1], d[0])
        slope = (u((p[0] + h * g[0], p[1] + h * g[1])) - u((p[0] - h * g[0], p[1] - h * g[1]))) / (2 * h)
        if slope == 0:
            break
        t = (target - u(p)) / slope
        p = (p[0] + t * g[0], p[1] + t * g[1])
        if abs(u(p) - target) <= 1e-14 * max(1.0, abs(target)):
            break
    return p


def _reduce(y: Alternative, r: Alternative) -> tuple[Alternative, Alternative] | None:
    """Map ``(y, r)`` to an equivalent pair with ``y >> r`` via symmetry."""
    above = (y[0] > r[0], y[1] > r[1])
    below = (y[0] < r[0], y[1] < r[1])
    if all(above):
        return y, r
    if above[0] and below[1]:
        return (y[0], r[1]), (r[0], y[1])
    if below[0] and above[1]:
        return (r[0], y[1]), (y[0], r[1])
    if all(below):
        return r, y
    return None


def identify_from_choice(choose_oracle: Callable[[Menu], Any], gen: ReferenceGenerator,
                         r: Sequence[float], grid: Grid,
                         candidates: Sequence[Callable[[Alternative], float]] | None = None,
                         w: float = 0.6, eps: float | None = None,
                         probe_step: float | None = None,
                         domain_ok: Callable[[Alternative], bool] | None = None) -> RegionMap:
    """Categories revealed by whether level-set partners are chosen together.

    For each grid point ``y`` (reduced to ``y >> r`` by symmetry), menus hold
    a balanced cluster averaging to the reference plus ``y`` and a partner
    ``y'`` on category ``k``'s level set through ``y``. ``y`` is labelled
    ``k`` when every probe chooses exactly ``{y, y'}``, the other category
    when none does, Boundary when probes disagree, and Ambiguous when both
    candidates share a level set at ``y``.
    """
    if not gen.strong_generalized_average:
        raise ConstructionError(f"generator {gen.name!r} is not a strong generalized average")
    r = tuple(float(v) for v in r)
    cands = tuple(candidates) if candidates is not None else linear_candidates(w)
    if len(cands) != 2:
        raise ConstructionError("identification from choice needs two candidate utilities")
    eps = eps if eps is not None else 0.01 * math.hypot(*r)
    probe_step = probe_step if probe_step is not None else min(0.1 * grid.spacing, 0.05)
    domain_ok = domain_ok or (lambda p: p[0] > 0 and p[1] > 0)
    h = 1e-6
    labels = np.zeros((grid.ny, grid.nx), dtype=int)
    for iy, ix, y0 in grid.points():
        red = _reduce(y0, r)
        if red is None:
            labels[iy, ix] = BOUNDARY_LABEL
            continue
        y, ref = red
        k = 1 if cands[0](ref) >= cands[1](ref) else 2
        uk, uo = cands[k - 1], cands[2 - k]
        dk, do = _level_direction(uk, y, h), _level_direction(uo, y, h)
        if abs(dk[0] * do[1] - dk[1] * do[0]) <= 1e-4:
            labels[iy, ix] = AMBIGUOUS_LABEL
            continue
        outcomes = []
        for step in (probe_step, -probe_step, 0.5 * probe_step, -0.5 * probe_step):
            yp = _on_level(uk, y, step, h)
            if not domain_ok(yp):
                continue
            cluster = balanced_cluster(ref, [y, yp], eps, domain_ok)
            got = choose_oracle(Menu.of(cluster + [y, yp]))
            if got is UNCATEGORIZED:
                outcomes.append(None)
                continue
            outcomes.append(set(got) == {y, yp})
        if not outcomes or None in outcomes:
            labels[iy, ix] = BOUNDARY_LABEL
        elif all(outcomes):
            labels[iy, ix] = k
        elif not any(outcomes):
            labels[iy, ix] = 3 - k
        else:
            labels[iy, ix] = BOUNDARY_LABEL
    return RegionMap(grid, labels, r, "choice")
