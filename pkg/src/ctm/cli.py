"""Command-line entry point: ``ctm <command> [options]``.

Exit codes: 0 on success, 2 when a check fails and its witness has been
written, 1 on usage or domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Any, Sequence

import numpy as np

from ctm import __version__
from ctm.axioms import AXIOMS, check_axiom, model_comparison_table
from ctm.choice import (ChoiceDataset, MenuSampler, check_category_sarp, choice_oracle,
                        corrupt_dataset, get_generator, identify_from_choice,
                        linear_candidates, replay_violation, simulate_dataset)
from ctm.core import BOUNDARY, Box, Verdict
from ctm.errors import ArityError, CtmError, PreconditionError
from ctm.identify import (Grid, candidates_from_model, identify_bgs, identify_by_discontinuity,
                          identify_local, label_by_jumps, model_oracle, ray_directions,
                          value_oracle)
from ctm.models import CtmModel, trace_indifference
from ctm.presets import build_model, load_config
from ctm.salience import (categories_from_salience, check_S_properties,
                          check_salience_properties, get_salience)
from ctm.sampling import SampleBudget

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Argument helpers


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two numbers a,b, got {text!r}") from None
    return a, b


def _box(text: str) -> Box:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        vals = []
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected x0,y0,x1,y1, got {text!r}")
    try:
        return Box(*vals)
    except CtmError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 2 or h < 2:
        raise argparse.ArgumentTypeError("grid dimensions must be at least 2")
    return w, h


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        n = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _axiom_names(text: str) -> list[str]:
    if text.lower() == "all":
        return list(AXIOMS)
    lookup = {a.lower(): a for a in AXIOMS}
    out = []
    for part in text.split(","):
        key = part.strip().lower()
        if key not in lookup:
            raise argparse.ArgumentTypeError(
                f"unknown axiom {part!r}; choose from {', '.join(AXIOMS)} or all")
        out.append(lookup[key])
    return out


# ---------------------------------------------------------------------------
# Output


def _jsonable(obj: Any) -> Any:
    if obj is BOUNDARY:
        return "Boundary"
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    return str(obj)


def _dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _envelope(command: str, seed: int | None, config: Any, **body: Any) -> dict[str, Any]:
    return {"tool": "ctm", "version": __version__, "command": command, "seed": seed,
            "config": config, **body}


def _seed(args: argparse.Namespace) -> int:
    env = os.environ.get("CTM_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"CTM_SEED must be an integer, got {env!r}") from None
    return args.seed


def _model(spec: str) -> tuple[dict, Any]:
    cfg = load_config(spec)
    return cfg, build_model(cfg)


def _say(args: argparse.Namespace, line: str) -> None:
    # Summaries go to stderr when the artifact itself is on stdout.
    stream = sys.stdout if getattr(args, "out", None) else sys.stderr
    print(line, file=stream)


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args: argparse.Namespace) -> int:
    seed = _seed(args)
    cfg, model = _model(args.model)
    budget = SampleBudget(args.budget, seed, args.tolerance)
    reports = []
    failed = False
    for axiom in args.axiom:
        try:
            rep = check_axiom(model, axiom, budget)
        except (ArityError, PreconditionError) as exc:
            reports.append({"axiom": axiom, "model": model.name,
                            "verdict": Verdict.not_tested().to_dict(),
                            "reason": str(exc) or type(exc).__name__})
            _say(args, f"{axiom}: NOT_TESTED")
            continue
        entry = rep.to_dict()
        if rep.verdict.failed:
            failed = True
            entry["replay"] = {"axiom": axiom, "witness": rep.witness,
                               "reproduces": rep.replay(model)}
        reports.append(entry)
        _say(args, f"{axiom}: {rep.verdict}")
    doc = _envelope("check", seed, cfg, budget=args.budget, tolerance=args.tolerance,
                    status="FAIL" if failed else "PASS", reports=reports)
    _emit(_dumps(doc), args.out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    seed = _seed(args)
    specs = [s.strip() for s in args.models.split(",") if s.strip()]
    if not specs:
        raise UsageError("--models needs at least one model")
    configs, built = [], []
    for spec in specs:
        cfg, model = _model(spec)
        configs.append(cfg)
        built.append(model)
    table = model_comparison_table(built, SampleBudget(args.budget, seed, args.tolerance))
    _say(args, table.render())
    doc = _envelope("table", seed, configs, budget=args.budget, tolerance=args.tolerance,
                    table=table.to_dict(),
                    matrix={"rows": list(table.rows), "models": list(table.models),
                            "holds": table.matrix()})
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_identify(args: argparse.Namespace) -> int:
    cfg, model = _model(args.model)
    box = args.box or model.box
    if box is None:
        raise UsageError("--box is required for a model without a default box")
    grid = Grid(box, *args.grid)
    r = args.reference
    extra: dict[str, Any] = {}
    if args.method == "local":
        rmap = identify_local(model_oracle(model), r, grid, candidates_from_model(model, r),
                              args.probe_radius)
    elif args.method == "bgs":
        rmap = identify_bgs(model_oracle(model), r, grid, args.probe_radius)
    else:
        step = args.step if args.step is not None else box.diameter / 400
        frontier = identify_by_discontinuity(
            value_oracle(model), r, ray_directions(args.rays), step, box,
            origin=args.origin, jump_threshold=args.jump_threshold)
        rmap = label_by_jumps(value_oracle(model), r, grid, step, args.origin,
                              args.jump_threshold)
        extra = {"frontier": [list(p) for p in frontier], "rays": args.rays, "step": step,
                 "origin": list(args.origin) if args.origin else list(r)}
    _say(args, f"{args.method}: labels {rmap.counts()}")
    doc = _envelope("identify", None, cfg, method=args.method, region_map=rmap.to_dict(),
                    **extra)
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_identify_choice(args: argparse.Namespace) -> int:
    cfg, model = _model(args.model)
    gen = get_generator(args.generator)
    box = args.box or model.box
    if box is None:
        raise UsageError("--box is required for a model without a default box")
    grid = Grid(box, *args.grid)
    rmap = identify_from_choice(choice_oracle(model, gen), gen, args.reference, grid,
                                linear_candidates(args.w), eps=args.eps)
    _say(args, f"choice: labels {rmap.counts()}")
    doc = _envelope("identify-choice", None, cfg, generator=gen.name, w=args.w,
                    region_map=rmap.to_dict())
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    seed = _seed(args)
    cfg, model = _model(args.model)
    gen = get_generator(args.generator)
    box = args.box or model.box
    if box is None:
        raise UsageError("--box is required for a model without a default box")
    sampler = MenuSampler(box, args.min_size, args.max_size, args.pool_size)
    data = simulate_dataset(model, gen, sampler, args.n, seed)
    if args.corrupt:
        data, picked = corrupt_dataset(data, args.corrupt, seed)
        _say(args, f"corrupted {len(picked)} observations")
    meta = dict(data.metadata, tool="ctm", version=__version__, config=cfg)
    data = ChoiceDataset(data.generator, data.observations, meta)
    _say(args, f"simulated {len(data)} observations")
    _emit(json.dumps(data.to_dict(), sort_keys=True, default=_jsonable) + "\n", args.out)
    return EXIT_OK


def cmd_sarp(args: argparse.Namespace) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            data = ChoiceDataset.from_json(fh.read())
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"{args.input}: not a choice dataset ({exc})") from None
    report = check_category_sarp(data, limit=args.limit)
    violations = [dict(v, reproduces=replay_violation(data, v)) for v in report.violations]
    _say(args, f"SARP: {'PASS' if report.passed else 'FAIL'} "
               f"({len(violations)} violations, {report.n_checked} checked)")
    doc = _envelope("sarp", None, {"input": os.path.basename(args.input),
                                   "generator": data.generator, "limit": args.limit},
                    status="PASS" if report.passed else "FAIL", n=report.n_checked,
                    observations=len(data), violations=violations)
    _emit(_dumps(doc), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_curves(args: argparse.Namespace) -> int:
    cfg, model = _model(args.model)
    if not isinstance(model, CtmModel):
        raise UsageError(f"curves need a categorical model, got {model.name}")
    window = args.box or model.box
    if window is None:
        raise UsageError("--box is required for a model without a default box")
    step = args.step if args.step is not None else window.diameter / 400
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["segment_id", "category", "x1", "x2"])
    seg = 0
    for level in args.levels:
        for line in trace_indifference(model, args.reference, level, window, step):
            for p in line.points:
                writer.writerow([seg, line.category, repr(p[0]), repr(p[1])])
            seg += 1
    _say(args, f"{seg} segments at levels {args.levels}")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_salience(args: argparse.Namespace) -> int:
    seed = _seed(args)
    sigma = get_salience(args.salience, args.signed)
    budget = SampleBudget(args.budget, seed, args.tolerance)
    base = check_salience_properties(sigma, budget)
    catfn = categories_from_salience(sigma, domain_box=args.box or Box.square(0.1, 10.0))
    props = check_S_properties(catfn, budget)
    for name, v in {**base.verdicts, **props.verdicts}.items():
        _say(args, f"{name}: {v}")
    failed = not (base.passed and props.passed)
    doc = _envelope("salience", seed, {"salience": args.salience, "signed": args.signed},
                    budget=args.budget, tolerance=args.tolerance,
                    status="FAIL" if failed else "PASS",
                    salience_properties=base.to_dict(), category_properties=props.to_dict())
    _emit(_dumps(doc), args.out)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctm", description="Categorical reference-dependent choice toolkit.")
    p.add_argument("--version", action="version", version=f"ctm {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp: argparse.ArgumentParser, seed: bool = True, budget: bool = False) -> None:
        sp.add_argument("--out", help="output file (default: standard output)")
        sp.add_argument("--threads", type=_positive_int, default=1,
                        help="worker cap (accepted; execution is serial)")
        if seed:
            sp.add_argument("--seed", type=int, default=0,
                            help="random seed (CTM_SEED overrides)")
        if budget:
            sp.add_argument("--budget", type=_positive_int, default=10_000,
                            help="number of sampled configurations per check")
            sp.add_argument("--tolerance", type=float, default=1e-9)

    sp = sub.add_parser("check", help="search for axiom violations")
    sp.add_argument("--model", required=True, help="preset name or JSON config file")
    sp.add_argument("--axiom", type=_axiom_names, default=list(AXIOMS),
                    help="axiom name, comma list, or all")
    common(sp, budget=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("table", help="model comparison table")
    sp.add_argument("--models", default="neoclassical,bgs,tk,mo,pt",
                    help="comma-separated presets or config files")
    common(sp, budget=True)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("identify", help="recover categories from a preference oracle")
    sp.add_argument("--model", required=True)
    sp.add_argument("--method", choices=("local", "bgs", "discontinuity"), default="local")
    sp.add_argument("--reference", type=_pair, required=True)
    sp.add_argument("--grid", type=_grid, default=(50, 50))
    sp.add_argument("--box", type=_box)
    sp.add_argument("--probe-radius", type=float)
    sp.add_argument("--rays", type=_positive_int, default=64)
    sp.add_argument("--step", type=float, help="ray step (discontinuity)")
    sp.add_argument("--origin", type=_pair, help="ray origin (discontinuity)")
    sp.add_argument("--jump-threshold", type=float, default=5.0)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_identify)

    sp = sub.add_parser("identify-choice", help="recover categories from a choice oracle")
    sp.add_argument("--model", required=True)
    sp.add_argument("--generator", default="mean")
    sp.add_argument("--reference", type=_pair, required=True)
    sp.add_argument("--grid", type=_grid, default=(30, 30))
    sp.add_argument("--box", type=_box)
    sp.add_argument("--w", type=float, default=0.6, help="candidate salience weight")
    sp.add_argument("--eps", type=float, help="balanced cluster radius")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_identify_choice)

    sp = sub.add_parser("simulate", help="simulate a choice dataset")
    sp.add_argument("--model", required=True)
    sp.add_argument("--generator", default="mean")
    sp.add_argument("--n", type=_positive_int, default=1000)
    sp.add_argument("--box", type=_box)
    sp.add_argument("--min-size", type=_positive_int, default=3)
    sp.add_argument("--max-size", type=_positive_int, default=6)
    sp.add_argument("--pool-size", type=_positive_int, default=40)
    sp.add_argument("--corrupt", type=float, default=0.0,
                    help="fraction of observations to corrupt")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sarp", help="check a dataset for category SARP violations")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--limit", type=_positive_int)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_sarp)

    sp = sub.add_parser("curves", help="indifference curves as CSV polylines")
    sp.add_argument("--model", required=True)
    sp.add_argument("--reference", type=_pair, required=True)
    sp.add_argument("--levels", type=_floats, required=True)
    sp.add_argument("--box", type=_box)
    sp.add_argument("--step", type=float, help="sampling step of the contour grid")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("salience", help="check a salience function's properties")
    sp.add_argument("--salience", required=True, help="built-in id or expression in a, b")
    sp.add_argument("--signed", action="store_true")
    sp.add_argument("--box", type=_box)
    common(sp, budget=True)
    sp.set_defaults(func=cmd_salience)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CtmError, ValueError, OSError) as exc:
        print(f"ctm: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
