"""Build models from preset names or JSON configuration dictionaries."""

from __future__ import annotations

import json
import os
from typing import Any, Callable

from ctm import models
from ctm.core import Box
from ctm.errors import ConstructionError
from ctm.expr import compile_expression
from ctm.models import ReferenceModel, ScalarUtility, get_utility
from ctm.salience import get_salience

PRESETS = ("neoclassical", "bgs", "bgs-wine", "tk", "mo", "pt", "qh", "ria", "rddp", "cbgs")

_COMMON = {"model", "box"}
_FIELDS = {
    "neoclassical": {"u", "u1", "u2"},
    "bgs": {"u", "u1", "u2", "w", "weights", "salience", "signed", "ref_box"},
    "bgs-wine": set(),
    "tk": {"u", "u1", "u2", "lam1", "lam2", "lambda"},
    "mo": {"u", "u1", "u2", "c", "frontier"},
    "pt": {"prototypes", "slopes", "hedonic", "ref_box"},
    "qh": {"u", "beta", "delta"},
    "ria": {"alpha", "beta"},
    "rddp": {"lambda", "delta"},
    "cbgs": {"categories", "salience", "base"},
}


def _box(value: Any) -> Box | None:
    if value is None:
        return None
    if isinstance(value, str):
        value = [float(v) for v in value.split(",")]
    if len(value) != 4:
        raise ConstructionError(f"a box needs four numbers, got {value!r}")
    return Box(*(float(v) for v in value))


def _utilities(cfg: dict) -> tuple[ScalarUtility, ScalarUtility]:
    both = cfg.get("u", "linear")
    return get_utility(cfg.get("u1", both)), get_utility(cfg.get("u2", both))


def _expression(source: str, variables: tuple[str, ...]) -> Callable[..., float]:
    try:
        return compile_expression(source, variables)
    except ConstructionError:
        raise
    except Exception as exc:
        raise ConstructionError(f"bad expression {source!r}: {exc}") from exc


def build_model(config: dict | str) -> ReferenceModel:
    """Construct a model from a preset name or a config dictionary.

    The dictionary's ``"model"`` key names the family; other keys are that
    family's parameters. Unknown keys are rejected.
    """
    cfg = {"model": config} if isinstance(config, str) else dict(config)
    name = cfg.get("model")
    if name not in _FIELDS:
        raise ConstructionError(f"unknown model {name!r}; choose from {', '.join(PRESETS)}")
    unknown = set(cfg) - _COMMON - _FIELDS[name]
    if unknown:
        raise ConstructionError(f"unknown keys for {name}: {sorted(unknown)}")
    box = _box(cfg.get("box"))
    try:
        return _build(name, cfg, box)
    except (TypeError, KeyError) as exc:
        raise ConstructionError(f"bad parameters for {name}: {exc}") from exc


def _build(name: str, cfg: dict, box: Box | None) -> ReferenceModel:
    if name == "neoclassical":
        u1, u2 = _utilities(cfg)
        return models.neoclassical(u1, u2, box=box)
    if name == "bgs-wine":
        return models.bgs(0.6, signed=True, box=box)
    if name == "bgs":
        u1, u2 = _utilities(cfg)
        signed = bool(cfg.get("signed", False))
        sigma = get_salience(cfg["salience"], signed) if "salience" in cfg else None
        return models.bgs(cfg.get("w", 0.6), weights=cfg.get("weights"), sigma=sigma,
                          u1=u1, u2=u2, signed=signed, box=box,
                          ref_box=_box(cfg.get("ref_box")))
    if name == "tk":
        u1, u2 = _utilities(cfg)
        lam = float(cfg.get("lambda", 2.0))
        return models.tk(float(cfg.get("lam1", lam)), float(cfg.get("lam2", lam)),
                         u1, u2, box=box)
    if name == "mo":
        u1, u2 = _utilities(cfg)
        source = cfg.get("frontier", "x1/2 + x2")
        frontier = _expression(source, ("x1", "x2"))
        return models.mo(float(cfg.get("c", 1.0)), frontier, u1, u2, box=box,
                         frontier_name=source)
    if name == "pt":
        hedonic = _expression(cfg["hedonic"], ("x1", "x2")) if "hedonic" in cfg else None
        kwargs: dict[str, Any] = {}
        if "prototypes" in cfg:
            kwargs["prototypes"] = [tuple(map(float, p)) for p in cfg["prototypes"]]
        if "slopes" in cfg:
            kwargs["slopes"] = [tuple(map(float, s)) for s in cfg["slopes"]]
        return models.pt(hedonic=hedonic, box=box, ref_box=_box(cfg.get("ref_box")), **kwargs)
    if name == "qh":
        return models.qh(float(cfg.get("beta", 0.8)), float(cfg.get("delta", 0.95)),
                         get_utility(cfg.get("u", "linear")), box=box)
    if name == "ria":
        return models.ria(float(cfg.get("alpha", 0.5)), float(cfg.get("beta", 0.25)), box=box)
    if name == "rddp":
        return models.rddp(float(cfg.get("lambda", 0.5)), float(cfg.get("delta", 0.5)), box=box)
    sigma = get_salience(cfg.get("salience", "bgs"))
    return models.cbgs(cfg.get("categories", "salience"), sigma,
                       float(cfg.get("base", 1.0)), box=box)


def load_config(spec: str) -> dict:
    """Read a preset name or a JSON config file into a config dictionary."""
    if spec in _FIELDS:
        return {"model": spec}
    if not os.path.isfile(spec):
        raise ConstructionError(f"{spec!r} is neither a preset nor a config file")
    with open(spec, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConstructionError(f"{spec}: invalid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConstructionError(f"{spec}: config must be a JSON object")
    return cfg


def load_model(spec: str) -> ReferenceModel:
    return build_model(load_config(spec))
