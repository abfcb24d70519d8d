"""Model-spec JSON files.

Example::

    {
      "generator": {"kind": "pareto2", "gamma": 2},
      "model": {"type": "gk", "alpha": 2, "beta": 1},
      "numeric": {"epsabs": 1e-10, "epsrel": 1e-8},
      "seed": 42
    }

A general TTE model uses ``{"type": "tte", "baseline1": {...}, "baseline2":
{...}}`` with baselines ``{"kind": "exponential", "rate": r}`` or
``{"kind": "generator"}`` (baseline survival equal to the generator).
New baseline families plug in through :data:`BASELINE_KINDS`.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from ._numerics import DEFAULT_QUAD, QuadratureCfg
from .errors import DomainError
from .generators import CATALOG, GeneratorSpec
from .model import (
    GKParams, TTEModel, exponential_baseline, generator_baseline, gk_as_tte,
)

GENERATOR_PARAMS = {
    "exponential": (),
    "pareto2": ("gamma",),
    "trunc_normal": (),
    "translated_erlang": (),
    "gumbel_barnett": ("theta",),
}
BASELINE_KINDS = {
    "exponential": (("rate",), lambda G, p: exponential_baseline(p["rate"])),
    "generator": ((), lambda G, p: generator_baseline(G)),
}
TOP_KEYS = {"generator", "model", "numeric", "seed"}
NUMERIC_KEYS = {"epsabs", "epsrel", "limit", "support_cutoff"}


class SpecError(DomainError):
    def __init__(self, message, line=None, column=None, source="<spec>"):
        where = f"{source}"
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ModelSpec:
    model: TTEModel
    quad: QuadratureCfg
    seed: Optional[int]
    raw: dict

    @property
    def generator(self) -> GeneratorSpec:
        return self.model.generator


def _locate(text: str, key: str):
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not match:
        return None, None
    line = text.count("\n", 0, match.start()) + 1
    column = match.start() - (text.rfind("\n", 0, match.start()) + 1) + 1
    return line, column


class _Parser:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def fail(self, message, key=None):
        line, col = _locate(self.text, key) if key else (None, None)
        raise SpecError(message, line, col, self.source)

    def section(self, obj, path, allowed, required=()):
        if not isinstance(obj, dict):
            self.fail(f"{path} must be an object", path.split(".")[-1])
        for key in obj:
            if key not in allowed:
                self.fail(f"unknown key {path}.{key}", key)
        for key in required:
            if key not in obj:
                self.fail(f"missing key {path}.{key}", path.split(".")[-1])
        return obj

    def number(self, obj, key, path):
        val = obj[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(f"{path}.{key} must be a number", key)
        return float(val)

    def generator(self, obj) -> GeneratorSpec:
        if not isinstance(obj, dict) or "kind" not in obj:
            self.fail("generator section needs a kind", "generator")
        kind = obj["kind"]
        if kind not in GENERATOR_PARAMS:
            self.fail(f"unknown generator kind {kind!r}; expected one of "
                      f"{sorted(GENERATOR_PARAMS)}", "kind")
        params = GENERATOR_PARAMS[kind]
        self.section(obj, "generator", {"kind", *params}, params)
        values = [self.number(obj, p, "generator") for p in params]
        try:
            return CATALOG[kind](*values)
        except DomainError as exc:
            self.fail(str(exc), params[0] if params else "kind")

    def baseline(self, G, obj, name):
        if not isinstance(obj, dict) or "kind" not in obj:
            self.fail(f"model.{name} needs a kind", name)
        kind = obj["kind"]
        if kind not in BASELINE_KINDS:
            self.fail(f"unknown baseline kind {kind!r} in model.{name}", name)
        params, build = BASELINE_KINDS[kind]
        self.section(obj, f"model.{name}", {"kind", *params}, params)
        values = {p: self.number(obj, p, f"model.{name}") for p in params}
        try:
            return build(G, values)
        except DomainError as exc:
            self.fail(str(exc), name)

    def model(self, G, obj) -> TTEModel:
        if not isinstance(obj, dict) or "type" not in obj:
            self.fail("model section needs a type", "model")
        if obj["type"] == "gk":
            self.section(obj, "model", {"type", "alpha", "beta"}, ("alpha", "beta"))
            try:
                return gk_as_tte(G, GKParams(self.number(obj, "alpha", "model"),
                                             self.number(obj, "beta", "model")))
            except DomainError as exc:
                self.fail(str(exc), "alpha")
        if obj["type"] == "tte":
            self.section(obj, "model", {"type", "baseline1", "baseline2"},
                         ("baseline1", "baseline2"))
            return TTEModel(G, self.baseline(G, obj["baseline1"], "baseline1"),
                            self.baseline(G, obj["baseline2"], "baseline2"))
        self.fail(f"unknown model type {obj['type']!r}; expected 'gk' or 'tte'", "type")

    def numeric(self, obj):
        self.section(obj, "numeric", NUMERIC_KEYS)
        quad = DEFAULT_QUAD
        kw = {}
        for key in ("epsabs", "epsrel"):
            if key in obj:
                kw[key] = self.number(obj, key, "numeric")
        if "limit" in obj:
            kw["limit"] = int(self.number(obj, "limit", "numeric"))
        if kw:
            quad = dataclasses.replace(quad, **kw)
        cutoff = self.number(obj, "support_cutoff", "numeric") if "support_cutoff" in obj else None
        return quad, cutoff

    def parse(self) -> ModelSpec:
        try:
            raw = json.loads(self.text)
        except json.JSONDecodeError as exc:
            raise SpecError(exc.msg, exc.lineno, exc.colno, self.source) from None
        self.section(raw, "spec", TOP_KEYS, ("generator", "model"))
        G = self.generator(raw["generator"])
        quad, cutoff = self.numeric(raw.get("numeric", {}))
        if cutoff is not None:
            if not cutoff > 0:
                self.fail("numeric.support_cutoff must be positive", "support_cutoff")
            G = dataclasses.replace(G, support_hint=cutoff)
        model = self.model(G, raw["model"])
        seed = raw.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            self.fail("seed must be an integer", "seed")
        return ModelSpec(model, quad, seed, raw)


def parse_model_spec(text: str, source: str = "<spec>") -> ModelSpec:
    return _Parser(text, source).parse()


def load_model_spec(path) -> ModelSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc.strerror}", source=str(path)) from None
    return parse_model_spec(text, str(path))


def spec_dict(generator: dict, model: dict, **extra: Any) -> dict:
    out = {"generator": generator, "model": model}
    out.update(extra)
    return out
