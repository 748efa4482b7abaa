"""Scenario documents (YAML or JSON) in, JSON report documents out."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import __version__
from .cases import ForestParams, forest_scenario, forest_technology
from .model import (Action, AffineFamily, AmbiguitySet, ConstantFamily, GeneralFamily,
                    GridConfig, LinearFamily, OutputSpec, Scenario, Technology,
                    validate_scenario)

TOOL = "robust-contracts"


class ScenarioError(ValueError):
    """A scenario document that does not parse to a valid scenario."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        where = path or "<document>"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{where}: {message}")


# --------------------------------------------------------------------------- #
# parsing
# --------------------------------------------------------------------------- #


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads ``1e-09`` style floats (YAML 1.2 / JSON)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)[eE][-+]?[0-9]+$"),
    list("-+0123456789."))


def parse_text(text: str):
    return yaml.load(text, Loader=_Loader)


def _line_index(text: str) -> dict[str, int]:
    """Map field paths like ``types[0].actions[1].cost`` to 1-based source lines."""
    try:
        root = yaml.compose(text, Loader=_Loader)
    except yaml.YAMLError:
        return {}
    out: dict[str, int] = {}

    def walk(node, path):
        if node is None:
            return
        out.setdefault(path, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = f"{path}.{k.value}" if path else str(k.value)
                out[key] = k.start_mark.line + 1
                walk(v, key)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, f"{path}[{i}]")

    walk(root, "")
    return out


class _Reader:
    def __init__(self, lines: dict[str, int]):
        self.lines = lines

    def fail(self, path: str, message: str):
        line = None
        p = path
        while p and line is None:
            line = self.lines.get(p)
            p = p.rsplit(".", 1)[0] if "." in p else (p.rsplit("[", 1)[0] if "[" in p else "")
        raise ScenarioError(message, path, line)

    def get(self, obj, key, path, kind=None, default=...):
        if not isinstance(obj, dict):
            self.fail(path, "expected a mapping")
        if key not in obj:
            if default is ...:
                self.fail(f"{path}.{key}" if path else key, "missing required field")
            return default
        val = obj[key]
        sub = f"{path}.{key}" if path else key
        if kind is float:
            return self.num(val, sub)
        if kind is int:
            if isinstance(val, bool) or not isinstance(val, int):
                self.fail(sub, f"expected an integer, got {val!r}")
        if kind is list and not isinstance(val, list):
            self.fail(sub, "expected a list")
        if kind is dict and not isinstance(val, dict):
            self.fail(sub, "expected a mapping")
        return val

    def num(self, val, path) -> float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(path, f"expected a number, got {val!r}")
        return float(val)


def _curve_technology(r: _Reader, tid: str, spec: dict, path: str, steps: int) -> Technology:
    kind = r.get(spec, "kind", path)
    if kind == "samples":
        costs = [r.num(v, f"{path}.costs[{i}]") for i, v in enumerate(r.get(spec, "costs", path, list))]
        outs = [r.num(v, f"{path}.outputs[{i}]") for i, v in enumerate(r.get(spec, "outputs", path, list))]
        if len(costs) != len(outs):
            r.fail(path, "costs and outputs differ in length")
        return Technology.from_samples(tid, costs, outs)
    if kind == "forest":
        p = r.get(spec, "params", path, dict)
        try:
            params = ForestParams(**{k: r.num(v, f"{path}.params.{k}") for k, v in p.items()})
        except (TypeError, ValueError) as exc:
            r.fail(f"{path}.params", str(exc))
        cap = r.get(spec, "cost_cap", path, float, None)
        return forest_technology(params, tid, steps, cap)
    if kind == "terms":
        cap = r.get(spec, "cost_cap", path, float)
        terms = r.get(spec, "terms", path, list)
        funcs = {"sin": np.sin, "cos": np.cos, "sqrt": np.sqrt, "log1p": np.log1p}
        parsed = []
        for i, term in enumerate(terms):
            tp = f"{path}.terms[{i}]"
            coef = r.get(term, "coef", tp, float)
            if "power" in term:
                parsed.append((coef, r.get(term, "power", tp, float), None))
            else:
                fn = r.get(term, "func", tp)
                if fn not in funcs:
                    r.fail(f"{tp}.func", f"unknown function {fn!r}; expected one of {sorted(funcs)}")
                parsed.append((coef, None, funcs[fn]))

        def g(c):
            total = np.zeros_like(c)
            for coef, power, fn in parsed:
                total = total + coef * (c ** power if fn is None else fn(c))
            return total

        return Technology.from_curve(tid, g, cap, steps)
    r.fail(f"{path}.kind", f"unknown curve kind {kind!r}; expected samples, forest or terms")


def _action(r: _Reader, a: dict, path: str) -> Action:
    cost = r.get(a, "cost", path, float)
    if "output" in a and "dist" in a:
        r.fail(path, "give either output or dist, not both")
    if "output" in a:
        return Action(cost, OutputSpec.deterministic(r.get(a, "output", path, float)))
    dist = r.get(a, "dist", path, list)
    pairs = [(r.get(d, "y", f"{path}.dist[{i}]", float), r.get(d, "p", f"{path}.dist[{i}]", float))
             for i, d in enumerate(dist)]
    try:
        return Action(cost, OutputSpec.distribution(pairs))
    except ValueError as exc:
        r.fail(f"{path}.dist", str(exc))


def _ambiguity(r: _Reader, spec: dict | None, types: list[str]) -> AmbiguitySet:
    if spec is None:
        return AmbiguitySet.all_deltas(types)
    variant = r.get(spec, "variant", "ambiguity")
    members = r.get(spec, "members", "ambiguity", default=None)
    path = "ambiguity.members"
    try:
        if variant in ("all_deltas", "full_simplex"):
            ids = [str(t) for t in (members if members is not None else types)]
            unknown = [t for t in ids if t not in types]
            if unknown:
                r.fail(path, f"unknown types {unknown}")
            maker = AmbiguitySet.all_deltas if variant == "all_deltas" else AmbiguitySet.full_simplex
            return maker(ids)
        if variant == "singleton":
            if not isinstance(members, dict):
                r.fail(path, "singleton ambiguity needs a {type: weight} mapping")
            dist = {str(t): r.num(w, f"{path}.{t}") for t, w in members.items()}
            unknown = [t for t in dist if t not in types]
            if unknown:
                r.fail(path, f"unknown types {unknown}")
            return AmbiguitySet.singleton(dist)
        if variant == "finite":
            if not isinstance(members, list) or not members:
                r.fail(path, "finite ambiguity needs a list of distributions")
            dists = []
            for i, m in enumerate(members):
                if not isinstance(m, dict):
                    r.fail(f"{path}[{i}]", "expected a {type: weight} mapping")
                d = {str(t): r.num(w, f"{path}[{i}].{t}") for t, w in m.items()}
                unknown = [t for t in d if t not in types]
                if unknown:
                    r.fail(f"{path}[{i}]", f"unknown types {unknown}")
                dists.append(d)
            return AmbiguitySet.finite(dists)
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        r.fail(path, str(exc))
    r.fail("ambiguity.variant", f"unknown variant {variant!r}")


def _family(r: _Reader, spec: dict | None):
    if spec is None:
        return AffineFamily()
    variant = r.get(spec, "variant", "family")
    params = r.get(spec, "params", "family", dict, {}) or {}
    p = "family.params"
    if variant == "affine":
        return AffineFamily(r.get(params, "theta0_max", p, float, None))
    if variant == "linear":
        return LinearFamily()
    if variant == "constant":
        return ConstantFamily(r.get(params, "theta0_max", p, float, None))
    if variant == "general":
        grid = [r.num(v, f"{p}.output_grid[{i}]")
                for i, v in enumerate(r.get(params, "output_grid", p, list))]
        try:
            return GeneralFamily(tuple(grid), r.get(params, "payment_cap", p, float),
                                 r.get(params, "payment_steps", p, int, 8))
        except ValueError as exc:
            r.fail(p, str(exc))
    r.fail("family.variant", f"unknown family {variant!r}")


GRID_KEYS = {"theta1_steps": int, "theta0_steps": int, "theta0_max": float, "cost_steps": int,
             "eps_tie": float, "eps_val": float, "breakpoints": bool,
             "general_max_outputs": int, "general_max_levels": int}


def _grid(r: _Reader, spec: dict | None, overrides: dict | None) -> GridConfig:
    kw: dict[str, Any] = {}
    for key, val in (spec or {}).items():
        if key not in GRID_KEYS:
            r.fail(f"grid.{key}", "unknown grid setting")
        kind = GRID_KEYS[key]
        if val is None:
            kw[key] = None
        elif kind is bool:
            kw[key] = bool(val)
        else:
            kw[key] = r.get(spec, key, "grid", kind)
            if kind is int:
                kw[key] = int(kw[key])
    kw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return GridConfig(**kw)
    except ValueError as exc:
        r.fail("grid", str(exc))


def scenario_from_document(doc: dict, text: str = "", grid_overrides: dict | None = None,
                           validate: bool = True) -> Scenario:
    r = _Reader(_line_index(text) if text else {})
    if not isinstance(doc, dict):
        r.fail("", "scenario document must be a mapping")
    grid = _grid(r, r.get(doc, "grid", "", dict, None), grid_overrides)

    if "case" in doc:
        case = r.get(doc, "case", "", dict)
        kind = r.get(case, "kind", "case")
        if kind != "forest":
            r.fail("case.kind", f"case {kind!r} has no scenario form; use the case-* commands")
        p = r.get(case, "params", "case", dict)
        try:
            params = ForestParams(**{k: r.num(v, f"case.params.{k}") for k, v in p.items()})
        except (TypeError, ValueError) as exc:
            r.fail("case.params", str(exc))
        ts = [r.num(v, f"case.types[{i}]") for i, v in enumerate(r.get(case, "types", "case", list))]
        scen = forest_scenario(params, ts, steps=grid.cost_steps, grid=grid)
    else:
        techs: dict[str, Technology] = {}
        for i, entry in enumerate(r.get(doc, "types", "", list)):
            path = f"types[{i}]"
            tid = str(r.get(entry, "id", path))
            if tid in techs:
                r.fail(f"{path}.id", f"duplicate type id {tid!r}")
            if "actions" in entry:
                acts = [_action(r, a, f"{path}.actions[{j}]")
                        for j, a in enumerate(r.get(entry, "actions", path, list))]
                if not acts:
                    r.fail(f"{path}.actions", "no actions")
                techs[tid] = Technology(tid, tuple(acts))
            elif "curve" in entry:
                techs[tid] = _curve_technology(r, tid, r.get(entry, "curve", path, dict),
                                               f"{path}.curve", grid.cost_steps)
            else:
                r.fail(path, "type needs either actions or curve")
        if not techs:
            r.fail("types", "no types declared")
        amb = _ambiguity(r, r.get(doc, "ambiguity", "", dict, None), list(techs))
        scen = Scenario(techs, amb, _family(r, r.get(doc, "family", "", dict, None)), grid)

    if validate:
        problems = validate_scenario(scen)
        if problems:
            first = problems[0]
            path = _doc_path(doc, first.where)
            parts = [f"{v.message} (Assumption {v.assumption})" if v.assumption else v.message
                     for v in problems]
            extra = "" if len(problems) == 1 else f" [+{len(problems) - 1} more: {'; '.join(str(v) for v in problems[1:])}]"
            raise ScenarioError(parts[0] + extra, path, r.lines.get(path))
    return scen


def _doc_path(doc: dict, where: str) -> str:
    """Translate ``types[<id>]`` in a violation to the document's list index."""
    if not where.startswith("types[") or "types" not in doc:
        return where
    tid, rest = where[len("types["):].split("]", 1)
    for i, entry in enumerate(doc.get("types", [])):
        if str(entry.get("id")) == tid:
            return f"types[{i}]{rest}"
    return where


def load_scenario(path, grid_overrides: dict | None = None) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = parse_text(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"parse error: {getattr(exc, 'problem', exc)}", str(path),
                            mark.line + 1 if mark else None) from None
    return scenario_from_document(doc, text, grid_overrides)


# --------------------------------------------------------------------------- #
# emission
# --------------------------------------------------------------------------- #


def _num(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def plain(obj):
    """Recursively convert numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    return _num(obj)


def action_to_dict(a: Action) -> dict:
    if a.output.is_deterministic:
        return {"cost": a.cost, "output": a.output.values[0]}
    return {"cost": a.cost, "dist": [{"y": y, "p": p} for y, p in zip(a.output.values, a.output.probs)]}


def contract_to_dict(c) -> dict | None:
    if c is None:
        return None
    return {"variant": c.variant, **c.params}


def scenario_to_document(s: Scenario) -> dict:
    fam = s.family
    fam_params: dict = {}
    if isinstance(fam, (AffineFamily, ConstantFamily)) and fam.theta0_max is not None:
        fam_params["theta0_max"] = fam.theta0_max
    if isinstance(fam, GeneralFamily):
        fam_params = {"output_grid": list(fam.output_grid), "payment_cap": fam.payment_cap,
                      "payment_steps": fam.payment_steps}
    amb = s.ambiguity
    if amb.variant == "singleton":
        members: Any = amb.members[0]
    elif amb.variant == "finite":
        members = amb.members
    else:
        members = list(amb.types)
    return plain({
        "types": [{"id": t, "actions": [action_to_dict(a) for a in tech.actions]}
                  for t, tech in s.technologies.items()],
        "ambiguity": {"variant": amb.variant, "members": members},
        "family": {"variant": fam.variant, "params": fam_params},
        "grid": grid_to_dict(s.grid),
    })


def grid_to_dict(g: GridConfig) -> dict:
    return {k: getattr(g, k) for k in GRID_KEYS}


def report_document(command: str, payload: dict, grid: GridConfig | None = None,
                    seed=None) -> dict:
    prov = {"tool": TOOL, "version": __version__, "command": command}
    if grid is not None:
        prov["grid"] = grid_to_dict(grid)
    if seed is not None:
        prov["seed"] = seed
    return plain({"provenance": prov, **payload})


def dumps(doc: dict) -> str:
    return json.dumps(plain(doc), indent=2, sort_keys=True) + "\n"
