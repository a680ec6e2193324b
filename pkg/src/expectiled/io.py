"""Reading and writing problem files.

A problem document is JSON::

    {
      "space": {"states": [{"label": "s0", "prob": 0.5}, ...]},
      "acts": [{"name": "A", "utils": [0, 3]}, {"name": "B", "outcomes": ["x", "y"]}],
      "agent": {"beta": 1.0, "utility": {"x": 1.0, "y": 0.0}}
    }

Leaving out ``prob`` on every state means equal probabilities. ``agent``
is optional when every act is given in utils. A comparison file
carries ``"agents": {"A": {...}, "B": {...}}`` instead of ``agent``.
CSV files hold acts only: first column the state label, an optional
``prob`` column, then one column of utils per act.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

from .core import Agent, FiniteSpace, ModelError, OutcomeAct, UtilityAct, check_beta

Act = Union[UtilityAct, OutcomeAct]


class InputError(ValueError):
    """Malformed input, tagged with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class Problem:
    space: FiniteSpace
    acts: tuple[tuple[str, Act], ...] = ()
    agent: Agent | None = None
    agents: tuple[tuple[str, Agent], ...] = ()


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InputError(path, "must be finite")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise InputError(path, f"expected a list, got {type(value).__name__}")
    return value


def _obj(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise InputError(path, f"expected an object, got {type(value).__name__}")
    return value


def parse_space(doc: Any, path: str = "space") -> FiniteSpace:
    doc = _obj(doc, path)
    states = _list(doc.get("states"), f"{path}.states")
    if not states:
        raise InputError(f"{path}.states", "needs at least one state")
    labels, probs = [], []
    uniform = all(isinstance(e, dict) and "prob" not in e for e in states)
    for i, entry in enumerate(states):
        here = f"{path}.states[{i}]"
        entry = _obj(entry, here)
        if "label" not in entry:
            raise InputError(f"{here}.label", "missing")
        labels.append(str(entry["label"]))
        if uniform:
            continue
        prob = _number(entry.get("prob"), f"{here}.prob")
        if prob <= 0:
            raise InputError(f"{here}.prob", f"must be strictly positive, got {prob!r}")
        probs.append(prob)
    try:
        if uniform:
            return FiniteSpace.uniform(labels)
        return FiniteSpace(tuple(labels), tuple(probs))
    except ModelError as exc:
        raise InputError(f"{path}.states", str(exc)) from None


def parse_agent(doc: Any, path: str = "agent") -> Agent:
    doc = _obj(doc, path)
    beta = _number(doc.get("beta"), f"{path}.beta")
    table = _obj(doc.get("utility", {}), f"{path}.utility")
    utility = {str(k): _number(v, f"{path}.utility.{k}") for k, v in table.items()}
    try:
        return Agent(check_beta(beta), utility)
    except ModelError as exc:
        raise InputError(f"{path}.beta", str(exc)) from None


def parse_act(doc: Any, space: FiniteSpace, path: str) -> tuple[str, Act]:
    doc = _obj(doc, path)
    name = str(doc.get("name", path))
    has_utils, has_outcomes = "utils" in doc, "outcomes" in doc
    if has_utils == has_outcomes:
        raise InputError(path, "give exactly one of 'utils' or 'outcomes'")
    key = "utils" if has_utils else "outcomes"
    items = _list(doc[key], f"{path}.{key}")
    if len(items) != space.n:
        raise InputError(f"{path}.{key}", f"expected {space.n} entries, got {len(items)}")
    if has_utils:
        values = [_number(v, f"{path}.utils[{i}]") for i, v in enumerate(items)]
        return name, UtilityAct(space, tuple(values))
    return name, OutcomeAct(space, tuple(str(o) for o in items))


def parse_problem(doc: Any) -> Problem:
    doc = _obj(doc, "")
    if "space" not in doc:
        raise InputError("space", "missing")
    space = parse_space(doc["space"])
    acts = tuple(
        parse_act(a, space, f"acts[{i}]") for i, a in enumerate(_list(doc.get("acts", []), "acts"))
    )
    names = [n for n, _ in acts]
    if len(set(names)) != len(names):
        raise InputError("acts", "act names must be unique")
    agent = parse_agent(doc["agent"]) if doc.get("agent") is not None else None
    agents = tuple(
        (str(k), parse_agent(v, f"agents.{k}"))
        for k, v in _obj(doc.get("agents", {}), "agents").items()
    )
    if agent is not None:
        for i, (name, act) in enumerate(acts):
            if isinstance(act, OutcomeAct):
                for j, o in enumerate(act.outcomes):
                    if o not in agent.utility:
                        raise InputError(f"acts[{i}].outcomes[{j}]", f"outcome {o!r} has no utility")
    return Problem(space, acts, agent, agents)


def load_csv(path: str | Path) -> Problem:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise InputError("csv", "need a header row and at least one state")
    header = [h.strip() for h in rows[0]]
    has_prob = len(header) > 1 and header[1].lower() == "prob"
    first_act = 2 if has_prob else 1
    names = header[first_act:]
    if not names:
        raise InputError("csv", "no act columns")
    labels, probs, columns = [], [], [[] for _ in names]
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"csv line {r}", f"expected {len(header)} fields, got {len(row)}")
        labels.append(row[0].strip())
        if has_prob:
            probs.append(_csv_float(row[1], f"csv line {r}, prob"))
        for j, cell in enumerate(row[first_act:]):
            columns[j].append(_csv_float(cell, f"csv line {r}, {names[j]}"))
    try:
        space = FiniteSpace(tuple(labels), tuple(probs)) if has_prob else FiniteSpace.uniform(labels)
    except ModelError as exc:
        raise InputError("csv prob", str(exc)) from None
    acts = tuple((name, UtilityAct(space, tuple(col))) for name, col in zip(names, columns))
    return Problem(space, acts)


def _csv_float(cell: str, path: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise InputError(path, f"not a number: {cell!r}") from None
    if not math.isfinite(value):
        raise InputError(path, "must be finite")
    return value


def load_problem(path: str | Path) -> Problem:
    path = Path(path)
    try:
        if path.suffix.lower() == ".csv":
            return load_csv(path)
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(str(path), exc.strerror or str(exc)) from None
    except json.JSONDecodeError as exc:
        raise InputError(str(path), f"invalid JSON: {exc}") from None
    return parse_problem(doc)


def space_to_dict(space: FiniteSpace) -> dict:
    return {"states": [{"label": s, "prob": q} for s, q in zip(space.states, space.probs)]}


def agent_to_dict(agent: Agent) -> dict:
    return {"beta": agent.beta, "utility": dict(agent.utility)}


def act_to_dict(name: str, act: Act) -> dict:
    if isinstance(act, UtilityAct):
        return {"name": name, "utils": list(act.values)}
    return {"name": name, "outcomes": list(act.outcomes)}


def problem_to_dict(problem: Problem) -> dict:
    doc: dict[str, Any] = {
        "space": space_to_dict(problem.space),
        "acts": [act_to_dict(n, a) for n, a in problem.acts],
    }
    if problem.agent is not None:
        doc["agent"] = agent_to_dict(problem.agent)
    if problem.agents:
        doc["agents"] = {k: agent_to_dict(a) for k, a in problem.agents}
    return doc


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot encode {obj!r} as JSON")
        text = format(obj, ".17g")
        if not any(c in text for c in ".en"):
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalars
        return _encode(obj.item())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits."""
    return _encode(obj)
