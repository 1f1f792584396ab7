"""
Scenario files: JSON documents describing a weight function and the inputs
for a race, attack or replot simulation.

Example::

    {
      "version": 1,
      "weight_dsl": "S1 * V1",
      "dimensions": [1, 1, 0],
      "seed": 0,
      "profiles": {"honest": {"horizon": 6, "segments": [{"t": 0, "S": [1.1], "V": [1.1]}]},
                   "adversary": {"horizon": 6, "segments": [{"t": 0, "S": [1], "V": [1]}]}},
      "warps": {"adversary": {"horizon": 6, "segments": [{"t": 0, "phi": 1}]}},
      "discrete": {"adversary_spans": [[0, 3], [3, 6]], "delta": 1.2, "xi": 1.0},
      "replot": {"replot_time": 2, "difficulty": 1.21, "eta": 1.5}
    }

Only ``weight_dsl`` is required.  Saved attacks add an ``attack`` section and
can be replayed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .attacks import AttackScenario
from .continuous import TimeWarp
from .resources import ResourceProfile
from .weights import ParseError, WeightExpr, parse

VERSION = 1


class ScenarioError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _at(path: str, fn, *args):
    try:
        return fn(*args)
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(path, f"{type(exc).__name__}: {exc}") from exc


@dataclass
class ScenarioFile:
    weight_dsl: str
    expr: WeightExpr
    dimensions: Optional[tuple[int, int, int]] = None
    seed: int = 0
    profiles: dict[str, ResourceProfile] = field(default_factory=dict)
    warps: dict[str, TimeWarp] = field(default_factory=dict)
    recording: Optional[ResourceProfile] = None
    discrete: dict[str, Any] = field(default_factory=dict)
    replot: dict[str, Any] = field(default_factory=dict)
    attack: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioFile":
        if not isinstance(d, dict):
            raise ScenarioError("$", "scenario must be a JSON object")
        version = d.get("version", VERSION)
        if version != VERSION:
            raise ScenarioError("version", f"unsupported version {version!r}")
        if "weight_dsl" not in d:
            raise ScenarioError("weight_dsl", "missing")
        dsl = d["weight_dsl"]
        try:
            expr = parse(dsl)
        except ParseError as exc:
            raise ScenarioError("weight_dsl", str(exc)) from exc
        dims = d.get("dimensions")
        if dims is not None:
            dims = _at("dimensions", lambda x: tuple(int(k) for k in x), dims)
            if len(dims) != 3:
                raise ScenarioError("dimensions", "expected [k1, k2, k3]")
            need = expr.requires()
            if any(n > k for n, k in zip(need, dims)):
                raise ScenarioError("dimensions", f"weight needs at least {list(need)}")
        profiles = {
            name: _at(f"profiles.{name}", ResourceProfile.from_dict, p)
            for name, p in d.get("profiles", {}).items()
        }
        for name, p in profiles.items():
            if dims is not None and p.dims != dims:
                raise ScenarioError(f"profiles.{name}", f"dimensions {list(p.dims)} != {list(dims)}")
            need = expr.requires()
            if any(n > k for n, k in zip(need, p.dims)):
                raise ScenarioError(f"profiles.{name}", f"weight needs at least {list(need)}")
        warps = {
            name: _at(f"warps.{name}", TimeWarp.from_dict, w)
            for name, w in d.get("warps", {}).items()
        }
        rec = d.get("recording")
        recording = _at("recording", ResourceProfile.from_dict, rec) if rec else None
        return cls(
            weight_dsl=dsl,
            expr=expr,
            dimensions=dims,
            seed=_at("seed", int, d.get("seed", 0)),
            profiles=profiles,
            warps=warps,
            recording=recording,
            discrete=dict(d.get("discrete", {})),
            replot=dict(d.get("replot", {})),
            attack=dict(d.get("attack", {})),
        )

    @classmethod
    def load(cls, path) -> "ScenarioFile":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError("$", f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def profile(self, name: str) -> ResourceProfile:
        if name not in self.profiles:
            raise ScenarioError(f"profiles.{name}", "missing")
        return self.profiles[name]

    def attack_scenario(self) -> AttackScenario:
        if not self.attack:
            raise ScenarioError("attack", "missing")
        d = {
            **self.attack,
            "profiles": {k: v.to_dict() for k, v in self.profiles.items()},
            "warps": {k: v.to_dict() for k, v in self.warps.items()},
        }
        if self.recording is not None:
            d["recording"] = self.recording.to_dict()
        return _at("attack", AttackScenario.from_dict, d)


def attack_document(weight_dsl: str, scenario: AttackScenario, seed: int = 0) -> dict:
    """Scenario-file dictionary from which ``scenario`` can be replayed."""
    body = scenario.to_dict()
    doc = {
        "version": VERSION,
        "weight_dsl": weight_dsl,
        "seed": seed,
        "profiles": body.pop("profiles"),
        "warps": body.pop("warps"),
    }
    if "recording" in body:
        doc["recording"] = body.pop("recording")
    doc["attack"] = body
    return doc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
