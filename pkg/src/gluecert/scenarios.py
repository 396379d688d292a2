"""Declarative scenario configs: parsing, validation, collar construction.

A scenario file is a single JSON document naming a collar model family, the
curvature mode, gluing parameters (or a search request) and a list of checks
with their expected outcomes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import scalars
from .chart import CollarMetric, make_diagonal_torus, make_warped_product, mirror_collar
from .curvature import FDConfig, SamplingPlan
from .errors import ScenarioError
from .gluing import GluingParams

KNOWN_CHECKS = (
    "boundary",
    "certify_c1",
    "smooth_certify",
    "search",
    "rates",
    "gauss",
    "interpolation_bound",
    "eta",
    "totally_geodesic",
    "almost_nonneg",
    "diameter",
)
KNOWN_EXPECTATIONS = ("pass", "fail", "inconclusive")


@dataclass(frozen=True)
class CheckSpec:
    check: str
    expect: str = "pass"
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    """A parsed, validated scenario ready to run."""

    name: str
    description: str
    collars: dict
    mode: str
    k: int
    kappa: float
    params: Optional[GluingParams]
    eps_list: tuple
    checks: tuple
    plan: SamplingPlan
    fd: FDConfig
    output: str

    def build_collars(self):
        return build_collars(self.collars)


def _require(cond: bool, fieldname: str, msg: str):
    if not cond:
        raise ScenarioError(f"field '{fieldname}': {msg}")


def _scalar(spec, fieldname):
    try:
        return scalars.from_spec(spec)
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"field '{fieldname}': {exc}") from exc


def build_collars(spec: dict):
    """Build the (h1, h2) collar pair named by a scenario's collars block."""
    family = spec.get("family")
    depth = float(spec.get("depth", 0.8))
    _require(depth > 0, "collars.depth", "must be positive")
    if family == "warped_mirror":
        n = int(spec.get("n", 0))
        _require(n >= 3, "collars.n", "warped products need n >= 3")
        phi = _scalar(spec.get("phi", {}), "collars.phi")
        h1 = make_warped_product(phi, n, (-depth, 0.0), side="left")
        return h1, mirror_collar(h1)
    if family == "warped_pair":
        n = int(spec.get("n", 0))
        _require(n >= 3, "collars.n", "warped products need n >= 3")
        phi1 = _scalar(spec.get("phi1", {}), "collars.phi1")
        phi2 = _scalar(spec.get("phi2", {}), "collars.phi2")
        h1 = make_warped_product(phi1, n, (-depth, 0.0), side="left")
        h2 = make_warped_product(phi2, n, (0.0, depth), side="right")
        return h1, h2
    if family == "torus_mirror":
        profiles = [
            _scalar(p, f"collars.profiles[{i}]") for i, p in enumerate(spec.get("profiles", []))
        ]
        _require(len(profiles) >= 1, "collars.profiles", "need at least one profile")
        h1 = make_diagonal_torus(
            profiles, (-depth, 0.0), side="left", periods=spec.get("periods")
        )
        return h1, mirror_collar(h1)
    if family == "torus_pair":
        p1 = [
            _scalar(p, f"collars.profiles1[{i}]")
            for i, p in enumerate(spec.get("profiles1", []))
        ]
        p2 = [
            _scalar(p, f"collars.profiles2[{i}]")
            for i, p in enumerate(spec.get("profiles2", []))
        ]
        _require(len(p1) >= 1 and len(p1) == len(p2), "collars.profiles*", "length mismatch")
        h1 = make_diagonal_torus(p1, (-depth, 0.0), side="left", periods=spec.get("periods"))
        h2 = make_diagonal_torus(p2, (0.0, depth), side="right", periods=spec.get("periods"))
        return h1, h2
    raise ScenarioError(
        f"field 'collars.family': unknown family {family!r}; known: "
        "warped_mirror, warped_pair, torus_mirror, torus_pair"
    )


def _parse_params(raw: Optional[dict]) -> Optional[GluingParams]:
    if raw is None:
        return None
    try:
        return GluingParams(
            eps=float(raw["eps"]),
            iota=float(raw["iota"]),
            nu=float(raw["nu"]),
            mu=float(raw["mu"]),
            kappa=float(raw.get("kappa", 0.0)),
            delta=float(raw.get("delta", 0.1)),
        )
    except KeyError as exc:
        raise ScenarioError(f"field 'params.{exc.args[0]}': missing") from exc
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field 'params': {exc}") from exc


def _parse_checks(raw) -> tuple:
    _require(isinstance(raw, list) and raw, "checks", "must be a non-empty list")
    out = []
    for i, item in enumerate(raw):
        if isinstance(item, str):
            item = {"check": item}
        name = item.get("check")
        _require(name in KNOWN_CHECKS, f"checks[{i}].check", f"unknown check {name!r}")
        expect = item.get("expect", "pass")
        _require(
            expect in KNOWN_EXPECTATIONS, f"checks[{i}].expect", f"unknown expectation {expect!r}"
        )
        options = item.get("options", {})
        _require(isinstance(options, dict), f"checks[{i}].options", "must be an object")
        out.append(CheckSpec(check=name, expect=expect, options=options))
    return tuple(out)


def _parse_plan(raw: Optional[dict]) -> SamplingPlan:
    if raw is None:
        return SamplingPlan()
    allowed = {
        "x_per_axis",
        "t_per_region",
        "directions",
        "refine_rounds",
        "refine_directions",
        "refine_radius",
        "interface_margin",
    }
    bad = set(raw) - allowed
    _require(not bad, "sampling", f"unknown keys {sorted(bad)}")
    return SamplingPlan(**raw)


def parse_scenario(doc: dict) -> Scenario:
    name = doc.get("name")
    _require(isinstance(name, str) and name, "name", "must be a non-empty string")
    mode = doc.get("mode", "RicK")
    _require(mode in ("RicK", "ScK"), "mode", "must be 'RicK' or 'ScK'")
    k = int(doc.get("k", 1))
    _require(k >= 1, "k", "must be >= 1")
    collars = doc.get("collars")
    _require(isinstance(collars, dict), "collars", "must be an object")
    eps_list = tuple(float(e) for e in doc.get("eps_list", (0.1, 0.05, 0.025, 0.0125)))
    _require(all(e > 0 for e in eps_list), "eps_list", "entries must be positive")
    fd_raw = doc.get("fd", {})
    _require(isinstance(fd_raw, dict), "fd", "must be an object")
    scenario = Scenario(
        name=name,
        description=doc.get("description", ""),
        collars=collars,
        mode=mode,
        k=k,
        kappa=float(doc.get("kappa", 0.0)),
        params=_parse_params(doc.get("params")),
        eps_list=eps_list,
        checks=_parse_checks(doc.get("checks")),
        plan=_parse_plan(doc.get("sampling")),
        fd=FDConfig(**fd_raw),
        output=doc.get("output", name),
    )
    # fail fast on collar construction problems
    try:
        h1, h2 = scenario.build_collars()
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"field 'collars': {exc}") from exc
    n = h1.dim
    kmax = n - 1 if mode == "RicK" else n
    _require(k <= kmax, "k", f"out of range 1..{kmax} for mode {mode} in dimension {n}")
    return scenario


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: top level must be a JSON object")
    return parse_scenario(doc)


def shipped_scenario_dir() -> Path:
    return Path(__file__).parent / "scenarios"


def list_shipped() -> list:
    return sorted(p.stem for p in shipped_scenario_dir().glob("*.json"))


def resolve_scenario_path(name_or_path: str) -> Path:
    p = Path(name_or_path)
    if p.exists():
        return p
    shipped = shipped_scenario_dir() / f"{name_or_path}.json"
    if shipped.exists():
        return shipped
    raise ScenarioError(
        f"no scenario file or shipped scenario named {name_or_path!r}; "
        f"shipped: {', '.join(list_shipped())}"
    )
