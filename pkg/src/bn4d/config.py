"""Experiment configuration: a TOML file with one table per concern."""

from __future__ import annotations

import copy
import hashlib
import importlib
import json
import re
import sys
from dataclasses import dataclass, field

from .domain import BallDomain, ConstantPotential, CustomDomain, GaussianBumps, QuadraticPotential
from .quadrature import QuadratureSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration; ``location`` is the dotted key path."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


def _point(value, loc):
    try:
        arr = [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(loc, "expected a list of 4 numbers") from None
    if len(arr) != 4:
        raise ConfigError(loc, f"expected 4 coordinates, got {len(arr)}")
    return arr


def _floats(value, loc, positive=False):
    try:
        arr = [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(loc, "expected a list of numbers") from None
    if positive and any(v <= 0 for v in arr):
        raise ConfigError(loc, "all values must be positive")
    return arr


def _num(value, loc, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(loc, "expected a number")
    if integer and int(value) != value:
        raise ConfigError(loc, "expected an integer")
    if positive and not value > 0:
        raise ConfigError(loc, "must be positive")
    return int(value) if integer else float(value)


DEFAULTS: dict = {
    "seed": 0,
    "domain": {"kind": "ball", "radius": 1.0, "center": [0.0, 0.0, 0.0, 0.0], "margin": None,
               "provider": None},
    "potential": {"form": "constant", "v0": 1.0},
    "bubble": {"deltas": [0.1, 0.05, 0.025, 0.0125], "xi": [0.0, 0.0, 0.0, 0.0]},
    "eps": {"value": 0.0, "grid": [0.5, 0.4, 0.3, 0.25, 0.2, 0.15]},
    "quadrature": {"scheme": "tensor", "n_radial": 24, "n_chi": 16, "n_theta": 12, "n_phi": 16,
                   "panel_width": 1.0, "n_points": 65536},
    "reduced": {"guess": [0.3, 0.0, 0.0, 0.0], "max_iter": 50, "grad_tol": 1e-12,
                "degeneracy_rtol": 1e-10},
    "shoot": {"rtol": 1e-11, "bracket": None, "n_profile": 400},
    "verify": {
        "defect_deltas": [0.1, 0.03, 0.01, 0.003, 0.001],
        "expansion_deltas": [0.03, 0.01, 0.003, 0.001],
        "affinity_deltas": [0.01, 0.005],
        "affinity_eps": [0.25, 0.5, 1.0, 2.0],
        "pohozaev_delta": 0.001,
        "pohozaev_xi": [0.3, 0.0, 0.0, 0.0],
        "eta": None,
        "j": 1,
    },
    "robin": {"points": None},
    "output": {"dir": "out"},
}

_POTENTIAL_KEYS = {
    "constant": {"form", "v0"},
    "quadratic": {"form", "c0", "g", "A"},
    "gaussian_bumps": {"form", "offset", "bumps"},
}


def _merge(base: dict, over: dict, loc: str) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if k not in base:
            raise ConfigError(f"{loc}{k}", "unknown key")
        if isinstance(base[k], dict) and k != "potential":
            if not isinstance(v, dict):
                raise ConfigError(f"{loc}{k}", "expected a table")
            out[k] = _merge(base[k], v, f"{loc}{k}.")
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration; ``raw`` is the normalised dictionary form."""

    raw: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    # -- construction --------------------------------------------------
    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "expected a table")
        pot = d.get("potential")
        merged = _merge(DEFAULTS, {k: v for k, v in d.items() if k != "potential"}, "")
        if pot is not None:
            if not isinstance(pot, dict):
                raise ConfigError("potential", "expected a table")
            merged["potential"] = copy.deepcopy(pot)
        cfg = cls(_normalise(merged))
        cfg.build_domain()
        cfg.build_potential()
        cfg.quadrature_spec()
        return cfg

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        d = self.to_dict()
        d["seed"] = int(seed)
        return ExperimentConfig.from_dict(d)

    def sha256(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    # -- accessors -----------------------------------------------------
    def __getitem__(self, key):
        return self.raw[key]

    @property
    def seed(self) -> int:
        return self.raw["seed"]

    def build_domain(self):
        d = self.raw["domain"]
        if d["kind"] == "ball":
            return BallDomain(radius=d["radius"], center=tuple(d["center"]), margin=d["margin"])
        target = d["provider"]
        mod_name, _, attr = target.partition(":")
        try:
            factory = getattr(importlib.import_module(mod_name), attr)
        except (ImportError, AttributeError) as exc:
            raise ConfigError("domain.provider", f"cannot import {target!r}: {exc}") from None
        dom = factory()
        if not isinstance(dom, CustomDomain):
            raise ConfigError("domain.provider", "factory must return a CustomDomain")
        return dom

    def build_potential(self):
        p = self.raw["potential"]
        form = p["form"]
        if form == "constant":
            return ConstantPotential(p["v0"])
        if form == "quadratic":
            return QuadraticPotential(p["c0"], p["g"], p["A"])
        bumps = [(b["amplitude"], tuple(b["center"]), b["width"]) for b in p["bumps"]]
        return GaussianBumps(bumps, p["offset"])

    def quadrature_spec(self) -> QuadratureSpec:
        q = dict(self.raw["quadrature"])
        try:
            return QuadratureSpec(seed=self.seed, **q)
        except ValueError as exc:
            raise ConfigError("quadrature", str(exc)) from None


def _normalise(m: dict) -> dict:
    m["seed"] = _num(m["seed"], "seed", integer=True)
    d = m["domain"]
    if d["kind"] not in ("ball", "custom"):
        raise ConfigError("domain.kind", "must be 'ball' or 'custom'")
    d["radius"] = _num(d["radius"], "domain.radius", positive=True)
    d["center"] = _point(d["center"], "domain.center")
    if d["margin"] is not None:
        d["margin"] = _num(d["margin"], "domain.margin", positive=True)
    if d["kind"] == "custom" and not isinstance(d["provider"], str):
        raise ConfigError("domain.provider", "custom domains need 'module:function'")

    p = m["potential"]
    form = p.get("form", "constant")
    if form not in _POTENTIAL_KEYS:
        raise ConfigError("potential.form", f"unknown form {form!r}")
    extra = set(p) - _POTENTIAL_KEYS[form]
    if extra:
        raise ConfigError(f"potential.{sorted(extra)[0]}", f"not a parameter of form {form!r}")
    if form == "constant":
        m["potential"] = {"form": form, "v0": _num(p.get("v0", 1.0), "potential.v0")}
    elif form == "quadratic":
        A = p.get("A", [[0.0] * 4] * 4)
        try:
            A = [[float(v) for v in row] for row in A]
        except (TypeError, ValueError):
            raise ConfigError("potential.A", "expected a 4x4 table of numbers") from None
        if len(A) != 4 or any(len(row) != 4 for row in A):
            raise ConfigError("potential.A", "expected a 4x4 table of numbers")
        m["potential"] = {
            "form": form,
            "c0": _num(p.get("c0", 1.0), "potential.c0"),
            "g": _point(p.get("g", [0.0] * 4), "potential.g"),
            "A": A,
        }
    else:
        bumps = []
        for i, b in enumerate(p.get("bumps", [])):
            loc = f"potential.bumps[{i}]"
            if not isinstance(b, dict) or set(b) != {"amplitude", "center", "width"}:
                raise ConfigError(loc, "each bump needs amplitude, center and width")
            bumps.append({
                "amplitude": _num(b["amplitude"], loc + ".amplitude"),
                "center": _point(b["center"], loc + ".center"),
                "width": _num(b["width"], loc + ".width", positive=True),
            })
        m["potential"] = {"form": form, "offset": _num(p.get("offset", 0.0), "potential.offset"),
                          "bumps": bumps}

    b = m["bubble"]
    b["deltas"] = _floats(b["deltas"], "bubble.deltas", positive=True)
    b["xi"] = _point(b["xi"], "bubble.xi")
    e = m["eps"]
    e["value"] = _num(e["value"], "eps.value")
    e["grid"] = _floats(e["grid"], "eps.grid", positive=True)
    if any(y >= x for x, y in zip(e["grid"], e["grid"][1:])):
        raise ConfigError("eps.grid", "must be strictly decreasing")
    q = m["quadrature"]
    for k in ("n_radial", "n_chi", "n_theta", "n_phi", "n_points"):
        q[k] = _num(q[k], f"quadrature.{k}", positive=True, integer=True)
    q["panel_width"] = _num(q["panel_width"], "quadrature.panel_width", positive=True)
    r = m["reduced"]
    r["guess"] = _point(r["guess"], "reduced.guess")
    r["max_iter"] = _num(r["max_iter"], "reduced.max_iter", positive=True, integer=True)
    r["grad_tol"] = _num(r["grad_tol"], "reduced.grad_tol", positive=True)
    r["degeneracy_rtol"] = _num(r["degeneracy_rtol"], "reduced.degeneracy_rtol", positive=True)
    s = m["shoot"]
    s["rtol"] = _num(s["rtol"], "shoot.rtol", positive=True)
    s["n_profile"] = _num(s["n_profile"], "shoot.n_profile", positive=True, integer=True)
    if s["bracket"] is not None:
        s["bracket"] = _floats(s["bracket"], "shoot.bracket", positive=True)
        if len(s["bracket"]) != 2 or s["bracket"][0] >= s["bracket"][1]:
            raise ConfigError("shoot.bracket", "expected [M_lo, M_hi] with M_lo < M_hi")
    v = m["verify"]
    for k in ("defect_deltas", "expansion_deltas", "affinity_deltas", "affinity_eps"):
        v[k] = _floats(v[k], f"verify.{k}", positive=True)
    v["pohozaev_delta"] = _num(v["pohozaev_delta"], "verify.pohozaev_delta", positive=True)
    v["pohozaev_xi"] = _point(v["pohozaev_xi"], "verify.pohozaev_xi")
    if v["eta"] is not None:
        v["eta"] = _num(v["eta"], "verify.eta", positive=True)
    v["j"] = _num(v["j"], "verify.j", integer=True)
    if v["j"] not in (1, 2, 3, 4):
        raise ConfigError("verify.j", "must be in 1..4")
    rb = m["robin"]
    if rb["points"] is not None:
        rb["points"] = [_point(pt, f"robin.points[{i}]") for i, pt in enumerate(rb["points"])]
    if not isinstance(m["output"]["dir"], str):
        raise ConfigError("output.dir", "expected a string")
    return m


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+), column (\d+)", str(exc))
        where = f"line {m.group(1)}, column {m.group(2)}" if m else "<toml>"
        raise ConfigError(where, str(exc)) from None
    return ExperimentConfig.from_dict(data)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode()
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from None
    return parse_config(text)
