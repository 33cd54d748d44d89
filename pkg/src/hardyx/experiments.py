"""Experiment configs and dispatch for the batch runner.

A config is a JSON object; keys mirror the library types::

    {
      "experiment": "riesz-equiv",
      "m": 1,
      "grid": {"n": 1, "N": 256, "L": 16.0},
      "space": {"kind": "Lorentz", "p": 0.8, "r": 2},
      "hardy": {"b": null, "width": 1.0, "ladder": {"per_octave": 2}},
      "family": {"kind": "mixed", "count": 20},
      "seed": 0
    }
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import gfn1
from .grid import Grid, GridFunction, TLadder, geometric_ladder, make_grid, uniform_ladder
from .halfspace import (
    cauchy_riemann_residual,
    harmonic_vector_from,
    majorization_check,
    subharmonic_mean_value_check,
    tensor_field_from,
)
from .hardy import HardyConfig, TestFamily, equivalence_experiment, make_test_family
from .maximal import AssumptionParams, Template, all_radii, default_radii, fs_vector_probe
from .spaces import (
    Lebesgue,
    ValidityReport,
    bp_condition_probe,
    doubling_constant,
    mo_indices,
    muckenhoupt_weight,
    omega_from_dict,
    range_validator,
    space_from_dict,
)

__all__ = ["KINDS", "ConfigError", "ExperimentConfig", "Result", "load_config", "run_experiment", "digest"]

KINDS = (
    "poisson-equiv",
    "riesz-equiv",
    "isom-equiv",
    "cr-residual",
    "subharmonic",
    "majorization",
    "mo-indices",
    "range-check",
    "probes",
)
_EQUIV = {"poisson-equiv": "poisson", "riesz-equiv": "riesz", "isom-equiv": "isom"}
_NEEDS = {
    "poisson-equiv": ("grid", "space"),
    "riesz-equiv": ("grid", "space"),
    "isom-equiv": ("grid", "space"),
    "cr-residual": ("grid",),
    "subharmonic": ("grid",),
    "majorization": ("grid",),
    "mo-indices": ("omega",),
    "range-check": ("space", "n"),
    "probes": ("grid", "space"),
}


class ConfigError(ValueError):
    """Unreadable or invalid experiment configuration."""


def _canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj: Any) -> str:
    return hashlib.sha256(_canonical(obj).encode()).hexdigest()


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    raw: dict
    seed: int = 0

    @classmethod
    def from_dict(cls, d: dict, seed: int | None = None) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        kind = d.get("experiment")
        if kind not in KINDS:
            raise ConfigError(f"unknown or missing 'experiment' {kind!r}; expected one of {KINDS}")
        missing = [k for k in _NEEDS[kind] if k not in d and not (k == "n" and "grid" in d)]
        if missing:
            raise ConfigError(f"experiment {kind!r} needs keys {missing}")
        s = int(d.get("seed", 0)) if seed is None else int(seed)
        if not 0 <= s < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {s}")
        return cls(kind, d, s)

    @property
    def id(self) -> str:
        return str(self.raw.get("id", self.kind))

    @property
    def m(self) -> int:
        return int(self.raw.get("m", 1))

    def inputs(self) -> dict:
        d = dict(self.raw)
        d["seed"] = self.seed
        return d

    def grid(self) -> Grid:
        g = self.raw["grid"]
        try:
            return make_grid(g["n"], g["N"], g["L"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid grid: {exc}") from None

    def n(self) -> int:
        return int(self.raw["n"]) if "n" in self.raw else self.grid().n

    def space(self, grid: Grid | None = None):
        try:
            return space_from_dict(self.raw["space"], grid)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid space: {exc}") from None

    def ladder(self, grid: Grid, key: str = "ladder") -> TLadder:
        spec = dict(self.raw.get("hardy", {}).get(key) or self.raw.get(key) or {})
        try:
            if "levels" in spec:
                return TLadder(tuple(spec["levels"]), grid.L)
            if "dt" in spec:
                return uniform_ladder(float(spec["t1"]), float(spec["dt"]), int(spec["count"]), grid.L)
            return geometric_ladder(grid, spec.get("t1"), int(spec.get("per_octave", 2)), spec.get("top"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid ladder: {exc}") from None

    def hardy(self, grid: Grid) -> HardyConfig:
        h = self.raw.get("hardy", {})
        return HardyConfig.default(grid, h.get("b"), self.ladder(grid), float(h.get("width", 1.0)),
                                   int(h.get("order", 2)))

    def family(self, grid: Grid) -> TestFamily:
        spec = dict(self.raw.get("family", {"kind": "dilated-gaussians"}))
        kind = spec.pop("kind", "dilated-gaussians")
        if kind == "files":
            base = Path(self.raw.get("_base", "."))
            members = tuple(gfn1.import_field(base / p) for p in spec["paths"])
            if any(f.grid != grid for f in members):
                raise ConfigError("family files disagree with the configured grid")
            return TestFamily("files", spec, members, tuple(spec["paths"]))
        spec["seed"] = self.seed + int(spec.get("seed", 0))
        try:
            return make_test_family(kind, spec, grid)
        except ValueError as exc:
            raise ConfigError(f"invalid family: {exc}") from None


def load_config(path: str | Path, seed: int | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    cfg = ExperimentConfig.from_dict(d, seed)
    # relative GFN1 paths resolve against the config's directory
    cfg.raw.setdefault("_base", str(path.parent))
    return cfg


@dataclass
class Result:
    """Rows (first row is the header) plus a summary; ``violated`` marks a hypothesis failure."""

    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    validity: ValidityReport | None = None

    @property
    def violated(self) -> bool:
        return self.validity is not None and not self.validity.valid

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
        return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, np.integer):
        return int(x)
    return x


def _equiv(cfg: ExperimentConfig, override: bool) -> Result:
    g = cfg.grid()
    X = cfg.space(g)
    m = cfg.m
    validity = range_validator(X, m, g.n) if X.__class__.__name__ != "WeightedLebesgue" else None
    res = Result(["member_id", "norm_a", "norm_b", "ratio"], validity=validity)
    if res.violated and not override:
        res.summary = {"status": "hypothesis-violated", "validity": validity.to_dict()}
        return res
    rep = equivalence_experiment(cfg.family(g), X, m, cfg.hardy(g), _EQUIV[cfg.kind],
                                 float(cfg.raw.get("spread_bound", 10.0)))
    res.rows = [list(r) for r in rep.rows]
    res.summary = rep.summary()
    return res


def _cr(cfg: ExperimentConfig, override: bool) -> Result:
    g = cfg.grid()
    lad = cfg.ladder(g)
    res = Result(["member_id", "max_abs", "l2", "relative"])
    for i, f in enumerate(cfg.family(g)):
        r = cauchy_riemann_residual(harmonic_vector_from(f, lad))
        res.rows.append([i, r.max_abs, r.l2, r.relative])
    res.summary = {"max_relative": max(r[3] for r in res.rows), "levels": len(lad)}
    return res


def _subharmonic(cfg: ExperimentConfig, override: bool) -> Result:
    g = cfg.grid()
    lad = cfg.ladder(g)
    m = cfg.m
    crit = (g.n - 1) / (g.n + m - 1)
    q = float(cfg.raw.get("q", crit))
    samples = int(cfg.raw.get("samples", 50))
    res = Result(["member_id", "max_violation", "scale", "relative"])
    for i, f in enumerate(cfg.family(g)):
        if q <= 0:
            raise ConfigError("q must be positive")
        r = subharmonic_mean_value_check(tensor_field_from(f, m, lad), q, samples)
        res.rows.append([i, r.max_abs, r.scale, r.relative])
    res.summary = {"q": q, "critical_q": crit, "at_or_above_critical": q >= crit - 1e-12,
                   "max_relative": max(r[3] for r in res.rows)}
    return res


def _majorization(cfg: ExperimentConfig, override: bool) -> Result:
    g = cfg.grid()
    t1 = float(cfg.raw.get("t1", g.h / 4))
    qs = sorted({float(q) for q in cfg.raw.get("q", [(g.n - 1) / g.n or 1.0, 1.0])})
    a_s = [float(a) if a != "t1" else t1 for a in cfg.raw.get("a", [0.0, "t1"])]
    ts = [float(t) for t in cfg.raw.get("t", [0.5, 1.0, 2.0])]
    levels = sorted({round(x, 15) for a in a_s for t in ts for x in (t1 + a, t + t1 + a)} | {t1})
    lad = TLadder(tuple(levels), g.L)
    res = Result(["member_id", "q", "a", "t", "violation", "relative"])
    for i, f in enumerate(cfg.family(g)):
        F = harmonic_vector_from(f, lad)
        for q in qs:
            for a in a_s:
                for t in ts:
                    r = majorization_check(F, q, a, t)
                    res.rows.append([i, q, a, t, r.max_abs, r.breakdown["relative"]])
    res.summary = {"t1": t1, "max_relative": max(r[5] for r in res.rows)}
    return res


def _mo(cfg: ExperimentConfig, override: bool) -> Result:
    try:
        om = omega_from_dict(cfg.raw["omega"])
        idx = mo_indices(om)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid omega: {exc}") from None
    res = Result(["m0", "M0", "m_inf", "M_inf"], [[idx.m0, idx.M0, idx.m_inf, idx.M_inf]])
    res.summary = {"omega": om.to_dict()}
    return res


def _range(cfg: ExperimentConfig, override: bool) -> Result:
    X = cfg.space(cfg.grid() if "grid" in cfg.raw else None)
    try:
        v = range_validator(X, cfg.m, cfg.n())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    res = Result(["hypothesis", "holds", "margin"], validity=v)
    res.rows = [[h.description, h.holds, h.margin] for h in v.hypotheses]
    res.summary = {"validity": v.to_dict(),
                   "violated": [h.description for h in v.violated()]}
    return res


def _probes(cfg: ExperimentConfig, override: bool) -> Result:
    g = cfg.grid()
    X = cfg.space(g)
    res = Result(["probe", "parameter", "value"])
    pr = cfg.raw.get("probes", {})
    fam = list(cfg.family(g))
    params = AssumptionParams(float(pr.get("theta", 0.5)), float(pr.get("s", 1.0)))
    fs = fs_vector_probe(fam, params, X)
    res.rows.append(["fs_vector", f"theta={params.theta:g},s={params.s:g}", fs.ratio])
    p = float(pr.get("p", 1.0))
    for eps in pr.get("epsilons", [0.3, 0.6]):
        w = muckenhoupt_weight(g, float(eps), all_radii(g))
        res.rows.append(["doubling", f"epsilon={float(eps):g}", doubling_constant(w)])
        samples = [(g.center + off, t) for t in pr.get("t", [0.5, 1.0, 2.0])
                   for off in (np.zeros(g.n), np.full(g.n, g.L / 4))]
        bp = bp_condition_probe(w, p, samples)
        res.rows.append(["bp_condition", f"epsilon={float(eps):g},p={p:g}", bp.max_ratio])
    res.summary = {r[0] + ":" + r[1]: r[2] for r in res.rows}
    return res


_RUNNERS = {
    "poisson-equiv": _equiv,
    "riesz-equiv": _equiv,
    "isom-equiv": _equiv,
    "cr-residual": _cr,
    "subharmonic": _subharmonic,
    "majorization": _majorization,
    "mo-indices": _mo,
    "range-check": _range,
    "probes": _probes,
}


def run_experiment(cfg: ExperimentConfig, override: bool = False) -> Result:
    res = _RUNNERS[cfg.kind](cfg, override)
    inputs = {k: v for k, v in cfg.inputs().items() if not k.startswith("_")}
    head = {"experiment": cfg.id, "kind": cfg.kind, "inputs_digest": digest(inputs),
            "timestamp": os.environ.get("SOURCE_DATE_EPOCH")}
    res.summary = _jsonable({**head, **res.summary, "override_hypothesis": override})
    return res
