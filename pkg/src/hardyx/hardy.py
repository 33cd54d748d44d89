"""Hardy-type quasi-norms and norm-equivalence experiments."""

from __future__ import annotations

import csv
import io
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import Grid, GridFunction, TLadder, geometric_ladder, sample
from .halfspace import HarmonicVector, TensorField, harmonic_vector_from
from .maximal import (
    RadiusSet,
    Template,
    default_radii,
    nontangential_maximal,
    petree_maximal,
    poisson_maximal,
)
from .operators import HalfSpaceField, RieszPath, poisson_kernel, riesz_compose
from .spaces import SpaceSpec, ValidityReport, WeightedLebesgue, quasi_norm, range_validator

__all__ = [
    "HardyConfig",
    "TestFamily",
    "EquivalenceReport",
    "FAMILY_KINDS",
    "PAIRS",
    "hardy_norm",
    "hardy_norm_poisson",
    "halfspace_hardy_norm",
    "vector_hardy_norm",
    "riesz_paths",
    "riesz_hardy_terms",
    "riesz_hardy_norm",
    "make_test_family",
    "equivalence_experiment",
    "thread_count",
]

DEFAULT_SPREAD_BOUND = 10.0


def thread_count() -> int:
    """Worker cap from ``HARDYX_THREADS`` (default: up to 4 cores)."""
    raw = os.environ.get("HARDYX_THREADS")
    if raw:
        try:
            k = int(raw)
        except ValueError:
            raise ValueError(f"HARDYX_THREADS must be an integer, got {raw!r}") from None
        return max(1, k)
    return max(1, min(4, os.cpu_count() or 1))


@dataclass(frozen=True)
class HardyConfig:
    """Smoothing template, Petree exponent ``b``, ladder, radii and grand-dictionary order."""

    phi: Template
    b: float
    ladder: TLadder
    radii: RadiusSet
    order: int = 2

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")

    @classmethod
    def default(cls, grid: Grid, b: float | None = None, ladder: TLadder | None = None,
                width: float = 1.0, order: int = 2) -> "HardyConfig":
        ladder = geometric_ladder(grid) if ladder is None else ladder.validate_for(grid)
        return cls(Template.gaussian(grid.n, width), 2 * grid.n + 2 if b is None else float(b),
                   ladder, default_radii(grid), order)


def hardy_norm(f: GridFunction, X: SpaceSpec, cfg: HardyConfig) -> float:
    """``|| M_b**(f; phi) ||_X``."""
    return quasi_norm(petree_maximal(f, cfg.phi, cfg.b, cfg.ladder), X)


def hardy_norm_poisson(f: GridFunction, X: SpaceSpec, cfg: HardyConfig) -> float:
    """``|| M(f; P) ||_X`` with the non-tangential Poisson maximal function."""
    return quasi_norm(poisson_maximal(f, cfg.ladder), X)


def halfspace_hardy_norm(u: HalfSpaceField, X: SpaceSpec) -> float:
    return quasi_norm(nontangential_maximal(u), X)


def vector_hardy_norm(F: HarmonicVector | TensorField, X: SpaceSpec) -> float:
    """``max_l || |F(., t_l)| ||_X``."""
    mag = F.magnitude()
    return max(quasi_norm(level, X) for level in mag.levels())


def riesz_paths(n: int, m: int) -> list[tuple[int, ...]]:
    """``()`` followed by every index tuple in ``{1..n}^l``, ``l = 1..m``."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    out = [()]
    for l in range(1, m + 1):
        out += list(itertools.product(range(1, n + 1), repeat=l))
    return out


def riesz_hardy_terms(f: GridFunction, X: SpaceSpec, m: int) -> list[tuple[tuple[int, ...], float]]:
    """``(path, ||R_path f||_X)`` for every term of the m-th order Riesz--Hardy norm."""
    return [(p, quasi_norm(riesz_compose(f, RieszPath(p)), X)) for p in riesz_paths(f.grid.n, m)]


def riesz_hardy_norm(f: GridFunction, X: SpaceSpec, m: int = 1) -> float:
    """``||f||_X + sum_{l<=m} sum_{j_1..j_l} ||R_{j_1}...R_{j_l} f||_X``."""
    return float(sum(v for _, v in riesz_hardy_terms(f, X, m)))


# --- test families ----------------------------------------------------------

FAMILY_KINDS = ("dilated-gaussians", "translated-atoms", "random-bandlimited", "poisson-kernels", "mixed")


@dataclass(frozen=True)
class TestFamily:
    __test__ = False

    kind: str
    params: dict
    members: tuple[GridFunction, ...]
    labels: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def mean_zero(self) -> "TestFamily":
        return TestFamily(self.kind, dict(self.params),
                          tuple(f.with_values(f.values - f.values.mean()) for f in self.members),
                          self.labels)

    def map(self, fn: Callable[[GridFunction], GridFunction]) -> "TestFamily":
        return TestFamily(self.kind, dict(self.params), tuple(fn(f) for f in self.members), self.labels)


def _width_range(grid: Grid, params: dict) -> tuple[float, float]:
    lo = float(params.get("min_width", 4 * grid.h))
    hi = float(params.get("max_width", grid.L / 8))
    if not (grid.h <= lo <= hi <= grid.L / 4):
        raise ValueError(f"width range [{lo:g}, {hi:g}] outside [h, L/4] = [{grid.h:g}, {grid.L / 4:g}]")
    return lo, hi


def _log_widths(lo: float, hi: float, count: int) -> np.ndarray:
    return np.geomspace(lo, hi, count) if count > 1 else np.array([lo])


def _gaussian(grid: Grid, center: np.ndarray, width: float) -> GridFunction:
    return sample(lambda *x: width ** -grid.n
                  * np.exp(-np.pi * sum(((xi - c) / width) ** 2 for xi, c in zip(x, center))), grid)


def _bump(grid: Grid, center: np.ndarray, radius: float) -> np.ndarray:
    d2 = 0.0
    for xi, c in zip(grid.coordinates(), center):
        d = np.abs(xi - c) % grid.L
        d2 = d2 + (np.minimum(d, grid.L - d) / radius) ** 2
    d2 = np.broadcast_to(d2, grid.shape)
    out = np.zeros(grid.shape)
    inside = d2 < 1
    out[inside] = np.exp(1 - 1 / (1 - d2[inside]))
    return out


def _gaussians(grid, count, params, rng):
    lo, hi = _width_range(grid, params)
    ws = _log_widths(lo, hi, count)
    return [_gaussian(grid, grid.center, w) for w in ws], [f"gaussian(w={w:.6g})" for w in ws]


def _atoms(grid, count, params, rng):
    lo, hi = _width_range(grid, params)
    out, labels = [], []
    for _ in range(count):
        c = grid.center + rng.uniform(-grid.L / 8, grid.L / 8, grid.n)
        r = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        v = _bump(grid, c, r) / r**grid.n
        out.append(GridFunction(grid, v - v.mean()))
        labels.append(f"atom(r={r:.6g})")
    return out, labels


def _bandlimited(grid, count, params, rng):
    kmax = float(params.get("max_mode", grid.N // 8))
    k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
    kk = np.sqrt(sum(a**2 for a in np.meshgrid(*([k] * grid.n), indexing="ij", sparse=True)))
    keep = kk <= kmax
    out, labels = [], []
    for i in range(count):
        c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        v = np.fft.ifftn(np.where(keep, c, 0.0), norm="ortho").real
        out.append(GridFunction(grid, v / np.max(np.abs(v))))
        labels.append(f"bandlimited({i})")
    return out, labels


def _poisson_kernels(grid, count, params, rng):
    lo = float(params.get("min_t", 2 * grid.h))
    hi = float(params.get("max_t", grid.L / 8))
    ts = _log_widths(lo, hi, count)
    return [poisson_kernel(grid, t) for t in ts], [f"poisson(t={t:.6g})" for t in ts]


_BUILDERS = {
    "dilated-gaussians": _gaussians,
    "translated-atoms": _atoms,
    "random-bandlimited": _bandlimited,
    "poisson-kernels": _poisson_kernels,
}


def make_test_family(kind: str, params: dict | None, grid: Grid) -> TestFamily:
    """Seeded family of test functions.

    ``params``: ``count`` (default 20), ``seed`` (default 0) and per-kind
    ranges (``min_width``/``max_width``, ``max_mode``, ``min_t``/``max_t``).
    ``mixed`` splits ``count`` round-robin between Gaussians, atoms and
    band-limited fields.
    """
    params = dict(params or {})
    count = int(params.get("count", 20))
    if count < 1:
        raise ValueError("family needs at least one member")
    rng = np.random.default_rng(int(params.get("seed", 0)))
    if kind == "mixed":
        parts = ("dilated-gaussians", "translated-atoms", "random-bandlimited")
        sizes = [len(range(i, count, len(parts))) for i in range(len(parts))]
        built = [_BUILDERS[p](grid, s, params, rng) for p, s in zip(parts, sizes)]
        members, labels = [], []
        for i in range(count):
            fs, ls = built[i % len(parts)]
            members.append(fs[i // len(parts)])
            labels.append(ls[i // len(parts)])
    elif kind in _BUILDERS:
        members, labels = _BUILDERS[kind](grid, count, params, rng)
    else:
        raise ValueError(f"unknown family kind {kind!r}; expected one of {FAMILY_KINDS}")
    return TestFamily(kind, params, tuple(members), tuple(labels))


# --- equivalence experiments ------------------------------------------------

PAIRS = {
    "riesz": "hardy_norm vs riesz_hardy_norm",
    "isom": "hardy_norm vs vector_hardy_norm(harmonic_vector_from)",
    "poisson": "hardy_norm_poisson vs hardy_norm",
}


def _theorem_id(pair: str, m: int) -> str:
    if pair == "riesz":
        return "thm-re" if m == 1 else "thm-h-re"
    return {"isom": "isom", "poisson": "thm-p"}[pair]


@dataclass(frozen=True)
class EquivalenceReport:
    theorem: str
    pair: str
    rows: tuple[tuple[int, float, float, float], ...]
    validity: ValidityReport | None = None
    spread_bound: float = DEFAULT_SPREAD_BOUND
    labels: tuple[str, ...] = field(default=(), compare=False)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r[3] for r in self.rows])

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min())

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio

    @property
    def in_hypothesis(self) -> bool | None:
        return None if self.validity is None else self.validity.valid

    @property
    def verified(self) -> bool:
        return bool(self.spread <= self.spread_bound)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["member_id", "norm_a", "norm_b", "ratio"])
        for i, a, b, r in self.rows:
            w.writerow([i, repr(float(a)), repr(float(b)), repr(float(r))])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "theorem": self.theorem,
            "pair": PAIRS[self.pair],
            "members": len(self.rows),
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "spread": self.spread,
            "spread_bound": self.spread_bound,
            "verified": self.verified,
            "hypothesis": "unchecked" if self.validity is None
            else ("in-hypothesis" if self.validity.valid else "out-of-hypothesis"),
            "validity": None if self.validity is None else self.validity.to_dict(),
        }


def _pair_values(pair: str, X: SpaceSpec, m: int, cfg: HardyConfig, f: GridFunction) -> tuple[float, float]:
    if pair == "riesz":
        return hardy_norm(f, X, cfg), riesz_hardy_norm(f, X, m)
    if pair == "isom":
        return hardy_norm(f, X, cfg), vector_hardy_norm(harmonic_vector_from(f, cfg.ladder), X)
    if pair == "poisson":
        return hardy_norm_poisson(f, X, cfg), hardy_norm(f, X, cfg)
    raise ValueError(f"unknown norm pair {pair!r}; expected one of {sorted(PAIRS)}")


def equivalence_experiment(family: TestFamily | Sequence[GridFunction], X: SpaceSpec, m: int,
                           cfg: HardyConfig, pair: str = "riesz",
                           spread_bound: float = DEFAULT_SPREAD_BOUND) -> EquivalenceReport:
    """Ratios ``norm_a / norm_b`` over the family for the chosen pair.

    The hypothesis check is attached to the report; runs outside the
    hypothesis range are still carried out and labeled.
    """
    members = list(family)
    if not members:
        raise ValueError("empty family")
    if pair not in PAIRS:
        raise ValueError(f"unknown norm pair {pair!r}; expected one of {sorted(PAIRS)}")
    n = members[0].grid.n
    validity = None if isinstance(X, WeightedLebesgue) else range_validator(X, m, n)
    workers = min(thread_count(), len(members))
    job = lambda f: _pair_values(pair, X, m, cfg, f)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(job, members))
    else:
        vals = [job(f) for f in members]
    rows = []
    for i, (a, b) in enumerate(vals):
        if not (a > 0 and b > 0):
            raise ValueError(f"member {i} has a zero norm (a={a}, b={b}); ratio undefined")
        rows.append((i, a, b, a / b))
    labels = tuple(getattr(family, "labels", ()) or ())
    return EquivalenceReport(_theorem_id(pair, m), pair, tuple(rows), validity, spread_bound, labels)
