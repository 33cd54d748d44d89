"""Quasi-norms of ball quasi-Banach function spaces on the lattice.

Each :class:`SpaceSpec` variant is a small frozen dataclass; ``quasi_norm``
dispatches on it.  Radial structures (Herz annuli, the Muckenhoupt weight)
are centered at the torus center, which plays the role of the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gamma, inf, pi
from typing import Any, Sequence

import numpy as np

from .grid import Grid, GridFunction, discrete_lp_norm
from .maximal import RadiusSet, all_radii, ball_sums, default_radii, hl_maximal

__all__ = [
    "SpaceSpec",
    "Lebesgue",
    "WeightedLebesgue",
    "Lorentz",
    "MixedLebesgue",
    "LocalHerz",
    "MixedHerz",
    "Morrey",
    "Weight",
    "OmegaSpec",
    "PowerLaw",
    "Sampled",
    "MOIndices",
    "Hypothesis",
    "ValidityReport",
    "StepFunction",
    "quasi_norm",
    "rearrangement",
    "lorentz_norm",
    "mixed_norm",
    "herz_norm_local",
    "mixed_herz_norm",
    "morrey_norm",
    "muckenhoupt_weight",
    "doubling_constant",
    "mo_indices",
    "bp_condition_probe",
    "range_validator",
    "space_from_dict",
]


def _exp(x) -> float:
    """Exponent from config: numbers, or 'inf'/'infinity'/None for infinity."""
    if x is None:
        return inf
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "+inf"):
            return inf
        return float(x)
    return float(x)


def _exp_out(x: float):
    return "inf" if math.isinf(x) else x


def _positive(name: str, x: float, allow_inf: bool = False) -> None:
    if not (x > 0) or (math.isinf(x) and not allow_inf):
        raise ValueError(f"{name} must be positive{' (or inf)' if allow_inf else ''}, got {x}")


# --- omega and its Matuszewska--Orlicz indices ------------------------------


@dataclass(frozen=True)
class PowerLaw:
    alpha: float

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.alpha

    def to_dict(self) -> dict:
        return {"kind": "PowerLaw", "alpha": self.alpha}


@dataclass(frozen=True)
class Sampled:
    """Dyadic samples ``omega(2^k)`` for ``k = k_min, ..., k_min + len(values) - 1``.

    Off the dyadic points omega is interpolated linearly in ``(log t, log omega)``.
    """

    k_min: int
    values: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        if any(not (x > 0 and math.isfinite(x)) for x in v):
            raise ValueError("omega samples must be positive and finite")
        object.__setattr__(self, "values", v)

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.values) - 1

    @classmethod
    def from_function(cls, fn, k_min: int, k_max: int) -> "Sampled":
        return cls(k_min, tuple(float(fn(2.0**k)) for k in range(k_min, k_max + 1)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        s = np.log2(t)
        if np.any(s < self.k_min - 1e-9) or np.any(s > self.k_max + 1e-9):
            raise ValueError(f"omega evaluated outside its sample range [2^{self.k_min}, 2^{self.k_max}]")
        ks = np.arange(self.k_min, self.k_max + 1)
        return np.exp2(np.interp(s, ks, np.log2(self.values)))

    def to_dict(self) -> dict:
        return {"kind": "Sampled", "k_min": self.k_min, "values": list(self.values)}


OmegaSpec = PowerLaw | Sampled


def omega_from_dict(d: dict) -> OmegaSpec:
    kind = d.get("kind", "PowerLaw")
    if kind == "PowerLaw":
        return PowerLaw(float(d["alpha"]))
    if kind == "Sampled":
        return Sampled(int(d["k_min"]), tuple(d["values"]))
    raise ValueError(f"unknown omega kind {kind!r}")


@dataclass(frozen=True)
class MOIndices:
    m0: float
    M0: float
    m_inf: float
    M_inf: float


_MO_T_POINTS = 64


def _mo_branch(omega: Sampled, zero: bool) -> tuple[float, float]:
    """(lower, upper) index of one branch from the sampled ratios.

    The limit in ``h`` is read off as max/min over the two deepest decades
    that still leave room for a two-decade ``t`` range.  Slowly varying
    factors bias the estimate by about ``1 / |log h|``, so depth matters.
    """
    if zero:
        lo, hi = omega.k_min, min(omega.k_max, 0)
    else:
        lo, hi = max(omega.k_min, 0), omega.k_max
    depth = hi - lo
    if depth < 8:
        raise ValueError(
            f"need at least 8 dyadic decades on the {'0' if zero else 'infinity'} branch, got {depth}"
        )
    t_depth = 2
    window = 2
    s = np.linspace(1.0 / _MO_T_POINTS, t_depth, _MO_T_POINTS)
    if zero:
        t = 2.0 ** (-s)
        h = 2.0 ** np.arange(lo + t_depth, lo + t_depth + window + 1)
    else:
        t = 2.0**s
        h = 2.0 ** np.arange(hi - t_depth - window, hi - t_depth + 1)
    ratios = omega(np.outer(h, t)) / omega(h)[:, None]
    upper_lim = ratios.max(axis=0)
    lower_lim = ratios.min(axis=0)
    lt = np.log(t)
    if zero:
        m = np.max(np.log(upper_lim) / lt)
        M = np.min(np.log(lower_lim) / lt)
    else:
        m = np.max(np.log(lower_lim) / lt)
        M = np.min(np.log(upper_lim) / lt)
    return float(m), float(M)


def mo_indices(omega: OmegaSpec) -> MOIndices:
    """Matuszewska--Orlicz indices ``(m_0, M_0, m_inf, M_inf)``.

    Closed form for power laws; for samples the ``h -> 0`` / ``h -> inf``
    limits are approximated on the deepest part of the sample range.
    """
    if isinstance(omega, PowerLaw):
        a = float(omega.alpha)
        return MOIndices(a, a, a, a)
    m0, M0 = _mo_branch(omega, zero=True)
    mi, Mi = _mo_branch(omega, zero=False)
    return MOIndices(m0, M0, mi, Mi)


# --- weights ----------------------------------------------------------------


@dataclass(frozen=True)
class Weight:
    values: GridFunction
    epsilon: float | None = None

    def __post_init__(self):
        if np.any(self.values.values <= 0):
            raise ValueError("weight must be strictly positive")

    @property
    def grid(self) -> Grid:
        return self.values.grid

    def measure(self, mask: np.ndarray) -> float:
        """``mu(E) = sum_{x in E} w(x) h^n``."""
        return float(np.sum(self.values.values[mask]) * self.grid.cell_volume)

    def scaled(self, c: float) -> "Weight":
        return Weight(self.values * c, self.epsilon)


def _unit_ball(grid: Grid, radius: float = 1.0) -> GridFunction:
    return GridFunction(grid, (grid.distance_from_center() < radius).astype(float))


def muckenhoupt_weight(grid: Grid, epsilon: float, radii: RadiusSet | None = None) -> Weight:
    """``w = M(1_{B(center, 1)})^epsilon``.

    The maximal function also takes the whole torus as a candidate, so the
    weight stays positive in corners no ball of radius ``<= L/2`` reaches.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    ind = _unit_ball(grid)
    m = hl_maximal(ind, radii).values
    m = np.maximum(m, ind.values.sum() / grid.size)
    return Weight(GridFunction(grid, m**epsilon), epsilon)


def doubling_constant(w: Weight, radii: RadiusSet | None = None) -> float:
    """``max_{x, r} mu(B(x, 2r)) / mu(B(x, r))`` over radii with ``2r <= L/2``."""
    g = w.grid
    radii = default_radii(g) if radii is None else radii
    worst = 1.0
    for r in radii:
        if 2 * r > g.L / 2 * (1 + 1e-12):
            continue
        small, _ = ball_sums(w.values.values, g, r)
        big, _ = ball_sums(w.values.values, g, 2 * r)
        worst = max(worst, float(np.max(big / small)))
    return worst


@dataclass(frozen=True)
class BpReport:
    ratios: tuple[float, ...]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    @property
    def min_ratio(self) -> float:
        return min(self.ratios)


def _periodic_distance(grid: Grid, x: Sequence[float]) -> np.ndarray:
    d2 = 0.0
    for axis, c in zip(grid.coordinates(), x):
        d = np.abs(axis - c) % grid.L
        d2 = d2 + np.minimum(d, grid.L - d) ** 2
    return np.sqrt(np.broadcast_to(d2, grid.shape))


def bp_condition_probe(w: Weight, p: float, samples: Sequence[tuple[Sequence[float], float]]) -> BpReport:
    """Ratios ``LHS / RHS`` of the B_p decay-integral bound at each ``(x, t)``.

    ``LHS = sum_y w(y) h^n / (t + dist(x, y))^(n p)`` and
    ``RHS = t^(-n p) mu(B(x, t))``.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    g = w.grid
    npow = g.n * p
    out = []
    for x, t in samples:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        d = _periodic_distance(g, x)
        lhs = float(np.sum(w.values.values / (t + d) ** npow) * g.cell_volume)
        rhs = t ** (-npow) * w.measure(d < t * (1 - 1e-12))
        out.append(lhs / rhs if rhs > 0 else inf)
    return BpReport(tuple(out))


# --- space variants ---------------------------------------------------------


@dataclass(frozen=True)
class Lebesgue:
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _exp(self.p))
        _positive("p", self.p, allow_inf=True)

    def to_dict(self):
        return {"kind": "Lebesgue", "p": _exp_out(self.p)}


@dataclass(frozen=True)
class WeightedLebesgue:
    p: float
    weight: Weight = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", _exp(self.p))
        _positive("p", self.p)

    def to_dict(self):
        return {"kind": "WeightedLebesgue", "p": self.p, "weight": {"epsilon": self.weight.epsilon}}


@dataclass(frozen=True)
class Lorentz:
    p: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "p", _exp(self.p))
        object.__setattr__(self, "r", _exp(self.r))
        _positive("p", self.p)
        _positive("r", self.r, allow_inf=True)

    def to_dict(self):
        return {"kind": "Lorentz", "p": self.p, "r": _exp_out(self.r)}


@dataclass(frozen=True)
class MixedLebesgue:
    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(_exp(x) for x in self.p)
        for x in p:
            _positive("p_i", x, allow_inf=True)
        object.__setattr__(self, "p", p)

    def to_dict(self):
        return {"kind": "MixedLebesgue", "p": [_exp_out(x) for x in self.p]}


@dataclass(frozen=True)
class LocalHerz:
    p: float
    r: float
    omega: OmegaSpec

    def __post_init__(self):
        object.__setattr__(self, "p", _exp(self.p))
        object.__setattr__(self, "r", _exp(self.r))
        _positive("p", self.p)
        _positive("r", self.r, allow_inf=True)

    def to_dict(self):
        return {"kind": "LocalHerz", "p": self.p, "r": _exp_out(self.r), "omega": self.omega.to_dict()}


@dataclass(frozen=True)
class MixedHerz:
    alpha: tuple[float, ...]
    p: tuple[float, ...]
    q: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.alpha)
        p = tuple(_exp(x) for x in self.p)
        q = tuple(_exp(x) for x in self.q)
        if not len(a) == len(p) == len(q):
            raise ValueError("alpha, p and q must have the same length")
        for x in p + q:
            _positive("exponent", x, allow_inf=True)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def to_dict(self):
        return {"kind": "MixedHerz", "alpha": list(self.alpha),
                "p": [_exp_out(x) for x in self.p], "q": [_exp_out(x) for x in self.q]}


@dataclass(frozen=True)
class Morrey:
    p: float
    r: float
    radii: RadiusSet | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", _exp(self.p))
        object.__setattr__(self, "r", _exp(self.r))
        _positive("p", self.p)
        _positive("r", self.r, allow_inf=True)
        if self.p > self.r:
            raise ValueError(f"Morrey space needs p <= r, got p={self.p}, r={self.r}")

    def to_dict(self):
        return {"kind": "Morrey", "p": self.p, "r": _exp_out(self.r)}


SpaceSpec = Lebesgue | WeightedLebesgue | Lorentz | MixedLebesgue | LocalHerz | MixedHerz | Morrey


def space_from_dict(d: dict, grid: Grid | None = None) -> SpaceSpec:
    """Build a space from its structured-text form (``{"kind": ..., ...}``)."""
    d = dict(d)
    kind = d.pop("kind")
    if kind == "Lebesgue":
        return Lebesgue(d["p"])
    if kind == "WeightedLebesgue":
        if grid is None:
            raise ValueError("WeightedLebesgue needs a grid to build its weight")
        wd = d.get("weight", {})
        w = muckenhoupt_weight(grid, float(wd.get("epsilon", 0.5)), all_radii(grid))
        return WeightedLebesgue(d["p"], w)
    if kind == "Lorentz":
        return Lorentz(d["p"], d["r"])
    if kind == "MixedLebesgue":
        return MixedLebesgue(tuple(d["p"]))
    if kind == "LocalHerz":
        return LocalHerz(d["p"], d["r"], omega_from_dict(d["omega"]))
    if kind == "MixedHerz":
        return MixedHerz(tuple(d["alpha"]), tuple(d["p"]), tuple(d["q"]))
    if kind == "Morrey":
        return Morrey(d["p"], d["r"])
    raise ValueError(f"unknown space kind {kind!r}")


# --- evaluators -------------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """Non-increasing step function: height ``heights[i]`` on ``[i c, (i+1) c)``."""

    heights: np.ndarray
    cell: float

    def pairs(self) -> list[tuple[float, float]]:
        """``(value, cumulative measure at the right end of the step)``."""
        return [(float(v), (i + 1) * self.cell) for i, v in enumerate(self.heights)]

    def __call__(self, t):
        i = np.floor(np.asarray(t, dtype=float) / self.cell).astype(int)
        out = np.zeros(i.shape)
        ok = (i >= 0) & (i < len(self.heights))
        out[ok] = self.heights[i[ok]]
        return out


def rearrangement(f: GridFunction) -> StepFunction:
    """Decreasing rearrangement ``f*`` of the simple function on the grid."""
    h = np.sort(np.abs(f.values).ravel())[::-1]
    return StepFunction(h, f.grid.cell_volume)


def _power_increments(count: int, a: float) -> np.ndarray:
    """``i^a - (i-1)^a`` for ``i = 1..count`` without cancellation."""
    i = np.arange(1, count + 1, dtype=float)
    out = np.empty(count)
    out[0] = 1.0
    j = i[1:] - 1
    out[1:] = j**a * np.expm1(a * np.log1p(1.0 / j))
    return out


def lorentz_norm(f: GridFunction, p: float, r: float) -> float:
    """Exact Lorentz quasi-norm of the step function ``f*``."""
    p, r = _exp(p), _exp(r)
    _positive("p", p)
    _positive("r", r, allow_inf=True)
    fs = rearrangement(f)
    nz = fs.heights[fs.heights > 0]
    if nz.size == 0:
        return 0.0
    c = fs.cell
    if math.isinf(r):
        T = np.arange(1, nz.size + 1) * c
        return float(np.max(T ** (1 / p) * nz))
    a = r / p
    incr = _power_increments(nz.size, a) * c**a
    return float((np.sum(nz**r * incr) * (p / r)) ** (1 / r))


def _reduce_axis(a: np.ndarray, p: float, h: float, axis: int) -> np.ndarray:
    if math.isinf(p):
        return np.max(a, axis=axis)
    return (np.sum(a**p, axis=axis) * h) ** (1 / p)


def mixed_norm(f: GridFunction, p: Sequence[float]) -> float:
    """Iterated norm: axis 1 with ``p_1`` innermost, then axis 2, and so on."""
    g = f.grid
    p = [_exp(x) for x in p]
    if len(p) != g.n:
        raise ValueError(f"need {g.n} exponents for a {g.n}-dimensional grid, got {len(p)}")
    a = np.abs(f.values).astype(float)
    for pi_ in p:
        a = _reduce_axis(a, pi_, g.h, axis=0)
    return float(a)


def _dyadic_range(grid: Grid) -> tuple[int, int]:
    """Annulus indices ``k_min..k_max`` admissible on the torus.

    The lowest annulus absorbs the center cell; the top one satisfies
    ``2^k_max <= L/2``.
    """
    k_min = int(math.floor(math.log2(grid.h) + 1e-12)) + 1
    k_max = int(math.floor(math.log2(grid.L / 2) + 1e-12))
    return k_min, k_max


def _annulus_index(dist: np.ndarray, k_min: int, k_max: int) -> np.ndarray:
    """Annulus index ``k`` with ``2^(k-1) <= dist < 2^k``; -1 outside the admissible range."""
    with np.errstate(divide="ignore"):
        k = np.floor(np.log2(np.where(dist > 0, dist, 1.0)) + 1e-12).astype(int) + 1
    k = np.where(dist > 0, k, k_min)
    # guard against log2 rounding at exact dyadic radii
    k = np.where(dist >= 2.0**k, k + 1, k)
    k = np.where(dist < 2.0 ** (k - 1), k - 1, k)
    k = np.maximum(k, k_min)
    return np.where(k > k_max, -1, k)


def _omega_values(omega: OmegaSpec, ks: np.ndarray) -> np.ndarray:
    return np.asarray(omega(2.0 ** ks.astype(float)), dtype=float)


def herz_norm_local(f: GridFunction, p: float, r: float, omega: OmegaSpec,
                    support_tol: float = 1e-12) -> float:
    """Local generalized Herz quasi-norm over annuli centered at the torus center.

    ``f`` must be supported in ``B(center, L/4)``; mass fraction (in
    ``|f|^p``) beyond it above ``support_tol`` raises.
    """
    g = f.grid
    p, r = _exp(p), _exp(r)
    _positive("p", p)
    _positive("r", r, allow_inf=True)
    a = np.abs(f.values).astype(float) ** p
    total = a.sum()
    if total == 0:
        return 0.0
    dist = g.distance_from_center()
    outside = a[dist >= g.L / 4].sum() / total
    if outside > support_tol:
        raise ValueError(
            f"f is not supported in B(center, L/4): {outside:.3e} of its L^{p:g} mass lies outside"
        )
    k_min, k_max = _dyadic_range(g)
    idx = _annulus_index(dist, k_min, k_max)
    ks = np.arange(k_min, k_max + 1)
    pieces = np.array([(a[idx == k].sum() * g.cell_volume) ** (1 / p) for k in ks])
    w = _omega_values(omega, ks)
    terms = w * pieces
    if math.isinf(r):
        return float(terms.max())
    return float(np.sum(terms**r) ** (1 / r))


def mixed_herz_norm(f: GridFunction, alpha: Sequence[float], p: Sequence[float],
                    q: Sequence[float]) -> float:
    """Mixed-norm Herz quasi-norm, reduced axis by axis (axis 1 innermost).

    Axis ``i`` maps ``N(x_i) -> (sum_k 2^(k p_i alpha_i) (int_{R_k} N^q_i dx_i)^(p_i/q_i))^(1/p_i)``
    with dyadic shells ``R_k = {2^(k-1) <= |x_i - c| < 2^k}``.  The lowest
    shell absorbs the center; the top shell is the first one reaching past
    ``L/2`` and is cut off by the torus, so the shells cover every axis.
    """
    g = f.grid
    alpha = [float(x) for x in alpha]
    p = [_exp(x) for x in p]
    q = [_exp(x) for x in q]
    if not len(alpha) == len(p) == len(q) == g.n:
        raise ValueError(f"need {g.n} entries in alpha, p and q")
    k_min, k_top = _dyadic_range(g)
    k_max = k_top + 1
    ks = np.arange(k_min, k_max + 1)
    d1 = np.abs((np.arange(g.N) - g.N // 2) * g.h)
    shell = _annulus_index(d1, k_min, k_max)
    a = np.abs(f.values).astype(float)
    for ai, pi_, qi in zip(alpha, p, q):
        # a has the current axis first
        shells = []
        for k in ks:
            sel = a[shell == k]
            if math.isinf(qi):
                val = sel.max(axis=0) if sel.shape[0] else np.zeros(a.shape[1:])
            else:
                val = (np.sum(sel**qi, axis=0) * g.h) ** (1 / qi)
            shells.append(val)
        shells = np.stack(shells)  # (K, ...)
        wts = 2.0 ** (ks * ai)
        wts = wts.reshape((-1,) + (1,) * (shells.ndim - 1))
        if math.isinf(pi_):
            a = np.max(wts * shells, axis=0)
        else:
            a = np.sum((wts * shells) ** pi_, axis=0) ** (1 / pi_)
    return float(a)


def morrey_norm(f: GridFunction, p: float, r: float, radii: RadiusSet | None = None) -> float:
    """Sup over lattice-centered balls (and the whole torus) of ``|B|^(1/r-1/p) ||f 1_B||_p``."""
    g = f.grid
    p, r = _exp(p), _exp(r)
    if p > r:
        raise ValueError(f"Morrey norm needs p <= r, got p={p}, r={r}")
    radii = default_radii(g) if radii is None else radii
    a = np.abs(f.values).astype(float) ** p
    e = (0.0 if math.isinf(r) else 1 / r) - 1 / p
    best = g.volume**e * (a.sum() * g.cell_volume) ** (1 / p)
    seen = set()
    for rad in radii:
        s, count = ball_sums(a, g, rad)
        if count in seen:
            continue
        seen.add(count)
        vol = count * g.cell_volume
        best = max(best, float(np.max(vol**e * (s * g.cell_volume) ** (1 / p))))
    return float(best)


def quasi_norm(f: GridFunction, X: SpaceSpec) -> float:
    if isinstance(X, Lebesgue):
        return discrete_lp_norm(f, X.p)
    if isinstance(X, WeightedLebesgue):
        w = X.weight.values.values
        if w.shape != f.values.shape:
            raise ValueError("weight lives on a different grid")
        return float((np.sum(np.abs(f.values) ** X.p * w) * f.grid.cell_volume) ** (1 / X.p))
    if isinstance(X, Lorentz):
        return lorentz_norm(f, X.p, X.r)
    if isinstance(X, MixedLebesgue):
        return mixed_norm(f, X.p)
    if isinstance(X, LocalHerz):
        return herz_norm_local(f, X.p, X.r, X.omega)
    if isinstance(X, MixedHerz):
        return mixed_herz_norm(f, X.alpha, X.p, X.q)
    if isinstance(X, Morrey):
        return morrey_norm(f, X.p, X.r, X.radii)
    raise ValueError(f"unsupported space {X!r}")


def unit_norm(grid: Grid, X: SpaceSpec) -> float:
    """``||1||_X`` on the torus."""
    return quasi_norm(GridFunction(grid, np.ones(grid.shape)), X)


# --- hypothesis ranges ------------------------------------------------------


@dataclass(frozen=True)
class Hypothesis:
    description: str
    holds: bool
    margin: float

    def to_dict(self) -> dict:
        return {"description": self.description, "holds": self.holds,
                "margin": _exp_out(self.margin) if self.margin != -inf else "-inf"}


@dataclass(frozen=True)
class ValidityReport:
    theorem: str
    hypotheses: tuple[Hypothesis, ...]

    @property
    def valid(self) -> bool:
        return all(h.holds for h in self.hypotheses)

    def violated(self) -> list[Hypothesis]:
        return [h for h in self.hypotheses if not h.holds]

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "valid": self.valid,
                "hypotheses": [h.to_dict() for h in self.hypotheses]}


def _in_open(x: float, lo: float, hi: float = inf) -> tuple[bool, float]:
    """Membership in ``(lo, hi)`` and the signed distance to its boundary."""
    if math.isnan(x):
        return False, -inf
    margin = min(x - lo, hi - x) if not (math.isinf(x) and math.isinf(hi)) else 0.0
    if math.isinf(x) and x > 0 and math.isinf(hi):
        return False, 0.0
    return (lo < x < hi), float(margin)


def _in_left_open(x: float, lo: float) -> tuple[bool, float]:
    """Membership in ``(lo, inf]``."""
    return x > lo, float(x - lo)


def range_validator(X: SpaceSpec, m: int, n: int) -> ValidityReport:
    """Check the hypotheses under which the ``m``-th order Riesz characterization holds for ``X``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    thr = (n - 1) / (n + m - 1)
    thr_s = f"{thr:.6g}"
    H = []

    def add(desc, res):
        H.append(Hypothesis(desc, bool(res[0]), res[1]))

    if isinstance(X, (Lebesgue, Lorentz)):
        p = X.p
        r = X.p if isinstance(X, Lebesgue) else X.r
        add(f"p = {p:g} in ((n-1)/(n+m-1), inf) = ({thr_s}, inf)", _in_open(p, thr))
        add(f"r = {r:g} in (0, inf)", _in_open(r, 0.0))
        return ValidityReport("lorentz (riesz-ls)", tuple(H))
    if isinstance(X, MixedLebesgue):
        if len(X.p) != n:
            raise ValueError("exponent vector length differs from n")
        for i, pi_ in enumerate(X.p, 1):
            add(f"p_{i} = {pi_:g} in (0, inf)", _in_open(pi_, 0.0))
        pm = min(X.p)
        add(f"p_- = {pm:g} in ((n-1)/(n+m-1), inf) = ({thr_s}, inf)", _in_open(pm, thr))
        return ValidityReport("mixed-norm Lebesgue (riesz-mnls)", tuple(H))
    if isinstance(X, LocalHerz):
        p, r = X.p, X.r
        idx = mo_indices(X.omega)
        add(f"p = {p:g} in ({thr_s}, inf)", _in_open(p, thr))
        add(f"r = {r:g} in ({thr_s}, inf]", _in_left_open(r, thr))
        add(f"m_0(omega) = {idx.m0:.6g} in (-n/p, inf) = ({-n / p:.6g}, inf)", _in_open(idx.m0, -n / p))
        add(f"m_inf(omega) = {idx.m_inf:.6g} in (-n/p, inf)", _in_open(idx.m_inf, -n / p))
        den = max(idx.M0, idx.M_inf) + n / p
        if den > 0:
            val = n / den
            add(f"n/(max{{M_0, M_inf}} + n/p) = {val:.6g} in ({thr_s}, inf)", _in_open(val, thr))
        else:
            add("n/(max{M_0, M_inf} + n/p) undefined (non-positive denominator)", (False, -inf))
        return ValidityReport("local generalized Herz (thm-re-mh)", tuple(H))
    if isinstance(X, MixedHerz):
        if len(X.p) != n:
            raise ValueError("exponent vector length differs from n")
        for i, (a, qi) in enumerate(zip(X.alpha, X.q), 1):
            add(f"alpha_{i} = {a:g} in (-1/q_{i}, inf) = ({-1 / qi:.6g}, inf)", _in_open(a, -1 / qi))
        for i, (pi_, qi) in enumerate(zip(X.p, X.q), 1):
            add(f"p_{i} = {pi_:g} in (0, inf)", _in_open(pi_, 0.0))
            add(f"q_{i} = {qi:g} in (0, inf)", _in_open(qi, 0.0))
        add(f"p_- = {min(X.p):g} in ({thr_s}, inf)", _in_open(min(X.p), thr))
        add(f"q_- = {min(X.q):g} in ({thr_s}, inf)", _in_open(min(X.q), thr))
        for i, (a, qi) in enumerate(zip(X.alpha, X.q), 1):
            s = a + 1 / qi
            if s > 0:
                add(f"(alpha_{i} + 1/q_{i})^-1 = {1 / s:.6g} in ({thr_s}, inf)", _in_open(1 / s, thr))
            else:
                add(f"(alpha_{i} + 1/q_{i})^-1 undefined (alpha_{i} + 1/q_{i} = {s:.6g} <= 0)",
                    (False, -inf))
        return ValidityReport("mixed-norm Herz (thm-re-mhz)", tuple(H))
    if isinstance(X, Morrey):
        add(f"0 < p = {X.p:g} <= r = {X.r:g} <= inf", (0 < X.p <= X.r, float(X.r - X.p)))
        add(f"p = {X.p:g} in ({thr_s}, inf)", _in_open(X.p, thr))
        return ValidityReport("Morrey (thm-re-mhre)", tuple(H))
    raise ValueError(f"no hypothesis set for space {type(X).__name__}")
