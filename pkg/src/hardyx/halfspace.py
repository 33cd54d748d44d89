"""Harmonic vectors and gradient tensors on the discrete upper half-space.

``x_0`` denotes the height ``t``; ``x_1..x_n`` are the torus axes.
x-derivatives are spectral, t-derivatives are finite differences on the ladder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial, pi
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.stats import norm as _normal
from scipy.stats import qmc

from .grid import Grid, GridFunction, TLadder
from .operators import HalfSpaceField, poisson_extend, riesz_transform

__all__ = [
    "HarmonicVector",
    "TensorField",
    "ResidualReport",
    "harmonic_vector_from",
    "cauchy_riemann_residual",
    "tensor_field_from",
    "symmetry_trace_check",
    "sphere_directions",
    "subharmonic_mean_value_check",
    "majorization_check",
]


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    l2: float
    breakdown: dict = field(default_factory=dict)
    scale: float = 1.0

    @property
    def relative(self) -> float:
        return self.max_abs / self.scale if self.scale > 0 else self.max_abs

    def to_dict(self) -> dict:
        return {"max_abs": self.max_abs, "l2": self.l2, "scale": self.scale,
                "relative": self.relative, "breakdown": dict(self.breakdown)}


@dataclass(frozen=True)
class HarmonicVector:
    """``F = (u_0, u_1, ..., u_n)`` on a shared grid and ladder."""

    components: tuple[HalfSpaceField, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) < 2:
            raise ValueError("a harmonic vector needs at least two components")
        g, lad = comps[0].grid, comps[0].ladder
        if any(c.grid != g or c.ladder != lad for c in comps):
            raise ValueError("components must share grid and ladder")
        if len(comps) != g.n + 1:
            raise ValueError(f"expected n+1 = {g.n + 1} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    @property
    def ladder(self) -> TLadder:
        return self.components[0].ladder

    def magnitude(self) -> HalfSpaceField:
        s = sum(np.abs(c.values) ** 2 for c in self.components)
        return self.components[0].with_values(np.sqrt(s))

    def permuted(self, order: Sequence[int]) -> "HarmonicVector":
        return HarmonicVector(tuple(self.components[i] for i in order))


def harmonic_vector_from(f: GridFunction, ladder: TLadder) -> HarmonicVector:
    """``(P_t * f, P_t * R_1 f, ..., P_t * R_n f)``."""
    ladder.validate_for(f.grid)
    comps = [poisson_extend(f, ladder)]
    comps += [poisson_extend(riesz_transform(f, j), ladder) for j in range(1, f.grid.n + 1)]
    return HarmonicVector(tuple(comps))


def _dx(values: np.ndarray, grid: Grid, j: int) -> np.ndarray:
    """Spectral ``d/dx_j`` of every level (axis 0 of ``values`` is the ladder)."""
    xi = grid.odd_frequencies()[j - 1]
    axes = tuple(range(1, grid.n + 1))
    v = np.fft.ifftn(np.fft.fftn(values, axes=axes) * (2j * pi * xi), axes=axes)
    return v if np.iscomplexobj(values) else v.real


def _dt(values: np.ndarray, ladder: TLadder) -> np.ndarray:
    return np.gradient(values, ladder.as_array(), axis=0, edge_order=2)


def _report(residuals: dict[str, np.ndarray], grid: Grid, scale: float = 1.0) -> ResidualReport:
    breakdown = {k: float(np.max(np.abs(r))) for k, r in residuals.items()}
    sq = sum(np.sum(np.abs(r) ** 2, axis=tuple(range(1, r.ndim))) for r in residuals.values())
    l2 = float(np.sqrt(np.mean(sq) * grid.cell_volume))
    return ResidualReport(max(breakdown.values()), l2, breakdown, scale)


def cauchy_riemann_residual(F: HarmonicVector) -> ResidualReport:
    """Residuals of ``sum_j d u_j / d x_j = 0`` and ``d u_j / d x_k = d u_k / d x_j``."""
    g, lad = F.grid, F.ladder
    if len(lad) < 3:
        raise ValueError(f"ladder needs at least 3 levels for t-derivatives, got {len(lad)}")
    u = [c.values for c in F.components]

    def d(k: int, v: np.ndarray) -> np.ndarray:
        return _dt(v, lad) if k == 0 else _dx(v, g, k)

    res = {"div": sum(d(j, u[j]) for j in range(g.n + 1))}
    for j, k in itertools.combinations(range(g.n + 1), 2):
        res[f"curl({j},{k})"] = d(k, u[j]) - d(j, u[k])
    scale = max(float(np.max(np.abs(v))) for v in u)
    return _report(res, g, scale)


def _sorted_index(idx: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in idx))


@dataclass(frozen=True)
class TensorField:
    """Symmetric rank-``m`` tensor; one stored component per sorted index tuple."""

    rank: int
    components: dict

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        comps = {_sorted_index(k): v for k, v in self.components.items()}
        if any(len(k) != self.rank for k in comps):
            raise ValueError("every component index must have length = rank")
        first = next(iter(comps.values()))
        if any(v.grid != first.grid or v.ladder != first.ladder for v in comps.values()):
            raise ValueError("components must share grid and ladder")
        object.__setattr__(self, "components", comps)

    @property
    def grid(self) -> Grid:
        return next(iter(self.components.values())).grid

    @property
    def ladder(self) -> TLadder:
        return next(iter(self.components.values())).ladder

    def __getitem__(self, idx: Sequence[int]) -> HalfSpaceField:
        return self.components[_sorted_index(idx)]

    def with_component(self, idx: Sequence[int], value: HalfSpaceField) -> "TensorField":
        comps = dict(self.components)
        comps[_sorted_index(idx)] = value
        return TensorField(self.rank, comps)

    def magnitude(self) -> HalfSpaceField:
        """``|T| = (sum over all index tuples |T_j|^2)^(1/2)``, counting each
        sorted tuple with its number of orderings."""
        total = 0.0
        for idx, v in self.components.items():
            total = total + _orderings(idx) * np.abs(v.values) ** 2
        return next(iter(self.components.values())).with_values(np.sqrt(total))


def _orderings(idx: tuple[int, ...]) -> int:
    out = factorial(len(idx))
    for _, grp in itertools.groupby(idx):
        out //= factorial(len(list(grp)))
    return out


def _axis_power(grid: Grid, j: int, a: int) -> np.ndarray:
    """``(2 pi i xi_j)^a``; odd powers vanish on the axis-j Nyquist plane."""
    xi = (grid.odd_frequencies() if a % 2 else grid.frequencies())[j - 1]
    return (2j * pi * xi) ** a


def tensor_field_from(f: GridFunction, m: int, ladder: TLadder) -> TensorField:
    """``nabla^m u`` of the Poisson extension ``u``, evaluated exactly per mode."""
    if m < 1:
        raise ValueError(f"rank m must be >= 1, got {m}")
    g = f.grid
    ladder.validate_for(g)
    fh = np.fft.fftn(f.values)
    rho = g.frequency_norm()
    comps = {}
    for idx in itertools.combinations_with_replacement(range(g.n + 1), m):
        alpha = [idx.count(k) for k in range(g.n + 1)]
        mult = (-2 * pi * rho) ** alpha[0]
        for j in range(1, g.n + 1):
            if alpha[j]:
                mult = mult * _axis_power(g, j, alpha[j])
        out = np.empty((len(ladder),) + g.shape, dtype=complex if f.is_complex else float)
        for i, t in enumerate(ladder):
            v = np.fft.ifftn(fh * mult * np.exp(-2 * pi * t * rho))
            out[i] = v if f.is_complex else v.real
        comps[idx] = HalfSpaceField(g, ladder, out)
    return TensorField(m, comps)


def symmetry_trace_check(T: TensorField) -> ResidualReport:
    """Max over free indices of ``|sum_j T_{j j i_3 ... i_m}|``.

    Symmetry holds by storage and is reported as 0.  Rank 1 is trace zero
    by convention.
    """
    g = T.grid
    scale = max(float(np.max(np.abs(v.values))) for v in T.components.values())
    if T.rank == 1:
        return ResidualReport(0.0, 0.0, {"trace": 0.0, "symmetry": 0.0}, scale)
    res = {}
    for rest in itertools.combinations_with_replacement(range(g.n + 1), T.rank - 2):
        tr = sum(T[(j, j) + rest].values for j in range(g.n + 1))
        res[f"trace{rest}"] = tr
    rep = _report(res, g, scale)
    bd = dict(rep.breakdown)
    bd["symmetry"] = 0.0
    return ResidualReport(rep.max_abs, rep.l2, bd, scale)


# --- subharmonicity ---------------------------------------------------------


def sphere_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic quasi-uniform unit vectors in ``R^dim``, shape ``(count, dim)``.

    Equispaced on the circle, a Fibonacci lattice on ``S^2``, and normalized
    inverse-normal Halton points beyond.
    """
    if count < 1:
        raise ValueError("need at least one direction")
    if dim == 2:
        a = 2 * pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    if dim == 3:
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = pi * (1 + 5**0.5) * k
        r = np.sqrt(1 - z * z)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    pts = qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]
    v = _normal.ppf(pts)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class _SlabInterpolator:
    """Multilinear interpolation of a half-space field, periodic in x."""

    def __init__(self, u: HalfSpaceField):
        g = u.grid
        vals = np.asarray(u.values, dtype=float)
        for ax in range(1, g.n + 1):
            first = np.take(vals, [0], axis=ax)
            vals = np.concatenate([vals, first], axis=ax)
        x = np.arange(g.N + 1) * g.h
        self.grid = g
        self.t = u.ladder.as_array()
        self._interp = RegularGridInterpolator((self.t,) + (x,) * g.n, vals, method="linear")

    def __call__(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        pts = np.column_stack([t, np.mod(x, self.grid.L)])
        return self._interp(pts)


def _field_of(source, q: float) -> HalfSpaceField:
    if isinstance(source, (HarmonicVector, TensorField)):
        mag = source.magnitude()
        return mag.with_values(mag.values**q)
    if isinstance(source, HalfSpaceField):
        return source
    raise TypeError(f"cannot build a scalar field from {type(source).__name__}")


def _default_centers(grid: Grid, count: int = 16) -> np.ndarray:
    """Lattice points on a coarse sub-lattice around the center, shape ``(k, n)``."""
    side = max(1, int(round(count ** (1 / grid.n))))
    step = max(1, grid.N // (4 * side))
    ks = (np.arange(side) - side // 2) * step + grid.N // 2
    pts = np.array(list(itertools.product(ks, repeat=grid.n)), dtype=float) * grid.h
    return pts


def subharmonic_mean_value_check(source, q: float = 1.0, samples: int = 50,
                                 radii: Sequence[float] | None = None,
                                 centers: np.ndarray | None = None,
                                 heights: Sequence[float] | None = None) -> ResidualReport:
    """Max of ``field(c) - mean_{|y - c| = rho} field(y)`` over test spheres.

    ``source`` is a :class:`HarmonicVector` or :class:`TensorField` (the
    field is ``|source|^q``) or a scalar :class:`HalfSpaceField` used as is.
    Spheres live in ``R^(n+1)`` and must fit inside the ladder's t-range.
    Default radii are ``2 dt`` and ``4 dt`` with ``dt`` the smallest ladder
    step; default sphere centers sit at every ladder level that fits.
    """
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    u = _field_of(source, q)
    g, lad = u.grid, u.ladder
    tl = lad.as_array()
    if radii is None:
        if len(tl) < 2:
            raise ValueError("ladder too short for default radii")
        dt = float(np.min(np.diff(tl)))
        radii = (2 * dt, 4 * dt)
    centers = _default_centers(g) if centers is None else np.atleast_2d(centers)
    dirs = sphere_directions(g.n + 1, samples)
    interp = _SlabInterpolator(u)
    scale = float(np.max(np.abs(u.values)))
    worst = -np.inf
    viol = []
    for rho in radii:
        if heights is None:
            hs = tl[(tl - rho >= tl[0] - 1e-12) & (tl + rho <= tl[-1] + 1e-12)]
        else:
            hs = np.asarray(heights, dtype=float)
        if hs.size == 0 or np.any(hs - rho < tl[0] - 1e-12) or np.any(hs + rho > tl[-1] + 1e-12):
            raise ValueError(f"sphere of radius {rho:g} exits the slab [{tl[0]:g}, {tl[-1]:g}]")
        for tc in hs:
            for c in centers:
                pt = tc + rho * dirs[:, 0]
                px = c[None, :] + rho * dirs[:, 1:]
                mean = float(np.mean(interp(pt, px)))
                here = float(interp(np.array([tc]), c[None, :])[0])
                v = here - mean
                worst = max(worst, v)
                viol.append(max(v, 0.0))
    viol = np.asarray(viol)
    return ResidualReport(max(worst, 0.0), float(np.sqrt(np.mean(viol**2))),
                          {"signed_max": float(worst), "spheres": int(viol.size)}, scale)


# --- majorization -----------------------------------------------------------


def _level(lad: TLadder, t: float, what: str) -> int:
    i = lad.index_of(t)
    if i is None:
        raise ValueError(f"{what} = {t:g} is not a ladder level")
    return i


def majorization_check(F: HarmonicVector, q: float, a: float, t: float) -> ResidualReport:
    """Signed ``max_x |F(x, t+a)|^q - P_t * (g_a)^q(x)`` with ``g_a = |F(., t_1+a)|``.

    ``t_1`` is the smallest ladder level (the discrete stand-in for ``t -> 0+``).
    The left side is read at height ``t + t_1 + a`` so that both sides use
    the same base height; the ladder must contain ``t_1 + a`` and
    ``t + t_1 + a``.  ``breakdown['relative']`` divides by ``max P_t * g_a^q``.
    """
    g, lad = F.grid, F.ladder
    n = g.n
    lo = (n - 1) / n
    if not (lo - 1e-12 <= q <= 1 + 1e-12):
        raise ValueError(f"q must lie in [(n-1)/n, 1] = [{lo:g}, 1], got {q}")
    if t <= 0 or a < 0:
        raise ValueError("need t > 0 and a >= 0")
    t1 = lad[0]
    ib = _level(lad, t1 + a, "t_1 + a")
    it = _level(lad, t + t1 + a, "t + t_1 + a")
    mag = F.magnitude().values
    gq = mag[ib] ** q
    rhs = np.fft.ifftn(np.fft.fftn(gq) * np.exp(-2 * pi * t * g.frequency_norm())).real
    lhs = mag[it] ** q
    diff = lhs - rhs
    top = float(np.max(np.abs(rhs)))
    worst = float(np.max(diff))
    return ResidualReport(worst, float(np.sqrt(np.sum(diff**2) * g.cell_volume)),
                          {"relative": worst / top if top > 0 else worst, "rhs_max": top}, top)
