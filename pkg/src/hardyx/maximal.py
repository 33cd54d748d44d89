"""Maximal operators over discrete radius sets and cone ladders.

Balls are open: a cell belongs to ``B(x, r)`` when the periodic distance
between its center and ``x`` is ``< r``; the ball volume is the counted
cell volume.  Cones have aperture one, ``|y - x| < t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import factorial, pi
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .grid import Grid, GridFunction, TLadder
from .operators import HalfSpaceField, poisson_extend

__all__ = [
    "RadiusSet",
    "Template",
    "TestDictionary",
    "AssumptionParams",
    "default_radii",
    "ball_mask",
    "ball_sums",
    "hl_maximal",
    "powered_maximal",
    "nontangential_maximal",
    "poisson_maximal",
    "smoothed_extension",
    "radial_maximal",
    "petree_maximal",
    "cone_maximal",
    "grand_maximal",
    "default_dictionary",
    "seminorm_pN",
    "fs_vector_probe",
]


@dataclass(frozen=True)
class RadiusSet:
    radii: tuple[float, ...]

    def __post_init__(self):
        r = tuple(sorted(set(float(x) for x in self.radii)))
        if not r:
            raise ValueError("radius set is empty")
        if r[0] <= 0:
            raise ValueError("radii must be positive")
        object.__setattr__(self, "radii", r)

    def validate_for(self, grid: Grid) -> "RadiusSet":
        if self.radii[0] < grid.h * (1 - 1e-12):
            raise ValueError(f"smallest radius {self.radii[0]} is below h={grid.h}")
        if self.radii[-1] > grid.L / 2 * (1 + 1e-12):
            raise ValueError(f"largest radius {self.radii[-1]} exceeds L/2={grid.L / 2}")
        return self

    def __iter__(self):
        return iter(self.radii)

    def __len__(self):
        return len(self.radii)

    def union(self, other: "RadiusSet") -> "RadiusSet":
        return RadiusSet(self.radii + other.radii)


def default_radii(grid: Grid) -> RadiusSet:
    """``{h, 2h, 4h, ..., L/2} U {m h : m <= 16}``."""
    h = grid.h
    dyadic = []
    r = h
    while r <= grid.L / 2 * (1 + 1e-12):
        dyadic.append(r)
        r *= 2
    small = [m * h for m in range(1, 17) if m * h <= grid.L / 2]
    return RadiusSet(tuple(dyadic + small))


def all_radii(grid: Grid) -> RadiusSet:
    """Every multiple of ``h`` up to ``L/2``."""
    return RadiusSet(tuple(m * grid.h for m in range(1, grid.N // 2 + 1)))


def ball_mask(grid: Grid, r: float) -> np.ndarray:
    """Indicator of ``B(0, r)`` at wrapped offsets (ready for cyclic convolution)."""
    d2 = sum(o**2 for o in grid.wrapped_offsets())
    return np.broadcast_to(d2 < (r * r) * (1 - 1e-12), grid.shape)


def ball_sums(values: np.ndarray, grid: Grid, r: float) -> tuple[np.ndarray, int]:
    """Sum of ``values`` over ``B(x_k, r)`` for every ``k``, and the cell count."""
    mask = ball_mask(grid, r)
    count = int(np.count_nonzero(mask))
    if count == 1:
        return np.array(values, dtype=float), 1
    axes = tuple(range(grid.n))
    s = np.fft.irfftn(np.fft.rfftn(mask.astype(float)) * np.fft.rfftn(values), s=grid.shape, axes=axes)
    return np.maximum(s, 0.0), count


def hl_maximal(f: GridFunction, radii: RadiusSet | None = None) -> GridFunction:
    """Centered Hardy--Littlewood maximal function over ``radii``."""
    g = f.grid
    radii = default_radii(g) if radii is None else radii
    a = np.abs(f.values).astype(float)
    out = a.copy()
    seen = set()
    for r in radii:
        s, count = ball_sums(a, g, r)
        if count in seen:
            continue
        seen.add(count)
        np.maximum(out, s / count, out=out)
    return GridFunction(g, out)


def powered_maximal(f: GridFunction, theta: float, radii: RadiusSet | None = None) -> GridFunction:
    """``M(|f|^theta)^(1/theta)``."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if theta == 1:
        return hl_maximal(f, radii)
    m = hl_maximal(f.with_values(np.abs(f.values) ** theta), radii)
    return m.with_values(m.values ** (1.0 / theta))


def _cone_footprint(grid: Grid, t: float) -> np.ndarray:
    m = min(int(np.ceil(t / grid.h)), grid.N // 2)
    k = np.arange(-m, m + 1) * grid.h
    d2 = sum(c**2 for c in np.meshgrid(*([k] * grid.n), indexing="ij", sparse=True))
    return d2 < (t * t) * (1 - 1e-12)


def cone_maximal(values: np.ndarray, grid: Grid, t: float) -> np.ndarray:
    """``max_{dist(y, x) < t} values(y)`` on the torus."""
    fp = _cone_footprint(grid, t)
    if fp.size == 1:
        return np.array(values, copy=True)
    return ndimage.maximum_filter(values, footprint=fp, mode="wrap")


def nontangential_maximal(u: HalfSpaceField) -> GridFunction:
    """``u*(x) = max_l max_{dist(y,x) < t_l} |u(y, t_l)|``."""
    g = u.grid
    out = np.zeros(g.shape)
    for i, t in enumerate(u.ladder):
        np.maximum(out, cone_maximal(np.abs(u.values[i]), g, t), out=out)
    return GridFunction(g, out)


def poisson_maximal(f: GridFunction, ladder: TLadder) -> GridFunction:
    return nontangential_maximal(poisson_extend(f, ladder))


@dataclass(frozen=True)
class Template:
    """A test function described by its Fourier transform.

    ``hat(xi)`` takes a list of broadcastable frequency arrays; ``phi_t`` is
    realized spectrally as ``hat(t xi)``.
    """

    name: str
    n: int
    hat: Callable[[Sequence[np.ndarray]], np.ndarray] = field(compare=False)
    scale: float = 1.0

    def transform(self, grid: Grid, t: float = 1.0) -> np.ndarray:
        xi = [t * x for x in grid.frequencies()]
        return self.scale * np.broadcast_to(self.hat(xi), grid.shape)

    def integral(self) -> complex:
        return complex(self.scale * np.asarray(self.hat([np.zeros(1)] * self.n)).ravel()[0])

    def scaled(self, c: float) -> "Template":
        return Template(self.name, self.n, self.hat, self.scale * c)

    @classmethod
    def gaussian(cls, n: int, width: float = 1.0,
                 derivative: Sequence[int] | None = None) -> "Template":
        """``w^-n exp(-pi |x/w|^2)`` or one of its partial derivatives."""
        beta = tuple(derivative) if derivative is not None else (0,) * n

        def hat(xi):
            r2 = sum(x**2 for x in xi)
            out = np.exp(-pi * width * width * r2)
            for x, b in zip(xi, beta):
                if b:
                    out = out * (2j * pi * x) ** b
            return out

        label = f"gaussian(w={width:g})" if not any(beta) else f"gaussian(w={width:g}, d={beta})"
        return cls(label, n, hat)

    @classmethod
    def poisson(cls, n: int) -> "Template":
        """``P_1``: ``phi_t`` is then the Poisson kernel ``P_t``."""
        return cls("poisson", n, lambda xi: np.exp(-2 * pi * np.sqrt(sum(x**2 for x in xi))))

    @classmethod
    def from_grid(cls, phi: GridFunction) -> "Template":
        """Template sampled on a grid, centered at the grid center.

        The transform is the lattice quadrature
        ``h^n sum_k phi(x_k) exp(-2 pi i xi . (x_k - center))``.
        """
        g = phi.grid
        offs = (np.arange(g.N) - g.N // 2) * g.h
        vals = np.asarray(phi.values, dtype=complex)

        def hat(xi):
            xi = [np.asarray(x) for x in xi]
            shapes = np.broadcast_shapes(*(x.shape for x in xi))
            if all(x.ndim == g.n for x in xi) and all(
                x.shape.count(1) >= g.n - 1 for x in xi
            ):
                # separable evaluation on sparse tensor grids
                out = vals
                for axis, x in enumerate(xi):
                    axis_xi = x.reshape(-1)
                    E = np.exp(-2j * pi * np.outer(axis_xi, offs))
                    out = np.moveaxis(np.tensordot(E, out, axes=([1], [axis])), 0, axis)
                return np.broadcast_to(out * g.cell_volume, shapes)
            pts = np.stack([np.broadcast_to(x, shapes).ravel() for x in xi], axis=1)
            phase = sum(np.multiply.outer(pts[:, j], np.broadcast_to(
                offs.reshape([-1 if a == j else 1 for a in range(g.n)]), g.shape
            ).ravel()) for j in range(g.n))
            return (np.exp(-2j * pi * phase) @ vals.ravel() * g.cell_volume).reshape(shapes)

        return cls("sampled", g.n, hat)


def smoothed_extension(f: GridFunction, phi: Template, ladder: TLadder) -> HalfSpaceField:
    """``phi_t * f`` at every ladder level (real part for real ``f``)."""
    g = f.grid
    fh = np.fft.fftn(f.values)
    out = np.empty((len(ladder),) + g.shape, dtype=complex if f.is_complex else float)
    for i, t in enumerate(ladder):
        v = np.fft.ifftn(fh * phi.transform(g, t))
        out[i] = v if f.is_complex else v.real
    return HalfSpaceField(g, ladder, out)


def _check_nondegenerate(phi: Template) -> None:
    if abs(phi.integral()) <= 1e-12:
        raise ValueError(f"template {phi.name} has zero integral")


def radial_maximal(f: GridFunction, phi: Template, ladder: TLadder) -> GridFunction:
    """``max_l |phi_{t_l} * f(x)|``."""
    _check_nondegenerate(phi)
    u = smoothed_extension(f, phi, ladder)
    return GridFunction(f.grid, np.abs(u.values).max(axis=0))


def _offsets_by_weight(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """All lattice shifts and their periodic lengths, nearest first."""
    ks = np.array(list(product(range(grid.N), repeat=grid.n)))
    signed = np.where(ks >= grid.N // 2, ks - grid.N, ks)
    dist = np.sqrt(np.sum((signed * grid.h) ** 2, axis=1))
    order = np.lexsort((np.arange(len(dist)), dist))
    return ks[order], dist[order]


def petree_maximal(f: GridFunction, phi: Template, b: float | None = None,
                   ladder: TLadder | None = None) -> GridFunction:
    """``max_{y, l} |phi_{t_l} * f(x - y)| / (1 + |y| / t_l)^b`` over the full lattice."""
    g = f.grid
    b = 2 * g.n + 2 if b is None else float(b)
    if not b > 0:
        raise ValueError(f"b must be positive, got {b}")
    if ladder is None:
        raise ValueError("ladder is required")
    u = smoothed_extension(f, phi, ladder)
    shifts, dist = _offsets_by_weight(g)
    axes = tuple(range(g.n))
    out = np.zeros(g.shape)
    for i, t in enumerate(ladder):
        a = np.abs(u.values[i])
        top = a.max()
        best = a.copy()
        weights = (1.0 + dist / t) ** (-b)
        for k, w in zip(shifts[1:], weights[1:]):
            if w * top <= best.min():
                break
            np.maximum(best, w * np.roll(a, tuple(int(s) for s in k), axis=axes), out=best)
        np.maximum(out, best, out=out)
    return GridFunction(g, out)


@dataclass(frozen=True)
class TestDictionary:
    """Finite stand-in for the unit ball of ``p_N``; templates stored normalized."""

    __test__ = False

    entries: tuple[tuple[Template, float], ...]
    order: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def from_templates(cls, templates: Sequence[Template], order: int,
                       period: float) -> "TestDictionary":
        entries = []
        for phi in templates:
            p = seminorm_pN(phi, order, period)
            entries.append((phi.scaled(1.0 / p), p))
        return cls(tuple(entries), order)


def _multi_indices(n: int, max_order: int):
    for total in range(max_order + 1):
        for alpha in product(range(total + 1), repeat=n):
            if sum(alpha) == total:
                yield alpha


_AUX_POINTS = {1: 4096, 2: 256, 3: 64}


def seminorm_pN(phi: Template, order: int, period: float) -> float:
    """``sum_{|a| < N} sup_x (1 + |x|)^N |d^a phi(x)|`` by spectral quadrature.

    The supremum runs over ``[-period/2, period/2)^n`` on an auxiliary grid.
    """
    n = phi.n
    aux = Grid(n, _AUX_POINTS[n], float(period))
    hat = phi.transform(aux)
    xi = aux.frequencies()
    r = np.sqrt(sum(o**2 for o in aux.wrapped_offsets()))
    weight = (1 + r) ** order
    total = 0.0
    for alpha in _multi_indices(n, order - 1):
        m = hat
        for x, a in zip(xi, alpha):
            if a:
                m = m * (2j * pi * x) ** a
        # inverse transform of the continuous hat, sampled on the aux lattice
        vals = np.fft.ifftn(m).real * aux.N**n / aux.volume
        total += float(np.max(weight * np.abs(vals)))
    return total


def default_dictionary(n: int, order: int = 2, period: float = 16.0,
                       widths: Sequence[float] = (0.5, 1.0, 2.0)) -> TestDictionary:
    """Gaussians and their partial derivatives up to ``order`` at three widths."""
    templates = [Template.gaussian(n, w, beta)
                 for w in widths for beta in _multi_indices(n, order)]
    return TestDictionary.from_templates(templates, order, period)


def grand_maximal(f: GridFunction, dictionary: TestDictionary, ladder: TLadder) -> GridFunction:
    """Cone supremum of ``|phi_t * f|`` over the dictionary (a lower bound of ``M_N f``)."""
    if not dictionary.entries:
        raise ValueError("grand maximal needs a non-empty dictionary")
    out = np.zeros(f.grid.shape)
    for phi, _ in dictionary.entries:
        np.maximum(out, nontangential_maximal(smoothed_extension(f, phi, ladder)).values, out=out)
    return GridFunction(f.grid, out)


@dataclass(frozen=True)
class AssumptionParams:
    theta: float
    s: float
    q: float = float("inf")

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if not 0 < self.s <= 1:
            raise ValueError(f"s must lie in (0, 1], got {self.s}")
        if not self.q > 1:
            raise ValueError(f"q must lie in (1, inf], got {self.q}")
        if not self.theta < self.s:
            raise ValueError(f"need theta < s, got theta={self.theta}, s={self.s}")


@dataclass(frozen=True)
class ProbeReport:
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else float("inf")


def fs_vector_probe(family: Sequence[GridFunction], params: AssumptionParams, X,
                    radii: RadiusSet | None = None) -> ProbeReport:
    """Both sides of the Fefferman--Stein vector-valued maximal inequality."""
    from .spaces import quasi_norm

    if not family:
        raise ValueError("family is empty")
    s = params.s
    g = family[0].grid
    lhs = np.zeros(g.shape)
    rhs = np.zeros(g.shape)
    for f in family:
        lhs += powered_maximal(f, params.theta, radii).values ** s
        rhs += np.abs(f.values) ** s
    return ProbeReport(quasi_norm(GridFunction(g, lhs ** (1 / s)), X),
                       quasi_norm(GridFunction(g, rhs ** (1 / s)), X))
