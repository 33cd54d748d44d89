"""Sampled functions on a periodic torus and the unitary spectral transform.

The torus ``[0, L)^n`` stands in for ``R^n``.  Lattice points are
``x_k = k * h`` with ``h = L / N``; the origin of ``R^n`` is mapped to the
lattice point nearest ``L / 2`` on every axis (the *center*).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Grid",
    "GridFunction",
    "Spectrum",
    "TLadder",
    "make_grid",
    "sample",
    "forward_spectrum",
    "inverse_spectrum",
    "discrete_lp_norm",
    "uniform_ladder",
    "geometric_ladder",
]


def _is_power_of_two(N: int) -> bool:
    return N > 0 and (N & (N - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice ``{k h : k in {0..N-1}^n}`` on ``[0, L)^n``."""

    dimension: int
    points_per_axis: int
    period: float

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        N = self.points_per_axis
        if not isinstance(N, (int, np.integer)) or not _is_power_of_two(int(N)):
            raise ValueError(f"points_per_axis must be a power of two, got {N}")
        if N < 8:
            raise ValueError(f"points_per_axis must be >= 8, got {N}")
        if not np.isfinite(self.period) or self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")

    @property
    def n(self) -> int:
        return self.dimension

    @property
    def N(self) -> int:
        return self.points_per_axis

    @property
    def L(self) -> float:
        return self.period

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    h = spacing

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.n

    @property
    def volume(self) -> float:
        return self.period**self.n

    @property
    def center_index(self) -> tuple[int, ...]:
        return (self.N // 2,) * self.n

    @property
    def center(self) -> np.ndarray:
        return np.full(self.n, (self.N // 2) * self.spacing)

    def axis(self) -> np.ndarray:
        return np.arange(self.N) * self.spacing

    def coordinates(self) -> list[np.ndarray]:
        """Lattice coordinates ``x_k`` as ``n`` broadcastable arrays."""
        return np.meshgrid(*([self.axis()] * self.n), indexing="ij", sparse=True)

    def offsets(self) -> list[np.ndarray]:
        """Signed periodic offsets from the center along each axis.

        Offsets lie in ``[-L/2, L/2)``; the entry at ``center_index`` is 0.
        """
        k = np.arange(self.N) - self.N // 2
        ax = k * self.spacing
        return np.meshgrid(*([ax] * self.n), indexing="ij", sparse=True)

    def distance_from_center(self) -> np.ndarray:
        """Periodic distance of every lattice point to the center."""
        return np.sqrt(sum(o**2 for o in self.offsets()))

    def wrapped_offsets(self) -> list[np.ndarray]:
        """Signed offsets of lattice index ``k`` from index 0, in ``[-L/2, L/2)``.

        This is the layout of a kernel ready for cyclic convolution.
        """
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        ax = k * self.spacing
        return np.meshgrid(*([ax] * self.n), indexing="ij", sparse=True)

    def frequencies(self) -> list[np.ndarray]:
        """Physical frequencies ``xi_k = k / L`` (numpy FFT order)."""
        ax = np.fft.fftfreq(self.N, d=self.spacing)
        return np.meshgrid(*([ax] * self.n), indexing="ij", sparse=True)

    def odd_frequencies(self) -> list[np.ndarray]:
        """Frequencies with the Nyquist entry zeroed, for odd multipliers.

        A real field cannot carry an odd multiplier at ``k = -N/2`` (the
        mode is its own conjugate), so odd symbols vanish there.
        """
        ax = np.fft.fftfreq(self.N, d=self.spacing)
        ax[self.N // 2] = 0.0
        return np.meshgrid(*([ax] * self.n), indexing="ij", sparse=True)

    def frequency_norm(self) -> np.ndarray:
        return np.sqrt(sum(xi**2 for xi in self.frequencies()))

    def nyquist_mask(self) -> np.ndarray:
        """True at frequencies with a Nyquist component on some axis."""
        k = np.zeros(self.N, dtype=bool)
        k[self.N // 2] = True
        masks = np.meshgrid(*([k] * self.n), indexing="ij", sparse=True)
        out = np.zeros(self.shape, dtype=bool)
        for m in masks:
            out = out | m
        return out

    def to_dict(self) -> dict:
        return {"n": self.n, "N": self.N, "L": self.L}


def make_grid(n: int, N: int, L: float) -> Grid:
    return Grid(int(n), int(N), float(L))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GridFunction:
    """Values of a field at every lattice point, shape ``(N,) * n``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.dtype.kind not in "fc":
            v = v.astype(float)
        if v.size != self.grid.size:
            raise ValueError(
                f"expected {self.grid.size} values for grid {self.grid.shape}, got {v.size}"
            )
        v = np.array(v.reshape(self.grid.shape), copy=True)
        if not np.all(np.isfinite(v)):
            bad = np.unravel_index(np.flatnonzero(~np.isfinite(v))[0], v.shape)
            raise ValueError(f"non-finite value at lattice point {tuple(int(i) for i in bad)}")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def is_complex(self) -> bool:
        return self.values.dtype.kind == "c"

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)

    def mean(self) -> float:
        return self.values.mean()

    def shift(self, steps: Sequence[int] | int) -> "GridFunction":
        """Cyclic translation by whole lattice steps."""
        if isinstance(steps, (int, np.integer)):
            steps = (int(steps),) * self.grid.n
        return self.with_values(np.roll(self.values, tuple(steps), axis=tuple(range(self.grid.n))))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values - other.values)

    def __mul__(self, c) -> "GridFunction":
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return self.with_values(-self.values)

    def abs(self) -> "GridFunction":
        return self.with_values(np.abs(self.values))


@dataclass(frozen=True)
class Spectrum:
    """Unitary DFT coefficients in numpy FFT order (``xi_k = k / L``)."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(np.asarray(self.coefficients, dtype=complex).reshape(self.grid.shape), copy=True)
        object.__setattr__(self, "coefficients", _freeze(c))

    def apply(self, multiplier: np.ndarray) -> "Spectrum":
        return Spectrum(self.grid, self.coefficients * multiplier)


def forward_spectrum(f: GridFunction) -> Spectrum:
    return Spectrum(f.grid, np.fft.fftn(f.values, norm="ortho"))


def inverse_spectrum(S: Spectrum, real: bool | None = None) -> GridFunction:
    """Invert :func:`forward_spectrum`.

    ``real=None`` keeps the result complex only if its imaginary part is
    not negligible; ``real=True`` drops it unconditionally.
    """
    v = np.fft.ifftn(S.coefficients, norm="ortho")
    if real is None:
        scale = np.max(np.abs(v)) if v.size else 0.0
        real = np.max(np.abs(v.imag)) <= 1e-13 * max(scale, np.finfo(float).tiny)
    return GridFunction(S.grid, v.real if real else v)


def apply_multiplier(f: GridFunction, multiplier: np.ndarray, real: bool = True) -> GridFunction:
    """``inverse(multiplier * forward(f))``; real output for real input by default."""
    coeffs = np.fft.fftn(f.values) * multiplier
    v = np.fft.ifftn(coeffs)
    if real and not f.is_complex:
        v = v.real
    return GridFunction(f.grid, v)


def sample(closure: Callable[..., np.ndarray], grid: Grid) -> GridFunction:
    """Evaluate ``closure(x_1, ..., x_n)`` at every lattice point.

    ``closure`` receives broadcastable coordinate arrays.  No periodization
    is applied: the caller supplies functions negligible outside
    ``[0, L)^n``.
    """
    coords = grid.coordinates()
    values = np.broadcast_to(np.asarray(closure(*coords)), grid.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = np.unravel_index(np.flatnonzero(bad)[0], grid.shape)
        point = tuple(float(i * grid.h) for i in idx)
        raise ValueError(
            f"non-finite sample at lattice point {tuple(int(i) for i in idx)} (x = {point})"
        )
    return GridFunction(grid, values)


def discrete_lp_norm(f: GridFunction, p: float) -> float:
    """``(h^n sum |f|^p)^(1/p)``, or ``max |f|`` for ``p = inf``."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    return float((f.grid.cell_volume * np.sum(a**p)) ** (1.0 / p))


@dataclass(frozen=True)
class TLadder:
    """Strictly increasing heights ``0 < t_1 < ... < t_J``."""

    levels: tuple[float, ...]
    period: float | None = field(default=None, compare=False)

    def __post_init__(self):
        lv = tuple(float(t) for t in self.levels)
        if not lv:
            raise ValueError("ladder needs at least one level")
        if lv[0] <= 0:
            raise ValueError(f"ladder levels must be positive, got t_1 = {lv[0]}")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValueError("ladder levels must be strictly increasing")
        if self.period is not None and lv[-1] > self.period / 2 * (1 + 1e-12):
            raise ValueError(f"top level {lv[-1]} exceeds L/2 = {self.period / 2}")
        object.__setattr__(self, "levels", lv)

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.levels)

    def index_of(self, t: float, rtol: float = 1e-9) -> int | None:
        arr = self.as_array()
        hits = np.flatnonzero(np.isclose(arr, t, rtol=rtol, atol=0.0))
        return int(hits[0]) if hits.size else None

    def validate_for(self, grid: Grid) -> "TLadder":
        if self.levels[-1] > grid.L / 2 * (1 + 1e-12):
            raise ValueError(f"top level {self.levels[-1]} exceeds L/2 = {grid.L / 2}")
        return self


def uniform_ladder(t1: float, dt: float, count: int, period: float | None = None) -> TLadder:
    return TLadder(tuple(t1 + i * dt for i in range(count)), period)


def geometric_ladder(grid: Grid, t1: float | None = None, per_octave: int = 2,
                     top: float | None = None) -> TLadder:
    """Log-spaced heights from ``t1`` (default ``h``) up to ``top`` (default ``L/2``)."""
    t1 = grid.h if t1 is None else t1
    top = grid.L / 2 if top is None else top
    count = int(np.floor(per_octave * np.log2(top / t1) + 1e-9)) + 1
    levels = t1 * 2.0 ** (np.arange(count) / per_octave)
    return TLadder(tuple(levels), grid.L)
