"""Poisson, conjugate Poisson and Riesz operators on the torus.

The primary path applies exact ``R^n`` Fourier multipliers at the torus
frequencies.  Kernel quadrature versions (real-space kernels sampled on the
lattice, then convolved cyclically) are kept as independent oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi
from typing import Iterable, Sequence

import numpy as np

from .grid import Grid, GridFunction, TLadder, apply_multiplier

__all__ = [
    "HalfSpaceField",
    "RieszPath",
    "poisson_constant",
    "poisson_kernel_value",
    "conjugate_kernel_value",
    "poisson_kernel",
    "poisson_multiplier",
    "riesz_multiplier",
    "poisson_extend",
    "riesz_transform",
    "riesz_truncated_oracle",
    "riesz_compose",
    "conjugate_poisson_extend",
    "lattice_convolve",
]


def poisson_constant(n: int) -> float:
    """``Gamma((n+1)/2) / pi^((n+1)/2)``; normalizes both P_t and the Riesz kernel."""
    return gamma((n + 1) / 2) / pi ** ((n + 1) / 2)


def poisson_kernel_value(r: np.ndarray, t: float, n: int) -> np.ndarray:
    """``P_t`` on ``R^n`` as a function of ``|x|``."""
    return poisson_constant(n) * t / (t * t + np.asarray(r) ** 2) ** ((n + 1) / 2)


def conjugate_kernel_value(xj: np.ndarray, r: np.ndarray, t: float, n: int) -> np.ndarray:
    """``Q_t^(j)(x) = c_n x_j / (t^2 + |x|^2)^((n+1)/2)``."""
    return poisson_constant(n) * xj / (t * t + np.asarray(r) ** 2) ** ((n + 1) / 2)


def _poisson_mass_inside(R: float, t: float, n: int) -> float:
    """Mass of ``P_t`` inside ``B(0, R)`` (closed forms for n = 1, 2, 3)."""
    if n == 1:
        return 2 / pi * np.arctan(R / t)
    if n == 2:
        return 1 - t / np.hypot(t, R)
    if n == 3:
        return 2 / pi * (np.arctan(R / t) - R * t / (R * R + t * t))
    raise ValueError(n)


@dataclass(frozen=True)
class HalfSpaceField:
    """Samples ``u(x_k, t_l)``; ``values`` has shape ``(J,) + grid.shape``."""

    grid: Grid
    ladder: TLadder
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, copy=True)
        if v.dtype.kind not in "fc":
            v = v.astype(float)
        want = (len(self.ladder),) + self.grid.shape
        if v.shape != want:
            v = v.reshape(want)
        if not np.all(np.isfinite(v)):
            raise ValueError("half-space field has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def level(self, i: int) -> GridFunction:
        return GridFunction(self.grid, self.values[i])

    def levels(self) -> list[GridFunction]:
        return [self.level(i) for i in range(len(self.ladder))]

    def with_values(self, values: np.ndarray) -> "HalfSpaceField":
        return HalfSpaceField(self.grid, self.ladder, values)

    @classmethod
    def constant(cls, grid: Grid, ladder: TLadder, c: float) -> "HalfSpaceField":
        return cls(grid, ladder, np.full((len(ladder),) + grid.shape, float(c)))

    def __add__(self, other: "HalfSpaceField") -> "HalfSpaceField":
        return self.with_values(self.values + other.values)

    def __mul__(self, c) -> "HalfSpaceField":
        return self.with_values(self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class RieszPath:
    """Indices ``(j_1, ..., j_l)`` applied left to right; ``0`` is the identity."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(j) for j in self.indices))
        if any(j < 0 for j in self.indices):
            raise ValueError(f"negative Riesz index in {self.indices}")

    def validate(self, n: int) -> "RieszPath":
        bad = [j for j in self.indices if j > n]
        if bad:
            raise ValueError(f"Riesz index {bad[0]} out of range 0..{n}")
        return self

    def __len__(self) -> int:
        return len(self.indices)


def _check_index(j: int, n: int) -> None:
    if not 1 <= j <= n:
        raise ValueError(f"Riesz index j={j} out of range 1..{n}")


def poisson_multiplier(grid: Grid, t: float) -> np.ndarray:
    return np.exp(-2 * pi * t * grid.frequency_norm())


def riesz_multiplier(grid: Grid, j: int) -> np.ndarray:
    """``-i xi_j / |xi|``, zero at ``xi = 0`` and on the axis-j Nyquist plane."""
    _check_index(j, grid.n)
    norm = grid.frequency_norm()
    xi = np.broadcast_to(grid.odd_frequencies()[j - 1], grid.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        m = np.where(norm > 0, -1j * xi / np.where(norm > 0, norm, 1.0), 0.0)
    return m


def lattice_convolve(kernel: np.ndarray, f: GridFunction) -> GridFunction:
    """Quadrature ``h^n sum_y K(y) f(x - y)`` with ``K`` laid out at index 0.

    The cyclic sum is evaluated with FFTs; it is the exact lattice sum up
    to rounding.
    """
    g = f.grid
    out = np.fft.ifftn(np.fft.fftn(kernel) * np.fft.fftn(f.values)) * g.cell_volume
    if not f.is_complex and not np.iscomplexobj(kernel):
        out = out.real
    return GridFunction(g, out)


def _odd_part(K: np.ndarray) -> np.ndarray:
    """Antisymmetrize a kernel under ``y -> -y`` on the torus."""
    axes = tuple(range(K.ndim))
    reflected = np.roll(np.flip(K, axis=axes), 1, axis=axes)
    return 0.5 * (K - reflected)


def _image_vectors(n: int, radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1)
    m = np.stack(np.meshgrid(*([r] * n), indexing="ij"), axis=-1).reshape(-1, n)
    return m[np.sum(m * m, axis=1) <= radius * radius]


_DEFAULT_IMAGES = {1: 256, 2: 32, 3: 6}
_ORACLE_IMAGES = {1: 64, 2: 16, 3: 4}


def _periodized_poisson(grid: Grid, t: float, images: int | None) -> np.ndarray:
    """Image sum of ``P_t`` at wrapped offsets, plus a uniform far-field term.

    Images ``m L`` with ``|m| <= M`` are summed exactly; the mass of ``P_t``
    outside the equal-volume ball of radius ``R`` is spread uniformly over
    the torus cell.
    """
    n = grid.n
    M = _DEFAULT_IMAGES[n] if images is None else int(images)
    offs = [np.broadcast_to(o, grid.shape) for o in grid.wrapped_offsets()]
    out = np.zeros(grid.shape)
    for m in _image_vectors(n, M):
        r2 = sum((o + mi * grid.L) ** 2 for o, mi in zip(offs, m))
        out += poisson_kernel_value(np.sqrt(r2), t, n)
    count = len(_image_vectors(n, M))
    v_n = pi ** (n / 2) / gamma(n / 2 + 1)
    R = (count * grid.volume / v_n) ** (1.0 / n)
    out += (1.0 - _poisson_mass_inside(R, t, n)) / grid.volume
    return out


def poisson_kernel(grid: Grid, t: float, images: int | None = None) -> GridFunction:
    """Periodized Poisson kernel ``sum_m P_t(x - center + m L)`` on the lattice.

    Centered at the lattice point nearest ``L/2``.  ``images=0`` gives the
    bare ``R^n`` kernel restricted to periodic offsets.
    """
    if not 0 < t <= grid.L / 2:
        raise ValueError(f"t must lie in (0, L/2] = (0, {grid.L / 2}], got {t}")
    if images == 0:
        vals = poisson_kernel_value(np.sqrt(sum(o**2 for o in grid.wrapped_offsets())), t, grid.n)
        vals = np.broadcast_to(vals, grid.shape)
    else:
        vals = _periodized_poisson(grid, t, images)
    return GridFunction(grid, np.fft.fftshift(vals))


def poisson_extend(f: GridFunction, ladder: TLadder) -> HalfSpaceField:
    """``u(., t_l) = inverse(exp(-2 pi t_l |xi|) * forward(f))`` for every level."""
    g = f.grid
    fh = np.fft.fftn(f.values)
    norm = g.frequency_norm()
    out = np.empty((len(ladder),) + g.shape, dtype=fh.dtype if f.is_complex else float)
    for i, t in enumerate(ladder):
        v = np.fft.ifftn(fh * np.exp(-2 * pi * t * norm))
        out[i] = v if f.is_complex else v.real
    return HalfSpaceField(g, ladder, out)


def riesz_transform(f: GridFunction, j: int) -> GridFunction:
    return apply_multiplier(f, riesz_multiplier(f.grid, j))


def riesz_compose(f: GridFunction, path: RieszPath | Sequence[int]) -> GridFunction:
    if not isinstance(path, RieszPath):
        path = RieszPath(tuple(path))
    path.validate(f.grid.n)
    idx = [j for j in path.indices if j != 0]
    if not idx:
        return f
    m = np.ones(f.grid.shape, dtype=complex)
    for j in idx:
        m = m * riesz_multiplier(f.grid, j)
    return apply_multiplier(f, m)


def riesz_truncated_oracle(f: GridFunction, j: int, delta: float,
                           images: int | None = None,
                           subtract_singularity: bool = True) -> GridFunction:
    """Direct lattice quadrature of ``c_n sum_{delta <= |y| < L/2} y_j/|y|^(n+1) f(x-y) h^n``.

    Only cells whose centers are closer than ``delta`` are dropped.  The
    outer cut is strict so every kept offset has its mirror image, which
    keeps the discrete kernel exactly odd.  ``images`` (default depends on
    ``n``) adds the symmetric image sum of the kernel over a ball of lattice
    periods, which matches the periodic operator the multiplier realizes;
    ``images=0`` is the bare truncated integral.

    With ``subtract_singularity`` the excluded cells are replaced by the
    first-order Taylor term ``-c_n v_n rho d_j f(x)``, where ``rho`` is the
    radius of the ball with the excluded volume and ``d_j f`` is a centered
    lattice difference.  Without it the result carries an O(delta) bias.
    """
    g = f.grid
    _check_index(j, g.n)
    if delta < g.h * (1 - 1e-12):
        raise ValueError(f"delta={delta} is below the lattice spacing h={g.h}")
    if delta > g.L / 4:
        raise ValueError(f"delta={delta} exceeds L/4={g.L / 4}")
    c = poisson_constant(g.n)
    offs = [np.broadcast_to(o, g.shape) for o in g.wrapped_offsets()]
    r = np.sqrt(sum(o**2 for o in offs))
    keep = (r >= delta * (1 - 1e-12)) & (r < g.L / 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(keep, c * offs[j - 1] / np.where(r > 0, r, 1.0) ** (g.n + 1), 0.0)
    images = _ORACLE_IMAGES[g.n] if images is None else int(images)
    if images:
        for m in _image_vectors(g.n, images):
            if not np.any(m):
                continue
            sh = [o + mi * g.L for o, mi in zip(offs, m)]
            rr = np.sqrt(sum(s**2 for s in sh))
            K = K + c * sh[j - 1] / rr ** (g.n + 1)
        K = _odd_part(K)
    out = lattice_convolve(K, f)
    if subtract_singularity:
        excluded = np.count_nonzero(r < delta * (1 - 1e-12)) * g.cell_volume
        v_n = pi ** (g.n / 2) / gamma(g.n / 2 + 1)
        rho = (excluded / v_n) ** (1.0 / g.n)
        axis = j - 1
        dj = (np.roll(f.values, -1, axis=axis) - np.roll(f.values, 1, axis=axis)) / (2 * g.h)
        out = out.with_values(out.values - c * v_n * rho * dj)
    return out


def _conjugate_kernel(grid: Grid, j: int, t: float, images: int) -> np.ndarray:
    offs = [np.broadcast_to(o, grid.shape) for o in grid.wrapped_offsets()]
    n = grid.n
    if images == 0:
        # keep only offsets with a mirror partner so the kernel stays odd
        inner = np.ones(grid.shape, dtype=bool)
        for o in offs:
            inner &= np.abs(o) < grid.L / 2
        rr = np.sqrt(sum(o**2 for o in offs))
        return np.where(inner, conjugate_kernel_value(offs[j - 1], rr, t, n), 0.0)
    K = np.zeros(grid.shape)
    for m in _image_vectors(n, images):
        sh = [o + mi * grid.L for o, mi in zip(offs, m)]
        rr = np.sqrt(sum(s**2 for s in sh))
        K += conjugate_kernel_value(sh[j - 1], rr, t, n)
    return _odd_part(K)


def conjugate_poisson_extend(f: GridFunction, j: int, ladder: TLadder,
                             oracle: bool = False, images: int | None = None) -> HalfSpaceField:
    """``u_j(., t) = Q_t^(j) * f``.

    The default path is ``poisson_extend(riesz_transform(f, j))``.  With
    ``oracle=True`` the conjugate Poisson kernel is sampled in real space
    (with a symmetric image sum of ``images`` lattice periods) and
    convolved by lattice quadrature.
    """
    _check_index(j, f.grid.n)
    if not oracle:
        return poisson_extend(riesz_transform(f, j), ladder)
    M = _DEFAULT_IMAGES[f.grid.n] if images is None else int(images)
    out = np.empty((len(ladder),) + f.grid.shape)
    for i, t in enumerate(ladder):
        out[i] = lattice_convolve(_conjugate_kernel(f.grid, j, t, M), f).values
    return HalfSpaceField(f.grid, ladder, out)


def extend_many(fs: Iterable[GridFunction], ladder: TLadder) -> list[HalfSpaceField]:
    return [poisson_extend(f, ladder) for f in fs]
