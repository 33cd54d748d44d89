import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hardyx.grid import (
    Grid,
    GridFunction,
    TLadder,
    discrete_lp_norm,
    forward_spectrum,
    geometric_ladder,
    inverse_spectrum,
    make_grid,
    sample,
    uniform_ladder,
)


def test_make_grid_spacing():
    assert make_grid(1, 256, 16.0).h == 0.0625
    assert make_grid(2, 64, 8.0).h == 0.125


@pytest.mark.parametrize("args", [(1, 100, 1.0), (1, 4, 1.0), (4, 8, 1.0), (1, 64, 0.0), (1, 64, -2.0)])
def test_make_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_center_and_offsets():
    g = make_grid(2, 16, 4.0)
    assert g.center_index == (8, 8)
    assert np.allclose(g.center, [2.0, 2.0])
    d = g.distance_from_center()
    assert d[8, 8] == 0
    assert d.max() == pytest.approx(np.sqrt(2) * 2.0)


def test_sample_constant_and_symmetry():
    g = make_grid(1, 256, 16.0)
    assert np.all(sample(lambda x: np.ones_like(x), g).values == 1)
    f = sample(lambda x: np.exp(-np.pi * (x - 8.0) ** 2), g).values
    k = np.arange(1, 128)
    assert np.array_equal(f[128 + k], f[128 - k])


def test_sample_reports_bad_point():
    g = make_grid(1, 16, 1.0)
    with np.errstate(divide="ignore"):
        with pytest.raises(ValueError, match=r"lattice point \(0,\)"):
            sample(lambda x: 1.0 / x, g)


def test_gridfunction_is_readonly():
    g = make_grid(1, 8, 1.0)
    f = GridFunction(g, np.arange(8.0))
    with pytest.raises(ValueError):
        f.values[0] = 3


def test_spectrum_of_constant_and_cosine():
    g = make_grid(1, 64, 4.0)
    S = forward_spectrum(GridFunction(g, np.ones(64))).coefficients
    assert np.count_nonzero(np.abs(S) > 1e-12) == 1 and abs(S[0]) > 0
    c = sample(lambda x: np.cos(2 * np.pi * x / g.L), g)
    nz = np.flatnonzero(np.abs(forward_spectrum(c).coefficients) > 1e-10)
    assert sorted(nz.tolist()) == [1, 63]


@pytest.mark.parametrize("n,N", [(1, 256), (2, 64), (3, 16)])
def test_roundtrip(n, N):
    rng = np.random.default_rng(n)
    g = make_grid(n, N, 8.0)
    f = GridFunction(g, rng.standard_normal(g.shape))
    back = inverse_spectrum(forward_spectrum(f))
    assert not back.is_complex
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_lp_norm_examples():
    g = make_grid(2, 32, 4.0)
    c = 1.7
    for p in (0.5, 1.0, 2.0, 3.0):
        assert discrete_lp_norm(GridFunction(g, np.full(g.shape, c)), p) == pytest.approx(c * g.volume ** (1 / p))
    v = np.zeros(g.shape)
    v[2:5, 3:7] = 1
    assert discrete_lp_norm(GridFunction(g, v), 1) == pytest.approx(12 * g.cell_volume)
    g1 = make_grid(1, 256, 16.0)
    f = sample(lambda x: np.exp(-np.pi * (x - 8.0) ** 2), g1)
    assert abs(discrete_lp_norm(f, 2) - 2 ** -0.25) <= 1e-6
    with pytest.raises(ValueError):
        discrete_lp_norm(f, 0)


fields = arrays(np.float64, 64, elements=st.floats(-1e3, 1e3, allow_nan=False))


@settings(max_examples=50, deadline=None)
@given(fields, st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3), st.integers(0, 63))
def test_lp_norm_homogeneous_and_shift_invariant(v, c, k):
    g = make_grid(1, 64, 2.0)
    f = GridFunction(g, v)
    for p in (0.5, 0.7, 1.0, 2.0, np.inf):
        base = discrete_lp_norm(f, p)
        assert discrete_lp_norm(f * c, p) == pytest.approx(abs(c) * base, rel=1e-12, abs=1e-300)
        assert discrete_lp_norm(f.shift(k), p) == pytest.approx(base, rel=1e-12, abs=1e-300)


def test_ladders():
    g = make_grid(1, 64, 8.0)
    lad = geometric_ladder(g)
    assert lad[0] == g.h and lad[-1] == pytest.approx(4.0)
    assert uniform_ladder(0.5, 0.25, 3).levels == (0.5, 0.75, 1.0)
    assert lad.index_of(lad[3]) == 3 and lad.index_of(123.0) is None
    with pytest.raises(ValueError):
        TLadder((0.5, 0.5))
    with pytest.raises(ValueError):
        TLadder((0.0, 1.0))
    with pytest.raises(ValueError):
        TLadder((1.0, 5.0), period=8.0)
