import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import direct_eval
from sfar2d import (
    CapacityError,
    Component,
    Field,
    GridDims,
    InvariantError,
    NoiseParams,
    SignalModel,
    add_external_noise,
    full_dft,
    random_model,
    synthesize,
)
from sfar2d.signal_model import mixed_model, model_from_components


def test_dc_component_is_constant():
    f = synthesize(model_from_components(GridDims(4, 4), [(1.0, 0, 0)]))
    assert np.array_equal(f.values, np.ones((4, 4), dtype=complex))


def test_single_component_modulus():
    f = synthesize(model_from_components(GridDims(8, 8), [(2.0, 3, 5)]))
    assert f.values[0, 0] == 2 + 0j
    np.testing.assert_allclose(np.abs(f.values), 2.0, rtol=1e-14)


def test_conjugate_pair_is_cosine():
    dims = GridDims(8, 8)
    f = synthesize(model_from_components(dims, [(1.0, 1, 0), (1.0, 7, 0)]))
    x = np.arange(8)[:, None] * np.ones((1, 8))
    np.testing.assert_allclose(f.values.real, 2 * np.cos(2 * np.pi * x / 8), atol=1e-12)
    assert np.max(np.abs(f.values.imag)) < 1e-12
    for x0, y0 in [(0, 0), (3, 2), (7, 7)]:
        assert abs(f.values[x0, y0] - direct_eval([(1, 1, 0), (1, 7, 0)], 8, 8, x0, y0)) < 1e-12


def test_rectangular_grid_matches_pointwise():
    comps = [(1.5, 2, 9), (0.5, 4, 1)]
    f = synthesize(model_from_components(GridDims(6, 10), comps))
    for x in range(6):
        for y in range(10):
            assert abs(f.values[x, y] - direct_eval(comps, 6, 10, x, y)) < 1e-12


@pytest.mark.parametrize(
    "comps, msg",
    [
        ([(0.0, 1, 1)], "amplitude"),
        ([(1.0, 8, 0)], "outside"),
        ([(1.0, 1, 1), (2.0, 1, 1)], "duplicate"),
    ],
)
def test_invalid_models_name_the_constraint(comps, msg):
    with pytest.raises(InvariantError, match=msg):
        model_from_components(GridDims(8, 8), comps)


def test_sparsity_bound_and_empty_model():
    with pytest.raises(InvariantError, match="K="):
        model_from_components(GridDims(4, 4), [(1.0, i, 0) for i in range(4)] + [(1.0, 0, 1)])
    with pytest.raises(InvariantError):
        SignalModel(GridDims(4, 4), ())


def test_grid_dims_validation():
    with pytest.raises(InvariantError):
        GridDims(0, 4)
    with pytest.raises(InvariantError):
        GridDims(4, 2.5)


def test_field_shape_checked_and_immutable():
    with pytest.raises(ValueError):
        Field(GridDims(2, 3), np.zeros((3, 2)))
    f = Field(GridDims(2, 2), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        f.values[0, 0] = 1


def test_zero_noise_returns_same_field():
    f = synthesize(random_model(GridDims(16, 16), 3, 1, 2, 0))
    assert add_external_noise(f, NoiseParams(0.0, 7)) is f


def test_noise_variance_concentration():
    zero = Field(GridDims(32, 32), np.zeros((32, 32)))
    v = add_external_noise(zero, NoiseParams(1.0, 1)).values
    assert 0.85 <= np.mean(np.abs(v) ** 2) <= 1.15
    assert 0.85 <= np.var(v) <= 1.15


def test_noise_deterministic():
    zero = Field(GridDims(8, 8), np.zeros((8, 8)))
    a = add_external_noise(zero, NoiseParams(0.3, 5)).values
    b = add_external_noise(zero, NoiseParams(0.3, 5)).values
    assert a.tobytes() == b.tobytes()


def test_noise_statistics_10k_samples():
    s = 0.7
    zero = Field(GridDims(100, 100), np.zeros((100, 100)))
    v = add_external_noise(zero, NoiseParams(s, 11)).values
    assert 0.95 * s**2 <= np.mean(np.abs(v) ** 2) <= 1.05 * s**2
    # circular: real and imaginary parts carry half each
    assert abs(np.var(v.real) - s**2 / 2) < 0.05 * s**2


def test_random_model_example1():
    m = random_model(GridDims(128, 128), 12, 2.0, 3.0, 42)
    assert m.k == 12
    assert np.all((m.amplitudes >= 2) & (m.amplitudes <= 3))
    assert len({(c.kx, c.ky) for c in m.components}) == 12
    assert random_model(GridDims(128, 128), 12, 2.0, 3.0, 42) == m


def test_random_model_degenerate_range_and_capacity():
    m = random_model(GridDims(4, 4), 4, 1.0, 1.0, 0)
    assert np.all(m.amplitudes == 1.0)
    with pytest.raises(CapacityError):
        random_model(GridDims(8, 8), 17, 1.0, 2.0, 0)


def test_mixed_model_groups():
    m = mixed_model(GridDims(64, 64), [(8, 3.0, 3.0), (4, 0.2, 0.2)], 3)
    amps = sorted(m.amplitudes)
    assert amps[:4] == [0.2] * 4 and amps[4:] == [3.0] * 8


def test_json_round_trip():
    m = random_model(GridDims(16, 8), 5, 0.5, 1.5, 9)
    doc = json.loads(m.to_json())
    assert set(doc) == {"nx", "ny", "components"}
    assert set(doc["components"][0]) == {"amp", "kx", "ky"}
    assert SignalModel.from_json(m.to_json()) == m


small_models = st.integers(0, 2**32 - 1).flatmap(
    lambda seed: st.tuples(st.just(seed), st.integers(4, 12), st.integers(4, 12), st.integers(1, 4))
)


@settings(max_examples=40, deadline=None)
@given(small_models)
def test_linearity_and_modulus_bound(args):
    seed, nx, ny, k = args
    dims = GridDims(nx, ny)
    model = random_model(dims, k, 0.1, 5.0, seed)
    whole = synthesize(model).values
    first = SignalModel(dims, model.components[:1])
    parts = synthesize(first).values
    if k > 1:
        parts = parts + synthesize(SignalModel(dims, model.components[1:])).values
    np.testing.assert_allclose(whole, parts, rtol=1e-12, atol=1e-12 * model.amplitudes.sum())
    assert np.all(np.abs(whole) <= model.amplitudes.sum() * (1 + 1e-12))


@settings(max_examples=30, deadline=None)
@given(small_models)
def test_frequency_exactness(args):
    seed, nx, ny, k = args
    dims = GridDims(nx, ny)
    model = random_model(dims, k, 0.1, 5.0, seed)
    spec = full_dft(synthesize(model)).values
    for c in model.components:
        assert abs(spec[c.kx, c.ky] - dims.n * c.amplitude) < 1e-9 * dims.n * c.amplitude
    mask = np.ones(dims.shape, bool)
    mask[model.bins[:, 0], model.bins[:, 1]] = False
    assert np.all(np.abs(spec[mask]) < 1e-9 * dims.n * model.amplitudes.max())


def test_component_order_irrelevant():
    dims = GridDims(8, 8)
    a = model_from_components(dims, [(1.0, 1, 2), (2.0, 3, 4)])
    b = model_from_components(dims, [(2.0, 3, 4), (1.0, 1, 2)])
    np.testing.assert_allclose(synthesize(a).values, synthesize(b).values, atol=1e-14)
    assert Component(1.0, 1, 2) == a.components[0]
