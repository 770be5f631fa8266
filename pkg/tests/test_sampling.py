import json

import numpy as np
import pytest

from oracles import direct_eval
from sfar2d import (
    CapacityError,
    Field,
    GridDims,
    InvariantError,
    SampleSupport,
    ShapeError,
    extract,
    full_support,
    random_model,
    sampling_ratio,
    synthesize,
    uniform_support,
)
from sfar2d.sampling import samples_for_ratio
from sfar2d.signal_model import model_from_components


def test_full_sampling_by_count():
    s = uniform_support(GridDims(8, 8), 64, 0)
    assert s.m == 64
    assert np.array_equal(s.positions, full_support(GridDims(8, 8)).positions)


def test_example1_count():
    dims = GridDims(128, 128)
    assert samples_for_ratio(dims, 0.09) == 1474
    s = uniform_support(dims, 1474, 1)
    assert len(set(map(tuple, s.positions.tolist()))) == 1474
    assert sampling_ratio(s) == pytest.approx(1474 / 16384)
    assert round(sampling_ratio(s), 5) == 0.08997


def test_capacity():
    with pytest.raises(CapacityError):
        uniform_support(GridDims(8, 8), 65, 0)
    with pytest.raises(CapacityError):
        uniform_support(GridDims(8, 8), 0, 0)


def test_canonical_order_and_validation():
    dims = GridDims(4, 4)
    s = SampleSupport(dims, [(3, 1), (0, 2), (1, 0)])
    assert s.positions.tolist() == [[0, 2], [1, 0], [3, 1]]
    with pytest.raises(InvariantError):
        SampleSupport(dims, [(0, 0), (0, 0)])
    with pytest.raises(InvariantError):
        SampleSupport(dims, [(4, 0)])


def test_ratio_arithmetic():
    assert sampling_ratio(full_support(GridDims(5, 3))) == 1.0
    assert sampling_ratio(uniform_support(GridDims(8, 8), 16, 3)) == 0.25


def test_extract_constant_field():
    f = Field(GridDims(6, 6), np.ones((6, 6)))
    s = uniform_support(GridDims(6, 6), 10, 2)
    assert np.array_equal(extract(f, s).values, np.ones(10, dtype=complex))


def test_extract_full_support_is_row_major_flatten():
    f = synthesize(random_model(GridDims(8, 6), 3, 1, 2, 4))
    meas = extract(f, full_support(f.dims))
    assert np.array_equal(meas.values, f.values.ravel())


def test_extract_corners_match_pointwise():
    comps = [(1.0, 1, 2), (2.5, 6, 3)]
    dims = GridDims(8, 8)
    f = synthesize(model_from_components(dims, comps))
    corners = [(0, 0), (0, 7), (7, 0), (7, 7)]
    meas = extract(f, SampleSupport(dims, corners))
    for v, (x, y) in zip(meas.values, corners):
        assert abs(v - direct_eval(comps, 8, 8, x, y)) < 1e-12


def test_extract_dims_mismatch():
    with pytest.raises(ShapeError):
        extract(Field(GridDims(4, 4), np.zeros((4, 4))), full_support(GridDims(4, 5)))


def test_round_trip_scatter():
    f = synthesize(random_model(GridDims(12, 12), 4, 1, 2, 8))
    meas = extract(f, full_support(f.dims))
    assert np.array_equal(meas.zero_filled(), f.values)


def test_zero_fill_keeps_only_sampled():
    f = Field(GridDims(4, 4), np.arange(16).reshape(4, 4) + 1.0)
    s = SampleSupport(f.dims, [(1, 1), (2, 3)])
    z = extract(f, s).zero_filled()
    assert np.count_nonzero(z) == 2 and z[1, 1] == 6 and z[2, 3] == 12


def test_determinism():
    a = uniform_support(GridDims(32, 16), 100, 12345)
    b = uniform_support(GridDims(32, 16), 100, 12345)
    assert a.positions.tobytes() == b.positions.tobytes()


def test_uniform_inclusion_frequency():
    dims = GridDims(8, 8)
    counts = np.zeros(dims.shape)
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        counts += uniform_support(dims, 16, rng).mask()
    freq = counts / 10_000
    assert freq.min() >= 0.23 and freq.max() <= 0.27


def test_json_round_trip():
    s = uniform_support(GridDims(10, 7), 9, 0)
    doc = json.loads(s.to_json())
    assert set(doc) == {"nx", "ny", "positions"}
    assert SampleSupport.from_json(s.to_json()).positions.tolist() == s.positions.tolist()
