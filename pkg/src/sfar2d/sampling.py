"""Random sampling supports and measurement extraction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CapacityError, InvariantError, ShapeError
from .signal_model import Field, GridDims


@dataclass(frozen=True)
class SampleSupport:
    """Available grid positions, stored as an (m, 2) array in row-major order."""

    dims: GridDims
    positions: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64).reshape(-1, 2)
        m = pos.shape[0]
        if not 1 <= m <= self.dims.n:
            raise InvariantError(f"support size {m} outside [1, {self.dims.n}]")
        if np.any(pos < 0) or np.any(pos[:, 0] >= self.dims.nx) or np.any(pos[:, 1] >= self.dims.ny):
            raise InvariantError("support position outside the grid")
        flat = pos[:, 0] * self.dims.ny + pos[:, 1]
        order = np.argsort(flat, kind="stable")
        flat = flat[order]
        if np.any(np.diff(flat) == 0):
            raise InvariantError("duplicate support positions")
        pos = np.ascontiguousarray(pos[order])
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def m(self) -> int:
        return int(self.positions.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.positions[:, 1]

    @property
    def flat_indices(self) -> np.ndarray:
        return self.positions[:, 0] * self.dims.ny + self.positions[:, 1]

    def mask(self) -> np.ndarray:
        out = np.zeros(self.dims.shape, dtype=bool)
        out[self.x, self.y] = True
        return out

    def to_dict(self) -> dict:
        return {"nx": self.dims.nx, "ny": self.dims.ny, "positions": self.positions.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "SampleSupport":
        return cls(GridDims(d["nx"], d["ny"]), np.asarray(d["positions"], dtype=np.int64))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SampleSupport":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Measurements:
    """Sampled values ``values[j] = s(positions[j])``."""

    support: SampleSupport
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128).reshape(-1)
        if v.shape[0] != self.support.m:
            raise InvariantError(f"{v.shape[0]} values for a support of size {self.support.m}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dims(self) -> GridDims:
        return self.support.dims

    @property
    def m(self) -> int:
        return self.support.m

    def zero_filled(self) -> np.ndarray:
        """Scatter the values back onto the grid, zeros elsewhere."""
        grid = np.zeros(self.dims.shape, dtype=np.complex128)
        grid[self.support.x, self.support.y] = self.values
        return grid


def full_support(dims: GridDims) -> SampleSupport:
    xx, yy = np.meshgrid(np.arange(dims.nx), np.arange(dims.ny), indexing="ij")
    return SampleSupport(dims, np.stack([xx.ravel(), yy.ravel()], axis=1))


def samples_for_ratio(dims: GridDims, ratio: float) -> int:
    """Number of samples kept at a given ratio (floored, at least 1)."""
    if not 0 < ratio <= 1:
        raise InvariantError(f"sampling ratio must be in (0, 1], got {ratio}")
    return max(1, int(np.floor(ratio * dims.n + 1e-9)))


def uniform_support(dims: GridDims, m: int, seed) -> SampleSupport:
    """Draw ``m`` grid positions uniformly without replacement."""
    if not 1 <= m <= dims.n:
        raise CapacityError(f"m={m} outside [1, {dims.n}]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    flat = np.sort(rng.choice(dims.n, size=m, replace=False))
    return SampleSupport(dims, np.stack([flat // dims.ny, flat % dims.ny], axis=1))


def extract(fld: Field, support: SampleSupport) -> Measurements:
    if fld.dims != support.dims:
        raise ShapeError(f"field dims {fld.dims} != support dims {support.dims}")
    return Measurements(support, fld.values[support.x, support.y])


def sampling_ratio(support: SampleSupport) -> float:
    return support.m / support.dims.n
