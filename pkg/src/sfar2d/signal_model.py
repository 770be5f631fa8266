"""
Multicomponent 2D complex-exponential fields.

A field on an ``nx x ny`` grid is a sum of K on-grid exponentials

    s(x, y) = sum_i A_i exp(+j 2 pi kx_i x / nx) exp(+j 2 pi ky_i y / ny)

with ``x`` indexing rows and ``y`` columns, both starting at 0. The same
model describes the dechirped ISAR return of K point scatterers, with the
amplitude playing the role of the reflection coefficient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, InvariantError, ShapeError


@dataclass(frozen=True)
class GridDims:
    """Grid size: ``nx`` rows (x) by ``ny`` columns (y)."""

    nx: int
    ny: int

    def __post_init__(self):
        for name in ("nx", "ny"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise InvariantError(f"{name} must be an integer, got {v!r}")
            if v < 1:
                raise InvariantError(f"{name} must be >= 1, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def n(self) -> int:
        return self.nx * self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)


@dataclass(frozen=True)
class Component:
    amplitude: float
    kx: int
    ky: int

    def __post_init__(self):
        if not np.isfinite(self.amplitude) or self.amplitude <= 0:
            raise InvariantError(f"amplitude must be > 0, got {self.amplitude!r}")
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "kx", int(self.kx))
        object.__setattr__(self, "ky", int(self.ky))


@dataclass(frozen=True)
class SignalModel:
    """Ground truth: grid dimensions plus an ordered list of components."""

    dims: GridDims
    components: tuple[Component, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) < 1:
            raise InvariantError("model needs at least one component (K >= 1)")
        if 4 * len(comps) > self.dims.n:
            raise InvariantError(
                f"K={len(comps)} exceeds nx*ny/4={self.dims.n / 4:g} (sparsity bound)"
            )
        seen = set()
        for c in comps:
            if not (0 <= c.kx < self.dims.nx and 0 <= c.ky < self.dims.ny):
                raise InvariantError(f"frequency ({c.kx}, {c.ky}) outside {self.dims.nx}x{self.dims.ny} grid")
            if (c.kx, c.ky) in seen:
                raise InvariantError(f"duplicate frequency ({c.kx}, {c.ky})")
            seen.add((c.kx, c.ky))

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c.amplitude for c in self.components])

    @property
    def bins(self) -> np.ndarray:
        """(K, 2) integer array of (kx, ky), in component order."""
        return np.array([(c.kx, c.ky) for c in self.components], dtype=np.int64).reshape(-1, 2)

    @property
    def energy(self) -> float:
        """Sum of squared amplitudes; the mean of |s|^2 over the full grid."""
        return float(np.sum(self.amplitudes ** 2))

    def to_dict(self) -> dict:
        return {
            "nx": self.dims.nx,
            "ny": self.dims.ny,
            "components": [{"amp": c.amplitude, "kx": c.kx, "ky": c.ky} for c in self.components],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SignalModel":
        dims = GridDims(d["nx"], d["ny"])
        comps = [Component(c["amp"], c["kx"], c["ky"]) for c in d["components"]]
        return cls(dims, tuple(comps))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SignalModel":
        return cls.from_dict(json.loads(text))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Field:
    """Dense complex samples, ``values[x, y]``."""

    dims: GridDims
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.dims.shape:
            raise ShapeError(f"values shape {v.shape} does not match dims {self.dims.shape}")
        if v is self.values and v.flags.writeable:
            v = v.copy()
        object.__setattr__(self, "values", _frozen(v))

    def __add__(self, other: "Field") -> "Field":
        if other.dims != self.dims:
            raise ShapeError("cannot add fields with different dims")
        return Field(self.dims, self.values + other.values)


@dataclass(frozen=True)
class NoiseParams:
    """Complex circular Gaussian noise; ``sigma_eps_sample**2`` is the total (re + im) variance."""

    sigma_eps_sample: float
    seed: int = 0

    def __post_init__(self):
        if not self.sigma_eps_sample >= 0:
            raise InvariantError(f"sigma_eps_sample must be >= 0, got {self.sigma_eps_sample!r}")


def exponential_atoms(dims: GridDims, bins: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix of exp(+j2pi(kx x/nx + ky y/ny)) with rows over points and columns over bins.

    Phases are reduced modulo the grid before the exponential so that large
    index products do not lose precision.
    """
    bins = np.asarray(bins, dtype=np.int64).reshape(-1, 2)
    px = np.mod(np.outer(x, bins[:, 0]), dims.nx) / dims.nx
    py = np.mod(np.outer(y, bins[:, 1]), dims.ny) / dims.ny
    return np.exp(2j * np.pi * (px + py))


def synthesize(model: SignalModel) -> Field:
    """Evaluate the model on its full grid."""
    dims = model.dims
    bins = model.bins
    x = np.arange(dims.nx)
    y = np.arange(dims.ny)
    ex = np.exp(2j * np.pi * (np.mod(np.outer(bins[:, 0], x), dims.nx) / dims.nx))  # (K, nx)
    ey = np.exp(2j * np.pi * (np.mod(np.outer(bins[:, 1], y), dims.ny) / dims.ny))  # (K, ny)
    values = (model.amplitudes[:, None] * ex).T @ ey
    return Field(dims, values)


def add_external_noise(fld: Field, params: NoiseParams) -> Field:
    """Add i.i.d. complex Gaussian noise. Zero sigma returns ``fld`` itself."""
    if params.sigma_eps_sample == 0:
        return fld
    rng = np.random.default_rng(params.seed)
    scale = params.sigma_eps_sample / np.sqrt(2.0)
    noise = rng.normal(size=fld.dims.shape) + 1j * rng.normal(size=fld.dims.shape)
    return Field(fld.dims, fld.values + scale * noise)


def mixed_model(dims: GridDims, groups: Sequence[tuple[int, float, float]], seed) -> SignalModel:
    """Random model built from groups of ``(count, amp_min, amp_max)``.

    All frequency pairs are distinct across groups; amplitudes within a group
    are uniform on ``[amp_min, amp_max]``.
    """
    groups = [(int(k), float(lo), float(hi)) for k, lo, hi in groups]
    total = sum(k for k, _, _ in groups)
    if total < 1:
        raise CapacityError("need at least one component")
    if 4 * total > dims.n:
        raise CapacityError(f"k={total} exceeds nx*ny/4={dims.n / 4:g}")
    for k, lo, hi in groups:
        if k < 0 or not (0 < lo <= hi):
            raise InvariantError(f"bad group (k={k}, amp_min={lo}, amp_max={hi})")
    rng = np.random.default_rng(seed)
    flat = rng.choice(dims.n, size=total, replace=False)
    amps = np.concatenate([rng.uniform(lo, hi, size=k) if lo < hi else np.full(k, lo) for k, lo, hi in groups])
    comps = tuple(Component(a, f // dims.ny, f % dims.ny) for a, f in zip(amps, flat))
    return SignalModel(dims, comps)


def random_model(dims: GridDims, k: int, amp_min: float, amp_max: float, seed) -> SignalModel:
    """``k`` components at distinct uniform bins with amplitudes uniform in ``[amp_min, amp_max]``."""
    return mixed_model(dims, [(k, amp_min, amp_max)], seed)


def model_from_components(dims: GridDims, comps: Iterable[tuple[float, int, int]]) -> SignalModel:
    return SignalModel(dims, tuple(Component(*c) for c in comps))
