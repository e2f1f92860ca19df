"""Shoebox classroom geometry with banded acoustic materials.

Surfaces carry absorption, scattering, and transmission coefficients in
six octave bands (125 Hz to 4 kHz), the granularity of published
material tables. Furniture is axis-aligned boxes only, which keeps
occlusion tests exact.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FurnitureOutOfBoundsError,
    InvalidDimensionError,
    InvalidMaterialError,
    UnknownMaterialError,
    ZeroAbsorptionError,
)

BAND_CENTERS_HZ = (125, 250, 500, 1000, 2000, 4000)
N_BANDS = len(BAND_CENTERS_HZ)

# Wall faces in a fixed order: the planes x=0, x=Lx, y=0, y=Ly, z=0, z=Lz.
WALL_FACES = ("-x", "+x", "-y", "+y", "-z", "+z")

SABINE_CONSTANT = 0.161  # s/m


def band_gains(values) -> np.ndarray:
    """Validate and freeze a 6-band coefficient vector in [0, 1]."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (N_BANDS,):
        raise InvalidMaterialError(f"expected {N_BANDS} band coefficients, got shape {arr.shape}")
    if not np.isfinite(arr).all() or (arr < 0).any() or (arr > 1).any():
        raise InvalidMaterialError(f"band coefficients must lie in [0, 1], got {arr.tolist()}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def flat_bands(value: float) -> np.ndarray:
    """Same coefficient in every band."""
    return band_gains(np.full(N_BANDS, float(value)))


@dataclass(frozen=True)
class AcousticMaterial:
    """Per-band absorption, scattering, and transmission of a surface."""

    name: str
    absorption: np.ndarray
    scattering: np.ndarray
    transmission: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "absorption", band_gains(self.absorption))
        object.__setattr__(self, "scattering", band_gains(self.scattering))
        object.__setattr__(self, "transmission", band_gains(self.transmission))
        total = self.absorption + self.transmission
        if (total > 1.0 + 1e-12).any():
            raise InvalidMaterialError(
                f"material {self.name!r}: absorption + transmission exceeds 1 "
                f"in at least one band ({total.tolist()})"
            )


def uniform_material(name: str, absorption: float, scattering: float = 0.0, transmission: float = 0.0) -> AcousticMaterial:
    return AcousticMaterial(name, flat_bands(absorption), flat_bands(scattering), flat_bands(transmission))


# Default material table. Absorption values follow standard published
# octave-band tables for these surface types; scattering and transmission
# are plausible settings, exposed as configuration rather than claimed
# as ground truth.
DEFAULT_MATERIALS: dict[str, AcousticMaterial] = {
    m.name: m
    for m in (
        AcousticMaterial(
            "concrete_wall",
            absorption=(0.01, 0.01, 0.02, 0.02, 0.02, 0.03),
            scattering=(0.10, 0.10, 0.10, 0.10, 0.10, 0.10),
            transmission=(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        ),
        AcousticMaterial(
            "glass_window",
            absorption=(0.35, 0.25, 0.18, 0.12, 0.07, 0.04),
            scattering=(0.05, 0.05, 0.05, 0.05, 0.05, 0.05),
            transmission=(0.05, 0.05, 0.04, 0.03, 0.02, 0.02),
        ),
        AcousticMaterial(
            "wood_desk",
            absorption=(0.15, 0.11, 0.10, 0.07, 0.06, 0.07),
            scattering=(0.30, 0.35, 0.40, 0.40, 0.40, 0.40),
            transmission=(0.50, 0.40, 0.30, 0.25, 0.20, 0.15),
        ),
        AcousticMaterial(
            "carpet_floor",
            absorption=(0.02, 0.06, 0.14, 0.37, 0.60, 0.65),
            scattering=(0.10, 0.10, 0.15, 0.20, 0.25, 0.30),
            transmission=(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        ),
        AcousticMaterial(
            "acoustic_tile_ceiling",
            absorption=(0.50, 0.70, 0.60, 0.70, 0.70, 0.50),
            scattering=(0.20, 0.25, 0.30, 0.30, 0.30, 0.30),
            transmission=(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        ),
        AcousticMaterial(
            "whiteboard",
            absorption=(0.01, 0.01, 0.01, 0.02, 0.02, 0.02),
            scattering=(0.05, 0.05, 0.05, 0.05, 0.05, 0.05),
            transmission=(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        ),
    )
}


@dataclass(frozen=True)
class FurnitureBox:
    """Axis-aligned box defined by its center and edge lengths, in meters."""

    center: tuple[float, float, float]
    size: tuple[float, float, float]
    material: AcousticMaterial

    def __post_init__(self):
        if any(s <= 0 for s in self.size):
            raise InvalidDimensionError(f"furniture size must be positive, got {self.size}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "size", tuple(float(s) for s in self.size))

    @property
    def min_corner(self) -> np.ndarray:
        return np.array(self.center) - 0.5 * np.array(self.size)

    @property
    def max_corner(self) -> np.ndarray:
        return np.array(self.center) + 0.5 * np.array(self.size)


@dataclass(frozen=True)
class RoomModel:
    """Shoebox room: dimensions, six wall materials, and furniture boxes."""

    dimensions: tuple[float, float, float]
    wall_materials: dict[str, AcousticMaterial] = field(repr=False)
    furniture: tuple[FurnitureBox, ...] = ()

    def __post_init__(self):
        dims = tuple(float(d) for d in self.dimensions)
        if len(dims) != 3 or any(not np.isfinite(d) or d <= 0 for d in dims):
            raise InvalidDimensionError(f"room dimensions must be three positive numbers, got {self.dimensions}")
        object.__setattr__(self, "dimensions", dims)
        missing = [f for f in WALL_FACES if f not in self.wall_materials]
        if missing:
            raise InvalidMaterialError(f"missing wall materials for faces {missing}")
        object.__setattr__(self, "furniture", tuple(self.furniture))
        lo = np.zeros(3)
        hi = np.array(dims)
        for box in self.furniture:
            if (box.min_corner < lo - 1e-9).any() or (box.max_corner > hi + 1e-9).any():
                raise FurnitureOutOfBoundsError(
                    f"furniture box at {box.center} with size {box.size} exceeds room bounds {dims}"
                )

    @property
    def volume(self) -> float:
        lx, ly, lz = self.dimensions
        return lx * ly * lz

    @property
    def surface_area(self) -> float:
        lx, ly, lz = self.dimensions
        return 2.0 * (lx * ly + lx * lz + ly * lz)

    def wall_face_area(self, face: str) -> float:
        lx, ly, lz = self.dimensions
        return {"x": ly * lz, "y": lx * lz, "z": lx * ly}[face[1]]

    def contains_point(self, point, margin: float = 0.0) -> bool:
        p = np.asarray(point, dtype=np.float64)
        hi = np.array(self.dimensions)
        return bool((p > margin).all() and (p < hi - margin).all())


def _exposed_furniture_area(room: RoomModel, box: FurnitureBox) -> float:
    """Total box face area, excluding faces flush with a room boundary."""
    sx, sy, sz = box.size
    lo, hi = box.min_corner, box.max_corner
    dims = room.dimensions
    face_areas = (sy * sz, sy * sz, sx * sz, sx * sz, sx * sy, sx * sy)
    flush = (
        abs(lo[0]) < 1e-9, abs(hi[0] - dims[0]) < 1e-9,
        abs(lo[1]) < 1e-9, abs(hi[1] - dims[1]) < 1e-9,
        abs(lo[2]) < 1e-9, abs(hi[2] - dims[2]) < 1e-9,
    )
    return sum(a for a, skip in zip(face_areas, flush) if not skip)


def sabine_rt60(room: RoomModel) -> np.ndarray:
    """Per-band Sabine reverberation time 0.161 V / A, in seconds.

    A sums face area times absorption over walls and exposed furniture
    faces. Bands with zero total absorption get inf (unbounded RT60);
    all-zero absorption everywhere raises ZeroAbsorptionError.
    """
    absorbing_area = np.zeros(N_BANDS)
    for face in WALL_FACES:
        mat = room.wall_materials[face]
        absorbing_area += room.wall_face_area(face) * mat.absorption
    for box in room.furniture:
        absorbing_area += _exposed_furniture_area(room, box) * box.material.absorption
    if (absorbing_area <= 0).all():
        raise ZeroAbsorptionError("total absorption is zero in every band; RT60 is unbounded")
    rt60 = np.full(N_BANDS, np.inf)
    nonzero = absorbing_area > 0
    rt60[nonzero] = SABINE_CONSTANT * room.volume / absorbing_area[nonzero]
    return rt60


def _material_from_config(name: str, entry: dict) -> AcousticMaterial:
    try:
        return AcousticMaterial(
            name,
            absorption=entry["absorption"],
            scattering=entry.get("scattering", np.zeros(N_BANDS)),
            transmission=entry.get("transmission", np.zeros(N_BANDS)),
        )
    except KeyError as exc:
        raise InvalidMaterialError(f"material {name!r}: missing field {exc}") from exc


def build_room(config: dict) -> RoomModel:
    """Build and validate a RoomModel from a JSON-style description.

    Expected keys: dimensions [Lx, Ly, Lz]; walls {face: material name};
    materials {name: {absorption[6], scattering[6], transmission[6]}}
    (merged over the default table); furniture [{center, size, material}].
    """
    if "dimensions" not in config:
        raise InvalidDimensionError("room config missing 'dimensions'")
    materials = dict(DEFAULT_MATERIALS)
    for name, entry in config.get("materials", {}).items():
        materials[name] = _material_from_config(name, entry)

    def lookup(name: str) -> AcousticMaterial:
        if name not in materials:
            raise UnknownMaterialError(f"unknown material {name!r}")
        return materials[name]

    walls_cfg = config.get("walls", {})
    default_wall = walls_cfg.get("default", "concrete_wall")
    walls = {face: lookup(walls_cfg.get(face, default_wall)) for face in WALL_FACES}
    furniture = [
        FurnitureBox(tuple(item["center"]), tuple(item["size"]), lookup(item["material"]))
        for item in config.get("furniture", [])
    ]
    return RoomModel(tuple(config["dimensions"]), walls, tuple(furniture))


def load_room(path) -> RoomModel:
    with open(path, "r", encoding="utf-8") as f:
        return build_room(json.load(f))


def uniform_room(dimensions, absorption: float, scattering: float = 0.0) -> RoomModel:
    """Shoebox with one flat-band material on every wall; handy for tests."""
    mat = uniform_material(f"uniform_a{absorption:g}", absorption, scattering)
    return RoomModel(tuple(dimensions), {face: mat for face in WALL_FACES})
