"""Annular network region, user placement, and the blocking-cone algorithm."""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["AnnulusRegion", "PlanarPoint", "UserSet", "BlockingCone",
           "BlockageReport", "grid_placement", "sample_bpp",
           "orbital_positions", "blocked_set", "blocked_flags_xy",
           "save_placements_csv", "load_placements_csv"]


@dataclass(frozen=True)
class AnnulusRegion:
    """Finite network area between radii r_in and r_out (meters)."""
    r_in: float
    r_out: float

    def __post_init__(self):
        if not (0.0 < self.r_in < self.r_out):
            raise ValueError(
                f"annulus needs 0 < r_in < r_out, got ({self.r_in}, {self.r_out})")

    def area(self) -> float:
        return math.pi * (self.r_out ** 2 - self.r_in ** 2)

    def contains_radius(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return (r >= self.r_in) & (r <= self.r_out)


@dataclass(frozen=True)
class PlanarPoint:
    """2-D position; radius/azimuth views round-trip with (x, y)."""
    x: float
    y: float

    @property
    def radius(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def azimuth(self) -> float:
        return math.atan2(self.y, self.x)

    @classmethod
    def from_polar(cls, radius: float, azimuth: float) -> "PlanarPoint":
        return cls(radius * math.cos(azimuth), radius * math.sin(azimuth))


def _as_xy(points) -> np.ndarray:
    """(K, 2) float array from a list of PlanarPoint or an (K, 2) array."""
    if isinstance(points, np.ndarray):
        return points.reshape(-1, 2).astype(float)
    return np.array([(p.x, p.y) for p in points], dtype=float).reshape(-1, 2)


@dataclass
class UserSet:
    """K interfering users: transmitter positions, blockage (body) positions,
    and the common blockage diameter W."""
    transmitters: list
    blockages: list
    blockage_diameter: float
    colocated: bool = False

    def __post_init__(self):
        if len(self.transmitters) != len(self.blockages):
            raise ValueError("transmitters and blockages must have equal length")
        if self.blockage_diameter <= 0:
            raise ValueError("blockage diameter must be positive")

    @property
    def k(self) -> int:
        return len(self.transmitters)

    def tx_xy(self) -> np.ndarray:
        return _as_xy(self.transmitters)

    def blockage_xy(self) -> np.ndarray:
        return _as_xy(self.blockages)


@dataclass(frozen=True)
class BlockingCone:
    """Angular wedge behind one blockage: azimuths within +/- half_angle of
    `azimuth` are shadowed for transmitters farther than `apex_distance`."""
    apex_distance: float
    azimuth: float
    half_angle: float
    clamped: bool = False


@dataclass
class BlockageReport:
    """Per-transmitter blocked flags plus the cones that produced them."""
    blocked: np.ndarray
    cones: list = field(default_factory=list)

    @property
    def los(self) -> np.ndarray:
        return ~self.blocked


def grid_placement(n: int, spacing: float, region: AnnulusRegion, *,
                   blockage_diameter: float) -> UserSet:
    """Users on an n x n lattice centered on the origin, restricted to the
    annulus; blockages co-located with transmitters.

    Lattice points are visited row-major (top row first, left to right).
    Points with radius outside [r_in, r_out] (including the origin when
    r_in > 0) are dropped; the result may be empty for degenerate inputs.
    """
    if n < 1:
        raise ValueError("grid size n must be >= 1")
    if spacing <= 0:
        raise ValueError("grid spacing must be positive")
    half = (n - 1) / 2.0
    pts = []
    for i in range(n):
        for j in range(n):
            x = (j - half) * spacing
            y = (half - i) * spacing
            if region.contains_radius(math.hypot(x, y)):
                pts.append(PlanarPoint(x, y))
    return UserSet(transmitters=pts, blockages=list(pts),
                   blockage_diameter=blockage_diameter, colocated=True)


def sample_bpp(k: int, region: AnnulusRegion, rng: np.random.Generator) -> list:
    """K i.i.d. points uniform over the annulus (binomial point process).

    Radius has density 2*pi*r/|A| on [r_in, r_out] (inverse-CDF sampling);
    azimuth is uniform on [0, 2*pi).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return []
    u = rng.random(k)
    r = np.sqrt(region.r_in ** 2 + u * (region.r_out ** 2 - region.r_in ** 2))
    phi = rng.random(k) * 2.0 * math.pi
    return [PlanarPoint.from_polar(ri, pi_) for ri, pi_ in zip(r, phi)]


def orbital_positions(blockages, d: float, blockage_diameter: float,
                      rng: np.random.Generator) -> list:
    """Transmitters placed uniformly on a circle of radius d around each
    blockage center (the orbital model).

    Positions are kept even if they leave the annulus.

    Raises:
        ValueError: if d <= blockage_diameter / 2 (transmitter would sit
            inside its own body circle).
    """
    if d <= blockage_diameter / 2.0:
        raise ValueError(
            f"orbital radius d={d} must exceed half the blockage diameter "
            f"{blockage_diameter / 2.0}")
    b_xy = _as_xy(blockages)
    u = rng.random(len(b_xy)) * 2.0 * math.pi
    xy = b_xy + d * np.column_stack([np.cos(u), np.sin(u)])
    return [PlanarPoint(x, y) for x, y in xy]


def _wrap_angle(a):
    """Wrap angles to (-pi, pi]."""
    return -((-np.asarray(a) + math.pi) % (2.0 * math.pi) - math.pi)


def blocked_flags_xy(tx_xy: np.ndarray, bl_xy: np.ndarray, w: float,
                     exclude_same_index: bool) -> np.ndarray:
    """Vectorized blocking test of transmitters against blockage disks.

    A transmitter is blocked if any admissible blockage lies within w/2 of
    it, or if its azimuth falls in the blocking cone of any admissible
    blockage strictly closer to the origin. Cone half-angles are
    arcsin(w / (2|B|)), clamped to pi/2 when |B| <= w/2.

    Args:
        tx_xy: (..., K, 2) transmitter positions (leading batch dims allowed).
        bl_xy: (..., Kb, 2) blockage centers; all radii must be positive.
        w: blockage diameter.
        exclude_same_index: skip the j == i pairing (requires K == Kb).

    Returns:
        Boolean array (..., K) of blocked flags.
    """
    tx_xy = np.asarray(tx_xy, dtype=float)
    bl_xy = np.asarray(bl_xy, dtype=float)
    rb = np.hypot(bl_xy[..., 0], bl_xy[..., 1])
    if np.any(rb <= 0):
        raise ValueError("all blockage centers must have positive radius")
    r = np.hypot(tx_xy[..., 0], tx_xy[..., 1])
    phi = np.arctan2(tx_xy[..., 1], tx_xy[..., 0])
    phib = np.arctan2(bl_xy[..., 1], bl_xy[..., 0])
    half = np.where(rb <= w / 2.0, math.pi / 2.0,
                    np.arcsin(np.minimum(1.0, w / (2.0 * rb))))

    diff = tx_xy[..., :, None, :] - bl_xy[..., None, :, :]
    near = np.einsum("...ijk,...ijk->...ij", diff, diff) <= (w / 2.0) ** 2
    dphi = np.abs(_wrap_angle(phi[..., :, None] - phib[..., None, :]))
    in_cone = (rb[..., None, :] < r[..., :, None]) & (dphi <= half[..., None, :])
    hit = near | in_cone
    if exclude_same_index:
        if tx_xy.shape[-2] != bl_xy.shape[-2]:
            raise ValueError("exclude_same_index needs equal-length sets")
        k = tx_xy.shape[-2]
        hit = hit & ~np.eye(k, dtype=bool)
    return hit.any(axis=-1)


def blocked_set(users: UserSet, include_self: bool) -> BlockageReport:
    """Blocked/LOS determination for a user set.

    Implements the four-step procedure: proximity test against blockage
    disks, blockages sorted by distance, blocking cones, and the union test
    of each transmitter's azimuth against cones of strictly closer
    blockages. With include_self=False the j == i pairing is skipped
    everywhere (co-located fixed-geometry convention); with
    include_self=True each user's own blockage participates (orbital model,
    where self-blocking is intended).
    """
    tx = users.tx_xy()
    bl = users.blockage_xy()
    w = users.blockage_diameter
    blocked = blocked_flags_xy(tx, bl, w, exclude_same_index=not include_self)

    rb = np.hypot(bl[:, 0], bl[:, 1])
    order = np.argsort(rb, kind="stable")
    cones = []
    for j in order:
        clamped = rb[j] <= w / 2.0
        half = math.pi / 2.0 if clamped else math.asin(min(1.0, w / (2.0 * rb[j])))
        cones.append(BlockingCone(apex_distance=float(rb[j]),
                                  azimuth=float(math.atan2(bl[j, 1], bl[j, 0])),
                                  half_angle=half, clamped=clamped))
    return BlockageReport(blocked=blocked, cones=cones)


def save_placements_csv(fileobj, users: UserSet) -> None:
    """Write placements as CSV rows (index, x_m, y_m, role)."""
    writer = csv.writer(fileobj)
    writer.writerow(["index", "x_m", "y_m", "role"])
    for i, p in enumerate(users.transmitters):
        writer.writerow([i, repr(p.x), repr(p.y), "tx"])
    for i, p in enumerate(users.blockages):
        writer.writerow([i, repr(p.x), repr(p.y), "blockage"])


def load_placements_csv(fileobj, blockage_diameter: float) -> UserSet:
    """Read placements written by save_placements_csv."""
    if isinstance(fileobj, str):
        fileobj = io.StringIO(fileobj)
    reader = csv.DictReader(fileobj)
    tx, bl = {}, {}
    for row in reader:
        p = PlanarPoint(float(row["x_m"]), float(row["y_m"]))
        if row["role"] == "tx":
            tx[int(row["index"])] = p
        elif row["role"] == "blockage":
            bl[int(row["index"])] = p
        else:
            raise ValueError(f"unknown role {row['role']!r}")
    if sorted(tx) != sorted(bl):
        raise ValueError("placement file must pair tx and blockage indices")
    order = sorted(tx)
    txs = [tx[i] for i in order]
    bls = [bl[i] for i in order]
    return UserSet(transmitters=txs, blockages=bls,
                   blockage_diameter=blockage_diameter,
                   colocated=all(a == b for a, b in zip(txs, bls)))
