"""Square-cell meshing of a geographic bounding box and area vocabulary.

A local equirectangular projection anchored at the bbox center converts
degrees to meters; at sub-kilometer district scale the distortion is
negligible against 50 m cells.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .staydetect import EARTH_RADIUS_M

_M_PER_DEG = math.pi / 180.0 * EARTH_RADIUS_M
_CEIL_EPS = 1e-9  # absorbs float noise so an exact multiple does not gain a cell


@dataclass(frozen=True)
class BBox:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self):
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise ValueError("degenerate bounding box")

    @property
    def center_lat(self):
        return 0.5 * (self.lat_min + self.lat_max)

    @classmethod
    def from_center(cls, center_lat, center_lon, height_m, width_m):
        """Build a bbox spanning exactly height_m x width_m around a center."""
        m_lat = _M_PER_DEG
        m_lon = _M_PER_DEG * math.cos(math.radians(center_lat))
        dlat = height_m / m_lat / 2.0
        dlon = width_m / m_lon / 2.0
        return cls(center_lat - dlat, center_lat + dlat, center_lon - dlon, center_lon + dlon)


@dataclass(frozen=True)
class Grid:
    """Fixed-size square mesh over a bbox; cell index = row * n_cols + col."""

    origin_lat: float
    origin_lon: float
    cell_m: float
    n_rows: int
    n_cols: int
    meters_per_deg_lat: float
    meters_per_deg_lon: float

    @property
    def n_cells(self):
        return self.n_rows * self.n_cols

    def cell_index(self, row, col):
        if not (0 <= row < self.n_rows and 0 <= col < self.n_cols):
            raise ValueError(f"cell ({row}, {col}) outside grid")
        return row * self.n_cols + col

    def cell_rowcol(self, index):
        if not (0 <= index < self.n_cells):
            raise ValueError(f"cell index {index} outside grid")
        return divmod(index, self.n_cols)

    def cell_bounds(self, index):
        """(lat_min, lat_max, lon_min, lon_max) of one cell's extent."""
        row, col = self.cell_rowcol(index)
        dlat = self.cell_m / self.meters_per_deg_lat
        dlon = self.cell_m / self.meters_per_deg_lon
        return (self.origin_lat + row * dlat, self.origin_lat + (row + 1) * dlat,
                self.origin_lon + col * dlon, self.origin_lon + (col + 1) * dlon)

    def cell_center(self, index):
        lat0, lat1, lon0, lon1 = self.cell_bounds(index)
        return 0.5 * (lat0 + lat1), 0.5 * (lon0 + lon1)


def build_grid(bbox, cell_m):
    """Mesh a bbox into ceil(height/cell) x ceil(width/cell) square cells."""
    if cell_m <= 0:
        raise ValueError("cell size must be positive")
    m_lat = _M_PER_DEG
    m_lon = _M_PER_DEG * math.cos(math.radians(bbox.center_lat))
    height_m = (bbox.lat_max - bbox.lat_min) * m_lat
    width_m = (bbox.lon_max - bbox.lon_min) * m_lon
    n_rows = int(math.ceil(height_m / cell_m - _CEIL_EPS))
    n_cols = int(math.ceil(width_m / cell_m - _CEIL_EPS))
    return Grid(bbox.lat_min, bbox.lon_min, float(cell_m), n_rows, n_cols, m_lat, m_lon)


def assign_area(grid, stay):
    """Cell index containing the stay's coordinates, or None if outside.

    Cells are half-open [start, start + cell_m) in both axes, so a point
    exactly on an interior boundary belongs to the higher-index cell.
    """
    y = (stay.lat - grid.origin_lat) * grid.meters_per_deg_lat
    x = (stay.lon - grid.origin_lon) * grid.meters_per_deg_lon
    # the epsilon keeps points computed to sit exactly on a boundary from
    # slipping into the lower cell through float round-off
    row = math.floor(y / grid.cell_m + _CEIL_EPS)
    col = math.floor(x / grid.cell_m + _CEIL_EPS)
    if 0 <= row < grid.n_rows and 0 <= col < grid.n_cols:
        return grid.cell_index(row, col)
    return None


@dataclass
class AreaVocabulary:
    """Dense ids over the grid cells that met the minimum-stay threshold."""

    retained: list  # cell indices, ascending
    area_index: dict  # cell index -> dense area id
    stay_counts: np.ndarray  # per retained area, aligned with dense ids
    n_in_bbox: int  # all in-bbox stays, retained + dropped cells

    @property
    def n_areas(self):
        return len(self.retained)


def build_vocabulary(grid, stays, min_stays):
    """Count stays per cell, retain cells with >= min_stays, annotate stays.

    Each stay's ``area_id`` is set in place: the dense area id for stays in
    retained cells, None otherwise.  The threshold is inclusive (a cell
    with exactly min_stays survives).
    """
    if min_stays < 1:
        raise ValueError("min_stays must be >= 1")
    counts = {}
    cells = []
    for s in stays:
        c = assign_area(grid, s)
        cells.append(c)
        if c is not None:
            counts[c] = counts.get(c, 0) + 1
    retained = sorted(c for c, n in counts.items() if n >= min_stays)
    if not retained:
        raise ValueError("no areas meet threshold")
    area_index = {c: i for i, c in enumerate(retained)}
    for s, c in zip(stays, cells):
        s.area_id = area_index.get(c) if c is not None else None
    return AreaVocabulary(
        retained=retained,
        area_index=area_index,
        stay_counts=np.array([counts[c] for c in retained], dtype=int),
        n_in_bbox=sum(counts.values()),
    )


def write_vocabulary(grid, vocab, path):
    """Vocabulary CSV: area_id,row,col,center_lat,center_lon,stay_count."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["area_id", "row", "col", "center_lat", "center_lon", "stay_count"])
        for area_id, cell in enumerate(vocab.retained):
            row, col = grid.cell_rowcol(cell)
            clat, clon = grid.cell_center(cell)
            w.writerow([area_id, row, col, f"{clat:.7f}", f"{clon:.7f}",
                        int(vocab.stay_counts[area_id])])
