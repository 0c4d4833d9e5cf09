import numpy as np
import pytest
from hypothesis import given, strategies as st

from areause.geodata import Stay
from areause.mesh import (BBox, assign_area, build_grid, build_vocabulary,
                          write_vocabulary)

CENTER = (38.26, 140.87)


def bbox_m(height_m, width_m):
    return BBox.from_center(*CENTER, height_m, width_m)


def stay_at(lat, lon):
    return Stay(lat, lon, 0.0, 60.0)


class TestBuildGrid:
    def test_district_dimensions(self):
        grid = build_grid(bbox_m(900, 1100), 50)
        assert (grid.n_rows, grid.n_cols) == (18, 22)
        assert grid.n_cells == 396

    def test_single_cell(self):
        grid = build_grid(bbox_m(50, 50), 50)
        assert (grid.n_rows, grid.n_cols) == (1, 1)

    def test_ceiling_rule(self):
        grid = build_grid(bbox_m(101, 49), 50)
        assert (grid.n_rows, grid.n_cols) == (3, 1)

    def test_degenerate_bbox(self):
        with pytest.raises(ValueError):
            BBox(35.0, 35.0, 135.0, 136.0)

    def test_bad_cell_size(self):
        with pytest.raises(ValueError):
            build_grid(bbox_m(100, 100), 0)


class TestAssignArea:
    def setup_method(self):
        self.grid = build_grid(bbox_m(200, 200), 50)  # 4 x 4

    def _latlon(self, y_m, x_m):
        bb = bbox_m(200, 200)
        return (bb.lat_min + y_m / self.grid.meters_per_deg_lat,
                bb.lon_min + x_m / self.grid.meters_per_deg_lon)

    def test_origin_in_cell_zero(self):
        bb = bbox_m(200, 200)
        assert assign_area(self.grid, stay_at(bb.lat_min, bb.lon_min)) == 0

    def test_interior_boundary_goes_to_higher_cell(self):
        lat, lon = self._latlon(50.0, 0.0)  # exactly on the row-1 boundary
        cell = assign_area(self.grid, stay_at(lat, lon))
        assert self.grid.cell_rowcol(cell)[0] == 1

    def test_outside_bbox_none(self):
        lat, lon = self._latlon(-1.0, 100.0)
        assert assign_area(self.grid, stay_at(lat, lon)) is None

    def test_roundtrip_extent_contains_point(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            y, x = rng.uniform(0, 200, 2)
            lat, lon = self._latlon(y, x)
            cell = assign_area(self.grid, stay_at(lat, lon))
            lat0, lat1, lon0, lon1 = self.grid.cell_bounds(cell)
            assert lat0 - 1e-12 <= lat < lat1 + 1e-12
            assert lon0 - 1e-12 <= lon < lon1 + 1e-12


class TestVocabulary:
    def setup_method(self):
        self.bb = bbox_m(200, 200)
        self.grid = build_grid(self.bb, 50)

    def _stay_in_cell(self, row, col):
        lat = self.bb.lat_min + (row * 50 + 25) / self.grid.meters_per_deg_lat
        lon = self.bb.lon_min + (col * 50 + 25) / self.grid.meters_per_deg_lon
        return stay_at(lat, lon)

    def test_threshold_inclusive(self):
        stays = ([self._stay_in_cell(0, 0)] * 150
                 + [self._stay_in_cell(0, 1)] * 99
                 + [self._stay_in_cell(0, 2)] * 100)
        vocab = build_vocabulary(self.grid, stays, min_stays=100)
        assert vocab.n_areas == 2
        assert all(n >= 100 for n in vocab.stay_counts)

    def test_single_cell_min_one(self):
        stays = [self._stay_in_cell(1, 1) for _ in range(5)]
        vocab = build_vocabulary(self.grid, stays, min_stays=1)
        assert vocab.n_areas == 1
        assert all(s.area_id == 0 for s in stays)

    def test_no_areas_meet_threshold(self):
        stays = [self._stay_in_cell(0, 0)]
        with pytest.raises(ValueError, match="no areas meet threshold"):
            build_vocabulary(self.grid, stays, min_stays=2)

    def test_dropped_stays_unannotated_and_counted(self):
        stays = [self._stay_in_cell(0, 0)] * 3 + [self._stay_in_cell(3, 3)]
        vocab = build_vocabulary(self.grid, stays, min_stays=2)
        assert stays[-1].area_id is None
        assert vocab.n_in_bbox == 4
        assert int(vocab.stay_counts.sum()) == 3

    def test_ids_are_dense_bijection(self):
        rng = np.random.default_rng(5)
        stays = [self._stay_in_cell(rng.integers(4), rng.integers(4)) for _ in range(300)]
        vocab = build_vocabulary(self.grid, stays, min_stays=1)
        ids = sorted(vocab.area_index.values())
        assert ids == list(range(vocab.n_areas))
        assert len(set(vocab.area_index)) == vocab.n_areas

    def test_counts_partition_in_bbox_stays(self):
        rng = np.random.default_rng(6)
        stays = [self._stay_in_cell(rng.integers(4), rng.integers(4)) for _ in range(200)]
        vocab = build_vocabulary(self.grid, stays, min_stays=20)
        annotated = sum(s.area_id is not None for s in stays)
        assert int(vocab.stay_counts.sum()) == annotated
        assert vocab.n_in_bbox == 200

    def test_vocabulary_csv(self, tmp_path):
        stays = [self._stay_in_cell(0, 0)] * 3
        vocab = build_vocabulary(self.grid, stays, min_stays=1)
        path = tmp_path / "vocab.csv"
        write_vocabulary(self.grid, vocab, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "area_id,row,col,center_lat,center_lon,stay_count"
        assert len(lines) == 2
        assert lines[1].startswith("0,0,0,") and lines[1].endswith(",3")
