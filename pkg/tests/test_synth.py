import hashlib
from dataclasses import replace
from datetime import date

import numpy as np
import pytest

from areause.geodata import parse_trajectories
from areause.mesh import build_grid
from areause.staydetect import StayParams, extract_stays_all
from areause.synth import (ScenarioConfig, VisitPattern, ZoneSpec,
                           default_scenario, generate, ground_truth,
                           pandemic_scenario, read_ground_truth)


def small_scenario(seed=0, **overrides):
    """One zone, few agents, short period: fast to generate and analyze."""
    zones = (ZoneSpec("z", "shopping", (100, 100, 200, 200),
                      VisitPattern("shopping", (10.0, 15.0), (60, 120), 1.0, 1.0), 5),)
    base = dict(zones=zones, bbox_height_m=400.0, bbox_width_m=400.0,
                n_days=7, seed=seed)
    base.update(overrides)
    return ScenarioConfig(**base)


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestConfigValidation:
    def test_overlapping_zones_rejected(self):
        pat = VisitPattern("shopping", (10.0, 12.0), (30, 60), 1.0, 1.0)
        zones = (ZoneSpec("a", "shopping", (0, 0, 100, 100), pat, 1),
                 ZoneSpec("b", "office", (50, 50, 150, 150), pat, 1))
        with pytest.raises(ValueError, match="overlap"):
            ScenarioConfig(zones=zones, bbox_height_m=200, bbox_width_m=200)

    def test_touching_zones_allowed(self):
        pat = VisitPattern("shopping", (10.0, 12.0), (30, 60), 1.0, 1.0)
        zones = (ZoneSpec("a", "shopping", (0, 0, 100, 100), pat, 1),
                 ZoneSpec("b", "office", (100, 0, 200, 100), pat, 1))
        ScenarioConfig(zones=zones, bbox_height_m=200, bbox_width_m=200)

    def test_zero_agents_rejected(self):
        pat = VisitPattern("shopping", (10.0, 12.0), (30, 60), 1.0, 1.0)
        zones = (ZoneSpec("a", "shopping", (0, 0, 100, 100), pat, 0),)
        with pytest.raises(ValueError, match="at least one agent"):
            ScenarioConfig(zones=zones, bbox_height_m=200, bbox_width_m=200)

    def test_bad_function_rejected(self):
        pat = VisitPattern("shopping", (10.0, 12.0), (30, 60), 1.0, 1.0)
        with pytest.raises(ValueError, match="unknown zone function"):
            ZoneSpec("a", "mall", (0, 0, 100, 100), pat, 1)


class TestGroundTruth:
    def test_default_scenario_zone_cells(self):
        truth = ground_truth(default_scenario())
        # four rectangles: 3 of 200x200 m and one 300x200 m, 50 m cells
        assert len(truth) == 3 * 16 + 24
        functions = set(truth.values())
        assert functions == {"residential", "office", "shopping", "entertainment"}

    def test_cells_lie_inside_their_zone(self):
        config = small_scenario()
        for (r, c) in ground_truth(config):
            # zone spans meters 100-200 in both axes -> rows/cols 2..3
            assert 2 <= r <= 3 and 2 <= c <= 3

    def test_straddling_cell_rejected(self):
        pat = VisitPattern("shopping", (10.0, 12.0), (30, 60), 1.0, 1.0)
        zones = (ZoneSpec("a", "shopping", (0, 0, 75, 100), pat, 1),
                 ZoneSpec("b", "office", (75, 0, 150, 100), pat, 1))
        config = ScenarioConfig(zones=zones, bbox_height_m=200, bbox_width_m=200)
        with pytest.raises(ValueError, match="straddles"):
            ground_truth(config)

    def test_csv_roundtrip(self, tmp_path):
        config = small_scenario()
        path = tmp_path / "truth.csv"
        generate(config, tmp_path / "t.csv", truth_path=path)
        assert read_ground_truth(path) == ground_truth(config)


class TestGenerate:
    def test_same_seed_byte_identical(self, tmp_path):
        for name in ("a.csv", "b.csv"):
            generate(small_scenario(seed=3), tmp_path / name)
        assert sha(tmp_path / "a.csv") == sha(tmp_path / "b.csv")

    def test_different_seed_changes_output(self, tmp_path):
        generate(small_scenario(seed=3), tmp_path / "a.csv")
        generate(small_scenario(seed=4), tmp_path / "b.csv")
        assert sha(tmp_path / "a.csv") != sha(tmp_path / "b.csv")

    def test_output_parses_with_zero_rejects(self, tmp_path):
        path = tmp_path / "t.csv"
        n_points, _ = generate(small_scenario(), path)
        trajs, rejects = parse_trajectories(path)
        assert rejects == 0
        assert sum(len(t.ts) for t in trajs.values()) == n_points
        assert len(trajs) == 5

    def test_zero_noise_points_inside_zone_rect(self, tmp_path):
        config = small_scenario(gps_noise_m=0.0)
        path = tmp_path / "t.csv"
        generate(config, path)
        trajs, _ = parse_trajectories(path)
        grid = build_grid(config.bbox, config.cell_m)
        bbox = config.bbox
        for t in trajs.values():
            x = (t.lons - bbox.lon_min) * grid.meters_per_deg_lon
            y = (t.lats - bbox.lat_min) * grid.meters_per_deg_lat
            assert np.all((x >= 100 - 1e-6) & (x <= 200 + 1e-6))
            assert np.all((y >= 100 - 1e-6) & (y <= 200 + 1e-6))

    def test_zero_modifier_silences_pattern(self, tmp_path):
        config = small_scenario(behavior_modifiers={"shopping": 0.0})
        n_points, n_visits = generate(config, tmp_path / "t.csv")
        assert (n_points, n_visits) == (0, 0)

    def test_visit_count_tracks_rate(self, tmp_path):
        # rate 1.0/day, 5 agents, 7 days, no fractional part -> exactly 35
        # scheduled; overlaps can only remove some
        _, n_visits = generate(small_scenario(), tmp_path / "t.csv")
        assert n_visits <= 35
        assert n_visits >= 30

    def test_stay_detection_recovers_most_visits(self, tmp_path):
        # long, sparse visits so every visit clears the stay thresholds
        config = small_scenario(gps_noise_m=5.0,
                                zones=(ZoneSpec(
                                    "z", "shopping", (100, 100, 200, 200),
                                    VisitPattern("shopping", (9.0, 15.0), (90, 150), 1.0, 1.0),
                                    5),))
        path = tmp_path / "t.csv"
        _, n_visits = generate(config, path)
        trajs, _ = parse_trajectories(path)
        stays = extract_stays_all(trajs, StayParams(50.0, 30.0, 360.0))
        n_stays = sum(len(s) for s in stays.values())
        assert n_stays >= 0.95 * n_visits
        assert n_stays <= n_visits

    def test_pandemic_scenario_valid_and_distinct(self, tmp_path):
        base, pand = default_scenario(seed=1), pandemic_scenario(seed=1)
        truth_b, truth_p = ground_truth(base), ground_truth(pand)
        assert set(truth_b) == set(truth_p)  # same footprint, relabeled cells
        changed = sum(truth_b[k] != truth_p[k] for k in truth_b)
        assert changed == 16  # 2 of 3 entertainment strips converted
