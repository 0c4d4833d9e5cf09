import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from areause.geodata import GpsPoint, Trajectory
from areause.staydetect import (EARTH_RADIUS_M, StayParams, extract_stays,
                                haversine_m)

PARAMS = StayParams(dist_threshold_m=50.0, time_threshold_min=30.0)


def traj_from(lats, lons, ts):
    return Trajectory("u", lats, lons, ts)


def brute_force_stays(traj, params):
    """Window-enumeration reference: for every start index, grow the
    maximal run where each point stays within the threshold of the running
    centroid (and sampling gaps stay small), then pick non-overlapping
    valid windows left to right."""
    lats, lons, ts = traj.lats, traj.lons, traj.ts
    n = len(ts)
    ends = []
    for i in range(n):
        end = i
        for j in range(i + 1, n):
            if ts[j] - ts[j - 1] > params.gap_min * 60.0:
                break
            c = GpsPoint(float(np.mean(lats[i:j])), float(np.mean(lons[i:j])), 0.0)
            if haversine_m(GpsPoint(lats[j], lons[j], 0.0), c) > params.dist_threshold_m:
                break
            end = j
        ends.append(end)
    stays = []
    i = 0
    while i < n:
        e = ends[i]
        if (ts[e] - ts[i]) / 60.0 >= params.time_threshold_min:
            stays.append((float(np.mean(lats[i:e + 1])), float(np.mean(lons[i:e + 1])),
                          float(ts[i]), float((ts[e] - ts[i]) / 60.0)))
            i = e + 1
        else:
            i += 1
    return stays


class TestHaversine:
    def test_identical_points_zero(self):
        p = GpsPoint(35.0, 135.0, 0.0)
        assert haversine_m(p, p) == 0.0

    def test_symmetry(self):
        a = GpsPoint(35.0, 135.0, 0.0)
        b = GpsPoint(35.0, 135.01, 0.0)
        assert haversine_m(a, b) == pytest.approx(haversine_m(b, a))

    def test_meridian_arc_against_closed_form(self):
        # For a pure latitude difference the great-circle arc is exactly
        # R * delta_phi; evaluated independently of the haversine code.
        a = GpsPoint(35.0, 135.0, 0.0)
        b = GpsPoint(35.01, 135.0, 0.0)
        expected = EARTH_RADIUS_M * math.radians(0.01)  # ~1111.95 m
        assert expected == pytest.approx(1111.95, abs=0.01)
        assert haversine_m(a, b) == pytest.approx(expected, rel=1e-9)

    @given(st.floats(-80, 80), st.floats(-170, 170), st.floats(-80, 80), st.floats(-170, 170))
    def test_nonnegative_and_symmetric(self, lat1, lon1, lat2, lon2):
        a, b = GpsPoint(lat1, lon1, 0.0), GpsPoint(lat2, lon2, 0.0)
        d = haversine_m(a, b)
        assert d >= 0
        assert d == pytest.approx(haversine_m(b, a), abs=1e-9)


class TestExtractStays:
    def test_stationary_run_is_one_stay(self):
        ts = [0, 600, 1200, 1800, 2400]  # 40 minutes
        tr = traj_from([35.0] * 5, [135.0] * 5, ts)
        stays = extract_stays(tr, PARAMS)
        assert len(stays) == 1
        assert stays[0].duration_min == pytest.approx(40.0)
        assert stays[0].lat == pytest.approx(35.0)
        assert stays[0].arrival == 0.0

    def test_constant_motion_no_stays(self):
        # 200 m advance every minute
        step_deg = 200.0 / (math.pi / 180.0 * EARTH_RADIUS_M)
        lats = [35.0 + i * step_deg for i in range(60)]
        tr = traj_from(lats, [135.0] * 60, [i * 60 for i in range(60)])
        assert extract_stays(tr, PARAMS) == []

    def test_two_episodes_split_by_jump(self):
        # two 45-minute stationary episodes 1 km apart
        lats, lons, ts = [], [], []
        for i in range(10):
            lats.append(35.0); lons.append(135.0); ts.append(i * 300)
        jump = 1000.0 / (math.pi / 180.0 * EARTH_RADIUS_M)
        for i in range(10):
            lats.append(35.0 + jump); lons.append(135.0); ts.append(3000 + i * 300)
        tr = traj_from(lats, lons, ts)
        stays = extract_stays(tr, PARAMS)
        assert len(stays) == 2
        oracle = brute_force_stays(tr, PARAMS)
        assert len(oracle) == 2
        for s, (lat, lon, arr, dur) in zip(stays, oracle):
            assert s.lat == pytest.approx(lat)
            assert s.arrival == arr
            assert s.duration_min == pytest.approx(dur)

    def test_gap_closes_candidate(self):
        # stationary but with a 7-hour hole in the middle; each half is
        # only 20 minutes, so nothing reaches the 30-minute threshold
        ts = [0, 600, 1200, 1200 + 7 * 3600, 1800 + 7 * 3600, 2400 + 7 * 3600]
        tr = traj_from([35.0] * 6, [135.0] * 6, ts)
        assert extract_stays(tr, PARAMS) == []

    def test_durations_meet_threshold_and_no_overlap(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            lats = 35.0 + np.cumsum(rng.normal(0, 3e-4, n))
            lons = 135.0 + np.cumsum(rng.normal(0, 3e-4, n))
            ts = np.cumsum(rng.integers(60, 900, n)).astype(float)
            stays = extract_stays(traj_from(lats, lons, ts), PARAMS)
            for s in stays:
                assert s.duration_min >= PARAMS.time_threshold_min
            for a, b in zip(stays, stays[1:]):
                assert b.arrival >= a.arrival + a.duration_min * 60.0 - 1e-6

    def test_matches_brute_force_on_random_small_trajectories(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 50))
            lats = 35.0 + np.cumsum(rng.normal(0, 4e-4, n))
            lons = 135.0 + np.cumsum(rng.normal(0, 4e-4, n))
            ts = np.cumsum(rng.integers(60, 1200, n)).astype(float)
            tr = traj_from(lats, lons, ts)
            got = extract_stays(tr, PARAMS)
            want = brute_force_stays(tr, PARAMS)
            assert len(got) == len(want)
            for s, (lat, lon, arr, dur) in zip(got, want):
                assert s.lat == pytest.approx(lat)
                assert s.lon == pytest.approx(lon)
                assert s.arrival == arr
                assert s.duration_min == pytest.approx(dur)

    @given(st.integers(min_value=0, max_value=10**7))
    @settings(max_examples=30)
    def test_time_shift_invariance(self, shift):
        ts = np.array([0, 600, 1200, 1800, 2400], dtype=float)
        tr0 = traj_from([35.0] * 5, [135.0] * 5, ts)
        tr1 = traj_from([35.0] * 5, [135.0] * 5, ts + shift)
        s0 = extract_stays(tr0, PARAMS)
        s1 = extract_stays(tr1, PARAMS)
        assert len(s0) == len(s1) == 1
        assert s1[0].duration_min == pytest.approx(s0[0].duration_min)
        assert s1[0].arrival - s0[0].arrival == pytest.approx(shift)


class TestStayParams:
    @pytest.mark.parametrize("kwargs", [
        {"dist_threshold_m": 0.0},
        {"time_threshold_min": -1.0},
        {"gap_min": 0.0},
    ])
    def test_positive_thresholds(self, kwargs):
        with pytest.raises(ValueError):
            StayParams(**kwargs)
