"""Stay extraction: collapse a GPS trajectory into stay episodes.

Greedy forward scan: grow a candidate cluster while each new point stays
within ``dist_threshold_m`` of the running centroid; emit a stay once the
cluster's time span reaches ``time_threshold_min``.  A sampling gap longer
than ``gap_min`` closes the current candidate so sparse data cannot fake
day-long stays.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geodata import Stay

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class StayParams:
    dist_threshold_m: float = 50.0
    time_threshold_min: float = 30.0
    gap_min: float = 360.0

    def __post_init__(self):
        if self.dist_threshold_m <= 0 or self.time_threshold_min <= 0 or self.gap_min <= 0:
            raise ValueError("stay-detection thresholds must be strictly positive")


def haversine_m(a, b):
    """Great-circle distance in meters between two points (sphere of 6371 km)."""
    return _haversine(a.lat, a.lon, b.lat, b.lon)


def _haversine(lat1, lon1, lat2, lon2):
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = p2 - p1
    dlmb = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlmb / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def _grow_cluster(lats, lons, ts, start, params):
    """Return the end index (inclusive) of the greedy cluster rooted at start."""
    n = len(ts)
    sum_lat, sum_lon = lats[start], lons[start]
    count = 1
    end = start
    gap_s = params.gap_min * 60.0
    for j in range(start + 1, n):
        if ts[j] - ts[j - 1] > gap_s:
            break
        c_lat, c_lon = sum_lat / count, sum_lon / count
        if _haversine(lats[j], lons[j], c_lat, c_lon) > params.dist_threshold_m:
            break
        sum_lat += lats[j]
        sum_lon += lons[j]
        count += 1
        end = j
    return end


def extract_stays(traj, params=StayParams()):
    """Extract the ordered stay sequence of one trajectory.

    Each stay's coordinates are the centroid of its member points, its
    arrival the first member's timestamp, and its duration the time span
    of the members (always >= time_threshold_min).
    """
    lats, lons, ts = traj.lats, traj.lons, traj.ts
    n = len(ts)
    stays = []
    i = 0
    while i < n:
        end = _grow_cluster(lats, lons, ts, i, params)
        span_min = (ts[end] - ts[i]) / 60.0
        if span_min >= params.time_threshold_min:
            stays.append(Stay(
                lat=float(np.mean(lats[i:end + 1])),
                lon=float(np.mean(lons[i:end + 1])),
                arrival=float(ts[i]),
                duration_min=float(span_min),
            ))
            i = end + 1
        else:
            i += 1
    return stays


def extract_stays_all(trajs, params=StayParams()):
    """Run extract_stays over a {user: Trajectory} map."""
    return {user: extract_stays(tr, params) for user, tr in trajs.items()}
