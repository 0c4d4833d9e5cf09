"""Domain types for GPS trajectories and stays, plus CSV ingestion.

Input format: UTF-8 CSV with header ``user_id,lat,lon,timestamp`` where
timestamp is integer epoch seconds or ISO-8601.  Files ending in ``.gz``
are transparently decompressed.
"""

import csv
import gzip
import io
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np


class ParseError(Exception):
    """Fatal problem with an input file (bad header, unreadable stream)."""


@dataclass(frozen=True)
class GpsPoint:
    """A single timestamped WGS84 coordinate."""

    lat: float
    lon: float
    t: float  # epoch seconds UTC

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon}")
        if not math.isfinite(self.t) or self.t < 0:
            raise ValueError(f"bad timestamp: {self.t}")


class Trajectory:
    """One user's GPS sequence with strictly increasing timestamps.

    Coordinates are held as parallel numpy arrays for fast downstream
    processing; ``points()`` materializes :class:`GpsPoint` objects.
    """

    def __init__(self, user_id, lats, lons, ts):
        lats = np.asarray(lats, dtype=float)
        lons = np.asarray(lons, dtype=float)
        ts = np.asarray(ts, dtype=float)
        if not (len(lats) == len(lons) == len(ts)):
            raise ValueError("coordinate arrays must have equal length")
        if len(ts) > 1 and not np.all(np.diff(ts) > 0):
            raise ValueError(f"timestamps not strictly increasing for user {user_id!r}")
        self.user_id = user_id
        self.lats = lats
        self.lons = lons
        self.ts = ts

    def __len__(self):
        return len(self.ts)

    @classmethod
    def from_points(cls, user_id, points):
        return cls(user_id,
                   [p.lat for p in points],
                   [p.lon for p in points],
                   [p.t for p in points])

    def points(self):
        return [GpsPoint(la, lo, t) for la, lo, t in zip(self.lats, self.lons, self.ts)]


@dataclass
class Stay:
    """A maximal episode of remaining in one place.

    ``area_id`` is the dense area index assigned during meshing; it stays
    None until then (and for stays falling in dropped cells).
    """

    lat: float
    lon: float
    arrival: float  # epoch seconds UTC
    duration_min: float
    area_id: int | None = None

    def __post_init__(self):
        if self.duration_min <= 0:
            raise ValueError(f"duration must be positive: {self.duration_min}")

    @property
    def departure(self):
        return self.arrival + self.duration_min * 60.0


def validate_stay_sequence(stays):
    """True iff adjacent stays never overlap: next arrival >= this departure."""
    for a, b in zip(stays, stays[1:]):
        if b.arrival < a.arrival + a.duration_min * 60.0 - 1e-9:
            return False
    return True


def _parse_timestamp(raw, tz_offset):
    raw = raw.strip()
    try:
        return float(int(raw))
    except ValueError:
        pass
    s = raw.replace("Z", "+00:00")
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone(timedelta(minutes=tz_offset)))
    return dt.timestamp()


def parse_trajectories(source, tz_offset=540):
    """Parse a trajectory CSV into per-user trajectories.

    ``source`` is a path, a binary stream, or a text stream.  Returns
    ``(trajectories, rejects)`` where rejects counts rows dropped for
    unparseable fields or out-of-range coordinates.  Duplicate
    ``(user, t)`` rows keep the first occurrence.  ``tz_offset`` (minutes)
    only matters for ISO timestamps lacking an explicit offset.
    """
    close = False
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        path = str(source)
        stream = gzip.open(path, "rt", encoding="utf-8") if path.endswith(".gz") \
            else open(path, "rt", encoding="utf-8")
        close = True
    elif isinstance(source, io.TextIOBase):
        stream = source
    else:
        stream = io.TextIOWrapper(source, encoding="utf-8")

    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["user_id", "lat", "lon", "timestamp"]:
            raise ParseError(f"bad header: expected user_id,lat,lon,timestamp, got {header}")

        rows = {}  # user -> {t: (lat, lon)}
        rejects = 0
        for row in reader:
            if not row:
                continue
            try:
                if len(row) != 4:
                    raise ValueError("wrong field count")
                user, lat, lon, t = row[0], float(row[1]), float(row[2]), _parse_timestamp(row[3], tz_offset)
                if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                    raise ValueError("coordinate out of range")
                if not math.isfinite(t) or t < 0:
                    raise ValueError("bad timestamp")
            except (ValueError, OverflowError):
                rejects += 1
                continue
            rows.setdefault(user, {}).setdefault(t, (lat, lon))
    finally:
        if close:
            stream.close()

    trajs = {}
    for user, by_t in rows.items():
        ts = sorted(by_t)
        lats = [by_t[t][0] for t in ts]
        lons = [by_t[t][1] for t in ts]
        trajs[user] = Trajectory(user, lats, lons, ts)
    return trajs, rejects


def write_trajectories(trajs, path):
    """Serialize trajectories back to the input CSV format (epoch seconds)."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["user_id", "lat", "lon", "timestamp"])
        for user in sorted(trajs):
            tr = trajs[user]
            for la, lo, t in zip(tr.lats, tr.lons, tr.ts):
                w.writerow([user, f"{la:.7f}", f"{lo:.7f}", int(round(t))])


def write_stays(stays_by_user, path):
    """Write the intermediate stays CSV: user_id,lat,lon,arrival_epoch,duration_min."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["user_id", "lat", "lon", "arrival_epoch", "duration_min"])
        for user in sorted(stays_by_user):
            for s in stays_by_user[user]:
                w.writerow([user, f"{s.lat:.7f}", f"{s.lon:.7f}", f"{s.arrival:.1f}", f"{s.duration_min:.3f}"])


def read_stays(path):
    """Read a stays CSV back into {user_id: [Stay, ...]} sorted by arrival."""
    stays = {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["user_id", "lat", "lon", "arrival_epoch", "duration_min"]:
            raise ParseError(f"bad stays header: {header}")
        for row in reader:
            if not row:
                continue
            user, lat, lon, arr, dur = row
            stays.setdefault(user, []).append(
                Stay(float(lat), float(lon), float(arr), float(dur)))
    for user in stays:
        stays[user].sort(key=lambda s: s.arrival)
    return stays
