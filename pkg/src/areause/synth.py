"""Synthetic-city trajectory generator with ground-truth zone functions.

Agents are dedicated visitors of one zone; each day they make a scheduled
visit (or several) drawn from the zone's visit pattern, emitting noisy GPS
points at a fixed sampling interval while the visit lasts.  Zone
rectangles live in local meters from the bbox southwest corner, so they
align exactly with the analysis grid cells.

Everything is driven by per-agent seeds derived from the scenario seed,
so output is byte-identical across runs.
"""

import csv
import math
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta, timezone

import numpy as np

from .holidays import JP_HOLIDAYS, is_weekend
from .mesh import BBox, build_grid

FUNCTIONS = ("residential", "office", "shopping", "entertainment")


@dataclass(frozen=True)
class VisitPattern:
    """Daily visit template: when people arrive, how long they stay.

    ``rate_weekday`` / ``rate_weekend`` are expected visits per agent per
    day; the integer part is guaranteed, the fraction is a coin flip.
    ``key`` selects which behavior modifier scales the rates.
    """
    key: str
    arrival_hours: tuple  # (earliest, latest) local hour, fractional ok
    duration_min: tuple   # (shortest, longest) stay in minutes
    rate_weekday: float
    rate_weekend: float


@dataclass(frozen=True)
class ZoneSpec:
    name: str
    function: str  # ground-truth label, one of FUNCTIONS
    rect_m: tuple  # (x0, y0, x1, y1) meters east/north of the bbox SW corner
    pattern: VisitPattern
    visitors: int  # dedicated agents

    def __post_init__(self):
        x0, y0, x1, y1 = self.rect_m
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate zone rectangle for {self.name}")
        if self.function not in FUNCTIONS:
            raise ValueError(f"unknown zone function: {self.function}")
        if self.visitors < 0:
            raise ValueError("visitors must be >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    zones: tuple
    bbox_height_m: float
    bbox_width_m: float
    center_lat: float = 38.26
    center_lon: float = 140.87
    start: date = date(2020, 3, 2)
    n_days: int = 28
    gps_noise_m: float = 10.0
    sample_interval_s: int = 600
    seed: int = 0
    tz_offset_min: int = 540
    cell_m: float = 50.0
    behavior_modifiers: dict = field(default_factory=dict)
    holidays: frozenset = JP_HOLIDAYS

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("scenario needs at least one agent")
        if self.gps_noise_m < 0 or self.sample_interval_s <= 0 or self.n_days < 1:
            raise ValueError("bad noise, sampling interval, or day count")
        _check_zone_overlap(self.zones)

    @property
    def n_agents(self):
        return sum(z.visitors for z in self.zones)

    @property
    def bbox(self):
        return BBox.from_center(self.center_lat, self.center_lon,
                                self.bbox_height_m, self.bbox_width_m)


def _check_zone_overlap(zones):
    for i, a in enumerate(zones):
        for b in zones[i + 1:]:
            ax0, ay0, ax1, ay1 = a.rect_m
            bx0, by0, bx1, by1 = b.rect_m
            if min(ax1, bx1) - max(ax0, bx0) > 1e-6 and min(ay1, by1) - max(ay0, by0) > 1e-6:
                raise ValueError(f"zones {a.name} and {b.name} overlap; "
                                 "ground truth must be unambiguous")


def default_scenario(seed=0, visitors_per_zone=125):
    """Four well-separated zones mirroring the classic urban functions."""
    v = visitors_per_zone
    zones = (
        ZoneSpec("res", "residential", (100, 100, 300, 300),
                 VisitPattern("residential", (20.0, 22.0), (720, 960), 0.9, 0.9), v),
        ZoneSpec("office", "office", (400, 100, 600, 300),
                 VisitPattern("office", (7.5, 9.0), (480, 660), 1.0, 0.0), v),
        ZoneSpec("shop", "shopping", (700, 100, 900, 300),
                 VisitPattern("shopping", (10.0, 19.0), (20, 110), 0.8, 1.2), v),
        ZoneSpec("ent", "entertainment", (100, 500, 400, 700),
                 VisitPattern("entertainment", (20.0, 23.0), (120, 300), 1.0, 1.2), v),
    )
    return ScenarioConfig(zones=zones, bbox_height_m=900.0, bbox_width_m=1100.0, seed=seed)


def pandemic_scenario(seed=0):
    """Behavior-shift counterpart of the default scenario.

    Office visits are halved and entertainment visits cut hard (the
    modifiers), residential stays get longer, and most of the former
    entertainment strip is taken over by the residents and eateries that
    remain, shifting its usage toward residential and daytime patterns.
    """
    zones = (
        ZoneSpec("res", "residential", (100, 100, 300, 300),
                 VisitPattern("residential", (20.0, 22.0), (780, 1140), 0.9, 0.9), 125),
        ZoneSpec("office", "office", (400, 100, 600, 300),
                 VisitPattern("office", (7.5, 9.0), (480, 660), 1.0, 0.0), 125),
        ZoneSpec("shop", "shopping", (700, 100, 900, 300),
                 VisitPattern("shopping", (10.0, 19.0), (20, 110), 0.8, 1.2), 125),
        ZoneSpec("ent_west", "residential", (100, 500, 200, 700),
                 VisitPattern("residential", (20.0, 22.0), (780, 1140), 0.9, 0.9), 40),
        ZoneSpec("ent_mid", "shopping", (200, 500, 300, 700),
                 VisitPattern("shopping", (10.0, 19.0), (20, 110), 0.8, 1.2), 40),
        ZoneSpec("ent_east", "entertainment", (300, 500, 400, 700),
                 VisitPattern("entertainment", (20.0, 23.0), (120, 300), 0.35, 0.42), 125),
    )
    return ScenarioConfig(zones=zones, bbox_height_m=900.0, bbox_width_m=1100.0,
                          seed=seed, start=date(2020, 4, 6),
                          behavior_modifiers={"office": 0.5, "entertainment": 0.4})


def ground_truth(config):
    """{(row, col): function} for every grid cell intersecting a zone."""
    grid = build_grid(config.bbox, config.cell_m)
    truth = {}
    for zone in config.zones:
        x0, y0, x1, y1 = zone.rect_m
        r0 = int(math.floor(y0 / config.cell_m))
        r1 = int(math.ceil(y1 / config.cell_m))
        c0 = int(math.floor(x0 / config.cell_m))
        c1 = int(math.ceil(x1 / config.cell_m))
        for r in range(max(r0, 0), min(r1, grid.n_rows)):
            for c in range(max(c0, 0), min(c1, grid.n_cols)):
                cx0, cy0 = c * config.cell_m, r * config.cell_m
                if min(x1, cx0 + config.cell_m) - max(x0, cx0) > 1e-6 and \
                   min(y1, cy0 + config.cell_m) - max(y0, cy0) > 1e-6:
                    if (r, c) in truth and truth[(r, c)] != zone.function:
                        raise ValueError(f"cell ({r},{c}) straddles two zone functions")
                    truth[(r, c)] = zone.function
    return truth


def _day_epoch(day, tz_offset):
    tz = timezone(timedelta(minutes=tz_offset))
    return int(datetime(day.year, day.month, day.day, tzinfo=tz).timestamp())


def _visits_today(rng, rate):
    n = int(rate)
    if rng.random() < rate - n:
        n += 1
    return n


def _agent_visits(rng, zone, config):
    """Non-overlapping (start_epoch, end_epoch, x_m, y_m) visits of one agent."""
    pat = zone.pattern
    modifier = config.behavior_modifiers.get(pat.key, 1.0)
    x0, y0, x1, y1 = zone.rect_m
    visits = []
    for d in range(config.n_days):
        day = config.start + timedelta(days=d)
        base_rate = pat.rate_weekend if is_weekend(day, config.holidays) else pat.rate_weekday
        day_start = _day_epoch(day, config.tz_offset_min)
        for _ in range(_visits_today(rng, base_rate * modifier)):
            arrival_h = rng.uniform(*pat.arrival_hours)
            duration = rng.uniform(*pat.duration_min)
            start = day_start + int(arrival_h * 3600)
            visits.append((start, start + int(duration * 60),
                           rng.uniform(x0, x1), rng.uniform(y0, y1)))
    visits.sort()
    kept = []
    last_end = -1
    for v in visits:
        if v[0] > last_end:
            kept.append(v)
            last_end = v[1]
    return kept


def _emit_points(rng, visits, config, grid):
    """Noisy GPS samples for a visit list; returns (lat, lon, t) arrays."""
    lats, lons, ts = [], [], []
    bbox = config.bbox
    for start, end, x, y in visits:
        t = np.arange(start, end + 1, config.sample_interval_s, dtype=np.int64)
        noise = rng.normal(0.0, config.gps_noise_m, size=(len(t), 2)) \
            if config.gps_noise_m > 0 else np.zeros((len(t), 2))
        lats.append(bbox.lat_min + (y + noise[:, 0]) / grid.meters_per_deg_lat)
        lons.append(bbox.lon_min + (x + noise[:, 1]) / grid.meters_per_deg_lon)
        ts.append(t)
    if not ts:
        return np.array([]), np.array([]), np.array([], dtype=np.int64)
    return np.concatenate(lats), np.concatenate(lons), np.concatenate(ts)


def generate(config, traj_path, truth_path=None):
    """Write the trajectory CSV (and optionally the ground-truth CSV).

    Returns (n_points, n_visits).  Deterministic for a fixed seed: agent
    random streams are derived from (seed, zone index, agent index).
    """
    grid = build_grid(config.bbox, config.cell_m)
    n_points = 0
    n_visits = 0
    with open(traj_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["user_id", "lat", "lon", "timestamp"])
        for zi, zone in enumerate(config.zones):
            for ai in range(zone.visitors):
                rng = np.random.default_rng([config.seed, zi, ai])
                visits = _agent_visits(rng, zone, config)
                lats, lons, ts = _emit_points(rng, visits, config, grid)
                user = f"{zone.name}_{ai:04d}"
                for la, lo, t in zip(lats, lons, ts):
                    w.writerow([user, f"{la:.7f}", f"{lo:.7f}", int(t)])
                n_points += len(ts)
                n_visits += len(visits)
    if truth_path is not None:
        write_ground_truth(config, truth_path)
    return n_points, n_visits


def write_ground_truth(config, path):
    """Ground-truth CSV: row,col,function."""
    truth = ground_truth(config)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["row", "col", "function"])
        for (r, c) in sorted(truth):
            w.writerow([r, c, truth[(r, c)]])


def read_ground_truth(path):
    truth = {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        next(reader)
        for r, c, fn in reader:
            truth[(int(r), int(c))] = fn
    return truth
