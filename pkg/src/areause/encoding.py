"""Codec between a stay's temporal attributes and its category id.

The category vocabulary combines day type (weekday / weekend incl.
holidays), two-hour arrival bin, and duration bin.  Stays of 720 minutes
or more ignore the arrival time and keep only the day type, giving
2*12*6 + 2 = 146 categories.

Canonical id layout: day-major, then arrival bin, then duration bin, with
the two long-stay ids (weekday, weekend) last — ids 144 and 145.
"""

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .holidays import JP_HOLIDAYS, is_weekend

WEEKDAY = 0
WEEKEND = 1

N_ARRIVAL_BINS = 12  # two-hour windows
N_DURATION_BINS = 7
LONG_STAY_BIN = 6  # duration >= 720 min; arrival time is dropped

# Half-open duration boundaries in minutes; the last bin is [720, inf).
DURATION_EDGES_MIN = (0.0, 30.0, 60.0, 120.0, 240.0, 360.0, 720.0)

N_CATEGORIES = 2 * N_ARRIVAL_BINS * (N_DURATION_BINS - 1) + 2  # 146
_PER_DAY = N_ARRIVAL_BINS * (N_DURATION_BINS - 1)  # 72


@dataclass(frozen=True)
class StayCategory:
    id: int
    day_type: int
    arrival_bin: int | None  # None iff duration_bin == LONG_STAY_BIN
    duration_bin: int


def duration_bin(duration_min):
    """Table index of a stay duration; inclusive lower bounds, last bin open."""
    if duration_min <= 0:
        raise ValueError(f"duration must be positive: {duration_min}")
    b = 0
    for i, edge in enumerate(DURATION_EDGES_MIN):
        if duration_min >= edge:
            b = i
    return b


def local_datetime(epoch_s, tz_offset):
    """Wall-clock datetime for an epoch timestamp under a fixed minute offset."""
    return datetime.fromtimestamp(epoch_s, tz=timezone(timedelta(minutes=tz_offset)))


def classify_stay(stay, tz_offset=540, holidays=JP_HOLIDAYS):
    """(day_type, arrival_bin, duration_bin) of a stay under a local calendar."""
    dt = local_datetime(stay.arrival, tz_offset)
    day = WEEKEND if is_weekend(dt.date(), holidays) else WEEKDAY
    return day, dt.hour // 2, duration_bin(stay.duration_min)


def encode(day_type, arrival_bin, duration_bin):
    """Category id of a valid (day, arrival, duration) triple."""
    if day_type not in (WEEKDAY, WEEKEND):
        raise ValueError(f"bad day type: {day_type}")
    if duration_bin == LONG_STAY_BIN:
        if arrival_bin is not None:
            raise ValueError("long stays (>=720 min) must not carry an arrival bin")
        return 2 * _PER_DAY + day_type
    if not (0 <= duration_bin < LONG_STAY_BIN):
        raise ValueError(f"bad duration bin: {duration_bin}")
    if arrival_bin is None or not (0 <= arrival_bin < N_ARRIVAL_BINS):
        raise ValueError(f"bad arrival bin: {arrival_bin}")
    return day_type * _PER_DAY + arrival_bin * (N_DURATION_BINS - 1) + duration_bin


def decode(category_id):
    """Inverse of encode."""
    if not (0 <= category_id < N_CATEGORIES):
        raise ValueError(f"category id out of range: {category_id}")
    if category_id >= 2 * _PER_DAY:
        return category_id - 2 * _PER_DAY, None, LONG_STAY_BIN
    day_type, rest = divmod(category_id, _PER_DAY)
    arrival_bin, dur = divmod(rest, N_DURATION_BINS - 1)
    return day_type, arrival_bin, dur


def category_for_stay(stay, tz_offset=540, holidays=JP_HOLIDAYS):
    """Category id of a stay, applying the long-stay exception."""
    day, arr, dur = classify_stay(stay, tz_offset, holidays)
    return encode(day, None if dur == LONG_STAY_BIN else arr, dur)


def all_categories():
    """All 146 categories in id order."""
    out = []
    for cid in range(N_CATEGORIES):
        day, arr, dur = decode(cid)
        out.append(StayCategory(cid, day, arr, dur))
    return out


def write_category_table(path):
    """Audit dump: id,day_type,arrival_bin,duration_bin."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["id", "day_type", "arrival_bin", "duration_bin"])
        for c in all_categories():
            w.writerow([c.id, c.day_type, "" if c.arrival_bin is None else c.arrival_bin,
                        c.duration_bin])
