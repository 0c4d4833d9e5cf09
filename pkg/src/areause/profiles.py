"""Cluster profiles: normalized person-count tensors, stacked-bar SVG
charts, and cluster-colored GeoJSON maps.

A profile is a [day-type][48 half-hour bins][7 duration layers] tensor of
counts per area per day.  A stay contributes to every half-hour bin it
touches (endpoint inclusive: a stay ending exactly on a bin boundary still
counts in that bin), under the day type of the calendar day each bin falls
on.  Entries are divided by the cluster's area count and by the number of
days of the matching day type in the analysis period.
"""

import json
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .encoding import N_DURATION_BINS, duration_bin, local_datetime
from .holidays import JP_HOLIDAYS, is_weekend

N_TIME_BINS = 48
BIN_MIN = 30
MINUTES_PER_DAY = 1440

# Duration-layer palette, short to long stays.
LAYER_COLORS = ("#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c", "#54278f")
LAYER_LABELS = ("<30", "30-59", "60-119", "120-239", "240-359", "360-719", ">=720")


@dataclass
class ClusterProfile:
    cluster_id: int
    matrix: np.ndarray  # 2 x 48 x 7
    n_areas_in_cluster: int
    n_weekdays: int
    n_weekend_days: int


def occupied_bins(arrival_local_min, duration_min):
    """(day-offset, bin) pairs a stay touches, first to last bin inclusive.

    ``arrival_local_min`` is minutes past local midnight of the arrival
    day; bins past midnight carry an incremented day offset.
    """
    if duration_min <= 0:
        raise ValueError("duration must be positive")
    first = int(arrival_local_min // BIN_MIN)
    last = int((arrival_local_min + duration_min) // BIN_MIN)
    return [(b // N_TIME_BINS, b % N_TIME_BINS) for b in range(first, last + 1)]


def count_days(start, end, holidays=JP_HOLIDAYS):
    """(weekdays, weekend days) in the closed date range [start, end]."""
    if end < start:
        raise ValueError("period end before start")
    n_we = sum(is_weekend(start + timedelta(days=i), holidays)
               for i in range((end - start).days + 1))
    n_days = (end - start).days + 1
    return n_days - n_we, n_we


def build_profiles(stays, clustering, period, tz_offset=540, holidays=JP_HOLIDAYS):
    """One ClusterProfile per cluster from area-annotated stays.

    ``period`` is a (start_date, end_date) pair of local calendar dates;
    bins falling outside it are ignored.  Raises if the period contains no
    weekday or no weekend day, since per-day normalization would divide
    by zero.
    """
    start, end = period
    n_wd, n_we = count_days(start, end, holidays)
    if n_wd == 0 or n_we == 0:
        raise ValueError(f"period must contain both day types (weekdays={n_wd}, weekend={n_we})")

    k = clustering.k
    raw = np.zeros((k, 2, N_TIME_BINS, N_DURATION_BINS))
    for s in stays:
        if s.area_id is None:
            continue
        cluster = int(clustering.assignments[s.area_id])
        dt = local_datetime(s.arrival, tz_offset)
        day0 = dt.date()
        minute = dt.hour * 60 + dt.minute + dt.second / 60.0
        layer = duration_bin(s.duration_min)
        for day_offset, b in occupied_bins(minute, s.duration_min):
            day = day0 + timedelta(days=day_offset)
            if day < start or day > end:
                continue
            dtype = 1 if is_weekend(day, holidays) else 0
            raw[cluster, dtype, b, layer] += 1.0

    counts = np.bincount(clustering.assignments, minlength=k)
    profiles = []
    for c in range(k):
        n_areas = max(int(counts[c]), 1)
        matrix = raw[c].copy()
        matrix[0] /= n_areas * n_wd
        matrix[1] /= n_areas * n_we
        profiles.append(ClusterProfile(c, matrix, int(counts[c]), n_wd, n_we))
    return profiles


def write_profiles_json(profiles, path):
    payload = [
        {
            "cluster_id": p.cluster_id,
            "n_areas_in_cluster": p.n_areas_in_cluster,
            "day_counts": {"weekday": p.n_weekdays, "weekend": p.n_weekend_days},
            "matrix": p.matrix.tolist(),
        }
        for p in profiles
    ]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)


def read_profiles_json(path):
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    return [
        ClusterProfile(
            d["cluster_id"], np.array(d["matrix"], dtype=float),
            d["n_areas_in_cluster"], d["day_counts"]["weekday"], d["day_counts"]["weekend"])
        for d in payload
    ]


def _fmt(x):
    return f"{x:.2f}"


def _panel_svg(bars, y_max, title):
    """One stacked-bar panel: bars is a 48 x 7 matrix."""
    margin_l, margin_b, margin_t = 50.0, 30.0, 24.0
    plot_w, plot_h = 576.0, 240.0  # 48 bars * 12 px
    width = margin_l + plot_w + 130.0  # room for the legend
    height = margin_t + plot_h + margin_b
    bar_w = plot_w / N_TIME_BINS
    x0, y0 = margin_l, margin_t + plot_h  # plot origin (bottom-left)

    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
               f'height="{_fmt(height)}" font-family="sans-serif" font-size="10">')
    out.append(f'<text x="{_fmt(margin_l)}" y="16" font-size="12">{title}</text>')
    # axes
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0 + plot_w)}" '
               f'y2="{_fmt(y0)}" stroke="black"/>')
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(margin_t)}" x2="{_fmt(x0)}" '
               f'y2="{_fmt(y0)}" stroke="black"/>')
    for hour in range(0, 25, 6):
        x = x0 + hour * 2 * bar_w
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(y0 + 14.0)}" text-anchor="middle">{hour}:00</text>')
    out.append(f'<text x="{_fmt(x0 - 6.0)}" y="{_fmt(margin_t + 4.0)}" '
               f'text-anchor="end">{y_max:.3g}</text>')
    out.append(f'<text x="{_fmt(x0 - 6.0)}" y="{_fmt(y0)}" text-anchor="end">0</text>')
    # stacked bars, omitting zero-height rectangles
    scale = plot_h / y_max if y_max > 0 else 0.0
    for b in range(N_TIME_BINS):
        base = y0
        for layer in range(N_DURATION_BINS):
            h = bars[b, layer] * scale
            if h <= 0:
                continue
            base -= h
            out.append(f'<rect x="{_fmt(x0 + b * bar_w)}" y="{_fmt(base)}" '
                       f'width="{_fmt(bar_w)}" height="{_fmt(h)}" '
                       f'fill="{LAYER_COLORS[layer]}"/>')
    # legend
    lx = x0 + plot_w + 14.0
    for layer in range(N_DURATION_BINS):
        ly = margin_t + layer * 16.0
        out.append(f'<rect x="{_fmt(lx)}" y="{_fmt(ly)}" width="12.00" height="12.00" '
                   f'fill="{LAYER_COLORS[layer]}"/>')
        out.append(f'<text x="{_fmt(lx + 16.0)}" y="{_fmt(ly + 10.0)}">{LAYER_LABELS[layer]} min</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def render_profile_svg(profiles, out_dir):
    """Write cluster_<id>_<daytype>.svg charts; shared y-scale across all
    panels of the run so clusters stay visually comparable.  Returns the
    written paths."""
    import os
    y_max = 0.0
    for p in profiles:
        y_max = max(y_max, float(p.matrix.sum(axis=2).max()))
    if y_max == 0.0:
        y_max = 1.0
    paths = []
    for p in profiles:
        for dtype, name in ((0, "weekday"), (1, "weekend")):
            svg = _panel_svg(p.matrix[dtype], y_max,
                             f"cluster {p.cluster_id} / {name} (per area per day)")
            path = os.path.join(out_dir, f"cluster_{p.cluster_id}_{name}.svg")
            with open(path, "w", encoding="utf-8") as f:
                f.write(svg)
            paths.append(path)
    return paths


CLUSTER_COLORS = ("#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                  "#a65628", "#f781bf", "#17becf", "#999999", "#66c2a5")


def cluster_color(cid):
    return CLUSTER_COLORS[cid % len(CLUSTER_COLORS)]


def geojson_features(grid, vocab, clustering):
    """One closed square Polygon per retained area (RFC 7946, lon/lat order)."""
    features = []
    for area_id, cell in enumerate(vocab.retained):
        lat0, lat1, lon0, lon1 = grid.cell_bounds(cell)
        ring = [[round(lon0, 7), round(lat0, 7)],
                [round(lon1, 7), round(lat0, 7)],
                [round(lon1, 7), round(lat1, 7)],
                [round(lon0, 7), round(lat1, 7)],
                [round(lon0, 7), round(lat0, 7)]]
        clat, clon = grid.cell_center(cell)
        cid = int(clustering.assignments[area_id])
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [ring]},
            "properties": {
                "area_id": area_id,
                "cluster_id": cid,
                "stay_count": int(vocab.stay_counts[area_id]),
                "center_lat": round(clat, 7),
                "center_lon": round(clon, 7),
                "fill": cluster_color(cid),
            },
        })
    return features


def render_geojson(grid, vocab, clustering, out_path):
    collection = {"type": "FeatureCollection",
                  "features": geojson_features(grid, vocab, clustering)}
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(collection, f)
    return collection
