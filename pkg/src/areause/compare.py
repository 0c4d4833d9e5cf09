"""Cross-period comparison: align cluster labels between two independent
runs and report per-area cluster transitions.

Embeddings from separate trainings do not share a coordinate system, so
periods are matched through their cluster profiles (which live in a
common, interpretable space): minimum-total-cost perfect matching on L1
profile distance.  Areas are identified across periods by grid cell.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass
class PeriodResult:
    label: str
    grid: object
    vocabulary: object
    uas: np.ndarray
    clustering: object
    profiles: list


@dataclass
class TransitionReport:
    common_cells: list      # grid cell indices present in both periods
    matrix: np.ndarray      # k x k counts, [from aligned cluster][to aligned cluster]
    appeared: list          # cells retained only in the second period
    dropped: list           # cells retained only in the first period


def _profile_matrix(profiles):
    ordered = sorted(profiles, key=lambda p: p.cluster_id)
    return np.stack([p.matrix.ravel() for p in ordered])


def align_clusters(a, b):
    """Map each of b's cluster labels onto a's labels.

    Returns an int array ``alignment`` with ``alignment[j] = i`` meaning
    b's cluster j corresponds to a's cluster i, chosen to minimize the
    total L1 distance between matched cluster profiles.
    """
    pa = _profile_matrix(a.profiles)
    pb = _profile_matrix(b.profiles)
    if pa.shape[0] != pb.shape[0]:
        raise ValueError(f"cluster counts differ: {pa.shape[0]} vs {pb.shape[0]}")
    cost = np.abs(pa[:, None, :] - pb[None, :, :]).sum(axis=2)
    rows, cols = linear_sum_assignment(cost)
    alignment = np.empty(len(rows), dtype=int)
    alignment[cols] = rows
    return alignment


def alignment_cost(a, b, alignment):
    pa = _profile_matrix(a.profiles)
    pb = _profile_matrix(b.profiles)
    return float(sum(np.abs(pa[alignment[j]] - pb[j]).sum() for j in range(len(alignment))))


def transition_report(a, b, alignment):
    """Count areas moving between aligned clusters from period a to b."""
    cells_a = {cell: i for i, cell in enumerate(a.vocabulary.retained)}
    cells_b = {cell: i for i, cell in enumerate(b.vocabulary.retained)}
    common = sorted(set(cells_a) & set(cells_b))
    k = a.clustering.k
    matrix = np.zeros((k, k), dtype=int)
    for cell in common:
        src = int(a.clustering.assignments[cells_a[cell]])
        dst = int(alignment[b.clustering.assignments[cells_b[cell]]])
        matrix[src, dst] += 1
    return TransitionReport(
        common_cells=common,
        matrix=matrix,
        appeared=sorted(set(cells_b) - set(cells_a)),
        dropped=sorted(set(cells_a) - set(cells_b)),
    )


def write_transitions_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["from_cluster", "to_cluster", "count"])
        k = report.matrix.shape[0]
        for i in range(k):
            for j in range(k):
                w.writerow([i, j, int(report.matrix[i, j])])


def write_diff_geojson(a, b, alignment, report, path):
    """Per-area diff map: one square per common cell with from/to clusters."""
    cells_a = {cell: i for i, cell in enumerate(a.vocabulary.retained)}
    cells_b = {cell: i for i, cell in enumerate(b.vocabulary.retained)}
    features = []
    for cell in report.common_cells:
        lat0, lat1, lon0, lon1 = a.grid.cell_bounds(cell)
        ring = [[round(lon0, 7), round(lat0, 7)],
                [round(lon1, 7), round(lat0, 7)],
                [round(lon1, 7), round(lat1, 7)],
                [round(lon0, 7), round(lat1, 7)],
                [round(lon0, 7), round(lat0, 7)]]
        src = int(a.clustering.assignments[cells_a[cell]])
        dst = int(alignment[b.clustering.assignments[cells_b[cell]]])
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [ring]},
            "properties": {"cell": cell, "from_cluster": src, "to_cluster": dst,
                           "changed": src != dst},
        })
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"type": "FeatureCollection", "features": features}, f)
