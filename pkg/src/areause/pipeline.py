"""Full pipeline orchestration: ingest -> stays -> mesh -> encode -> train
-> normalize -> cluster -> profile -> render, with a reproducibility
manifest capturing config, seeds, and artifact digests.
"""

import csv
import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from . import cluster as clustering_mod
from . import compare as compare_mod
from . import embed, geodata, mesh, profiles, staydetect
from .holidays import JP_HOLIDAYS, load_holidays


class StageError(Exception):
    """Pipeline failure tagged with the stage that caused it."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    bbox: mesh.BBox
    period_start: date
    period_end: date
    input_csv: str | None = None
    stays_csv: str | None = None
    cell_m: float = 50.0
    min_stays: int = 100
    stay_params: staydetect.StayParams = staydetect.StayParams()
    tz_offset_min: int = 540
    holidays_file: str | None = None
    dim: int | None = None
    learning_rate: float = 0.025
    epochs: int = 20
    k: int = 4
    n_init: int = 10
    seed: int = 1

    @classmethod
    def from_dict(cls, d):
        bbox = mesh.BBox(**d["bbox"])
        sp = staydetect.StayParams(**d.get("stay_params", {}))
        model = d.get("model", {})
        return cls(
            bbox=bbox,
            period_start=date.fromisoformat(d["period"]["start"]),
            period_end=date.fromisoformat(d["period"]["end"]),
            input_csv=d.get("input_csv"),
            stays_csv=d.get("stays_csv"),
            cell_m=d.get("cell_m", 50.0),
            min_stays=d.get("min_stays", 100),
            stay_params=sp,
            tz_offset_min=d.get("tz_offset_min", 540),
            holidays_file=d.get("holidays_file"),
            dim=model.get("dim"),
            learning_rate=model.get("learning_rate", 0.025),
            epochs=model.get("epochs", 20),
            k=d.get("k", 4),
            n_init=d.get("n_init", 10),
            seed=d.get("seed", 1),
        )

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_dict(self):
        return {
            "bbox": dataclasses.asdict(self.bbox),
            "period": {"start": self.period_start.isoformat(),
                       "end": self.period_end.isoformat()},
            "input_csv": self.input_csv,
            "stays_csv": self.stays_csv,
            "cell_m": self.cell_m,
            "min_stays": self.min_stays,
            "stay_params": dataclasses.asdict(self.stay_params),
            "tz_offset_min": self.tz_offset_min,
            "holidays_file": self.holidays_file,
            "model": {"dim": self.dim, "learning_rate": self.learning_rate,
                      "epochs": self.epochs},
            "k": self.k,
            "n_init": self.n_init,
            "seed": self.seed,
        }

    @property
    def holidays(self):
        return load_holidays(self.holidays_file) if self.holidays_file else JP_HOLIDAYS


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _stage(name):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, StageError):
                raise StageError(name, exc) from exc
            return False
    return _Ctx()


def run(config, out_dir, label="run"):
    """Execute the full pipeline into out_dir; returns a PeriodResult."""
    os.makedirs(out_dir, exist_ok=True)
    holidays = config.holidays
    artifacts = []

    def out(name):
        path = os.path.join(out_dir, name)
        artifacts.append(name)
        return path

    with _stage("ingest"):
        if config.stays_csv:
            stays_by_user = geodata.read_stays(config.stays_csv)
            input_path = config.stays_csv
        elif config.input_csv:
            trajs, rejects = geodata.parse_trajectories(
                config.input_csv, config.tz_offset_min)
            input_path = config.input_csv
        else:
            raise ValueError("config needs input_csv or stays_csv")

    with _stage("stays"):
        if not config.stays_csv:
            stays_by_user = staydetect.extract_stays_all(trajs, config.stay_params)
            geodata.write_stays(stays_by_user, out("stays.csv"))
        stays = [s for user in sorted(stays_by_user) for s in stays_by_user[user]]
        if not stays:
            raise ValueError("no stays detected")

    with _stage("mesh"):
        grid = mesh.build_grid(config.bbox, config.cell_m)
        vocab = mesh.build_vocabulary(grid, stays, config.min_stays)
        mesh.write_vocabulary(grid, vocab, out("vocabulary.csv"))

    with _stage("encode"):
        pairs, skipped = embed.build_training_pairs(
            stays, vocab.n_areas, config.tz_offset_min, holidays)

    with _stage("train"):
        model_config = embed.ModelConfig(
            n_areas=vocab.n_areas, dim=config.dim,
            learning_rate=config.learning_rate, epochs=config.epochs,
            seed=config.seed)
        model = embed.train(pairs, model_config)
        embed.save_model(model, out("model.json"), seed=config.seed)

    with _stage("normalize"):
        uas = embed.normalize_embeddings(model)
        with open(out("uas.csv"), "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["area_id"] + [f"v{i}" for i in range(uas.shape[1])])
            for area_id, row in enumerate(uas):
                w.writerow([area_id] + [repr(x) for x in row])

    with _stage("cluster"):
        if config.k > vocab.n_areas:
            raise ValueError(f"k={config.k} exceeds the {vocab.n_areas} retained areas")
        result = clustering_mod.kmeans_fit(
            uas, config.k, seed=config.seed + 1, n_init=config.n_init)
        clustering_mod.write_clustering(
            result, out("clustering.csv"), out("clustering.json"), seed=config.seed + 1)

    with _stage("profile"):
        profile_list = profiles.build_profiles(
            stays, result, (config.period_start, config.period_end),
            config.tz_offset_min, holidays)
        profiles.write_profiles_json(profile_list, out("profiles.json"))

    with _stage("render"):
        for path in profiles.render_profile_svg(profile_list, out_dir):
            artifacts.append(os.path.basename(path))
        profiles.render_geojson(grid, vocab, result, out("areas.geojson"))

    with _stage("manifest"):
        manifest = {
            "label": label,
            "config": config.to_dict(),
            "seeds": {"train": config.seed, "cluster": config.seed + 1},
            "input": {"path": str(input_path), "sha256": _sha256(input_path)},
            "n_stays": len(stays),
            "n_pairs": len(pairs),
            "n_skipped_stays": skipped,
            "n_areas": vocab.n_areas,
            "inertia": result.inertia,
            "artifacts": {name: _sha256(os.path.join(out_dir, name))
                          for name in sorted(artifacts)},
        }
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)

    return compare_mod.PeriodResult(
        label=label, grid=grid, vocabulary=vocab, uas=uas,
        clustering=result, profiles=profile_list)


def run_compare(config_a, config_b, out_dir, k=None):
    """Run both periods, align their clusters, and write the transition report."""
    if k is not None:
        config_a = dataclasses.replace(config_a, k=k)
        config_b = dataclasses.replace(config_b, k=k)
    if config_a.k != config_b.k:
        raise StageError("compare", f"cluster counts differ: {config_a.k} vs {config_b.k}")
    a = run(config_a, os.path.join(out_dir, "period_a"), label="period_a")
    b = run(config_b, os.path.join(out_dir, "period_b"), label="period_b")
    with _stage("compare"):
        alignment = compare_mod.align_clusters(a, b)
        report = compare_mod.transition_report(a, b, alignment)
        compare_mod.write_transitions_csv(report, os.path.join(out_dir, "transitions.csv"))
        compare_mod.write_diff_geojson(a, b, alignment, report,
                                       os.path.join(out_dir, "diff.geojson"))
        with open(os.path.join(out_dir, "alignment.json"), "w", encoding="utf-8") as f:
            json.dump({
                "alignment_b_to_a": alignment.tolist(),
                "cost": compare_mod.alignment_cost(a, b, alignment),
                "n_common": len(report.common_cells),
                "n_appeared": len(report.appeared),
                "n_dropped": len(report.dropped),
            }, f, indent=2)
    return a, b, alignment, report
