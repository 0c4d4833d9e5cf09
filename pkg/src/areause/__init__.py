"""areause: model urban area usage from GPS stay information.

Pipeline: detect stays in raw trajectories, mesh the district into square
grid areas, encode each stay's temporal attributes into one of 146
categories, train a small embedding network that predicts a stay's
category from its area, cluster the unit-normalized area vectors, and
export interpretable profiles, charts, and maps.  Independent runs over
different periods can be aligned and compared area by area.
"""

from .cluster import Clustering, kmeans_fit, kmeans_pp_seed
from .compare import PeriodResult, TransitionReport, align_clusters, transition_report
from .embed import (AreaModel, ModelConfig, TrainingPair, build_training_pairs,
                    default_dim, forward, loss_and_grads, normalize_embeddings, train)
from .encoding import (N_CATEGORIES, StayCategory, category_for_stay,
                       classify_stay, decode, encode)
from .geodata import (GpsPoint, Stay, Trajectory, parse_trajectories,
                      validate_stay_sequence)
from .mesh import AreaVocabulary, BBox, Grid, assign_area, build_grid, build_vocabulary
from .pipeline import RunConfig, run, run_compare
from .profiles import ClusterProfile, build_profiles, occupied_bins
from .staydetect import StayParams, extract_stays, haversine_m
from .synth import ScenarioConfig, ZoneSpec, default_scenario, generate, pandemic_scenario

__version__ = "0.1.0"
