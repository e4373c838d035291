"""Deterministic 2D swarm simulator for occlusion-based transport and concave filling."""

from .config import ScenarioConfig, load_config
from .geometry import ConvexPolygon, Footprint, Pose2, Vec2, concavity_deficiency, footprint_area
from .harness import run_batch, run_trial
from .scenarios import build_shape, build_world

__version__ = "0.1.0"

__all__ = [
    "ConvexPolygon", "Footprint", "Pose2", "ScenarioConfig", "Vec2", "build_shape", "build_world",
    "concavity_deficiency", "footprint_area", "load_config", "run_batch", "run_trial",
]
