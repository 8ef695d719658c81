"""Contextual search on convex knowledge sets.

A library and CLI for the online guessing game where a learner pins down
a hidden vector from one-bit feedback: convex polytope maintenance,
intrinsic-volume computation (exact and Monte Carlo), the full family of
guessing policies (1-D, planar, d-dimensional, halving baselines), hard
instances, and a reproducible experiment harness.
"""

from .adversaries import BadDimensionError, InstanceSpec, generate
from .geometry import (
    DirectionalExtent,
    EmptyPolytopeError,
    GeometryError,
    Halfspace,
    Polytope,
    SliceOutOfRangeError,
    TooManyConstraintsError,
    clip,
    cross_section,
    extent,
    vertices,
)
from .harness import ExperimentConfig, RegretSummary, run, sweep, verify
from .intrinsic import (
    IntrinsicVolumeEstimate,
    ProjectionSample,
    area_perimeter,
    intrinsic_volume,
    steiner_volume,
    unit_ball_volume,
)
from .policies import EstimatorFailure, build_policy
from .rng import PortableRng
from .search import Feedback, LossSpec, RoundRecord, evaluate_loss, play_round

__version__ = "0.1.0"

__all__ = [
    "BadDimensionError", "DirectionalExtent", "EmptyPolytopeError",
    "EstimatorFailure", "ExperimentConfig", "Feedback", "GeometryError",
    "Halfspace", "InstanceSpec", "IntrinsicVolumeEstimate", "LossSpec",
    "Polytope", "PortableRng", "ProjectionSample", "RegretSummary",
    "RoundRecord", "SliceOutOfRangeError", "TooManyConstraintsError",
    "area_perimeter", "build_policy", "clip", "cross_section",
    "evaluate_loss", "extent", "generate", "intrinsic_volume",
    "play_round", "run", "steiner_volume", "sweep", "unit_ball_volume",
    "verify", "vertices",
]
