"""Gesture-driven curved-ray selection for 3D scenes.

The package is organized around the selection pipeline:

- :mod:`curveselect.geometry` — quadratic Bezier rays, chord discretization,
  point-to-polyline distance queries.
- :mod:`curveselect.gestures` — finger-flexion to curvature mapping and
  selection-ray construction from a hand pose.
- :mod:`curveselect.selection` — proximity ranking, forearm slot projection,
  and the activate/lock/confirm state machine.
- :mod:`curveselect.sim` — deterministic scene generation, occlusion
  statistics, and synthetic-user trial simulation.
- :mod:`curveselect.service` — session-oriented WebSocket playground.
- :mod:`curveselect.cli` — gen-scene / simulate / bench / serve commands.
"""

from .geometry import (
    DEFAULT_SEGMENTS,
    Polyline,
    QuadBezier,
    SegmentProjection,
    Vec3,
    as_vec3,
    chord_deviation,
    chord_error_bound,
    discretize,
    evaluate_bezier,
    min_distance_to_polyline,
    project_point_to_segment,
    vec3,
)
from .gestures import (
    DEFAULT_GAIN,
    DEFAULT_REACH,
    CurveParams,
    FlexionMeasure,
    HandPose,
    build_curve,
    curvature_from_flexion,
    flexion_from_pose,
    linear_ray,
    straight_length,
)
from .selection import (
    DEFAULT_SLOTS,
    EventKind,
    ForearmFrame,
    ForearmSlot,
    Phase,
    ProximityResult,
    RankedObject,
    SceneObject,
    SelectionEvent,
    SelectionState,
    StepResult,
    project_to_forearm,
    rank_objects,
    ray_hit_select,
    step_state,
)
from .sim import (
    ALL_TECHNIQUES,
    Medium,
    NoiseModel,
    Paradigm,
    Scene,
    SceneConfig,
    SceneInfeasibleError,
    Technique,
    TrialRecord,
    generate_scene,
    occlusion_set,
    run_block,
    simulate_trial,
)

__version__ = "0.1.0"
