"""Deterministic scene generation and synthetic selection trials.

Every operation here is a pure function of explicit seeds: the same inputs
reproduce the same scenes, trials, and aggregate tables bit for bit. Trials
derive their own PRNG streams from (noise seed, participant, technique index,
repeat), so results never depend on execution order.

The synthetic user replaces a human participant: it aims the ray exactly at
the target, bends the curve when the paradigm asks for it, and then suffers
configurable Gaussian pointing and flexion jitter. Reported metrics describe
this simulator, not human performance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    DEFAULT_SEGMENTS,
    QuadBezier,
    Vec3,
    as_vec3,
    discretize,
    min_distance_to_polyline,
    perpendicular_unit,
    unit,
    value_eq,
    vec3,
)
from .gestures import (
    DEFAULT_GAIN,
    DEFAULT_REACH,
    HandPose,
    curvature_from_flexion,
    flexion_from_pose,
)
from .selection import (
    DEFAULT_SLOTS,
    EventKind,
    ForearmFrame,
    SceneObject,
    SelectionEvent,
    SelectionState,
    rank_objects,
    ray_hit_select,
    step_state,
)

__all__ = [
    "DEFAULT_OBJECT_COUNT",
    "DEFAULT_BOUNDS",
    "DEFAULT_CENTER",
    "DEFAULT_OBJECT_RADIUS",
    "DEFAULT_EYE",
    "DEFAULT_WRIST",
    "DEFAULT_CONE_HALF_ANGLE",
    "SceneConfig",
    "Scene",
    "SceneInfeasibleError",
    "Medium",
    "Paradigm",
    "Technique",
    "ALL_TECHNIQUES",
    "NoiseModel",
    "TrialRecord",
    "BlockRow",
    "BlockResult",
    "generate_scene",
    "occlusion_set",
    "simulate_trial",
    "run_block",
    "default_pose_template",
    "default_forearm_frame",
    "derive_scene_seeds",
    "derive_trial_seed",
]

DEFAULT_OBJECT_COUNT = 64
DEFAULT_BOUNDS = (3.0, 1.5, 1.5)  # width x, height y, depth z in meters
DEFAULT_CENTER = (0.0, 1.4, 2.5)  # box center 2.5 m in front of the eye origin
DEFAULT_OBJECT_RADIUS = 0.06
DEFAULT_EYE = (0.0, 1.4, 0.0)
DEFAULT_WRIST = (0.15, 1.1, 0.2)
DEFAULT_ELBOW = (0.35, 1.0, 0.05)
DEFAULT_CONE_HALF_ANGLE = math.radians(0.5)

#: Total rejected placements tolerated before a packing is declared infeasible.
MAX_PLACEMENT_REJECTIONS = 10_000

#: Reference wrist-to-fingertip length of the simulated steering finger.
FINGER_LENGTH = 0.18

#: Off-target tilts of the forearm axis tried when the synthetic user bends
#: the ray: holding the aim off the line of sight is what lets the curve wrap
#: around blockers instead of stabbing through them. Zero comes first (no
#: bend needed), then growing tilts on both sides of the bend plane.
BEND_STANDOFF_ANGLES = (0.0, 0.05, -0.05, 0.1, -0.1, 0.15, -0.15, 0.2, -0.2, 0.3, -0.3)

_LABEL_COLORS = ("red", "green", "blue", "yellow", "purple", "orange", "cyan", "pink")
_LABEL_SHAPES = ("star", "heart", "disc", "ring", "cube", "drop", "leaf", "bolt")


class SceneInfeasibleError(RuntimeError):
    """Raised when object spheres cannot be packed without overlap."""


@dataclass(frozen=True, eq=False)
class SceneConfig:
    """Seeded recipe for a study scene."""

    object_count: int = DEFAULT_OBJECT_COUNT
    bounds: tuple[float, float, float] = DEFAULT_BOUNDS
    center: Vec3 = DEFAULT_CENTER
    object_radius: float = DEFAULT_OBJECT_RADIUS
    seed: int = 0

    def __post_init__(self):
        if self.object_count < 1:
            raise ValueError(f"object_count must be >= 1, got {self.object_count}")
        bounds = tuple(float(b) for b in self.bounds)
        if len(bounds) != 3 or any(not math.isfinite(b) or b <= 0.0 for b in bounds):
            raise ValueError(f"bounds must be three positive extents, got {self.bounds}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "center", as_vec3(self.center))
        if not math.isfinite(self.object_radius) or self.object_radius <= 0.0:
            raise ValueError(f"object_radius must be > 0, got {self.object_radius}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.center) - np.asarray(self.bounds) / 2.0

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.center) + np.asarray(self.bounds) / 2.0

    __eq__ = value_eq


@dataclass(frozen=True)
class Scene:
    """Generated object cloud with one designated target."""

    objects: tuple[SceneObject, ...]
    target_id: int
    config: SceneConfig

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be unique")
        if self.target_id not in set(ids):
            raise ValueError(f"target_id {self.target_id} not present in scene")
        lo, hi = self.config.lo, self.config.hi
        for o in self.objects:
            if np.any(o.position < lo) or np.any(o.position > hi):
                raise ValueError(f"object {o.id} at {o.position} outside scene bounds")

    def object_by_id(self, object_id: int) -> SceneObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(object_id)

    @property
    def target(self) -> SceneObject:
        return self.object_by_id(self.target_id)


class Medium(enum.Enum):
    ON_BODY = "on_body"
    MID_AIR = "mid_air"


class Paradigm(enum.Enum):
    LINEAR_RAY = "linear_ray"
    BEZIER_CURVE = "bezier_curve"


@dataclass(frozen=True)
class Technique:
    medium: Medium
    paradigm: Paradigm

    @property
    def label(self) -> str:
        return f"{self.medium.value}:{self.paradigm.value}"


#: The four technique combinations, baseline first.
ALL_TECHNIQUES = (
    Technique(Medium.MID_AIR, Paradigm.LINEAR_RAY),
    Technique(Medium.MID_AIR, Paradigm.BEZIER_CURVE),
    Technique(Medium.ON_BODY, Paradigm.LINEAR_RAY),
    Technique(Medium.ON_BODY, Paradigm.BEZIER_CURVE),
)


@dataclass(frozen=True)
class NoiseModel:
    """Synthetic motor noise: pointing jitter (radians) and curvature jitter."""

    angular_sigma: float = 0.01
    flexion_sigma: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.angular_sigma < 0.0 or self.flexion_sigma < 0.0:
            raise ValueError("noise sigmas must be >= 0")


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one simulated selection trial."""

    technique: Technique
    scene_seed: int
    target_id: int
    captured: bool
    target_rank: Optional[int]
    selected_id: Optional[int]
    error: Optional[bool]
    d_min_target: float
    target_occluded: bool
    kappa_used: float

    def __post_init__(self):
        if (self.error is not None) != (self.selected_id is not None):
            raise ValueError("error is defined exactly when a selection was emitted")
        if self.target_rank is not None and not 1 <= self.target_rank <= DEFAULT_SLOTS:
            raise ValueError(f"target_rank must be 1..{DEFAULT_SLOTS}")


@dataclass(frozen=True)
class BlockRow:
    participant: int
    repeat: int
    record: TrialRecord


@dataclass(frozen=True)
class BlockResult:
    rows: tuple[BlockRow, ...]
    summary: dict


def generate_scene(config: SceneConfig) -> Scene:
    """Draw object positions uniformly inside the configured box.

    Placement rejects overlaps (pairwise center distance >= 2 * radius); more
    than MAX_PLACEMENT_REJECTIONS rejections raise SceneInfeasibleError. The
    target and the labels are drawn from the same seeded stream, so an
    identical config reproduces the identical scene.
    """
    rng = np.random.default_rng(config.seed)
    lo, hi = config.lo, config.hi
    min_sep = 2.0 * config.object_radius

    positions: list[np.ndarray] = []
    rejections = 0
    while len(positions) < config.object_count:
        p = rng.uniform(lo, hi)
        if positions and np.min(np.linalg.norm(np.asarray(positions) - p, axis=1)) < min_sep:
            rejections += 1
            if rejections > MAX_PLACEMENT_REJECTIONS:
                raise SceneInfeasibleError(
                    f"could not place {config.object_count} spheres of radius "
                    f"{config.object_radius} in bounds {config.bounds} after "
                    f"{MAX_PLACEMENT_REJECTIONS} rejections"
                )
            continue
        positions.append(p)

    labels = [
        f"{_LABEL_COLORS[int(rng.integers(len(_LABEL_COLORS)))]}-"
        f"{_LABEL_SHAPES[int(rng.integers(len(_LABEL_SHAPES)))]}"
        for _ in range(config.object_count)
    ]
    target_id = int(rng.integers(config.object_count))

    objects = tuple(
        SceneObject(id=i, position=p, radius=config.object_radius, label=labels[i])
        for i, p in enumerate(positions)
    )
    return Scene(objects=objects, target_id=target_id, config=config)


def occlusion_set(
    scene: Scene,
    eye=DEFAULT_EYE,
    cone_half_angle: float = DEFAULT_CONE_HALF_ANGLE,
) -> set[int]:
    """Ids whose straight line of sight from *eye* is blocked.

    An object is occluded when another object's sphere intersects the segment
    from the eye to its center, or when another center sits within
    cone_half_angle of that line of sight at smaller depth.
    """
    eye = as_vec3(eye)
    centers = np.stack([o.position for o in scene.objects])
    radii = np.array([o.radius for o in scene.objects])
    rel = centers - eye  # (N, 3)
    depth = np.linalg.norm(rel, axis=1)
    if np.any(depth <= radii):
        raise ValueError("eye must lie outside every object sphere")
    n = len(scene.objects)
    if n == 1:
        return set()

    # Distance from each center j to the sight segment eye -> center i.
    len2 = (depth * depth)[None, :]  # |rel_i|^2, broadcast over j rows
    dot = rel @ rel.T  # dot[j, i] = rel_j . rel_i
    lam = np.clip(dot / len2, 0.0, 1.0)
    diff = centers[:, None, :] - (eye + lam[:, :, None] * rel[None, :, :])
    seg_dist = np.linalg.norm(diff, axis=2)  # (j, i)

    blocks = seg_dist <= radii[:, None]  # sphere j cuts the sight line to i
    cos_angle = dot / np.maximum(depth[:, None] * depth[None, :], 1e-300)
    in_cone = (cos_angle >= math.cos(cone_half_angle)) & (depth[:, None] < depth[None, :])
    occluders = blocks | in_cone
    np.fill_diagonal(occluders, False)

    occluded = np.any(occluders, axis=0)
    ids = np.array([o.id for o in scene.objects])
    return set(int(i) for i in ids[occluded])


def default_pose_template(wrist=DEFAULT_WRIST) -> HandPose:
    """Neutral steering-hand pose; trial aiming replaces the frame."""
    wrist = as_vec3(wrist)
    forward = vec3(0.0, 0.0, 1.0)
    return HandPose(
        wrist=wrist,
        fingertip_extended=wrist + FINGER_LENGTH * forward,
        fingertip_current=wrist + FINGER_LENGTH * forward,
        v_align=forward,
        v_ortho=vec3(0.0, 1.0, 0.0),
    )


def default_forearm_frame() -> ForearmFrame:
    return ForearmFrame(elbow=DEFAULT_ELBOW, wrist=DEFAULT_WRIST)


def _bend_plane(u: Vec3) -> Vec3:
    """Deterministic bend-plane direction: world-up projected off the aim."""
    return perpendicular_unit(u)


def _aim_frames(wrist: Vec3, target: Vec3, standoff: float) -> tuple[Vec3, Vec3]:
    """Forearm frame tilted *standoff* radians off the wrist-to-target line.

    The axis leans away from the bend-plane direction while the off-axis
    vector leans into it, so growing curvature sweeps the ray tip back across
    the line of aim. A negative standoff bends around the other side.
    """
    u = unit(target - wrist)
    q = _bend_plane(u)
    if standoff < 0.0:
        q = as_vec3(-q)
        standoff = -standoff
    c, s = math.cos(standoff), math.sin(standoff)
    v_align = as_vec3(c * u - s * q)
    v_ortho = as_vec3(s * u + c * q)
    return v_align, v_ortho


def _curve_from_frame(
    wrist: Vec3, v_align: Vec3, v_ortho: Vec3, kappa: float, length: float, gain: float
) -> QuadBezier:
    p0 = wrist
    p1 = p0 + v_align * (0.5 * (1.0 + kappa) * length)
    p2 = p0 + length * v_align + (kappa * length) * v_ortho
    return QuadBezier(p0, p1, p2)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _search_kappa(
    objective, lo: float, hi: float, coarse: int = 33, tol: float = 1e-4
) -> float:
    """Minimize a 1-D objective over [lo, hi].

    A coarse grid brackets the best region (the objective is only piecewise
    unimodal), then a golden-section refinement narrows it to *tol*.
    """
    grid = np.linspace(lo, hi, coarse)
    values = [objective(float(k)) for k in grid]
    i = int(np.argmin(values))
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, coarse - 1)])

    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(x2)
    return x1 if f1 <= f2 else x2


def _aim_bent_ray(
    wrist: Vec3,
    target: SceneObject,
    objects: Sequence[SceneObject],
    *,
    length: float,
    gain: float,
    segments: int,
) -> tuple[Vec3, Vec3, float]:
    """Pick a forearm frame and curvature that steer the bent ray onto the target.

    For each candidate standoff angle the curvature minimizing the target
    distance is found by a bracketed golden-section search; the sweep stops at
    the first candidate whose curve reaches the target first along its length
    (so blockers on the line of sight get bent around). If no candidate locks
    on, the closest pass wins.
    """
    best: tuple[float, float, Vec3, Vec3] | None = None  # (d, kappa, va, vo)
    for standoff in BEND_STANDOFF_ANGLES:
        v_align, v_ortho = _aim_frames(wrist, target.position, standoff)

        def target_distance(kappa: float) -> float:
            curve = _curve_from_frame(wrist, v_align, v_ortho, kappa, length, gain)
            d, _, _ = min_distance_to_polyline(target.position, discretize(curve, segments))
            return d

        kappa = _search_kappa(target_distance, 0.0, gain)
        d = target_distance(kappa)
        if d <= target.radius:
            line = discretize(_curve_from_frame(wrist, v_align, v_ortho, kappa, length, gain), segments)
            if ray_hit_select(line, objects) == target.id:
                return v_align, v_ortho, kappa
        if best is None or d < best[0]:
            best = (d, kappa, v_align, v_ortho)
    assert best is not None
    return best[2], best[3], best[1]


def _jitter_direction(v: Vec3, rng: np.random.Generator, sigma: float) -> Vec3:
    """Rotate *v* by an N(0, sigma) angle around a uniformly-random
    perpendicular axis (Rodrigues)."""
    angle = float(rng.normal(0.0, sigma))
    phi = float(rng.uniform(0.0, 2.0 * math.pi))
    e1 = perpendicular_unit(v)
    e2 = unit(np.cross(v, e1))
    axis = math.cos(phi) * e1 + math.sin(phi) * e2
    c, s = math.cos(angle), math.sin(angle)
    rotated = v * c + np.cross(axis, v) * s + axis * float(np.dot(axis, v)) * (1.0 - c)
    return unit(rotated)


def simulate_trial(
    technique: Technique,
    scene: Scene,
    noise: NoiseModel,
    pose_template: HandPose,
    forearm: ForearmFrame,
    *,
    eye=DEFAULT_EYE,
    length: float = DEFAULT_REACH,
    gain: float = DEFAULT_GAIN,
    segments: int = DEFAULT_SEGMENTS,
    slots: int = DEFAULT_SLOTS,
) -> TrialRecord:
    """Run one synthetic selection trial; misses are outcomes, not errors.

    The synthetic user aims exactly at the target (linear ray) or holds the
    forearm axis off-target and searches curvature for the closest pass (bent
    ray), then suffers the configured jitter. On-body trials walk the full
    bend / straighten / touch state machine; mid-air trials confirm whatever
    the ray pierces first.
    """
    rng = np.random.default_rng(noise.seed)
    target = scene.target
    wrist = pose_template.wrist

    if technique.paradigm is Paradigm.LINEAR_RAY:
        v_align = unit(target.position - wrist)
        v_ortho = perpendicular_unit(v_align)
        kappa_goal = 0.0
    else:
        v_align, v_ortho, kappa_goal = _aim_bent_ray(
            wrist, target, scene.objects, length=length, gain=gain, segments=segments
        )

    # Motor noise: pointing jitter tilts the whole frame, flexion jitter
    # perturbs the achieved curvature.
    v_align = _jitter_direction(v_align, rng, noise.angular_sigma)
    d = float(np.dot(v_align, v_ortho))
    v_ortho = unit(v_ortho - d * v_align)
    if technique.paradigm is Paradigm.BEZIER_CURVE:
        kappa_goal = min(max(kappa_goal + float(rng.normal(0.0, noise.flexion_sigma)), 0.0), gain)

    # Drive the real gesture pipeline: realize the curvature as a fingertip
    # distance and map it back through the flexion equation.
    l_bent = FINGER_LENGTH * (1.0 - kappa_goal / gain)
    pose = HandPose(
        wrist=wrist,
        fingertip_extended=wrist + FINGER_LENGTH * v_align,
        fingertip_current=wrist + l_bent * v_align,
        v_align=v_align,
        v_ortho=v_ortho,
    )
    kappa_used = curvature_from_flexion(flexion_from_pose(pose), gain)
    curve = _curve_from_frame(wrist, pose.v_align, pose.v_ortho, kappa_used, length, gain)
    line = discretize(curve, segments)

    ranked = rank_objects(line, scene.objects, k=slots)
    rank_of_target = next(
        (i + 1 for i, e in enumerate(ranked.ranked) if e.object_id == target.id), None
    )
    d_center, _, _ = min_distance_to_polyline(target.position, line)
    d_min_target = max(d_center - target.radius, 0.0)
    occluded = target.id in occlusion_set(scene, eye)

    if technique.medium is Medium.ON_BODY:
        captured = rank_of_target is not None
        state = step_state(SelectionState(), SelectionEvent(EventKind.MIDDLE_FINGER_BENT), ranked).state
        state = step_state(
            state, SelectionEvent(EventKind.MIDDLE_FINGER_STRAIGHTENED), ranked
        ).state
        if captured:
            result = step_state(
                state,
                SelectionEvent(EventKind.SLOT_TOUCHED, slot_index=rank_of_target - 1),
                ranked,
            )
            selected_id = result.selected_id
        else:
            step_state(state, SelectionEvent(EventKind.CANCEL), ranked)
            selected_id = None
    else:
        captured = d_min_target == 0.0
        selected_id = ray_hit_select(line, scene.objects)

    error = (selected_id != target.id) if selected_id is not None else None
    return TrialRecord(
        technique=technique,
        scene_seed=scene.config.seed,
        target_id=target.id,
        captured=captured,
        target_rank=rank_of_target,
        selected_id=selected_id,
        error=error,
        d_min_target=d_min_target,
        target_occluded=occluded,
        kappa_used=kappa_used,
    )


def derive_scene_seeds(master_seed: int, count: int) -> list[int]:
    """Independent per-scene seeds spawned from one master seed."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def derive_trial_seed(noise_seed: int, participant: int, technique_index: int, repeat: int) -> int:
    """Per-trial stream seed; makes trials schedule-independent."""
    ss = np.random.SeedSequence(entropy=(noise_seed, participant, technique_index, repeat))
    return int(ss.generate_state(1, np.uint64)[0])


def run_block(
    scene_seeds: Sequence[int],
    techniques: Sequence[Technique],
    repeats: int,
    participants: int,
    noise: NoiseModel,
    *,
    scene_config: Optional[SceneConfig] = None,
    pose_template: Optional[HandPose] = None,
    forearm: Optional[ForearmFrame] = None,
    eye=DEFAULT_EYE,
    length: float = DEFAULT_REACH,
    gain: float = DEFAULT_GAIN,
    segments: int = DEFAULT_SEGMENTS,
    slots: int = DEFAULT_SLOTS,
) -> BlockResult:
    """Execute participants x techniques x repeats trials and aggregate.

    Scene seeds index by (participant, repeat), so the four techniques see the
    same scene within a repeat (a paired comparison). Rows come out ordered by
    (participant, technique index, repeat) regardless of how trials would be
    scheduled; aggregation is a deterministic fold in that order.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    if participants < 1:
        raise ValueError(f"participants must be >= 1, got {participants}")
    if not techniques:
        raise ValueError("need at least one technique")
    needed = participants * repeats
    if len(scene_seeds) < needed:
        raise ValueError(f"need {needed} scene seeds, got {len(scene_seeds)}")

    base_config = scene_config or SceneConfig()
    pose = pose_template or default_pose_template()
    arm = forearm or default_forearm_frame()

    scenes: dict[int, Scene] = {}

    def scene_for(participant: int, repeat: int) -> Scene:
        idx = participant * repeats + repeat
        if idx not in scenes:
            scenes[idx] = generate_scene(replace(base_config, seed=scene_seeds[idx]))
        return scenes[idx]

    rows: list[BlockRow] = []
    for p in range(participants):
        for ti, tech in enumerate(techniques):
            for r in range(repeats):
                trial_noise = NoiseModel(
                    angular_sigma=noise.angular_sigma,
                    flexion_sigma=noise.flexion_sigma,
                    seed=derive_trial_seed(noise.seed, p, ti, r),
                )
                record = simulate_trial(
                    tech,
                    scene_for(p, r),
                    trial_noise,
                    pose,
                    arm,
                    eye=eye,
                    length=length,
                    gain=gain,
                    segments=segments,
                    slots=slots,
                )
                rows.append(BlockRow(participant=p, repeat=r, record=record))

    return BlockResult(rows=tuple(rows), summary=summarize(rows, techniques))


def _mean(values: list[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def summarize(rows: Sequence[BlockRow], techniques: Sequence[Technique]) -> dict:
    """Per-technique aggregate metrics over trial rows."""
    per_technique: dict[str, dict] = {}
    for tech in techniques:
        recs = [row.record for row in rows if row.record.technique == tech]
        captured = [r.captured for r in recs]
        selections = [r for r in recs if r.selected_id is not None]
        occluded = [r for r in recs if r.target_occluded]
        per_technique[tech.label] = {
            "capture_rate": _mean([float(c) for c in captured]),
            "error_rate": _mean([float(r.error) for r in selections]),
            "mean_target_rank": _mean(
                [float(r.target_rank) for r in recs if r.target_rank is not None]
            ),
            "occluded_capture_rate": _mean([float(r.captured) for r in occluded]),
            "mean_d_min": _mean([abs(r.d_min_target) for r in recs]),
        }
    return {"trials": len(rows), "techniques": per_technique}
