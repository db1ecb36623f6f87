"""Proximity ranking, forearm slot projection, and the selection state machine.

Objects are bounding spheres; distances are measured from the discretized ray
to the sphere surface (center distance minus radius, floored at zero) so "near"
and "pierced" share one scale. Every ordering in this module breaks ties by
ascending object id to keep results deterministic.

State machine (phase x event):

    (idle,   bend)        -> active
    (active, straighten)  -> locked, freezing the live ranking
    (locked, slot i)      -> idle, emitting the frozen slot's object id
    (locked, slot empty)  -> locked, soft error "empty slot"
    (any,    cancel)      -> idle
    anything else         -> unchanged

Outcomes are only ever emitted from the locked phase.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Polyline, Vec3, as_vec3, value_eq, _project_points_to_polyline

__all__ = [
    "DEFAULT_SLOTS",
    "DEFAULT_SLOT_FRACTIONS",
    "SceneObject",
    "RankedObject",
    "ProximityResult",
    "ForearmFrame",
    "ForearmSlot",
    "Phase",
    "EventKind",
    "SelectionEvent",
    "SelectionState",
    "StepResult",
    "rank_objects",
    "project_to_forearm",
    "step_state",
    "ray_hit_select",
]

#: Number of ranked objects projected onto the forearm.
DEFAULT_SLOTS = 4

#: Slot centers as fractions of the elbow-to-wrist axis; rank 1 sits nearest
#: the wrist to minimize the confirming hand's reach.
DEFAULT_SLOT_FRACTIONS = (0.8, 0.6, 0.4, 0.2)


@dataclass(frozen=True, eq=False)
class SceneObject:
    """Selectable object abstracted to a bounding sphere."""

    id: int
    position: Vec3
    radius: float
    label: str = ""

    def __post_init__(self):
        if int(self.id) != self.id or self.id < 0:
            raise ValueError(f"object id must be a non-negative integer, got {self.id}")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "position", as_vec3(self.position))
        if not math.isfinite(self.radius) or self.radius <= 0.0:
            raise ValueError(f"object radius must be > 0, got {self.radius}")

    __eq__ = value_eq


@dataclass(frozen=True, eq=False)
class RankedObject:
    """One ranking entry: surface distance plus the winning projection."""

    object_id: int
    d_min: float
    projection: Vec3
    segment_index: int
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "projection", as_vec3(self.projection))

    __eq__ = value_eq


@dataclass(frozen=True)
class ProximityResult:
    """Objects ranked ascending by (surface distance, id), truncated to k."""

    ranked: tuple[RankedObject, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "ranked", tuple(self.ranked))
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if len(self.ranked) > self.k:
            raise ValueError("ranking longer than k")


@dataclass(frozen=True, eq=False)
class ForearmFrame:
    """Forearm axis from elbow to wrist with slot placement fractions."""

    elbow: Vec3
    wrist: Vec3
    slot_fractions: tuple[float, ...] = DEFAULT_SLOT_FRACTIONS

    def __post_init__(self):
        object.__setattr__(self, "elbow", as_vec3(self.elbow))
        object.__setattr__(self, "wrist", as_vec3(self.wrist))
        fracs = tuple(float(f) for f in self.slot_fractions)
        object.__setattr__(self, "slot_fractions", fracs)
        if not np.any(self.wrist != self.elbow):
            raise ValueError("forearm frame needs distinct elbow and wrist")
        if not fracs:
            raise ValueError("slot_fractions must not be empty")
        for f in fracs:
            if not 0.0 < f < 1.0:
                raise ValueError(f"slot fraction {f} outside (0, 1)")
        if any(b >= a for a, b in zip(fracs, fracs[1:])):
            raise ValueError("slot_fractions must be strictly decreasing")

    __eq__ = value_eq


@dataclass(frozen=True, eq=False)
class ForearmSlot:
    slot_index: int
    object_id: int
    slot_center: Vec3

    def __post_init__(self):
        object.__setattr__(self, "slot_center", as_vec3(self.slot_center))

    __eq__ = value_eq


class Phase(enum.Enum):
    IDLE = "idle"
    ACTIVE = "active"
    LOCKED = "locked"


class EventKind(enum.Enum):
    MIDDLE_FINGER_BENT = "bend"
    MIDDLE_FINGER_STRAIGHTENED = "straighten"
    SLOT_TOUCHED = "slot_touched"
    CANCEL = "cancel"


@dataclass(frozen=True)
class SelectionEvent:
    kind: EventKind
    slot_index: Optional[int] = None

    def __post_init__(self):
        if self.kind is EventKind.SLOT_TOUCHED:
            if self.slot_index is None or not 0 <= self.slot_index <= 3:
                raise ValueError(f"slot_index must be 0..3, got {self.slot_index}")
        elif self.slot_index is not None:
            raise ValueError(f"slot_index is only valid with SLOT_TOUCHED")


@dataclass(frozen=True)
class SelectionState:
    """Phase plus the frozen ranking, present exactly while locked."""

    phase: Phase = Phase.IDLE
    frozen: Optional[ProximityResult] = None

    def __post_init__(self):
        if (self.frozen is not None) != (self.phase is Phase.LOCKED):
            raise ValueError("frozen ranking present iff phase is locked")


@dataclass(frozen=True)
class StepResult:
    """Transition outcome: the next state, an emitted selection, or a soft error."""

    state: SelectionState
    selected_id: Optional[int] = None
    soft_error: Optional[str] = None


_IDLE = SelectionState()


def rank_objects(
    line: Polyline, objects: Sequence[SceneObject], k: int = DEFAULT_SLOTS
) -> ProximityResult:
    """Rank objects by surface distance to the polyline, keeping the k nearest.

    Ties sort by ascending object id. An empty object list yields an empty
    ranking rather than an error.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not objects:
        return ProximityResult((), k)
    ids = np.array([o.id for o in objects], dtype=np.int64)
    if len(np.unique(ids)) != len(ids):
        raise ValueError("object ids must be unique")
    centers = np.stack([o.position for o in objects])
    radii = np.array([o.radius for o in objects])

    lam, proj, dist = _project_points_to_polyline(centers, line.samples)
    seg = np.argmin(dist, axis=1)  # first minimum -> lowest segment index
    rows = np.arange(len(objects))
    center_d = dist[rows, seg]
    surface_d = np.maximum(center_d - radii, 0.0)

    order = np.lexsort((ids, surface_d))[: min(k, len(objects))]
    entries = tuple(
        RankedObject(
            object_id=int(ids[i]),
            d_min=float(surface_d[i]),
            projection=proj[i, seg[i]],
            segment_index=int(seg[i]),
            lam=float(lam[i, seg[i]]),
        )
        for i in order
    )
    return ProximityResult(entries, k)


def project_to_forearm(result: ProximityResult, frame: ForearmFrame) -> list[ForearmSlot]:
    """Map ranked entries onto forearm slots: rank i to slot i.

    Fewer entries than slots leave the trailing slots unpopulated.
    """
    if len(result.ranked) > len(frame.slot_fractions):
        raise ValueError(
            f"{len(result.ranked)} ranked entries exceed "
            f"{len(frame.slot_fractions)} forearm slots"
        )
    axis = frame.wrist - frame.elbow
    return [
        ForearmSlot(i, entry.object_id, frame.elbow + f * axis)
        for i, (entry, f) in enumerate(zip(result.ranked, frame.slot_fractions))
    ]


def step_state(
    state: SelectionState, event: SelectionEvent, live: ProximityResult
) -> StepResult:
    """Advance the selection state machine by one event.

    *live* is the current ranking; it is snapshotted into the state when the
    lock happens, so later ranking updates never disturb a pending selection.
    """
    if event.kind is EventKind.CANCEL:
        return StepResult(_IDLE)

    if state.phase is Phase.IDLE:
        if event.kind is EventKind.MIDDLE_FINGER_BENT:
            return StepResult(SelectionState(Phase.ACTIVE))
        return StepResult(state)

    if state.phase is Phase.ACTIVE:
        if event.kind is EventKind.MIDDLE_FINGER_STRAIGHTENED:
            snapshot = ProximityResult(tuple(live.ranked), live.k)
            return StepResult(SelectionState(Phase.LOCKED, snapshot))
        return StepResult(state)

    # Locked: only a touch on a populated slot resolves the selection.
    if event.kind is EventKind.SLOT_TOUCHED:
        assert state.frozen is not None
        if event.slot_index >= len(state.frozen.ranked):
            return StepResult(state, soft_error="empty slot")
        return StepResult(_IDLE, selected_id=state.frozen.ranked[event.slot_index].object_id)
    return StepResult(state)


def ray_hit_select(line: Polyline, objects: Sequence[SceneObject]) -> Optional[int]:
    """Mid-air hit rule: the first pierced object along the curve.

    An object is pierced when the polyline enters its bounding sphere
    (surface distance 0). Among pierced objects the winner has the smallest
    (segment index, lam, id), i.e. sits nearest the hand; no pierce yields None.
    """
    if not objects:
        return None
    ids = np.array([o.id for o in objects], dtype=np.int64)
    centers = np.stack([o.position for o in objects])
    radii = np.array([o.radius for o in objects])
    lam, _, dist = _project_points_to_polyline(centers, line.samples)
    seg = np.argmin(dist, axis=1)
    rows = np.arange(len(objects))
    center_d = dist[rows, seg]
    pierced = center_d <= radii
    if not np.any(pierced):
        return None
    candidates = sorted(
        (int(seg[i]), float(lam[i, seg[i]]), int(ids[i])) for i in rows[pierced]
    )
    return candidates[0][2]
