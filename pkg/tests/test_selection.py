import itertools

import numpy as np
import pytest

from curveselect.geometry import Polyline, discretize, vec3
from curveselect.gestures import CurveParams, build_curve
from curveselect.selection import (
    EventKind,
    ForearmFrame,
    ForearmSlot,
    Phase,
    ProximityResult,
    RankedObject,
    SceneObject,
    SelectionEvent,
    SelectionState,
    project_to_forearm,
    rank_objects,
    ray_hit_select,
    step_state,
)
from curveselect.sim import SceneConfig, generate_scene

import oracles


def straight_line(length=4.0, n=20) -> Polyline:
    ts = np.linspace(0.0, length, n + 1)
    return Polyline(np.stack([np.zeros(n + 1), np.zeros(n + 1), ts], axis=1))


def entry(object_id, d_min=0.1):
    return RankedObject(object_id, d_min, (0, 0, 0), 0, 0.0)


def live_result(*ids):
    return ProximityResult(tuple(entry(i) for i in ids), 4)


# --- ranking -----------------------------------------------------------------


def test_rank_constructed_offsets():
    line = straight_line()
    objects = [
        SceneObject(id=i, position=(0.1 * (i + 1), 0.0, 2.0), radius=0.01)
        for i in range(5)
    ]
    result = rank_objects(line, objects, k=4)
    assert [e.object_id for e in result.ranked] == [0, 1, 2, 3]
    assert [e.d_min for e in result.ranked] == sorted(e.d_min for e in result.ranked)
    assert result.ranked[0].d_min == pytest.approx(0.09, rel=1e-12)


def test_rank_breaks_ties_by_id():
    line = straight_line()
    objects = [
        SceneObject(id=7, position=(0.2, 0.0, 2.0), radius=0.01),
        SceneObject(id=3, position=(-0.2, 0.0, 2.0), radius=0.01),
    ]
    result = rank_objects(line, objects, k=2)
    assert [e.object_id for e in result.ranked] == [3, 7]


def test_rank_matches_exhaustive_sort():
    scene = generate_scene(SceneConfig(seed=42))
    curve = build_curve(
        __import__("curveselect.sim", fromlist=["default_pose_template"]).default_pose_template(),
        CurveParams(kappa=0.8, length=4.0),
    )
    line = discretize(curve, 20)
    result = rank_objects(line, scene.objects, k=4)
    ref = oracles.rank_by_distance(
        line.samples,
        [o.position for o in scene.objects],
        [o.radius for o in scene.objects],
        [o.id for o in scene.objects],
    )
    assert [(e.object_id, e.d_min) for e in result.ranked] == ref[:4]


def test_rank_topk_prefix_property(rng):
    scene = generate_scene(SceneConfig(object_count=24, seed=99))
    line = straight_line()
    full = rank_objects(line, scene.objects, k=len(scene.objects))
    for k in range(1, 9):
        prefix = rank_objects(line, scene.objects, k=k)
        assert prefix.ranked == full.ranked[:k]


def test_rank_empty_and_invalid():
    line = straight_line()
    assert rank_objects(line, [], k=4).ranked == ()
    with pytest.raises(ValueError):
        rank_objects(line, [], k=0)
    with pytest.raises(ValueError):
        rank_objects(
            line,
            [
                SceneObject(id=1, position=(0, 0, 1), radius=0.1),
                SceneObject(id=1, position=(0, 0, 2), radius=0.1),
            ],
        )


def test_rank_floors_surface_distance_at_zero():
    line = straight_line()
    pierced = SceneObject(id=0, position=(0.0, 0.0, 2.0), radius=0.5)
    result = rank_objects(line, [pierced], k=1)
    assert result.ranked[0].d_min == 0.0


def test_scene_object_validation():
    with pytest.raises(ValueError):
        SceneObject(id=-1, position=(0, 0, 0), radius=0.1)
    with pytest.raises(ValueError):
        SceneObject(id=0, position=(0, 0, 0), radius=0.0)


# --- forearm projection ------------------------------------------------------


def test_forearm_example():
    frame = ForearmFrame(elbow=(0, 0, 0), wrist=(0.4, 0, 0))
    slots = project_to_forearm(live_result(12), frame)
    assert slots == [ForearmSlot(0, 12, vec3(0.8 * 0.4, 0, 0))]
    assert slots[0].slot_center[0] == pytest.approx(0.32, rel=1e-12)


def test_forearm_empty_ranking():
    frame = ForearmFrame(elbow=(0, 0, 0), wrist=(0.4, 0, 0))
    assert project_to_forearm(ProximityResult((), 4), frame) == []


def test_forearm_orders_slots_toward_elbow():
    frame = ForearmFrame(elbow=(0, 0, 0), wrist=(0.4, 0, 0))
    slots = project_to_forearm(live_result(5, 6, 7, 8), frame)
    assert [s.object_id for s in slots] == [5, 6, 7, 8]
    xs = [s.slot_center[0] for s in slots]
    assert xs == sorted(xs, reverse=True)  # rank 1 nearest the wrist


def test_forearm_rejects_overfull_ranking():
    frame = ForearmFrame(elbow=(0, 0, 0), wrist=(0.4, 0, 0))
    over = ProximityResult(tuple(entry(i) for i in range(5)), 8)
    with pytest.raises(ValueError):
        project_to_forearm(over, frame)


def test_forearm_frame_validation():
    with pytest.raises(ValueError):
        ForearmFrame(elbow=(0, 0, 0), wrist=(0, 0, 0))
    with pytest.raises(ValueError):
        ForearmFrame(elbow=(0, 0, 0), wrist=(1, 0, 0), slot_fractions=(0.2, 0.6))
    with pytest.raises(ValueError):
        ForearmFrame(elbow=(0, 0, 0), wrist=(1, 0, 0), slot_fractions=(1.0, 0.5))


# --- state machine -----------------------------------------------------------


EVENTS = [
    SelectionEvent(EventKind.MIDDLE_FINGER_BENT),
    SelectionEvent(EventKind.MIDDLE_FINGER_STRAIGHTENED),
    SelectionEvent(EventKind.SLOT_TOUCHED, 0),
    SelectionEvent(EventKind.SLOT_TOUCHED, 2),
    SelectionEvent(EventKind.CANCEL),
]


def locked_state(live):
    state = step_state(SelectionState(), SelectionEvent(EventKind.MIDDLE_FINGER_BENT), live).state
    return step_state(state, SelectionEvent(EventKind.MIDDLE_FINGER_STRAIGHTENED), live).state


def test_activation_and_lock():
    live = live_result(10, 11)
    r1 = step_state(SelectionState(), SelectionEvent(EventKind.MIDDLE_FINGER_BENT), live)
    assert r1.state.phase is Phase.ACTIVE and r1.selected_id is None
    r2 = step_state(r1.state, SelectionEvent(EventKind.MIDDLE_FINGER_STRAIGHTENED), live)
    assert r2.state.phase is Phase.LOCKED
    assert [e.object_id for e in r2.state.frozen.ranked] == [10, 11]


def test_touch_resolves_selection():
    live = live_result(10, 11)
    state = locked_state(live)
    result = step_state(state, SelectionEvent(EventKind.SLOT_TOUCHED, 1), live_result(99))
    assert result.selected_id == 11  # frozen, not the new live ranking
    assert result.state.phase is Phase.IDLE
    assert result.state.frozen is None


def test_empty_slot_soft_error():
    live = live_result(10, 11)
    state = locked_state(live)
    result = step_state(state, SelectionEvent(EventKind.SLOT_TOUCHED, 3), live)
    assert result.state == state
    assert result.selected_id is None
    assert result.soft_error == "empty slot"


def test_idle_touch_is_noop():
    live = live_result(10)
    result = step_state(SelectionState(), SelectionEvent(EventKind.SLOT_TOUCHED, 2), live)
    assert result.state.phase is Phase.IDLE and result.selected_id is None


def test_cancel_from_every_phase():
    live = live_result(1, 2, 3)
    for state in (SelectionState(), SelectionState(Phase.ACTIVE), locked_state(live)):
        result = step_state(state, SelectionEvent(EventKind.CANCEL), live)
        assert result.state == SelectionState()
        assert result.selected_id is None


def test_exhaustive_transition_table():
    live = live_result(10, 11)
    states = {
        Phase.IDLE: SelectionState(),
        Phase.ACTIVE: SelectionState(Phase.ACTIVE),
        Phase.LOCKED: locked_state(live),
    }
    expected_phase = {
        (Phase.IDLE, EventKind.MIDDLE_FINGER_BENT): Phase.ACTIVE,
        (Phase.IDLE, EventKind.MIDDLE_FINGER_STRAIGHTENED): Phase.IDLE,
        (Phase.IDLE, EventKind.SLOT_TOUCHED): Phase.IDLE,
        (Phase.IDLE, EventKind.CANCEL): Phase.IDLE,
        (Phase.ACTIVE, EventKind.MIDDLE_FINGER_BENT): Phase.ACTIVE,
        (Phase.ACTIVE, EventKind.MIDDLE_FINGER_STRAIGHTENED): Phase.LOCKED,
        (Phase.ACTIVE, EventKind.SLOT_TOUCHED): Phase.ACTIVE,
        (Phase.ACTIVE, EventKind.CANCEL): Phase.IDLE,
        (Phase.LOCKED, EventKind.MIDDLE_FINGER_BENT): Phase.LOCKED,
        (Phase.LOCKED, EventKind.MIDDLE_FINGER_STRAIGHTENED): Phase.LOCKED,
        (Phase.LOCKED, EventKind.SLOT_TOUCHED): Phase.IDLE,  # populated slot
        (Phase.LOCKED, EventKind.CANCEL): Phase.IDLE,
    }
    for phase, kind in itertools.product(Phase, EventKind):
        event = (
            SelectionEvent(kind, 0) if kind is EventKind.SLOT_TOUCHED else SelectionEvent(kind)
        )
        result = step_state(states[phase], event, live)
        assert result.state.phase is expected_phase[(phase, kind)], (phase, kind)
        emitted = result.selected_id is not None
        assert emitted == (phase is Phase.LOCKED and kind is EventKind.SLOT_TOUCHED)
        if emitted:
            assert result.state.phase is Phase.IDLE


def test_random_sequences_preserve_invariants(rng):
    for _ in range(1000):
        state = SelectionState()
        live = live_result(*rng.integers(0, 50, size=int(rng.integers(0, 5))).tolist()) \
            if rng.random() > 0.2 else ProximityResult((), 4)
        for _ in range(int(rng.integers(1, 12))):
            kind = EVENTS[int(rng.integers(len(EVENTS)))]
            result = step_state(state, kind, live)
            state = result.state
            # invariants: frozen present iff locked; outcomes only from locked
            assert (state.frozen is not None) == (state.phase is Phase.LOCKED)
            if result.selected_id is not None:
                assert state.phase is Phase.IDLE


def test_frozen_snapshot_is_value_semantics():
    live_entries = [entry(1), entry(2)]
    live = ProximityResult(tuple(live_entries), 4)
    state = locked_state(live)
    # rebuilding live with different content must not affect the snapshot
    assert [e.object_id for e in state.frozen.ranked] == [1, 2]
    live2 = live_result(8, 9)
    result = step_state(state, SelectionEvent(EventKind.SLOT_TOUCHED, 0), live2)
    assert result.selected_id == 1


def test_event_validation():
    with pytest.raises(ValueError):
        SelectionEvent(EventKind.SLOT_TOUCHED)
    with pytest.raises(ValueError):
        SelectionEvent(EventKind.SLOT_TOUCHED, 4)
    with pytest.raises(ValueError):
        SelectionEvent(EventKind.CANCEL, 1)
    with pytest.raises(ValueError):
        SelectionState(Phase.LOCKED, None)
    with pytest.raises(ValueError):
        SelectionState(Phase.IDLE, live_result(1))


# --- mid-air hit rule ----------------------------------------------------------


def test_hit_single_sphere():
    line = straight_line()
    sphere = SceneObject(id=5, position=(0.0, 0.0, 2.0), radius=0.1)
    assert ray_hit_select(line, [sphere]) == 5


def test_hit_first_along_ray():
    line = straight_line()
    near = SceneObject(id=9, position=(0.0, 0.0, 0.7), radius=0.1)  # segment 3
    far = SceneObject(id=1, position=(0.0, 0.0, 1.9), radius=0.1)  # segment 9
    assert ray_hit_select(line, [near, far]) == 9


def test_hit_miss_returns_none():
    line = straight_line()
    sphere = SceneObject(id=5, position=(1.0, 0.0, 2.0), radius=0.1)
    assert ray_hit_select(line, [sphere]) is None
    assert ray_hit_select(line, []) is None
