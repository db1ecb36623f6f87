"""Session-oriented playground protocol over WebSocket JSON frames.

Client messages (field `type`):

    new_session  {seed?}                       -> session
    set_pose     {wrist?, v_align?, v_ortho?,  -> frame
                  flexion?, length?}
    set_paradigm {paradigm: linear|bezier}     -> frame
    event        {kind: bend|straighten|       -> state (+ selection payload)
                  slot_touched|cancel, slot?}

Server messages: `session` (scene + parameters), `frame` (21 curve samples,
ranked objects, forearm slots, phase), `state` (phase, optional selection,
optional soft_error), `error` (code bad_message | no_session). A malformed
message never changes session state. While the selection is locked, `frame`
carries the frozen ranking and slots; the live ranking resumes after the
selection resolves.

handle_message is a pure function of (session, message), so the whole
protocol is testable without a socket; the FastAPI app is a thin shell that
owns one session per connection and applies messages in arrival order.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse

from .config import RunConfig
from .geometry import Polyline, as_vec3, discretize
from .gestures import CurveParams, FlexionMeasure, HandPose, build_curve, curvature_from_flexion
from .selection import (
    EventKind,
    Phase,
    ProximityResult,
    SelectionEvent,
    SelectionState,
    project_to_forearm,
    rank_objects,
    step_state,
)
from .sim import FINGER_LENGTH, Scene, generate_scene

__all__ = ["SessionState", "handle_message", "create_app"]


@dataclass(frozen=True)
class SessionState:
    """Everything one playground session owns; selection invariants hold at
    every message boundary."""

    session_id: str
    scene: Scene
    config: RunConfig
    wrist: tuple
    v_align: tuple
    v_ortho: tuple
    flexion: float
    length: float
    paradigm: str  # "linear" | "bezier"
    selection: SelectionState
    live: ProximityResult


def _error(code: str) -> dict:
    return {"type": "error", "code": code}


def _vec(value) -> list[float]:
    return [float(value[0]), float(value[1]), float(value[2])]


def _parse_vec(raw, name: str):
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise ValueError(f"{name} must be a 3-element array")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise ValueError(f"{name} must contain numbers")
    return as_vec3([float(v) for v in raw])


def _pose_of(session: SessionState) -> HandPose:
    wrist = as_vec3(session.wrist)
    v_align = as_vec3(session.v_align)
    return HandPose(
        wrist=wrist,
        fingertip_extended=wrist + FINGER_LENGTH * v_align,
        fingertip_current=wrist + (FINGER_LENGTH * (1.0 - session.flexion)) * v_align,
        v_align=v_align,
        v_ortho=as_vec3(session.v_ortho),
    )


def _kappa_of(session: SessionState) -> float:
    if session.paradigm == "linear":
        return 0.0
    measure = FlexionMeasure(l_straight=1.0, l_bent=1.0 - session.flexion)
    return curvature_from_flexion(measure, session.config.gain)


def _polyline_of(session: SessionState) -> Polyline:
    kappa = _kappa_of(session)
    curve = build_curve(
        _pose_of(session),
        CurveParams(kappa=kappa, length=session.length, gain=session.config.gain),
    )
    return discretize(curve, session.config.segments)


def _rank_live(session: SessionState) -> ProximityResult:
    return rank_objects(_polyline_of(session), session.scene.objects, session.config.slots)


def _ranked_payload(result: ProximityResult) -> list[dict]:
    return [
        {
            "object_id": e.object_id,
            "d_min": e.d_min,
            "projection": _vec(e.projection),
            "segment_index": e.segment_index,
            "lambda": e.lam,
        }
        for e in result.ranked
    ]


def _frame_payload(session: SessionState) -> dict:
    line = _polyline_of(session)
    shown = (
        session.selection.frozen
        if session.selection.phase is Phase.LOCKED
        else session.live
    )
    slots = project_to_forearm(shown, session.config.forearm_frame())
    return {
        "type": "frame",
        "curve_samples": [_vec(p) for p in line.samples],
        "ranked": _ranked_payload(shown),
        "slots": [
            {"slot_index": s.slot_index, "object_id": s.object_id, "slot_center": _vec(s.slot_center)}
            for s in slots
        ],
        "phase": session.selection.phase.value,
        "kappa": _kappa_of(session),
        "paradigm": session.paradigm,
    }


def _scene_payload(scene: Scene) -> dict:
    return {
        "objects": [
            {
                "id": o.id,
                "position": _vec(o.position),
                "radius": o.radius,
                "label": o.label,
            }
            for o in scene.objects
        ],
        "target_id": scene.target_id,
    }


_EVENT_KINDS = {
    "bend": EventKind.MIDDLE_FINGER_BENT,
    "straighten": EventKind.MIDDLE_FINGER_STRAIGHTENED,
    "slot_touched": EventKind.SLOT_TOUCHED,
    "cancel": EventKind.CANCEL,
}


def _new_session(msg: dict, config: RunConfig) -> tuple[SessionState, dict]:
    seed = msg.get("seed", config.seed)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValueError("seed must be a non-negative integer")
    scene = generate_scene(config.scene_config(seed))
    session = SessionState(
        session_id=uuid.uuid4().hex,
        scene=scene,
        config=config,
        wrist=tuple(config.wrist),
        v_align=(0.0, 0.0, 1.0),
        v_ortho=(0.0, 1.0, 0.0),
        flexion=0.0,
        length=config.length,
        paradigm="bezier",
        selection=SelectionState(),
        live=ProximityResult((), config.slots),
    )
    session = replace(session, live=_rank_live(session))
    reply = {
        "type": "session",
        "session_id": session.session_id,
        "scene": _scene_payload(scene),
        "params": {
            "gain": config.gain,
            "length": session.length,
            "segments": config.segments,
            "slots": config.slots,
            "paradigm": session.paradigm,
        },
        "phase": session.selection.phase.value,
    }
    return session, reply


def _set_pose(session: SessionState, msg: dict) -> tuple[SessionState, dict]:
    allowed = {"type", "wrist", "v_align", "v_ortho", "flexion", "length"}
    unknown = set(msg) - allowed
    if unknown:
        raise ValueError(f"unknown fields {sorted(unknown)}")
    updates: dict = {}
    if "wrist" in msg:
        updates["wrist"] = tuple(_parse_vec(msg["wrist"], "wrist"))
    if "v_align" in msg:
        updates["v_align"] = tuple(_parse_vec(msg["v_align"], "v_align"))
    if "v_ortho" in msg:
        updates["v_ortho"] = tuple(_parse_vec(msg["v_ortho"], "v_ortho"))
    if "flexion" in msg:
        flexion = msg["flexion"]
        if not isinstance(flexion, (int, float)) or isinstance(flexion, bool):
            raise ValueError("flexion must be a number")
        if not 0.0 <= flexion <= 1.0:
            raise ValueError("flexion must lie in [0, 1]")
        updates["flexion"] = float(flexion)
    if "length" in msg:
        length = msg["length"]
        if not isinstance(length, (int, float)) or isinstance(length, bool) or length <= 0.0:
            raise ValueError("length must be a positive number")
        updates["length"] = float(length)

    candidate = replace(session, **updates)
    candidate = replace(candidate, live=_rank_live(candidate))  # raises on a bad frame
    return candidate, _frame_payload(candidate)


def _set_paradigm(session: SessionState, msg: dict) -> tuple[SessionState, dict]:
    paradigm = msg.get("paradigm")
    if paradigm not in ("linear", "bezier"):
        raise ValueError("paradigm must be linear or bezier")
    candidate = replace(session, paradigm=paradigm)
    candidate = replace(candidate, live=_rank_live(candidate))
    return candidate, _frame_payload(candidate)


def _apply_event(session: SessionState, msg: dict) -> tuple[SessionState, dict]:
    kind_raw = msg.get("kind")
    if kind_raw not in _EVENT_KINDS:
        raise ValueError(f"unknown event kind {kind_raw!r}")
    slot = msg.get("slot")
    if slot is not None and (not isinstance(slot, int) or isinstance(slot, bool)):
        raise ValueError("slot must be an integer")
    event = SelectionEvent(_EVENT_KINDS[kind_raw], slot_index=slot)
    result = step_state(session.selection, event, session.live)
    candidate = replace(session, selection=result.state)
    reply: dict = {"type": "state", "phase": result.state.phase.value}
    if result.selected_id is not None:
        reply["selection"] = {
            "object_id": result.selected_id,
            "is_target": result.selected_id == session.scene.target_id,
        }
    if result.soft_error is not None:
        reply["soft_error"] = result.soft_error
    return candidate, reply


def handle_message(
    session: Optional[SessionState], msg, config: RunConfig
) -> tuple[Optional[SessionState], dict]:
    """Apply one client message; returns (next session, reply).

    Malformed messages leave the session untouched and yield an error reply.
    """
    if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
        return session, _error("bad_message")
    kind = msg["type"]
    try:
        if kind == "new_session":
            return _new_session(msg, config)
        if session is None:
            return None, _error("no_session")
        if kind == "set_pose":
            return _set_pose(session, msg)
        if kind == "set_paradigm":
            return _set_paradigm(session, msg)
        if kind == "event":
            return _apply_event(session, msg)
    except ValueError:
        return session, _error("bad_message")
    return session, _error("bad_message")


_FALLBACK_INDEX = """<!doctype html>
<html><head><title>curveselect playground</title></head>
<body><h1>curveselect playground service</h1>
<p>The WebSocket protocol is live at <code>/ws</code>. Build the browser UI
(<code>cd frontend && npm install && npm run build</code>) and restart to
serve it here.</p></body></html>
"""


def create_app(config: RunConfig) -> FastAPI:
    """FastAPI app exposing /ws plus static UI files at /."""
    app = FastAPI(title="curveselect playground")

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        session: Optional[SessionState] = None
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError:
                    msg = None
                session, reply = handle_message(session, msg, config)
                await websocket.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            return

    static_dir = Path(config.static_dir)
    if static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    else:

        @app.get("/")
        async def index() -> HTMLResponse:
            return HTMLResponse(_FALLBACK_INDEX)

    return app
