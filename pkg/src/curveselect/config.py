"""One JSON config drives every command; unknown or malformed fields are
rejected with the offending field named, so a bad experiment file fails fast.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .gestures import DEFAULT_GAIN, DEFAULT_REACH
from .geometry import DEFAULT_SEGMENTS
from .selection import DEFAULT_SLOTS, DEFAULT_SLOT_FRACTIONS, ForearmFrame
from .sim import (
    ALL_TECHNIQUES,
    DEFAULT_BOUNDS,
    DEFAULT_CENTER,
    DEFAULT_ELBOW,
    DEFAULT_EYE,
    DEFAULT_OBJECT_COUNT,
    DEFAULT_OBJECT_RADIUS,
    DEFAULT_WRIST,
    Medium,
    NoiseModel,
    Paradigm,
    SceneConfig,
    Technique,
)

__all__ = ["ConfigError", "RunConfig", "load_config"]

DEFAULT_MASTER_SEED = 20240901
DEFAULT_PORT = 8080
DEFAULT_STATIC_DIR = "frontend/dist"


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, with defaults matching the library."""

    seed: int = DEFAULT_MASTER_SEED
    object_count: int = DEFAULT_OBJECT_COUNT
    bounds: tuple[float, float, float] = DEFAULT_BOUNDS
    center: tuple[float, float, float] = DEFAULT_CENTER
    object_radius: float = DEFAULT_OBJECT_RADIUS
    angular_sigma: float = 0.01
    flexion_sigma: float = 0.02
    noise_seed: Optional[int] = None
    techniques: tuple[Technique, ...] = ALL_TECHNIQUES
    participants: int = 24
    repeats: int = 30
    length: float = DEFAULT_REACH
    gain: float = DEFAULT_GAIN
    segments: int = DEFAULT_SEGMENTS
    slots: int = DEFAULT_SLOTS
    eye: tuple[float, float, float] = DEFAULT_EYE
    wrist: tuple[float, float, float] = DEFAULT_WRIST
    elbow: tuple[float, float, float] = DEFAULT_ELBOW
    slot_fractions: tuple[float, ...] = DEFAULT_SLOT_FRACTIONS
    port: int = DEFAULT_PORT
    static_dir: str = DEFAULT_STATIC_DIR
    scene_json: str = "scene.json"
    trials_csv: str = "trials.csv"
    summary_json: str = "summary.json"
    bench_json: Optional[str] = None
    bench_object_counts: tuple[int, ...] = (64, 10_000)
    bench_iterations: int = 200
    bench_segment_counts: tuple[int, ...] = (5, 10, 20, 40, 80)
    bench_curves: int = 16
    bench_dense_samples: int = 100_001

    def scene_config(self, seed: Optional[int] = None) -> SceneConfig:
        return SceneConfig(
            object_count=self.object_count,
            bounds=self.bounds,
            center=self.center,
            object_radius=self.object_radius,
            seed=self.seed if seed is None else seed,
        )

    def noise_model(self) -> NoiseModel:
        seed = self.noise_seed
        if seed is None:
            seed = (self.seed * 0x9E3779B9 + 1) % (1 << 63)  # derived, not magic per run
        return NoiseModel(
            angular_sigma=self.angular_sigma, flexion_sigma=self.flexion_sigma, seed=seed
        )

    def forearm_frame(self) -> ForearmFrame:
        return ForearmFrame(
            elbow=self.elbow, wrist=self.wrist, slot_fractions=self.slot_fractions
        )


def _require(condition: bool, field_name: str, message: str):
    if not condition:
        raise ConfigError(f"{field_name}: {message}")


def _number(raw, field_name: str, *, minimum=None, strict_min=None) -> float:
    if not isinstance(raw, (int, float)) or isinstance(raw, bool) or not math.isfinite(raw):
        raise ConfigError(f"{field_name}: expected a finite number, got {raw!r}")
    if minimum is not None and raw < minimum:
        raise ConfigError(f"{field_name}: must be >= {minimum}, got {raw}")
    if strict_min is not None and raw <= strict_min:
        raise ConfigError(f"{field_name}: must be > {strict_min}, got {raw}")
    return float(raw)


def _integer(raw, field_name: str, *, minimum=None) -> int:
    if not isinstance(raw, int) or isinstance(raw, bool):
        raise ConfigError(f"{field_name}: expected an integer, got {raw!r}")
    if minimum is not None and raw < minimum:
        raise ConfigError(f"{field_name}: must be >= {minimum}, got {raw}")
    return raw


def _triple(raw, field_name: str, *, positive: bool = False) -> tuple[float, float, float]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise ConfigError(f"{field_name}: expected three numbers, got {raw!r}")
    values = tuple(
        _number(v, f"{field_name}[{i}]", strict_min=0.0 if positive else None)
        for i, v in enumerate(raw)
    )
    return values


def _string(raw, field_name: str) -> str:
    if not isinstance(raw, str):
        raise ConfigError(f"{field_name}: expected a string, got {raw!r}")
    return raw


def _technique(raw, field_name: str) -> Technique:
    if not isinstance(raw, dict):
        raise ConfigError(f"{field_name}: expected an object with medium and paradigm")
    unknown = set(raw) - {"medium", "paradigm"}
    _require(not unknown, field_name, f"unknown keys {sorted(unknown)}")
    try:
        medium = Medium(_string(raw.get("medium"), f"{field_name}.medium"))
    except ValueError:
        raise ConfigError(
            f"{field_name}.medium: expected one of "
            f"{[m.value for m in Medium]}, got {raw.get('medium')!r}"
        )
    try:
        paradigm = Paradigm(_string(raw.get("paradigm"), f"{field_name}.paradigm"))
    except ValueError:
        raise ConfigError(
            f"{field_name}.paradigm: expected one of "
            f"{[p.value for p in Paradigm]}, got {raw.get('paradigm')!r}"
        )
    return Technique(medium, paradigm)


_SECTIONS = {
    "seed",
    "scene",
    "noise",
    "techniques",
    "participants",
    "repeats",
    "curve",
    "selection",
    "pose",
    "serve",
    "output",
    "bench",
}


def parse_config(data: dict, seed_override: Optional[int] = None) -> RunConfig:
    """Validate a parsed JSON document into a RunConfig."""
    if not isinstance(data, dict):
        raise ConfigError(f"config root: expected a JSON object, got {type(data).__name__}")
    unknown = set(data) - _SECTIONS
    _require(not unknown, "config root", f"unknown keys {sorted(unknown)}")

    kwargs: dict = {}

    if "seed" in data:
        kwargs["seed"] = _integer(data["seed"], "seed", minimum=0)
    if seed_override is not None:
        kwargs["seed"] = _integer(seed_override, "seed", minimum=0)

    scene = data.get("scene", {})
    if not isinstance(scene, dict):
        raise ConfigError("scene: expected an object")
    unknown = set(scene) - {"object_count", "bounds", "center", "object_radius"}
    _require(not unknown, "scene", f"unknown keys {sorted(unknown)}")
    if "object_count" in scene:
        kwargs["object_count"] = _integer(scene["object_count"], "scene.object_count", minimum=1)
    if "bounds" in scene:
        kwargs["bounds"] = _triple(scene["bounds"], "scene.bounds", positive=True)
    if "center" in scene:
        kwargs["center"] = _triple(scene["center"], "scene.center")
    if "object_radius" in scene:
        kwargs["object_radius"] = _number(
            scene["object_radius"], "scene.object_radius", strict_min=0.0
        )

    noise = data.get("noise", {})
    if not isinstance(noise, dict):
        raise ConfigError("noise: expected an object")
    unknown = set(noise) - {"angular_sigma", "flexion_sigma", "seed"}
    _require(not unknown, "noise", f"unknown keys {sorted(unknown)}")
    if "angular_sigma" in noise:
        kwargs["angular_sigma"] = _number(noise["angular_sigma"], "noise.angular_sigma", minimum=0.0)
    if "flexion_sigma" in noise:
        kwargs["flexion_sigma"] = _number(noise["flexion_sigma"], "noise.flexion_sigma", minimum=0.0)
    if "seed" in noise:
        kwargs["noise_seed"] = _integer(noise["seed"], "noise.seed", minimum=0)

    if "techniques" in data:
        raw = data["techniques"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("techniques: expected a non-empty list")
        kwargs["techniques"] = tuple(
            _technique(t, f"techniques[{i}]") for i, t in enumerate(raw)
        )

    if "participants" in data:
        kwargs["participants"] = _integer(data["participants"], "participants", minimum=1)
    if "repeats" in data:
        kwargs["repeats"] = _integer(data["repeats"], "repeats", minimum=1)

    curve = data.get("curve", {})
    if not isinstance(curve, dict):
        raise ConfigError("curve: expected an object")
    unknown = set(curve) - {"length", "gain", "segments"}
    _require(not unknown, "curve", f"unknown keys {sorted(unknown)}")
    if "length" in curve:
        kwargs["length"] = _number(curve["length"], "curve.length", strict_min=0.0)
    if "gain" in curve:
        kwargs["gain"] = _number(curve["gain"], "curve.gain", strict_min=0.0)
    if "segments" in curve:
        kwargs["segments"] = _integer(curve["segments"], "curve.segments", minimum=1)

    sel = data.get("selection", {})
    if not isinstance(sel, dict):
        raise ConfigError("selection: expected an object")
    unknown = set(sel) - {"slots", "slot_fractions"}
    _require(not unknown, "selection", f"unknown keys {sorted(unknown)}")
    if "slots" in sel:
        kwargs["slots"] = _integer(sel["slots"], "selection.slots", minimum=1)
    if "slot_fractions" in sel:
        raw = sel["slot_fractions"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("selection.slot_fractions: expected a non-empty list")
        kwargs["slot_fractions"] = tuple(
            _number(f, f"selection.slot_fractions[{i}]") for i, f in enumerate(raw)
        )

    pose = data.get("pose", {})
    if not isinstance(pose, dict):
        raise ConfigError("pose: expected an object")
    unknown = set(pose) - {"wrist", "elbow", "eye"}
    _require(not unknown, "pose", f"unknown keys {sorted(unknown)}")
    if "wrist" in pose:
        kwargs["wrist"] = _triple(pose["wrist"], "pose.wrist")
    if "elbow" in pose:
        kwargs["elbow"] = _triple(pose["elbow"], "pose.elbow")
    if "eye" in pose:
        kwargs["eye"] = _triple(pose["eye"], "pose.eye")

    serve = data.get("serve", {})
    if not isinstance(serve, dict):
        raise ConfigError("serve: expected an object")
    unknown = set(serve) - {"port", "static_dir"}
    _require(not unknown, "serve", f"unknown keys {sorted(unknown)}")
    if "port" in serve:
        kwargs["port"] = _integer(serve["port"], "serve.port", minimum=1)
    if "static_dir" in serve:
        kwargs["static_dir"] = _string(serve["static_dir"], "serve.static_dir")

    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output: expected an object")
    unknown = set(output) - {"scene_json", "trials_csv", "summary_json", "bench_json"}
    _require(not unknown, "output", f"unknown keys {sorted(unknown)}")
    if "scene_json" in output:
        kwargs["scene_json"] = _string(output["scene_json"], "output.scene_json")
    if "trials_csv" in output:
        kwargs["trials_csv"] = _string(output["trials_csv"], "output.trials_csv")
    if "summary_json" in output:
        kwargs["summary_json"] = _string(output["summary_json"], "output.summary_json")
    if "bench_json" in output:
        kwargs["bench_json"] = _string(output["bench_json"], "output.bench_json")

    bench = data.get("bench", {})
    if not isinstance(bench, dict):
        raise ConfigError("bench: expected an object")
    unknown = set(bench) - {"object_counts", "iterations", "segment_counts", "curves", "dense_samples"}
    _require(not unknown, "bench", f"unknown keys {sorted(unknown)}")
    if "object_counts" in bench:
        raw = bench["object_counts"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("bench.object_counts: expected a non-empty list")
        kwargs["bench_object_counts"] = tuple(
            _integer(c, f"bench.object_counts[{i}]", minimum=1) for i, c in enumerate(raw)
        )
    if "iterations" in bench:
        kwargs["bench_iterations"] = _integer(bench["iterations"], "bench.iterations", minimum=1)
    if "segment_counts" in bench:
        raw = bench["segment_counts"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("bench.segment_counts: expected a non-empty list")
        kwargs["bench_segment_counts"] = tuple(
            _integer(c, f"bench.segment_counts[{i}]", minimum=1) for i, c in enumerate(raw)
        )
    if "curves" in bench:
        kwargs["bench_curves"] = _integer(bench["curves"], "bench.curves", minimum=1)
    if "dense_samples" in bench:
        kwargs["bench_dense_samples"] = _integer(
            bench["dense_samples"], "bench.dense_samples", minimum=2
        )

    config = RunConfig(**kwargs)
    _require(
        config.slots <= len(config.slot_fractions),
        "selection.slots",
        f"needs {config.slots} slot fractions, got {len(config.slot_fractions)}",
    )
    try:
        config.scene_config()
        config.noise_model()
        config.forearm_frame()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return config


def load_config(path: Optional[str], seed_override: Optional[int] = None) -> RunConfig:
    """Load a config file (or defaults when *path* is None)."""
    if path is None:
        return parse_config({}, seed_override)
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file: {path} does not exist")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file: invalid JSON ({exc})") from exc
    return parse_config(data, seed_override)
