"""Finger flexion to selection-ray mapping.

A pose supplies the wrist origin, an orthonormal forearm frame, and the
fingertip positions. Flexion shortens the wrist-to-fingertip distance, which
scales the curvature parameter; curvature and reach then place the control
and end points of the selection ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import QuadBezier, Vec3, as_vec3, distance, norm, value_eq

__all__ = [
    "DEFAULT_GAIN",
    "DEFAULT_REACH",
    "FRAME_TOLERANCE",
    "FlexionMeasure",
    "CurveParams",
    "HandPose",
    "straight_length",
    "curvature_from_flexion",
    "flexion_from_pose",
    "build_curve",
    "linear_ray",
]

#: Flexion-to-curvature gain; adjustable per session.
DEFAULT_GAIN = 1.5

#: Curve reach in meters; spans a seated scene at 2.5 m viewing depth.
DEFAULT_REACH = 4.0

#: Accepted drift from an orthonormal pose frame before rejection. Within
#: tolerance the frame is re-orthogonalized, since simulated poses accumulate
#: round-off.
FRAME_TOLERANCE = 1e-6


def _orthonormal_frame(v_align, v_ortho) -> tuple[Vec3, Vec3]:
    va = as_vec3(v_align)
    vo = as_vec3(v_ortho)
    na = norm(va)
    if abs(na - 1.0) > FRAME_TOLERANCE:
        raise ValueError(f"v_align must be unit length, |v|={na}")
    no = norm(vo)
    if abs(no - 1.0) > FRAME_TOLERANCE:
        raise ValueError(f"v_ortho must be unit length, |v|={no}")
    va = va / na
    d = float(va[0] * vo[0] + va[1] * vo[1] + va[2] * vo[2])
    if abs(d) > FRAME_TOLERANCE:
        raise ValueError(f"v_align and v_ortho must be orthogonal, dot={d}")
    vo = vo - d * va  # Gram-Schmidt against the (re)normalized axis
    vo = vo / norm(vo)
    return as_vec3(va), as_vec3(vo)


@dataclass(frozen=True)
class FlexionMeasure:
    """Wrist-to-fingertip distances: fully extended vs current.

    l_bent above l_straight (tracking jitter past full extension) clamps to
    l_straight so curvature never goes negative.
    """

    l_straight: float
    l_bent: float

    def __post_init__(self):
        ls = float(self.l_straight)
        lb = float(self.l_bent)
        if not math.isfinite(ls) or ls <= 0.0:
            raise ValueError(f"l_straight must be > 0, got {ls}")
        if not math.isfinite(lb) or lb < 0.0:
            raise ValueError(f"l_bent must be >= 0, got {lb}")
        object.__setattr__(self, "l_straight", ls)
        object.__setattr__(self, "l_bent", min(lb, ls))


@dataclass(frozen=True)
class CurveParams:
    """Curvature, reach, and the flexion gain that produced the curvature."""

    kappa: float
    length: float = DEFAULT_REACH
    gain: float = DEFAULT_GAIN

    def __post_init__(self):
        if not math.isfinite(self.kappa) or self.kappa < 0.0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not math.isfinite(self.length) or self.length <= 0.0:
            raise ValueError(f"length must be > 0, got {self.length}")
        if not math.isfinite(self.gain) or self.gain <= 0.0:
            raise ValueError(f"gain must be > 0, got {self.gain}")


@dataclass(frozen=True, eq=False)
class HandPose:
    """Wrist origin, fingertip positions, and the orthonormal forearm frame.

    v_align runs along the forearm axis, v_ortho is perpendicular to the hand
    plane. Frames within FRAME_TOLERANCE of orthonormal are accepted and
    re-orthogonalized; anything further off raises.
    """

    wrist: Vec3
    fingertip_extended: Vec3
    fingertip_current: Vec3
    v_align: Vec3
    v_ortho: Vec3

    def __post_init__(self):
        object.__setattr__(self, "wrist", as_vec3(self.wrist))
        object.__setattr__(self, "fingertip_extended", as_vec3(self.fingertip_extended))
        object.__setattr__(self, "fingertip_current", as_vec3(self.fingertip_current))
        if distance(self.fingertip_extended, self.wrist) <= 0.0:
            raise ValueError("fingertip_extended must not coincide with the wrist")
        va, vo = _orthonormal_frame(self.v_align, self.v_ortho)
        object.__setattr__(self, "v_align", va)
        object.__setattr__(self, "v_ortho", vo)

    __eq__ = value_eq


def straight_length(wrist, fingertip) -> float:
    """Euclidean wrist-to-fingertip distance; 0 for coincident points."""
    return distance(wrist, fingertip)


def curvature_from_flexion(m: FlexionMeasure, gain: float = DEFAULT_GAIN) -> float:
    """Curvature from normalized flexion: gain * (l_straight - l_bent) / l_straight.

    Result lies in [0, gain] for any valid measure.
    """
    if gain <= 0.0:
        raise ValueError(f"gain must be > 0, got {gain}")
    return gain * ((m.l_straight - m.l_bent) / m.l_straight)


def flexion_from_pose(pose: HandPose) -> FlexionMeasure:
    return FlexionMeasure(
        l_straight=straight_length(pose.wrist, pose.fingertip_extended),
        l_bent=straight_length(pose.wrist, pose.fingertip_current),
    )


def build_curve(pose: HandPose, params: CurveParams) -> QuadBezier:
    """Selection ray from a pose: the start point sits at the wrist, the
    control point at (1 + kappa)/2 of the reach along the forearm axis, and
    the end point at full reach plus kappa * reach off-axis."""
    va, vo = _orthonormal_frame(pose.v_align, pose.v_ortho)
    k = params.kappa
    length = params.length
    p0 = pose.wrist
    p1 = p0 + va * (0.5 * (1.0 + k) * length)
    p2 = p0 + length * va + (k * length) * vo
    return QuadBezier(p0, p1, p2)


def linear_ray(pose: HandPose, length: float = DEFAULT_REACH) -> QuadBezier:
    """Straight selection ray, returned in curve form so downstream queries
    are paradigm-agnostic. Identical to build_curve with kappa = 0."""
    return build_curve(pose, CurveParams(kappa=0.0, length=length))
