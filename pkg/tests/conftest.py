from __future__ import annotations

import math

import numpy as np
import pytest

from curveselect.geometry import QuadBezier, vec3
from curveselect.gestures import CurveParams, HandPose, build_curve


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation matrix (QR of a Gaussian, sign-fixed)."""
    m = rng.normal(size=(3, 3))
    q, r = np.linalg.qr(m)
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]
    return q


def random_pose(rng: np.random.Generator, wrist_scale: float = 1.0) -> HandPose:
    rot = random_rotation(rng)
    wrist = rng.uniform(-wrist_scale, wrist_scale, 3)
    finger = 0.18
    return HandPose(
        wrist=wrist,
        fingertip_extended=wrist + finger * rot[:, 0],
        fingertip_current=wrist + rng.uniform(0.0, finger) * rot[:, 0],
        v_align=rot[:, 0],
        v_ortho=rot[:, 1],
    )


def random_bent_curve(rng: np.random.Generator) -> QuadBezier:
    """Curve from a random pose with clearly nonzero curvature, so chord
    error bounds stay well above dense-sampling resolution."""
    pose = random_pose(rng)
    params = CurveParams(
        kappa=float(rng.uniform(0.05, 1.5)), length=float(rng.uniform(2.0, 6.0))
    )
    return build_curve(pose, params)


def random_control_curve(rng: np.random.Generator, scale: float = 2.0) -> QuadBezier:
    """Curve from three independent random control points."""
    return QuadBezier(
        rng.uniform(-scale, scale, 3),
        rng.uniform(-scale, scale, 3),
        rng.uniform(-scale, scale, 3),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
