"""Quadratic Bezier primitives: evaluation, chord discretization, and
point-to-polyline distance queries.

All geometry is 64-bit. Vectors are numpy float64 arrays of shape (3,);
helpers accept any array-like and validate finiteness on the way in. The
scalar and batched code paths share the same component-wise arithmetic, so
a brute-force reference loop reproduces library results bit for bit.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Vec3",
    "QuadBezier",
    "Polyline",
    "SegmentProjection",
    "DEFAULT_SEGMENTS",
    "DEGENERATE_SEGMENT_LENGTH",
    "as_vec3",
    "vec3",
    "norm",
    "distance",
    "unit",
    "perpendicular_unit",
    "evaluate_bezier",
    "discretize",
    "project_point_to_segment",
    "min_distance_to_polyline",
    "chord_error_bound",
    "chord_deviation",
]

Vec3 = np.ndarray  # shape (3,), float64, read-only when stored in a type below

#: Chord count used to approximate the selection ray.
DEFAULT_SEGMENTS = 20

#: Segments shorter than this are treated as degenerate points.
DEGENERATE_SEGMENT_LENGTH = 1e-12
_DEGENERATE_LENGTH_SQ = DEGENERATE_SEGMENT_LENGTH * DEGENERATE_SEGMENT_LENGTH


def value_eq(self, other) -> bool:
    """Field-wise dataclass equality that understands ndarray fields."""
    if other.__class__ is not self.__class__:
        return NotImplemented
    for f in dataclasses.fields(self):
        a = getattr(self, f.name)
        b = getattr(other, f.name)
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            if not np.array_equal(a, b):
                return False
        elif a != b:
            return False
    return True


def as_vec3(value) -> Vec3:
    """Coerce *value* to an immutable float64 vector of shape (3,).

    Raises ValueError on wrong shape or non-finite components; no NaN/Inf is
    admitted into any public operation.
    """
    v = np.asarray(value, dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector component in {v!r}")
    v = v.copy()
    v.flags.writeable = False
    return v


def vec3(x: float, y: float, z: float) -> Vec3:
    return as_vec3((x, y, z))


def norm(v) -> float:
    x, y, z = float(v[0]), float(v[1]), float(v[2])
    return math.sqrt(x * x + y * y + z * z)


def distance(a, b) -> float:
    dx = float(a[0]) - float(b[0])
    dy = float(a[1]) - float(b[1])
    dz = float(a[2]) - float(b[2])
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def unit(v) -> Vec3:
    """Unit vector along *v*; raises on (near-)zero input."""
    n = norm(v)
    if n <= DEGENERATE_SEGMENT_LENGTH:
        raise ValueError("cannot normalize a zero-length vector")
    return as_vec3((v[0] / n, v[1] / n, v[2] / n))


def perpendicular_unit(v) -> Vec3:
    """A deterministic unit vector perpendicular to *v*.

    Prefers the world-up direction projected off *v*; falls back to +x when
    *v* is itself nearly vertical.
    """
    u = unit(v)
    for ref in ((0.0, 1.0, 0.0), (1.0, 0.0, 0.0)):
        r = np.asarray(ref)
        w = r - (r[0] * u[0] + r[1] * u[1] + r[2] * u[2]) * u
        if norm(w) > 1e-6:
            return unit(w)
    raise ValueError("no perpendicular found")  # unreachable for unit input


@dataclass(frozen=True, eq=False)
class QuadBezier:
    """Bounded quadratic curve: start point, control point, end point."""

    p0: Vec3
    p1: Vec3
    p2: Vec3

    def __post_init__(self):
        object.__setattr__(self, "p0", as_vec3(self.p0))
        object.__setattr__(self, "p1", as_vec3(self.p1))
        object.__setattr__(self, "p2", as_vec3(self.p2))

    __eq__ = value_eq


@dataclass(frozen=True, eq=False)
class Polyline:
    """Ordered chord samples of a curve: n segments, n+1 points."""

    samples: np.ndarray  # shape (n+1, 3)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != 3 or s.shape[0] < 2:
            raise ValueError(f"polyline needs shape (n+1, 3) with n >= 1, got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("non-finite polyline sample")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        """Segment count."""
        return self.samples.shape[0] - 1

    __eq__ = value_eq


@dataclass(frozen=True, eq=False)
class SegmentProjection:
    """Closest point on a segment: clamped parameter, point, distance."""

    lam: float
    point: Vec3
    distance: float

    def __post_init__(self):
        object.__setattr__(self, "point", as_vec3(self.point))

    __eq__ = value_eq


def evaluate_bezier(curve: QuadBezier, t: float) -> Vec3:
    """Point on the curve at parameter t.

    The selection ray is bounded: t outside [0, 1] raises ValueError rather
    than extrapolating.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    u = 1.0 - t
    return u * u * curve.p0 + (2.0 * u * t) * curve.p1 + (t * t) * curve.p2


def discretize(curve: QuadBezier, n: int = DEFAULT_SEGMENTS) -> Polyline:
    """Sample the curve at i/n for i = 0..n into an n-segment polyline."""
    n = int(n)
    if n < 1:
        raise ValueError(f"segment count must be >= 1, got {n}")
    ts = np.arange(n + 1, dtype=np.float64) / float(n)
    u = 1.0 - ts
    samples = (
        (u * u)[:, None] * curve.p0
        + (2.0 * u * ts)[:, None] * curve.p1
        + (ts * ts)[:, None] * curve.p2
    )
    return Polyline(samples)


def project_point_to_segment(o, a, b) -> SegmentProjection:
    """Orthogonally project *o* onto the segment [a, b].

    The segment parameter is clamped to [0, 1] so the result is a true
    segment distance, not a distance to the infinite carrier line. Segments
    shorter than DEGENERATE_SEGMENT_LENGTH collapse to their start point
    (lam = 0) instead of raising.
    """
    o = as_vec3(o)
    a = as_vec3(a)
    b = as_vec3(b)
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    dz = b[2] - a[2]
    len2 = dx * dx + dy * dy + dz * dz
    if len2 <= _DEGENERATE_LENGTH_SQ:
        lam = 0.0
        px, py, pz = a[0], a[1], a[2]
    else:
        lam = ((o[0] - a[0]) * dx + (o[1] - a[1]) * dy + (o[2] - a[2]) * dz) / len2
        lam = 0.0 if lam < 0.0 else (1.0 if lam > 1.0 else float(lam))
        px = a[0] + lam * dx
        py = a[1] + lam * dy
        pz = a[2] + lam * dz
    ex = o[0] - px
    ey = o[1] - py
    ez = o[2] - pz
    dist = math.sqrt(ex * ex + ey * ey + ez * ez)
    return SegmentProjection(lam=float(lam), point=(px, py, pz), distance=float(dist))


def _project_points_to_polyline(points: np.ndarray, samples: np.ndarray):
    """Project each of N points onto each of M chords.

    Returns (lam, proj, dist) of shapes (N, M), (N, M, 3), (N, M). The
    component-wise arithmetic deliberately mirrors project_point_to_segment
    so both paths agree bit for bit.
    """
    a = samples[:-1]
    b = samples[1:]
    d = b - a  # (M, 3)
    len2 = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]
    degenerate = len2 <= _DEGENERATE_LENGTH_SQ
    safe_len2 = np.where(degenerate, 1.0, len2)
    ap = points[:, None, :] - a[None, :, :]  # (N, M, 3)
    dot = ap[:, :, 0] * d[:, 0] + ap[:, :, 1] * d[:, 1] + ap[:, :, 2] * d[:, 2]
    lam = np.clip(dot / safe_len2, 0.0, 1.0)
    lam = np.where(degenerate, 0.0, lam)
    proj = a[None, :, :] + lam[:, :, None] * d[None, :, :]
    e = points[:, None, :] - proj
    dist = np.sqrt(e[:, :, 0] * e[:, :, 0] + e[:, :, 1] * e[:, :, 1] + e[:, :, 2] * e[:, :, 2])
    return lam, proj, dist


def min_distance_to_polyline(o, line: Polyline) -> tuple[float, SegmentProjection, int]:
    """Minimum distance from *o* to the polyline.

    Returns (d_min, winning projection, segment index); ties go to the
    lowest segment index.
    """
    point = as_vec3(o)
    lam, proj, dist = _project_points_to_polyline(point[None, :], line.samples)
    i = int(np.argmin(dist[0]))  # first occurrence -> lowest segment index on ties
    best = SegmentProjection(
        lam=float(lam[0, i]), point=proj[0, i], distance=float(dist[0, i])
    )
    return best.distance, best, i


def chord_error_bound(curve: QuadBezier, n: int) -> float:
    """Upper bound on the deviation between the curve and its n-chord polyline.

    A quadratic has constant second derivative 2*(p0 - 2*p1 + p2); linear
    interpolation across a parameter step of 1/n is therefore off by at most
    |p0 - 2*p1 + p2| / (4*n^2), attained at chord midpoints.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"segment count must be >= 1, got {n}")
    w = curve.p0 - 2.0 * curve.p1 + curve.p2
    return norm(w) / (4.0 * n * n)


def chord_deviation(curve: QuadBezier, n: int, num_samples: int = 100_001) -> float:
    """Measured counterpart of chord_error_bound.

    Sweeps num_samples uniform parameters and reports the largest gap between
    the curve and the parameter-matched point on its n-chord polyline.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"segment count must be >= 1, got {n}")
    line = discretize(curve, n)
    ts = np.linspace(0.0, 1.0, num_samples)
    u = 1.0 - ts
    pts = (
        (u * u)[:, None] * curve.p0
        + (2.0 * u * ts)[:, None] * curve.p1
        + (ts * ts)[:, None] * curve.p2
    )
    seg = np.minimum((ts * n).astype(np.int64), n - 1)
    local = ts * n - seg
    s = line.samples
    interp = s[seg] + local[:, None] * (s[seg + 1] - s[seg])
    gaps = np.linalg.norm(pts - interp, axis=1)
    return float(gaps.max())
