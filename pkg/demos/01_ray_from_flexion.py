"""How finger flexion bends the selection ray.

A simulated hand holds its forearm axis along +z. As the index finger bends,
the wrist-to-fingertip distance shrinks, curvature grows linearly with the
normalized flexion, and the ray's control and end points move off-axis.
"""

import numpy as np

from curveselect import (
    CurveParams,
    FlexionMeasure,
    HandPose,
    build_curve,
    curvature_from_flexion,
    discretize,
)

FINGER = 0.18  # wrist-to-fingertip, fully extended, meters

pose = HandPose(
    wrist=(0.0, 1.1, 0.2),
    fingertip_extended=(0.0, 1.1, 0.2 + FINGER),
    fingertip_current=(0.0, 1.1, 0.2 + FINGER),
    v_align=(0.0, 0.0, 1.0),
    v_ortho=(0.0, 1.0, 0.0),
)

print("flexion  l_bent[m]  kappa   control point            end point")
for flexion in (0.0, 0.25, 0.5, 0.75, 1.0):
    l_bent = FINGER * (1.0 - flexion)
    kappa = curvature_from_flexion(FlexionMeasure(FINGER, l_bent), gain=1.5)
    curve = build_curve(pose, CurveParams(kappa=kappa, length=4.0, gain=1.5))
    p1 = np.round(curve.p1, 3)
    p2 = np.round(curve.p2, 3)
    print(f"  {flexion:4.2f}    {l_bent:6.3f}   {kappa:5.3f}  {str(p1):24} {p2}")

print()
print("A fully bent finger (flexion 1.0) yields kappa = 1.5: the ray tip")
print("swings 1.5 * reach off the forearm axis while still starting at the wrist.")

curve = build_curve(pose, CurveParams(kappa=1.5, length=4.0))
line = discretize(curve, 20)
print(f"\nDiscretized ray ({line.n} chords): first, middle, last samples")
for i in (0, 10, 20):
    print(f"  t={i/20:4.2f}  {np.round(line.samples[i], 3)}")
