"""Reaching a target hidden behind a blocker.

A blocker sphere sits dead on the straight wrist-to-target line. The straight
ray pierces the blocker first every time; bending the ray sweeps it around the
blocker and onto the target. Saves a side-view plot when matplotlib is around.
"""

import numpy as np

from curveselect import SceneConfig, Scene, SceneObject, discretize, ray_hit_select
from curveselect.sim import (
    Medium,
    NoiseModel,
    Paradigm,
    Technique,
    DEFAULT_WRIST,
    _aim_bent_ray,
    _curve_from_frame,
    default_forearm_frame,
    default_pose_template,
    simulate_trial,
)

wrist = np.asarray(DEFAULT_WRIST)
target_pos = np.array([0.3, 1.5, 2.6])
blocker_pos = wrist + 0.5 * (target_pos - wrist)

config = SceneConfig(object_count=2, bounds=(3.4, 2.4, 3.4), center=(0.0, 1.3, 1.8),
                     object_radius=0.06, seed=0)
scene = Scene(
    (SceneObject(0, blocker_pos, 0.06, "blocker"), SceneObject(1, target_pos, 0.06, "target")),
    target_id=1,
    config=config,
)

pose = default_pose_template()
arm = default_forearm_frame()
quiet = NoiseModel(0.0, 0.0, seed=1)

straight = simulate_trial(Technique(Medium.MID_AIR, Paradigm.LINEAR_RAY), scene, quiet, pose, arm)
bent = simulate_trial(Technique(Medium.MID_AIR, Paradigm.BEZIER_CURVE), scene, quiet, pose, arm)

names = {0: "the BLOCKER", 1: "the TARGET", None: "nothing"}
print(f"straight ray selects {names[straight.selected_id]}")
print(f"bent ray selects     {names[bent.selected_id]} (kappa = {bent.kappa_used:.3f})")

# Re-derive the noiseless rays for inspection (same aimer the trials used).
u = (target_pos - wrist) / np.linalg.norm(target_pos - wrist)
straight_curve = _curve_from_frame(wrist, u, np.array([0.0, 1.0, 0.0]), 0.0, 4.0, 1.5)
va, vo, kappa = _aim_bent_ray(wrist, scene.target, scene.objects, length=4.0, gain=1.5, segments=20)
bent_curve = _curve_from_frame(wrist, va, vo, kappa, 4.0, 1.5)
print(f"\nstraight ray first pierces: object {ray_hit_select(discretize(straight_curve, 20), scene.objects)}")
print(f"bent ray first pierces:     object {ray_hit_select(discretize(bent_curve, 20), scene.objects)}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
else:
    from pathlib import Path

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for curve, style, label in ((straight_curve, "--", "straight ray"), (bent_curve, "-", "bent ray")):
        pts = discretize(curve, 40).samples
        ax.plot(pts[:, 2], pts[:, 1], style, label=label)
    for obj, color in ((scene.objects[0], "tab:red"), (scene.objects[1], "tab:green")):
        ax.add_patch(plt.Circle((obj.position[2], obj.position[1]), obj.radius,
                                color=color, alpha=0.6, label=obj.label))
    ax.plot([wrist[2]], [wrist[1]], "k^", label="wrist")
    ax.set_xlabel("depth z [m]")
    ax.set_ylabel("height y [m]")
    ax.set_aspect("equal")
    ax.legend(loc="upper left", fontsize=8)
    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)
    fig.savefig(out / "occlusion_bypass.png", dpi=130, bbox_inches="tight")
    print(f"\nwrote {out / 'occlusion_bypass.png'}")
