"""A pocket-size version of the full study block.

Four synthetic participants run all four techniques over five scenes each;
every trial derives its own noise stream from the block seed, so rerunning
this script reproduces the table bit for bit.
"""

from curveselect import ALL_TECHNIQUES, NoiseModel, run_block
from curveselect.sim import derive_scene_seeds

PARTICIPANTS = 4
REPEATS = 5

seeds = derive_scene_seeds(777, PARTICIPANTS * REPEATS)
result = run_block(
    seeds,
    ALL_TECHNIQUES,
    repeats=REPEATS,
    participants=PARTICIPANTS,
    noise=NoiseModel(angular_sigma=0.01, flexion_sigma=0.02, seed=99),
)

print(f"trials: {result.summary['trials']} "
      f"({PARTICIPANTS} participants x {len(ALL_TECHNIQUES)} techniques x {REPEATS} repeats)\n")
print(f"{'technique':<24}{'capture':>9}{'error':>9}{'mean rank':>11}{'mean d_min':>12}")
for label, m in result.summary["techniques"].items():
    fmt = lambda v, spec=".2f": "-" if v is None else format(v, spec)
    print(f"{label:<24}{fmt(m['capture_rate']):>9}{fmt(m['error_rate']):>9}"
          f"{fmt(m['mean_target_rank']):>11}{fmt(m['mean_d_min'], '.4f'):>12}")

print("\nfirst three trial rows:")
for row in result.rows[:3]:
    r = row.record
    print(f"  participant {row.participant}, repeat {row.repeat}, {r.technique.label}: "
          f"captured={r.captured} selected={r.selected_id} kappa={r.kappa_used:.3f}")

print("\nFor the full 2,880-trial block with CSV/JSON outputs run:")
print("  curveselect simulate --out trials.csv")
