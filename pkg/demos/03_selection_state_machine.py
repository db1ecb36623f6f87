"""Walking the activate / lock / confirm gesture cycle.

Bending the right middle finger activates the live mapping; straightening it
locks the current four slots so the confirming hand can touch one without the
ranking shifting underneath it.
"""

from curveselect import (
    EventKind,
    ProximityResult,
    RankedObject,
    SelectionEvent,
    SelectionState,
    step_state,
)


def ranking(*ids):
    return ProximityResult(
        tuple(RankedObject(i, 0.05 * (n + 1), (0, 0, 0), 0, 0.0) for n, i in enumerate(ids)),
        k=4,
    )


state = SelectionState()
live = ranking(42, 7)  # only two objects near the ray right now
print(f"start phase: {state.phase.value}")

steps = [
    ("bend middle finger", SelectionEvent(EventKind.MIDDLE_FINGER_BENT)),
    ("straighten (locks slots)", SelectionEvent(EventKind.MIDDLE_FINGER_STRAIGHTENED)),
    ("touch unpopulated slot 3", SelectionEvent(EventKind.SLOT_TOUCHED, 3)),
    ("touch slot 1", SelectionEvent(EventKind.SLOT_TOUCHED, 1)),
]

for label, event in steps:
    if state.phase.value == "locked":
        # the live ranking drifts while locked; the frozen slots must not
        live = ranking(99, 98, 97, 96)
    result = step_state(state, event, live)
    state = result.state
    print(f"{label:28} -> phase {state.phase.value:7}", end="")
    if result.selected_id is not None:
        print(f"  SELECTED object {result.selected_id}", end="")
    if result.soft_error:
        print(f"  (soft error: {result.soft_error})", end="")
    print()

print()
print("The selection came from the frozen snapshot (object 7, rank 2 at lock")
print("time), not from the drifted live ranking.")
