#!/usr/bin/env python3

# # Walking a protocol tree by hand
#
# The bundled blood-draw protocol is a single Sequence: gather equipment,
# confirm the patient is ready, find a vein, then do the draw. The
# interesting part is the vein search — a Selector that tries the left
# arm first and only moves to the right arm if the left fails.
#
# This script runs the tree three ways: scripted outcomes for both vein
# checks, a deliberate double failure, and a Monte-Carlo estimate of how
# often the whole procedure succeeds when each arm is a coin flip.

from caretree import (
    Engine,
    LeafBindings,
    Scripted,
    ConstantSuccess,
    Status,
    load_protocol,
    load_scenario,
    run_scenario,
    estimate_success_probability,
    serialize,
)

tree = load_protocol("blood-draw")
print(serialize(tree))

# Every leaf needs a binding before the engine will tick. Scripted bindings
# pop one outcome per attempt; the "*" default soaks up the routine steps.

happy_path = LeafBindings(
    {
        "patient_ready": Scripted([Status.SUCCESS]),
        "vein_left_arm": Scripted([Status.FAILURE]),
        "vein_right_arm": Scripted([Status.SUCCESS]),
        "*": ConstantSuccess(),
    }
)

engine = Engine(tree, happy_path)
status = engine.tick()
print("left arm fails, right arm rescues:", status.value)

# The trace records every node entry and return in tick order. Filtering to
# the two vein checks shows the Selector trying them left-to-right.

vein_ids = {n.id: n.name for n in tree.leaves() if n.name.startswith("vein_")}
for event in engine.trace:
    if event.node_id in vein_ids and event.status is not None:
        print(f"  t={event.time:g}  {vein_ids[event.node_id]} -> {event.status.value}")

# When both arms fail the Selector fails, which fails the Sequence, which
# fails the run. No needle goes anywhere near the patient.

both_fail = LeafBindings(
    {
        "vein_left_arm": Scripted([Status.FAILURE]),
        "vein_right_arm": Scripted([Status.FAILURE]),
        "*": ConstantSuccess(),
    }
)
engine = Engine(tree, both_fail)
print("both arms fail:", engine.tick().value)

inserted = [e for e in engine.trace if e.node_id in
            {n.id for n in tree.nodes.values() if n.name == "insert_needle"}]
print("needle events after the double failure:", len(inserted))

# Finally, treat each vein check as a fair coin. One rescue attempt lifts
# the success rate from 0.5 to 1 - 0.5*0.5 = 0.75, and the estimate should
# land close to that.

scenario = load_scenario(
    {
        "name": "coin-flip-veins",
        "protocol": "blood-draw",
        "bindings": {
            "vein_left_arm": {"type": "stochastic", "p": 0.5},
            "vein_right_arm": {"type": "stochastic", "p": 0.5},
            "*": {"type": "constant_success"},
        },
    }
)
estimate = estimate_success_probability(scenario, trials=4000, base_seed=1)
print(f"success probability with coin-flip veins: {estimate:.3f} (analytic 0.75)")
