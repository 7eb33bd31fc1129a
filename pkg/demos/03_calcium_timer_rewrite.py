#!/usr/bin/env python3

# # A monitoring cadence that rewrites itself
#
# The post-thyroidectomy calcium protocol runs two branches in parallel:
# the care pathway itself, and a periodic calcium check whose interval
# lives on the blackboard under the key `Tca`. The pathway starts the
# cadence at every 6 hours; if the patient turns symptomatic the pathway
# tightens it to every 2 hours — by writing the blackboard key, not by
# editing the tree.
#
# This scenario scripts exactly that: `Tca := 2h` lands at the 12-hour
# mark, and a critical lab value at hour 15 gives the monitor something
# to catch on its *new* schedule.

import json

from caretree import load_protocol, load_scenario, run_scenario
from caretree.corpus import corpus_dir
from caretree.trace import NODE_ENTERED

HOURS = 3600.0

tree = load_protocol("calcium-management")
scenario = load_scenario(
    json.loads((corpus_dir() / "calcium_management_tca.scenario.json").read_text())
)
result = run_scenario(scenario, tree=tree)
print(f"run ended {result.status.value} at t={result.time / HOURS:g}h "
      f"after {result.ticks} ticks")

# Pull the times the calcium check actually ran out of the trace. The
# first two fires honor the 6-hour default; the third lands at 14h —
# two hours after the rewrite — and the fourth at 16h.

check_ids = {n.id for n in tree.nodes.values() if n.name == "check_total_ca"}
fires = [e.time / HOURS for e in result.trace
         if e.kind == NODE_ENTERED and e.node_id in check_ids]
print("calcium checks at hours:", fires)

# The blackboard writes tell the other half of the story. `Tca` is the
# cadence itself; `Ca` is the lab value the check reads.

for event in result.trace:
    if event.kind == "blackboard_write" and event.key in ("Tca", "Ca"):
        print(f"  t={event.time / HOURS:>4g}h  {event.key} := {event.value}")

# Nothing in the tree changed between the Q6h and Q2h phases. The timer
# re-reads its period from the blackboard every time it reschedules, so
# care escalation is just another write — same mechanism the monitor
# itself uses to record trends.
