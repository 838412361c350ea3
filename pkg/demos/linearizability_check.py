# Record a small concurrent history and ask whether it is linearizable.
#
#     python3 demos/linearizability_check.py

import random

from congraph.acceptance import record_history
from congraph.lincheck import History, Event, check_linearizable

rng = random.Random(2)
history, initial = record_history(rng, die=True)
print(f"recorded {len(history.events)} events from {len({e.tid for e in history.events})} threads")
print(history.dumps().splitlines()[0])

verdict = check_linearizable(history, initial)
print("linearizable:", verdict.linearizable, f"({verdict.explored} states explored)")
for op in verdict.witness:
    print("  ", op.tid, op.op, op.args, "->", op.ret)

# A history that no ordering can explain: 7 is seen before anyone adds it.
bad = History([
    Event(0, 1, "containsVertex", (7,), "invoke", None, 0),
    Event(1, 1, "containsVertex", (7,), "response", True, 1),
    Event(2, 2, "addVertex", (7,), "invoke", None, 2),
    Event(3, 2, "addVertex", (7,), "response", True, 3),
])
print("contains-before-add history linearizable:", check_linearizable(bad).linearizable)
