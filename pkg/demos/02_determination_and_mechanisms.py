"""Determination, effectiveness, invariance, and mechanism discovery.

Determination is a functional dependency between outcome variables under
a given action word; a mechanism is a determination that additionally
survives later actions.  This script shows the checkers certifying and
refuting both, always with concrete witnesses or counterexamples.
"""

from causalground import (
    ActionModel,
    FactoredSpace,
    FiniteSet,
    TotalMap,
    check_determination,
    check_effectiveness,
    check_invariance,
    discover_mechanisms,
)

# Four states; variable "b" copies variable "a" in all of them, so a
# determination a -> b holds with a unique identity witness.
states = FiniteSet("X", ("s1", "s2", "s3", "s4"))
space = FactoredSpace(
    (("a", FiniteSet("a", ("0", "1"))), ("b", FiniteSet("b", ("0", "1"))))
)
process = TotalMap(
    states, space.total,
    {"s1": "0|0", "s2": "1|1", "s3": "0|0", "s4": "1|1"},
)
scramble = TotalMap(states, states, {"s1": "s1", "s2": "s2", "s3": "s4", "s4": "s3"})
model = ActionModel(states, space, {"scramble": scramble}, process)

result = check_determination(model, (), ("a",), ("b",))
print("b determined by a:", result.holds, "unique:", result.unique)
print("witness table:", result.witness.table)

# Break the copy relation by editing one process entry.
broken = TotalMap(
    states, space.total,
    {"s1": "0|0", "s2": "1|1", "s3": "0|1", "s4": "1|1"},
)
broken_model = ActionModel(states, space, {"scramble": scramble}, broken)
result = check_determination(broken_model, (), ("a",), ("b",))
print("after the edit:", result.holds, "counterexample:", result.counterexample)

# Effectiveness is determination by no variables at all: the outcome on
# the chosen variables is a single constant.
freeze = TotalMap.constant(states, states, "s2")
eff_model = ActionModel(states, space, {"freeze": freeze}, process)
eff = check_effectiveness(eff_model, ("freeze",), ("a", "b"))
print("freeze effective:", eff.effective, "value:", eff.value)

# Invariance: a determination established in a context may or may not
# survive a later action.  Doing something before the context never hurts
# (precomposition), doing something after can.
base = check_determination(model, (), ("a",), ("b",))
inv = check_invariance(model, (), base.witness, ("a",), ("b",), ("scramble",))
print("copy relation invariant under scramble:", inv.holds)

# Discovery: smallest parent sets with a unique determination, probed
# against every generator.
records = discover_mechanisms(model, (), max_parents=1)
for record in records:
    print(
        f"mechanism {record.describe()}:",
        "invariant under", list(record.invariant_under),
        "violated by", [pair[0] for pair in record.violated_by],
    )
