"""The domino micro-world: simulation, chains, loops, and mechanisms.

Dominoes stand on a grid; the process pushes the designated domino and
lets everything fall.  Barriers block, gaps stop propagation, and routing
functions let a falling domino change direction, which is enough to build
loops.  On top of the simulator we enumerate a bounded family of states
into an action model and interrogate the adjacency mechanism of a chain.
"""

from causalground import (
    Domino,
    MicroState,
    TotalMap,
    build_bounded_model,
    check_invariance,
    five_chain_family,
    micro_proc,
)
from causalground.dominoes import add_barrier, choose_push, remove_domino

family = five_chain_family()
chain = choose_push(family.chain(), "d1", "E")
print("push d1 east:        ", micro_proc(chain, family.ids))
print("barrier between 3,4: ",
      micro_proc(add_barrier(chain, family.edge(3)), family.ids))
print("remove d2 first:     ",
      micro_proc(remove_domino(chain, "d2"), family.ids))

# A loop: routings turn each fall by ninety degrees, so pushing any
# member topples all four, each in its own direction, exactly once.
loop = MicroState(
    (2, 2),
    (
        Domino("ne", (1, 0), ("S", "S", "S", "S")),
        Domino("nw", (0, 0), ("E", "E", "E", "E")),
        Domino("se", (1, 1), ("W", "W", "W", "W")),
        Domino("sw", (0, 1), ("N", "N", "N", "N")),
    ),
    push=("nw", "E"),
)
print("2x2 loop:            ", micro_proc(loop))

# Enumerate the 5-chain family (presence, barriers, push designation)
# into micro and abstract action models.
micro, model, morphism = build_bounded_model(family)
print("\nfamily sizes:", len(micro.states), "micro states,",
      len(model.outcomes.total), "joint outcome assignments")

# The adjacency mechanism: after initializing the chain and choosing to
# push d1 east, the fate of each domino predicts the fate of the next one
# via {fallen-E -> fallen-E, upright -> upright}.
space = model.outcomes
context = ("choose-push-d1-E", "init-chain5")
dom = space.subspace(("d3",)).total
cod = space.subspace(("d4",)).total
table = {status: "upright" for status in dom.elements}
table["fallen-E"] = "fallen-E"
adjacency = TotalMap(dom, cod, table)

for later, label in [
    (("remove-d1",), "removing an upstream domino"),
    (("add-barrier-1-2",), "a barrier elsewhere"),
    (("choose-push-d2-E",), "pushing an upstream domino east"),
    (("add-barrier-3-4",), "a barrier between the pair"),
    (("choose-push-d4-W",), "pushing the downstream domino west"),
    (("remove-d4",), "removing the downstream domino"),
]:
    result = check_invariance(model, context, adjacency, ("d3",), ("d4",), later)
    status = "invariant" if result.holds else f"BROKEN at {result.violating_state}"
    print(f"d3 -> d4 under {label}: {status}")
