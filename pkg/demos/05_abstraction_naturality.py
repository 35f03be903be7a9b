"""Abstraction as a morphism of models, checked square by square.

A detailed model and a simplified one are related by a state map and an
outcome map.  The abstraction is faithful exactly when every action
square and the process square commute over the whole micro state set,
which is decidable here and produces named counterexamples when it fails.
"""

from causalground import (
    build_bounded_model,
    check_naturality,
    check_surjectivity_assumptions,
    barrier_blind_morphism,
    line6_family,
    naturality_closure_check,
    three_chain_family,
)

# The 1x6 family: up to four dominoes, nuisance tags in {0,1,2} that the
# dynamics never read, one barrier edge, pushes designated east or west.
family = line6_family()
micro, abstract, morphism = build_bounded_model(family)
print("micro states:", len(micro.states))
print("abstract states:", len(abstract.states),
      "(tags forgotten, one per class)")

report = check_naturality(morphism)
print("tag-forgetting abstraction natural:", report.natural)

# Sabotage: a state map that also forgets where the barriers are.  The
# action square for adding a barrier and the process square for blocked
# chains stop commuting.
bad = barrier_blind_morphism(family, morphism)
broken = check_naturality(bad)
print("barrier-blind abstraction natural:", broken.natural,
      f"({broken.failure_count} failing squares)")
first = broken.failures[0]
print("first failure:", first.square, "square",
      f"generator={first.generator}", f"state={first.state}")

# Generator squares commuting implies word squares commuting; the closure
# check confirms the theorem on words up to a given length.
small_micro, small_abstract, small_morphism = build_bounded_model(
    three_chain_family()
)
closure = naturality_closure_check(small_morphism, 2)
print("closure up to length 2:", closure.ok,
      f"({closure.words_checked} words)")

# Surjectivity: the micro process is onto by construction and the state
# map is onto, but a per-domino variable choice leaves impossible joint
# outcomes, and their census is part of what the model knows.
surj = check_surjectivity_assumptions(morphism)
print("\nprocess surjective:", surj.process_surjective)
print("state map surjective:", surj.state_map_surjective)
print("outcome map surjective:", surj.outcome_map_surjective)
print("possible joint outcomes:", surj.possible_count,
      "of", surj.possible_count + surj.impossible_count)
print("an impossible outcome:", surj.impossible_sample[1])
