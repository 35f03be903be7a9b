"""Finite-model verification for grounded causal action models.

States, actions-as-maps, and processes over explicit finite sets;
decision procedures for determination, effectiveness, invariance,
surgicality, and naturality; an SCM encoder with an exhaustive law suite;
and a deterministic domino micro-world grounding the whole stack.
"""

from .core import (
    ActionModel,
    CausalGroundError,
    EnumerationLimitError,
    FactoredSpace,
    FiniteSet,
    TotalMap,
    UnknownLabelError,
    UnknownVariableError,
    Word,
    compose,
    context_of,
    image,
    max_table_entries,
    outcome_map,
    unit_set,
)
from .checkers import (
    BaseDeterminationError,
    CommutationResult,
    DeterminationResult,
    EffectivenessResult,
    InvarianceResult,
    MechanismRecord,
    SurgicalVerdict,
    check_commute,
    check_determination,
    check_effectiveness,
    check_invariance,
    check_overwrite,
    check_surgical,
    discover_mechanisms,
    probe_record,
)
from .abstraction import (
    ClosureReport,
    ModelMorphism,
    NaturalityReport,
    SurjectivityReport,
    check_naturality,
    check_surjectivity_assumptions,
    compose_morphisms,
    naturality_closure_check,
)
from .scm import (
    CyclicScmError,
    LawReport,
    Scm,
    brute_force_response,
    default_mechanism_records,
    encode_scm,
    potential_response,
    random_scm,
    verify_scm_laws,
)
from .dominoes import (
    Domino,
    LineFamily,
    MicroState,
    barrier_blind_morphism,
    build_bounded_model,
    five_chain_family,
    four_chain_family,
    line6_family,
    micro_proc,
    three_chain_family,
)

__version__ = "0.1.0"
