"""Acyclic structural causal models and their encoding as action models.

An SCM here is fully tabular: finite exogenous and endogenous domains,
explicit parent lists, and structural functions given as lookup tables.
Each endogenous variable is paired with exactly one exogenous variable
(a unit-set one when the SCM has none for it).

The encoding follows the mechanism-space construction: states are pairs
of a mechanism assignment and an exogenous assignment, the process solves
the indicated equations, and the generators are an initializer plus one
value-setting intervention per endogenous value.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    ActionModel,
    CausalGroundError,
    FactoredSpace,
    FiniteSet,
    SEP,
    TotalMap,
    check_enumeration_bound,
    join_values,
)
from .checkers import MechanismRecord, probe_record

#: Mechanism-slot token selecting the structural function for a variable.
DEFAULT_SLOT = "default"

INIT_LABEL = "init"


class CyclicScmError(CausalGroundError):
    """The parent relation admits no topological order."""


def set_label(var_id: str, value: str) -> str:
    """Generator label of the intervention fixing one endogenous value."""
    return f"set-{var_id}={value}"


@dataclass(frozen=True, eq=False)
class Scm:
    """A finite structural causal model (U, V, F).

    ``exogenous`` and ``endogenous`` are position-paired: the i-th
    exogenous variable is the noise input of the i-th endogenous one.
    ``functions[v]`` maps (parent values in declared parent order, paired
    exogenous value) to a value of v and must be total over that product.
    """

    exogenous: tuple[tuple[str, FiniteSet], ...]
    endogenous: tuple[tuple[str, FiniteSet], ...]
    parents: dict[str, tuple[str, ...]]
    functions: dict[str, dict[tuple[str, ...], str]]
    topo_order: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "exogenous", tuple(self.exogenous))
        object.__setattr__(self, "endogenous", tuple(self.endogenous))
        if len(self.exogenous) != len(self.endogenous):
            raise ValueError(
                "each endogenous variable needs exactly one paired exogenous "
                f"variable: got {len(self.endogenous)} endogenous, "
                f"{len(self.exogenous)} exogenous"
            )
        ids = [v for v, _ in self.exogenous] + [v for v, _ in self.endogenous]
        if len(set(ids)) != len(ids):
            raise ValueError("variable ids must be distinct across U and V")
        endo_ids = [v for v, _ in self.endogenous]
        for vid in endo_ids:
            if vid not in self.parents:
                raise ValueError(f"no parent list for {vid!r}")
            for p in self.parents[vid]:
                if p not in endo_ids:
                    raise ValueError(f"parent {p!r} of {vid!r} is not endogenous")
        object.__setattr__(self, "topo_order", self._toposort(endo_ids))
        for vid, dom in self.endogenous:
            table = self.functions.get(vid)
            if table is None:
                raise ValueError(f"no function table for {vid!r}")
            keys = set(self._function_keys(vid))
            if set(table) != keys:
                missing = sorted(keys - set(table))
                extra = sorted(set(table) - keys)
                bad = missing[0] if missing else extra[0]
                raise ValueError(
                    f"function table for {vid!r} is not total over its "
                    f"parents and noise: offending key {bad!r}"
                )
            for key, value in table.items():
                if value not in dom:
                    raise ValueError(
                        f"function for {vid!r} returns {value!r} at {key!r}, "
                        f"outside its domain"
                    )

    def _toposort(self, endo_ids: list[str]) -> tuple[str, ...]:
        order: list[str] = []
        done: set[str] = set()
        marked: set[str] = set()

        def visit(v: str):
            if v in done:
                return
            if v in marked:
                raise CyclicScmError(f"parent relation has a cycle through {v!r}")
            marked.add(v)
            for p in self.parents[v]:
                visit(p)
            marked.discard(v)
            done.add(v)
            order.append(v)

        for v in endo_ids:
            visit(v)
        return tuple(order)

    def _function_keys(self, vid: str) -> Iterable[tuple[str, ...]]:
        doms = [self.domain_of(p).elements for p in self.parents[vid]]
        doms.append(self.noise_of(vid).elements)
        return (combo for combo in product(*doms))

    def __eq__(self, other):
        if not isinstance(other, Scm):
            return NotImplemented
        return (
            self.exogenous == other.exogenous
            and self.endogenous == other.endogenous
            and self.parents == other.parents
            and self.functions == other.functions
        )

    __hash__ = None

    @property
    def exo_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.exogenous)

    @property
    def endo_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.endogenous)

    def domain_of(self, vid: str) -> FiniteSet:
        for v, dom in self.endogenous:
            if v == vid:
                return dom
        for v, dom in self.exogenous:
            if v == vid:
                return dom
        raise ValueError(f"unknown SCM variable {vid!r}")

    def noise_of(self, vid: str) -> FiniteSet:
        """Domain of the exogenous variable paired with an endogenous one."""
        for (v, _), (_, udom) in zip(self.endogenous, self.exogenous):
            if v == vid:
                return udom
        raise ValueError(f"unknown endogenous variable {vid!r}")

    def noise_id(self, vid: str) -> str:
        for (v, _), (uid, _) in zip(self.endogenous, self.exogenous):
            if v == vid:
                return uid
        raise ValueError(f"unknown endogenous variable {vid!r}")

    def evaluate(self, vid: str, parent_values: Mapping[str, str], u_value: str) -> str:
        key = tuple(parent_values[p] for p in self.parents[vid]) + (u_value,)
        return self.functions[vid][key]


def _check_assignment(
    what: str, assignment: Mapping[str, str], doms: Sequence[tuple[str, FiniteSet]]
):
    for vid, dom in doms:
        if vid not in assignment:
            raise ValueError(f"{what} assignment is missing {vid!r}")
        if assignment[vid] != DEFAULT_SLOT and assignment[vid] not in dom:
            raise ValueError(
                f"{what} assignment sets {vid!r} to {assignment[vid]!r}, "
                f"outside its domain"
            )


def potential_response(
    scm: Scm, slots: Mapping[str, str], u: Mapping[str, str]
) -> dict[str, str]:
    """Solve the equations indicated by a mechanism-slot assignment.

    Slots are either a value of the variable (intervened) or the default
    token (use the structural function).  Evaluation runs in topological
    order, which exists by construction.
    """
    _check_assignment("slot", slots, scm.endogenous)
    for vid, _ in scm.endogenous:
        if slots[vid] != DEFAULT_SLOT and slots[vid] not in scm.domain_of(vid):
            raise ValueError(f"slot for {vid!r} has invalid value {slots[vid]!r}")
    for uid, dom in scm.exogenous:
        if uid not in u or u[uid] not in dom:
            raise ValueError(f"exogenous assignment is missing or invalid for {uid!r}")
    values: dict[str, str] = {}
    for vid in scm.topo_order:
        slot = slots[vid]
        if slot == DEFAULT_SLOT:
            values[vid] = scm.evaluate(vid, values, u[scm.noise_id(vid)])
        else:
            values[vid] = slot
    return {vid: values[vid] for vid in scm.endo_ids}


def brute_force_response(
    scm: Scm, slots: Mapping[str, str], u: Mapping[str, str]
) -> list[dict[str, str]]:
    """All endogenous assignments satisfying the equations indicated by slots.

    Independent oracle for potential_response: it enumerates every joint
    assignment instead of solving.  For acyclic SCMs the result is a
    singleton.
    """
    doms = [dom.elements for _, dom in scm.endogenous]
    solutions = []
    for combo in product(*doms):
        assignment = dict(zip(scm.endo_ids, combo))
        ok = True
        for vid in scm.endo_ids:
            slot = slots[vid]
            if slot == DEFAULT_SLOT:
                expected = scm.evaluate(vid, assignment, u[scm.noise_id(vid)])
            else:
                expected = slot
            if assignment[vid] != expected:
                ok = False
                break
        if ok:
            solutions.append(assignment)
    return solutions


def slot_domain(scm: Scm, vid: str) -> FiniteSet:
    dom = scm.domain_of(vid)
    if DEFAULT_SLOT in dom:
        raise ValueError(
            f"domain of {vid!r} contains the reserved slot token {DEFAULT_SLOT!r}"
        )
    return FiniteSet(f"M({vid})", (DEFAULT_SLOT,) + dom.elements)


def encoded_state(scm: Scm, slots: Mapping[str, str], u: Mapping[str, str]) -> str:
    """State label of the encoded model for a slot/exogenous assignment."""
    return join_values(
        [slots[vid] for vid in scm.endo_ids] + [u[uid] for uid in scm.exo_ids]
    )


def decode_state(scm: Scm, label: str) -> tuple[dict[str, str], dict[str, str]]:
    parts = label.split(SEP)
    n = len(scm.endo_ids)
    slots = dict(zip(scm.endo_ids, parts[:n]))
    u = dict(zip(scm.exo_ids, parts[n:]))
    return slots, u


def encode_scm(scm: Scm) -> ActionModel:
    """Encode an SCM as an action model.

    States are (mechanism assignment, exogenous assignment) pairs; the
    outcome space is the exogenous variables followed by the endogenous
    ones; the process records u together with the potential response.
    Generators: the identity, ``init`` (reset every slot to default,
    keeping u), and one ``set-V=v`` per endogenous value (replace that
    slot, keeping u and the other slots).  No generator touches u; the
    exogenous values vary only across initial states.
    """
    slot_doms = [slot_domain(scm, vid) for vid in scm.endo_ids]
    exo_doms = [dom for _, dom in scm.exogenous]
    n_states = 1
    for dom in slot_doms + exo_doms:
        n_states *= len(dom)
    check_enumeration_bound(n_states, "encoded SCM state set")

    states = FiniteSet(
        "MxU",
        tuple(
            join_values(combo)
            for combo in product(*(d.elements for d in slot_doms + exo_doms))
        ),
    )
    outcomes = FactoredSpace(tuple(scm.exogenous) + tuple(scm.endogenous))

    n = len(scm.endo_ids)
    process_table = {}
    for label in states.elements:
        slots, u = decode_state(scm, label)
        response = potential_response(scm, slots, u)
        process_table[label] = join_values(
            [u[uid] for uid in scm.exo_ids] + [response[vid] for vid in scm.endo_ids]
        )
    process = TotalMap(states, outcomes.total, process_table)

    generators: dict[str, TotalMap] = {}
    init_table = {}
    for label in states.elements:
        parts = label.split(SEP)
        init_table[label] = join_values([DEFAULT_SLOT] * n + parts[n:])
    generators[INIT_LABEL] = TotalMap(states, states, init_table)

    for i, vid in enumerate(scm.endo_ids):
        for value in scm.domain_of(vid).elements:
            table = {}
            for label in states.elements:
                parts = label.split(SEP)
                parts[i] = value
                table[label] = join_values(parts)
            generators[set_label(vid, value)] = TotalMap(states, states, table)

    return ActionModel(states, outcomes, generators, process)


@dataclass(frozen=True)
class LawViolation:
    law: str
    subject: str
    state: Optional[str]


@dataclass(frozen=True)
class LawReport:
    ok: bool
    checked: tuple[tuple[str, int], ...]
    violations: tuple[LawViolation, ...]


LAW_COMMUTE = "commute"
LAW_OVERWRITE = "overwrite"
LAW_U_INVARIANT = "u-invariant"
LAW_DETERMINATION = "determination"
LAW_INVARIANCE = "determination-invariance"


def _mechanism_predictor(scm: Scm, vid: str, slot: str):
    """Predicted value of vid from (parent values, noise value) under a slot."""
    if slot == DEFAULT_SLOT:
        return lambda pa, u_val: scm.functions[vid][pa + (u_val,)]
    return lambda pa, u_val: slot


def verify_scm_laws(model: ActionModel, scm: Scm) -> LawReport:
    """Exhaustively verify the intervention algebra of an encoded SCM.

    Five laws, each checked over every state: (1) interventions on
    different variables commute, (2) interventions on the same variable
    overwrite, (3) no generator changes the exogenous part of the outcome,
    (4) after init or a value intervention, the target variable is
    determined by its parents and noise via the active mechanism, and
    (5) law 4 survives any later intervention on other variables.
    """
    expected_labels = {INIT_LABEL, "id"}
    for vid in scm.endo_ids:
        for value in scm.domain_of(vid).elements:
            expected_labels.add(set_label(vid, value))
    if set(model.generators) != expected_labels:
        raise ValueError("model generators do not match the SCM encoding")

    states = model.states.elements
    split_cache = {e: e.split(SEP) for e in model.outcomes.total.elements}
    positions = {v: i for i, v in enumerate(model.outcomes.var_ids)}
    proc = model.process.table

    def outcome_table(word: tuple[str, ...]) -> dict[str, str]:
        table = {}
        for x in states:
            v = x
            for lab in reversed(word):
                v = model.generators[lab].table[v]
            table[x] = proc[v]
        return table

    violations: list[LawViolation] = []
    checked: list[tuple[str, int]] = []

    set_labels = {
        vid: [set_label(vid, value) for value in scm.domain_of(vid).elements]
        for vid in scm.endo_ids
    }

    count = 0
    for i, vi in enumerate(scm.endo_ids):
        for vj in scm.endo_ids[i + 1 :]:
            for a in set_labels[vi]:
                for b in set_labels[vj]:
                    count += 1
                    fa = model.generators[a].table
                    fb = model.generators[b].table
                    for x in states:
                        if fa[fb[x]] != fb[fa[x]]:
                            violations.append(
                                LawViolation(LAW_COMMUTE, f"{a} vs {b}", x)
                            )
                            break
    checked.append((LAW_COMMUTE, count))

    count = 0
    for vid in scm.endo_ids:
        for a in set_labels[vid]:
            for b in set_labels[vid]:
                count += 1
                fa = model.generators[a].table
                fb = model.generators[b].table
                for x in states:
                    if fa[fb[x]] != fa[x]:
                        violations.append(
                            LawViolation(LAW_OVERWRITE, f"{a} after {b}", x)
                        )
                        break
    checked.append((LAW_OVERWRITE, count))

    exo_pos = [positions[uid] for uid in scm.exo_ids]
    base_outcome = outcome_table(())
    count = 0
    for label in model.generators:
        count += 1
        acted = outcome_table((label,))
        for x in states:
            before = split_cache[base_outcome[x]]
            after = split_cache[acted[x]]
            if any(before[p] != after[p] for p in exo_pos):
                violations.append(LawViolation(LAW_U_INVARIANT, label, x))
                break
    checked.append((LAW_U_INVARIANT, count))

    def determination_violation(
        word: tuple[str, ...], vid: str, predict
    ) -> Optional[str]:
        table = word_tables.setdefault(word, outcome_table(word))
        pa_pos = [positions[p] for p in scm.parents[vid]]
        u_pos = positions[scm.noise_id(vid)]
        v_pos = positions[vid]
        for x in states:
            values = split_cache[table[x]]
            pa = tuple(values[p] for p in pa_pos)
            if predict(pa, values[u_pos]) != values[v_pos]:
                return x
        return None

    word_tables: dict[tuple[str, ...], dict[str, str]] = {}
    base_mechs = []
    for vid in scm.endo_ids:
        base_mechs.append((vid, INIT_LABEL, DEFAULT_SLOT))
        for value in scm.domain_of(vid).elements:
            base_mechs.append((vid, set_label(vid, value), value))

    count = 0
    for vid, label, slot in base_mechs:
        count += 1
        state = determination_violation((label,), vid, _mechanism_predictor(scm, vid, slot))
        if state is not None:
            violations.append(
                LawViolation(LAW_DETERMINATION, f"{vid} after {label}", state)
            )
    checked.append((LAW_DETERMINATION, count))

    count = 0
    for vid, label, slot in base_mechs:
        laters = ["id"]
        for other in scm.endo_ids:
            if other != vid:
                laters.extend(set_labels[other])
        predict = _mechanism_predictor(scm, vid, slot)
        for later in laters:
            count += 1
            state = determination_violation((later, label), vid, predict)
            if state is not None:
                violations.append(
                    LawViolation(
                        LAW_INVARIANCE, f"{vid} after {label}, then {later}", state
                    )
                )
    checked.append((LAW_INVARIANCE, count))

    return LawReport(not violations, tuple(checked), tuple(violations))


def default_mechanism_records(
    scm: Scm, model: ActionModel, probe_depth: int = 1
) -> list[MechanismRecord]:
    """One mechanism record per endogenous variable, in the init context.

    Each record states that the variable is determined by its parents and
    paired noise via its structural function after initialization, probed
    for invariance against every generator.
    """
    space = model.outcomes
    records = []
    for vid in scm.endo_ids:
        dom_ids = space.normalize_vars((scm.noise_id(vid),) + scm.parents[vid])
        sub = space.subspace(dom_ids)
        target_total = space.subspace((vid,)).total
        order = {v: i for i, v in enumerate(dom_ids)}
        pa_at = [order[p] for p in scm.parents[vid]]
        u_at = order[scm.noise_id(vid)]
        table = {}
        for element in sub.total.elements:
            values = sub.split(element)
            key = tuple(values[i] for i in pa_at) + (values[u_at],)
            table[element] = scm.functions[vid][key]
        witness = TotalMap(sub.total, target_total, table)
        records.append(
            probe_record(model, vid, dom_ids, witness, (INIT_LABEL,), probe_depth)
        )
    return records


def random_scm(
    seed: int, n_endo: int = 4, n_exo_values: int = 2, domain_size: int = 2
) -> Scm:
    """Deterministic-by-seed random acyclic SCM within the given bounds.

    Parents are drawn from earlier variables only, so acyclicity holds by
    construction.  Sizes are drawn up to the given maxima.
    """
    rng = random.Random(seed)
    n = rng.randint(1, n_endo)
    endo = []
    exo = []
    for i in range(1, n + 1):
        size = rng.randint(2, max(2, domain_size))
        endo.append((f"V{i}", FiniteSet(f"V{i}", tuple(str(k) for k in range(size)))))
        u_size = rng.randint(1, n_exo_values)
        exo.append((f"U{i}", FiniteSet(f"U{i}", tuple(str(k) for k in range(u_size)))))
    parents = {}
    functions = {}
    for i, (vid, dom) in enumerate(endo):
        pool = [endo[k][0] for k in range(i)]
        parents[vid] = tuple(p for p in pool if rng.random() < 0.5)
        keys = product(
            *[endo[[e[0] for e in endo].index(p)][1].elements for p in parents[vid]],
            exo[i][1].elements,
        )
        functions[vid] = {key: rng.choice(dom.elements) for key in keys}
    return Scm(tuple(exo), tuple(endo), parents, functions)
