"""Morphisms between action models and naturality checking.

A morphism carries a state map and an outcome map from a detailed (micro)
model into a simplified one, plus a generator-label translation.  The
morphism is natural (the abstraction is faithful) when every action
square and the process square commute, which is decided here by full
enumeration over the micro states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .core import ActionModel, TotalMap, Word, compose


@dataclass(frozen=True, eq=False)
class ModelMorphism:
    """A pair of maps relating two action models over a shared alphabet.

    ``state_map`` sends micro states to abstract states, ``outcome_map``
    micro outcomes to abstract outcomes.  ``alphabet_map`` translates
    generator labels; when omitted it defaults to the identity on the
    source's labels, each of which must then exist in the target.
    """

    source: ActionModel
    target: ActionModel
    state_map: TotalMap
    outcome_map: TotalMap
    alphabet_map: dict[str, str] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.alphabet_map is None:
            object.__setattr__(
                self, "alphabet_map", {a: a for a in self.source.generators}
            )
        if self.state_map.domain != self.source.states:
            raise ValueError("state map domain must be the source state set")
        if self.state_map.codomain != self.target.states:
            raise ValueError("state map codomain must be the target state set")
        if self.outcome_map.domain != self.source.outcomes.total:
            raise ValueError("outcome map domain must be the source outcome set")
        if self.outcome_map.codomain != self.target.outcomes.total:
            raise ValueError("outcome map codomain must be the target outcome set")
        for a in self.source.generators:
            if a not in self.alphabet_map:
                raise ValueError(f"alphabet map does not cover generator {a!r}")
            b = self.alphabet_map[a]
            if b not in self.target.generators:
                raise ValueError(
                    f"alphabet map sends {a!r} to {b!r}, unknown in the target"
                )

    def translate(self, word: Word) -> tuple[str, ...]:
        return tuple(self.alphabet_map[a] for a in word)


@dataclass(frozen=True)
class SquareFailure:
    """One failing naturality square, evaluated at one micro state."""

    square: str  # "action" or "process"
    generator: Optional[str]
    state: str
    via_source: str
    via_target: str


@dataclass(frozen=True)
class NaturalityReport:
    natural: bool
    failures: tuple[SquareFailure, ...]
    failure_count: int
    truncated: bool


@dataclass(frozen=True)
class SurjectivityReport:
    """Which of the three structural maps are onto, and what y misses.

    A non-surjective outcome map is expected for disentangled variable
    choices; the joint assignments outside the image of
    outcome_map . process are the model's impossible outcomes.
    """

    process_surjective: bool
    state_map_surjective: bool
    outcome_map_surjective: bool
    possible_count: int
    impossible_count: int
    impossible_sample: tuple[str, ...]


@dataclass(frozen=True)
class ClosureReport:
    ok: bool
    depth: int
    words_checked: int
    failing_word: Optional[tuple[str, ...]]
    state: Optional[str]


def check_naturality(m: ModelMorphism, cap: int = 20) -> NaturalityReport:
    """Verify every generator square and the process square by enumeration.

    All failures are collected (up to ``cap`` reported) rather than just
    the first: the distribution of failures is what makes a broken
    abstraction debuggable.
    """
    failures: list[SquareFailure] = []
    count = 0
    x = m.state_map.table
    for a, f_src in m.source.generators.items():
        f_tgt = m.target.generators[m.alphabet_map[a]]
        for s in m.source.states.elements:
            via_source = x[f_src.table[s]]
            via_target = f_tgt.table[x[s]]
            if via_source != via_target:
                count += 1
                if len(failures) < cap:
                    failures.append(
                        SquareFailure("action", a, s, via_source, via_target)
                    )
    y = m.outcome_map.table
    for s in m.source.states.elements:
        via_source = y[m.source.process.table[s]]
        via_target = m.target.process.table[x[s]]
        if via_source != via_target:
            count += 1
            if len(failures) < cap:
                failures.append(
                    SquareFailure("process", None, s, via_source, via_target)
                )
    return NaturalityReport(count == 0, tuple(failures), count, count > len(failures))


def check_surjectivity_assumptions(m: ModelMorphism, cap: int = 20) -> SurjectivityReport:
    """Report surjectivity of the process, state map, and outcome map.

    The impossible outcomes are the complement of the image of
    outcome_map . process in the target outcome set.
    """
    realized = {
        m.outcome_map.table[v] for v in m.source.process.table.values()
    }
    total = m.target.outcomes.total
    impossible = [e for e in total.elements if e not in realized]
    return SurjectivityReport(
        process_surjective=m.source.process.is_surjective(),
        state_map_surjective=m.state_map.is_surjective(),
        outcome_map_surjective=m.outcome_map.is_surjective(),
        possible_count=len(realized),
        impossible_count=len(impossible),
        impossible_sample=tuple(impossible[:cap]),
    )


def naturality_closure_check(m: ModelMorphism, depth: int) -> ClosureReport:
    """Check the state square for every word up to a length.

    This must pass whenever the generator squares pass (commuting squares
    compose); it exists as a theorem check, not as new information.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    labels = sorted(m.source.generators)
    x = m.state_map.table
    checked = 0
    for length in range(1, depth + 1):
        for word in product(labels, repeat=length):
            checked += 1
            do_src = compose(m.source, word)
            do_tgt = compose(m.target, m.translate(word))
            for s in m.source.states.elements:
                if x[do_src.table[s]] != do_tgt.table[x[s]]:
                    return ClosureReport(False, depth, checked, word, s)
    return ClosureReport(True, depth, checked, None, None)


def compose_morphisms(outer: ModelMorphism, inner: ModelMorphism) -> ModelMorphism:
    """Composite morphism inner-then-outer (source of outer = target of inner)."""
    if inner.target != outer.source:
        raise ValueError("morphisms do not compose: inner target != outer source")
    return ModelMorphism(
        inner.source,
        outer.target,
        outer.state_map.after(inner.state_map),
        outer.outcome_map.after(inner.outcome_map),
        {a: outer.alphabet_map[b] for a, b in inner.alphabet_map.items()},
    )
