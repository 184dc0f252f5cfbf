"""Subsumption, rule evaluation, and realization queries over a merged stack.

This is the minimal inference engine the artifact uses instead of an OWL
reasoner: reflexive-transitive subclass closure, material-rule evaluation,
and collection of canBeRealisedBy combos along the ancestor chain.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .ontology import (
    CapabilityKind,
    ClassificationRule,
    MaterialConstraint,
    MaterialRole,
    OntologyStack,
    Quantifier,
    StateOfMatter,
    _ancestors_of,
)
from .validation import UnknownClassError


@dataclass(frozen=True)
class MaterialSet:
    """Multisets of material states on the educt and product side."""

    educts: tuple[StateOfMatter, ...] = ()
    products: tuple[StateOfMatter, ...] = ()

    def side(self, role: MaterialRole) -> tuple[StateOfMatter, ...]:
        return self.educts if role == MaterialRole.EDUCT else self.products


def ancestors(stack: OntologyStack, iri: str) -> frozenset[str]:
    """Reflexive-transitive closure over parent edges; contains ``iri`` itself."""
    if iri not in stack.merged:
        raise UnknownClassError(iri)
    return _ancestors_of(stack, iri)


def subsumes(stack: OntologyStack, general: str, specific: str) -> bool:
    """True iff ``general`` is ``specific`` or one of its ancestors."""
    if general not in stack.merged:
        raise UnknownClassError(general)
    return general in ancestors(stack, specific)


def constraint_satisfied(constraint: MaterialConstraint, materials: MaterialSet) -> bool:
    side = materials.side(constraint.role)
    if constraint.quantifier == Quantifier.EXISTS:
        return constraint.state in side
    # ONLY presupposes the role is populated; an empty side never satisfies it.
    return bool(side) and all(state == constraint.state for state in side)


def rule_satisfied(rule: ClassificationRule, materials: MaterialSet) -> bool:
    return all(constraint_satisfied(c, materials) for c in rule.constraints)


def classify(stack: OntologyStack, materials: MaterialSet) -> tuple[str, ...]:
    """Basic process operations whose rules match, closed upward within that kind.

    Upward closure is explicit: ancestors of kind basicProcessOperation are
    added regardless of their own rules. Returns a sorted tuple.
    """
    matched: set[str] = set()
    for iri, cls in stack.merged.items():
        if cls.kind != CapabilityKind.BASIC_PROCESS_OPERATION:
            continue
        if any(rule_satisfied(rule, materials) for rule in cls.rules):
            matched.add(iri)
    closed: set[str] = set()
    for iri in matched:
        for ancestor in ancestors(stack, iri):
            if stack.merged[ancestor].kind == CapabilityKind.BASIC_PROCESS_OPERATION:
                closed.add(ancestor)
    return tuple(sorted(closed))


def realization_combos(stack: OntologyStack, operation: str) -> list[frozenset[str]]:
    """The operation's combos plus those declared on ancestors, nearest first.

    Combos are not inherited in the ontology itself; this query is the single
    place that walks the ancestor chain. Duplicates keep their first position.
    """
    if operation not in stack.merged:
        raise UnknownClassError(operation)
    combos: list[frozenset[str]] = []
    seen: set[frozenset[str]] = set()
    visited = {operation}
    queue = deque([operation])
    while queue:
        current = queue.popleft()
        for combo in stack.merged[current].realizations:
            if combo not in seen:
                seen.add(combo)
                combos.append(combo)
        # Breadth-first over parents keeps "nearest first"; sorting within a
        # level makes the order deterministic under multiple inheritance.
        for parent in sorted(stack.merged[current].parents):
            if parent in stack.merged and parent not in visited:
                visited.add(parent)
                queue.append(parent)
    return combos
