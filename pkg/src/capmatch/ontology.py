"""Layered capability ontologies: data model, JSON exchange format, merging.

An ontology document defines capability classes (basic process operations,
process functions, generic capabilities) with subclass edges, material-based
classification rules, and realization combos. Several ontologies are merged
into an :class:`OntologyStack` before any reasoning happens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .validation import (
    DocumentError,
    Finding,
    check_fields,
    error,
    get_list,
    get_str,
    sort_findings,
)


class StateOfMatter(Enum):
    SOLID = "solid"
    LIQUID = "liquid"
    GAS = "gas"


class MaterialRole(Enum):
    EDUCT = "educt"
    PRODUCT = "product"


class Quantifier(Enum):
    # EXISTS: at least one material of the state is present in the role.
    # ONLY: every material in the role has the state and the role is non-empty.
    EXISTS = "exists"
    ONLY = "only"


class CapabilityKind(Enum):
    BASIC_PROCESS_OPERATION = "basicProcessOperation"
    PROCESS_FUNCTION = "processFunction"
    GENERIC_CAPABILITY = "genericCapability"


class OntologyLayer(Enum):
    UPPER = "upper"
    DOMAIN = "domain"
    APPLICATION = "application"


@dataclass(frozen=True)
class MaterialConstraint:
    role: MaterialRole
    quantifier: Quantifier
    state: StateOfMatter


@dataclass(frozen=True)
class ClassificationRule:
    """A conjunction of material constraints; rules on a class are alternatives."""

    label: str
    constraints: tuple[MaterialConstraint, ...]

    def __post_init__(self):
        if not self.constraints:
            raise ValueError(f"rule '{self.label}': constraints must be non-empty")


@dataclass(frozen=True)
class CapabilityClass:
    iri: str
    label: str
    kind: CapabilityKind
    parents: frozenset[str] = frozenset()
    rules: tuple[ClassificationRule, ...] = ()
    realizations: tuple[frozenset[str], ...] = ()

    def __post_init__(self):
        _check_iri(self.iri)


@dataclass(frozen=True)
class Ontology:
    iri: str
    layer: OntologyLayer
    imports: tuple[str, ...] = ()
    classes: tuple[CapabilityClass, ...] = ()

    def __post_init__(self):
        _check_iri(self.iri)
        seen = set()
        for cls in self.classes:
            if cls.iri in seen:
                raise ValueError(f"duplicate class IRI within ontology: {cls.iri}")
            seen.add(cls.iri)


@dataclass
class OntologyStack:
    """Merged view over a list of ontologies. Immutable after construction."""

    ontologies: tuple[Ontology, ...]
    merged: dict[str, CapabilityClass]
    ancestor_index: dict[str, frozenset[str]] = field(default_factory=dict)

    def __contains__(self, iri: str) -> bool:
        return iri in self.merged

    def resolve(self, iri: str) -> CapabilityClass | None:
        return self.merged.get(iri)


def _check_iri(iri: str):
    if not iri or any(c.isspace() for c in iri):
        raise ValueError(f"invalid IRI: {iri!r} (must be non-empty, no whitespace)")


# --- exchange format -------------------------------------------------------


def load_ontology(document: str) -> Ontology:
    """Parse one UTF-8 JSON ontology document. No cross-ontology resolution."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"ontology syntax error: {exc}") from exc
    return ontology_from_document(raw)


def ontology_from_document(raw: object) -> Ontology:
    check_fields(raw, "ontology", ("iri", "layer"), ("imports", "classes"))
    iri = get_str(raw, "iri", "ontology")
    layer = _parse_enum(OntologyLayer, raw["layer"], "ontology.layer")
    imports = tuple(
        _expect_str(v, f"ontology.imports[{i}]") for i, v in enumerate(get_list(raw, "imports", "ontology", []))
    )
    classes = []
    for i, cls_raw in enumerate(get_list(raw, "classes", "ontology", [])):
        classes.append(_class_from_document(cls_raw, f"ontology.classes[{i}]"))
    try:
        return Ontology(iri=iri, layer=layer, imports=imports, classes=tuple(classes))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


def _class_from_document(raw: object, path: str) -> CapabilityClass:
    check_fields(raw, path, ("iri", "label", "kind"), ("parents", "rules", "realizations"))
    kind = _parse_enum(CapabilityKind, raw["kind"], f"{path}.kind")
    parents = frozenset(
        _expect_str(v, f"{path}.parents[{i}]") for i, v in enumerate(get_list(raw, "parents", path, []))
    )
    rules = tuple(
        _rule_from_document(r, f"{path}.rules[{i}]") for i, r in enumerate(get_list(raw, "rules", path, []))
    )
    realizations = []
    for i, combo in enumerate(get_list(raw, "realizations", path, [])):
        if not isinstance(combo, list) or not combo:
            raise DocumentError(f"{path}.realizations[{i}]: expected a non-empty list of IRIs")
        realizations.append(frozenset(_expect_str(v, f"{path}.realizations[{i}]") for v in combo))
    try:
        return CapabilityClass(
            iri=get_str(raw, "iri", path),
            label=get_str(raw, "label", path),
            kind=kind,
            parents=parents,
            rules=rules,
            realizations=tuple(realizations),
        )
    except ValueError as exc:
        raise DocumentError(f"{path}: {exc}") from exc


def _rule_from_document(raw: object, path: str) -> ClassificationRule:
    check_fields(raw, path, ("label", "constraints"))
    constraints = []
    for i, c in enumerate(get_list(raw, "constraints", path)):
        cpath = f"{path}.constraints[{i}]"
        check_fields(c, cpath, ("role", "quantifier", "state"))
        constraints.append(
            MaterialConstraint(
                role=_parse_enum(MaterialRole, c["role"], f"{cpath}.role"),
                quantifier=_parse_enum(Quantifier, c["quantifier"], f"{cpath}.quantifier"),
                state=_parse_enum(StateOfMatter, c["state"], f"{cpath}.state"),
            )
        )
    try:
        return ClassificationRule(label=get_str(raw, "label", path), constraints=tuple(constraints))
    except ValueError as exc:
        raise DocumentError(f"{path}: {exc}") from exc


def _parse_enum(enum_type, token, path: str):
    try:
        return enum_type(token)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_type)
        raise DocumentError(f"{path}: unknown token {token!r} (allowed: {allowed})") from None


def _expect_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise DocumentError(f"{path}: expected a string")
    return value


def serialize_ontology(ontology: Ontology, indent: int | None = 2) -> str:
    return json.dumps(ontology_to_document(ontology), indent=indent, ensure_ascii=False)


def ontology_to_document(ontology: Ontology) -> dict:
    return {
        "iri": ontology.iri,
        "layer": ontology.layer.value,
        "imports": list(ontology.imports),
        "classes": [
            {
                "iri": cls.iri,
                "label": cls.label,
                "kind": cls.kind.value,
                "parents": sorted(cls.parents),
                "rules": [
                    {
                        "label": rule.label,
                        "constraints": [
                            {"role": c.role.value, "quantifier": c.quantifier.value, "state": c.state.value}
                            for c in rule.constraints
                        ],
                    }
                    for rule in cls.rules
                ],
                "realizations": [sorted(combo) for combo in cls.realizations],
            }
            for cls in ontology.classes
        ],
    }


# --- merging ---------------------------------------------------------------


def merge_stack(ontologies: Sequence[Ontology]) -> OntologyStack:
    """Merge ontologies into one stack, verifying the stack invariants.

    Raises :class:`DocumentError` on missing imports, import cycles,
    cross-ontology duplicate classes, or subclass cycles. Dangling parent
    IRIs are tolerated here and reported by :func:`validate_stack`.
    """
    by_iri: dict[str, Ontology] = {}
    for ont in ontologies:
        if ont.iri in by_iri:
            raise DocumentError(f"duplicate ontology identifier: {ont.iri}")
        by_iri[ont.iri] = ont

    for ont in ontologies:
        for imported in ont.imports:
            if imported not in by_iri:
                raise DocumentError(f"ontology {ont.iri} imports missing ontology {imported}")
    _reject_cycles(
        {ont.iri: ont.imports for ont in ontologies},
        kind="import cycle",
    )

    merged: dict[str, CapabilityClass] = {}
    origin: dict[str, str] = {}
    for ont in ontologies:
        for cls in ont.classes:
            if cls.iri in merged:
                raise DocumentError(
                    f"class {cls.iri} defined in both {origin[cls.iri]} and {ont.iri}"
                )
            merged[cls.iri] = cls
            origin[cls.iri] = ont.iri

    _reject_cycles(
        {iri: tuple(sorted(p for p in cls.parents if p in merged)) for iri, cls in merged.items()},
        kind="subclass cycle",
    )

    stack = OntologyStack(ontologies=tuple(ontologies), merged=merged)
    # Eager, single-threaded warm-up of the subsumption closure; the stack is
    # shared read-only afterwards.
    for iri in merged:
        _ancestors_of(stack, iri)
    return stack


def _reject_cycles(edges: dict[str, tuple[str, ...]], kind: str):
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node: WHITE for node in edges}
    trail: list[str] = []

    def visit(node: str):
        color[node] = GRAY
        trail.append(node)
        for succ in edges[node]:
            if succ not in color:
                continue
            if color[succ] == GRAY:
                cycle = trail[trail.index(succ):] + [succ]
                raise DocumentError(f"{kind}: {' -> '.join(cycle)}")
            if color[succ] == WHITE:
                visit(succ)
        trail.pop()
        color[node] = BLACK

    for node in sorted(edges):
        if color[node] == WHITE:
            visit(node)


def _ancestors_of(stack: OntologyStack, iri: str) -> frozenset[str]:
    cached = stack.ancestor_index.get(iri)
    if cached is not None:
        return cached
    cls = stack.merged[iri]
    result = {iri}
    for parent in cls.parents:
        if parent in stack.merged:
            result |= _ancestors_of(stack, parent)
    frozen = frozenset(result)
    stack.ancestor_index[iri] = frozen
    return frozen


# --- stack validation ------------------------------------------------------


def validate_stack(stack: OntologyStack) -> list[Finding]:
    """Empty report iff every class-level invariant holds. Deterministic order."""
    findings: list[Finding] = []
    for iri in stack.merged:
        cls = stack.merged[iri]
        for parent in sorted(cls.parents):
            if parent not in stack.merged:
                findings.append(error("unresolvable-parent", iri, f"parent does not resolve: {parent}"))
        if cls.realizations and cls.kind == CapabilityKind.PROCESS_FUNCTION:
            findings.append(
                error("realizations-not-permitted", iri, "process functions must not declare realizations")
            )
        for combo in cls.realizations:
            for member in sorted(combo):
                target = stack.merged.get(member)
                if target is None:
                    findings.append(
                        error("realization-target-unresolvable", iri, f"realization target does not resolve: {member}")
                    )
                elif target.kind != CapabilityKind.PROCESS_FUNCTION:
                    findings.append(
                        error(
                            "realization-target-not-function",
                            iri,
                            f"realization target is not a process function: {member}",
                        )
                    )
    return sort_findings(findings)


# --- bundled ontologies ----------------------------------------------------

UPPER_ONTOLOGY_IRI = "urn:c4i:upper"
PROCESS_DOMAIN_IRI = "urn:c4i:pa"
FACTORY_APPLICATION_IRI = "urn:c4i:fa"

CAPABILITY_ROOT = "urn:c4i:upper:Capability"
BASIC_PROCESS_OPERATION = "urn:c4i:upper:BasicProcessOperation"
PROCESS_FUNCTION = "urn:c4i:upper:ProcessFunction"

SEPARATING = "urn:c4i:pa:Separating"
DISTILLING = "urn:c4i:pa:Distilling"
COATING = "urn:c4i:pa:Coating"
DOSING = "urn:c4i:pa:Dosing"
STORING = "urn:c4i:pa:Storing"
TEMPERING = "urn:c4i:pa:Tempering"
PRESSURE_ADJUSTING = "urn:c4i:pa:PressureAdjusting"
SPRAYING = "urn:c4i:pa:Spraying"
IMMERSING = "urn:c4i:pa:Immersing"

PICK_AND_PLACE = "urn:c4i:fa:PickAndPlace"
MOVE = "urn:c4i:fa:Move"
GRASP = "urn:c4i:fa:Grasp"
HOLD = "urn:c4i:fa:Hold"
RELEASE = "urn:c4i:fa:Release"


def _operation(iri: str, label: str, parents: Iterable[str], rules=(), realizations=()) -> CapabilityClass:
    return CapabilityClass(
        iri=iri,
        label=label,
        kind=CapabilityKind.BASIC_PROCESS_OPERATION,
        parents=frozenset(parents),
        rules=tuple(rules),
        realizations=tuple(frozenset(c) for c in realizations),
    )


def _function(iri: str, label: str) -> CapabilityClass:
    return CapabilityClass(
        iri=iri, label=label, kind=CapabilityKind.PROCESS_FUNCTION, parents=frozenset({PROCESS_FUNCTION})
    )


def _generic(iri: str, label: str, parents: Iterable[str]) -> CapabilityClass:
    return CapabilityClass(
        iri=iri, label=label, kind=CapabilityKind.GENERIC_CAPABILITY, parents=frozenset(parents)
    )


def builtin_process_ontology() -> list[Ontology]:
    """The bundled upper, process-industry domain, and factory-automation ontologies."""
    upper = Ontology(
        iri=UPPER_ONTOLOGY_IRI,
        layer=OntologyLayer.UPPER,
        classes=(
            _generic(CAPABILITY_ROOT, "Capability", ()),
            _generic(BASIC_PROCESS_OPERATION, "Basic Process Operation", {CAPABILITY_ROOT}),
            _generic(PROCESS_FUNCTION, "Process Function", {CAPABILITY_ROOT}),
        ),
    )

    exists = Quantifier.EXISTS
    only = Quantifier.ONLY
    educt, product = MaterialRole.EDUCT, MaterialRole.PRODUCT
    solid, liquid = StateOfMatter.SOLID, StateOfMatter.LIQUID

    distilling_rules = (
        ClassificationRule(
            "some liquid products and at least one solid product",
            (
                MaterialConstraint(product, exists, liquid),
                MaterialConstraint(product, exists, solid),
            ),
        ),
        ClassificationRule(
            "only liquid products",
            (MaterialConstraint(product, only, liquid),),
        ),
        ClassificationRule(
            "some liquid educts",
            (MaterialConstraint(educt, exists, liquid),),
        ),
        ClassificationRule(
            "at least one solid educt",
            (MaterialConstraint(educt, exists, solid),),
        ),
    )

    domain = Ontology(
        iri=PROCESS_DOMAIN_IRI,
        layer=OntologyLayer.DOMAIN,
        imports=(UPPER_ONTOLOGY_IRI,),
        classes=(
            _operation(SEPARATING, "Separating", {BASIC_PROCESS_OPERATION}),
            _operation(
                DISTILLING,
                "Distilling",
                {SEPARATING},
                rules=distilling_rules,
                realizations=({DOSING, STORING, TEMPERING},),
            ),
            _operation(
                COATING,
                "Coating",
                {BASIC_PROCESS_OPERATION},
                realizations=(
                    {SPRAYING, DOSING, STORING, PRESSURE_ADJUSTING},
                    {IMMERSING},
                ),
            ),
            _function(DOSING, "Dosing"),
            _function(STORING, "Storing"),
            _function(TEMPERING, "Tempering"),
            _function(PRESSURE_ADJUSTING, "Pressure Adjusting"),
            _function(SPRAYING, "Spraying"),
            _function(IMMERSING, "Immersing"),
        ),
    )

    application = Ontology(
        iri=FACTORY_APPLICATION_IRI,
        layer=OntologyLayer.APPLICATION,
        imports=(UPPER_ONTOLOGY_IRI,),
        classes=(
            _generic(PICK_AND_PLACE, "Pick and Place", {CAPABILITY_ROOT}),
            _generic(MOVE, "Move", {CAPABILITY_ROOT}),
            _generic(GRASP, "Grasp", {CAPABILITY_ROOT}),
            _generic(HOLD, "Hold", {CAPABILITY_ROOT}),
            _generic(RELEASE, "Release", {CAPABILITY_ROOT}),
        ),
    )

    return [upper, domain, application]
