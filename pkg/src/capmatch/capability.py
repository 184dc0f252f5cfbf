"""Capability submodel structure: builder, extractor, and descriptor view.

One SubmodelElementCollection per capability holds the Capability element
(semanticId points at the abstract capability in the ontology), attribute
Properties/Ranges, composedOf RelationshipElements, and the realizedBy
ReferenceElement linking to an MTP service.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .aas import (
    Capability,
    Property,
    Range,
    Reference,
    ReferenceElement,
    ReferenceType,
    RelationshipElement,
    Submodel,
    SubmodelElement,
    SubmodelElementCollection,
    ValueType,
    external_reference,
    external_value,
    model_reference,
    walk_elements,
)
from .ontology import OntologyStack
from .validation import DocumentError, Finding, error, sort_findings, warning

# Well-known identifiers; fixed strings of the artifact's exchange contract.
CAPABILITY_SUBMODEL_SEMANTIC_ID = "urn:capmatch:sm:capability:1"
COMPOSED_OF_SEMANTIC_ID = "urn:capmatch:rel:composedOf:1"
REALIZED_BY_SEMANTIC_ID = "urn:capmatch:rel:realizedBy:1"
UNANNOTATED_CAPABILITY = "urn:capmatch:unannotated"

CAPABILITY_ELEMENT_ID_SHORT = "Capability"
REALIZED_BY_ID_SHORT = "RealizedBy"
SUBMODEL_ID_SHORT = "Capabilities"


@dataclass(frozen=True)
class ValueRange:
    low: float
    high: float

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError(f"range low {self.low} exceeds high {self.high}")


AttributeValue = float | int | str | bool | ValueRange


@dataclass(frozen=True)
class Attribute:
    name: str
    value: AttributeValue
    unit: str | None = None
    semantic_id: str | None = None

    @property
    def is_range(self) -> bool:
        return isinstance(self.value, ValueRange)


@dataclass(frozen=True)
class SkillRef:
    manifest_id: str
    service_name: str

    def encode(self) -> str:
        return f"{self.manifest_id}#{self.service_name}"

    @staticmethod
    def decode(value: str) -> "SkillRef":
        if "#" not in value:
            raise ValueError(f"malformed skill reference: {value!r} (expected manifestId#serviceName)")
        manifest_id, service_name = value.split("#", 1)
        return SkillRef(manifest_id, service_name)


@dataclass(frozen=True)
class SkillParameter:
    name: str
    value: float
    unit: str | None = None


@dataclass(frozen=True)
class CapabilityDescriptor:
    """Structured view over one capability's submodel collection."""

    submodel_id: str
    path: tuple[str, ...]
    abstract_capability: str
    attributes: tuple[Attribute, ...] = ()
    composed_of: tuple[tuple[str, ...], ...] = ()
    realized_by: SkillRef | None = None

    @property
    def location(self) -> str:
        return f"{self.submodel_id}:{'.'.join(self.path)}"


@dataclass(frozen=True)
class CapabilityEntry:
    id_short: str
    abstract_capability: str
    attributes: tuple[Attribute, ...] = ()
    composed_of: tuple[str, ...] = ()
    realized_by: SkillRef | None = None


@dataclass(frozen=True)
class CapabilitySubmodelSpec:
    submodel_id: str
    capabilities: tuple[CapabilityEntry, ...] = ()


def check_spec(spec: CapabilitySubmodelSpec):
    """Raise DocumentError when the spec's structural invariants fail."""
    ids = [c.id_short for c in spec.capabilities]
    for id_short in ids:
        if ids.count(id_short) > 1:
            raise DocumentError(f"duplicate capability idShort: {id_short}")
    by_id = {c.id_short: c for c in spec.capabilities}
    for entry in spec.capabilities:
        seen: set[str] = set()
        for target in entry.composed_of:
            if target == entry.id_short:
                raise DocumentError(f"capability {entry.id_short} composes itself")
            if target not in by_id:
                raise DocumentError(f"capability {entry.id_short} composes unknown capability {target}")
            if target in seen:
                raise DocumentError(f"capability {entry.id_short} lists {target} twice in composedOf")
            seen.add(target)
    _reject_composition_cycle(by_id)


def _reject_composition_cycle(by_id: dict[str, CapabilityEntry]):
    state: dict[str, int] = {}

    def visit(name: str, trail: list[str]):
        state[name] = 1
        trail.append(name)
        for target in by_id[name].composed_of:
            if state.get(target, 0) == 1:
                cycle = trail[trail.index(target):] + [target]
                raise DocumentError(f"composition cycle: {' -> '.join(cycle)}")
            if state.get(target, 0) == 0:
                visit(target, trail)
        trail.pop()
        state[name] = 2

    for name in by_id:
        if state.get(name, 0) == 0:
            visit(name, [])


# --- builder -----------------------------------------------------------------


def build_capability_submodel(spec: CapabilitySubmodelSpec) -> Submodel:
    """Emit the capability submodel of a spec: one collection per capability."""
    check_spec(spec)
    collections = []
    for entry in spec.capabilities:
        elements: list[SubmodelElement] = [
            Capability(
                id_short=CAPABILITY_ELEMENT_ID_SHORT,
                semantic_id=external_reference(entry.abstract_capability),
            )
        ]
        for attribute in entry.attributes:
            elements.append(_attribute_to_element(attribute))
        for target in entry.composed_of:
            elements.append(
                RelationshipElement(
                    id_short=f"ComposedOf{target}",
                    first=model_reference(spec.submodel_id, entry.id_short, CAPABILITY_ELEMENT_ID_SHORT),
                    second=model_reference(spec.submodel_id, target, CAPABILITY_ELEMENT_ID_SHORT),
                    semantic_id=external_reference(COMPOSED_OF_SEMANTIC_ID),
                )
            )
        if entry.realized_by is not None:
            elements.append(
                ReferenceElement(
                    id_short=REALIZED_BY_ID_SHORT,
                    value=external_reference(entry.realized_by.encode()),
                    semantic_id=external_reference(REALIZED_BY_SEMANTIC_ID),
                )
            )
        collections.append(SubmodelElementCollection(id_short=entry.id_short, elements=tuple(elements)))
    return Submodel(
        id=spec.submodel_id,
        id_short=SUBMODEL_ID_SHORT,
        semantic_id=external_reference(CAPABILITY_SUBMODEL_SEMANTIC_ID),
        elements=tuple(collections),
    )


def _attribute_to_element(attribute: Attribute) -> SubmodelElement:
    semantic_id = external_reference(attribute.semantic_id) if attribute.semantic_id else None
    if isinstance(attribute.value, ValueRange):
        return Range(
            id_short=attribute.name,
            value_type=ValueType.DOUBLE,
            min=attribute.value.low,
            max=attribute.value.high,
            semantic_id=semantic_id,
            unit=attribute.unit,
        )
    value = attribute.value
    if isinstance(value, bool):
        value_type = ValueType.BOOLEAN
    elif isinstance(value, int):
        value_type = ValueType.INTEGER
    elif isinstance(value, float):
        value_type = ValueType.DOUBLE
    else:
        value_type = ValueType.STRING
    return Property(
        id_short=attribute.name,
        value_type=value_type,
        value=value,
        semantic_id=semantic_id,
        unit=attribute.unit,
    )


# --- extractor ---------------------------------------------------------------


def extract_capabilities(
    submodel: Submodel, stack: OntologyStack | None
) -> tuple[list[CapabilityDescriptor], list[Finding]]:
    """Descriptors for every collection containing a Capability element.

    Findings cover: missing or non-external semanticId, semanticId not
    resolving in the stack, dangling composedOf targets, composition cycles,
    and syntactically malformed realizedBy references.
    """
    findings: list[Finding] = []
    capability_smcs: list[tuple[tuple[str, ...], SubmodelElementCollection]] = []
    for path, element in walk_elements(submodel):
        if isinstance(element, SubmodelElementCollection) and any(
            isinstance(child, Capability) for child in element.elements
        ):
            capability_smcs.append((path, element))

    smc_paths = {path for path, _ in capability_smcs}
    descriptors: list[CapabilityDescriptor] = []
    edges: dict[tuple[str, ...], list[tuple[str, ...]]] = {path: [] for path in smc_paths}

    for path, smc in capability_smcs:
        location = f"{submodel.id}:{'.'.join(path)}"
        cap_element = next(c for c in smc.elements if isinstance(c, Capability))
        abstract = external_value(cap_element.semantic_id)
        if abstract is None:
            findings.append(
                warning(
                    "missing-semantic-id",
                    location,
                    "capability has no external semanticId pointing at an abstract capability",
                )
            )
            continue
        if stack is not None and abstract not in stack:
            findings.append(
                error("unresolvable-semantic-id", location, f"abstract capability not found in ontology: {abstract}")
            )

        attributes = tuple(
            _element_to_attribute(child)
            for child in smc.elements
            if isinstance(child, (Property, Range))
        )

        composed_of: list[tuple[str, ...]] = []
        for child in smc.elements:
            if isinstance(child, RelationshipElement) and external_value(child.semantic_id) == COMPOSED_OF_SEMANTIC_ID:
                target = _composition_target(submodel, smc_paths, child.second)
                if target is None:
                    findings.append(
                        error(
                            "dangling-composed-of",
                            location,
                            f"composedOf target does not resolve: {_describe_reference(child.second)}",
                        )
                    )
                elif target == path:
                    edges[path].append(target)  # self-loop surfaces as a cycle finding
                elif target not in composed_of:
                    composed_of.append(target)
                    edges[path].append(target)

        realized_by = None
        for child in smc.elements:
            if isinstance(child, ReferenceElement) and external_value(child.semantic_id) == REALIZED_BY_SEMANTIC_ID:
                encoded = external_value(child.value)
                if encoded is None:
                    findings.append(
                        error("malformed-realized-by", location, "realizedBy must be an external reference")
                    )
                    continue
                try:
                    realized_by = SkillRef.decode(encoded)
                except ValueError as exc:
                    findings.append(error("malformed-realized-by", location, str(exc)))

        descriptors.append(
            CapabilityDescriptor(
                submodel_id=submodel.id,
                path=path,
                abstract_capability=abstract,
                attributes=attributes,
                composed_of=tuple(composed_of),
                realized_by=realized_by,
            )
        )

    findings.extend(_composition_cycle_findings(submodel.id, edges))
    return descriptors, sort_findings(findings)


def _element_to_attribute(element: Property | Range) -> Attribute:
    semantic_id = external_value(element.semantic_id)
    if isinstance(element, Range):
        return Attribute(
            name=element.id_short,
            value=ValueRange(float(element.min), float(element.max)),
            unit=element.unit,
            semantic_id=semantic_id,
        )
    return Attribute(name=element.id_short, value=element.value, unit=element.unit, semantic_id=semantic_id)


def _composition_target(
    submodel: Submodel, smc_paths: set[tuple[str, ...]], ref: Reference
) -> tuple[str, ...] | None:
    """Map a composedOf endpoint onto the capability collection containing it."""
    if ref.type != ReferenceType.MODEL or ref.keys[0].value != submodel.id:
        return None
    path = tuple(k.value for k in ref.keys[1:])
    if not path:
        return None
    # The endpoint may address the collection itself or an element inside it;
    # walk up until a capability collection path matches.
    for end in range(len(path), 0, -1):
        prefix = path[:end]
        if prefix in smc_paths:
            if _path_exists(submodel, path):
                return prefix
            return None
    return None


def _path_exists(submodel: Submodel, path: tuple[str, ...]) -> bool:
    return any(p == path for p, _ in walk_elements(submodel))


def _describe_reference(ref: Reference) -> str:
    return "/".join(k.value for k in ref.keys)


def _composition_cycle_findings(
    submodel_id: str, edges: dict[tuple[str, ...], list[tuple[str, ...]]]
) -> list[Finding]:
    findings: list[Finding] = []
    state: dict[tuple[str, ...], int] = {}

    def visit(node: tuple[str, ...], trail: list[tuple[str, ...]]):
        state[node] = 1
        trail.append(node)
        for target in edges.get(node, ()):
            if state.get(target, 0) == 1:
                cycle = trail[trail.index(target):] + [target]
                names = " -> ".join(".".join(p) for p in cycle)
                findings.append(
                    error("composition-cycle", f"{submodel_id}:{'.'.join(node)}", f"composition cycle: {names}")
                )
            elif state.get(target, 0) == 0:
                visit(target, trail)
        trail.pop()
        state[node] = 2

    for node in sorted(edges):
        if state.get(node, 0) == 0:
            visit(node, [])
    return findings


# --- spec document format ------------------------------------------------------

_NON_ID_SHORT = re.compile(r"[^A-Za-z0-9_]")


def spec_to_document(spec: CapabilitySubmodelSpec) -> dict:
    return {
        "submodelId": spec.submodel_id,
        "capabilities": [
            {
                "idShort": c.id_short,
                "abstractCapability": c.abstract_capability,
                "attributes": [_attribute_to_doc(a) for a in c.attributes],
                "composedOf": list(c.composed_of),
                **(
                    {"realizedBy": {"manifestId": c.realized_by.manifest_id, "serviceName": c.realized_by.service_name}}
                    if c.realized_by is not None
                    else {}
                ),
            }
            for c in spec.capabilities
        ],
    }


def _attribute_to_doc(attribute: Attribute) -> dict:
    doc: dict = {"name": attribute.name}
    if attribute.semantic_id is not None:
        doc["semanticId"] = attribute.semantic_id
    if isinstance(attribute.value, ValueRange):
        doc["range"] = {"low": attribute.value.low, "high": attribute.value.high}
    else:
        doc["point"] = attribute.value
    if attribute.unit is not None:
        doc["unit"] = attribute.unit
    return doc


def spec_from_document(raw: object) -> CapabilitySubmodelSpec:
    from .validation import check_fields, get_list, get_str

    check_fields(raw, "spec", ("submodelId",), ("capabilities",))
    entries = []
    for i, c in enumerate(get_list(raw, "capabilities", "spec", [])):
        path = f"spec.capabilities[{i}]"
        check_fields(c, path, ("idShort", "abstractCapability"), ("attributes", "composedOf", "realizedBy"))
        attributes = []
        for j, a in enumerate(get_list(c, "attributes", path, [])):
            apath = f"{path}.attributes[{j}]"
            check_fields(a, apath, ("name",), ("semanticId", "point", "range", "unit"))
            if ("point" in a) == ("range" in a):
                raise DocumentError(f"{apath}: exactly one of 'point' or 'range' required")
            if "range" in a:
                rng = a["range"]
                check_fields(rng, f"{apath}.range", ("low", "high"))
                try:
                    value: AttributeValue = ValueRange(float(rng["low"]), float(rng["high"]))
                except (TypeError, ValueError) as exc:
                    raise DocumentError(f"{apath}.range: {exc}") from exc
            else:
                value = a["point"]
                if not isinstance(value, (str, int, float, bool)):
                    raise DocumentError(f"{apath}.point: expected a scalar")
            attributes.append(
                Attribute(
                    name=get_str(a, "name", apath),
                    value=value,
                    unit=get_str(a, "unit", apath) if "unit" in a else None,
                    semantic_id=get_str(a, "semanticId", apath) if "semanticId" in a else None,
                )
            )
        realized_by = None
        if "realizedBy" in c:
            r = c["realizedBy"]
            check_fields(r, f"{path}.realizedBy", ("manifestId", "serviceName"))
            realized_by = SkillRef(get_str(r, "manifestId", path), get_str(r, "serviceName", path))
        entries.append(
            CapabilityEntry(
                id_short=get_str(c, "idShort", path),
                abstract_capability=get_str(c, "abstractCapability", path),
                attributes=tuple(attributes),
                composed_of=tuple(get_list(c, "composedOf", path, [])),
                realized_by=realized_by,
            )
        )
    spec = CapabilitySubmodelSpec(submodel_id=get_str(raw, "submodelId", "spec"), capabilities=tuple(entries))
    check_spec(spec)
    return spec


def sanitize_id_short(name: str) -> str:
    """Coerce an arbitrary service name into a legal idShort."""
    cleaned = _NON_ID_SHORT.sub("", name)
    if not cleaned or not cleaned[0].isalpha():
        cleaned = "S" + cleaned
    return cleaned


# --- bundled worked example ----------------------------------------------------


def dosing_example() -> tuple[CapabilityDescriptor, SkillParameter]:
    """The dosing capability with its amount range and a concrete skill parameter."""
    descriptor = CapabilityDescriptor(
        submodel_id="urn:capmatch:example:dosing",
        path=("Dose",),
        abstract_capability="urn:c4i:pa:Dosing",
        attributes=(Attribute(name="amount", value=ValueRange(0.2, 80.0), unit="ml"),),
    )
    return descriptor, SkillParameter(name="amount", value=65.0, unit="ml")
