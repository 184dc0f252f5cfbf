"""Simplified Asset Administration Shell metamodel subset.

Covers exactly the element roles the capability submodel needs: Property,
Range, Capability, SubmodelElementCollection, RelationshipElement, and
ReferenceElement, plus shells, submodels, references, and idShort-path
resolution. Serialization follows AAS V3 JSON naming (idShort, semanticId,
modelType) without claiming schema conformance.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union

from .validation import (
    DocumentError,
    Finding,
    ResolveError,
    check_fields,
    error,
    get_list,
    get_str,
    sort_findings,
    warning,
)

_ID_SHORT_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class KeyType(Enum):
    SUBMODEL = "Submodel"
    SUBMODEL_ELEMENT = "SubmodelElement"
    GLOBAL_REFERENCE = "GlobalReference"
    CONCEPT_DESCRIPTION = "ConceptDescription"


class ReferenceType(Enum):
    MODEL = "ModelReference"
    EXTERNAL = "ExternalReference"


class ValueType(Enum):
    STRING = "String"
    DOUBLE = "Double"
    INTEGER = "Integer"
    BOOLEAN = "Boolean"

    @property
    def numeric(self) -> bool:
        return self in (ValueType.DOUBLE, ValueType.INTEGER)


class AssetKind(Enum):
    TYPE = "Type"
    INSTANCE = "Instance"


@dataclass(frozen=True)
class Key:
    type: KeyType
    value: str


@dataclass(frozen=True)
class Reference:
    type: ReferenceType
    keys: tuple[Key, ...]

    def __post_init__(self):
        if not self.keys:
            raise ValueError("reference keys must be non-empty")
        if self.type == ReferenceType.EXTERNAL:
            if len(self.keys) != 1 or self.keys[0].type not in (
                KeyType.GLOBAL_REFERENCE,
                KeyType.CONCEPT_DESCRIPTION,
            ):
                raise ValueError("external references carry exactly one global key")
        else:
            if self.keys[0].type != KeyType.SUBMODEL:
                raise ValueError("model references start with a Submodel key")
            for key in self.keys[1:]:
                if key.type != KeyType.SUBMODEL_ELEMENT:
                    raise ValueError("model reference tail keys must be SubmodelElement keys")


def external_reference(value: str) -> Reference:
    return Reference(ReferenceType.EXTERNAL, (Key(KeyType.GLOBAL_REFERENCE, value),))


def model_reference(submodel_id: str, *id_shorts: str) -> Reference:
    keys = [Key(KeyType.SUBMODEL, submodel_id)]
    keys.extend(Key(KeyType.SUBMODEL_ELEMENT, s) for s in id_shorts)
    return Reference(ReferenceType.MODEL, tuple(keys))


def external_value(ref: Reference | None) -> str | None:
    """The global identifier carried by an external reference, else None."""
    if ref is not None and ref.type == ReferenceType.EXTERNAL:
        return ref.keys[0].value
    return None


def _check_id_short(id_short: str):
    if not _ID_SHORT_RE.match(id_short):
        raise ValueError(f"invalid idShort: {id_short!r}")


@dataclass(frozen=True)
class Property:
    id_short: str
    value_type: ValueType
    value: str | float | int | bool
    semantic_id: Reference | None = None
    unit: str | None = None

    def __post_init__(self):
        _check_id_short(self.id_short)
        object.__setattr__(self, "value", _coerce_value(self.value, self.value_type, self.id_short))


@dataclass(frozen=True)
class Range:
    id_short: str
    value_type: ValueType
    min: float | int
    max: float | int
    semantic_id: Reference | None = None
    unit: str | None = None

    def __post_init__(self):
        _check_id_short(self.id_short)
        if not self.value_type.numeric:
            raise ValueError(f"range {self.id_short}: value type must be numeric")
        object.__setattr__(self, "min", _coerce_value(self.min, self.value_type, self.id_short))
        object.__setattr__(self, "max", _coerce_value(self.max, self.value_type, self.id_short))
        # min <= max is a validation finding, not a construction error, so that
        # validators and negative fixtures can observe the violation.


@dataclass(frozen=True)
class Capability:
    id_short: str
    semantic_id: Reference | None = None

    def __post_init__(self):
        _check_id_short(self.id_short)


@dataclass(frozen=True)
class SubmodelElementCollection:
    id_short: str
    elements: tuple["SubmodelElement", ...] = ()
    semantic_id: Reference | None = None

    def __post_init__(self):
        _check_id_short(self.id_short)


@dataclass(frozen=True)
class RelationshipElement:
    id_short: str
    first: Reference
    second: Reference
    semantic_id: Reference | None = None

    def __post_init__(self):
        _check_id_short(self.id_short)


@dataclass(frozen=True)
class ReferenceElement:
    id_short: str
    value: Reference
    semantic_id: Reference | None = None

    def __post_init__(self):
        _check_id_short(self.id_short)


SubmodelElement = Union[
    Property, Range, Capability, SubmodelElementCollection, RelationshipElement, ReferenceElement
]


def _coerce_value(value, value_type: ValueType, where: str):
    if value_type == ValueType.STRING:
        if isinstance(value, str):
            return value
    elif value_type == ValueType.BOOLEAN:
        if isinstance(value, bool):
            return value
    elif value_type == ValueType.INTEGER:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif value_type == ValueType.DOUBLE:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    raise ValueError(f"{where}: value {value!r} does not match value type {value_type.value}")


@dataclass(frozen=True)
class SpecificAssetId:
    name: str
    value: str
    scope: str | None = None


@dataclass(frozen=True)
class AssetInformation:
    global_asset_id: str
    asset_kind: AssetKind = AssetKind.INSTANCE
    specific_asset_ids: tuple[SpecificAssetId, ...] = ()

    def __post_init__(self):
        if not self.global_asset_id:
            raise ValueError("globalAssetId must be non-empty")
        names = [s.name for s in self.specific_asset_ids]
        if len(names) != len(set(names)):
            raise ValueError("specificAssetId names must be unique")


@dataclass(frozen=True)
class AssetAdministrationShell:
    id: str
    id_short: str
    asset_information: AssetInformation
    submodel_refs: tuple[Reference, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("shell id must be non-empty")


@dataclass(frozen=True)
class Submodel:
    id: str
    id_short: str
    elements: tuple[SubmodelElement, ...] = ()
    semantic_id: Reference | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("submodel id must be non-empty")


@dataclass(frozen=True)
class Environment:
    shells: tuple[AssetAdministrationShell, ...] = ()
    submodels: tuple[Submodel, ...] = ()

    def submodel(self, submodel_id: str) -> Submodel | None:
        for sm in self.submodels:
            if sm.id == submodel_id:
                return sm
        return None


# --- resolution -------------------------------------------------------------


def resolve(env: Environment, submodel_id: str, id_short_path: list[str] | tuple[str, ...]) -> SubmodelElement:
    """Walk nested collections segment by segment and return the element."""
    submodel = env.submodel(submodel_id)
    if submodel is None:
        raise ResolveError(f"unknown submodel id: {submodel_id}")
    if not id_short_path:
        raise ResolveError("path must be non-empty")
    elements = submodel.elements
    walked: list[str] = []
    current: SubmodelElement | None = None
    for i, segment in enumerate(id_short_path):
        match = next((e for e in elements if e.id_short == segment), None)
        if match is None:
            raise ResolveError(
                f"path segment not found: {segment} (walked: {'.'.join(walked) or '<root>'})",
                segment=segment,
                walked=walked,
            )
        walked.append(segment)
        current = match
        if i + 1 < len(id_short_path):
            if not isinstance(match, SubmodelElementCollection):
                raise ResolveError(
                    f"element {'.'.join(walked)} is not a collection; cannot descend further",
                    segment=id_short_path[i + 1],
                    walked=walked,
                )
            elements = match.elements
    assert current is not None
    return current


def dereference(env: Environment, ref: Reference) -> Submodel | SubmodelElement | str:
    """Resolve a model reference; external references pass their value through."""
    if ref.type == ReferenceType.EXTERNAL:
        return ref.keys[0].value
    submodel_id = ref.keys[0].value
    path = [k.value for k in ref.keys[1:]]
    submodel = env.submodel(submodel_id)
    if submodel is None:
        raise ResolveError(f"dangling reference: unknown submodel {submodel_id}")
    if not path:
        return submodel
    return resolve(env, submodel_id, path)


def walk_elements(submodel: Submodel) -> Iterator[tuple[tuple[str, ...], SubmodelElement]]:
    """Depth-first (path, element) pairs over all nesting levels."""

    def _walk(prefix: tuple[str, ...], elements: tuple[SubmodelElement, ...]):
        for element in elements:
            path = prefix + (element.id_short,)
            yield path, element
            if isinstance(element, SubmodelElementCollection):
                yield from _walk(path, element.elements)

    yield from _walk((), submodel.elements)


# --- validation --------------------------------------------------------------


def validate_environment(env: Environment) -> list[Finding]:
    """Duplicate ids, sibling idShort collisions, dangling refs, min>max."""
    findings: list[Finding] = []

    seen_ids: set[str] = set()
    for identifier in [s.id for s in env.shells] + [s.id for s in env.submodels]:
        if identifier in seen_ids:
            findings.append(error("duplicate-id", identifier, f"duplicate identifier: {identifier}"))
        seen_ids.add(identifier)

    submodel_ids = {s.id for s in env.submodels}
    for shell in env.shells:
        for ref in shell.submodel_refs:
            if ref.type != ReferenceType.MODEL or ref.keys[0].value not in submodel_ids:
                target = ref.keys[0].value
                findings.append(
                    warning("dangling-submodel-ref", shell.id, f"submodel reference does not resolve: {target}")
                )

    for sm in env.submodels:
        _check_siblings(sm.id, (), sm.elements, findings)
        for path, element in walk_elements(sm):
            if isinstance(element, Range) and element.min > element.max:
                findings.append(
                    error(
                        "min-exceeds-max",
                        f"{sm.id}:{'.'.join(path)}",
                        f"min exceeds max: {element.min} > {element.max}",
                    )
                )
    return sort_findings(findings)


def _check_siblings(submodel_id: str, prefix: tuple[str, ...], elements, findings: list[Finding]):
    seen: set[str] = set()
    for element in elements:
        if element.id_short in seen:
            location = f"{submodel_id}:{'.'.join(prefix + (element.id_short,))}"
            findings.append(
                error("idshort-collision", location, f"sibling idShort collision: {element.id_short}")
            )
        seen.add(element.id_short)
        if isinstance(element, SubmodelElementCollection):
            _check_siblings(submodel_id, prefix + (element.id_short,), element.elements, findings)


# --- serialization -----------------------------------------------------------


def serialize_environment(env: Environment, indent: int | None = 2) -> str:
    return json.dumps(environment_to_document(env), indent=indent, ensure_ascii=False)


def environment_to_document(env: Environment) -> dict:
    return {
        "shells": [shell_to_document(s) for s in env.shells],
        "submodels": [submodel_to_document(s) for s in env.submodels],
    }


def shell_to_document(shell: AssetAdministrationShell) -> dict:
    info = shell.asset_information
    info_doc: dict = {
        "globalAssetId": info.global_asset_id,
        "assetKind": info.asset_kind.value,
        "specificAssetIds": [
            {"name": s.name, "value": s.value, **({"scope": s.scope} if s.scope is not None else {})}
            for s in info.specific_asset_ids
        ],
    }
    return {
        "id": shell.id,
        "idShort": shell.id_short,
        "assetInformation": info_doc,
        "submodelRefs": [reference_to_document(r) for r in shell.submodel_refs],
    }


def submodel_to_document(sm: Submodel) -> dict:
    doc: dict = {"id": sm.id, "idShort": sm.id_short}
    if sm.semantic_id is not None:
        doc["semanticId"] = reference_to_document(sm.semantic_id)
    doc["submodelElements"] = [element_to_document(e) for e in sm.elements]
    return doc


def reference_to_document(ref: Reference) -> dict:
    return {
        "type": ref.type.value,
        "keys": [{"type": k.type.value, "value": k.value} for k in ref.keys],
    }


def element_to_document(element: SubmodelElement) -> dict:
    doc: dict = {"modelType": type(element).__name__, "idShort": element.id_short}
    if element.semantic_id is not None:
        doc["semanticId"] = reference_to_document(element.semantic_id)
    if isinstance(element, Property):
        doc["valueType"] = element.value_type.value
        doc["value"] = element.value
        if element.unit is not None:
            doc["unit"] = element.unit
    elif isinstance(element, Range):
        doc["valueType"] = element.value_type.value
        doc["min"] = element.min
        doc["max"] = element.max
        if element.unit is not None:
            doc["unit"] = element.unit
    elif isinstance(element, SubmodelElementCollection):
        doc["value"] = [element_to_document(e) for e in element.elements]
    elif isinstance(element, RelationshipElement):
        doc["first"] = reference_to_document(element.first)
        doc["second"] = reference_to_document(element.second)
    elif isinstance(element, ReferenceElement):
        doc["value"] = reference_to_document(element.value)
    return doc


def parse_environment(document: str) -> Environment:
    """Inverse of :func:`serialize_environment`; enforces all invariants."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"environment syntax error: {exc}") from exc
    return environment_from_document(raw)


def environment_from_document(raw: object) -> Environment:
    check_fields(raw, "environment", (), ("shells", "submodels"))
    shells = tuple(
        shell_from_document(doc, f"shells[{i}]") for i, doc in enumerate(get_list(raw, "shells", "environment", []))
    )
    submodels = tuple(
        submodel_from_document(doc, f"submodels[{i}]")
        for i, doc in enumerate(get_list(raw, "submodels", "environment", []))
    )
    env = Environment(shells=shells, submodels=submodels)
    findings = validate_environment(env)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        raise DocumentError("environment violates invariants", findings=errors)
    return env


def shell_from_document(raw: object, path: str = "shell") -> AssetAdministrationShell:
    check_fields(raw, path, ("id", "idShort", "assetInformation"), ("submodelRefs",))
    info_raw = raw["assetInformation"]
    info_path = f"{path}.assetInformation"
    check_fields(info_raw, info_path, ("globalAssetId",), ("assetKind", "specificAssetIds"))
    specific = []
    for i, s in enumerate(get_list(info_raw, "specificAssetIds", info_path, [])):
        spath = f"{info_path}.specificAssetIds[{i}]"
        check_fields(s, spath, ("name", "value"), ("scope",))
        specific.append(
            SpecificAssetId(
                name=get_str(s, "name", spath),
                value=get_str(s, "value", spath),
                scope=get_str(s, "scope", spath) if "scope" in s else None,
            )
        )
    kind_token = info_raw.get("assetKind", AssetKind.INSTANCE.value)
    try:
        kind = AssetKind(kind_token)
    except ValueError:
        raise DocumentError(f"{info_path}.assetKind: unknown token {kind_token!r}") from None
    refs = tuple(
        reference_from_document(r, f"{path}.submodelRefs[{i}]")
        for i, r in enumerate(get_list(raw, "submodelRefs", path, []))
    )
    try:
        return AssetAdministrationShell(
            id=get_str(raw, "id", path),
            id_short=get_str(raw, "idShort", path),
            asset_information=AssetInformation(
                global_asset_id=get_str(info_raw, "globalAssetId", info_path),
                asset_kind=kind,
                specific_asset_ids=tuple(specific),
            ),
            submodel_refs=refs,
        )
    except ValueError as exc:
        raise DocumentError(f"{path}: {exc}") from exc


def submodel_from_document(raw: object, path: str = "submodel") -> Submodel:
    check_fields(raw, path, ("id", "idShort"), ("semanticId", "submodelElements"))
    semantic_id = None
    if "semanticId" in raw:
        semantic_id = reference_from_document(raw["semanticId"], f"{path}.semanticId")
    elements = tuple(
        element_from_document(e, f"{path}.submodelElements[{i}]")
        for i, e in enumerate(get_list(raw, "submodelElements", path, []))
    )
    try:
        return Submodel(
            id=get_str(raw, "id", path),
            id_short=get_str(raw, "idShort", path),
            semantic_id=semantic_id,
            elements=elements,
        )
    except ValueError as exc:
        raise DocumentError(f"{path}: {exc}") from exc


def reference_from_document(raw: object, path: str) -> Reference:
    check_fields(raw, path, ("type", "keys"))
    try:
        ref_type = ReferenceType(raw["type"])
    except ValueError:
        raise DocumentError(f"{path}.type: unknown token {raw['type']!r}") from None
    keys = []
    for i, k in enumerate(get_list(raw, "keys", path)):
        kpath = f"{path}.keys[{i}]"
        check_fields(k, kpath, ("type", "value"))
        try:
            key_type = KeyType(k["type"])
        except ValueError:
            raise DocumentError(f"{kpath}.type: unknown token {k['type']!r}") from None
        keys.append(Key(key_type, get_str(k, "value", kpath)))
    try:
        return Reference(ref_type, tuple(keys))
    except ValueError as exc:
        raise DocumentError(f"{path}: {exc}") from exc


_ELEMENT_FIELDS = {
    "Property": (("valueType", "value"), ("unit",)),
    "Range": (("valueType", "min", "max"), ("unit",)),
    "Capability": ((), ()),
    "SubmodelElementCollection": ((), ("value",)),
    "RelationshipElement": (("first", "second"), ()),
    "ReferenceElement": (("value",), ()),
}


def element_from_document(raw: object, path: str) -> SubmodelElement:
    if not isinstance(raw, dict):
        raise DocumentError(f"{path}: expected an object")
    model_type = raw.get("modelType")
    if model_type not in _ELEMENT_FIELDS:
        raise DocumentError(f"{path}.modelType: unknown token {model_type!r}")
    required, optional = _ELEMENT_FIELDS[model_type]
    check_fields(raw, path, ("modelType", "idShort") + required, ("semanticId",) + optional)
    id_short = get_str(raw, "idShort", path)
    semantic_id = None
    if "semanticId" in raw:
        semantic_id = reference_from_document(raw["semanticId"], f"{path}.semanticId")

    def value_type() -> ValueType:
        try:
            return ValueType(raw["valueType"])
        except ValueError:
            raise DocumentError(f"{path}.valueType: unknown token {raw['valueType']!r}") from None

    try:
        if model_type == "Property":
            return Property(
                id_short=id_short,
                value_type=value_type(),
                value=raw["value"],
                semantic_id=semantic_id,
                unit=get_str(raw, "unit", path) if "unit" in raw else None,
            )
        if model_type == "Range":
            return Range(
                id_short=id_short,
                value_type=value_type(),
                min=raw["min"],
                max=raw["max"],
                semantic_id=semantic_id,
                unit=get_str(raw, "unit", path) if "unit" in raw else None,
            )
        if model_type == "Capability":
            return Capability(id_short=id_short, semantic_id=semantic_id)
        if model_type == "SubmodelElementCollection":
            elements = tuple(
                element_from_document(e, f"{path}.value[{i}]")
                for i, e in enumerate(get_list(raw, "value", path, []))
            )
            return SubmodelElementCollection(id_short=id_short, elements=elements, semantic_id=semantic_id)
        if model_type == "RelationshipElement":
            return RelationshipElement(
                id_short=id_short,
                first=reference_from_document(raw["first"], f"{path}.first"),
                second=reference_from_document(raw["second"], f"{path}.second"),
                semantic_id=semantic_id,
            )
        return ReferenceElement(
            id_short=id_short,
            value=reference_from_document(raw["value"], f"{path}.value"),
            semantic_id=semantic_id,
        )
    except ValueError as exc:
        raise DocumentError(f"{path}: {exc}") from exc
