"""Simplified MTP-style service manifests and skill linkage.

The manifest is a JSON stand-in for the vendor's module description: named
services with typed, optionally bounded parameters. Linking checks that
capability realizedBy references resolve and that capability attributes line
up with service parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import json

from .aas import ValueType
from .capability import (
    UNANNOTATED_CAPABILITY,
    Attribute,
    CapabilityDescriptor,
    CapabilityEntry,
    CapabilitySubmodelSpec,
    SkillRef,
    ValueRange,
    sanitize_id_short,
)
from .validation import (
    DocumentError,
    Finding,
    check_fields,
    error,
    get_list,
    get_str,
    sort_findings,
    warning,
)


@dataclass(frozen=True)
class Param:
    name: str
    value_type: ValueType
    unit: str | None = None
    min: float | None = None
    max: float | None = None


@dataclass(frozen=True)
class Service:
    name: str
    parameters: tuple[Param, ...] = ()
    procedure_names: tuple[str, ...] = ()

    def parameter(self, name: str) -> Param | None:
        lowered = name.casefold()
        for param in self.parameters:
            if param.name.casefold() == lowered:
                return param
        return None


@dataclass(frozen=True)
class ServiceManifest:
    manifest_id: str
    module_name: str
    services: tuple[Service, ...] = ()

    def service(self, name: str) -> Service | None:
        for service in self.services:
            if service.name == name:
                return service
        return None


@dataclass(frozen=True)
class SkillDescriptor:
    manifest_id: str
    service_name: str
    parameters: tuple[Param, ...] = ()


def skill_descriptors(manifest: ServiceManifest) -> list[SkillDescriptor]:
    return [
        SkillDescriptor(manifest.manifest_id, s.name, s.parameters) for s in manifest.services
    ]


# --- parsing -----------------------------------------------------------------


def parse_manifest(document: str) -> ServiceManifest:
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"manifest syntax error: {exc}") from exc
    return manifest_from_document(raw)


def manifest_from_document(raw: object) -> ServiceManifest:
    check_fields(raw, "manifest", ("manifestId", "moduleName"), ("services",))
    services = []
    names: set[str] = set()
    for i, s in enumerate(get_list(raw, "services", "manifest", [])):
        path = f"manifest.services[{i}]"
        check_fields(s, path, ("name",), ("procedures", "parameters"))
        name = get_str(s, "name", path)
        if name in names:
            raise DocumentError(f"{path}: duplicate service name: {name}")
        names.add(name)
        params = []
        param_names: set[str] = set()
        for j, p in enumerate(get_list(s, "parameters", path, [])):
            ppath = f"{path}.parameters[{j}]"
            check_fields(p, ppath, ("name", "valueType"), ("unit", "min", "max"))
            pname = get_str(p, "name", ppath)
            if pname in param_names:
                raise DocumentError(f"{ppath}: duplicate parameter name: {pname}")
            param_names.add(pname)
            try:
                value_type = ValueType(p["valueType"])
            except ValueError:
                raise DocumentError(f"{ppath}.valueType: unknown token {p['valueType']!r}") from None
            pmin = _number_or_none(p, "min", ppath)
            pmax = _number_or_none(p, "max", ppath)
            if pmin is not None and pmax is not None and pmin > pmax:
                raise DocumentError(f"{ppath}: min {pmin} exceeds max {pmax}")
            params.append(
                Param(
                    name=pname,
                    value_type=value_type,
                    unit=get_str(p, "unit", ppath) if "unit" in p else None,
                    min=pmin,
                    max=pmax,
                )
            )
        procedures = tuple(
            v if isinstance(v, str) else _raise_str(f"{path}.procedures[{k}]")
            for k, v in enumerate(get_list(s, "procedures", path, []))
        )
        services.append(Service(name=name, parameters=tuple(params), procedure_names=procedures))
    return ServiceManifest(
        manifest_id=get_str(raw, "manifestId", "manifest"),
        module_name=get_str(raw, "moduleName", "manifest"),
        services=tuple(services),
    )


def _raise_str(path: str):
    raise DocumentError(f"{path}: expected a string")


def _number_or_none(obj: dict, key: str, path: str) -> float | None:
    if key not in obj:
        return None
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"{path}.{key}: expected a number")
    return float(value)


def serialize_manifest(manifest: ServiceManifest, indent: int | None = 2) -> str:
    return json.dumps(manifest_to_document(manifest), indent=indent, ensure_ascii=False)


def manifest_to_document(manifest: ServiceManifest) -> dict:
    return {
        "manifestId": manifest.manifest_id,
        "moduleName": manifest.module_name,
        "services": [
            {
                "name": s.name,
                "procedures": list(s.procedure_names),
                "parameters": [
                    {
                        "name": p.name,
                        "valueType": p.value_type.value,
                        **({"unit": p.unit} if p.unit is not None else {}),
                        **({"min": p.min} if p.min is not None else {}),
                        **({"max": p.max} if p.max is not None else {}),
                    }
                    for p in s.parameters
                ],
            }
            for s in manifest.services
        ],
    }


# --- skill linking -----------------------------------------------------------


def link_skills(
    manifests: ServiceManifest | Iterable[ServiceManifest],
    descriptors: Iterable[CapabilityDescriptor],
) -> list[Finding]:
    """Cross-check realizedBy references and attribute/parameter correspondence.

    Dangling realizedBy targets are errors; attribute/parameter mismatches
    (missing parameter, differing units) are warnings.
    """
    if isinstance(manifests, ServiceManifest):
        manifests = [manifests]
    index = {m.manifest_id: m for m in manifests}
    findings: list[Finding] = []
    for descriptor in descriptors:
        skill = descriptor.realized_by
        if skill is None:
            continue
        manifest = index.get(skill.manifest_id)
        if manifest is None:
            findings.append(
                error("dangling-realized-by", descriptor.location, f"manifest not found: {skill.manifest_id}")
            )
            continue
        service = manifest.service(skill.service_name)
        if service is None:
            findings.append(
                error("dangling-realized-by", descriptor.location, f"service not found: {skill.service_name}")
            )
            continue
        for attribute in descriptor.attributes:
            param = service.parameter(attribute.name)
            if param is None:
                findings.append(
                    warning(
                        "missing-parameter",
                        descriptor.location,
                        f"attribute {attribute.name} has no matching parameter in service {service.name}",
                    )
                )
            elif attribute.unit is not None and param.unit is not None and attribute.unit != param.unit:
                findings.append(
                    warning(
                        "unit-mismatch",
                        descriptor.location,
                        f"attribute {attribute.name} unit {attribute.unit} differs from parameter unit {param.unit}",
                    )
                )
    return sort_findings(findings)


# --- scaffolding ---------------------------------------------------------------


def scaffold_capability_submodel(manifest: ServiceManifest) -> CapabilitySubmodelSpec:
    """One placeholder capability per service; bounded numeric params become ranges.

    The placeholder semanticId never resolves in any ontology, so scaffolded
    submodels keep failing validation until a human annotates them.
    """
    entries = []
    used: set[str] = set()
    for service in manifest.services:
        id_short = sanitize_id_short(service.name)
        while id_short in used:
            id_short += "_"
        used.add(id_short)
        attributes = tuple(
            Attribute(name=p.name, value=ValueRange(p.min, p.max), unit=p.unit)
            for p in service.parameters
            if p.min is not None and p.max is not None and p.value_type.numeric
        )
        entries.append(
            CapabilityEntry(
                id_short=id_short,
                abstract_capability=UNANNOTATED_CAPABILITY,
                attributes=attributes,
                realized_by=SkillRef(manifest.manifest_id, service.name),
            )
        )
    return CapabilitySubmodelSpec(
        submodel_id=f"{manifest.manifest_id}:capabilities",
        capabilities=tuple(entries),
    )
