"""Seeded random generators and independent brute-force oracles.

The oracles deliberately reimplement subsumption (exhaustive parent-path
enumeration) and combo coverage (exhaustive member checking) without touching
the library's reasoner or matcher internals.
"""

from __future__ import annotations

import random

from capmatch.aas import (
    AssetAdministrationShell,
    AssetInformation,
    AssetKind,
    Capability,
    Environment,
    Property,
    Range,
    ReferenceElement,
    RelationshipElement,
    SpecificAssetId,
    Submodel,
    SubmodelElementCollection,
    ValueType,
    external_reference,
    model_reference,
)
from capmatch.capability import CapabilityEntry, CapabilitySubmodelSpec, ValueRange, build_capability_submodel
from capmatch.manifest import Param, Service, ServiceManifest
from capmatch.matching import AttributeConstraint, Requirement
from capmatch.ontology import (
    CapabilityClass,
    CapabilityKind,
    ClassificationRule,
    MaterialConstraint,
    MaterialRole,
    Ontology,
    OntologyLayer,
    OntologyStack,
    Quantifier,
    StateOfMatter,
    merge_stack,
)

KINDS = (
    CapabilityKind.BASIC_PROCESS_OPERATION,
    CapabilityKind.PROCESS_FUNCTION,
    CapabilityKind.GENERIC_CAPABILITY,
)


def random_classes(rng: random.Random, max_classes: int = 50) -> list[CapabilityClass]:
    """Random acyclic class graph; realizations only target process functions."""
    n = rng.randint(1, max_classes)
    iris = [f"urn:test:C{i}" for i in range(n)]
    kinds = [rng.choice(KINDS) for _ in range(n)]
    function_iris = [iri for iri, kind in zip(iris, kinds) if kind == CapabilityKind.PROCESS_FUNCTION]

    classes = []
    for i, (iri, kind) in enumerate(zip(iris, kinds)):
        parents = frozenset(rng.sample(iris[:i], k=min(rng.randint(0, 2), i)))
        realizations: tuple[frozenset[str], ...] = ()
        if kind != CapabilityKind.PROCESS_FUNCTION and function_iris and rng.random() < 0.35:
            realizations = tuple(
                frozenset(rng.sample(function_iris, k=rng.randint(1, min(3, len(function_iris)))))
                for _ in range(rng.randint(1, 2))
            )
        rules: tuple[ClassificationRule, ...] = ()
        if kind == CapabilityKind.BASIC_PROCESS_OPERATION and rng.random() < 0.5:
            rules = tuple(random_rule(rng, f"rule {j}") for j in range(rng.randint(1, 2)))
        classes.append(
            CapabilityClass(
                iri=iri,
                label=f"C{i}",
                kind=kind,
                parents=parents,
                rules=rules,
                realizations=realizations,
            )
        )
    return classes


def random_rule(rng: random.Random, label: str) -> ClassificationRule:
    constraints = tuple(
        MaterialConstraint(
            role=rng.choice(list(MaterialRole)),
            quantifier=rng.choice(list(Quantifier)),
            state=rng.choice(list(StateOfMatter)),
        )
        for _ in range(rng.randint(1, 2))
    )
    return ClassificationRule(label=label, constraints=constraints)


def random_stack(rng: random.Random, max_classes: int = 50) -> OntologyStack:
    ontology = Ontology(
        iri="urn:test:ontology",
        layer=OntologyLayer.DOMAIN,
        classes=tuple(random_classes(rng, max_classes)),
    )
    return merge_stack([ontology])


def random_ontology(rng: random.Random, max_classes: int = 20) -> Ontology:
    return Ontology(
        iri=f"urn:test:ont:{rng.randint(0, 10**6)}",
        layer=rng.choice(list(OntologyLayer)),
        imports=tuple(f"urn:test:import:{i}" for i in range(rng.randint(0, 2))),
        classes=tuple(random_classes(rng, max_classes)),
    )


# --- module environments for the matcher oracle -------------------------------

ModuleSpec = tuple[str, list[tuple[str, tuple[str, ...], str]]]  # shell, [(sm, path, class)]


def random_modules(
    rng: random.Random, stack: OntologyStack, max_modules: int = 10, max_capabilities: int = 8
) -> tuple[Environment, list[ModuleSpec]]:
    class_iris = sorted(stack.merged)
    shells = []
    submodels = []
    modules: list[ModuleSpec] = []
    for m in range(rng.randint(0, max_modules)):
        submodel_id = f"urn:test:sm:{m}"
        shell_id = f"urn:test:shell:{m}"
        entries = []
        capabilities: list[tuple[str, tuple[str, ...], str]] = []
        for c in range(rng.randint(0, max_capabilities)):
            id_short = f"Cap{c}"
            class_iri = rng.choice(class_iris)
            entries.append(CapabilityEntry(id_short=id_short, abstract_capability=class_iri))
            capabilities.append((submodel_id, (id_short,), class_iri))
        submodels.append(
            build_capability_submodel(CapabilitySubmodelSpec(submodel_id, tuple(entries)))
        )
        shells.append(
            AssetAdministrationShell(
                id=shell_id,
                id_short=f"Module{m}",
                asset_information=AssetInformation(
                    global_asset_id=f"urn:test:asset:{m}", asset_kind=AssetKind.TYPE
                ),
                submodel_refs=(model_reference(submodel_id),),
            )
        )
        modules.append((shell_id, capabilities))
    return Environment(shells=tuple(shells), submodels=tuple(submodels)), modules


# --- brute-force oracles --------------------------------------------------------


def brute_ancestors(classes: dict[str, CapabilityClass], iri: str) -> set[str]:
    """Reachability by exhaustive enumeration of parent paths."""
    reached: set[str] = set()

    def walk(node: str, on_path: frozenset[str]):
        reached.add(node)
        for parent in classes[node].parents:
            if parent in classes and parent not in on_path:
                walk(parent, on_path | {node})

    walk(iri, frozenset())
    return reached


def brute_combos(classes: dict[str, CapabilityClass], iri: str) -> set[frozenset[str]]:
    combos: set[frozenset[str]] = set()
    for ancestor in brute_ancestors(classes, iri):
        combos.update(classes[ancestor].realizations)
    return combos


def brute_specializes(classes: dict[str, CapabilityClass], general: str, specific: str) -> bool:
    if specific == general:
        return True
    if specific in classes and general in classes:
        return general in brute_ancestors(classes, specific)
    return False


MatchKey = tuple  # (shell, sm, path, degree) or (shell, "Realizable", combo)


def oracle_match(
    classes: dict[str, CapabilityClass], modules: list[ModuleSpec], requirement_iri: str
) -> set[MatchKey]:
    results: set[MatchKey] = set()
    for shell_id, capabilities in modules:
        for submodel_id, path, class_iri in capabilities:
            if class_iri == requirement_iri:
                results.add((shell_id, submodel_id, path, "Exact"))
            elif class_iri in classes and requirement_iri in brute_ancestors(classes, class_iri):
                results.add((shell_id, submodel_id, path, "Subsumed"))
        for combo in brute_combos(classes, requirement_iri):
            covered = all(
                any(
                    brute_specializes(classes, function, class_iri)
                    for _, _, class_iri in capabilities
                )
                for function in combo
            )
            if covered:
                results.add((shell_id, "Realizable", combo))
    return results


def match_keys(candidates) -> set[MatchKey]:
    keys: set[MatchKey] = set()
    for candidate in candidates:
        if candidate.combo is not None:
            keys.add((candidate.shell_id, "Realizable", candidate.combo))
        else:
            keys.add(
                (candidate.shell_id, candidate.submodel_id, candidate.capability_path, candidate.degree.value)
            )
    return keys


# --- random documents for round-trip checks -------------------------------------


def random_reference(rng: random.Random, submodel_ids: list[str]):
    if submodel_ids and rng.random() < 0.5:
        target = rng.choice(submodel_ids)
        return model_reference(target, *[f"E{rng.randint(0, 3)}" for _ in range(rng.randint(0, 2))])
    return external_reference(f"urn:test:ref:{rng.randint(0, 999)}")


def random_elements(rng: random.Random, submodel_ids: list[str], depth: int = 0) -> tuple:
    elements = []
    for i in range(rng.randint(0, 4)):
        id_short = f"E{depth}_{i}"
        semantic_id = random_reference(rng, submodel_ids) if rng.random() < 0.4 else None
        choice = rng.randint(0, 5 if depth < 2 else 4)
        if choice == 0:
            value_type = rng.choice(list(ValueType))
            value = {
                ValueType.STRING: f"v{i}",
                ValueType.DOUBLE: rng.uniform(-10, 10),
                ValueType.INTEGER: rng.randint(-5, 5),
                ValueType.BOOLEAN: rng.random() < 0.5,
            }[value_type]
            elements.append(
                Property(
                    id_short=id_short,
                    value_type=value_type,
                    value=value,
                    semantic_id=semantic_id,
                    unit="u" if rng.random() < 0.3 else None,
                )
            )
        elif choice == 1:
            low = rng.uniform(-10, 10)
            elements.append(
                Range(
                    id_short=id_short,
                    value_type=ValueType.DOUBLE,
                    min=low,
                    max=low + rng.uniform(0, 5),
                    semantic_id=semantic_id,
                    unit="u" if rng.random() < 0.3 else None,
                )
            )
        elif choice == 2:
            elements.append(Capability(id_short=id_short, semantic_id=semantic_id))
        elif choice == 3:
            elements.append(
                RelationshipElement(
                    id_short=id_short,
                    first=random_reference(rng, submodel_ids),
                    second=random_reference(rng, submodel_ids),
                    semantic_id=semantic_id,
                )
            )
        elif choice == 4:
            elements.append(
                ReferenceElement(
                    id_short=id_short,
                    value=random_reference(rng, submodel_ids),
                    semantic_id=semantic_id,
                )
            )
        else:
            elements.append(
                SubmodelElementCollection(
                    id_short=id_short,
                    elements=random_elements(rng, submodel_ids, depth + 1),
                    semantic_id=semantic_id,
                )
            )
    return tuple(elements)


def random_environment(rng: random.Random) -> Environment:
    submodel_ids = [f"urn:rt:sm:{i}" for i in range(rng.randint(0, 3))]
    submodels = tuple(
        Submodel(
            id=submodel_id,
            id_short=f"SM{i}",
            semantic_id=random_reference(rng, submodel_ids) if rng.random() < 0.4 else None,
            elements=random_elements(rng, submodel_ids),
        )
        for i, submodel_id in enumerate(submodel_ids)
    )
    shells = tuple(
        AssetAdministrationShell(
            id=f"urn:rt:shell:{i}",
            id_short=f"Shell{i}",
            asset_information=AssetInformation(
                global_asset_id=f"urn:rt:asset:{i}",
                asset_kind=rng.choice(list(AssetKind)),
                specific_asset_ids=tuple(
                    SpecificAssetId(name=f"n{j}", value=f"v{j}", scope="plant" if rng.random() < 0.5 else None)
                    for j in range(rng.randint(0, 2))
                ),
            ),
            submodel_refs=tuple(model_reference(s) for s in rng.sample(submodel_ids, k=len(submodel_ids))),
        )
        for i in range(rng.randint(0, 2))
    )
    return Environment(shells=shells, submodels=submodels)


def random_manifest(rng: random.Random) -> ServiceManifest:
    services = []
    for i in range(rng.randint(0, 4)):
        params = []
        for j in range(rng.randint(0, 3)):
            value_type = rng.choice(list(ValueType))
            low = rng.uniform(0, 10) if value_type.numeric and rng.random() < 0.6 else None
            high = (low or 0) + rng.uniform(0, 10) if low is not None and rng.random() < 0.8 else None
            params.append(
                Param(
                    name=f"p{j}",
                    value_type=value_type,
                    unit="u" if rng.random() < 0.4 else None,
                    min=low,
                    max=high,
                )
            )
        services.append(
            Service(
                name=f"Service{i}",
                parameters=tuple(params),
                procedure_names=tuple(f"proc{k}" for k in range(rng.randint(0, 2))),
            )
        )
    return ServiceManifest(
        manifest_id=f"urn:rt:manifest:{rng.randint(0, 999)}",
        module_name="Module",
        services=tuple(services),
    )


def random_requirement(rng: random.Random) -> Requirement:
    constraints = []
    for i in range(rng.randint(0, 3)):
        if rng.random() < 0.5:
            demand = rng.uniform(-5, 5)
        else:
            low = rng.uniform(-5, 5)
            demand = ValueRange(low, low + rng.uniform(0, 5))
        constraints.append(
            AttributeConstraint(
                attribute=f"attr{i}",
                demand=demand,
                unit="u" if rng.random() < 0.4 else None,
                semantic_id=f"urn:rt:prop:{i}" if rng.random() < 0.4 else None,
            )
        )
    return Requirement(
        label=f"requirement {rng.randint(0, 999)}",
        required_capability=f"urn:rt:cap:{rng.randint(0, 99)}",
        constraints=tuple(constraints),
    )
