#!/usr/bin/env python3
"""Regenerate the bundled fixture files under fixtures/.

The positive module environments are built through the capability submodel
builder so that relationship endpoints and layout always match what the
package itself produces. Negative fixtures are constructed in memory
(deliberately violating one invariant each) and serialized directly.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from capmatch.aas import (  # noqa: E402
    AssetAdministrationShell,
    AssetInformation,
    AssetKind,
    Capability,
    Environment,
    Property,
    Range,
    Submodel,
    SubmodelElementCollection,
    ValueType,
    environment_to_document,
    external_reference,
    model_reference,
    serialize_environment,
)
from capmatch.capability import (  # noqa: E402
    Attribute,
    CapabilityEntry,
    CapabilitySubmodelSpec,
    SkillRef,
    ValueRange,
    build_capability_submodel,
)
from capmatch.ontology import (  # noqa: E402
    COATING,
    DISTILLING,
    DOSING,
    PRESSURE_ADJUSTING,
    SEPARATING,
    SPRAYING,
    STORING,
    TEMPERING,
    builtin_process_ontology,
    ontology_to_document,
)

FIXTURES = ROOT / "fixtures"

PAINTING_MANIFEST_ID = "urn:demo:manifest:painting"
PAINTING_SM_ID = "urn:demo:sm:painting:capabilities"
PAINTING_SHELL_ID = "urn:demo:shell:painting"
DISTILLING_SM_ID = "urn:demo:sm:distilling:capabilities"
DISTILLING_SHELL_ID = "urn:demo:shell:distilling"
BATCH_SM_ID = "urn:demo:sm:batch:capabilities"
BATCH_SHELL_ID = "urn:demo:shell:batch"


def write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    if not text.endswith("\n"):
        text += "\n"
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def dump(document) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False)


def shell(shell_id: str, id_short: str, asset_id: str, submodel_id: str) -> AssetAdministrationShell:
    return AssetAdministrationShell(
        id=shell_id,
        id_short=id_short,
        asset_information=AssetInformation(global_asset_id=asset_id, asset_kind=AssetKind.TYPE),
        submodel_refs=(model_reference(submodel_id),),
    )


def painting_environment() -> Environment:
    spec = CapabilitySubmodelSpec(
        submodel_id=PAINTING_SM_ID,
        capabilities=(
            CapabilityEntry(
                id_short="Paint",
                abstract_capability=COATING,
                composed_of=("Spray", "Dose", "Store", "PressureAdjust"),
                realized_by=SkillRef(PAINTING_MANIFEST_ID, "Paint"),
            ),
            CapabilityEntry(id_short="Spray", abstract_capability=SPRAYING),
            CapabilityEntry(
                id_short="Dose",
                abstract_capability=DOSING,
                attributes=(Attribute(name="amount", value=ValueRange(0.2, 80.0), unit="ml"),),
            ),
            CapabilityEntry(id_short="Store", abstract_capability=STORING),
            CapabilityEntry(
                id_short="PressureAdjust",
                abstract_capability=PRESSURE_ADJUSTING,
                attributes=(Attribute(name="pressure", value=ValueRange(0.5, 6.0), unit="bar"),),
            ),
        ),
    )
    return Environment(
        shells=(shell(PAINTING_SHELL_ID, "PaintingModule", "urn:demo:asset:painting", PAINTING_SM_ID),),
        submodels=(build_capability_submodel(spec),),
    )


def distilling_environment() -> Environment:
    spec = CapabilitySubmodelSpec(
        submodel_id=DISTILLING_SM_ID,
        capabilities=(CapabilityEntry(id_short="Distil", abstract_capability=DISTILLING),),
    )
    return Environment(
        shells=(shell(DISTILLING_SHELL_ID, "DistillingModule", "urn:demo:asset:distilling", DISTILLING_SM_ID),),
        submodels=(build_capability_submodel(spec),),
    )


def batch_environment() -> Environment:
    spec = CapabilitySubmodelSpec(
        submodel_id=BATCH_SM_ID,
        capabilities=(
            CapabilityEntry(id_short="Dose", abstract_capability=DOSING),
            CapabilityEntry(id_short="Store", abstract_capability=STORING),
            CapabilityEntry(id_short="Temper", abstract_capability=TEMPERING),
        ),
    )
    return Environment(
        shells=(shell(BATCH_SHELL_ID, "BatchModule", "urn:demo:asset:batch", BATCH_SM_ID),),
        submodels=(build_capability_submodel(spec),),
    )


def painting_manifest() -> dict:
    return {
        "manifestId": PAINTING_MANIFEST_ID,
        "moduleName": "PaintingModule",
        "services": [
            {
                "name": "Paint",
                "procedures": ["spray"],
                "parameters": [
                    {"name": "color", "valueType": "String"},
                    {"name": "pressure", "valueType": "Double", "unit": "bar", "min": 0.5, "max": 6.0},
                ],
            },
            {
                "name": "Refill",
                "procedures": [],
                "parameters": [{"name": "reservoir", "valueType": "String"}],
            },
            {"name": "Flush", "procedures": [], "parameters": []},
        ],
    }


def requirement(label: str, capability: str, constraints=()) -> dict:
    return {"label": label, "requiredCapability": capability, "constraints": list(constraints)}


# --- negative fixtures, one finding kind each ---------------------------------


def neg_duplicate_id() -> Environment:
    sm = Submodel(id="urn:bad:sm:dup", id_short="First")
    sm2 = Submodel(id="urn:bad:sm:dup", id_short="Second")
    return Environment(submodels=(sm, sm2))


def neg_idshort_collision() -> Environment:
    sm = Submodel(
        id="urn:bad:sm:collision",
        id_short="Data",
        elements=(
            Property(id_short="Width", value_type=ValueType.DOUBLE, value=1.0),
            Property(id_short="Width", value_type=ValueType.DOUBLE, value=2.0),
        ),
    )
    return Environment(submodels=(sm,))


def neg_min_exceeds_max() -> Environment:
    sm = Submodel(
        id="urn:bad:sm:range",
        id_short="Data",
        elements=(Range(id_short="amount", value_type=ValueType.DOUBLE, min=80.0, max=0.2, unit="ml"),),
    )
    return Environment(submodels=(sm,))


def neg_dangling_composed_of() -> Environment:
    # Build the Paint capability with a composedOf edge, then drop the target.
    spec = CapabilitySubmodelSpec(
        submodel_id="urn:bad:sm:danglingcomposed",
        capabilities=(
            CapabilityEntry(id_short="Paint", abstract_capability=COATING, composed_of=("Spray",)),
            CapabilityEntry(id_short="Spray", abstract_capability=SPRAYING),
        ),
    )
    built = build_capability_submodel(spec)
    pruned = Submodel(
        id=built.id,
        id_short=built.id_short,
        semantic_id=built.semantic_id,
        elements=tuple(e for e in built.elements if e.id_short != "Spray"),
    )
    return Environment(submodels=(pruned,))


def neg_composition_cycle() -> Environment:
    submodel_id = "urn:bad:sm:cycle"
    elements = []
    for name, other, capability_iri in (("A", "B", SPRAYING), ("B", "A", DOSING)):
        elements.append(
            SubmodelElementCollection(
                id_short=name,
                elements=(
                    Capability(id_short="Capability", semantic_id=external_reference(capability_iri)),
                    _composed_of(submodel_id, name, other),
                ),
            )
        )
    return Environment(submodels=(Submodel(id=submodel_id, id_short="Capabilities", elements=tuple(elements)),))


def _composed_of(submodel_id: str, source: str, target: str):
    from capmatch.aas import RelationshipElement
    from capmatch.capability import COMPOSED_OF_SEMANTIC_ID

    return RelationshipElement(
        id_short=f"ComposedOf{target}",
        first=model_reference(submodel_id, source, "Capability"),
        second=model_reference(submodel_id, target, "Capability"),
        semantic_id=external_reference(COMPOSED_OF_SEMANTIC_ID),
    )


def neg_unresolvable_semantic_id() -> Environment:
    spec = CapabilitySubmodelSpec(
        submodel_id="urn:bad:sm:unresolvable",
        capabilities=(CapabilityEntry(id_short="Mystery", abstract_capability="urn:nonexistent:X"),),
    )
    return Environment(submodels=(build_capability_submodel(spec),))


def neg_dangling_realized_by() -> Environment:
    spec = CapabilitySubmodelSpec(
        submodel_id="urn:bad:sm:danglingskill",
        capabilities=(
            CapabilityEntry(
                id_short="Paint",
                abstract_capability=COATING,
                realized_by=SkillRef(PAINTING_MANIFEST_ID, "Polish"),
            ),
        ),
    )
    return Environment(submodels=(build_capability_submodel(spec),))


def neg_unit_mismatch() -> Environment:
    spec = CapabilitySubmodelSpec(
        submodel_id="urn:bad:sm:unitmismatch",
        capabilities=(
            CapabilityEntry(
                id_short="PressureAdjust",
                abstract_capability=PRESSURE_ADJUSTING,
                attributes=(Attribute(name="pressure", value=ValueRange(0.5, 6.0), unit="psi"),),
                realized_by=SkillRef(PAINTING_MANIFEST_ID, "Paint"),
            ),
        ),
    )
    return Environment(submodels=(build_capability_submodel(spec),))


def main():
    for ontology in builtin_process_ontology():
        name = {"urn:c4i:upper": "upper", "urn:c4i:pa": "process-domain", "urn:c4i:fa": "factory-application"}[
            ontology.iri
        ]
        write(FIXTURES / "ontology" / f"{name}.json", dump(ontology_to_document(ontology)))

    write(FIXTURES / "modules" / "painting-manifest.json", dump(painting_manifest()))
    write(FIXTURES / "modules" / "painting-environment.json", serialize_environment(painting_environment()))
    write(FIXTURES / "modules" / "distilling-environment.json", serialize_environment(distilling_environment()))
    write(FIXTURES / "modules" / "batch-environment.json", serialize_environment(batch_environment()))

    write(
        FIXTURES / "requirements" / "separating.json",
        dump(requirement("separate input stream", SEPARATING)),
    )
    write(
        FIXTURES / "requirements" / "coating.json",
        dump(requirement("coat the workpiece", COATING)),
    )
    write(
        FIXTURES / "requirements" / "distilling.json",
        dump(requirement("distil the mixture", DISTILLING)),
    )
    write(
        FIXTURES / "requirements" / "dosing-65ml.json",
        dump(
            requirement(
                "dose 65 ml",
                DOSING,
                [{"attribute": "amount", "point": 65.0, "unit": "ml"}],
            )
        ),
    )
    write(
        FIXTURES / "requirements" / "dosing-100ml.json",
        dump(
            requirement(
                "dose 100 ml",
                DOSING,
                [{"attribute": "amount", "point": 100.0, "unit": "ml"}],
            )
        ),
    )

    negatives = {
        "duplicate-id": neg_duplicate_id,
        "idshort-collision": neg_idshort_collision,
        "min-exceeds-max": neg_min_exceeds_max,
        "dangling-composed-of": neg_dangling_composed_of,
        "composition-cycle": neg_composition_cycle,
        "unresolvable-semantic-id": neg_unresolvable_semantic_id,
        "dangling-realized-by": neg_dangling_realized_by,
        "unit-mismatch": neg_unit_mismatch,
    }
    for name, builder in negatives.items():
        write(FIXTURES / "negative" / f"{name}.json", dump(environment_to_document(builder())))


if __name__ == "__main__":
    main()
