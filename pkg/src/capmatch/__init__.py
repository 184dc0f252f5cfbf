"""Capability modeling and matching for MTP-style process modules.

The package grounds module capabilities in a layered process-automation
ontology, represents them as simplified AAS capability submodels, and
answers "which module can perform this process step" queries in two phases:
semantic capability matching followed by attribute feasibility checking.
"""

from .aas import (
    AssetAdministrationShell,
    AssetInformation,
    Capability,
    Environment,
    Property,
    Range,
    Reference,
    ReferenceElement,
    RelationshipElement,
    Submodel,
    SubmodelElementCollection,
    ValueType,
    dereference,
    external_reference,
    model_reference,
    parse_environment,
    resolve,
    serialize_environment,
    validate_environment,
)
from .capability import (
    Attribute,
    CapabilityDescriptor,
    CapabilityEntry,
    CapabilitySubmodelSpec,
    SkillRef,
    ValueRange,
    build_capability_submodel,
    dosing_example,
    extract_capabilities,
)
from .manifest import (
    Param,
    Service,
    ServiceManifest,
    SkillDescriptor,
    link_skills,
    parse_manifest,
    scaffold_capability_submodel,
    serialize_manifest,
)
from .matching import (
    AttributeConstraint,
    CandidateMatch,
    Feasibility,
    FeasibilityStatus,
    MatchDegree,
    Requirement,
    check_feasibility,
    explain,
    match_capability,
    parse_requirement,
    render_match_report,
)
from .ontology import (
    CapabilityClass,
    CapabilityKind,
    ClassificationRule,
    MaterialConstraint,
    MaterialRole,
    Ontology,
    OntologyStack,
    Quantifier,
    StateOfMatter,
    builtin_process_ontology,
    load_ontology,
    merge_stack,
    serialize_ontology,
    validate_stack,
)
from .reasoner import MaterialSet, ancestors, classify, realization_combos, rule_satisfied, subsumes
from .repository import Repository, RepositorySnapshot
from .validation import ConflictError, DocumentError, Finding, ResolveError, UnknownClassError

__version__ = "0.1.0"
