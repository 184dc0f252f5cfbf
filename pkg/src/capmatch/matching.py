"""Two-phase module selection: capability matching plus feasibility checking.

Phase 1 compares a required abstract capability against every capability
descriptor in an environment (exact annotation, specialization, or coverage
of a realization combo). Phase 2 checks the requirement's attribute
constraints against the offered attribute values or ranges. Every candidate
carries a machine-readable explanation tree.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum

from .aas import Environment
from .capability import Attribute, CapabilityDescriptor, ValueRange, extract_capabilities
from .ontology import OntologyStack
from .reasoner import realization_combos, subsumes
from .validation import DocumentError, UnknownClassError, check_fields, get_list, get_str

REL_EPS = 1e-9


class MatchDegree(Enum):
    EXACT = "Exact"
    SUBSUMED = "Subsumed"
    REALIZABLE = "Realizable"

    @property
    def rank(self) -> int:
        return {"Exact": 0, "Subsumed": 1, "Realizable": 2}[self.value]


class FeasibilityStatus(Enum):
    FEASIBLE = "Feasible"
    UNKNOWN = "Unknown"
    INFEASIBLE = "Infeasible"

    @property
    def rank(self) -> int:
        return {"Feasible": 0, "Unknown": 1, "Infeasible": 2}[self.value]


@dataclass(frozen=True)
class AttributeConstraint:
    attribute: str
    demand: float | int | str | bool | ValueRange
    unit: str | None = None
    semantic_id: str | None = None

    def __post_init__(self):
        if not self.attribute:
            raise ValueError("attribute selector must be non-empty")

    @property
    def selector(self) -> str:
        return self.semantic_id or self.attribute


@dataclass(frozen=True)
class Requirement:
    label: str
    required_capability: str
    constraints: tuple[AttributeConstraint, ...] = ()


@dataclass(frozen=True)
class Violation:
    constraint: str
    offered: str
    reason: str


@dataclass(frozen=True)
class Feasibility:
    status: FeasibilityStatus
    violations: tuple[Violation, ...] = ()
    missing: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status == FeasibilityStatus.INFEASIBLE and not self.violations:
            raise ValueError("infeasible verdicts carry at least one violation")
        if self.status == FeasibilityStatus.UNKNOWN and not self.missing:
            raise ValueError("unknown verdicts carry at least one missing selector")


FEASIBLE = Feasibility(FeasibilityStatus.FEASIBLE)


@dataclass(frozen=True)
class ExplanationStep:
    kind: str  # SemanticIdEquals | SubclassOf | RealizationCombo | ConstraintCheck
    detail: str
    iris: tuple[str, ...] = ()
    children: tuple["ExplanationStep", ...] = ()


@dataclass(frozen=True)
class CandidateMatch:
    shell_id: str
    submodel_id: str
    capability_path: tuple[str, ...]
    degree: MatchDegree
    feasibility: Feasibility
    explanation: tuple[ExplanationStep, ...]
    combo: frozenset[str] | None = None  # populated for Realizable matches

    def sort_key(self):
        combo_key = tuple(sorted(self.combo)) if self.combo else ()
        return (
            self.degree.rank,
            self.feasibility.status.rank,
            self.shell_id,
            self.submodel_id,
            self.capability_path,
            combo_key,
        )


def local_name(iri: str) -> str:
    return re.split(r"[:#/]", iri)[-1] or iri


# --- phase 1: capability matching ---------------------------------------------


def collect_module_descriptors(
    env: Environment, stack: OntologyStack | None
) -> list[tuple[str, CapabilityDescriptor]]:
    """(shellId, descriptor) pairs for every capability submodel a shell references."""
    pairs: list[tuple[str, CapabilityDescriptor]] = []
    for shell in env.shells:
        seen: set[str] = set()
        for ref in shell.submodel_refs:
            submodel_id = ref.keys[0].value
            if submodel_id in seen:
                continue
            seen.add(submodel_id)
            submodel = env.submodel(submodel_id)
            if submodel is None:
                continue
            descriptors, _ = extract_capabilities(submodel, stack)
            pairs.extend((shell.id, d) for d in descriptors)
    return pairs


def class_matches(stack: OntologyStack, general: str, specific: str) -> bool:
    """specific == general, or specific is a resolvable strict specialization."""
    if specific == general:
        return True
    if general in stack.merged and specific in stack.merged:
        return subsumes(stack, general, specific)
    return False


def match_capability(req: Requirement, env: Environment, stack: OntologyStack) -> list[CandidateMatch]:
    """All candidates for a requirement, annotated with feasibility, sorted."""
    if req.required_capability not in stack.merged:
        raise UnknownClassError(req.required_capability)

    pairs = collect_module_descriptors(env, stack)
    candidates: list[CandidateMatch] = []

    for shell_id, descriptor in pairs:
        if descriptor.abstract_capability == req.required_capability:
            degree = MatchDegree.EXACT
            steps = [
                ExplanationStep(
                    kind="SemanticIdEquals",
                    detail=f"SemanticIdEquals({req.required_capability})",
                    iris=(req.required_capability,),
                )
            ]
        elif descriptor.abstract_capability in stack.merged and subsumes(
            stack, req.required_capability, descriptor.abstract_capability
        ):
            degree = MatchDegree.SUBSUMED
            steps = [_subclass_step(descriptor.abstract_capability, req.required_capability)]
        else:
            continue
        feasibility, constraint_steps = _feasibility_with_steps(descriptor, req.constraints)
        candidates.append(
            CandidateMatch(
                shell_id=shell_id,
                submodel_id=descriptor.submodel_id,
                capability_path=descriptor.path,
                degree=degree,
                feasibility=feasibility,
                explanation=tuple(steps + constraint_steps),
            )
        )

    combos = realization_combos(stack, req.required_capability)
    if combos:
        by_shell: dict[str, list[CapabilityDescriptor]] = {}
        for shell_id, descriptor in pairs:
            by_shell.setdefault(shell_id, []).append(descriptor)
        for shell_id in sorted(by_shell):
            descriptors = by_shell[shell_id]
            for combo in combos:
                covering = _cover_combo(stack, combo, descriptors)
                if covering is None:
                    continue
                feasibility, constraint_steps = _realizable_feasibility(stack, covering, req.constraints)
                combo_step = ExplanationStep(
                    kind="RealizationCombo",
                    detail=f"RealizationCombo({{{', '.join(sorted(local_name(f) for f in combo))}}})",
                    iris=tuple(sorted(combo)),
                    children=tuple(
                        _coverage_step(function, covering[function]) for function in sorted(combo)
                    ),
                )
                first = min(covering.values(), key=lambda d: (d.submodel_id, d.path))
                candidates.append(
                    CandidateMatch(
                        shell_id=shell_id,
                        submodel_id=first.submodel_id,
                        capability_path=(),
                        degree=MatchDegree.REALIZABLE,
                        feasibility=feasibility,
                        explanation=tuple([combo_step] + constraint_steps),
                        combo=combo,
                    )
                )

    candidates.sort(key=CandidateMatch.sort_key)
    return candidates


def _subclass_step(specific: str, general: str) -> ExplanationStep:
    return ExplanationStep(
        kind="SubclassOf",
        detail=f"SubclassOf({local_name(specific)}, {local_name(general)})",
        iris=(specific, general),
    )


def _coverage_step(function: str, descriptor: CapabilityDescriptor) -> ExplanationStep:
    if descriptor.abstract_capability == function:
        return ExplanationStep(
            kind="SemanticIdEquals",
            detail=f"SemanticIdEquals({function})",
            iris=(function,),
        )
    return _subclass_step(descriptor.abstract_capability, function)


def _cover_combo(
    stack: OntologyStack, combo: frozenset[str], descriptors: list[CapabilityDescriptor]
) -> dict[str, CapabilityDescriptor] | None:
    """Map every combo member onto a covering descriptor, or None if uncovered."""
    covering: dict[str, CapabilityDescriptor] = {}
    # sorted iteration keeps the covering map (and everything derived from
    # it) independent of set hash order
    for function in sorted(combo):
        matches = [d for d in descriptors if class_matches(stack, function, d.abstract_capability)]
        if not matches:
            return None
        covering[function] = min(matches, key=lambda d: (d.submodel_id, d.path))
    return covering


# --- phase 2: feasibility -------------------------------------------------------


def check_feasibility(
    descriptors: CapabilityDescriptor | list[CapabilityDescriptor],
    constraints: tuple[AttributeConstraint, ...] | list[AttributeConstraint],
) -> Feasibility:
    """Evaluate attribute constraints against the offered attribute pool.

    An empty constraint list is vacuously feasible. Attributes are located by
    semanticId first, then by case-insensitive name; a constraint whose
    attribute cannot be located contributes to an Unknown verdict.
    """
    feasibility, _ = _feasibility_with_steps(descriptors, constraints)
    return feasibility


def _feasibility_with_steps(
    descriptors: CapabilityDescriptor | list[CapabilityDescriptor],
    constraints: tuple[AttributeConstraint, ...] | list[AttributeConstraint],
) -> tuple[Feasibility, list[ExplanationStep]]:
    if isinstance(descriptors, CapabilityDescriptor):
        descriptors = [descriptors]
    pool = [a for d in descriptors for a in d.attributes]

    violations: list[Violation] = []
    missing: list[str] = []
    steps: list[ExplanationStep] = []
    for constraint in constraints:
        attribute = _locate(pool, constraint)
        if attribute is None:
            missing.append(constraint.selector)
            steps.append(_constraint_step(constraint, "missing"))
            continue
        violation = _evaluate(attribute, constraint)
        if violation is None:
            steps.append(_constraint_step(constraint, "satisfied"))
        else:
            violations.append(violation)
            steps.append(_constraint_step(constraint, f"violated: {violation.reason}"))
    return _combine(violations, missing), steps


def _combine(violations: list[Violation], missing: list[str]) -> Feasibility:
    if violations:
        return Feasibility(FeasibilityStatus.INFEASIBLE, violations=tuple(violations))
    if missing:
        return Feasibility(FeasibilityStatus.UNKNOWN, missing=tuple(missing))
    return FEASIBLE


def _constraint_step(constraint: AttributeConstraint, outcome: str) -> ExplanationStep:
    iris = (constraint.semantic_id,) if constraint.semantic_id else ()
    return ExplanationStep(
        kind="ConstraintCheck",
        detail=f"ConstraintCheck({constraint.attribute}: {outcome})",
        iris=iris,
    )


def _locate(pool: list[Attribute], constraint: AttributeConstraint) -> Attribute | None:
    if constraint.semantic_id is not None:
        for attribute in pool:
            if attribute.semantic_id == constraint.semantic_id:
                return attribute
    lowered = constraint.attribute.casefold()
    for attribute in pool:
        if attribute.name.casefold() == lowered:
            return attribute
    return None


def _realizable_feasibility(
    stack: OntologyStack,
    covering: dict[str, CapabilityDescriptor],
    constraints: tuple[AttributeConstraint, ...],
) -> tuple[Feasibility, list[ExplanationStep]]:
    """Constraints on realizable matches never pass without an explicit target.

    A constraint is only checked when its semanticId names the process
    function (or a generalization of a component's class) it applies to;
    everything else stays Unknown so the engine does not overclaim.
    """
    violations: list[Violation] = []
    missing: list[str] = []
    steps: list[ExplanationStep] = []
    components: list[CapabilityDescriptor] = []
    seen_paths: set[tuple[str, tuple[str, ...]]] = set()
    for function in sorted(covering):
        descriptor = covering[function]
        key = (descriptor.submodel_id, descriptor.path)
        if key not in seen_paths:
            seen_paths.add(key)
            components.append(descriptor)

    for constraint in constraints:
        targets = []
        if constraint.semantic_id is not None and constraint.semantic_id in stack.merged:
            targets = [
                d for d in components if class_matches(stack, constraint.semantic_id, d.abstract_capability)
            ]
        if not targets:
            missing.append(constraint.selector)
            steps.append(_constraint_step(constraint, "missing"))
            continue
        satisfied = False
        first_violation: Violation | None = None
        for descriptor in targets:
            attribute = _locate(list(descriptor.attributes), constraint)
            if attribute is None:
                continue
            violation = _evaluate(attribute, constraint)
            if violation is None:
                satisfied = True
                break
            if first_violation is None:
                first_violation = violation
        if satisfied:
            steps.append(_constraint_step(constraint, "satisfied"))
        elif first_violation is not None:
            violations.append(first_violation)
            steps.append(_constraint_step(constraint, f"violated: {first_violation.reason}"))
        else:
            missing.append(constraint.selector)
            steps.append(_constraint_step(constraint, "missing"))
    return _combine(violations, missing), steps


# --- value comparison -----------------------------------------------------------


def _leq(x: float, y: float) -> bool:
    return x <= y or math.isclose(x, y, rel_tol=REL_EPS)


def _close(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=REL_EPS)


def _format_offered(attribute: Attribute) -> str:
    unit = f" {attribute.unit}" if attribute.unit else ""
    if isinstance(attribute.value, ValueRange):
        return f"[{attribute.value.low}, {attribute.value.high}]{unit}"
    return f"{attribute.value}{unit}"


def _evaluate(attribute: Attribute, constraint: AttributeConstraint) -> Violation | None:
    offered = _format_offered(attribute)
    if constraint.unit is not None and attribute.unit is not None and constraint.unit != attribute.unit:
        return Violation(constraint.selector, offered, "unit mismatch")

    demand = constraint.demand
    value = attribute.value
    demand_numeric = isinstance(demand, (int, float, ValueRange)) and not isinstance(demand, bool)
    offered_numeric = isinstance(value, (int, float, ValueRange)) and not isinstance(value, bool)
    if demand_numeric != offered_numeric:
        return Violation(constraint.selector, offered, "type mismatch")

    if isinstance(demand, ValueRange):
        if isinstance(value, ValueRange):
            if _leq(value.low, demand.low) and _leq(demand.high, value.high):
                return None
            return Violation(constraint.selector, offered, "demanded interval not contained in offered range")
        if offered_numeric and _close(demand.low, float(value)) and _close(demand.high, float(value)):
            return None
        return Violation(constraint.selector, offered, "offered point does not cover demanded interval")

    if isinstance(value, ValueRange):
        point = float(demand)
        if _leq(value.low, point) and _leq(point, value.high):
            return None
        return Violation(constraint.selector, offered, "demanded value outside offered range")

    if demand_numeric:
        if _close(float(demand), float(value)):
            return None
        return Violation(constraint.selector, offered, "demanded value differs from offered value")

    if demand == value:
        return None
    return Violation(constraint.selector, offered, "demanded value differs from offered value")


# --- explanations ----------------------------------------------------------------


def explain(match: CandidateMatch) -> str:
    """Deterministic human-readable rendering, one line per step."""
    lines: list[str] = []

    def render(step: ExplanationStep, depth: int):
        indent = "  " * depth
        if step.kind == "SemanticIdEquals":
            lines.append(f"{indent}semanticId equals {step.iris[0]}")
        elif step.kind == "SubclassOf":
            specific, general = step.iris
            lines.append(f"{indent}{local_name(specific)} ⊑ {local_name(general)} (subclassOf)")
        elif step.kind == "RealizationCombo":
            names = ", ".join(sorted(local_name(iri) for iri in step.iris))
            lines.append(f"{indent}realizable via combo {{{names}}}")
        else:
            lines.append(f"{indent}{step.detail}")
        for child in step.children:
            render(child, depth + 1)

    for step in match.explanation:
        render(step, 0)
    return "\n".join(lines)


# --- documents --------------------------------------------------------------------


def parse_requirement(document: str) -> Requirement:
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"requirement syntax error: {exc}") from exc
    return requirement_from_document(raw)


def requirement_from_document(raw: object) -> Requirement:
    check_fields(raw, "requirement", ("label", "requiredCapability"), ("constraints",))
    constraints = []
    for i, c in enumerate(get_list(raw, "constraints", "requirement", [])):
        path = f"requirement.constraints[{i}]"
        check_fields(c, path, ("attribute",), ("semanticId", "point", "interval", "unit"))
        if ("point" in c) == ("interval" in c):
            raise DocumentError(f"{path}: exactly one of 'point' or 'interval' required")
        if "interval" in c:
            interval = c["interval"]
            check_fields(interval, f"{path}.interval", ("low", "high"))
            low, high = interval["low"], interval["high"]
            for bound, name in ((low, "low"), (high, "high")):
                if isinstance(bound, bool) or not isinstance(bound, (int, float)):
                    raise DocumentError(f"{path}.interval.{name}: expected a number")
            if low > high:
                raise DocumentError(f"{path}.interval: low {low} exceeds high {high}")
            demand: float | int | str | bool | ValueRange = ValueRange(float(low), float(high))
        else:
            demand = c["point"]
            if not isinstance(demand, (str, int, float, bool)):
                raise DocumentError(f"{path}.point: expected a scalar")
        try:
            constraints.append(
                AttributeConstraint(
                    attribute=get_str(c, "attribute", path),
                    demand=demand,
                    unit=get_str(c, "unit", path) if "unit" in c else None,
                    semantic_id=get_str(c, "semanticId", path) if "semanticId" in c else None,
                )
            )
        except ValueError as exc:
            raise DocumentError(f"{path}: {exc}") from exc
    return Requirement(
        label=get_str(raw, "label", "requirement"),
        required_capability=get_str(raw, "requiredCapability", "requirement"),
        constraints=tuple(constraints),
    )


def serialize_requirement(req: Requirement, indent: int | None = 2) -> str:
    return json.dumps(requirement_to_document(req), indent=indent, ensure_ascii=False)


def requirement_to_document(req: Requirement) -> dict:
    constraints = []
    for c in req.constraints:
        doc: dict = {"attribute": c.attribute}
        if c.semantic_id is not None:
            doc["semanticId"] = c.semantic_id
        if isinstance(c.demand, ValueRange):
            doc["interval"] = {"low": c.demand.low, "high": c.demand.high}
        else:
            doc["point"] = c.demand
        if c.unit is not None:
            doc["unit"] = c.unit
        constraints.append(doc)
    return {"label": req.label, "requiredCapability": req.required_capability, "constraints": constraints}


def step_to_document(step: ExplanationStep) -> dict:
    return {
        "kind": step.kind,
        "detail": step.detail,
        "iris": list(step.iris),
        "children": [step_to_document(c) for c in step.children],
    }


def candidate_to_document(candidate: CandidateMatch) -> dict:
    feasibility: dict = {
        "status": candidate.feasibility.status.value,
        "violations": [
            {"constraint": v.constraint, "offered": v.offered, "reason": v.reason}
            for v in candidate.feasibility.violations
        ],
        "missing": list(candidate.feasibility.missing),
    }
    doc = {
        "shellId": candidate.shell_id,
        "submodelId": candidate.submodel_id,
        "capabilityPath": list(candidate.capability_path),
        "degree": candidate.degree.value,
        "feasibility": feasibility,
        "explanation": [step_to_document(s) for s in candidate.explanation],
    }
    if candidate.combo is not None:
        doc["combo"] = sorted(candidate.combo)
    return doc


def render_match_report(req: Requirement, candidates: list[CandidateMatch]) -> str:
    """Stable report serialization shared by the CLI and the HTTP service."""
    document = {
        "requirement": req.label,
        "requiredCapability": req.required_capability,
        "candidates": [candidate_to_document(c) for c in candidates],
    }
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
