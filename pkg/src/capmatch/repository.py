"""In-memory repository of shells, submodels, manifests, and ontologies.

Writers take an exclusive lock and swap in a fresh immutable snapshot;
readers and match queries work on whichever snapshot they grabbed, so every
answer is computed against one consistent revision.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from .aas import (
    AssetAdministrationShell,
    Capability,
    Environment,
    Submodel,
    environment_from_document,
    environment_to_document,
    external_value,
    resolve,
    shell_from_document,
    submodel_from_document,
    validate_environment,
    walk_elements,
)
from .manifest import ServiceManifest, manifest_from_document, manifest_to_document
from .matching import CandidateMatch, Requirement, match_capability
from .ontology import (
    Ontology,
    OntologyStack,
    merge_stack,
    ontology_from_document,
    ontology_to_document,
    validate_stack,
)
from .validation import ConflictError, DocumentError, ResolveError, has_errors


@dataclass(frozen=True)
class RepositorySnapshot:
    environment: Environment
    manifests: tuple[ServiceManifest, ...]
    ontologies: tuple[Ontology, ...]
    stack: OntologyStack
    revision: int

    def manifest(self, manifest_id: str) -> ServiceManifest | None:
        for manifest in self.manifests:
            if manifest.manifest_id == manifest_id:
                return manifest
        return None


def _empty_snapshot() -> RepositorySnapshot:
    return RepositorySnapshot(
        environment=Environment(),
        manifests=(),
        ontologies=(),
        stack=merge_stack([]),
        revision=0,
    )


class Repository:
    """Validating store; every successful mutation bumps the revision by one."""

    def __init__(self):
        self._lock = threading.Lock()
        self._snapshot = _empty_snapshot()

    def snapshot(self) -> RepositorySnapshot:
        return self._snapshot

    @property
    def revision(self) -> int:
        return self._snapshot.revision

    # --- writes ---------------------------------------------------------

    def put_shell(self, document: dict) -> int:
        shell = shell_from_document(document)
        with self._lock:
            snap = self._snapshot
            shells = _upsert(snap.environment.shells, shell, key=lambda s: s.id)
            env = Environment(shells=shells, submodels=snap.environment.submodels)
            self._check_environment(env)
            self._swap(snap, environment=env)
            return self._snapshot.revision

    def put_submodel(self, document: dict) -> int:
        submodel = submodel_from_document(document)
        with self._lock:
            snap = self._snapshot
            submodels = _upsert(snap.environment.submodels, submodel, key=lambda s: s.id)
            env = Environment(shells=snap.environment.shells, submodels=submodels)
            self._check_environment(env)
            self._swap(snap, environment=env)
            return self._snapshot.revision

    def put_manifest(self, document: dict) -> int:
        manifest = manifest_from_document(document)
        with self._lock:
            snap = self._snapshot
            manifests = _upsert(snap.manifests, manifest, key=lambda m: m.manifest_id)
            self._swap(snap, manifests=manifests)
            return self._snapshot.revision

    def put_ontology(self, document: dict) -> int:
        ontology = ontology_from_document(document)
        with self._lock:
            snap = self._snapshot
            ontologies = _upsert(snap.ontologies, ontology, key=lambda o: o.iri)
            stack = merge_stack(list(ontologies))  # raises DocumentError on merge failure
            findings = validate_stack(stack)
            if has_errors(findings):
                raise DocumentError("ontology stack validation failed", findings=findings)
            # Ontology writes must not break semanticId resolution of stored
            # capability submodels.
            for iri in _capability_iris(snap.environment):
                if iri in snap.stack.merged and iri not in stack.merged:
                    raise ConflictError(
                        f"ontology update would break resolution of capability class {iri}"
                    )
            self._swap(snap, ontologies=ontologies, stack=stack)
            return self._snapshot.revision

    # --- reads ----------------------------------------------------------

    def get_shells(self) -> list[AssetAdministrationShell]:
        return list(self._snapshot.environment.shells)

    def get_shell(self, shell_id: str) -> AssetAdministrationShell:
        for shell in self._snapshot.environment.shells:
            if shell.id == shell_id:
                return shell
        raise ResolveError(f"unknown shell id: {shell_id}")

    def get_submodel(self, submodel_id: str) -> Submodel:
        submodel = self._snapshot.environment.submodel(submodel_id)
        if submodel is None:
            raise ResolveError(f"unknown submodel id: {submodel_id}")
        return submodel

    def get_element(self, submodel_id: str, id_short_path: list[str]):
        return resolve(self._snapshot.environment, submodel_id, id_short_path)

    def match(self, requirement: Requirement) -> tuple[list[CandidateMatch], int]:
        snap = self._snapshot
        return match_capability(requirement, snap.environment, snap.stack), snap.revision

    # --- persistence ------------------------------------------------------

    def save(self, path: str | Path):
        snap = self._snapshot
        bundle = {
            "revision": snap.revision,
            "ontologies": [ontology_to_document(o) for o in snap.ontologies],
            "manifests": [manifest_to_document(m) for m in snap.manifests],
            "environment": environment_to_document(snap.environment),
        }
        Path(path).write_text(json.dumps(bundle, indent=2, ensure_ascii=False), encoding="utf-8")

    def load(self, path: str | Path):
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DocumentError(f"store bundle {path}: syntax error: {exc}") from exc
        ontologies = tuple(ontology_from_document(o) for o in raw.get("ontologies", []))
        stack = merge_stack(list(ontologies))
        manifests = tuple(manifest_from_document(m) for m in raw.get("manifests", []))
        environment = environment_from_document(raw.get("environment", {}))
        revision = raw.get("revision", 0)
        with self._lock:
            self._snapshot = RepositorySnapshot(
                environment=environment,
                manifests=manifests,
                ontologies=ontologies,
                stack=stack,
                revision=revision,
            )

    # --- internals --------------------------------------------------------

    def _check_environment(self, env: Environment):
        findings = [f for f in validate_environment(env) if f.severity == "error"]
        if findings:
            raise DocumentError("environment validation failed", findings=findings)

    def _swap(self, previous: RepositorySnapshot, **changes):
        fields = {
            "environment": previous.environment,
            "manifests": previous.manifests,
            "ontologies": previous.ontologies,
            "stack": previous.stack,
        }
        fields.update(changes)
        self._snapshot = RepositorySnapshot(revision=previous.revision + 1, **fields)


def _upsert(items: tuple, item, key) -> tuple:
    replaced = False
    result = []
    for existing in items:
        if key(existing) == key(item):
            result.append(item)
            replaced = True
        else:
            result.append(existing)
    if not replaced:
        result.append(item)
    return tuple(result)


def _capability_iris(env: Environment) -> set[str]:
    iris: set[str] = set()
    for submodel in env.submodels:
        for _, element in walk_elements(submodel):
            if isinstance(element, Capability):
                iri = external_value(element.semantic_id)
                if iri is not None:
                    iris.add(iri)
    return iris
