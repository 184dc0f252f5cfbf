"""HTTP interface over the repository.

Thin FastAPI wrapper: request bodies are the documented module exchange
formats and are parsed by the owning modules, so the service adds no
semantics of its own. POST /match returns the exact bytes the CLI would
print for the same snapshot; the revision travels in the
X-Repository-Revision header.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .aas import element_to_document, shell_to_document, submodel_to_document
from .matching import render_match_report, requirement_from_document
from .repository import Repository
from .validation import (
    CapmatchError,
    ConflictError,
    DocumentError,
    ResolveError,
    UnknownClassError,
)


class HealthResponse(BaseModel):
    status: str
    revision: int


class RevisionResponse(BaseModel):
    revision: int


class FindingModel(BaseModel):
    severity: str
    code: str
    location: str
    message: str


class ErrorResponse(BaseModel):
    message: str
    findings: list[FindingModel] = []


def _error_response(status_code: int, exc: CapmatchError) -> JSONResponse:
    findings = getattr(exc, "findings", [])
    body = ErrorResponse(
        message=str(exc),
        findings=[FindingModel(**f.as_document()) for f in findings],
    )
    return JSONResponse(status_code=status_code, content=body.model_dump())


async def _json_body(request: Request) -> dict:
    try:
        return json.loads(await request.body())
    except json.JSONDecodeError as exc:
        raise DocumentError(f"request body is not valid JSON: {exc}") from exc


def create_app(repository: Repository | None = None) -> FastAPI:
    app = FastAPI(title="capmatch repository", version="0.1.0")
    app.state.repository = repository if repository is not None else Repository()

    def repo() -> Repository:
        return app.state.repository

    @app.exception_handler(DocumentError)
    async def document_error(_request, exc: DocumentError):
        return _error_response(400, exc)

    @app.exception_handler(ConflictError)
    async def conflict_error(_request, exc: ConflictError):
        return _error_response(409, exc)

    @app.exception_handler(ResolveError)
    async def resolve_error(_request, exc: ResolveError):
        return _error_response(404, exc)

    @app.exception_handler(UnknownClassError)
    async def unknown_class_error(_request, exc: UnknownClassError):
        return _error_response(422, exc)

    @app.get("/health", response_model=HealthResponse)
    async def health():
        return HealthResponse(status="ok", revision=repo().revision)

    @app.get("/shells")
    async def get_shells():
        return [shell_to_document(s) for s in repo().get_shells()]

    @app.get("/shells/{shell_id}")
    async def get_shell(shell_id: str):
        return shell_to_document(repo().get_shell(shell_id))

    @app.put("/shells/{shell_id}", response_model=RevisionResponse)
    async def put_shell(shell_id: str, request: Request):
        document = await _json_body(request)
        if document.get("id") != shell_id:
            raise DocumentError(f"path id {shell_id} does not match document id {document.get('id')}")
        return RevisionResponse(revision=repo().put_shell(document))

    @app.get("/submodels/{submodel_id}")
    async def get_submodel(submodel_id: str):
        return submodel_to_document(repo().get_submodel(submodel_id))

    @app.put("/submodels/{submodel_id}", response_model=RevisionResponse)
    async def put_submodel(submodel_id: str, request: Request):
        document = await _json_body(request)
        if document.get("id") != submodel_id:
            raise DocumentError(f"path id {submodel_id} does not match document id {document.get('id')}")
        return RevisionResponse(revision=repo().put_submodel(document))

    @app.get("/submodels/{submodel_id}/elements/{path}")
    async def get_element(submodel_id: str, path: str):
        element = repo().get_element(submodel_id, path.split("."))
        return element_to_document(element)

    @app.put("/manifests/{manifest_id}", response_model=RevisionResponse)
    async def put_manifest(manifest_id: str, request: Request):
        document = await _json_body(request)
        if document.get("manifestId") != manifest_id:
            raise DocumentError(
                f"path id {manifest_id} does not match document manifestId {document.get('manifestId')}"
            )
        return RevisionResponse(revision=repo().put_manifest(document))

    @app.put("/ontologies/{ontology_iri}", response_model=RevisionResponse)
    async def put_ontology(ontology_iri: str, request: Request):
        document = await _json_body(request)
        if document.get("iri") != ontology_iri:
            raise DocumentError(f"path id {ontology_iri} does not match document iri {document.get('iri')}")
        return RevisionResponse(revision=repo().put_ontology(document))

    @app.post("/match")
    async def post_match(request: Request):
        document = await _json_body(request)
        requirement = requirement_from_document(document)
        candidates, revision = repo().match(requirement)
        report = render_match_report(requirement, candidates)
        return Response(
            content=report,
            media_type="application/json",
            headers={"X-Repository-Revision": str(revision)},
        )

    return app
