"""Shared validation findings, error types, and strict JSON helpers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    """One validation finding. Findings are data, not exceptions."""

    severity: str
    code: str
    location: str
    message: str

    def as_tsv(self) -> str:
        return f"{self.severity.upper()}\t{self.location}\t{self.message}"

    def as_document(self) -> dict[str, str]:
        return {
            "severity": self.severity,
            "code": self.code,
            "location": self.location,
            "message": self.message,
        }


def error(code: str, location: str, message: str) -> Finding:
    return Finding(SEVERITY_ERROR, code, location, message)


def warning(code: str, location: str, message: str) -> Finding:
    return Finding(SEVERITY_WARNING, code, location, message)


def sort_findings(findings: Iterable[Finding]) -> list[Finding]:
    # Deterministic report order: location, then message, then code.
    return sorted(findings, key=lambda f: (f.location, f.message, f.code))


def has_errors(findings: Iterable[Finding]) -> bool:
    return any(f.severity == SEVERITY_ERROR for f in findings)


class CapmatchError(Exception):
    """Base class for all errors raised by this package."""


class DocumentError(CapmatchError):
    """A document cannot be parsed or violates its format contract.

    Carries optional findings when the rejection maps onto validator
    findings (invariant violations with path context).
    """

    def __init__(self, message: str, findings: Sequence[Finding] = ()):
        super().__init__(message)
        self.findings = list(findings)


class UnknownClassError(CapmatchError):
    """A class IRI does not resolve in the ontology stack."""

    def __init__(self, iri: str):
        super().__init__(f"unknown class IRI: {iri}")
        self.iri = iri


class ResolveError(CapmatchError):
    """An AAS reference or idShort path does not resolve."""

    def __init__(self, message: str, segment: str | None = None, walked: Sequence[str] = ()):
        super().__init__(message)
        self.segment = segment
        self.walked = list(walked)


class ConflictError(CapmatchError):
    """A write would break invariants of already-stored documents."""


# --- strict JSON object helpers -------------------------------------------
#
# Every exchange format rejects unknown fields; these helpers keep the
# per-module parsers small and the error messages uniform.


def check_fields(obj: Any, path: str, required: Sequence[str], optional: Sequence[str] = ()) -> dict:
    if not isinstance(obj, dict):
        raise DocumentError(f"{path}: expected an object, got {type(obj).__name__}")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise DocumentError(f"{path}: unknown field '{key}'")
    for key in required:
        if key not in obj:
            raise DocumentError(f"{path}: missing required field '{key}'")
    return obj


def get_str(obj: dict, key: str, path: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise DocumentError(f"{path}.{key}: expected a string")
    return value


def get_list(obj: dict, key: str, path: str, default: list | None = None) -> list:
    if key not in obj:
        if default is not None:
            return default
        raise DocumentError(f"{path}: missing required field '{key}'")
    value = obj[key]
    if not isinstance(value, list):
        raise DocumentError(f"{path}.{key}: expected a list")
    return value


def get_number(obj: dict, key: str, path: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"{path}.{key}: expected a number")
    return float(value)
