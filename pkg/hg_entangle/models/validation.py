"""
Validation for state documents and numerical self-checks

Schema checks on serialized two-photon states run through jsonschema so that
every problem is reported with its field path; numerical self-checks collect
their findings in a ValidationResult.
"""

from typing import Any, Dict, List, Optional

import jsonschema
import structlog

logger = structlog.get_logger(__name__)


class ValidationResult:
    """Outcome of a validation pass"""

    def __init__(
        self,
        is_valid: bool = True,
        errors: Optional[List[str]] = None,
        warnings: Optional[List[str]] = None,
    ):
        self.is_valid = is_valid
        self.errors = errors or []
        self.warnings = warnings or []

    def add_error(self, error: str) -> None:
        self.errors.append(error)
        self.is_valid = False

    def add_warning(self, warning: str) -> None:
        self.warnings.append(warning)

    def __bool__(self) -> bool:
        return self.is_valid

    def __str__(self) -> str:
        if self.is_valid:
            warnings_str = f" ({len(self.warnings)} warnings)" if self.warnings else ""
            return f"Valid{warnings_str}"
        return f"Invalid: {'; '.join(self.errors)}"


_LABEL = {
    "type": "array",
    "items": {"type": "integer"},
    "minItems": 2,
    "maxItems": 2,
}

STATE_DOCUMENT_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["basis", "truncation_order", "entries"],
    "properties": {
        "basis": {"type": "string", "enum": ["hg", "lg"]},
        "truncation_order": {"type": "integer", "minimum": 0},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["s", "i", "re", "im"],
                "properties": {
                    "s": _LABEL,
                    "i": _LABEL,
                    "re": {"type": "number"},
                    "im": {"type": "number"},
                },
                "additionalProperties": False,
            },
        },
    },
}

_validator = jsonschema.Draft7Validator(STATE_DOCUMENT_SCHEMA)


def _path(error: jsonschema.ValidationError) -> str:
    return "/".join(str(part) for part in error.absolute_path) or "<root>"


def validate_state_document(document: Any) -> ValidationResult:
    """Check a decoded state document against the schema, one error per violation."""
    result = ValidationResult()
    for error in sorted(_validator.iter_errors(document), key=_path):
        result.add_error(f"{_path(error)}: {error.message}")
    if not result:
        logger.debug("State document rejected", errors=len(result.errors))
    return result


def first_error_path(document: Any) -> Optional[str]:
    """Field path of the first schema violation, or None if the document is valid."""
    errors = sorted(_validator.iter_errors(document), key=_path)
    return _path(errors[0]) if errors else None


def check_tolerance(
    result: ValidationResult, name: str, value: float, limit: float, strict: bool = True
) -> None:
    """Record an error (or a warning if not strict) when ``value`` exceeds ``limit``."""
    if value <= limit:
        return
    message = f"{name} = {value:.3e} exceeds {limit:.1e}"
    if strict:
        result.add_error(message)
    else:
        result.add_warning(message)
