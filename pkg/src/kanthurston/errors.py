from __future__ import annotations


class KanThurstonError(ValueError):
    """Base error: a message plus a stable machine code and a details payload."""

    default_code = "invalid"

    def __init__(self, message: str, *, code: str | None = None, details: dict | None = None):
        super().__init__(message)
        self.code = str(code or self.default_code)
        self.details = dict(details or {})

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "details": dict(self.details)}


class ComplexError(KanThurstonError):
    default_code = "invalid_complex"


class MapError(KanThurstonError):
    default_code = "invalid_map"


class PolygonError(KanThurstonError):
    default_code = "invalid_polygon"


class PresentationError(KanThurstonError):
    default_code = "invalid_presentation"


class HalfspaceError(KanThurstonError):
    default_code = "halfspace"


class FixedPointError(KanThurstonError):
    default_code = "NO_INVARIANT_CUBE"


class KitError(KanThurstonError):
    default_code = "invalid_kit"


class SchemaError(KanThurstonError):
    default_code = "schema"
