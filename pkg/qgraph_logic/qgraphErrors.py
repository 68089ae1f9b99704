# qgraph_logic/qgraphErrors.py - Exception hierarchy shared by every qgraph module
from typing import Any, Dict, Optional


# === Base Error ===
# Every library error carries the CLI exit code it maps to
class QGraphError(Exception):
    exit_code = 2

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self), "exit_code": self.exit_code}


# === Input Errors (exit code 2) ===
class DimensionError(QGraphError):
    pass


class ValidationError(QGraphError):
    pass


class DegenerateInputError(QGraphError):
    pass


class ContractViolationError(QGraphError):
    pass


# Raised while loading instance files; path is a JSON path like $.payload.kraus[2][0][1]
class SchemaError(ValidationError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["path"] = self.path
        return data


# === Internal Inconsistency (exit code 3) ===
# Two independent algorithms disagreed; both sub-results travel with the error
class InconsistencyError(QGraphError):
    exit_code = 3

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["details"] = self.details
        return data
