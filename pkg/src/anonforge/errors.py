"""Exception types shared across the package.

Every error carries a machine-readable ``error_code`` (snake_case) used by
the HTTP layer and by CLI stderr output.
"""

from __future__ import annotations


class AnonforgeError(Exception):
    """Base class for all package errors."""

    error_code = "error"

    @property
    def detail(self) -> dict:
        return {}


class SchemaError(AnonforgeError):
    error_code = "schema_error"


class ParseError(AnonforgeError):
    error_code = "parse_error"

    def __init__(self, message: str, row: int, column: str):
        super().__init__(message)
        self.row = row
        self.column = column

    @property
    def detail(self) -> dict:
        return {"row": self.row, "column": self.column}


class EmptyDatasetError(AnonforgeError):
    error_code = "empty_dataset_error"


class RangeError(AnonforgeError):
    error_code = "range_error"


class HierarchyError(AnonforgeError):
    error_code = "hierarchy_error"


class ClusterError(AnonforgeError):
    error_code = "cluster_error"


class WeightError(AnonforgeError):
    error_code = "weight_error"


class UpdateError(AnonforgeError):
    error_code = "update_error"


class OracleError(AnonforgeError):
    error_code = "oracle_error"


class PhaseError(AnonforgeError):
    error_code = "phase_error"


class BusyError(AnonforgeError):
    error_code = "busy"


class ReplayError(AnonforgeError):
    error_code = "replay_error"

    def __init__(self, message: str, seq: int | None = None):
        super().__init__(message)
        self.seq = seq

    @property
    def detail(self) -> dict:
        return {} if self.seq is None else {"seq": self.seq}


class EvalError(AnonforgeError):
    error_code = "eval_error"


class ReportError(AnonforgeError):
    error_code = "report_error"


class NotFoundError(AnonforgeError):
    error_code = "not_found"


class JobError(AnonforgeError):
    error_code = "job_error"
