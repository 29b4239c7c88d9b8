"""Exception hierarchy. Every error carries a stable machine-readable code."""

from __future__ import annotations


class TbmError(Exception):
    """Base class for all package errors."""

    code = "error"


class InvalidInputError(TbmError, ValueError):
    """A value violates a domain invariant; names the offending field."""

    code = "invalid_input"

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnsupportedMuckComboError(TbmError, ValueError):
    """Muck geometry flags that do not map to a supported category."""

    code = "unsupported_muck_combination"


class TrainingDivergedError(TbmError, RuntimeError):
    """Training loss became NaN; carries the iteration index."""

    code = "training_diverged"

    def __init__(self, iteration: int):
        self.iteration = iteration
        super().__init__(f"training loss is NaN at iteration {iteration}")


class MapeUndefinedError(TbmError, ValueError):
    """MAPE requested with zero truth entries; lists the offending indices."""

    code = "mape_undefined"

    def __init__(self, indices: list[int]):
        self.indices = indices
        super().__init__(f"MAPE undefined: zero truth values at indices {indices}")


class NoFeasiblePointError(TbmError, RuntimeError):
    """Every grid point produced an infeasible (non-positive) prediction."""

    code = "no_feasible_point"

    def __init__(self, feasible_fraction: float = 0.0):
        self.feasible_fraction = feasible_fraction
        super().__init__("no feasible grid point (all predictions non-positive)")


class CsvFormatError(TbmError, ValueError):
    """Malformed CSV input; names row and column where known."""

    code = "csv_format"


class BundleFormatError(TbmError, ValueError):
    """Malformed or truncated persisted artifact; nothing is partially loaded."""

    code = "bundle_format"


class UnsupportedSchemaError(TbmError, ValueError):
    """Persisted artifact written with an unsupported schema version."""

    code = "unsupported_schema"

    def __init__(self, found: str, supported: str):
        self.found = found
        self.supported = supported
        super().__init__(f"unsupported schema_version {found!r} (supported: {supported!r})")
