"""Exception types shared across the package."""


class OverlapSpreadError(Exception):
    """Base class for package-specific failures."""


class ParseError(OverlapSpreadError, ValueError):
    """Malformed input text. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class ManifestError(OverlapSpreadError, ValueError):
    """Invalid or incomplete run manifest."""


class BudgetExceededError(OverlapSpreadError, RuntimeError):
    """A per-source route enumeration exceeded its expansion budget."""
