from __future__ import annotations


class SodError(ValueError):
    """Raised when an operation cannot produce a result.

    ``code`` is a short stable identifier (``"non-integral"``,
    ``"missing-witness"``, ...) that callers and the CLI can switch on.
    """

    def __init__(self, code: str, message: str = "", **details):
        self.code = code
        self.details = details
        super().__init__(f"{code}: {message}" if message else code)
