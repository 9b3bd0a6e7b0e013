"""Errors with stable machine-readable codes.

Codes are part of the public contract: they surface unchanged through the
CLI (exit code 1) and the HTTP service (``error.code`` in the response body).
"""

from __future__ import annotations


class DomainError(Exception):
    """A domain-level failure identified by a stable code.

    ``context`` carries optional structured detail (node name, row key, ...)
    that the service includes in error responses.
    """

    def __init__(self, code: str, message: str, **context: object) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.context = {k: v for k, v in context.items() if v is not None}

    def to_dict(self) -> dict:
        payload: dict = {"code": self.code, "message": self.message}
        payload.update(self.context)
        return payload
