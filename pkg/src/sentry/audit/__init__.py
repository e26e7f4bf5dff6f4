"""Tamper-evident alert records.

An export bundles an alert snapshot with a SHA-256 digest over the
concatenated alert id and endpoint id, rendered as 64 lowercase hex
characters.  Plain concatenation is ambiguous by design of the upstream
scheme (("1","PC-A") and ("1P","C-A") collide); ``hash_version=2`` switches
to a length-prefixed encoding that removes the ambiguity and additionally
covers the full record.
"""

from sentry.audit.records import (
    AlertExport,
    MalformedExport,
    MissingAlert,
    VerifyResult,
    export_alert,
    generate_hash,
    generate_hash_v2,
    verify_export,
)

__all__ = [
    "AlertExport",
    "MalformedExport",
    "MissingAlert",
    "VerifyResult",
    "export_alert",
    "generate_hash",
    "generate_hash_v2",
    "verify_export",
]
