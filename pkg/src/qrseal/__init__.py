"""Encrypted QR sealing and verification of mark-sheet records."""

from .auth import SealedPayload, VerifyReport, seal, unseal, verify
from .cipher import ttjsa_decrypt, ttjsa_encrypt
from .record import MarkSheetRecord, Subject, parse_record, serialize_record

__version__ = "0.1.0"

__all__ = [
    "MarkSheetRecord",
    "SealedPayload",
    "Subject",
    "VerifyReport",
    "parse_record",
    "seal",
    "serialize_record",
    "ttjsa_decrypt",
    "ttjsa_encrypt",
    "unseal",
    "verify",
]
