"""Seal mark-sheet records into QR codes, and unseal/verify them again."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from . import cipher
from .bitstream import (
    MAX_VERSION,
    MIN_VERSION,
    Mode,
    byte_capacity,
    decode_segments,
    encode_payload,
    get_profile,
)
from .errors import QrSealError, RecordFormatError, UndecodableError
from .matrix import QrMatrix, decode_matrix, encode_matrix
from .record import MarkSheetRecord, diff_records, parse_record, serialize_record

MAGIC = b"QSL1"
HEADER = struct.Struct(">4sHHI")
DEFAULT_LEVEL = "H"
# used once the payload no longer fits a single symbol at the requested level
OVERFLOW_PROFILE = (MAX_VERSION, "L")


@dataclass(frozen=True)
class SealedPayload:
    part_index: int
    part_count: int
    original_length: int
    body: bytes

    def __post_init__(self):
        if not 1 <= self.part_index <= self.part_count:
            raise ValueError(f"part {self.part_index} of {self.part_count} is out of range")

    def to_bytes(self) -> bytes:
        return HEADER.pack(MAGIC, self.part_index, self.part_count, self.original_length) + self.body

    @classmethod
    def from_bytes(cls, data: bytes) -> SealedPayload:
        if len(data) < HEADER.size:
            raise ValueError("sealed payload shorter than its header")
        magic, index, count, length = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        return cls(index, count, length, bytes(data[HEADER.size:]))


@dataclass
class VerifyReport:
    verdict: str
    field_diffs: list = field(default_factory=list)
    histogram_distance: float | None = None
    error: str | None = None

    def render(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.error:
            lines.append(f"error: {self.error}")
        for path, expected, found in self.field_diffs:
            lines.append(f"{path}: sealed {expected!r}, printed {found!r}")
        if self.histogram_distance is not None:
            lines.append(f"histogram distance: {self.histogram_distance:.4f}")
        return "\n".join(lines)


# ---- frequency analysis ----

def frequency_histogram(data) -> list[int]:
    counts = [0] * 256
    for b in bytes(data):
        counts[b] += 1
    return counts


def histogram_distance(h1, h2) -> float:
    """Total variation distance between two byte histograms, in [0, 1]."""
    t1, t2 = sum(h1), sum(h2)
    if t1 == 0 or t2 == 0:
        raise ValueError("histogram with zero total")
    return sum(abs(a / t1 - b / t2) for a, b in zip(h1, h2)) / 2


# ---- sealing ----

def _pick_profile(nbytes, ec_level):
    for version in range(MIN_VERSION, MAX_VERSION + 1):
        profile = get_profile(version, ec_level)
        if byte_capacity(profile) >= nbytes:
            return profile
    return get_profile(*OVERFLOW_PROFILE)


def seal_payloads(ciphertext: cipher.CipherText, chunk: int) -> list[SealedPayload]:
    if chunk < 1:
        raise ValueError("chunk size must be positive")
    body = ciphertext.data
    pieces = [body[i:i + chunk] for i in range(0, len(body), chunk)] or [b""]
    return [
        SealedPayload(i, len(pieces), ciphertext.original_length, piece)
        for i, piece in enumerate(pieces, start=1)
    ]


def seal(record: MarkSheetRecord, passphrase, ec_level: str = DEFAULT_LEVEL,
         version: int | None = None, mask_id: int | None = None) -> list[QrMatrix]:
    """Encrypt ``record`` and lay it out over one or more QR symbols.

    Without ``version`` the smallest version at ``ec_level`` that holds the
    whole payload is used; if none does, the payload is split into parts
    sized for version 10-L. With ``version`` every part uses that version
    at ``ec_level``.
    """
    ct = cipher.ttjsa_encrypt(serialize_record(record), passphrase)
    if version is not None:
        profile = get_profile(version, ec_level)
    else:
        profile = _pick_profile(HEADER.size + len(ct.data), ec_level)
    room = byte_capacity(profile) - HEADER.size
    if room < 1:
        raise ValueError(f"version {profile.version}-{profile.ec_level} cannot hold a sealed header")
    parts = seal_payloads(ct, room)
    if len(parts) > 0xFFFF:
        raise ValueError("payload needs more than 65535 parts")
    matrices = []
    for part in parts:
        raw = part.to_bytes()
        p = profile
        if version is None and part.part_index == part.part_count:
            # a short tail part gets the smallest symbol it fits
            p = _pick_profile(len(raw), ec_level)
        matrices.append(encode_matrix(encode_payload(raw, p), p.version, p.ec_level, mask_id))
    return matrices


def read_payload(m: QrMatrix) -> SealedPayload:
    """Decode one symbol back to its sealed payload."""
    try:
        codewords, version, _, _ = decode_matrix(m)
    except QrSealError as exc:
        raise UndecodableError("qr", str(exc)) from exc
    try:
        segments = decode_segments(codewords, version)
        body = b"".join(s.payload for s in segments if s.mode is Mode.BYTE)
        return SealedPayload.from_bytes(body)
    except (ValueError, EOFError) as exc:
        raise UndecodableError("payload", str(exc)) from exc


def unseal_ciphertext(matrices) -> cipher.CipherText:
    payloads = [read_payload(m) for m in matrices]
    if not payloads:
        raise UndecodableError("parts", "no QR codes given")
    counts = {p.part_count for p in payloads}
    lengths = {p.original_length for p in payloads}
    if len(counts) != 1 or len(lengths) != 1:
        raise UndecodableError("parts", "parts come from different seals")
    count = counts.pop()
    by_index = {}
    for p in payloads:
        if p.part_index in by_index:
            raise UndecodableError("parts", f"duplicate part {p.part_index}")
        by_index[p.part_index] = p
    missing = [i for i in range(1, count + 1) if i not in by_index]
    if missing:
        raise UndecodableError("parts", f"missing part(s) {', '.join(map(str, missing))} of {count}")
    body = b"".join(by_index[i].body for i in range(1, count + 1))
    try:
        return cipher.CipherText(body, lengths.pop())
    except ValueError as exc:
        raise UndecodableError("parts", str(exc)) from exc


def open_ciphertext(ct: cipher.CipherText, passphrase) -> MarkSheetRecord:
    try:
        plain = cipher.ttjsa_decrypt(ct, passphrase)
    except ValueError as exc:
        raise UndecodableError("decrypt", str(exc)) from exc
    try:
        return parse_record(plain)
    except RecordFormatError as exc:
        raise UndecodableError("record", f"decrypted data is not a record ({exc})") from exc


def unseal(matrices, passphrase) -> MarkSheetRecord:
    return open_ciphertext(unseal_ciphertext(matrices), passphrase)


def verify(printed: MarkSheetRecord, matrices, passphrase) -> VerifyReport:
    """Compare a printed record with the one sealed in ``matrices``.

    The verdict comes from an exact field comparison. The histogram distance
    between the printed record's ciphertext and the sealed ciphertext is
    reported alongside as a diagnostic.
    """
    try:
        ct = unseal_ciphertext(matrices)
        sealed = open_ciphertext(ct, passphrase)
    except UndecodableError as exc:
        return VerifyReport("undecodable", error=str(exc))
    diffs = diff_records(sealed, printed)
    printed_ct = cipher.ttjsa_encrypt(serialize_record(printed), passphrase)
    distance = histogram_distance(frequency_histogram(printed_ct.data), frequency_histogram(ct.data))
    return VerifyReport("mismatch" if diffs else "match", diffs, distance)
