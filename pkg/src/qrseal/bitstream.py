"""QR data-codeword assembly: segments, capacity profiles, block interleaving.

Only versions 1-10 are supported. The capacity figures come from the
public QR code specification (ISO/IEC 18004) and are stored as two small
tables, EC codewords per block and block count, from which everything else
(data capacity, short/long block split, remainder bits) is derived.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import CapacityError, UnsupportedVersionError
from .rs import rs_encode

MIN_VERSION = 1
MAX_VERSION = 10
EC_LEVELS = ("L", "M", "Q", "H")

#               v1  v2  v3  v4  v5  v6  v7  v8  v9 v10
_EC_PER_BLOCK = {
    "L": (7, 10, 15, 20, 26, 18, 20, 24, 30, 18),
    "M": (10, 16, 26, 18, 24, 16, 18, 22, 22, 26),
    "Q": (13, 22, 18, 26, 18, 24, 18, 22, 20, 24),
    "H": (17, 28, 22, 16, 22, 28, 26, 26, 24, 28),
}
_BLOCK_COUNT = {
    "L": (1, 1, 1, 1, 1, 2, 2, 2, 2, 4),
    "M": (1, 1, 1, 2, 2, 4, 4, 4, 5, 5),
    "Q": (1, 1, 2, 2, 4, 4, 6, 6, 8, 8),
    "H": (1, 1, 2, 4, 4, 4, 5, 6, 8, 8),
}

ALNUM_CHARS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:"
_ALNUM_INDEX = {c: i for i, c in enumerate(ALNUM_CHARS)}

PAD_CODEWORDS = (0xEC, 0x11)


def check_version(version):
    if not isinstance(version, int) or not MIN_VERSION <= version <= MAX_VERSION:
        raise UnsupportedVersionError(f"version must be in {MIN_VERSION}..{MAX_VERSION}, got {version!r}")


def raw_data_modules(version: int) -> int:
    """Modules left for codewords once every function pattern is drawn."""
    check_version(version)
    result = (16 * version + 128) * version + 64
    if version >= 2:
        n_align = version // 7 + 2
        result -= (25 * n_align - 10) * n_align - 55
        if version >= 7:
            result -= 36
    return result


@dataclass(frozen=True)
class QrProfile:
    version: int
    ec_level: str
    total_codewords: int
    ec_per_block: int
    block_count: int

    @property
    def ec_codewords(self) -> int:
        return self.ec_per_block * self.block_count

    @property
    def data_capacity_codewords(self) -> int:
        return self.total_codewords - self.ec_codewords

    @property
    def remainder_bits(self) -> int:
        return raw_data_modules(self.version) - 8 * self.total_codewords

    @property
    def data_block_lengths(self) -> list[int]:
        """Data codewords per block; short blocks come first."""
        short_total = self.total_codewords // self.block_count
        n_short = self.block_count - self.total_codewords % self.block_count
        short_data = short_total - self.ec_per_block
        return [short_data] * n_short + [short_data + 1] * (self.block_count - n_short)


@lru_cache(maxsize=None)
def get_profile(version: int, ec_level: str) -> QrProfile:
    check_version(version)
    if ec_level not in EC_LEVELS:
        raise ValueError(f"unknown EC level {ec_level!r}")
    return QrProfile(
        version=version,
        ec_level=ec_level,
        total_codewords=raw_data_modules(version) // 8,
        ec_per_block=_EC_PER_BLOCK[ec_level][version - 1],
        block_count=_BLOCK_COUNT[ec_level][version - 1],
    )


# ---- bit strings ----

class BitString:
    """Append-only bit buffer with an independent read cursor."""

    def __init__(self, bits=()):
        self.bits = [1 if b else 0 for b in bits]
        self.pos = 0

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __eq__(self, other):
        if isinstance(other, BitString):
            return self.bits == other.bits
        return NotImplemented

    def __repr__(self):
        return f"BitString('{self}')"

    def __str__(self):
        return "".join(map(str, self.bits))

    @classmethod
    def from_bytes(cls, data):
        bs = cls()
        for byte in data:
            bs.append(byte, 8)
        return bs

    def append(self, value: int, width: int):
        if width < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        for i in range(width - 1, -1, -1):
            self.bits.append((value >> i) & 1)

    def extend(self, other):
        self.bits.extend(other)

    def remaining(self) -> int:
        return len(self.bits) - self.pos

    def read(self, width: int) -> int:
        if width > self.remaining():
            raise EOFError(f"need {width} bits, {self.remaining()} left")
        value = 0
        for b in self.bits[self.pos:self.pos + width]:
            value = (value << 1) | b
        self.pos += width
        return value

    def to_bytes(self) -> bytes:
        if len(self.bits) % 8:
            raise ValueError("bit string is not byte aligned")
        return bytes(
            int("".join(map(str, self.bits[i:i + 8])), 2) for i in range(0, len(self.bits), 8)
        )


# ---- segments ----

class Mode(Enum):
    NUMERIC = 0b0001
    ALPHANUMERIC = 0b0010
    BYTE = 0b0100

    def count_bits(self, version: int) -> int:
        check_version(version)
        small = version <= 9
        if self is Mode.NUMERIC:
            return 10 if small else 12
        if self is Mode.ALPHANUMERIC:
            return 9 if small else 11
        return 8 if small else 16


@dataclass(frozen=True)
class Segment:
    mode: Mode
    payload: str | bytes

    def __post_init__(self):
        if self.mode is Mode.BYTE:
            if not isinstance(self.payload, (bytes, bytearray)):
                raise TypeError("byte segments carry bytes")
            object.__setattr__(self, "payload", bytes(self.payload))
        elif self.mode is Mode.NUMERIC:
            if not all(c in "0123456789" for c in self.payload):
                raise ValueError(f"non-digit in numeric segment: {self.payload!r}")
        else:
            for c in self.payload:
                alnum_value(c)

    @classmethod
    def byte(cls, data):
        return cls(Mode.BYTE, bytes(data))


def alnum_value(c: str) -> int:
    try:
        return _ALNUM_INDEX[c]
    except KeyError:
        raise ValueError(f"{c!r} is not in the alphanumeric alphabet") from None


def encode_segment(segment: Segment, version: int) -> BitString:
    payload = segment.payload
    if len(payload) == 0:
        raise ValueError("empty segment")
    width = segment.mode.count_bits(version)
    if len(payload) >> width:
        raise CapacityError(f"{len(payload)} characters exceed the {width}-bit count field")
    bits = BitString()
    bits.append(segment.mode.value, 4)
    bits.append(len(payload), width)
    if segment.mode is Mode.BYTE:
        for b in payload:
            bits.append(b, 8)
    elif segment.mode is Mode.ALPHANUMERIC:
        for i in range(0, len(payload) - 1, 2):
            bits.append(45 * alnum_value(payload[i]) + alnum_value(payload[i + 1]), 11)
        if len(payload) % 2:
            bits.append(alnum_value(payload[-1]), 6)
    else:
        for i in range(0, len(payload), 3):
            chunk = payload[i:i + 3]
            bits.append(int(chunk), (4, 7, 10)[len(chunk) - 1])
    return bits


def decode_segments(data_codewords, version: int) -> list[Segment]:
    """Parse segments out of assembled data codewords.

    Stops at a terminator (mode 0000) or when fewer than four bits remain,
    as pad codewords follow the terminator.
    """
    bits = BitString.from_bytes(data_codewords)
    segments = []
    while bits.remaining() >= 4:
        mode_bits = bits.read(4)
        if mode_bits == 0:
            break
        try:
            mode = Mode(mode_bits)
        except ValueError:
            raise ValueError(f"unsupported mode indicator {mode_bits:04b}") from None
        count = bits.read(mode.count_bits(version))
        if mode is Mode.BYTE:
            payload = bytes(bits.read(8) for _ in range(count))
        elif mode is Mode.ALPHANUMERIC:
            chars = []
            for _ in range(count // 2):
                v = bits.read(11)
                if v >= 45 * 45:
                    raise ValueError(f"invalid alphanumeric pair value {v}")
                chars += [ALNUM_CHARS[v // 45], ALNUM_CHARS[v % 45]]
            if count % 2:
                v = bits.read(6)
                if v >= 45:
                    raise ValueError(f"invalid alphanumeric value {v}")
                chars.append(ALNUM_CHARS[v])
            payload = "".join(chars)
        else:
            digits = []
            for i in range(0, count, 3):
                n = min(3, count - i)
                digits.append(str(bits.read((4, 7, 10)[n - 1])).zfill(n))
            payload = "".join(digits)
        segments.append(Segment(mode, payload))
    return segments


def assemble_codewords(bits: BitString, profile: QrProfile) -> bytes:
    """Terminate, byte-align and pad ``bits`` to the profile's data capacity."""
    capacity = profile.data_capacity_codewords * 8
    if len(bits) > capacity:
        raise CapacityError(
            f"{len(bits)} bits exceed {capacity} available in version "
            f"{profile.version}-{profile.ec_level}"
        )
    out = BitString(bits)
    out.append(0, min(4, capacity - len(out)))
    out.append(0, -len(out) % 8)
    pad = 0
    while len(out) < capacity:
        out.append(PAD_CODEWORDS[pad % 2], 8)
        pad += 1
    return out.to_bytes()


def byte_capacity(profile: QrProfile) -> int:
    """Largest byte-mode payload that fits in one symbol of ``profile``."""
    overhead = 4 + Mode.BYTE.count_bits(profile.version)
    return (profile.data_capacity_codewords * 8 - overhead) // 8


def encode_payload(data: bytes, profile: QrProfile) -> bytes:
    """Byte-mode data codewords for ``data``."""
    return assemble_codewords(encode_segment(Segment.byte(data), profile.version), profile)


def split_blocks(data_codewords, profile: QrProfile) -> list[bytes]:
    if len(data_codewords) != profile.data_capacity_codewords:
        raise ValueError(
            f"expected {profile.data_capacity_codewords} data codewords, got {len(data_codewords)}"
        )
    blocks = []
    k = 0
    for n in profile.data_block_lengths:
        blocks.append(bytes(data_codewords[k:k + n]))
        k += n
    return blocks


def _interleave(seqs):
    out = bytearray()
    for i in range(max(len(s) for s in seqs)):
        for s in seqs:
            if i < len(s):
                out.append(s[i])
    return bytes(out)


def interleave_blocks(data_codewords, profile: QrProfile) -> bytes:
    """Final codeword stream: interleaved data, then interleaved EC."""
    blocks = split_blocks(data_codewords, profile)
    ecs = [rs_encode(b, profile.ec_per_block) for b in blocks]
    return _interleave(blocks) + _interleave(ecs)


def deinterleave_blocks(stream, profile: QrProfile) -> list[bytes]:
    """Inverse of :func:`interleave_blocks`; returns each block as data + EC."""
    if len(stream) != profile.total_codewords:
        raise ValueError(f"expected {profile.total_codewords} codewords, got {len(stream)}")
    lengths = profile.data_block_lengths
    data = [bytearray() for _ in lengths]
    k = 0
    for i in range(max(lengths)):
        for b, n in enumerate(lengths):
            if i < n:
                data[b].append(stream[k])
                k += 1
    ecs = [bytearray() for _ in lengths]
    for _ in range(profile.ec_per_block):
        for b in range(len(lengths)):
            ecs[b].append(stream[k])
            k += 1
    return [bytes(d + e) for d, e in zip(data, ecs)]
