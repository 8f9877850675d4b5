"""TTJSA: modified Vernam with feedback, NJJSA bit rounds, MSA pair substitution.

All three stages share one 16x16 key matrix holding a permutation of the
byte values, plus three numbers derived from the passphrase:

* ``num``    weighted byte sum of the passphrase,
* ``times``  how many passes Vernam and MSA make, and how many
             randomization rounds build the key matrix,
* ``secure`` seeds the number of NJJSA rotation/XOR rounds.

Encryption runs Vernam, then NJJSA (which pads to 32-byte blocks), then MSA.
Everything is deterministic in (data, passphrase).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

N = 16
VERNAM_BLOCK = 256
NJJSA_BLOCK = 32


@dataclass(frozen=True)
class CipherParams:
    num: int
    times: int
    secure: int

    @property
    def njjsa_rounds(self) -> int:
        return self.secure % 8 + 1

    @property
    def down_step(self) -> int:
        return self.num % 3 + 1

    @property
    def right_step(self) -> int:
        return self.num % 5 + 1


@dataclass(frozen=True)
class KeyMatrix:
    """16x16 byte table, stored flat in row-major order."""

    cells: tuple

    def __post_init__(self):
        if len(self.cells) != N * N:
            raise ValueError(f"key matrix needs {N * N} cells, got {len(self.cells)}")

    @classmethod
    def from_rows(cls, rows):
        return cls(tuple(v for row in rows for v in row))

    @property
    def rows(self):
        return [list(self.cells[r * N:(r + 1) * N]) for r in range(N)]

    def is_permutation(self) -> bool:
        return sorted(self.cells) == list(range(256))

    def keystream(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.int64)


@dataclass(frozen=True)
class CipherText:
    data: bytes
    original_length: int

    def __post_init__(self):
        if not 0 <= self.original_length <= len(self.data):
            raise ValueError("original_length exceeds ciphertext length")


def _as_bytes(value, what):
    if isinstance(value, str):
        value = value.encode("utf-8")
    value = bytes(value)
    if not value:
        raise ValueError(f"{what} must not be empty")
    return value


def derive_params(passphrase) -> CipherParams:
    key = _as_bytes(passphrase, "passphrase")
    if len(key) > 256:
        raise ValueError("passphrase longer than 256 bytes")
    num = sum(b * i for i, b in enumerate(key, start=1))
    return CipherParams(num=num, times=num % 32 + 1, secure=num % 256)


# ---- key matrix randomization ----

def _rings():
    rings = []
    for k in range(N // 2):
        lo, hi = k, N - 1 - k
        ring = (
            [(lo, c) for c in range(lo, hi)]
            + [(r, hi) for r in range(lo, hi)]
            + [(hi, c) for c in range(hi, lo, -1)]
            + [(r, lo) for r in range(hi, lo, -1)]
        )
        rings.append(ring)
    return rings


_RINGS = _rings()


def cycling(grid):
    """Rotate every concentric ring one step clockwise."""
    out = [row[:] for row in grid]
    for ring in _RINGS:
        for k, (r, c) in enumerate(ring):
            r2, c2 = ring[(k + 1) % len(ring)]
            out[r2][c2] = grid[r][c]
    return out


def upshift(grid, step=1):
    return [[grid[(r + step) % N][c] for c in range(N)] for r in range(N)]


def downshift(grid, step=1):
    return upshift(grid, -step)


def leftshift(grid, step=1):
    return [[grid[r][(c + step) % N] for c in range(N)] for r in range(N)]


def rightshift(grid, step=1):
    return leftshift(grid, -step)


def randomize_round(grid, params: CipherParams):
    grid = cycling(grid)
    grid = upshift(grid, 1)
    grid = downshift(grid, params.down_step)
    grid = leftshift(grid, 1)
    return rightshift(grid, params.right_step)


def generate_key_matrix(params: CipherParams) -> KeyMatrix:
    grid = [list(range(r * N, (r + 1) * N)) for r in range(N)]
    for _ in range(params.times):
        grid = randomize_round(grid, params)
    return KeyMatrix.from_rows(grid)


# ---- modified Vernam ----

def _u8(data):
    return np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int64)


def vernam_encrypt(plain, matrix: KeyMatrix, params: CipherParams) -> bytes:
    """Block-wise additive cipher; each block's tail feeds the next block's head."""
    buf = _u8(_as_bytes(plain, "plaintext"))
    key = matrix.keystream()
    for _ in range(params.times):
        out = np.empty_like(buf)
        feedback = 0
        for start in range(0, len(buf), VERNAM_BLOCK):
            block = buf[start:start + VERNAM_BLOCK]
            n = len(block)
            enc = (block + key[:n]) % 256
            enc[0] = (enc[0] + feedback) % 256
            out[start:start + n] = enc
            feedback = int(enc[-1] + key[n - 1]) % 256
        buf = out
    return buf.astype(np.uint8).tobytes()


def vernam_decrypt(cipher, matrix: KeyMatrix, params: CipherParams) -> bytes:
    buf = _u8(_as_bytes(cipher, "ciphertext"))
    key = matrix.keystream()
    for _ in range(params.times):
        out = np.empty_like(buf)
        feedback = 0
        for start in range(0, len(buf), VERNAM_BLOCK):
            block = buf[start:start + VERNAM_BLOCK]
            n = len(block)
            dec = (block - key[:n]) % 256
            dec[0] = (dec[0] - feedback) % 256
            out[start:start + n] = dec
            feedback = int(block[-1] + key[n - 1]) % 256
        buf = out
    return buf.astype(np.uint8).tobytes()


# ---- NJJSA ----

@lru_cache(maxsize=64)
def _swap_permutation(cells):
    # position p ends up holding the bit that started at perm[p]
    perm = list(range(256))
    for k in range(256):
        t = cells[k]
        perm[k], perm[t] = perm[t], perm[k]
    return np.array(perm)


def _to_bits(data):
    arr = np.frombuffer(data, dtype=np.uint8).reshape(-1, NJJSA_BLOCK)
    return np.unpackbits(arr, axis=1)


def _from_bits(bits):
    return np.packbits(bits, axis=1).tobytes()


def njjsa_pad(data) -> bytes:
    data = bytes(data)
    return data + bytes(-len(data) % NJJSA_BLOCK)


def njjsa_encrypt(data, matrix: KeyMatrix, params: CipherParams) -> bytes:
    """Bit transposition then rotate-and-XOR rounds on 256-bit blocks.

    Input is zero-padded to a multiple of 32 bytes; the caller keeps the
    true length.
    """
    bits = _to_bits(njjsa_pad(_as_bytes(data, "data")))
    bits = bits[:, _swap_permutation(matrix.cells)]
    for r in range(1, params.njjsa_rounds + 1):
        bits = np.roll(bits, r, axis=1)
        bits[:, 0::2] ^= bits[:, 1::2]
    return _from_bits(bits)


def njjsa_decrypt(data, matrix: KeyMatrix, params: CipherParams) -> bytes:
    data = _as_bytes(data, "data")
    if len(data) % NJJSA_BLOCK:
        raise ValueError(f"NJJSA ciphertext must be a multiple of {NJJSA_BLOCK} bytes")
    bits = _to_bits(data)
    for r in range(params.njjsa_rounds, 0, -1):
        bits[:, 0::2] ^= bits[:, 1::2]
        bits = np.roll(bits, -r, axis=1)
    out = np.empty_like(bits)
    out[:, _swap_permutation(matrix.cells)] = bits
    return _from_bits(out)


# ---- MSA ----

@lru_cache(maxsize=64)
def _msa_tables(cells, step):
    """Pair substitution tables indexed by ``a * 256 + b``.

    ``step`` is +1 for encryption (right / down / down-right) and -1 for
    decryption (left / up / up-left).
    """
    grid = np.array(cells).reshape(N, N)
    pos = np.empty((256, 2), dtype=np.int64)
    pos[grid.ravel(), 0] = np.repeat(np.arange(N), N)
    pos[grid.ravel(), 1] = np.tile(np.arange(N), N)
    a, b = np.divmod(np.arange(65536), 256)
    ra, ca = pos[a, 0], pos[a, 1]
    rb, cb = pos[b, 0], pos[b, 1]

    # rectangle rule by default
    first = grid[ra, cb]
    second = grid[rb, ca]
    same_row = ra == rb
    first = np.where(same_row, grid[ra, (ca + step) % N], first)
    second = np.where(same_row, grid[rb, (cb + step) % N], second)
    same_col = ca == cb
    first = np.where(same_col, grid[(ra + step) % N, ca], first)
    second = np.where(same_col, grid[(rb + step) % N, cb], second)
    same = a == b
    diag = grid[(ra + step) % N, (ca + step) % N]
    first = np.where(same, diag, first)
    second = np.where(same, diag, second)

    single = np.empty(256, dtype=np.int64)
    single[grid] = grid[:, (np.arange(N) + step) % N]
    return first, second, single


def _msa(data, matrix, params, step):
    buf = _u8(_as_bytes(data, "data"))
    first, second, single = _msa_tables(matrix.cells, step)
    even = len(buf) - len(buf) % 2
    for _ in range(params.times):
        idx = buf[0:even:2] * 256 + buf[1:even:2]
        out = np.empty_like(buf)
        out[0:even:2] = first[idx]
        out[1:even:2] = second[idx]
        if even != len(buf):
            out[-1] = single[buf[-1]]
        buf = out
    return buf.astype(np.uint8).tobytes()


def msa_encrypt(data, matrix: KeyMatrix, params: CipherParams) -> bytes:
    """Playfair-style substitution of byte pairs on the 16x16 key matrix."""
    return _msa(data, matrix, params, 1)


def msa_decrypt(data, matrix: KeyMatrix, params: CipherParams) -> bytes:
    return _msa(data, matrix, params, -1)


# ---- composition ----

@lru_cache(maxsize=256)
def _matrix_for(params):
    return generate_key_matrix(params)


def _schedule(passphrase):
    params = derive_params(passphrase)
    return _matrix_for(params), params


def ttjsa_encrypt(plain, passphrase) -> CipherText:
    plain = _as_bytes(plain, "plaintext")
    matrix, params = _schedule(passphrase)
    data = vernam_encrypt(plain, matrix, params)
    data = njjsa_encrypt(data, matrix, params)
    data = msa_encrypt(data, matrix, params)
    return CipherText(data, len(plain))


def ttjsa_decrypt(cipher: CipherText, passphrase) -> bytes:
    if len(cipher.data) == 0 or len(cipher.data) % NJJSA_BLOCK:
        raise ValueError(f"ciphertext length {len(cipher.data)} is not a positive multiple of {NJJSA_BLOCK}")
    matrix, params = _schedule(passphrase)
    data = msa_decrypt(cipher.data, matrix, params)
    data = njjsa_decrypt(data, matrix, params)
    return vernam_decrypt(data[: cipher.original_length], matrix, params)
