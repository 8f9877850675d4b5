"""Reed-Solomon encoding and error correction for QR code blocks.

Generator roots are alpha^0 .. alpha^(n-1) (first consecutive root 0), the
QR convention. Decoding uses Berlekamp-Massey for the error locator, an
exhaustive root search over the block positions, and Forney's formula for
the error magnitudes.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import UnrecoverableBlockError
from .gf256 import (
    alpha_pow,
    gf_div,
    gf_inverse,
    gf_mul,
    poly_add,
    poly_eval,
    poly_mul,
    poly_normalize,
    poly_scale,
)

MAX_EC = 68


@lru_cache(maxsize=None)
def _generator(ec_count):
    g = [1]
    for k in range(ec_count):
        g = poly_mul(g, [1, alpha_pow(k)])
    return tuple(g)


def generator_poly(ec_count: int) -> list[int]:
    """Monic product of (x - alpha^k) for k in 0..ec_count-1."""
    if not 1 <= ec_count <= MAX_EC:
        raise ValueError(f"ec_count must be in 1..{MAX_EC}, got {ec_count}")
    return list(_generator(ec_count))


def rs_encode(data, ec_count: int) -> bytes:
    """Return the ``ec_count`` check codewords for ``data``."""
    if len(data) == 0:
        raise ValueError("cannot encode an empty block")
    gen = generator_poly(ec_count)
    # LFSR form of dividing data(x) * x^n by the monic generator
    rem = [0] * ec_count
    for byte in data:
        factor = byte ^ rem[0]
        rem = rem[1:] + [0]
        if factor:
            for i in range(ec_count):
                rem[i] ^= gf_mul(gen[i + 1], factor)
    return bytes(rem)


def syndromes(received, ec_count: int) -> list[int]:
    return [poly_eval(received, alpha_pow(j)) for j in range(ec_count)]


def _berlekamp_massey(synd):
    loc = [1]
    prev = [1]
    for k in range(len(synd)):
        delta = synd[k]
        for j in range(1, len(loc)):
            delta ^= gf_mul(loc[-(j + 1)], synd[k - j])
        prev = prev + [0]
        if delta:
            if len(prev) > len(loc):
                new_loc = poly_scale(prev, delta)
                prev = poly_scale(loc, gf_inverse(delta))
                loc = new_loc
            loc = poly_add(loc, poly_scale(prev, delta))
    return poly_normalize(loc)


def _derivative(p):
    # characteristic 2: only odd-power terms survive, coefficients unchanged
    n = len(p) - 1
    out = [c if (n - i) % 2 == 1 else 0 for i, c in enumerate(p[:-1])]
    return poly_normalize(out)


def rs_correct(received, ec_count: int):
    """Correct ``received`` (data followed by EC codewords).

    Returns ``(data, errors_fixed)``. Raises UnrecoverableBlockError when
    more than ec_count // 2 codewords are wrong (as far as can be told).
    """
    received = list(received)
    n = len(received)
    if n <= ec_count:
        raise ValueError("block must be longer than its EC part")
    synd = syndromes(received, ec_count)
    if not any(synd):
        return bytes(received[: n - ec_count]), 0

    loc = _berlekamp_massey(synd)
    nerr = len(loc) - 1
    if 2 * nerr > ec_count:
        raise UnrecoverableBlockError(f"too many errors ({nerr} > {ec_count // 2})")

    # root search: byte at index p is the coefficient of x^(n-1-p)
    positions = []
    for p in range(n):
        if poly_eval(loc, alpha_pow(-(n - 1 - p))) == 0:
            positions.append(p)
    if len(positions) != nerr:
        raise UnrecoverableBlockError("error locator roots do not match its degree")

    synd_poly = list(reversed(synd))
    omega = poly_mul(synd_poly, loc)[-ec_count:]
    dloc = _derivative(loc)
    for p in positions:
        x = alpha_pow(n - 1 - p)
        x_inv = gf_inverse(x)
        denom = poly_eval(dloc, x_inv)
        if denom == 0:
            raise UnrecoverableBlockError("degenerate error locator")
        received[p] ^= gf_mul(x, gf_div(poly_eval(omega, x_inv), denom))

    if any(syndromes(received, ec_count)):
        raise UnrecoverableBlockError("correction did not yield a codeword")
    return bytes(received[: n - ec_count]), nerr

