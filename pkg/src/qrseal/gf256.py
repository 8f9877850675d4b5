"""Arithmetic in GF(2^8) and dense polynomials over it.

The field is the one used by QR codes: reduction polynomial
x^8 + x^4 + x^3 + x^2 + 1 (0x11D) with generator alpha = 2.

Polynomials are plain lists of ints ordered highest degree first, so
``[1, 0, 1]`` is x^2 + 1. The zero polynomial is the empty list.
"""

from __future__ import annotations

PRIMITIVE = 0x11D


def _build_tables():
    exp = [0] * 512
    log = [0] * 256
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & 0x100:
            x ^= PRIMITIVE
    # second copy lets gf_mul skip a modulo
    for i in range(255, 512):
        exp[i] = exp[i - 255]
    return exp, log


EXP, LOG = _build_tables()


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def gf_inverse(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return EXP[255 - LOG[a]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return EXP[(LOG[a] - LOG[b]) % 255]


def alpha_pow(n: int) -> int:
    """Return alpha**n; any integer exponent is reduced mod 255."""
    return EXP[n % 255]


def gf_log(a: int) -> int:
    if a == 0:
        raise ValueError("log of 0 is undefined")
    return LOG[a]


# ---- polynomials ----

def poly_normalize(p):
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return list(p[i:])


def poly_degree(p) -> int:
    """Degree of ``p``; the zero polynomial reports -1."""
    return len(poly_normalize(p)) - 1


def poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    off = len(p) - len(q)
    for i, c in enumerate(q):
        out[off + i] ^= c
    return poly_normalize(out)


def poly_scale(p, k: int):
    return poly_normalize([gf_mul(c, k) for c in p])


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] ^= gf_mul(a, b)
    return poly_normalize(out)


def poly_eval(p, x: int) -> int:
    y = 0
    for c in p:
        y = gf_mul(y, x) ^ c
    return y


def poly_divmod(dividend, divisor):
    """Long division in GF(256)[x]; returns ``(quotient, remainder)``.

    Subtraction is XOR, so each step cancels the leading term of the
    running remainder with a scaled, shifted copy of the divisor.
    """
    divisor = poly_normalize(divisor)
    if not divisor:
        raise ZeroDivisionError("polynomial division by zero")
    rem = poly_normalize(dividend)
    dlen = len(divisor)
    if len(rem) < dlen:
        return [], rem
    lead_inv = gf_inverse(divisor[0])
    rem = list(rem)
    quot = [0] * (len(rem) - dlen + 1)
    for i in range(len(quot)):
        coef = rem[i]
        if coef == 0:
            continue
        factor = gf_mul(coef, lead_inv)
        quot[i] = factor
        for j in range(dlen):
            rem[i + j] ^= gf_mul(divisor[j], factor)
    return poly_normalize(quot), poly_normalize(rem[len(quot):])
