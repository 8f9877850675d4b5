"""Monochrome bitmap output (PBM P1, 1-bit PNG) and PBM parsing back to grids."""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

from .errors import BitmapError, UnsupportedVersionError
from .matrix import QrMatrix, version_for_size

PBM_LINE_WIDTH = 70


@dataclass(frozen=True)
class RenderOptions:
    module_scale: int = 1
    quiet_zone: int = 4

    def __post_init__(self):
        if self.module_scale < 1:
            raise ValueError("module_scale must be at least 1")
        if self.quiet_zone < 0:
            raise ValueError("quiet_zone must be non-negative")


def _pixels(matrix, opts):
    """Rows of pixel values, 1 for dark."""
    s, q = opts.module_scale, opts.quiet_zone
    width = (matrix.size + 2 * q) * s
    blank = [0] * width
    rows = [blank] * (q * s)
    for mrow in matrix.modules:
        line = [0] * (q * s)
        for dark in mrow:
            line.extend([1 if dark else 0] * s)
        line.extend([0] * (q * s))
        rows.extend([line] * s)
    rows.extend([blank] * (q * s))
    return rows


def render_pbm(matrix: QrMatrix, opts: RenderOptions = RenderOptions()) -> bytes:
    """Plain PBM: header, then rows of '0'/'1' digits wrapped at 70 columns."""
    rows = _pixels(matrix, opts)
    out = [f"P1\n{len(rows[0])} {len(rows)}\n"]
    for row in rows:
        digits = "".join("1" if p else "0" for p in row)
        for i in range(0, len(digits), PBM_LINE_WIDTH):
            out.append(digits[i:i + PBM_LINE_WIDTH] + "\n")
    return "".join(out).encode("ascii")


def _png_chunk(tag, data):
    body = tag + data
    return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)


def render_png(matrix: QrMatrix, opts: RenderOptions = RenderOptions()) -> bytes:
    """1-bit grayscale PNG; dark modules are black (sample value 0)."""
    rows = _pixels(matrix, opts)
    width, height = len(rows[0]), len(rows)
    raw = bytearray()
    for row in rows:
        raw.append(0)  # filter type: none
        for i in range(0, width, 8):
            byte = 0
            for k, p in enumerate(row[i:i + 8]):
                if not p:
                    byte |= 0x80 >> k
            raw.append(byte)
    header = struct.pack(">IIBBBBB", width, height, 1, 0, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", header)
        + _png_chunk(b"IDAT", zlib.compress(bytes(raw), 9))
        + _png_chunk(b"IEND", b"")
    )


def render_bitmap(matrix: QrMatrix, opts: RenderOptions = RenderOptions(), png: bool = False) -> bytes:
    return render_png(matrix, opts) if png else render_pbm(matrix, opts)


def _tokens(data):
    """Yield header tokens of a PBM file, skipping comments; returns the rest."""
    text = data.decode("ascii", errors="replace")
    pos = 0
    header = []
    while len(header) < 3:
        while pos < len(text) and (text[pos].isspace() or text[pos] == "#"):
            if text[pos] == "#":
                nl = text.find("\n", pos)
                pos = len(text) if nl < 0 else nl
            else:
                pos += 1
        start = pos
        while pos < len(text) and not text[pos].isspace() and text[pos] != "#":
            pos += 1
        if start == pos:
            raise BitmapError("truncated PBM header")
        header.append(text[start:pos])
    return header, data[pos + 1:] if header[0] == "P4" else text[pos:]


def read_pbm(data: bytes) -> list[list[int]]:
    """Pixel rows (1 = dark) of a P1 or P4 bitmap."""
    (magic, w, h), rest = _tokens(bytes(data))
    if magic not in ("P1", "P4"):
        raise BitmapError(f"not a PBM bitmap (magic {magic!r})")
    try:
        width, height = int(w), int(h)
    except ValueError:
        raise BitmapError("bad PBM dimensions") from None
    if width < 1 or height < 1:
        raise BitmapError("empty bitmap")
    if magic == "P1":
        digits = [c for c in rest if not c.isspace()]
        if len(digits) != width * height or any(c not in "01" for c in digits):
            raise BitmapError("pixel data does not match the declared size")
        flat = [1 if c == "1" else 0 for c in digits]
        return [flat[r * width:(r + 1) * width] for r in range(height)]
    stride = (width + 7) // 8
    if len(rest) < stride * height:
        raise BitmapError("pixel data does not match the declared size")
    return [
        [(rest[r * stride + c // 8] >> (7 - c % 8)) & 1 for c in range(width)]
        for r in range(height)
    ]


def parse_bitmap(data: bytes) -> QrMatrix:
    """Recover the module grid from an axis-aligned rendering.

    The module size is the length of the dark run along the top edge of the
    top-left finder pattern divided by seven. The quiet zone must be light
    and equally wide on all sides.
    """
    pixels = read_pbm(data)
    height, width = len(pixels), len(pixels[0])

    top = next((r for r in range(height) if any(pixels[r])), None)
    if top is None:
        raise BitmapError("no finder pattern found (image is blank)")
    left = pixels[top].index(1)
    run = 0
    while left + run < width and pixels[top][left + run]:
        run += 1
    if run % 7:
        raise BitmapError(f"finder run of {run} pixels is not a multiple of 7: inconsistent module scale")
    scale = run // 7
    left_col = min((row.index(1) for row in pixels if any(row)))
    if left_col != left:
        raise BitmapError("finder pattern not found at the top-left corner")

    right = max(width - 1 - row[::-1].index(1) for row in pixels if any(row))
    bottom = max(r for r in range(height) if any(pixels[r]))
    grid_w, grid_h = right - left + 1, bottom - top + 1
    margins = (left, width - 1 - right, top, height - 1 - bottom)
    if grid_w % scale or grid_h % scale or any(m % scale for m in margins) or len(set(margins)) != 1:
        raise BitmapError("inconsistent module scale or uneven quiet zone")
    if width != height:
        raise BitmapError(f"image is not square ({width}x{height})")
    size = grid_w // scale
    if grid_h != grid_w:
        raise BitmapError("symbol is not square")
    try:
        version = version_for_size(size)
    except UnsupportedVersionError as exc:
        raise BitmapError(str(exc)) from None

    half = scale // 2
    modules = [
        [pixels[top + r * scale + half][left + c * scale + half] == 1 for c in range(size)]
        for r in range(size)
    ]
    return QrMatrix(version, None, modules)
