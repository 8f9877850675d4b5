"""QR module grids: function patterns, data placement, masking, format info.

Coordinates are ``(row, col)`` throughout; ``modules[row][col]`` is True for
a dark module.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .bitstream import (
    BitString,
    EC_LEVELS,
    MAX_VERSION,
    MIN_VERSION,
    check_version,
    deinterleave_blocks,
    get_profile,
    interleave_blocks,
)
from .errors import FormatInfoError, UnsupportedVersionError
from .rs import rs_correct

ALIGNMENT_CENTERS = {
    1: (),
    2: (6, 18),
    3: (6, 22),
    4: (6, 26),
    5: (6, 30),
    6: (6, 34),
    7: (6, 22, 38),
    8: (6, 24, 42),
    9: (6, 26, 46),
    10: (6, 28, 50),
}

LEVEL_BITS = {"L": 0b01, "M": 0b00, "Q": 0b11, "H": 0b10}
FORMAT_GENERATOR = 0b10100110111
FORMAT_MASK = 0b101010000010010
VERSION_GENERATOR = 0b1111100100101

PENALTY_N1 = 3
PENALTY_N2 = 3
PENALTY_N3 = 40
PENALTY_N4 = 10

_MASKS = (
    lambda i, j: (i + j) % 2 == 0,
    lambda i, j: i % 2 == 0,
    lambda i, j: j % 3 == 0,
    lambda i, j: (i + j) % 3 == 0,
    lambda i, j: (i // 2 + j // 3) % 2 == 0,
    lambda i, j: (i * j) % 2 + (i * j) % 3 == 0,
    lambda i, j: ((i * j) % 2 + (i * j) % 3) % 2 == 0,
    lambda i, j: ((i * j) % 3 + (i + j) % 2) % 2 == 0,
)


def size_for_version(version: int) -> int:
    return 17 + 4 * version


def version_for_size(size: int) -> int:
    version, rem = divmod(size - 17, 4)
    if rem or not MIN_VERSION <= version <= MAX_VERSION:
        raise UnsupportedVersionError(f"no supported version has size {size}")
    return version


class QrMatrix:
    def __init__(self, version, ec_level, modules=None, function=None, mask_id=None):
        check_version(version)
        self.version = version
        self.ec_level = ec_level
        self.size = size_for_version(version)
        n = self.size
        self.modules = modules if modules is not None else [[False] * n for _ in range(n)]
        self.function = function if function is not None else [[False] * n for _ in range(n)]
        self.mask_id = mask_id

    def copy(self):
        return QrMatrix(
            self.version,
            self.ec_level,
            [row[:] for row in self.modules],
            [row[:] for row in self.function],
            self.mask_id,
        )

    def __eq__(self, other):
        if not isinstance(other, QrMatrix):
            return NotImplemented
        return self.version == other.version and self.modules == other.modules

    def __repr__(self):
        return f"QrMatrix(version={self.version}, ec_level={self.ec_level!r}, mask_id={self.mask_id})"

    def set_function(self, row, col, dark):
        self.modules[row][col] = dark
        self.function[row][col] = True

    def dark_count(self):
        return sum(map(sum, self.modules))


# ---- function patterns ----

def _draw_finder(m, top, left):
    for dr in range(-1, 8):
        for dc in range(-1, 8):
            r, c = top + dr, left + dc
            if not (0 <= r < m.size and 0 <= c < m.size):
                continue
            ring = max(abs(dr - 3), abs(dc - 3))
            m.set_function(r, c, ring != 2 and ring != 4)


def _draw_alignment(m, row, col):
    for dr in range(-2, 3):
        for dc in range(-2, 3):
            m.set_function(row + dr, col + dc, max(abs(dr), abs(dc)) != 1)


def version_bits(version: int) -> int:
    """18-bit version information (6 data bits + 12 BCH check bits)."""
    rem = version
    for _ in range(12):
        rem = (rem << 1) ^ ((rem >> 11) * VERSION_GENERATOR)
    return version << 12 | rem


def build_function_patterns(version: int, ec_level: str = "H") -> QrMatrix:
    """Empty matrix with every function module drawn or reserved."""
    if ec_level not in EC_LEVELS:
        raise ValueError(f"unknown EC level {ec_level!r}")
    m = QrMatrix(version, ec_level)
    n = m.size
    for i in range(n):
        m.set_function(6, i, i % 2 == 0)
        m.set_function(i, 6, i % 2 == 0)
    _draw_finder(m, 0, 0)
    _draw_finder(m, 0, n - 7)
    _draw_finder(m, n - 7, 0)
    centers = ALIGNMENT_CENTERS[version]
    last = len(centers) - 1
    for a, r in enumerate(centers):
        for b, c in enumerate(centers):
            # the three finder corners have no alignment pattern
            if (a, b) in ((0, 0), (0, last), (last, 0)):
                continue
            _draw_alignment(m, r, c)
    # reserve format areas; real bits are written per mask
    _write_format(m, 0)
    m.set_function(4 * version + 9, 8, True)
    if version >= 7:
        bits = version_bits(version)
        for i in range(18):
            dark = (bits >> i) & 1 == 1
            a, b = n - 11 + i % 3, i // 3
            m.set_function(a, b, dark)
            m.set_function(b, a, dark)
    return m


# ---- format information ----

def format_bits(ec_level: str, mask_id: int) -> int:
    """15-bit masked format word for ``ec_level`` and ``mask_id``."""
    if not 0 <= mask_id <= 7:
        raise ValueError(f"mask id must be 0..7, got {mask_id}")
    data = LEVEL_BITS[ec_level] << 3 | mask_id
    rem = data
    for _ in range(10):
        rem = (rem << 1) ^ ((rem >> 9) * FORMAT_GENERATOR)
    return (data << 10 | rem) ^ FORMAT_MASK


def _format_positions(size):
    """Module coordinates of both format copies; index i holds bit i (LSB first)."""
    first = [(i, 8) for i in range(6)] + [(7, 8), (8, 8), (8, 7)] + [(8, 14 - i) for i in range(9, 15)]
    second = [(8, size - 1 - i) for i in range(8)] + [(size - 15 + i, 8) for i in range(8, 15)]
    return first, second


def _write_format(m, value):
    for copy in _format_positions(m.size):
        for i, (r, c) in enumerate(copy):
            m.set_function(r, c, (value >> i) & 1 == 1)


def read_format_copies(m: QrMatrix) -> tuple[int, int]:
    values = []
    for copy in _format_positions(m.size):
        v = 0
        for i, (r, c) in enumerate(copy):
            if m.modules[r][c]:
                v |= 1 << i
        values.append(v)
    return values[0], values[1]


_FORMAT_TABLE = {format_bits(lvl, mask): (lvl, mask) for lvl in EC_LEVELS for mask in range(8)}


def decode_format_bits(value: int, max_distance: int = 3):
    """Nearest valid format word; returns ``(ec_level, mask_id, distance)``."""
    best = min(_FORMAT_TABLE, key=lambda w: (bin(w ^ value).count("1"), w))
    dist = bin(best ^ value).count("1")
    if dist > max_distance:
        raise FormatInfoError(f"format bits {value:015b} are {dist} bits from any valid word")
    level, mask = _FORMAT_TABLE[best]
    return level, mask, dist


# ---- data placement ----

def placement_order(rows, cols, is_function=None, skip_column=None):
    """Coordinates of data modules in placement order.

    Two-module-wide columns are walked from the right edge, right module
    before left, starting upward at the bottom row and reversing at each
    edge. ``skip_column`` is dropped from the walk entirely (column 6 in a
    real symbol, where the vertical timing pattern sits).
    """
    order = []
    upward = True
    right = cols - 1
    while right >= 0:
        if right == skip_column:
            right -= 1
            continue
        pair = [right]
        if right - 1 >= 0 and right - 1 != skip_column:
            pair.append(right - 1)
        row_range = range(rows - 1, -1, -1) if upward else range(rows)
        for r in row_range:
            for c in pair:
                if is_function is None or not is_function[r][c]:
                    order.append((r, c))
        upward = not upward
        right -= 2
        if skip_column is not None and right == skip_column:
            right -= 1
    return order


def _symbol_order(m):
    return placement_order(m.size, m.size, m.function, skip_column=6)


def place_data(m: QrMatrix, bits) -> QrMatrix:
    order = _symbol_order(m)
    bits = list(bits)
    if len(bits) != len(order):
        raise ValueError(f"{len(order)} data modules but {len(bits)} bits given")
    out = m.copy()
    for (r, c), b in zip(order, bits):
        out.modules[r][c] = bool(b)
    return out


# ---- masking ----

def mask_condition(mask_id: int, i: int, j: int) -> bool:
    return _MASKS[mask_id](i, j)


def apply_mask(m: QrMatrix, mask_id: int) -> QrMatrix:
    """Flip data modules where the mask condition holds; function modules stay."""
    cond = _MASKS[mask_id]
    out = m.copy()
    for i in range(m.size):
        row, func = out.modules[i], m.function[i]
        for j in range(m.size):
            if not func[j] and cond(i, j):
                row[j] = not row[j]
    return out


def _run_penalty(line):
    score = 0
    run = 1
    for k in range(1, len(line)):
        if line[k] == line[k - 1]:
            run += 1
        else:
            if run >= 5:
                score += PENALTY_N1 + run - 5
            run = 1
    if run >= 5:
        score += PENALTY_N1 + run - 5
    return score


_FINDER_LIKE = ((1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0), (0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1))


def _finder_penalty(line):
    # light quiet zone beyond the symbol edge
    padded = (0,) * 4 + tuple(int(x) for x in line) + (0,) * 4
    hits = 0
    for k in range(len(padded) - 10):
        window = padded[k:k + 11]
        hits += sum(window == p for p in _FINDER_LIKE)
    return hits * PENALTY_N3


def penalty_breakdown(m) -> tuple[int, int, int, int]:
    """Scores for the four penalty rules (runs, 2x2 blocks, finder-like, balance).

    Accepts a QrMatrix or a plain square grid of booleans.
    """
    rows = getattr(m, "modules", m)
    cols = [list(col) for col in zip(*rows)]
    n = len(rows)
    rule1 = sum(_run_penalty(line) for line in rows) + sum(_run_penalty(line) for line in cols)
    rule2 = 0
    for i in range(n - 1):
        for j in range(n - 1):
            c = rows[i][j]
            if c == rows[i][j + 1] == rows[i + 1][j] == rows[i + 1][j + 1]:
                rule2 += PENALTY_N2
    rule3 = sum(_finder_penalty(line) for line in rows) + sum(_finder_penalty(line) for line in cols)
    total = n * n
    dark = sum(map(sum, rows))
    rule4 = abs(dark * 20 - total * 10) // total * PENALTY_N4
    return rule1, rule2, rule3, rule4


def penalty_score(m) -> int:
    return sum(penalty_breakdown(m))


def masked_candidate(m: QrMatrix, mask_id: int) -> QrMatrix:
    out = apply_mask(m, mask_id)
    _write_format(out, format_bits(m.ec_level, mask_id))
    out.mask_id = mask_id
    return out


def select_mask(scores) -> int:
    """Lowest score wins; ties go to the lowest mask id."""
    return min(range(len(scores)), key=lambda k: (scores[k], k))


def choose_mask(m: QrMatrix, workers: int | None = None):
    """Try all eight masks and return ``(mask_id, masked_matrix)``."""
    def evaluate(mask_id):
        cand = masked_candidate(m, mask_id)
        return penalty_score(cand), cand

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, range(8)))
    else:
        results = [evaluate(k) for k in range(8)]
    best = select_mask([score for score, _ in results])
    return best, results[best][1]


# ---- whole symbols ----

def encode_matrix(data_codewords, version: int, ec_level: str, mask_id: int | None = None) -> QrMatrix:
    """Build a finished symbol from data codewords (EC is added here)."""
    profile = get_profile(version, ec_level)
    stream = interleave_blocks(data_codewords, profile)
    bits = BitString.from_bytes(stream)
    bits.append(0, profile.remainder_bits)
    placed = place_data(build_function_patterns(version, ec_level), bits)
    if mask_id is None:
        return choose_mask(placed)[1]
    return masked_candidate(placed, mask_id)


def decode_matrix(m: QrMatrix, correct: bool = True):
    """Recover ``(data_codewords, version, ec_level, mask_id)`` from a clean grid.

    Format info is read from whichever copy is closer to a valid word.
    Each RS block is corrected unless ``correct`` is false.
    """
    size = len(m.modules)
    version = version_for_size(size)
    a, b = read_format_copies(m)
    candidates = []
    for raw in (a, b):
        try:
            candidates.append(decode_format_bits(raw))
        except FormatInfoError:
            pass
    if not candidates:
        raise FormatInfoError("both format information copies are undecodable")
    level, mask_id, _ = min(candidates, key=lambda t: t[2])

    template = build_function_patterns(version, level)
    unmasked = apply_mask(QrMatrix(version, level, m.modules, template.function), mask_id)
    profile = get_profile(version, level)
    order = _symbol_order(template)
    bits = BitString(unmasked.modules[r][c] for r, c in order[: profile.total_codewords * 8])
    blocks = deinterleave_blocks(bits.to_bytes(), profile)
    data = bytearray()
    for block in blocks:
        if correct:
            fixed, _ = rs_correct(block, profile.ec_per_block)
        else:
            fixed = block[: len(block) - profile.ec_per_block]
        data += fixed
    return bytes(data), version, level, mask_id

