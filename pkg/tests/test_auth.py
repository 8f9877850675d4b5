import dataclasses
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from qrseal.auth import (
    HEADER,
    SealedPayload,
    frequency_histogram,
    histogram_distance,
    read_payload,
    seal,
    unseal,
    unseal_ciphertext,
    verify,
)
from qrseal.bitstream import byte_capacity, encode_payload, get_profile
from qrseal.errors import UndecodableError
from qrseal.matrix import encode_matrix
from qrseal.record import MarkSheetRecord, parse_record

DATA = Path(__file__).parent / "data"
KEY = "exam-cell-2024"


def _load(name):
    return parse_record((DATA / name).read_bytes())


@pytest.fixture(scope="module")
def xyz():
    return _load("xyz.rec")


@pytest.fixture(scope="module")
def xyz_sealed(xyz):
    return seal(xyz, KEY)


SHORT = MarkSheetRecord(roll="7", registration="R7", subjects=[("CMSA3101", 70, 100)])


# ---- framing ----

def test_sealed_payload_layout():
    p = SealedPayload(1, 2, 300, b"body")
    raw = p.to_bytes()
    assert raw[:12] == b"QSL1\x00\x01\x00\x02\x00\x00\x01\x2c"
    assert SealedPayload.from_bytes(raw) == p


@pytest.mark.parametrize("raw", [b"QSL1\x00", b"XXXX\x00\x01\x00\x01\x00\x00\x00\x01z"])
def test_sealed_payload_rejects(raw):
    with pytest.raises(ValueError):
        SealedPayload.from_bytes(raw)


def test_part_index_range():
    with pytest.raises(ValueError):
        SealedPayload(3, 2, 0, b"")
    with pytest.raises(ValueError):
        SealedPayload(0, 2, 0, b"")


# ---- seal / unseal ----

def test_short_record_fits_one_code():
    [m] = seal(SHORT, KEY)
    payload = read_payload(m)
    assert (payload.part_index, payload.part_count) == (1, 1)
    # even a minimal record pads past 119 bytes, the 10-H capacity
    assert (m.version, m.ec_level) == (10, "L")
    assert unseal([m], KEY) == SHORT


def test_def_record_needs_two_codes():
    record = _load("def.rec")
    matrices = seal(record, KEY)
    # 388 plaintext bytes pad to 416, beyond one 10-L symbol (271 bytes)
    assert len(matrices) == 2
    assert [read_payload(m).part_index for m in matrices] == [1, 2]
    assert unseal(matrices, KEY) == record


def test_large_note_spreads_over_parts():
    record = dataclasses.replace(SHORT, class_notes=["N" * 1500])
    matrices = seal(record, KEY)
    assert len(matrices) >= 2
    parts = [read_payload(m) for m in matrices]
    assert [p.part_index for p in parts] == list(range(1, len(parts) + 1))
    assert all(p.part_count == len(parts) for p in parts)
    assert unseal(matrices[::-1], KEY) == record


def test_forced_version_and_mask():
    matrices = seal(SHORT, KEY, ec_level="L", version=4, mask_id=6)
    assert all((m.version, m.ec_level, m.mask_id) == (4, "L", 6) for m in matrices)
    assert unseal(matrices, KEY) == SHORT


def test_version_too_small_for_header():
    with pytest.raises(ValueError):
        seal(SHORT, KEY, ec_level="H", version=1)


def test_reverse_order(xyz, xyz_sealed):
    assert unseal(xyz_sealed[::-1], KEY) == xyz


def test_missing_part(xyz_sealed):
    with pytest.raises(UndecodableError) as info:
        unseal(xyz_sealed[:1], KEY)
    assert info.value.stage == "parts"
    assert "missing" in str(info.value)


def test_duplicate_part(xyz_sealed):
    with pytest.raises(UndecodableError) as info:
        unseal([xyz_sealed[0], xyz_sealed[0], xyz_sealed[1]], KEY)
    assert "duplicate" in str(info.value)


def test_parts_from_different_seals(xyz, xyz_sealed):
    other = seal(dataclasses.replace(xyz, class_notes=["longer"] * 4), KEY)
    with pytest.raises(UndecodableError) as info:
        unseal_ciphertext([xyz_sealed[0], other[1]])
    assert info.value.stage == "parts"


def test_no_parts():
    with pytest.raises(UndecodableError):
        unseal([], KEY)


def test_wrong_key_is_undecodable(xyz_sealed):
    with pytest.raises(UndecodableError) as info:
        unseal(xyz_sealed, "exam-cell-2025")
    assert info.value.stage in ("decrypt", "record")


def test_bad_magic_is_undecodable():
    profile = get_profile(2, "M")
    m = encode_matrix(encode_payload(b"NOPE" + bytes(20), profile), 2, "M")
    with pytest.raises(UndecodableError) as info:
        unseal([m], KEY)
    assert info.value.stage == "payload"


# ---- verify ----

def test_verify_untampered(xyz, xyz_sealed):
    report = verify(xyz, xyz_sealed, KEY)
    assert report.verdict == "match"
    assert report.field_diffs == []
    assert report.histogram_distance == 0


def test_verify_tampered(xyz_sealed):
    report = verify(_load("xyz_tampered.rec"), xyz_sealed, KEY)
    assert report.verdict == "mismatch"
    assert report.field_diffs == [("subjects[1].marks", 43, 45)]
    assert report.histogram_distance > 0
    assert "subjects[1].marks: sealed 43, printed 45" in report.render()


def test_verify_garbage(xyz):
    garbage = encode_matrix(encode_payload(b"garbage", get_profile(1, "L")), 1, "L")
    report = verify(xyz, [garbage], KEY)
    assert report.verdict == "undecodable"
    assert report.error


def test_verify_damaged_symbol(xyz, xyz_sealed):
    m = xyz_sealed[0].copy()
    for r in range(m.size):
        for c in range(m.size):
            m.modules[r][c] = (r * c) % 3 == 0
    assert verify(xyz, [m, xyz_sealed[1]], KEY).verdict == "undecodable"


_SCALARS = ["institution", "candidate_name", "roll", "session"]


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_single_field_tamper_is_named(draw):
    base = MarkSheetRecord(
        roll=draw.draw(st.text("0123456789-", min_size=1, max_size=12)),
        registration="R1",
        candidate_name=draw.draw(st.text("ABCDEF ", max_size=8)),
        subjects=[("S1", draw.draw(st.integers(0, 50)), 50), ("S2", draw.draw(st.integers(0, 100)), 100)],
    )
    sealed = seal(base, KEY)
    choice = draw.draw(st.sampled_from(_SCALARS + ["subjects[0].marks", "subjects[1].marks"]))
    if choice.startswith("subjects"):
        i = int(choice[9])
        subjects = list(base.subjects)
        s = subjects[i]
        subjects[i] = dataclasses.replace(s, marks=(s.marks + 1) % (s.max_marks + 1))
        printed = dataclasses.replace(base, subjects=subjects)
    else:
        printed = dataclasses.replace(base, **{choice: getattr(base, choice) + "X"})
    report = verify(printed, sealed, KEY)
    assert report.verdict == "mismatch"
    assert [d[0] for d in report.field_diffs] == [choice]


# ---- frequency analysis ----

def test_histogram_examples():
    assert frequency_histogram(b"") == [0] * 256
    h = frequency_histogram(b"AAA")
    assert h[65] == 3 and sum(h) == 3


@given(st.binary(), st.binary())
def test_histogram_additive(a, b):
    ha, hb = frequency_histogram(a), frequency_histogram(b)
    assert frequency_histogram(a + b) == [x + y for x, y in zip(ha, hb)]


def test_histogram_distance_bounds():
    h = frequency_histogram(b"hello")
    assert histogram_distance(h, h) == 0
    assert histogram_distance(frequency_histogram(b"aa"), frequency_histogram(b"bbb")) == 1
    assert histogram_distance(frequency_histogram(b"ab"), frequency_histogram(b"aa")) == 0.5
    with pytest.raises(ValueError):
        histogram_distance([0] * 256, h)


def test_capacity_arithmetic_for_default_profile():
    assert byte_capacity(get_profile(10, "L")) - HEADER.size == 259
    assert byte_capacity(get_profile(10, "H")) == 119
