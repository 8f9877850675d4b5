"""Mark-sheet records and their canonical line-oriented byte form.

Example::

    INSTITUTION: ABC College (Autonomous)
    ...
    ROLL: 0-00-00-0002
    SUBJ CMSA3101 70 100
    NOTE 1ST CLASS : 60%

Scalar fields appear once each in a fixed order, then one ``SUBJ`` line per
subject, then ``NOTE`` lines. Every line ends with a single line feed.
Backslashes and line feeds inside values are escaped as ``\\\\`` and
``\\n``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import RecordFormatError

SCALAR_FIELDS = (
    "institution",
    "affiliation",
    "programme",
    "semester",
    "year",
    "candidate_name",
    "roll",
    "registration",
    "session",
)
MAX_MARK = 2**31 - 1


@dataclass(frozen=True)
class Subject:
    code: str
    marks: int
    max_marks: int


@dataclass(frozen=True)
class MarkSheetRecord:
    institution: str = ""
    affiliation: str = ""
    programme: str = ""
    semester: str = ""
    year: str = ""
    candidate_name: str = ""
    roll: str = ""
    registration: str = ""
    session: str = ""
    subjects: tuple[Subject, ...] = ()
    class_notes: tuple[str, ...] = ()

    def __post_init__(self):
        subjects = tuple(s if isinstance(s, Subject) else Subject(*s) for s in self.subjects)
        object.__setattr__(self, "subjects", subjects)
        object.__setattr__(self, "class_notes", tuple(self.class_notes))

    def validate(self):
        if not self.roll:
            raise RecordFormatError("roll must not be empty")
        if not self.registration:
            raise RecordFormatError("registration must not be empty")
        for s in self.subjects:
            if not s.code or any(ch.isspace() for ch in s.code):
                raise RecordFormatError(f"subject code {s.code!r} must be a non-empty word")
            if not 0 <= s.marks <= s.max_marks <= MAX_MARK:
                raise RecordFormatError(f"{s.code}: marks {s.marks} not within 0..{s.max_marks}")
        return self


def _escape(text):
    return text.replace("\\", "\\\\").replace("\n", "\\n")


def _unescape(text, line_no):
    out = []
    it = iter(text)
    for ch in it:
        if ch != "\\":
            out.append(ch)
            continue
        nxt = next(it, None)
        if nxt == "\\":
            out.append("\\")
        elif nxt == "n":
            out.append("\n")
        else:
            raise RecordFormatError(f"bad escape sequence \\{nxt or ''}", line_no)
    return "".join(out)


def serialize_record(record: MarkSheetRecord) -> bytes:
    record.validate()
    lines = [f"{name.upper()}: {_escape(getattr(record, name))}" for name in SCALAR_FIELDS]
    lines += [f"SUBJ {s.code} {s.marks} {s.max_marks}" for s in record.subjects]
    lines += [f"NOTE {_escape(n)}" for n in record.class_notes]
    return "".join(line + "\n" for line in lines).encode("utf-8")


def _parse_int(token, line_no):
    if not token.isdigit() or not token.isascii():
        raise RecordFormatError(f"expected a non-negative integer, got {token!r}", line_no)
    if len(token) > 1 and token[0] == "0":
        raise RecordFormatError(f"leading zero in {token!r}", line_no)
    if len(token) > 10 or int(token) > MAX_MARK:
        raise RecordFormatError(f"integer {token} out of range", line_no)
    return int(token)


def parse_record(data: bytes) -> MarkSheetRecord:
    """Strict inverse of :func:`serialize_record`.

    A missing final line feed is tolerated; anything else that the
    serializer would not produce is rejected with the offending line number.
    """
    if not data:
        raise RecordFormatError("empty record")
    try:
        text = bytes(data).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise RecordFormatError(f"not UTF-8: {exc}") from None
    if text.endswith("\n"):
        text = text[:-1]
    lines = text.split("\n")

    values = {}
    for i, name in enumerate(SCALAR_FIELDS):
        line_no = i + 1
        if i >= len(lines):
            raise RecordFormatError(f"missing {name.upper()} line", line_no)
        key, sep, value = lines[i].partition(": ")
        if not sep:
            raise RecordFormatError(f"malformed line {lines[i]!r}", line_no)
        if key != name.upper():
            known = key.lower() in SCALAR_FIELDS
            problem = "out of order" if known else "unknown key"
            raise RecordFormatError(f"{problem} {key!r}, expected {name.upper()}", line_no)
        values[name] = _unescape(value, line_no)

    subjects = []
    notes = []
    for i, line in enumerate(lines[len(SCALAR_FIELDS):], start=len(SCALAR_FIELDS) + 1):
        if line.startswith("SUBJ "):
            if notes:
                raise RecordFormatError("SUBJ line after NOTE lines", i)
            parts = line.split(" ")
            if len(parts) != 4:
                raise RecordFormatError(f"malformed subject line {line!r}", i)
            _, code, marks, max_marks = parts
            if not code:
                raise RecordFormatError("empty subject code", i)
            subject = Subject(code, _parse_int(marks, i), _parse_int(max_marks, i))
            if subject.marks > subject.max_marks:
                raise RecordFormatError(f"marks {subject.marks} exceed maximum {subject.max_marks}", i)
            subjects.append(subject)
        elif line.startswith("NOTE "):
            notes.append(_unescape(line[5:], i))
        else:
            key = line.partition(":")[0].partition(" ")[0]
            raise RecordFormatError(f"unknown key {key!r}", i)

    record = MarkSheetRecord(**values, subjects=tuple(subjects), class_notes=tuple(notes))
    return record.validate()


def field_paths(record: MarkSheetRecord):
    """Flatten ``record`` into ``(path, value)`` pairs used for diffing."""
    for name in SCALAR_FIELDS:
        yield name, getattr(record, name)
    for i, s in enumerate(record.subjects):
        for f in fields(Subject):
            yield f"subjects[{i}].{f.name}", getattr(s, f.name)
    for i, note in enumerate(record.class_notes):
        yield f"class_notes[{i}]", note


def diff_records(expected: MarkSheetRecord, found: MarkSheetRecord):
    """List of ``(path, expected, found)`` for every differing field.

    Entries present on only one side are reported with ``None`` on the other.
    """
    left = dict(field_paths(expected))
    right = dict(field_paths(found))
    diffs = []
    for path in list(left) + [p for p in right if p not in left]:
        a, b = left.get(path), right.get(path)
        if a != b:
            diffs.append((path, a, b))
    return diffs
