"""Command line entry point.

Exit codes: 0 success or match, 1 verification mismatch, 2 input/format
error, 3 undecodable QR code or failed decryption.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import auth
from .bitstream import EC_LEVELS, get_profile
from .errors import QrSealError, RecordFormatError, UndecodableError
from .imageio import RenderOptions, parse_bitmap, render_pbm, render_png
from .matrix import decode_matrix
from .record import parse_record, serialize_record

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_UNDECODABLE = 3


class _InputError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_record(path):
    try:
        return parse_record(_read(path))
    except RecordFormatError as exc:
        raise _InputError(f"{path}: {exc}") from None


def _load_matrices(paths):
    matrices = []
    for path in paths:
        try:
            matrices.append(parse_bitmap(_read(path)))
        except QrSealError as exc:
            raise UndecodableError("qr", f"{path}: {exc}") from None
    return matrices


def cmd_seal(args):
    record = _load_record(args.record)
    matrices = auth.seal(record, args.key, ec_level=args.level, version=args.version, mask_id=args.mask)
    opts = RenderOptions(module_scale=args.scale, quiet_zone=args.quiet_zone)
    for i, m in enumerate(matrices, start=1):
        Path(f"{args.out}-{i}.pbm").write_bytes(render_pbm(m, opts))
        if args.png:
            Path(f"{args.out}-{i}.png").write_bytes(render_png(m, opts))
        print(f"{args.out}-{i}.pbm  version {m.version}-{m.ec_level} mask {m.mask_id}")
    return EXIT_OK


def cmd_unseal(args):
    record = auth.unseal(_load_matrices(args.images), args.key)
    Path(args.out).write_bytes(serialize_record(record))
    return EXIT_OK


def cmd_verify(args):
    printed = _load_record(args.record)
    report = auth.verify(printed, _load_matrices(args.images), args.key)
    print(report.render())
    return {"match": EXIT_OK, "mismatch": EXIT_MISMATCH}.get(report.verdict, EXIT_UNDECODABLE)


def cmd_inspect(args):
    (m,) = _load_matrices([args.image])
    try:
        codewords, version, level, mask = decode_matrix(m)
    except QrSealError as exc:
        raise UndecodableError("qr", str(exc)) from None
    profile = get_profile(version, level)
    print(f"version: {version}")
    print(f"ec level: {level}")
    print(f"mask: {mask}")
    print(f"codewords: {profile.total_codewords} ({len(codewords)} data, {profile.ec_codewords} ec)")
    return EXIT_OK


def cmd_freq(args):
    hist = auth.frequency_histogram(_read(args.input))
    for value, count in enumerate(hist):
        print(f"{value},{count}")
    if args.compare:
        other = auth.frequency_histogram(_read(args.compare))
        try:
            distance = auth.histogram_distance(hist, other)
        except ValueError as exc:
            raise _InputError(str(exc)) from None
        print(f"distance,{distance:.6f}")
    return EXIT_OK


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="qrseal", description="Seal mark-sheet records in encrypted QR codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seal", help="encrypt a record file into QR bitmaps")
    p.add_argument("--record", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX-1.pbm, PREFIX-2.pbm, ...")
    p.add_argument("--png", action="store_true", help="also write PNG files")
    p.add_argument("--scale", type=_positive, default=4, help="pixels per module (default 4)")
    p.add_argument("--quiet-zone", type=int, default=4)
    p.add_argument("--level", choices=EC_LEVELS, default=auth.DEFAULT_LEVEL)
    p.add_argument("--version", type=int, choices=range(1, 11), metavar="1..10")
    p.add_argument("--mask", type=int, choices=range(8), metavar="0..7")
    p.set_defaults(func=cmd_seal)

    p = sub.add_parser("unseal", help="decrypt QR bitmaps back into a record file")
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_unseal)

    p = sub.add_parser("verify", help="check a printed record against sealed QR bitmaps")
    p.add_argument("--record", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("inspect", help="show version, EC level and mask of a QR bitmap")
    p.add_argument("image")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("freq", help="byte frequency histogram of a file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--compare")
    p.set_defaults(func=cmd_freq)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UndecodableError as exc:
        print(f"undecodable: {exc}", file=sys.stderr)
        return EXIT_UNDECODABLE
    except (QrSealError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
