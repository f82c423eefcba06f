"""Command-line front end.

Curve files hold one generator per line in series literal syntax, with
optional `name = <string>` and `precision = <int>` lines and # comments:

    # the cusp
    name = cusp
    t^2
    t^3

Exit codes: 0 success, 1 golden-value mismatch in `reproduce`, 2 parse
error, 3 precision exhaustion or an unstable truncated computation.
"""

import argparse
import json
import sys
from pathlib import Path

from .errors import PrecisionExhausted, Unstable
from .pipeline import run_analysis, to_records, to_text
from .series import parse_series

DATA_DIR = Path(__file__).parent / "data"


class CurveFileError(ValueError):
    pass


def parse_curve_file(text, default_name=None):
    """Returns (name, precision, [generator series])."""
    name = default_name
    precision = None
    generators = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and line.split("=", 1)[0].strip() in ("name",
                                                             "precision"):
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "name":
                name = value
            else:
                try:
                    precision = int(value)
                except ValueError:
                    raise CurveFileError(
                        "line %d: precision must be an integer" % lineno)
            continue
        try:
            generators.append(parse_series(line))
        except ValueError as exc:
            raise CurveFileError("line %d: %s" % (lineno, exc))
    if not generators:
        raise CurveFileError("no generators in curve file")
    return name, precision, generators


def _emit(report, fmt, out):
    if fmt == "records":
        for record in to_records(report):
            out.write(json.dumps(record, sort_keys=True) + "\n")
    else:
        out.write(to_text(report))


def cmd_analyze(args, out=sys.stdout, err=sys.stderr):
    path = Path(args.path)
    try:
        text = path.read_text()
    except OSError as exc:
        err.write("cannot read %s: %s\n" % (path, exc))
        return 2
    try:
        name, precision, generators = parse_curve_file(
            text, default_name=path.stem)
    except CurveFileError as exc:
        err.write("parse error in %s: %s\n" % (path, exc))
        return 2
    if args.precision is not None:
        precision = args.precision
    try:
        report = run_analysis(
            generators, name=name, precision=precision,
            degree_bound=args.degree_bound,
            skip_implicitize=args.skip_implicitize)
    except (PrecisionExhausted, Unstable) as exc:
        err.write("computation did not stabilize: %s\n" % exc)
        return 3
    _emit(report, args.format, out)
    return 0


GOLDEN_KEYS = ("conductor", "reduced_type", "b_exponents", "mu",
               "deviation", "transform_exponents", "verdicts",
               "maximal_reduced_type", "quasi_homogeneous")


def extract_golden_values(report):
    """The stable facts compared by the reproduction harness."""
    got = {
        "conductor": report["profile"]["conductor"],
        "reduced_type": report["profile"]["reduced_type"],
        "maximal_reduced_type": report["invariants"]["maximal_reduced_type"],
        "verdicts": {e["name"]: e["verdict"]
                     for e in report["theorems"]["entries"]},
    }
    if not report["relations"].get("skipped"):
        got["mu"] = report["relations"]["mu"]
        got["deviation"] = report["relations"]["deviation"]
    tr = report["transform"]
    if tr.get("applicable"):
        got["b_exponents"] = tr["b_exponents"]
        got["transform_exponents"] = sorted(
            int(e) for e in _transform_orders(tr["generators"]))
        got["quasi_homogeneous"] = tr["quasi_homogeneous"]["verdict"]
    return got


def _transform_orders(generator_texts):
    orders = []
    for text in generator_texts:
        orders.append(parse_series(text).order())
    return orders


def cmd_reproduce(args, out=sys.stdout, err=sys.stderr):
    corpus = Path(args.corpus) if args.corpus else DATA_DIR
    golden_path = corpus / "golden.json"
    if not golden_path.exists():
        err.write("no golden.json in %s\n" % corpus)
        return 2
    golden = json.loads(golden_path.read_text())
    if not golden:
        err.write("golden corpus is empty\n")
        return 2
    failures = 0
    for entry in golden:
        curve_path = corpus / entry["file"]
        name, precision, generators = parse_curve_file(
            curve_path.read_text(), default_name=curve_path.stem)
        report = run_analysis(generators, name=name, precision=precision,
                              certificates=False)
        got = extract_golden_values(report)
        expected = entry["expected"]
        mismatches = []
        for key, want in expected.items():
            have = got.get(key)
            if have != want:
                mismatches.append((key, want, have))
        status = "ok" if not mismatches else "FAIL"
        out.write("%-24s %s\n" % (entry["file"], status))
        for key, want, have in mismatches:
            out.write("    %s: expected %r, got %r\n" % (key, want, have))
            failures += 1
    out.write("%d curve(s), %d mismatch(es)\n" % (len(golden), failures))
    return 1 if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="curvetorsion",
        description="Exact invariants and differential-module torsion "
                    "certificates for analytic curve singularities.")
    sub = parser.add_subparsers(dest="command", required=True)
    pa = sub.add_parser("analyze", help="analyze one curve file")
    pa.add_argument("path")
    pa.add_argument("--precision", type=int, default=None,
                    help="override the working precision")
    pa.add_argument("--degree-bound", type=int, default=None,
                    help="fix the relation search degree")
    pa.add_argument("--format", choices=("text", "records"), default="text")
    pa.add_argument("--skip-implicitize", action="store_true",
                    help="skip relation/torsion computations; valuation "
                         "checks still run")
    pa.set_defaults(func=cmd_analyze)
    pr = sub.add_parser("reproduce",
                        help="re-run the bundled examples against their "
                             "golden values")
    pr.add_argument("--corpus", default=None,
                    help="directory with golden.json and curve files")
    pr.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
