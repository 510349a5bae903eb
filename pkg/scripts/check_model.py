#!/usr/bin/env python3
"""Check a model file: report diagnostics, or print its canonical form.

Exit status is 0 when the model parses and validates, 1 otherwise, so
the command works as a pre-commit or CI gate for .relis files.
"""

from __future__ import annotations

import argparse
import sys

from srkit.dsl import DslError, parse, pretty_print, validate


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("path", help="model file ('-' reads stdin)")
    ap.add_argument(
        "--canonical",
        action="store_true",
        help="on success, print the canonically formatted source",
    )
    args = ap.parse_args(argv)

    if args.path == "-":
        raw: bytes | str = sys.stdin.read()
        origin = "<stdin>"
    else:
        with open(args.path, "rb") as f:
            raw = f.read()
        origin = args.path

    try:
        model = parse(raw, origin=origin)
        validate(model)
    except DslError as err:
        for d in err.diagnostics:
            print(f"{origin}:{d.loc.line}:{d.loc.column}: {d.code}: {d.message}", file=sys.stderr)
        return 1

    if args.canonical:
        sys.stdout.write(pretty_print(model, origin=origin).content)
    else:
        phases = len(model.screening.phases)
        cats = sum(1 for _ in model.iter_categories())
        print(f"{origin}: ok ({model.project.name!r}, {phases} phases, {cats} categories)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
