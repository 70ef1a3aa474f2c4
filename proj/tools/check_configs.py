#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Validate campaign configs against the shipped schema with a reference
JSON Schema implementation."""
import json
import sys

import jsonschema


def main(argv):
    if len(argv) < 3:
        print("usage: check_configs.py SCHEMA CONFIG...", file=sys.stderr)
        return 2
    with open(argv[1]) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    for path in argv[2:]:
        with open(path) as f:
            doc = json.load(f)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            print(f"{path}: /{'/'.join(map(str, e.path))}: {e.message}")
        bad += bool(errors)
        if not errors:
            print(f"{path}: ok")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
