#!/usr/bin/env python3
"""Runs the cdd binary on the fixtures and validates every JSON document it
emits against the schemas shipped in schemas/.

usage: validate_reports.py CDD_BINARY FIXTURES_DIR SCHEMAS_DIR
"""
import json
import os
import shutil
import subprocess
import sys
import tempfile

import jsonschema


def load(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def run(binary, args, cwd):
    env = {k: v for k, v in os.environ.items() if k != "CDD_CONFIG"}
    done = subprocess.run([binary, *args], cwd=cwd, capture_output=True, text=True, env=env)
    if done.returncode not in (0, 1):
        sys.exit(f"cdd {' '.join(args)} exited {done.returncode}: {done.stderr}")
    return done.stdout


def main():
    binary, fixtures, schemas = sys.argv[1:4]
    check = load(os.path.join(schemas, "check-report.schema.json"))
    drift = load(os.path.join(schemas, "drift-report.schema.json"))
    series = load(os.path.join(schemas, "series.schema.json"))
    for schema in (check, drift, series):
        jsonschema.Draft202012Validator.check_schema(schema)

    documents = []
    with tempfile.TemporaryDirectory() as tmp:
        corpus = os.path.join(tmp, "corpus")
        shutil.copytree(os.path.join(fixtures, "oracle"), corpus)
        documents.append(("check", check, run(binary, ["check", "--format", "json"], corpus)))
        documents.append(("reconcile", drift, run(binary, ["reconcile", "--format", "json"], corpus)))
        documents.append(("reconcile --fix", drift, run(binary, ["reconcile", "--fix", "--format", "json"], corpus)))
        broken = os.path.join(tmp, "broken")
        os.makedirs(broken)
        with open(os.path.join(broken, "Bad.java"), "w") as f:
            f.write("class {")
        documents.append(("check with parse failure", check, run(binary, ["check", "--format", "json"], broken)))
        snaps = os.path.join(fixtures, "history", "snapshots")
        documents.append(("history", series,
                          run(binary, ["history", "--snapshots", snaps, "--format", "json", "--out-dir", tmp], tmp)))

    for name, schema, text in documents:
        doc = json.loads(text)
        jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
        print(f"valid: {name}")


if __name__ == "__main__":
    main()
