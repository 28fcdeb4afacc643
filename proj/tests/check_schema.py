"""Validates the config block of CLI outputs against the run-config schema."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
schema = json.loads(pathlib.Path(schema_path).read_text())
runs = [
    ["lambda-star", "--q", "0.55", "--K", "7", "--C", "3"],
    ["simulate", "--n", "300", "--runs", "4", "--lambda", "0.6", "--path-points", "3"],
    ["design", "--q", "0.51", "--K", "6", "--C", "3", "--n", "300", "--runs", "4",
     "--lambda-grid", "0.5,1", "--equilibrium", "1=family:0.32"],
]
with tempfile.TemporaryDirectory() as out:
    for args in runs:
        subprocess.run([cli, *args, "--out", out], check=True, capture_output=True)
    docs = [p for p in pathlib.Path(out).glob("*.json")]
    assert docs, "no JSON outputs"
    for doc in docs:
        jsonschema.validate(json.loads(doc.read_text())["config"], schema)
        print("valid:", doc.name)
