"""Runs every CLI subcommand at small sizes and validates the JSON output."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

RUNS = [
    ["annulus", "--R", "0.3"],
    ["disc", "--h2"],
    ["verify-bounds"],
    ["grid-cheeger", "--shape", "square", "--resolution", "16"],
    ["grid-cheeger", "--shape", "half_ring", "--R", "0.4", "--resolution", "16", "--stencil", "four"],
    ["grid-hk", "--shape", "annulus", "--R", "0.5", "--resolution", "16", "--k", "2", "--restarts", "3"],
    ["grid-hk", "--shape", "disc", "--resolution", "12", "--k", "3", "--objective", "sum"],
    ["adjust", "--shape", "disc", "--resolution", "12", "--k", "2", "--n", "2"],
    ["plap-limit", "--shape", "disc", "--resolution", "10", "--k", "2", "--p", "2,1.5,1.2", "--restarts", "2"],
]


def main() -> int:
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, args in enumerate(RUNS):
            out = Path(tmp) / f"run{i}.json"
            proc = subprocess.run([cli, *args, "--out", str(out)], capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            doc = json.loads(out.read_text())
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            for e in errors[:5]:
                print(f"FAIL {' '.join(args)}: {'/'.join(map(str, e.path))}: {e.message}")
            failures += bool(errors)
            if not errors:
                print(f"ok   {' '.join(args)}")

        # A config file supplies defaults that flags override.
        cfg = Path(tmp) / "run.toml"
        cfg.write_text('seed = 4\n[grid-hk]\nshape = "annulus"\nresolution = 12\nk = 2\nrestarts = 2\n')
        out = Path(tmp) / "cfg.json"
        proc = subprocess.run([cli, "--config", str(cfg), "grid-hk", "--resolution", "14", "--out", str(out)],
                              capture_output=True, text=True)
        doc = json.loads(out.read_text()) if proc.returncode == 0 else None
        if doc is None or doc["config"]["resolution"] != 14 or doc["config"]["seed"] != 4 or doc["config"]["k"] != 2:
            print(f"FAIL config file: {proc.stderr.strip()}")
            failures += 1
        else:
            print("ok   --config file with flag override")

        bad = subprocess.run([cli, "grid-hk", "--shape", "torus"], capture_output=True, text=True)
        if bad.returncode == 0:
            print("FAIL unknown shape accepted")
            failures += 1
        else:
            print("ok   unknown shape rejected")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
