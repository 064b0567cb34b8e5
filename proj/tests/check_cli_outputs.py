#!/usr/bin/env python3
"""Run the CLI twice per case, validate JSON outputs against schema/ and
require byte-identical reruns."""
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

SMALL_FLOW = {
    "name": "small-flow",
    "seed": 4,
    "surface": {
        "kind": "flow",
        "n": 3,
        "initial": {"type": "spheroid", "N": 200, "a_axial": 1.4, "b_radial": 1.0},
        "flow": {"t_end": 0.05, "dt_max": 0.001, "snapshot_interval": 0.005},
    },
    "diagnostics": [
        {"type": "simulate", "every": 2},
        {"type": "gamma-estimate"},
        {"type": "parabolic-check", "centers": 3},
    ],
}


def main():
    cli, src, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    flow_cfg = work / "small-flow.json"
    flow_cfg.write_text(json.dumps(SMALL_FLOW))
    scen = src / "scenarios"

    schemas = {}
    resources = []
    for f in sorted((src / "schema").glob("*.schema.json")):
        doc = json.loads(f.read_text())
        schemas[f.name.removesuffix(".schema.json")] = doc
        resources.append((doc["$id"], Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)

    cases = [
        ("sphere", ["run", "--config", str(scen / "sphere-n3.json")], 0),
        ("cylinder", ["run", "--config", str(scen / "cylinder-exact.json")], 0),
        ("necks", ["detect-necks", "--model", "cylinder", "--n", "4"], 0),
        ("decompose", ["decompose", "--model", "sphere", "--eps0", "0.2", "--eps1", "0.1"], 0),
        ("oracle", ["oracle", "--instances", "10", "--candidates", "2000", "--seed", "3"], 0),
        ("constants", ["constants", "--gamma1", "0.1", "--gamma2", "0.1", "--eta0", "0.01"], 0),
        ("flow", ["run", "--config", str(flow_cfg)], 0),
    ]
    failures = []
    for name, args, want in cases:
        outs = []
        for rep in ("a", "b"):
            out = work / name / rep
            r = subprocess.run([cli, *args, "--out", str(out)], capture_output=True)
            if r.returncode != want:
                failures.append(f"{name}: exit {r.returncode}, expected {want}: {r.stderr.decode()[:300]}")
            outs.append(out)
        a, b = outs
        files_a = sorted(p.name for p in a.iterdir())
        files_b = sorted(p.name for p in b.iterdir())
        if files_a != files_b:
            failures.append(f"{name}: file sets differ {files_a} vs {files_b}")
        for f in files_a:
            if (a / f).read_bytes() != (b / f).read_bytes():
                failures.append(f"{name}: {f} differs between reruns")
        manifest = json.loads((a / "manifest.json").read_text())
        if sorted(manifest["outputs"] + ["manifest.json"]) != files_a:
            failures.append(f"{name}: manifest outputs {manifest['outputs']} do not match {files_a}")
        for f in files_a:
            if not f.endswith(".json"):
                continue
            stem = f.removesuffix(".json")
            if stem not in schemas:
                failures.append(f"{name}: no schema for {f}")
                continue
            try:
                jsonschema.Draft202012Validator(schemas[stem], registry=registry).validate(json.loads((a / f).read_text()))
            except jsonschema.ValidationError as e:
                failures.append(f"{name}: {f} fails its schema: {e.message} at {list(e.absolute_path)}")
        print(f"{name}: {len(files_a)} files checked")

    # Malformed input: precondition exit, structured error, no outputs.
    out = work / "malformed"
    r = subprocess.run([cli, "run", "--config", str(scen / "malformed-eps.json"), "--out", str(out)], capture_output=True)
    if r.returncode != 2:
        failures.append(f"malformed: exit {r.returncode}, expected 2")
    if out.exists():
        failures.append("malformed: output directory was created")
    try:
        err = json.loads(r.stderr)
        if err.get("status") != "failed" or err["error"]["kind"] != "precondition":
            failures.append(f"malformed: unexpected error record {err}")
    except (ValueError, KeyError):
        failures.append(f"malformed: stderr is not a JSON error record: {r.stderr[:200]!r}")
    print("malformed: checked")

    for f in failures:
        print("FAIL", f)
    print("ok" if not failures else f"{len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
