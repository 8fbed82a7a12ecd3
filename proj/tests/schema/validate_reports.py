"""Runs every report-producing subcommand on a small fixture and validates
the JSON against the shipped schema."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    sncf, schema_path = str(Path(sys.argv[1]).resolve()), Path(sys.argv[2])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    with tempfile.TemporaryDirectory() as tmp:
        t = Path(tmp)

        def sncf_run(*args: str, stdout=None) -> None:
            subprocess.run([sncf, *args], check=True, cwd=t, stdout=stdout)

        sncf_run("synth", "--classes", "3", "--n-per-class", "150", "--d", "24", "--seed", "5",
                 "--out-features", "f.npy", "--out-labels", "l.csv", "--out-truth", "t.csv",
                 "--out-report", "synth.json")
        common = ["--k-eigen", "5", "--neighborhoods", "25,15", "--min-cluster-size", "15"]
        sncf_run("detect", "--features", "f.npy", "--labels", "l.csv", *common,
                 "--out-report", "detect.json", "--out-verdicts", "v.csv", "--timing")
        sncf_run("detect", "--features", "f.npy", "--mode", "dataset-gmm", *common,
                 "--out-report", "detect_gmm.json", "--out-verdicts", "vg.csv")
        sncf_run("embed", "--features", "f.npy", "--k-eigen", "4", "--out", "e.npy", "--out-report", "embed.json")
        sncf_run("optics", "--points", "e.npy", "--min-pts", "10", "--min-cluster-size", "15", "--out", "o.csv",
                 "--out-report", "optics.json")
        sncf_run("gmm", "--points", "e.npy", "--covariance", "spherical", "--out", "gmm.json")
        sncf_run("score", "--verdicts", "v.csv", "--truth", "t.csv", "--out-report", "score.json")
        sncf_run("losses-check", "--batches", "3", "--out-report", "losses.json", stdout=subprocess.DEVNULL)

        failures = 0
        for report in sorted(t.glob("*.json")):
            doc = json.loads(report.read_text())
            errors = list(validator.iter_errors(doc))
            for e in errors:
                print(f"{report.name}: {list(e.absolute_path)}: {e.message}")
            failures += bool(errors)
            print(f"{report.name}: {'invalid' if errors else 'valid'}")

        # The per-subcommand branches must actually bind.
        broken = json.loads((t / "detect.json").read_text())
        del broken["counts"]
        if validator.is_valid(broken):
            print("detect.json without counts was accepted")
            failures += 1
        broken = json.loads((t / "losses.json").read_text())
        broken["manifest"]["inputs"]["x"] = "not-a-digest"
        if validator.is_valid(broken):
            print("malformed digest was accepted")
            failures += 1
        return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
