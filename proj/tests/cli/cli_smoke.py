"""End-to-end checks of the boxcast command line against the fixtures."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

EXE = sys.argv[1]
FIX = Path(sys.argv[2])
failures = []


def run(*args):
    p = subprocess.run([EXE, *map(str, args)], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def expect(name, cond, info=""):
    print(("ok   " if cond else "FAIL ") + name + ("" if cond else f"  {info}"))
    if not cond:
        failures.append(name)


rc, out, _ = run("check", FIX / "pr_box.json", "--kind", "local")
rep = json.loads(out)
expect("pr box is outside the local set", rc == 1 and rep["results"]["classification"] == "outside", rc)
expect("separating functional reported", "functional" in rep["results"]["membership"])

rc, _, _ = run("check", FIX / "uniform_box.json", "--kind", "local")
expect("uniform box is local", rc == 0, rc)

rc, _, err = run("check", FIX / "malformed.json", "--kind", "local")
expect("malformed input exits 2", rc == 2 and "input error" in err, rc)

rc, _, _ = run("check", FIX / "missing.json", "--kind", "ns")
expect("missing file exits 2", rc == 2, rc)

rc, _, _ = run("check", FIX / "pr_box.json", "--kind", "bogus")
expect("unknown kind exits 2", rc == 2, rc)

rc, _, _ = run("check", FIX / "pr_pr.json", "--kind", "ns")
expect("PR x PR is non-signalling", rc == 0, rc)

rc, _, _ = run("check", FIX / "pr_pr.json", "--kind", "lrns")
expect("PR x PR is outside LR_ns", rc == 1, rc)

rc, _, _ = run("check", FIX / "werner_0.3.json", "--kind", "unsteerable")
expect("Werner 0.3 has an LHS model", rc == 0, rc)

rc, out, _ = run("check", FIX / "werner_0.9.json", "--kind", "unsteerable")
expect("Werner 0.9 is steerable", rc == 1 and json.loads(out)["results"]["feasibility"]["steerable"], rc)

rc, out, _ = run("elr", FIX / "local_box.json")
expect("local box has zero E_LR", rc == 0 and json.loads(out)["results"]["value"] <= 1e-6, out[:200])

vals = []
for seed in (0, 3, 11):
    rc, out, _ = run("elr", FIX / "pr_box.json", "--seed", seed)
    vals.append(json.loads(out)["results"]["value"])
expect("PR box E_LR positive and seed stable", min(vals) > 0.1 and max(vals) - min(vals) <= 1e-3, vals)

with tempfile.TemporaryDirectory() as d:
    w = Path(d) / "witness.json"
    rc, out, _ = run("elr", FIX / "pr_box.json", "--witness", w)
    wit = json.loads(w.read_text())
    expect("witness file written", rc == 0 and "table" in wit)
    rc, _, _ = run("check", w, "--kind", "local")
    expect("E_LR witness is local", rc == 0, rc)

rc, out, _ = run("steering", FIX / "werner_0.3.json")
expect("unsteerable fixture has E_A bound below 1e-4", rc == 0 and json.loads(out)["results"]["upper_bound"] <= 1e-4)

rc, out, _ = run("steering", FIX / "werner_0.9.json", "--format", "text")
expect("text format renders the report", rc == 0 and "results.upper_bound = " in out, out[:200])

rc, out, _ = run("verify", "--scope", "boxes", "--scale", "0.05", "--inject-fault", "chain-rule")
rep = json.loads(out)
bad = [c["name"] for c in rep["results"]["checks"] if not c["passed"]]
expect("injected fault fails the chain-rule check by name", rc == 1 and bad == ["chain-rule"], (rc, bad))
expect("boxes scope runs no assemblage checks",
       all(c["criterion"] in (0, 1, 2, 3, 4, 5) for c in rep["results"]["checks"])
       and not any("steering" in c["name"] for c in rep["results"]["checks"]))

sys.exit(1 if failures else 0)
