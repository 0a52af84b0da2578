"""
Command-line walkthrough
========================

Every capability is also reachable from the ``kfptools`` command.  Each
run writes its artifacts and a manifest.json (config hash, seed, version,
artifact checksums).  Exit status 0 means every check passed, 2 a check
failed, 1 a usage or input error.
"""
import subprocess
import sys
from pathlib import Path

from _common import output_dir

here = Path(__file__).resolve().parent
pots = here / "potentials"
out = output_dir("cli")


def run(*args):
    cmd = [sys.executable, "-m", "kfptools.cli", *map(str, args)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print("$ kfptools", " ".join(map(str, args)))
    print((proc.stdout + proc.stderr).strip(), f"[exit {proc.returncode}]\n")
    return proc.returncode


run("analyze", "--potential", pots / "example1.json", "--point", "1,1", "--out", out / "analyze")
run("sigma-scan", "--potential", pots / "example1.json", "--kappa", 800, "--box", 10, "--out", out / "scan")
run("check-assumption", "--potential", pots / "example2_n1.json", "--out", out / "assume_n1")
run("check-assumption", "--potential", pots / "example2_n2.json", "--out", out / "assume_n2")   # exit 2
run("partition", "--potential", pots / "example1.json", "--box", 3, "--out", out / "partition")
run("ims-check", "--potential", pots / "quartic1d.json", "--fd-order", 2, "--out", out / "ims")
run("subelliptic", "--potential", pots / "harmonic1d.json", "--out", out / "subelliptic")
run("weyl", "--out", out / "weyl")
run("witten-spectrum", "--potential", pots / "harmonic1d.json", "--out", out / "witten")

# Input errors exit with status 1 and a precise message.
bad = out / "broken.json"
bad.write_text('{"d": 2,\n "terms": [{"alpha": [1, 0] "c": 1}]}')
run("analyze", "--potential", bad, "--point", "0,0", "--out", out / "bad")
