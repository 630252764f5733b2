"""
The command-line harness
========================

Everything the library does can be driven from ``viprox``. This script runs
the same commands through ``viprox.cli.main`` in a temporary directory:
a solve from a small config file, a replay of the saved report, and an
independent certification of the returned point.
"""
import json
import os
import tempfile

from viprox.cli import main

work = tempfile.mkdtemp(prefix="viprox-demo-")
cfg = os.path.join(work, "run.cfg")
with open(cfg, "w") as fh:
    fh.write("solver = rump   # restarted universal mirror prox\n"
             "problem = affine-vi\n"
             "eps = 1e-3\n"
             "skew = 1.5\n")

# 1. solve; the flag overrides the seed in the file
out1 = os.path.join(work, "first")
code = main(["solve", "--config", cfg, "--seed", "7", "--out", out1])
with open(os.path.join(out1, "report.json")) as fh:
    rep = json.load(fh)
print("exit", code, "| x =", [round(v, 4) for v in rep["x"]], "| iterations", rep["iterations"])

# 2. the saved report doubles as a config file
out2 = os.path.join(work, "replay")
main(["solve", "--config", os.path.join(out1, "report.json"), "--out", out2])
with open(os.path.join(out2, "report.json")) as fh:
    print("replay reproduces x:", json.load(fh)["x"] == rep["x"])

# 3. certify the point against the same problem
print("certify exit code:", main(["certify", "--config", cfg, "--seed", "7",
                                  "--point", os.path.join(out1, "report.json")]))

# 4. a bad key is a configuration error (exit 2)
with open(cfg, "a") as fh:
    fh.write("stepsize = 0.1\n")
print("bad config exit code:", main(["solve", "--config", cfg]))
