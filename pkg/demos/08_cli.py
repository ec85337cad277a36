"""
Running tasks from a config
===========================

Every analysis is also a CLI task. This script writes a config, runs the
jensen task twice and shows that the second run is a cache hit with
byte-identical output.
"""

import json
import os
import tempfile
from pathlib import Path

from qplab.cli import main

work = Path(tempfile.mkdtemp())
os.environ["QPLAB_CACHE"] = str(work / "cache")
cfg = {"task": "jensen", "potential": {"type": "amo", "lambda": 2.0}, "alpha": "golden",
       "params": {"E": 0.0, "N": 20000, "eps": {"linspace": [0, 0.3, 13]}}}
(work / "jensen.json").write_text(json.dumps(cfg))

out = str(work / "run")
main(["jensen", "--config", str(work / "jensen.json"), "--out", out])
first = Path(out + ".json").read_bytes()
main(["jensen", "--config", str(work / "jensen.json"), "--out", out])
print("identical output:", first == Path(out + ".json").read_bytes())
print(Path(out + ".csv").read_text()[:300])
