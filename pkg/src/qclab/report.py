"""Scenario configuration and deterministic report emission.

A run produces ``report.json`` (scenario echo, per-operation results,
environment fingerprint, wall-clock timings) plus flat CSV tables, one row
per checked sample, suitable for external tooling.  CSV bytes are a pure
function of config and seed: timings and environment live only in the JSON
tree.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

COMMANDS = ("distortion", "modulus", "means", "phi", "bounds",
            "equicontinuity", "necessity", "full-battery")

DEFAULT_CONFIG = {
    "seed": 0,
    "workers": 1,
    "out": "qclab-out",
    "format": "both",
    "plots": True,
    "distortion": {"maps": ["identity", "radial_stretch:2", "radial_stretch:3",
                            "log_distortion", "shrinking_stretch:10"],
                   "n_samples": 100},
    "modulus": {"rings": ["1:2.718281828459045"], "resolution": 256},
    "means": {"maps": ["radial_stretch:3", "log_distortion"]},
    "phi": {"phis": ["exp", "square", "exp-sqrt"], "ps": [0.5, 1.0, 2.0],
            "conditions": "all"},
    "bounds": {"maps": ["identity", "radial_stretch:2", "radial_stretch:3",
                        "log_distortion", "shrinking_stretch:10"],
               "rings": ["0.05:0.5", "0.1:0.9", "0.2:0.4"],
               "n_samples": 2000},
    "equicontinuity": {"alphas": [1.0, 2.0, 3.0], "ms": [10, 100, 1000]},
    "necessity": {"phi": "linear", "budget": 12.566370614359172, "delta": 0.5,
                  "members": 12},
}


def merge_config(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge_config(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path: Optional[str]) -> dict:
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))   # deep copy
    if path is None:
        return cfg
    raw = Path(path).read_bytes()
    try:
        import tomllib  # py311+
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        user = tomllib.loads(raw.decode())
    except Exception as exc:
        raise SystemExit(f"config parse error in {path}: {exc}") from exc
    return merge_config(cfg, user)


@dataclass
class Scenario:
    command: str
    config: dict
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; choose from {COMMANDS}")


@dataclass
class Report:
    """Outcome of one scenario run."""

    scenario: Scenario
    tables: dict = field(default_factory=dict)   # name -> (header, rows)
    tree: dict = field(default_factory=dict)     # structured results
    timings: dict = field(default_factory=dict)
    passes: list = field(default_factory=list)   # (check name, bool)

    @property
    def all_passed(self) -> bool:
        return all(ok for _, ok in self.passes)

    def add_table(self, name: str, header: list, rows: list):
        self.tables[name] = (list(header), [list(r) for r in rows])

    def add_pass(self, name: str, ok: bool):
        self.passes.append((name, bool(ok)))


def _fmt(x) -> str:
    """Stable cell formatting: floats at 12 significant digits."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def environment_fingerprint() -> dict:
    import numpy
    import scipy
    return {
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }


def render_csv(header: list, rows: list) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(c) for c in row])
    return buf.getvalue().encode()


def emit(report: Report, out_dir: str, fmt: str = "both") -> list:
    """Write report files; returns the list of paths written."""
    if fmt not in ("json", "csv", "both"):
        raise ValueError(f"format must be json, csv or both, got {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        for name, (header, rows) in sorted(report.tables.items()):
            p = out / f"{name}.csv"
            p.write_bytes(render_csv(header, rows))
            written.append(p)
    if fmt in ("json", "both"):
        tree = {
            "scenario": {"command": report.scenario.command,
                         "seed": report.scenario.seed,
                         "config": report.scenario.config},
            "environment": environment_fingerprint(),
            "timings": report.timings,
            "results": report.tree,
            "passes": {name: ok for name, ok in report.passes},
            "all_passed": report.all_passed,
        }
        p = out / "report.json"
        p.write_text(json.dumps(tree, indent=2, sort_keys=True, default=_fmt) + "\n")
        written.append(p)
    return written
