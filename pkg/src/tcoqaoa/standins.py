"""Format-compatible stand-ins for the industrial datasets.

The ABB and Google suites are summarized as per-test-case execution counts,
failure counts and mean durations (the shape produced by aggregating their
public per-execution logs).  The elevator suites are proprietary, so plain
synthetic instances of the same size are used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .data import SyntheticParams, synthetic_manifest, generate_synthetic


@dataclass(frozen=True)
class HistoryShape:
    n: int
    executions: tuple[int, int]      # uniform integer range per test case
    failure_beta: tuple[float, float]
    never_fail_fraction: float
    duration_median: float
    duration_sigma: float


SHAPES = {
    "paintcontrol": HistoryShape(90, (200, 352), (3.0, 9.0), 0.0, 30.0, 0.5),
    "iofrol": HistoryShape(1941, (5, 30), (1.0, 2.5), 0.0, 60.0, 1.0),
    "gsdtsr": HistoryShape(5555, (50, 400), (0.5, 8.0), 0.95, 5.0, 1.5),
}

DESCRIPTIONS = {
    "paintcontrol": "stand-in with the shape of ABB Paint Control (90 test cases)",
    "iofrol": "stand-in with the shape of ABB IOF/ROL (1941 test cases)",
    "gsdtsr": "stand-in with the shape of Google GSDTSR (5555 test cases, mostly never failing)",
}

# Lowest fitness found by long LOCH and GA runs on the bundled files; used as
# the approximation-ratio reference where brute force is out of reach.
BEST_KNOWN = {
    "paintcontrol": 0.13628185399626322,
    "iofrol": 0.09340584025354137,
    "gsdtsr": 0.0004542207521165409,
    "elevator-o2": 0.04181173400763677,
    "elevator-o3": 0.0427048478806831,
}


def history_counts(shape: HistoryShape, seed: int) -> list[tuple[str, float, int, int]]:
    rng = np.random.default_rng(seed)
    n = shape.n
    executions = rng.integers(shape.executions[0], shape.executions[1] + 1, n)
    p_fail = rng.beta(*shape.failure_beta, n)
    p_fail[rng.random(n) < shape.never_fail_fraction] = 0.0
    failures = rng.binomial(executions, p_fail)
    if failures.sum() == 0:
        failures[rng.integers(n)] = 1
    durations = shape.duration_median * rng.lognormal(0.0, shape.duration_sigma, n)
    return [(f"tc{i:04d}", round(float(durations[i]), 3), int(executions[i]), int(failures[i]))
            for i in range(n)]


def write_history_standin(out_dir: Path, name: str, seed: int = 2024) -> Path:
    shape = SHAPES[name]
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "duration", "executions", "failures"])
        w.writerows(history_counts(shape, seed))
    manifest = {
        "name": name,
        "description": DESCRIPTIONS[name],
        "csv": f"{name}.csv",
        "id_column": "id",
        "problem_kind": "TCM",
        "minimize_size": True,
        "rates": {"failure_rate": {"failures": "failures", "executions": "executions"}},
        "attributes": [
            {"column": "failure_rate", "kind": "effectiveness"},
            {"column": "duration", "kind": "cost"},
        ],
        "best_known_fval": BEST_KNOWN[name],
    }
    path = out_dir / f"{name}.yaml"
    path.write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
    return path


def write_elevator_standin(out_dir: Path, name: str, num_eff: int, seed: int) -> Path:
    _, text = generate_synthetic(1925, num_eff, 1, SyntheticParams(), seed, minimize_size=False)
    (out_dir / f"{name}.csv").write_text(text, encoding="utf-8", newline="")
    manifest = synthetic_manifest(name, f"{name}.csv", num_eff, 1, False)
    manifest["description"] = "synthetic stand-in with the size of the Orona elevator suite"
    manifest["best_known_fval"] = BEST_KNOWN[name]
    path = out_dir / f"{name}.yaml"
    path.write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
    return path


def write_running_example(out_dir: Path) -> Path:
    (out_dir / "running-example.csv").write_text(
        "id,failure_rate,execution_time\ntc0,0.5,3\ntc1,0.7,6\ntc2,0.8,1\n", encoding="utf-8"
    )
    manifest = {
        "name": "running-example",
        "description": "three test cases with failure rate and execution time, TCM",
        "csv": "running-example.csv",
        "id_column": "id",
        "problem_kind": "TCM",
        "minimize_size": True,
        "attributes": [
            {"column": "failure_rate", "kind": "effectiveness", "weight": 1},
            {"column": "execution_time", "kind": "cost", "weight": 1},
        ],
        "size_weight": 1,
    }
    path = out_dir / "running-example.yaml"
    path.write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
    return path


def write_all(out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [write_running_example(out)]
    paths += [write_history_standin(out, name) for name in SHAPES]
    paths.append(write_elevator_standin(out, "elevator-o2", 1, seed=2))
    paths.append(write_elevator_standin(out, "elevator-o3", 2, seed=3))
    return paths
