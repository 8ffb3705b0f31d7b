"""Datasets, manifests, synthetic instances and result files."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import yaml

from .ising import AttributeGroup, GroupKind, ProblemSpec, make_spec
from .record import RunRecord


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeSpec:
    column: str
    kind: GroupKind
    weight: float | None = None


@dataclass(frozen=True)
class HistorySpec:
    """Per-execution rows: one line per test run, aggregated by ``id_column``."""

    duration_column: str
    verdict_column: str
    fail_values: tuple[str, ...] = ("1",)


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    csv_path: Path
    id_column: str
    attributes: tuple[AttributeSpec, ...]
    minimize_size: bool = False
    problem_kind: str = "TCS"
    size_weight: float | None = None
    delimiter: str = ","
    # derived column -> (failures column, executions column)
    rates: dict = field(default_factory=dict)
    history: HistorySpec | None = None
    best_known_fval: float | None = None
    description: str = ""

    def __post_init__(self) -> None:
        if not self.attributes:
            raise DatasetError(f"{self.name}: manifest declares no attributes")
        kind = self.problem_kind.upper()
        if kind not in ("TCS", "TCM"):
            raise DatasetError(f"{self.name}: problem_kind must be TCS or TCM")
        object.__setattr__(self, "problem_kind", kind)
        if kind == "TCM" and not self.minimize_size:
            raise DatasetError(f"{self.name}: TCM manifests must set minimize_size")
        weights = [a.weight for a in self.attributes] + [self.size_weight]
        if any(w is not None and not w > 0 for w in weights):
            raise DatasetError(f"{self.name}: weights must be positive")


def bundled_dir() -> Path:
    return Path(str(resources.files("tcoqaoa") / "datasets"))


def bundled_names() -> list[str]:
    return sorted(p.stem for p in bundled_dir().glob("*.yaml"))


def read_manifest(path_or_name: str | Path) -> DatasetManifest:
    """Load a manifest file, or a bundled one by name (e.g. ``paintcontrol``)."""
    path = Path(path_or_name)
    if not path.exists():
        candidate = bundled_dir() / f"{path_or_name}.yaml"
        if not candidate.exists():
            raise DatasetError(
                f"no manifest at {path} and no bundled dataset named {path_or_name!r} "
                f"(bundled: {', '.join(bundled_names())})"
            )
        path = candidate
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    try:
        attrs = tuple(
            AttributeSpec(a["column"], GroupKind(a["kind"]), a.get("weight"))
            for a in raw["attributes"]
        )
        history = raw.get("history")
        if history is not None:
            history = HistorySpec(
                history["duration_column"],
                history["verdict_column"],
                tuple(str(v) for v in history.get("fail_values", ["1"])),
            )
        rates = {k: (v["failures"], v["executions"]) for k, v in (raw.get("rates") or {}).items()}
        return DatasetManifest(
            name=raw.get("name", path.stem),
            csv_path=(path.parent / raw["csv"]).resolve(),
            id_column=raw["id_column"],
            attributes=attrs,
            minimize_size=bool(raw.get("minimize_size", False)),
            problem_kind=raw.get("problem_kind", "TCM" if raw.get("minimize_size") else "TCS"),
            size_weight=raw.get("size_weight"),
            delimiter=raw.get("delimiter", ","),
            rates=rates,
            history=history,
            best_known_fval=raw.get("best_known_fval"),
            description=raw.get("description", ""),
        )
    except KeyError as exc:
        raise DatasetError(f"{path}: manifest is missing key {exc}") from None


def _parse_number(text: str, column: str, row: int) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise DatasetError(f"row {row}, column {column!r}: non-numeric value {text!r}") from None
    if not math.isfinite(value):
        raise DatasetError(f"row {row}, column {column!r}: non-finite value {text!r}")
    if value < 0:
        raise DatasetError(f"row {row}, column {column!r}: negative value {value}")
    return value


def _read_rows(manifest: DatasetManifest) -> tuple[list[str], dict[str, list[str]]]:
    try:
        fh = open(manifest.csv_path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot open {manifest.csv_path}: {exc}") from None
    with fh:
        reader = csv.DictReader(fh, delimiter=manifest.delimiter)
        header = reader.fieldnames or []
        rows = list(reader)
    if manifest.id_column not in header:
        raise DatasetError(f"{manifest.csv_path}: missing id column {manifest.id_column!r}")

    if manifest.history is not None:
        h = manifest.history
        for col in (h.duration_column, h.verdict_column):
            if col not in header:
                raise DatasetError(f"{manifest.csv_path}: missing column {col!r}")
        runs: dict[str, list[tuple[float, bool]]] = defaultdict(list)
        for i, row in enumerate(rows, start=2):
            duration = _parse_number(row[h.duration_column], h.duration_column, i)
            failed = row[h.verdict_column].strip() in h.fail_values
            runs[row[manifest.id_column]].append((duration, failed))
        ids = list(runs)
        columns = {
            h.duration_column: [repr(float(np.mean([d for d, _ in runs[k]]))) for k in ids],
            "failure_rate": [repr(sum(f for _, f in runs[k]) / len(runs[k])) for k in ids],
        }
        return ids, columns

    ids = [row[manifest.id_column] for row in rows]
    seen = set()
    for k in ids:
        if k in seen:
            raise DatasetError(f"{manifest.csv_path}: duplicate id {k!r}")
        seen.add(k)
    columns = {name: [row[name] for row in rows] for name in header}
    return ids, columns


def load_dataset(manifest: DatasetManifest | str | Path) -> ProblemSpec:
    """Build a ProblemSpec from a manifest and its CSV."""
    if not isinstance(manifest, DatasetManifest):
        manifest = read_manifest(manifest)
    ids, columns = _read_rows(manifest)
    if not ids:
        raise DatasetError(f"{manifest.csv_path}: no data rows")

    def numeric(col: str) -> np.ndarray:
        if col not in columns:
            raise DatasetError(f"{manifest.csv_path}: missing column {col!r}")
        return np.array([_parse_number(v, col, i) for i, v in enumerate(columns[col], start=2)])

    for derived, (fail_col, exec_col) in manifest.rates.items():
        failures, executions = numeric(fail_col), numeric(exec_col)
        if np.any(executions == 0):
            raise DatasetError(f"{manifest.csv_path}: zero executions for some test case")
        columns[derived] = [repr(float(x)) for x in failures / executions]

    n_groups = len(manifest.attributes) + manifest.minimize_size
    default_w = 1.0 / n_groups
    groups = []
    for a in manifest.attributes:
        values = numeric(a.column)
        if not values.sum() > 0:
            raise DatasetError(f"{manifest.csv_path}: column {a.column!r} sums to zero")
        groups.append(AttributeGroup(a.kind, values, a.weight or default_w, a.column))
    if manifest.minimize_size:
        groups.append(AttributeGroup(GroupKind.COST, np.ones(len(ids)),
                                     manifest.size_weight or default_w, "size"))
    return ProblemSpec(tuple(groups), minimize_size=manifest.minimize_size, ids=ids)


# --- synthetic instances -------------------------------------------------------

@dataclass(frozen=True)
class SyntheticParams:
    """Attribute distributions for generated suites.

    Effectiveness values are uniform on ``[eff_low, eff_high)`` with a
    fraction ``eff_zero_fraction`` forced to zero; cost values are
    log-uniform on ``[cost_low, cost_high)``.
    """

    eff_low: float = 0.0
    eff_high: float = 1.0
    eff_zero_fraction: float = 0.0
    cost_low: float = 0.1
    cost_high: float = 100.0

    def __post_init__(self) -> None:
        if not 0 <= self.eff_low < self.eff_high:
            raise ValueError("need 0 <= eff_low < eff_high")
        if not 0 <= self.eff_zero_fraction < 1:
            raise ValueError("eff_zero_fraction must lie in [0, 1)")
        if not 0 < self.cost_low < self.cost_high:
            raise ValueError("need 0 < cost_low < cost_high")


def _fmt(x: float) -> str:
    return repr(float(x))


def generate_synthetic(
    n: int,
    num_eff_groups: int = 1,
    num_cost_groups: int = 1,
    params: SyntheticParams | None = None,
    seed: int = 0,
    minimize_size: bool = True,
) -> tuple[ProblemSpec, str]:
    """Random suite and its CSV text (columns ``id, eff0.., cost0..``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if num_eff_groups + num_cost_groups < 1:
        raise ValueError("need at least one attribute group")
    params = params or SyntheticParams()
    rng = np.random.default_rng(seed)
    eff = []
    for _ in range(num_eff_groups):
        v = rng.uniform(params.eff_low, params.eff_high, n)
        v[rng.random(n) < params.eff_zero_fraction] = 0.0
        if not v.sum() > 0:
            v[rng.integers(n)] = params.eff_high
        eff.append(v)
    lo, hi = np.log(params.cost_low), np.log(params.cost_high)
    cost = [np.exp(rng.uniform(lo, hi, n)) for _ in range(num_cost_groups)]

    names = [f"eff{k}" for k in range(num_eff_groups)] + [f"cost{k}" for k in range(num_cost_groups)]
    ids = [f"t{i}" for i in range(n)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", *names])
    for i in range(n):
        writer.writerow([ids[i], *(_fmt(col[i]) for col in eff + cost)])
    spec = make_spec(eff, cost, minimize_size=minimize_size,
                     names=names + (["size"] if minimize_size else []), ids=ids)
    return spec, buf.getvalue()


def synthetic_manifest(name: str, csv_name: str, num_eff_groups: int, num_cost_groups: int,
                       minimize_size: bool) -> dict:
    attrs = [{"column": f"eff{k}", "kind": "effectiveness"} for k in range(num_eff_groups)]
    attrs += [{"column": f"cost{k}", "kind": "cost"} for k in range(num_cost_groups)]
    return {
        "name": name,
        "csv": csv_name,
        "id_column": "id",
        "problem_kind": "TCM" if minimize_size else "TCS",
        "minimize_size": minimize_size,
        "attributes": attrs,
    }


def write_synthetic(out_dir: str | Path, name: str, n: int, num_eff_groups: int = 1,
                    num_cost_groups: int = 1, params: SyntheticParams | None = None,
                    seed: int = 0, minimize_size: bool = True) -> Path:
    """Write ``<name>.csv`` and ``<name>.yaml``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _, text = generate_synthetic(n, num_eff_groups, num_cost_groups, params, seed, minimize_size)
    (out / f"{name}.csv").write_text(text, encoding="utf-8", newline="")
    manifest = synthetic_manifest(name, f"{name}.csv", num_eff_groups, num_cost_groups,
                                  minimize_size)
    manifest["description"] = f"synthetic suite n={n} seed={seed}"
    path = out / f"{name}.yaml"
    path.write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
    return path


# --- results -------------------------------------------------------------------

@dataclass(frozen=True)
class ResultRow:
    dataset: str
    algorithm: str
    config: str
    N: str
    p: str
    pop_size: str
    seed: int
    iteration: int
    fval: float
    ar: float
    num_eva: int
    elapsed_ms: float
    qaoa_ms: float
    classical_ms: float
    fval_min: float
    fval_min_source: str


RESULT_COLUMNS = [f.name for f in fields(ResultRow)]
_INT_COLS = {"seed", "iteration", "num_eva"}
_FLOAT_COLS = {"fval", "ar", "elapsed_ms", "qaoa_ms", "classical_ms", "fval_min"}


def config_fingerprint(config: dict) -> str:
    return ";".join(f"{k}={config[k]}" for k in sorted(config))


def rows_from_record(dataset: str, record: RunRecord, fval_min: float,
                     source: str) -> list[ResultRow]:
    """One row per trace entry; time columns are cumulative."""
    cfg = record.config
    total = max(record.wall_time_ns, 1)
    qaoa_share = record.qaoa_time_ns / total
    rows = []
    for e in record.trace:
        elapsed = e.elapsed_ns / 1e6
        rows.append(ResultRow(
            dataset=dataset,
            algorithm=record.algorithm,
            config=config_fingerprint(cfg),
            N=str(cfg.get("N", "")),
            p=str(cfg.get("p", "")),
            pop_size=str(cfg.get("pop_size", "")),
            seed=int(record.seed),
            iteration=e.iteration,
            fval=e.fval,
            ar=e.fval / fval_min if fval_min > 0 else math.nan,
            num_eva=e.num_eva,
            elapsed_ms=elapsed,
            qaoa_ms=elapsed * qaoa_share,
            classical_ms=elapsed * (1 - qaoa_share),
            fval_min=fval_min,
            fval_min_source=source,
        ))
    return rows


def write_results(rows: Iterable[ResultRow], csv_path: str | Path) -> Path:
    """Append rows to ``csv_path``, writing the header when the file is new or empty."""
    path = Path(csv_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        new = not path.exists() or path.stat().st_size == 0
        with open(path, "a", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS, quoting=csv.QUOTE_MINIMAL)
            if new:
                writer.writeheader()
            for row in rows:
                d = asdict(row)
                for k in _FLOAT_COLS:
                    d[k] = repr(float(d[k]))
                writer.writerow(d)
    except OSError as exc:
        raise OSError(f"writing results to {path}: {exc}") from exc
    return path


def read_results(csv_path: str | Path) -> list[ResultRow]:
    out = []
    with open(csv_path, newline="", encoding="utf-8") as fh:
        for raw in csv.DictReader(fh):
            vals = {}
            for k in RESULT_COLUMNS:
                v = raw[k]
                if k in _INT_COLS:
                    vals[k] = int(v)
                elif k in _FLOAT_COLS:
                    vals[k] = float(v)
                else:
                    vals[k] = v
            out.append(ResultRow(**vals))
    return out


def write_summary(record: RunRecord, dataset: str, fval_min: float, source: str,
                  path: str | Path) -> Path:
    """Per-run JSON: best fitness, selection mask (1 = selected), config echo."""
    path = Path(path)
    summary = {
        "dataset": dataset,
        "algorithm": record.algorithm,
        "seed": int(record.seed),
        "config": record.config,
        "best_fval": record.best_fval,
        "final_fval": record.final_fval,
        "ar": record.best_fval / fval_min if fval_min > 0 else None,
        "fval_min": fval_min,
        "fval_min_source": source,
        "num_eva": record.num_eva,
        "wall_time_s": record.wall_time_ns / 1e9,
        "qaoa_time_s": record.qaoa_time_ns / 1e9,
        "selection_mask": "".join(str(int(b)) for b in record.selection_mask),
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(summary, indent=2, default=_jsonable), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"writing summary to {path}: {exc}") from exc
    return path


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def selection_mask(z: Sequence[int]) -> str:
    return "".join("1" if s == -1 else "0" for s in z)
