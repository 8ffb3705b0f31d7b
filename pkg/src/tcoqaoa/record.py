from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    fval: float
    num_eva: int
    elapsed_ns: int


@dataclass
class RunRecord:
    """Trace and outcome of one solver run.

    ``num_eva`` counts QAOA executions for the QAOA-based solvers and
    objective evaluations for GA and random search.
    """

    algorithm: str
    seed: int
    trace: list[TraceEntry] = field(default_factory=list)
    best_fval: float = np.inf
    best_z: np.ndarray | None = None
    final_fval: float = np.inf
    final_z: np.ndarray | None = None
    num_eva: int = 0
    wall_time_ns: int = 0
    qaoa_time_ns: int = 0
    config: dict = field(default_factory=dict)

    @property
    def classical_time_ns(self) -> int:
        return self.wall_time_ns - self.qaoa_time_ns

    @property
    def selection_mask(self) -> np.ndarray:
        return (np.asarray(self.best_z) == -1).astype(np.int8)

    def observe(self, z: np.ndarray, fval: float) -> bool:
        """Record a candidate; returns True when it beats the best so far."""
        self.final_fval = float(fval)
        self.final_z = np.array(z, dtype=np.int8)
        if fval < self.best_fval:
            self.best_fval = float(fval)
            self.best_z = self.final_z.copy()
            return True
        return False
