"""Derivative-free minimizer built on linear interpolation over a simplex.

This is the unconstrained case of Powell's COBYLA: a linear model is fitted
through ``d + 1`` points, a step of length ``rho`` is taken down the model
gradient, and ``rho`` shrinks when steps stop paying off.  Simplex geometry is
repaired with perpendicular moves when vertices degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Powell's acceptability constants
_ALPHA = 0.25
_BETA = 2.1
_GAMMA = 0.5
_DELTA = 1.1


class BudgetExhausted(Exception):
    pass


@dataclass
class ObjectiveHandle:
    arity: int
    evaluator: Callable[[np.ndarray], float]
    budget: int = 100
    evaluations: int = 0
    best_point: np.ndarray | None = None
    best_value: float = np.inf
    history: list[float] = field(default_factory=list)

    def __call__(self, x: np.ndarray) -> float:
        if self.evaluations >= self.budget:
            raise BudgetExhausted
        value = float(self.evaluator(np.array(x, dtype=np.float64)))
        self.evaluations += 1
        if not np.isfinite(value):
            raise FloatingPointError(
                f"objective returned {value} at evaluation {self.evaluations}, x={list(x)}"
            )
        if value < self.best_value:
            self.best_value = value
            self.best_point = np.array(x, dtype=np.float64)
        self.history.append(value)
        return value


@dataclass(frozen=True)
class OptimReport:
    best_point: np.ndarray
    best_value: float
    evaluations: int
    converged: bool
    history: tuple[float, ...] = ()

    @property
    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.history))


def _geometry(A: np.ndarray):
    inv = np.linalg.inv(A)
    vsig = 1.0 / np.linalg.norm(inv, axis=0)
    veta = np.linalg.norm(A, axis=1)
    return inv, vsig, veta


def minimize(
    handle: ObjectiveHandle,
    start: Sequence[float],
    rho_begin: float = 0.5,
    rho_end: float = 1e-4,
) -> OptimReport:
    """Minimize ``handle.evaluator`` from ``start`` within ``handle.budget`` calls."""
    x0 = np.array(start, dtype=np.float64)
    d = x0.size
    if d < 1 or d != handle.arity:
        raise ValueError(f"start has {d} entries, handle expects {handle.arity}")
    if handle.budget < d + 2:
        raise ValueError(f"budget {handle.budget} is below d + 2 = {d + 2}")
    if not 0 < rho_end <= rho_begin:
        raise ValueError("need 0 < rho_end <= rho_begin")

    rho = rho_begin
    converged = False
    points = np.empty((d + 1, d))
    values = np.empty(d + 1)
    try:
        points[0] = x0
        values[0] = handle(x0)
        for j in range(d):
            points[j + 1] = x0
            points[j + 1, j] += rho
            values[j + 1] = handle(points[j + 1])

        pole = 0
        # set after a trust-region evaluation, cleared when geometry needs review
        trust_branch = False
        while True:
            # keep the best vertex as pole; ties leave the pole in place
            best = int(np.argmin(values))
            if values[best] < values[pole]:
                pole = best
            others = [j for j in range(d + 1) if j != pole]
            A = points[others] - points[pole]
            inv, vsig, veta = _geometry(A)
            grad = inv @ (values[others] - values[pole])
            acceptable = bool(np.all(vsig >= _ALPHA * rho) and np.all(veta <= _BETA * rho))

            if not trust_branch and not acceptable:
                if veta.max() > _BETA * rho:
                    l = int(np.argmax(veta))
                else:
                    l = int(np.argmin(vsig))
                dx = _GAMMA * rho * vsig[l] * inv[:, l]
                if grad @ dx > 0:
                    dx = -dx
                x = points[pole] + dx
                values[others[l]] = handle(x)
                points[others[l]] = x
                continue

            trust_branch = True
            gnorm = float(np.linalg.norm(grad))
            success = False
            if gnorm > 0.0:
                dx = -rho * grad / gnorm
                predicted = rho * gnorm
                x = points[pole] + dx
                fx = handle(x)
                reduction = values[pole] - fx
                coords = np.abs(dx @ inv)
                jdrop = None
                threshold = 0.0 if reduction > 0 else 1.0
                for j in range(d):
                    if coords[j] > threshold:
                        jdrop, threshold = j, coords[j]
                sigbar = coords * vsig
                edgmax = _DELTA * rho
                far = None
                for j in range(d):
                    if sigbar[j] >= _ALPHA * rho or sigbar[j] >= vsig[j]:
                        dist = np.linalg.norm(dx - A[j]) if reduction > 0 else veta[j]
                        if dist > edgmax:
                            far, edgmax = j, dist
                if far is not None:
                    jdrop = far
                if jdrop is not None:
                    points[others[jdrop]] = x
                    values[others[jdrop]] = fx
                success = reduction > 0 and reduction >= 0.1 * predicted
            if success:
                continue
            if not acceptable:
                trust_branch = False
                continue
            if rho <= rho_end:
                converged = True
                break
            rho *= 0.5
            if rho <= 1.5 * rho_end:
                rho = rho_end
    except BudgetExhausted:
        pass

    return OptimReport(
        best_point=handle.best_point.copy(),
        best_value=handle.best_value,
        evaluations=handle.evaluations,
        converged=converged,
        history=tuple(handle.history),
    )
