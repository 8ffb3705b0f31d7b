"""Ising objective for test case selection and minimization.

Spin convention: ``z[i] == -1`` selects test case ``i``, ``z[i] == +1`` leaves
it out.  Every objective is normalized to [0, 1] and the overall fitness is the
weighted sum of squared objectives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


class GroupKind(str, Enum):
    EFFECTIVENESS = "effectiveness"
    COST = "cost"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AttributeGroup:
    """One attribute column turned into an objective.

    ``values`` may be in any unit; they are normalized by their sum.
    """

    kind: GroupKind
    values: np.ndarray
    weight: float = 1.0
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GroupKind(self.kind))
        values = _frozen(np.ravel(self.values))
        if not np.all(np.isfinite(values)):
            raise ValueError(f"group {self.name!r}: attribute values must be finite")
        if np.any(values < 0):
            raise ValueError(f"group {self.name!r}: attribute values must be non-negative")
        if not values.sum() > 0:
            raise ValueError(f"group {self.name!r}: attribute values sum to zero")
        if not (np.isfinite(self.weight) and self.weight > 0):
            raise ValueError(f"group {self.name!r}: weight must be positive, got {self.weight}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weight", float(self.weight))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AttributeGroup):
            return NotImplemented
        return (self.kind is other.kind and self.weight == other.weight
                and self.name == other.name and np.array_equal(self.values, other.values))

    __hash__ = None

    @property
    def signed_shares(self) -> np.ndarray:
        """Per-test-case coefficient ``a`` such that the objective is ``(1 + a.z) / 2``."""
        shares = self.values / self.values.sum()
        return shares if self.kind is GroupKind.EFFECTIVENESS else -shares

    @property
    def is_size_group(self) -> bool:
        return self.kind is GroupKind.COST and bool(np.all(self.values == 1.0))


@dataclass(frozen=True)
class ProblemSpec:
    """A test suite of ``n`` cases described by weighted attribute groups.

    Groups are reordered so that effectiveness groups come first, and weights
    are rescaled to sum to one.
    """

    groups: tuple[AttributeGroup, ...]
    minimize_size: bool = False
    ids: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        groups = tuple(self.groups)
        if not groups:
            raise ValueError("a problem needs at least one attribute group")
        n = groups[0].values.size
        for g in groups:
            if g.values.size != n:
                raise ValueError(
                    f"group {g.name!r} has {g.values.size} values, expected {n}"
                )
        groups = tuple(g for g in groups if g.kind is GroupKind.EFFECTIVENESS) + tuple(
            g for g in groups if g.kind is GroupKind.COST
        )
        total = sum(g.weight for g in groups)
        groups = tuple(
            AttributeGroup(g.kind, g.values, g.weight / total, g.name) for g in groups
        )
        if self.minimize_size and sum(g.is_size_group for g in groups) != 1:
            raise ValueError("minimize_size requires exactly one all-ones cost group")
        if self.ids is not None:
            ids = tuple(str(i) for i in self.ids)
            if len(ids) != n:
                raise ValueError(f"{len(ids)} ids for {n} test cases")
            object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "groups", groups)

    @property
    def n(self) -> int:
        return self.groups[0].values.size

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def s(self) -> int:
        return sum(g.kind is GroupKind.EFFECTIVENESS for g in self.groups)

    @property
    def q(self) -> int:
        return self.m - self.s

    @property
    def weights(self) -> np.ndarray:
        return np.array([g.weight for g in self.groups])


def make_spec(
    effectiveness: Iterable[Sequence[float]] = (),
    cost: Iterable[Sequence[float]] = (),
    weights: Sequence[float] | None = None,
    minimize_size: bool = False,
    names: Sequence[str] | None = None,
    ids: Sequence[str] | None = None,
) -> ProblemSpec:
    """Build a spec from raw columns.

    ``weights`` and ``names`` follow the order effectiveness, cost, then the
    size group when ``minimize_size`` is set.  Weights default to equal.
    """
    columns = [(GroupKind.EFFECTIVENESS, np.asarray(v, float)) for v in effectiveness]
    columns += [(GroupKind.COST, np.asarray(v, float)) for v in cost]
    if not columns:
        raise ValueError("at least one attribute column is required")
    if minimize_size:
        columns.append((GroupKind.COST, np.ones(columns[0][1].size)))
    if weights is None:
        weights = [1.0] * len(columns)
    if len(weights) != len(columns):
        raise ValueError(f"{len(weights)} weights for {len(columns)} groups")
    if names is None:
        names = [f"g{k}" for k in range(len(columns))]
        if minimize_size:
            names[-1] = "size"
    groups = tuple(
        AttributeGroup(kind, vals, w, name)
        for (kind, vals), w, name in zip(columns, weights, names)
    )
    return ProblemSpec(groups, minimize_size=minimize_size, ids=ids)


def _as_spins(z, n: int) -> np.ndarray:
    z = np.asarray(z)
    if z.shape != (n,):
        raise ValueError(f"spin vector has shape {z.shape}, expected ({n},)")
    if not np.all((z == 1) | (z == -1)):
        raise ValueError("spins must be -1 or +1")
    return z.astype(np.float64)


def objective_values(spec: ProblemSpec, z) -> np.ndarray:
    """Normalized per-group objectives, each in [0, 1]."""
    z = _as_spins(z, spec.n)
    out = np.empty(spec.m)
    for k, g in enumerate(spec.groups):
        ratio = (g.values @ z) / g.values.sum()
        out[k] = 0.5 * (1 + ratio) if g.kind is GroupKind.EFFECTIVENESS else 0.5 * (1 - ratio)
    return out


def evaluate_direct(spec: ProblemSpec, z) -> float:
    """Weighted sum of squared normalized objectives."""
    return float(spec.weights @ objective_values(spec, z) ** 2)


@dataclass(frozen=True)
class Assignment:
    z: np.ndarray
    fval: float

    def __post_init__(self) -> None:
        z = np.asarray(self.z)
        if not np.all((z == 1) | (z == -1)):
            raise ValueError("spins must be -1 or +1")
        z = np.array(z, dtype=np.int8)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def selection_mask(self) -> np.ndarray:
        return (self.z == -1).astype(np.int8)


@dataclass(frozen=True)
class QuadraticForm:
    """``sum_{i<j} X_ij z_i z_j + sum_i Y_i z_i + constant``.

    Pair coefficients are held as a dense symmetric matrix with a zero
    diagonal; ``pairs`` gives the sparse ``{(i, j): X_ij}`` view.
    """

    pair_matrix: np.ndarray
    linear: np.ndarray
    constant: float = 0.0
    _pairs_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        X = np.array(self.pair_matrix, dtype=np.float64)
        Y = _frozen(np.ravel(self.linear))
        n = Y.size
        if X.shape != (n, n):
            raise ValueError(f"pair matrix shape {X.shape} does not match {n} variables")
        if not np.array_equal(X, X.T):
            raise ValueError("pair matrix must be symmetric")
        if np.any(np.diag(X) != 0):
            raise ValueError("pair matrix diagonal must be zero (z_i^2 folds into the constant)")
        X.setflags(write=False)
        object.__setattr__(self, "pair_matrix", X)
        object.__setattr__(self, "linear", Y)
        object.__setattr__(self, "constant", float(self.constant))

    @classmethod
    def from_pairs(cls, n: int, pairs: dict, linear=None, constant: float = 0.0) -> "QuadraticForm":
        X = np.zeros((n, n))
        for (i, j), v in pairs.items():
            if i == j:
                raise ValueError("self-pairs are not allowed")
            X[i, j] += v
            X[j, i] += v
        if linear is None:
            linear = np.zeros(n)
        return cls(X, linear, constant)

    @property
    def n(self) -> int:
        return self.linear.size

    @property
    def pairs(self) -> dict[tuple[int, int], float]:
        if "pairs" not in self._pairs_cache:
            iu, ju = np.nonzero(np.triu(self.pair_matrix, 1))
            self._pairs_cache["pairs"] = {
                (int(i), int(j)): float(self.pair_matrix[i, j]) for i, j in zip(iu, ju)
            }
        return self._pairs_cache["pairs"]

    def local_field(self, z: np.ndarray) -> np.ndarray:
        """``Y_k + sum_j X_kj z_j`` for every k."""
        return self.linear + self.pair_matrix @ z


def expand(spec: ProblemSpec) -> QuadraticForm:
    """Expand the squared objectives into pair, linear and constant terms.

    With ``f_k = (1 + a_k.z)/2`` and ``z_i^2 = 1``::

        w f^2 = w/4 (1 + sum a_i^2) + w/2 sum a_i z_i + w/2 sum_{i<j} a_i a_j z_i z_j
    """
    A = np.array([g.signed_shares for g in spec.groups])
    half_w = 0.5 * spec.weights
    X = (A.T * half_w) @ A
    X = 0.5 * (X + X.T)  # matmul rounding is not exactly symmetric
    np.fill_diagonal(X, 0.0)
    Y = half_w @ A
    const = float(0.5 * half_w @ (1.0 + np.einsum("ki,ki->k", A, A)))
    # exact-zero pairs stay zero; no epsilon pruning
    return QuadraticForm(X, Y, const)


def quadratic_value(form: QuadraticForm, z, include_constant: bool = True) -> float:
    z = _as_spins(z, form.n)
    value = 0.5 * z @ (form.pair_matrix @ z) + form.linear @ z
    if include_constant:
        value += form.constant
    return float(value)


def clamp(form: QuadraticForm, active: Sequence[int], fixed_z) -> QuadraticForm:
    """Restrict ``form`` to ``active`` variables with all others held at ``fixed_z``.

    The fixed spins fold into the active linear coefficients; the constant
    of the result is zero.
    """
    idx = np.asarray(active, dtype=np.intp)
    if idx.size == 0:
        raise ValueError("active set is empty")
    if np.unique(idx).size != idx.size:
        raise ValueError("active indices must be distinct")
    if idx.min() < 0 or idx.max() >= form.n:
        raise ValueError("active index out of range")
    z = np.array(fixed_z, dtype=np.float64)
    if z.shape != (form.n,):
        raise ValueError(f"fixed spins have shape {z.shape}, expected ({form.n},)")
    z[idx] = 0.0
    X = form.pair_matrix
    linear = form.linear[idx] + X[idx] @ z
    return QuadraticForm(X[np.ix_(idx, idx)], linear, 0.0)


def flip_deltas(form: QuadraticForm, z) -> np.ndarray:
    """Change in value from flipping each spin on its own."""
    z = _as_spins(z, form.n)
    return -2.0 * z * form.local_field(z)


def impact_order(form: QuadraticForm, z, fval: float) -> tuple[np.ndarray, np.ndarray]:
    """Indices sorted by ascending flip impact, plus the impacts themselves.

    ``impact_k = fval'_k - fval`` where ``fval'_k`` is the value with spin k
    flipped.  Ties keep ascending index order.
    """
    deltas = flip_deltas(form, z)
    impacts = (fval + deltas) - fval
    order = np.argsort(impacts, kind="stable")
    return order, impacts
