"""Phase-space discretisation: finite differences in q, Hermite functions in p."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

BUDGET_ENV = "KFPTOOLS_MATRIX_BUDGET"
DEFAULT_BUDGET = 400_000


class BudgetError(ValueError):
    """The requested discretisation exceeds the matrix-size budget."""


def matrix_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(float(raw))
    except ValueError as exc:
        raise BudgetError(f"{BUDGET_ENV}={raw!r} is not a number") from exc
    if value <= 0:
        raise BudgetError(f"{BUDGET_ENV} must be positive")
    return value


@dataclass(frozen=True)
class DiscreteGrid:
    """Box [-Lq, Lq]^d with Nq interior nodes per axis and Np Hermite modes per p-axis.

    Dirichlet truncation: the nodes are x_i = -Lq + i*h, i = 1..Nq, with
    h = 2 Lq / (Nq + 1), so the boundary points carry the value zero.
    """

    Lq: float
    Nq: int
    Np: int
    d: int = 1

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("only d = 1 and d = 2 are supported")
        if self.Nq < 8:
            raise ValueError("Nq must be >= 8")
        if self.Np < 4:
            raise ValueError("Np must be >= 4")
        if not self.Lq > 0:
            raise ValueError("Lq must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.Lq / (self.Nq + 1)

    @property
    def nodes(self) -> np.ndarray:
        return -self.Lq + self.h * np.arange(1, self.Nq + 1)

    @property
    def q_size(self) -> int:
        return self.Nq ** self.d

    @property
    def p_size(self) -> int:
        return self.Np ** self.d

    @property
    def size(self) -> int:
        return self.q_size * self.p_size

    def q_points(self) -> np.ndarray:
        """All q nodes, shape (Nq^d, d), first axis slowest."""
        x = self.nodes
        mesh = np.meshgrid(*([x] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def check_budget(self, size: int | None = None) -> None:
        size = self.size if size is None else size
        limit = matrix_budget()
        if size > limit:
            raise BudgetError(f"matrix dimension {size} exceeds the budget {limit} "
                              f"(set {BUDGET_ENV} to raise it)")

    def refined(self, factor: float) -> "DiscreteGrid":
        return DiscreteGrid(self.Lq, int(round(self.Nq * factor)), int(round(self.Np * factor)), self.d)

    def to_dict(self) -> dict:
        return {"Lq": self.Lq, "Nq": self.Nq, "Np": self.Np, "d": self.d, "h": self.h,
                "boundary": "dirichlet", "size": self.size}
