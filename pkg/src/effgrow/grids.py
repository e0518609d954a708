"""Discretized size axis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# numpy renamed trapz to trapezoid in 2.0
trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True, eq=False)
class SizeGrid:
    """Strictly increasing size nodes starting at 0.

    Uniform grids carry their step and satisfy nodes[j] = j * dx exactly,
    which lets halving map node indices to node indices.
    """

    nodes: np.ndarray
    dx: float | None = None

    def __post_init__(self):
        arr = np.array(self.nodes, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise DomainError("grid needs at least two nodes")
        if arr[0] != 0.0:
            raise DomainError(f"grid must start at 0, got {arr[0]}")
        if (np.diff(arr) <= 0).any():
            raise DomainError("grid nodes must be strictly increasing")
        arr.setflags(write=False)
        object.__setattr__(self, "nodes", arr)

    @classmethod
    def uniform(cls, dx: float, x_max: float) -> "SizeGrid":
        if dx <= 0 or x_max <= dx:
            raise DomainError(f"need 0 < dx < x_max, got dx={dx}, x_max={x_max}")
        steps = round(x_max / dx)
        return cls(np.arange(steps + 1) * dx, dx)

    @classmethod
    def default_for_rate(cls, beta: float) -> "SizeGrid":
        """Step 0.01/beta with the analytic envelope below 1e-12 at the far end."""
        return cls.uniform(0.01 / beta, 16.0 / beta)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def x_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def is_uniform(self) -> bool:
        return self.dx is not None

    def require_uniform(self) -> float:
        if self.dx is None:
            raise DomainError("a uniform grid is required here")
        return self.dx

    def integrate(self, values: np.ndarray) -> float:
        """Composite trapezoid of node values along the last axis."""
        return float(np.sum(trapezoid(np.atleast_2d(values), self.nodes, axis=-1)))
