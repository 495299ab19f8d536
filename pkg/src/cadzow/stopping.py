"""Stop rules shared by the outer solver loops and the inner weighted-SVD loop."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["StopRule"]


@dataclass(frozen=True)
class StopRule:
    """Termination rule for an iterative loop.

    ``eps`` is a mean-square-delta threshold on successive iterates
    (per series point for outer loops, per matrix entry for the inner
    loop); ``None`` makes the rule a pure iteration cap.  ``max_iter``
    always bounds the loop.
    """

    eps: float | None
    max_iter: int

    def __post_init__(self):
        if self.eps is not None and not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")

    @classmethod
    def max_iterations(cls, count: int) -> "StopRule":
        """Stop after exactly ``count`` iterations."""
        return cls(None, count)

    @classmethod
    def mean_square_delta(cls, eps: float, max_iter: int = 1000) -> "StopRule":
        """Stop when the mean-square change of the iterate drops below ``eps``."""
        return cls(eps, max_iter)

    def fired(self, delta: float) -> bool:
        """Whether the delta criterion is satisfied (never true for pure caps)."""
        return self.eps is not None and delta < self.eps

    def to_dict(self) -> dict:
        return {"eps": self.eps, "max_iter": self.max_iter}

    @classmethod
    def from_dict(cls, data: dict) -> "StopRule":
        return cls(data.get("eps"), int(data["max_iter"]))
