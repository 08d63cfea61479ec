"""Zero reaction: pure diffusion, used as a negative control."""

from __future__ import annotations

import numpy as np

from .base import ReactionModel


class ZeroReaction(ReactionModel):
    """f = 0. The listed phases are only boundary data; there is no layer."""

    name = "diffusion"

    def __init__(self, components: int = 1) -> None:
        self.components = components

    def reaction(self, u: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(u, dtype=float))

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.zeros((self.components, *u.shape))

    @property
    def equilibria(self) -> tuple[np.ndarray, ...]:
        ones = np.ones(self.components)
        return ones, -ones

    @property
    def lipschitz_bound(self) -> float:
        return 0.0
