"""Abstract base class for reaction nonlinearities."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Sequence

import numpy as np

from metastable_lab.errors import ModelError


class ReactionModel(ABC):
    """Reaction term f of du/dt = D u_xx - f(u) for an n-component system.

    ``reaction`` and ``jacobian`` are vectorized over trailing axes: ``u`` has
    shape (n, ...); the Jacobian has shape (n, n, ...).
    """

    name: str = "reaction"
    components: int = 1
    # pointwise box [-invariant_bound, invariant_bound]^n kept by the dynamics
    invariant_bound: float = 1.0

    @abstractmethod
    def reaction(self, u: np.ndarray) -> np.ndarray:
        """Evaluate f(u)."""
        ...

    @abstractmethod
    def jacobian(self, u: np.ndarray) -> np.ndarray:
        """Evaluate f'(u)."""
        ...

    @property
    @abstractmethod
    def equilibria(self) -> tuple[np.ndarray, ...]:
        """Constant stable equilibria, e.g. (+u*, -u*)."""
        ...

    @property
    @abstractmethod
    def lipschitz_bound(self) -> float:
        """Bound on |f'| over the invariant region (0 for linear problems)."""
        ...

    @property
    def has_potential(self) -> bool:
        return False

    @property
    def phase(self) -> np.ndarray:
        """The positive pure phase u*."""
        return self.equilibria[0]


class GradientPotential(ReactionModel):
    """Reaction of gradient form f = grad W with minima at +-u*."""

    @abstractmethod
    def potential(self, u: np.ndarray) -> np.ndarray:
        """Evaluate W(u) pointwise."""
        ...

    @property
    def has_potential(self) -> bool:
        return True

    @property
    def minima(self) -> tuple[np.ndarray, np.ndarray]:
        return self.equilibria[0], self.equilibria[1]


class CallbackReaction(ReactionModel):
    """User-defined model from reaction/jacobian callables.

    Args:
        reaction: Map u -> f(u), vectorized over trailing axes.
        jacobian: Map u -> f'(u) with shape (n, n, ...).
        equilibria: Constant stable equilibria, positive phase first.
        lipschitz_bound: Bound on |f'| over the invariant region.
        potential: Optional W(u); enables the energy diagnostic.
    """

    def __init__(
        self,
        name: str,
        reaction: Callable[[np.ndarray], np.ndarray],
        jacobian: Callable[[np.ndarray], np.ndarray],
        equilibria: Sequence[Sequence[float]],
        lipschitz_bound: float,
        invariant_bound: float = 1.0,
        potential: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> None:
        self.name = name
        self._reaction = reaction
        self._jacobian = jacobian
        self._equilibria = tuple(np.atleast_1d(np.asarray(e, dtype=float)) for e in equilibria)
        if len(self._equilibria) < 2:
            raise ValueError("a reaction model needs at least two stable equilibria")
        self.components = int(self._equilibria[0].shape[0])
        self._lipschitz = float(lipschitz_bound)
        self.invariant_bound = float(invariant_bound)
        self._potential = potential

    def reaction(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self._reaction(u))

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self._jacobian(u))

    @property
    def equilibria(self) -> tuple[np.ndarray, ...]:
        return self._equilibria

    @property
    def lipschitz_bound(self) -> float:
        return self._lipschitz

    @property
    def has_potential(self) -> bool:
        return self._potential is not None

    def potential(self, u: np.ndarray) -> np.ndarray:
        if self._potential is None:
            raise ModelError(f"Model '{self.name}' has no potential")
        return np.asarray(self._potential(u))
