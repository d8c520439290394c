"""Scissor (pantograph) prismatic chains: the mu <-> rho map and cell sizing.

Each prismatic link is a stack of n identical scissor cells with bar length l
and bar width h. Driving the shaft position mu (the half-spacing of the bar
feet) folds or unfolds every cell simultaneously, so the chain length is

    rho = n * sqrt(l**2 - mu**2),   mu in [h, sqrt(l**2 - h**2)].

Fully unfolded (mu = h) the chain reaches rho_max = n*sqrt(l**2 - h**2); fully
folded (mu = sqrt(l**2 - h**2)) it retracts to rho_min = n*h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleDesignError, JointLimitError


@dataclass(frozen=True)
class ScissorDesign:
    """Dimensions of one scissor chain: n cells of bar length l and width h."""

    n: int
    h: float
    l: float

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not (0 < self.h < self.l):
            raise DomainError(f"need 0 < h < l, got h={self.h}, l={self.l}")

    @property
    def rho_min(self) -> float:
        """Fully folded chain length, n*h."""
        return self.n * self.h

    @property
    def rho_max(self) -> float:
        """Fully unfolded chain length, n*sqrt(l**2 - h**2)."""
        return self.n * math.sqrt(self.l**2 - self.h**2)

    @property
    def mu_min(self) -> float:
        return self.h

    @property
    def mu_max(self) -> float:
        return math.sqrt(self.l**2 - self.h**2)

    @property
    def feasible(self) -> bool:
        """Fold-flat feasibility constraint l > 3h."""
        return self.l > 3.0 * self.h


def scissor_length(mu: float, design: ScissorDesign) -> float:
    """Chain length rho for a shaft position mu.

    Strictly decreasing on [h, sqrt(l**2 - h**2)]: pushing the bar feet apart
    flattens the cells.
    """
    if not design.mu_min <= mu <= design.mu_max:
        raise JointLimitError(
            f"shaft position {mu} outside [{design.mu_min}, {design.mu_max:.12g}]"
        )
    return design.n * math.sqrt(design.l**2 - mu * mu)


def shaft_position(rho: float, design: ScissorDesign) -> float:
    """Inverse of scissor_length: the shaft position realizing chain length rho."""
    if not design.rho_min <= rho <= design.rho_max:
        raise JointLimitError(
            f"chain length {rho} outside [{design.rho_min:.12g}, {design.rho_max:.12g}]"
        )
    return math.sqrt(design.l**2 - (rho / design.n) ** 2)


def design_scissor(rho_min: float, rho_max: float, n: int) -> ScissorDesign:
    """Size n scissor cells so the chain range is exactly [rho_min, rho_max].

    From rho_min = n*h and rho_max = n*sqrt(l**2 - h**2):

        h = rho_min / n,    l = sqrt(rho_max**2 + rho_min**2) / n.

    Raises InfeasibleDesignError when the result violates l > 3h, i.e. when
    rho_max**2 <= 8 * rho_min**2.
    """
    if not (isinstance(n, int) and n >= 1):
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not 0 < rho_min < rho_max:
        raise DomainError(f"need 0 < rho_min < rho_max, got {rho_min}, {rho_max}")
    h = rho_min / n
    l = math.sqrt(rho_max**2 + rho_min**2) / n
    if not l > 3.0 * h:
        raise InfeasibleDesignError(
            f"range [{rho_min}, {rho_max}] needs l = {l:.6g} <= 3h = {3*h:.6g}; "
            "a scissor cell cannot fold flat enough (requires rho_max > 2*sqrt(2)*rho_min)"
        )
    return ScissorDesign(n=n, h=h, l=l)
