"""Mode logic: the potential ``U(e, h) = ||q - h qd||^2`` with hysteresis gap delta.

Since ``U = 2 (1 - h eps0)`` for unit quaternions, the better mode is
``sign(eps0)`` and the gap is ``G = 2 (|eps0| - h eps0)``. A jump fires when
``G >= delta`` (the flow and jump sets overlap at equality and the jump is
taken). At an exact tie between the two modes the other mode counts as the
best one, so with ``delta = 0`` a tie fires a jump; for ``delta > 0`` a tie
has zero gap and never does.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from quatlag.errors import ConfigError
from quatlag.quatmath import as_quat_array

MODES = (-1, 1)


def initial_mode(eps0_at_t0: float) -> int:
    """Reassign the desired path to the hemisphere of the initial attitude."""
    return 1 if eps0_at_t0 >= 0.0 else -1


def tracking_error(q, qd, h: int) -> np.ndarray:
    return as_quat_array(q) - h * as_quat_array(qd)


def potential(e, h: int | None = None) -> float:
    """``U(e, h) = ||e||^2``; ``h`` only labels which error ``e`` was built with."""
    e = np.asarray(e, dtype=np.float64)
    return float(e @ e)


@njit(cache=True)
def _gap_and_best(q, qd, h):
    e_plus = q - qd
    e_minus = q + qd
    u_plus = np.dot(e_plus, e_plus)
    u_minus = np.dot(e_minus, e_minus)
    u_h = u_plus if h > 0 else u_minus
    u_min = min(u_plus, u_minus)
    if u_plus < u_minus:
        best = 1
    elif u_minus < u_plus:
        best = -1
    else:
        best = -h
    return u_h - u_min, best


def gap(q, qd, h: int) -> float:
    """Excess of the current mode's potential over the best mode's."""
    g, _ = _gap_and_best(as_quat_array(q), as_quat_array(qd), int(h))
    return float(g)


@dataclass
class HybridLogic:
    """Discrete mode ``h``, gap threshold ``delta``, and the jump log.

    ``delta = 0`` is accepted: it is the discontinuous (non-robust) switching
    law used as a baseline.
    """

    h: int = 1
    delta: float = 0.4
    jumps: list[tuple[float, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.h not in MODES:
            raise ConfigError(f"mode must be -1 or +1, got {self.h}")
        if not self.delta >= 0.0:
            raise ConfigError(f"gap threshold must be non-negative, got {self.delta}")


def jump_rule(logic: HybridLogic, q, qd, t: float = 0.0) -> HybridLogic:
    """Return the logic after checking the jump condition at time ``t``.

    The input is not modified; a mode change is appended to the new log.
    """
    g, best = _gap_and_best(as_quat_array(q), as_quat_array(qd), logic.h)
    if g >= logic.delta and best != logic.h:
        return HybridLogic(best, logic.delta, [*logic.jumps, (float(t), best)])
    return HybridLogic(logic.h, logic.delta, list(logic.jumps))
