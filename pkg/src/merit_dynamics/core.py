"""Shared domain types: model parameters, group states, regimes.

Everything here is an immutable value type, so instances can be shared
freely across threads and processes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InvalidParamsError


class Group(enum.Enum):
    A = "A"
    B = "B"

    def other(self) -> "Group":
        return Group.B if self is Group.A else Group.A


class Regime(enum.Enum):
    """Which branch of the selection rule applies.

    OVER_SUBSCRIBED: total high-type fraction X >= 2*alpha — there are at
    least as many high types as seats, so only high types are admitted.
    UNDER_SUBSCRIBED: X < 2*alpha — all high types fit and residual seats
    go to low types.
    """

    OVER_SUBSCRIBED = "over"
    UNDER_SUBSCRIBED = "under"


class TransitionModel(enum.Enum):
    """Post-rejection type dynamics.

    EQUAL_ADVANTAGE: rejected high types persist with probability q,
    rejected low types never upgrade; both groups treated identically.
    AFFINITY_ADVANTAGE: additionally, every non-admit of the currently
    leading group gains epsilon in its high-type transition probability.
    """

    EQUAL_ADVANTAGE = "ea"
    AFFINITY_ADVANTAGE = "aa"

    @classmethod
    def parse(cls, text: str) -> "TransitionModel":
        try:
            return cls(text.lower())
        except ValueError:
            raise InvalidParamsError(f"unknown model {text!r}; expected 'ea' or 'aa'") from None


@dataclass(frozen=True)
class ModelParams:
    """All scalar parameters of the stylized two-group model.

    alpha        college capacity as a fraction of the total population,
                 0 < alpha < 1/2 (capacity C = 2*N*alpha seats)
    p            probability that a college admit is high type next step
    q            probability that a rejected high type stays high (q < p)
    epsilon      affinity advantage added to the leading group's
                 non-admit transition probabilities
    n_per_group  N, individuals per group
    """

    alpha: float
    p: float
    q: float = 0.0
    epsilon: float = 0.0
    n_per_group: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise InvalidParamsError(f"alpha must satisfy 0 < alpha < 0.5, got {self.alpha}")
        if not 0.0 <= self.q < self.p <= 1.0:
            raise InvalidParamsError(f"need 0 <= q < p <= 1, got q={self.q}, p={self.p}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidParamsError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.q + self.epsilon > 1.0:
            raise InvalidParamsError(
                f"q + epsilon must not exceed 1, got {self.q} + {self.epsilon}"
            )
        if int(self.n_per_group) != self.n_per_group or self.n_per_group < 1:
            raise InvalidParamsError(f"n_per_group must be a positive integer, got {self.n_per_group}")

    @property
    def capacity(self) -> int:
        """Integer seat capacity C = round(2*N*alpha), round-half-up.

        Fixed for a whole run so that N, alpha combinations with
        non-integer 2*N*alpha stay well-defined.
        """
        return int(2.0 * self.n_per_group * self.alpha + 0.5)

    @property
    def real_capacity(self) -> float:
        """Exact seat capacity 2*N*alpha used by the real-valued rule."""
        return 2.0 * self.n_per_group * self.alpha


@dataclass(frozen=True)
class GroupState:
    """The pair (x_a, x_b) of high-type fractions.

    Optionally count-backed: when ``h_a``/``h_b``/``n`` are set, the
    fractions are exactly h_i / n. Count-backed states are what the
    stochastic engine evolves; bare fractions are the mean-field state.
    """

    x_a: float
    x_b: float
    h_a: int | None = None
    h_b: int | None = None
    n: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.x_a <= 1.0 and 0.0 <= self.x_b <= 1.0):
            raise InvalidParamsError(f"fractions must lie in [0, 1], got ({self.x_a}, {self.x_b})")
        backing = (self.h_a, self.h_b, self.n)
        if any(v is not None for v in backing):
            if any(v is None for v in backing):
                raise InvalidParamsError("count-backed state needs all of h_a, h_b, n")
            if not (0 <= self.h_a <= self.n and 0 <= self.h_b <= self.n):
                raise InvalidParamsError(
                    f"counts must lie in [0, n], got ({self.h_a}, {self.h_b}) with n={self.n}"
                )
            if self.x_a != self.h_a / self.n or self.x_b != self.h_b / self.n:
                raise InvalidParamsError("count-backed state requires x_i == h_i / n exactly")

    @classmethod
    def from_fractions(cls, x_a: float, x_b: float) -> "GroupState":
        return cls(x_a=x_a, x_b=x_b)

    @classmethod
    def from_counts(cls, h_a: int, h_b: int, n: int) -> "GroupState":
        if n < 1:
            raise InvalidParamsError(f"n must be positive, got {n}")
        return cls(x_a=h_a / n, x_b=h_b / n, h_a=int(h_a), h_b=int(h_b), n=int(n))

    @property
    def count_backed(self) -> bool:
        return self.h_a is not None

    @property
    def total(self) -> float:
        """X = x_a + x_b, in [0, 2]."""
        return self.x_a + self.x_b

    @property
    def delta(self) -> float:
        """Separation x_a - x_b, in [-1, 1]."""
        return self.x_a - self.x_b

    def swapped(self) -> "GroupState":
        """The state with group labels exchanged."""
        return GroupState(self.x_b, self.x_a, self.h_b, self.h_a, self.n)


def classify_regime(state: GroupState, params: ModelParams) -> Regime:
    """Classify a state as over- or under-subscribed.

    The boundary X = 2*alpha belongs to the over-subscribed regime; both
    admission formulas coincide there, so the assignment is harmless.
    """
    if state.total >= 2.0 * params.alpha:
        return Regime.OVER_SUBSCRIBED
    return Regime.UNDER_SUBSCRIBED


def leader_of(state: GroupState) -> Group | None:
    """Group with strictly more high types, or None on a tie.

    For count-backed states the comparison is on counts (identical to the
    fraction comparison since both share the same n).
    """
    if state.x_a > state.x_b:
        return Group.A
    if state.x_b > state.x_a:
        return Group.B
    return None
