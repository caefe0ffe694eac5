"""The deterministic meritocratic selection rule and its integerization.

The rule admits, for each group, a number of high-type and low-type
candidates so that simultaneously:

  * meritocratic — no low type admitted while a high type is left out;
  * fair         — per-type selection rates are equal across groups;
  * efficient    — every seat is filled.

These three properties pin the rule down uniquely, which is what
``check_properties`` lets tests verify against independently solved
allocations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import GroupState, ModelParams, Regime, classify_regime
from .errors import CapacityInfeasibleError, DegenerateStateError, InvalidParamsError

_REAL_TOL = 1e-12


@dataclass(frozen=True)
class AllocationResult:
    """Per-group, per-type seat counts. ``integral`` marks count mode."""

    high_a: float
    high_b: float
    low_a: float
    low_b: float
    integral: bool = False

    @property
    def total(self) -> float:
        return self.high_a + self.high_b + self.low_a + self.low_b

    @property
    def admits_a(self) -> float:
        return self.high_a + self.low_a

    @property
    def admits_b(self) -> float:
        return self.high_b + self.low_b


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of checking the three defining allocation properties.

    ``fair_integer_infeasible`` is set when integer seat counts make exact
    rate equality arithmetically impossible; such an allocation is not
    *unfair*, merely unable to express equal rates, so callers should
    treat ``fair or fair_integer_infeasible`` as the integer-mode pass.
    """

    meritocratic: bool
    fair: bool
    efficient: bool
    fair_integer_infeasible: bool = False

    @property
    def all_satisfied(self) -> bool:
        return self.meritocratic and self.fair and self.efficient


def allocate_real(state: GroupState, params: ModelParams) -> AllocationResult:
    """Real-valued seat allocation for the current regime.

    Over-subscribed:  high_i = (x_i / X) * 2*N*alpha, no low seats.
    Under-subscribed: high_i = N*x_i, low_i = ((1-x_i)/(2-X)) * (C - N*X).
    """
    n = params.n_per_group
    capacity = params.real_capacity
    x = state.total
    if classify_regime(state, params) is Regime.OVER_SUBSCRIBED:
        if x == 0.0:
            # Unreachable for alpha > 0 (over-subscribed implies X >= 2*alpha).
            raise DegenerateStateError("over-subscribed allocation undefined at X = 0")
        share = capacity / x
        return AllocationResult(
            high_a=state.x_a * share,
            high_b=state.x_b * share,
            low_a=0.0,
            low_b=0.0,
        )
    residual = capacity - n * x
    spread = residual / (2.0 - x)
    return AllocationResult(
        high_a=n * state.x_a,
        high_b=n * state.x_b,
        low_a=(1.0 - state.x_a) * spread,
        low_b=(1.0 - state.x_b) * spread,
    )


def _largest_remainder(ideal_a: float, ideal_b: float, cap_a: int, cap_b: int, total: int) -> tuple[int, int]:
    """Apportion ``total`` integer seats close to the real ideals.

    Floors first, then hands out leftover seats by descending fractional
    remainder, breaking ties toward group A. Callers guarantee
    ideal_i <= cap_i, which makes the +1 bumps cap-safe.
    """
    floor_a, floor_b = int(ideal_a), int(ideal_b)
    seats = [floor_a, floor_b]
    caps = (cap_a, cap_b)
    leftovers = total - floor_a - floor_b
    remainders = [ideal_a - floor_a, ideal_b - floor_b]
    # Stable sort on -remainder keeps index order (A first) on ties.
    order = sorted(range(2), key=lambda i: -remainders[i])
    for i in order:
        if leftovers <= 0:
            break
        if seats[i] < caps[i]:
            seats[i] += 1
            leftovers -= 1
    if leftovers != 0:
        raise CapacityInfeasibleError(
            f"cannot seat {total} within availability ({cap_a}, {cap_b})"
        )
    return seats[0], seats[1]


def allocate_integer(state: GroupState, params: ModelParams) -> AllocationResult:
    """Integer allocation of C = round(2*N*alpha) seats.

    Largest-remainder apportionment runs within each seat class (high
    seats first, then low seats), so class totals — and hence the overall
    total — match the real rule exactly while never exceeding per-group
    type availability.
    """
    if not state.count_backed:
        raise InvalidParamsError("allocate_integer requires a count-backed state")
    n = state.n
    capacity = params.capacity
    if capacity > 2 * n:
        raise CapacityInfeasibleError(f"capacity {capacity} exceeds population {2 * n}")
    h_a, h_b = state.h_a, state.h_b
    high_total = h_a + h_b
    if classify_regime(state, params) is Regime.OVER_SUBSCRIBED:
        # high_total >= 2*N*alpha >= C, so all seats go to high types.
        ideal_a = capacity * h_a / high_total
        ideal_b = capacity * h_b / high_total
        seats_a, seats_b = _largest_remainder(ideal_a, ideal_b, h_a, h_b, capacity)
        return AllocationResult(seats_a, seats_b, 0, 0, integral=True)
    residual = capacity - high_total
    low_a_avail = n - h_a
    low_b_avail = n - h_b
    if residual <= 0:
        low_a = low_b = 0
    else:
        low_avail = low_a_avail + low_b_avail
        ideal_a = residual * low_a_avail / low_avail
        ideal_b = residual * low_b_avail / low_avail
        low_a, low_b = _largest_remainder(ideal_a, ideal_b, low_a_avail, low_b_avail, residual)
    return AllocationResult(h_a, h_b, low_a, low_b, integral=True)


def _rates_equal_integer(seats_a: int, seats_b: int, avail_a: int, avail_b: int) -> tuple[bool, bool]:
    """(rates exactly equal, exact equality feasible at all) for one class.

    Feasibility asks whether *any* integer split of the same class total
    could equalize rates; when it cannot, unequal rates are an artifact of
    integrality rather than a property violation.
    """
    if avail_a == 0 or avail_b == 0:
        return True, True
    equal = Fraction(seats_a, avail_a) == Fraction(seats_b, avail_b)
    if equal:
        return True, True
    class_total = seats_a + seats_b
    feasible = (class_total * avail_a) % (avail_a + avail_b) == 0
    return False, feasible


def check_properties(
    state: GroupState, alloc: AllocationResult, params: ModelParams
) -> PropertyReport:
    """Check an allocation against the three defining properties.

    Real-valued allocations are compared to 1e-12; integer allocations
    exactly (rates via rational arithmetic).
    """
    n = params.n_per_group
    avail_high_a = n * state.x_a
    avail_high_b = n * state.x_b
    avail_low_a = n * (1.0 - state.x_a)
    avail_low_b = n * (1.0 - state.x_b)

    if alloc.integral:
        capacity = params.capacity
        ha, hb, la, lb = (int(alloc.high_a), int(alloc.high_b), int(alloc.low_a), int(alloc.low_b))
        efficient = ha + hb + la + lb == capacity
        all_high_admitted = ha == round(avail_high_a) and hb == round(avail_high_b)
        meritocratic = (la + lb == 0) or all_high_admitted
        high_ok, high_feasible = _rates_equal_integer(ha, hb, round(avail_high_a), round(avail_high_b))
        low_ok, low_feasible = _rates_equal_integer(la, lb, round(avail_low_a), round(avail_low_b))
        fair = high_ok and low_ok
        # Flagged only when every violated class could not have been
        # equalized by any integer split of its class total.
        infeasible = (not fair) and (high_ok or not high_feasible) and (low_ok or not low_feasible)
        return PropertyReport(meritocratic, fair, efficient, fair_integer_infeasible=infeasible)

    tol = _REAL_TOL * max(1.0, params.real_capacity)
    efficient = abs(alloc.total - params.real_capacity) <= tol
    has_low = alloc.low_a + alloc.low_b > tol
    all_high_admitted = (
        abs(alloc.high_a - avail_high_a) <= tol and abs(alloc.high_b - avail_high_b) <= tol
    )
    meritocratic = (not has_low) or all_high_admitted

    fair = True
    if avail_high_a > 0 and avail_high_b > 0:
        fair &= abs(alloc.high_a / avail_high_a - alloc.high_b / avail_high_b) <= _REAL_TOL
    if avail_low_a > 0 and avail_low_b > 0:
        fair &= abs(alloc.low_a / avail_low_a - alloc.low_b / avail_low_b) <= _REAL_TOL
    return PropertyReport(meritocratic, fair, efficient)
