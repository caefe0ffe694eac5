"""Deterministic expectation dynamics and their fixed points.

The one-step expectation map advances the pair of high-type fractions by
the average effect of admission plus type transitions. Iterating it gives
the long-run average behavior of the system; its fixed points are the
equilibria the stochastic engine fluctuates around.

Equal-advantage dynamics always restore parity at (alpha*p, alpha*p).
Affinity-advantage dynamics split on the threshold

    epsilon_threshold = 2*alpha*(1-p) / (1 - 2*alpha):

at or above it the trailing group is fully excluded in equilibrium; below
it a positive but partial separation persists, characterized by the
quadratic identity checked in ``aa_fixed_point``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import Group, GroupState, ModelParams, Regime, TransitionModel, classify_regime, leader_of
from .errors import InvalidParamsError, NoConvergenceError

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class MeanFieldPoint:
    """A state annotated with its regime and fixed-point residual.

    The residual is the sup-norm distance between the point and its image
    under the map actually used to produce it (EA or AA with the point's
    regime and leader).
    """

    x_a: float
    x_b: float
    regime: Regime
    residual: float

    @property
    def delta(self) -> float:
        return self.x_a - self.x_b

    @property
    def total(self) -> float:
        return self.x_a + self.x_b


@dataclass
class ConvergenceReport:
    trajectory: list[MeanFieldPoint] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def final(self) -> MeanFieldPoint:
        return self.trajectory[-1]


def step_ea(state: GroupState, params: ModelParams) -> GroupState:
    """One step of the equal-advantage expectation map."""
    a, b = state.x_a, state.x_b
    x = a + b
    if classify_regime(state, params) is Regime.OVER_SUBSCRIBED:
        share = 2.0 * params.alpha / x
        new_a = a * share * params.p + (a - a * share) * params.q
        new_b = b * share * params.p + (b - b * share) * params.q
    else:
        spread = (2.0 * params.alpha - x) / (2.0 - x)
        new_a = (a + (1.0 - a) * spread) * params.p
        new_b = (b + (1.0 - b) * spread) * params.p
    return GroupState(new_a, new_b)


def step_aa(state: GroupState, params: ModelParams, leader: Group | None) -> GroupState:
    """One step of the affinity-advantage expectation map.

    The leader's non-admits transition with probabilities raised by
    epsilon (high types: q+epsilon, low types: epsilon); the trailing
    group follows the equal-advantage transitions. ``leader=None`` (a
    tie) gives nobody the advantage and reduces to ``step_ea``.
    """
    if leader is None or params.epsilon == 0.0:
        return step_ea(state, params)
    eps, p, q = params.epsilon, params.p, params.q
    a, b = state.x_a, state.x_b
    x = a + b
    base = step_ea(state, params)
    if classify_regime(state, params) is Regime.OVER_SUBSCRIBED:
        share = 2.0 * params.alpha / x
        # Non-admitted high types gain +eps on q, all low types gain eps.
        lead_x = (state.x_a if leader is Group.A else state.x_b)
        bonus = (lead_x - lead_x * share) * eps + (1.0 - lead_x) * eps
    else:
        # All high types are admitted; the leader's rejected low types,
        # a 2*(1-alpha)*(1-x_lead) / (2-X) mass, gain eps.
        lead_x = (state.x_a if leader is Group.A else state.x_b)
        bonus = 2.0 * (1.0 - params.alpha) * (1.0 - lead_x) / (2.0 - x) * eps
    if leader is Group.A:
        return GroupState(base.x_a + bonus, base.x_b)
    return GroupState(base.x_a, base.x_b + bonus)


def _apply(model: TransitionModel, state: GroupState, params: ModelParams) -> GroupState:
    if model is TransitionModel.EQUAL_ADVANTAGE:
        return step_ea(state, params)
    return step_aa(state, params, leader_of(state))


def _residual(model: TransitionModel, state: GroupState, params: ModelParams) -> float:
    nxt = _apply(model, state, params)
    return max(abs(nxt.x_a - state.x_a), abs(nxt.x_b - state.x_b))


def ea_fixed_point(params: ModelParams) -> MeanFieldPoint:
    """The unique equal-advantage fixed point (alpha*p, alpha*p)."""
    value = params.alpha * params.p
    state = GroupState(value, value)
    return MeanFieldPoint(
        x_a=value,
        x_b=value,
        regime=classify_regime(state, params),
        residual=_residual(TransitionModel.EQUAL_ADVANTAGE, state, params),
    )


def epsilon_threshold(alpha: float, p: float) -> float:
    """Affinity advantage above which the trailing group is fully excluded."""
    if not alpha < 0.5:
        raise InvalidParamsError(f"threshold undefined for alpha >= 0.5, got {alpha}")
    return 2.0 * alpha * (1.0 - p) / (1.0 - 2.0 * alpha)


def aa_sub_threshold_quadratic(y: float, x_a: float, params: ModelParams) -> float:
    """g(y) whose smaller root is the equilibrium total below the threshold.

    g(y) = y^2 - (2 + 2*alpha*p)*y + 4*alpha*p + 2*(1-alpha)*(1-x_a)*eps
    """
    ap = params.alpha * params.p
    return (
        y * y
        - (2.0 + 2.0 * ap) * y
        + 4.0 * ap
        + 2.0 * (1.0 - params.alpha) * (1.0 - x_a) * params.epsilon
    )


def aa_sub_threshold_total(x_a: float, params: ModelParams) -> float:
    """Smaller root of the sub-threshold quadratic: the equilibrium x_a + x_b."""
    ap = params.alpha * params.p
    disc = (1.0 - ap) ** 2 - 2.0 * (1.0 - params.alpha) * (1.0 - x_a) * params.epsilon
    if disc < 0.0:
        raise InvalidParamsError("quadratic has no real root for these inputs")
    return (1.0 + ap) - math.sqrt(disc)


def aa_canonical_start(params: ModelParams) -> GroupState:
    """Reproducible asymmetric start for sub-threshold fixed-point solving."""
    scale = min(2.0 * params.alpha, 0.2)
    return GroupState(min(scale * 1.01, 1.0), scale * 0.99)


def aa_fixed_point(
    params: ModelParams,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MeanFieldPoint:
    """Affinity-advantage fixed point with the advantage held by group A.

    Analytic for epsilon >= epsilon_threshold:
        (2*alpha*(p - eps) + eps, 0), over-subscribed.
    Below the threshold the map is iterated from a canonical asymmetric
    start until the residual drops under ``tolerance``; the result is
    cross-checked against the quadratic characterization of the total.

    Only the q = 0 branch is analytic; pass q = 0.
    """
    if params.q != 0.0:
        raise InvalidParamsError("analytic fixed-point branch requires q = 0")
    if params.epsilon <= 0.0:
        raise InvalidParamsError("affinity fixed point requires epsilon > 0")
    threshold = epsilon_threshold(params.alpha, params.p)
    if params.epsilon >= threshold:
        x_a = 2.0 * params.alpha * (params.p - params.epsilon) + params.epsilon
        state = GroupState(x_a, 0.0)
        image = step_aa(state, params, Group.A)
        res = max(abs(image.x_a - x_a), abs(image.x_b))
        return MeanFieldPoint(x_a, 0.0, Regime.OVER_SUBSCRIBED, res)

    report = iterate(
        TransitionModel.AFFINITY_ADVANTAGE,
        aa_canonical_start(params),
        params,
        tolerance=tolerance,
        max_iter=max_iter,
    )
    if not report.converged:
        raise NoConvergenceError(
            f"no fixed point within {max_iter} iterations (residual {report.final.residual:.3e})",
            last_point=report.final,
            residual=report.final.residual,
        )
    point = report.final
    expected_total = aa_sub_threshold_total(point.x_a, params)
    if abs(point.total - expected_total) > 10.0 * tolerance:
        raise NoConvergenceError(
            "converged point violates the sub-threshold total identity "
            f"({point.total} vs {expected_total})",
            last_point=point,
            residual=abs(point.total - expected_total),
        )
    return point


def aa_separation_lower_bound(params: ModelParams) -> float:
    """Guaranteed equilibrium separation below the threshold.

    max(0, 2*(1-alpha) - min(4*alpha*(1-p)/eps, (1-alpha*p)^2/((1-alpha)*eps)))

    Vacuous (0) for very small eps; meets the over-subscribed equilibrium
    separation exactly at the threshold.
    """
    if params.epsilon <= 0.0:
        raise InvalidParamsError("separation bound requires epsilon > 0")
    alpha, p, eps = params.alpha, params.p, params.epsilon
    cap = min(
        4.0 * alpha * (1.0 - p) / eps,
        (1.0 - alpha * p) ** 2 / ((1.0 - alpha) * eps),
    )
    return max(0.0, 2.0 * (1.0 - alpha) - cap)


def aa_equilibrium_separation_qpos(params: ModelParams) -> float:
    """Equilibrium separation above the threshold for general q.

    (2*alpha*(p - q - eps) + eps) / (1 - q); increasing in q, and equal to
    the q = 0 separation 2*alpha*(p - eps) + eps when q = 0.
    """
    threshold = epsilon_threshold(params.alpha, params.p)
    if params.epsilon < threshold:
        raise InvalidParamsError(
            f"closed form only holds for epsilon >= {threshold}; got {params.epsilon}"
        )
    num = 2.0 * params.alpha * (params.p - params.q - params.epsilon) + params.epsilon
    return num / (1.0 - params.q)


def iterate(
    model: TransitionModel,
    start: GroupState,
    params: ModelParams,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ConvergenceReport:
    """Iterate the expectation map until the residual falls under tolerance.

    For the affinity model the leader is recomputed from the current state
    at every step. Non-convergence is reported, not raised; the trajectory
    is preserved either way.
    """
    report = ConvergenceReport(tolerance=tolerance)
    current = GroupState(start.x_a, start.x_b)
    for step_index in range(max_iter + 1):
        nxt = _apply(model, current, params)
        res = max(abs(nxt.x_a - current.x_a), abs(nxt.x_b - current.x_b))
        report.trajectory.append(
            MeanFieldPoint(current.x_a, current.x_b, classify_regime(current, params), res)
        )
        if res <= tolerance:
            report.converged = True
            report.iterations = step_index
            return report
        current = nxt
    report.converged = False
    report.iterations = max_iter
    return report
