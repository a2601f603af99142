"""Splitting one vehicle's on-site energy between hovering time and capacity.

With budget B and per-user service cost c, choosing capacity k leaves T = B - ck
hovering slots, so the planner solves max_k R_k(B - ck). The discrete search
simply evaluates every feasible k (at most floor(B / (1 + c)) of them, since
capacity beyond the hovering time is wasted). The continuous relaxation with
exponential valuations admits a threshold policy in the arrival rate a':

* low regime, a' <= 2ce / (B - 2c)^2: a single unit (k* = 1) and maximum
  hovering time beat everything;
* high regime, a' >= the root of ``high_regime_threshold``: saturate capacity
  at floor(B / c);
* in between, k* is the argmax of the capacity series S_k(a' (B - ck) / e).

The argmax is evaluated over every feasible k regardless of regime, so the
regime label is a classification layer on top of an exhaustive search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import bisect

from .pricing import build_pricing, capacity_series_sum, expected_profit_closed_form
from .valuations import ValuationModel

# Absorbs float noise in floor(B / c) when B is an exact multiple of c.
_FLOOR_EPS = 1e-12


class Regime(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    NOT_APPLICABLE = "n/a"


@dataclass(frozen=True)
class AllocationDecision:
    """An energy split: capacity k_star, hovering time t_star, and its profit."""

    k_star: int
    t_star: float
    profit: float
    regime: Regime = Regime.NOT_APPLICABLE


def allocate_discrete(model: ValuationModel, alpha: float, budget: int,
                      service_cost: int) -> AllocationDecision:
    """Exhaustive discrete search over k in 1..floor(B / (1 + c)).

    Budget and service cost must be integers (slot-quantized energy); the
    chosen split always uses the whole budget, T = B - ck. Ties go to the
    smallest capacity, preserving hovering flexibility.
    """
    if budget != int(budget) or service_cost != int(service_cost):
        raise ValueError("discrete allocation needs integer budget and service cost")
    budget, service_cost = int(budget), int(service_cost)
    if service_cost <= 0:
        raise ValueError(f"service cost must be positive, got {service_cost}")
    if budget < 1 + service_cost:
        raise ValueError(
            f"budget {budget} cannot cover one user plus one hovering slot"
        )

    k_max = budget // (1 + service_cost)
    # One table at (k_max, B - c) holds every R[k][B - ck] lookup needed.
    _, table = build_pricing(model, alpha, k_max, budget - service_cost)
    best_k, best_profit = 1, -math.inf
    for k in range(1, k_max + 1):
        profit = float(table.values[k, budget - service_cost * k])
        if profit > best_profit:
            best_k, best_profit = k, profit
    return AllocationDecision(k_star=best_k, t_star=budget - service_cost * best_k,
                              profit=best_profit, regime=Regime.NOT_APPLICABLE)


def low_regime_threshold(budget: float, service_cost: float) -> float:
    """Arrival rate below which a single service unit is optimal: 2ce/(B-2c)^2."""
    if budget <= 2 * service_cost:
        raise ValueError("low-regime threshold needs budget > 2 * service cost")
    return 2.0 * service_cost * math.e / (budget - 2.0 * service_cost) ** 2


def _saturation_gap(arrival_rate: float, budget: float, service_cost: float,
                    k_top: int) -> float:
    """Signed gap whose root marks where capacity saturation starts to pay.

    Positive once the profit at k_top (capacity floor(B/c)) overtakes the
    profit at k_top - 1. Increasing in the arrival rate, so a sign change
    brackets a unique root.
    """
    t_top = budget - service_cost * k_top
    t_next = budget - service_cost * (k_top - 1)
    lead = (arrival_rate / (math.e * math.factorial(k_top))) * t_top ** k_top
    tail = 0.0
    for i in range(1, k_top):
        tail += ((math.e / arrival_rate) ** (k_top - i - 1) / math.factorial(i)
                 * (t_next ** i - t_top ** i))
    return lead - tail


def high_regime_threshold(budget: float, service_cost: float) -> float:
    """Arrival rate above which saturating capacity at floor(B / c) is optimal.

    Returns +inf when B / c is an integer: saturation then leaves zero
    hovering time and can never pay, so the high regime does not exist.
    """
    if budget <= service_cost:
        raise ValueError("need budget > service cost")
    k_top = math.floor(budget / service_cost + _FLOOR_EPS)
    if budget - service_cost * k_top <= _FLOOR_EPS * budget:
        return math.inf
    if k_top == 1:
        # Single feasible capacity; saturation holds for every arrival rate.
        return 0.0

    gap = lambda a: _saturation_gap(a, budget, service_cost, k_top)
    lo, hi = 1e-9, 1e6
    if gap(lo) >= 0.0:
        return lo
    while gap(hi) < 0.0:
        hi *= 10.0
        if hi > 1e12:
            return math.inf
    return float(bisect(gap, lo, hi, xtol=1e-10, maxiter=500))


def allocate_continuous(lam: float, arrival_rate: float, budget: float,
                        service_cost: float) -> AllocationDecision:
    """Threshold-classified energy split in the continuous-time relaxation.

    k_star always comes from the exhaustive argmax of the closed-form profit
    over k in 1..floor(B / c) (ties to the smallest k); the regime label adds
    the threshold classification where its formulas apply (budget > 2c).
    """
    if lam <= 0 or arrival_rate <= 0:
        raise ValueError("rate parameters must be positive")
    if service_cost <= 0:
        raise ValueError(f"service cost must be positive, got {service_cost}")
    if budget <= service_cost:
        raise ValueError(f"budget {budget} cannot cover a single user")

    k_top = math.floor(budget / service_cost + _FLOOR_EPS)
    best_k, best_profit = 1, -math.inf
    for k in range(1, k_top + 1):
        t = max(budget - service_cost * k, 0.0)
        profit = expected_profit_closed_form(lam, arrival_rate, k, t)
        if profit > best_profit:
            best_k, best_profit = k, profit

    if budget <= 2 * service_cost:
        regime = Regime.NOT_APPLICABLE
    elif arrival_rate <= low_regime_threshold(budget, service_cost):
        regime = Regime.LOW
    elif arrival_rate >= high_regime_threshold(budget, service_cost):
        regime = Regime.HIGH
    else:
        regime = Regime.MEDIUM

    return AllocationDecision(k_star=best_k,
                              t_star=budget - service_cost * best_k,
                              profit=best_profit, regime=regime)


def capacity_argmax(arrival_rate: float, budget: float,
                    service_cost: float) -> int:
    """Argmax of S_k(a' (B - ck) / e) over feasible k, ties to the smallest.

    The capacity series is a monotone transform of the closed-form profit, so
    this matches ``allocate_continuous`` and is the raw search the regime
    labels classify.
    """
    k_top = math.floor(budget / service_cost + _FLOOR_EPS)
    best_k, best_val = 1, -math.inf
    for k in range(1, k_top + 1):
        t = max(budget - service_cost * k, 0.0)
        val = capacity_series_sum(arrival_rate * t / math.e, k)
        if val > best_val:
            best_k, best_val = k, val
    return best_k
