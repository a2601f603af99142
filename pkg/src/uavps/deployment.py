"""Assigning a UAV fleet to heterogeneous hotspots.

Each hotspot m has an occurrence rate alpha_m and a flying distance D_m from
the station (energy cost one per unit distance). A group of n co-located
vehicles pools residual energy: pooling divides the per-unit capacity cost by
n at the price of multiplying hovering energy, so the feasible capacity bound
relaxes to floor((B0 - D) / (1 + c/n)) and the hovering time for capacity k
is floor(B0 - D - c*k/n).

The planner enumerates every composition of the fleet over the hotspots
(unreachable ones pinned to zero), memoizing the per-(hotspot, group size)
profit so the inner dynamic program runs at most M*N times. Two verification
tools accompany the planner:

* ``route_oracle`` exhaustively enumerates every ordered hotspot subset and
  every grid-aligned energy partition for a single vehicle. Its optimum is
  always a single-hotspot route with the full residual budget, which the
  planner's per-hotspot reduction relies on.
* ``forking_condition`` evaluates the sufficient condition under which a
  fleet splits across the two best hotspots instead of all pooling on the
  first best (continuous relaxation, exponential valuations).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .allocation import AllocationDecision, Regime
from .pricing import build_pricing, capacity_series_sum
from .valuations import ValuationModel

_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class Hotspot:
    """Per-slot occurrence probability (discrete) or arrival rate (continuous),
    plus flying distance from the station."""

    alpha: float
    distance: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"occurrence rate must be positive, got {self.alpha}")
        if self.distance < 0:
            raise ValueError(f"distance must be nonnegative, got {self.distance}")


@dataclass(frozen=True)
class FleetConfig:
    count: int
    initial_budget: float
    service_cost: float
    valuation: ValuationModel

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"fleet needs at least one vehicle, got {self.count}")
        if self.initial_budget <= 0:
            raise ValueError("initial budget must be positive")
        if self.service_cost <= 0:
            raise ValueError("service cost must be positive")


@dataclass(frozen=True)
class DeploymentProfile:
    """How many vehicles go to each hotspot; sums to the fleet size."""

    counts: tuple[int, ...]

    def served(self) -> int:
        return sum(1 for n in self.counts if n > 0)


@dataclass(frozen=True)
class DeploymentPlan:
    profile: DeploymentProfile
    per_hotspot: tuple[AllocationDecision | None, ...]
    total_profit: float

    def to_dict(self) -> dict:
        spots = []
        for m, (n, dec) in enumerate(zip(self.profile.counts, self.per_hotspot)):
            entry = {"hotspot": m, "n": n}
            if dec is not None:
                entry.update(k=dec.k_star, T=dec.t_star, profit=dec.profit)
            spots.append(entry)
        return {"profile": list(self.profile.counts),
                "per_hotspot": spots,
                "total": self.total_profit}

    def csv_rows(self):
        """Yield (hotspot, n, k, T, profit) rows; unserved hotspots blank."""
        for m, (n, dec) in enumerate(zip(self.profile.counts, self.per_hotspot)):
            if dec is None:
                yield m, n, None, None, None
            else:
                yield m, n, dec.k_star, dec.t_star, dec.profit


@dataclass(frozen=True)
class RouteInstance:
    """Hotspots plus symmetric inter-hotspot flying distances.

    No triangle inequality is imposed; only symmetry, a zero diagonal and
    nonnegativity are validated.
    """

    hotspots: tuple[Hotspot, ...]
    pairwise: np.ndarray

    def __post_init__(self):
        m = len(self.hotspots)
        d = np.asarray(self.pairwise, dtype=float)
        if d.shape != (m, m):
            raise ValueError(f"pairwise matrix must be {m}x{m}, got {d.shape}")
        if np.any(d < 0):
            raise ValueError("inter-hotspot distances must be nonnegative")
        if np.any(np.diag(d) != 0):
            raise ValueError("pairwise matrix must have a zero diagonal")
        if not np.allclose(d, d.T, atol=1e-12):
            raise ValueError("pairwise matrix must be symmetric")
        object.__setattr__(self, "pairwise", d)


class BestHotspot(NamedTuple):
    index: int
    decision: AllocationDecision
    ranking: list[int]


class RouteResult(NamedTuple):
    route: tuple[int, ...]
    budgets: tuple[float, ...]
    profit: float


class ForkingCheck(NamedTuple):
    holds: bool
    phi: float
    k2_star: int


# -- discrete per-hotspot allocation ----------------------------------------


def _pooled_decision(model: ValuationModel, alpha: float, available: float,
                     service_cost: float, group: int) -> AllocationDecision:
    """Best (k, T) for a group of ``group`` vehicles sharing ``available`` energy
    each, with hovering time floored to whole slots."""
    k_max = math.floor(available / (1.0 + service_cost / group) + _FLOOR_EPS)
    if k_max < 1:
        return AllocationDecision(k_star=0, t_star=0, profit=0.0,
                                  regime=Regime.NOT_APPLICABLE)
    t_of = lambda k: math.floor(available - service_cost * k / group + _FLOOR_EPS)
    _, table = build_pricing(model, alpha, k_max, t_of(1))
    best_k, best_profit = 1, -math.inf
    for k in range(1, k_max + 1):
        profit = float(table.values[k, t_of(k)])
        if profit > best_profit:
            best_k, best_profit = k, profit
    return AllocationDecision(k_star=best_k, t_star=t_of(best_k),
                              profit=best_profit, regime=Regime.NOT_APPLICABLE)


def hotspot_profit(hotspot: Hotspot, uav_count: int,
                   fleet: FleetConfig) -> AllocationDecision:
    """Best energy split for ``uav_count`` pooled vehicles at one hotspot.

    With a single vehicle this reduces exactly to the one-UAV discrete
    allocation at budget B0 - D. Returns a zero-profit decision with k = 0
    when not even one user fits after the flight.
    """
    if uav_count < 1:
        raise ValueError(f"need at least one vehicle, got {uav_count}")
    available = fleet.initial_budget - hotspot.distance
    if available <= 0:
        raise ValueError(
            f"hotspot at distance {hotspot.distance} unreachable on budget "
            f"{fleet.initial_budget}"
        )
    return _pooled_decision(fleet.valuation, hotspot.alpha, available,
                            fleet.service_cost, uav_count)


# -- fleet-wide planning ------------------------------------------------------


def compositions(total: int, caps: list[int]):
    """Yield tuples of nonnegative parts summing to ``total`` with per-slot caps,
    in lexicographic order."""
    m = len(caps)

    def rec(pos, remaining, prefix):
        if pos == m - 1:
            if remaining <= caps[pos]:
                yield prefix + (remaining,)
            return
        for n in range(0, min(caps[pos], remaining) + 1):
            yield from rec(pos + 1, remaining - n, prefix + (n,))

    yield from rec(0, total, ())


def optimal_deployment(hotspots: list[Hotspot], fleet: FleetConfig) -> DeploymentPlan:
    """Exhaustive search over fleet compositions with memoized hotspot profits.

    Unreachable hotspots are pinned to zero vehicles. Ties prefer loading the
    lower-indexed (better-ranked) hotspots: two identical hotspots and one
    vehicle give the profile (1, 0).
    """
    m = len(hotspots)
    reachable = [h.distance < fleet.initial_budget for h in hotspots]
    if not any(reachable):
        raise ValueError("no hotspot is reachable on the fleet budget")

    memo: dict[tuple[int, int], AllocationDecision] = {}
    for i, h in enumerate(hotspots):
        if reachable[i]:
            for n in range(1, fleet.count + 1):
                memo[i, n] = hotspot_profit(h, n, fleet)

    caps = [fleet.count if reachable[i] else 0 for i in range(m)]
    best_counts, best_total = None, -math.inf
    for counts in compositions(fleet.count, caps):
        total = sum(memo[i, n].profit for i, n in enumerate(counts) if n > 0)
        # >= so exact ties end on the lexicographically greatest profile,
        # which front-loads the lower-indexed hotspots
        if total >= best_total:
            best_counts, best_total = counts, total

    per = tuple(memo[i, n] if n > 0 else None for i, n in enumerate(best_counts))
    return DeploymentPlan(profile=DeploymentProfile(best_counts),
                          per_hotspot=per, total_profit=best_total)


def best_single_hotspot(hotspots: list[Hotspot], fleet: FleetConfig) -> BestHotspot:
    """The hotspot a lone vehicle should serve, plus the full profit ranking.

    Ranking covers reachable hotspots ordered by achievable profit (ties to
    the lower index).
    """
    decisions = {}
    for i, h in enumerate(hotspots):
        if h.distance < fleet.initial_budget:
            decisions[i] = hotspot_profit(h, 1, fleet)
    if not decisions:
        raise ValueError("no hotspot is reachable on the fleet budget")
    ranking = sorted(decisions, key=lambda i: (-decisions[i].profit, i))
    best = ranking[0]
    return BestHotspot(index=best, decision=decisions[best], ranking=ranking)


# -- single-vehicle routing oracle -------------------------------------------


def route_oracle(instance: RouteInstance, fleet: FleetConfig,
                 energy_step: int = 1) -> RouteResult:
    """Brute-force the best multi-hotspot route for one vehicle.

    Enumerates every ordered subset of hotspots and every energy partition on
    the given grid whose parts sum to the residual budget after flying the
    route. When the residual is not a grid multiple, the fractional remainder
    is attached to each stop in turn so the full budget is always spendable.
    Factorial enumeration caps the instance at three hotspots.
    """
    m = len(instance.hotspots)
    if m > 3:
        raise ValueError(f"route oracle enumerates at most 3 hotspots, got {m}")
    if energy_step < 1 or energy_step != int(energy_step):
        raise ValueError(f"energy grid step must be a positive integer, got {energy_step}")

    model = fleet.valuation
    cost = fleet.service_cost
    cache: dict[tuple[int, float], float] = {}

    def spot_profit(idx: int, budget: float) -> float:
        key = (idx, round(budget, 9))
        if key not in cache:
            if budget <= 0:
                cache[key] = 0.0
            else:
                cache[key] = _pooled_decision(model, instance.hotspots[idx].alpha,
                                              budget, cost, 1).profit
        return cache[key]

    best = RouteResult(route=(), budgets=(), profit=0.0)
    for size in range(1, m + 1):
        for route in itertools.permutations(range(m), size):
            dist = instance.hotspots[route[0]].distance
            for a, b in zip(route, route[1:]):
                dist += instance.pairwise[a, b]
            residual = fleet.initial_budget - dist
            if residual < 0:
                continue
            units = int(residual // energy_step + _FLOOR_EPS)
            remainder = residual - units * energy_step
            for parts in compositions(units, [units] * size):
                base = [p * energy_step for p in parts]
                if remainder > _FLOOR_EPS:
                    variants = []
                    for q in range(size):
                        bumped = list(base)
                        bumped[q] += remainder
                        variants.append(bumped)
                else:
                    variants = [base]
                for budgets in variants:
                    profit = sum(spot_profit(i, bdg)
                                 for i, bdg in zip(route, budgets))
                    if profit > best.profit:
                        best = RouteResult(route=route, budgets=tuple(budgets),
                                           profit=profit)
    return best


# -- continuous relaxation: pooling and forking ------------------------------


def pooled_series_max(arrival_rate: float, available: float, service_cost: float,
                      group: int) -> tuple[int, float]:
    """Max over k of the capacity series S_k(a' (avail - c k / group) / e).

    Returns (best k, series value); the log of the value over lam is the
    pooled group's expected profit. Ties go to the smallest k.
    """
    k_top = math.floor(group * available / service_cost + _FLOOR_EPS)
    best_k, best_val = 1, -math.inf
    for k in range(1, max(k_top, 1) + 1):
        t = max(available - service_cost * k / group, 0.0)
        val = capacity_series_sum(arrival_rate * t / math.e, k)
        if val > best_val:
            best_k, best_val = k, val
    return best_k, best_val


def forking_condition(hotspot1: Hotspot, hotspot2: Hotspot, fleet: FleetConfig,
                      lam: float) -> ForkingCheck:
    """Sufficient condition for the fleet to fork across the two best hotspots.

    Hotspot 1 must be the first best for a lone vehicle; the check compares
    the rate ratio a'_2 / a'_1 against max(phi^(1/k2*), phi), where phi is the
    relative profit increment of pooling the N-th vehicle on hotspot 1 over
    sending it to hotspot 2.

    The denominator's hotspot-2 series is evaluated at rate a'_1: the rate
    ratio beta = a'_2 / a'_1 has been divided out of it, and the ratio test
    against beta and beta^k2* is exactly what restores the missing factor for
    ratios below and above one.
    """
    if fleet.count < 2:
        raise ValueError("forking needs at least two vehicles")
    if lam <= 0:
        raise ValueError("valuation rate must be positive")
    avail1 = fleet.initial_budget - hotspot1.distance
    avail2 = fleet.initial_budget - hotspot2.distance
    if avail1 <= 0 or avail2 <= 0:
        raise ValueError("both hotspots must be reachable")

    a1, a2 = hotspot1.alpha, hotspot2.alpha
    cost, n = fleet.service_cost, fleet.count

    k2_star, best2 = pooled_series_max(a2, avail2, cost, 1)
    _, best1 = pooled_series_max(a1, avail1, cost, 1)
    if best1 < best2:
        raise ValueError("hotspot 1 must be the first best for a single vehicle")

    _, pooled_n = pooled_series_max(a1, avail1, cost, n)
    _, pooled_n1 = pooled_series_max(a1, avail1, cost, n - 1)

    x2 = a1 * max(avail2 - cost * k2_star, 0.0) / math.e
    tail2 = capacity_series_sum(x2, k2_star) - 1.0
    denominator = pooled_n1 * tail2
    if denominator <= 0.0:
        return ForkingCheck(holds=False, phi=math.inf, k2_star=k2_star)

    phi = (pooled_n - pooled_n1) / denominator
    holds = a2 / a1 > max(phi ** (1.0 / k2_star), phi)
    return ForkingCheck(holds=holds, phi=phi, k2_star=k2_star)


def optimal_deployment_continuous(hotspots: list[Hotspot], fleet: FleetConfig,
                                  lam: float) -> DeploymentPlan:
    """Composition search under the continuous closed-form profits.

    Mirrors ``optimal_deployment`` with Poisson arrivals and exponential
    valuations of rate lam; used to verify the forking condition.
    """
    if lam <= 0:
        raise ValueError("valuation rate must be positive")
    m = len(hotspots)
    reachable = [h.distance < fleet.initial_budget for h in hotspots]
    if not any(reachable):
        raise ValueError("no hotspot is reachable on the fleet budget")

    memo: dict[tuple[int, int], AllocationDecision] = {}
    for i, h in enumerate(hotspots):
        if not reachable[i]:
            continue
        avail = fleet.initial_budget - h.distance
        for n in range(1, fleet.count + 1):
            k, val = pooled_series_max(h.alpha, avail, fleet.service_cost, n)
            memo[i, n] = AllocationDecision(
                k_star=k, t_star=avail - fleet.service_cost * k / n,
                profit=math.log(val) / lam, regime=Regime.NOT_APPLICABLE)

    caps = [fleet.count if reachable[i] else 0 for i in range(m)]
    best_counts, best_total = None, -math.inf
    for counts in compositions(fleet.count, caps):
        total = sum(memo[i, n].profit for i, n in enumerate(counts) if n > 0)
        if total >= best_total:  # same tie rule as the discrete planner
            best_counts, best_total = counts, total

    per = tuple(memo[i, n] if n > 0 else None for i, n in enumerate(best_counts))
    return DeploymentPlan(profile=DeploymentProfile(best_counts),
                          per_hotspot=per, total_profit=best_total)


# -- file ingestion ------------------------------------------------------------


def load_hotspots(path: str) -> list[Hotspot]:
    """Read a hotspot set from a JSON array of {"alpha": ..., "distance": ...}."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, list) or not raw:
        raise ValueError(f"{path}: expected a nonempty JSON array of hotspots")
    spots = []
    for i, entry in enumerate(raw):
        unknown = set(entry) - {"alpha", "distance"}
        if unknown:
            raise ValueError(f"{path}: hotspot {i} has unknown keys {sorted(unknown)}")
        try:
            spots.append(Hotspot(alpha=float(entry["alpha"]),
                                 distance=float(entry["distance"])))
        except KeyError as exc:
            raise ValueError(f"{path}: hotspot {i} missing key {exc}") from exc
    return spots


def fleet_from_dict(data: dict) -> FleetConfig:
    """Build a fleet from {"count", "budget", "service_cost", "valuation"}."""
    unknown = set(data) - {"count", "budget", "service_cost", "valuation"}
    if unknown:
        raise ValueError(f"unknown fleet keys: {sorted(unknown)}")
    try:
        return FleetConfig(count=int(data["count"]),
                           initial_budget=float(data["budget"]),
                           service_cost=float(data["service_cost"]),
                           valuation=ValuationModel.from_dict(data["valuation"]))
    except KeyError as exc:
        raise ValueError(f"fleet config missing key {exc}") from exc
