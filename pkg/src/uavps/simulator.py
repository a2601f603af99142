"""Monte-Carlo harness validating every expected-profit table in the package.

Trials replay the arrival-and-purchase process under a given price policy and
report the realized mean profit with its standard error; the dynamic-program
and closed-form values must sit within a few standard errors of it.

Randomness comes from numpy's PCG64 bit generator, recorded in each report.
Trials run in fixed-size blocks of ``CHUNK_TRIALS``; block i derives its own
child stream from (seed, i), so results are reproducible bit for bit and a
harness may farm blocks out to workers without changing the outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pricing import PriceSchedule, build_pricing
from .valuations import ValuationModel

GENERATOR_ID = "numpy-pcg64"
CHUNK_TRIALS = 250_000


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    mean_profit: float
    std_error: float
    served_histogram: tuple[int, ...]
    seed: int
    generator: str = GENERATOR_ID


@dataclass(frozen=True)
class RegretReport:
    """Optimal-policy and fixed-price means on common random numbers."""

    optimal_mean: float
    fixed_price_mean: float
    paired_std_error: float
    trials: int
    seed: int


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=(index,))))


def _chunk_sizes(trials: int):
    full, rest = divmod(trials, CHUNK_TRIALS)
    sizes = [CHUNK_TRIALS] * full
    if rest:
        sizes.append(rest)
    return sizes


def _report(profits: np.ndarray, served: np.ndarray, capacity: int,
            seed: int) -> SimulationReport:
    n = profits.size
    mean = float(profits.mean())
    se = float(profits.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    hist = np.bincount(served, minlength=capacity + 1)
    return SimulationReport(trials=n, mean_profit=mean, std_error=se,
                            served_histogram=tuple(int(c) for c in hist),
                            seed=seed)


# -- discrete-time simulation --------------------------------------------------


def _run_discrete(model: ValuationModel, alpha: float, price_lookup: np.ndarray,
                  capacity: int, horizon: int, trials: int, seed: int):
    """Play the slot-by-slot process; returns per-trial profits and served counts.

    ``price_lookup[j, t]`` must be finite wherever a sale is possible; row 0 is
    forced unsellable. Arrival and valuation draws are consumed for every
    trial in every slot, so two policies simulated from the same seed face
    identical buyers (common random numbers).
    """
    profits = np.empty(trials)
    served = np.empty(trials, dtype=np.int64)
    lookup = price_lookup.copy()
    lookup[0, :] = np.inf  # exhausted capacity never sells
    lookup[np.isnan(lookup)] = np.inf

    pos = 0
    for idx, size in enumerate(_chunk_sizes(trials)):
        rng = _chunk_rng(seed, idx)
        j = np.full(size, capacity, dtype=np.int64)
        gain = np.zeros(size)
        for t in range(horizon, 0, -1):
            arrive = rng.random(size) < alpha
            v = model.sample(rng.random(size))
            jj = np.minimum(j, t)  # spare units beyond the time left are dead
            price = lookup[jj, t]
            sale = arrive & (jj > 0) & (v >= price)
            gain = np.where(sale, gain + price, gain)
            j = j - sale
        profits[pos:pos + size] = gain
        served[pos:pos + size] = capacity - j
        pos += size
    return profits, served


def simulate_discrete(model: ValuationModel, alpha: float, schedule: PriceSchedule,
                      capacity: int, horizon: int, trials: int,
                      seed: int) -> SimulationReport:
    """Estimate realized profit under a posted-price schedule.

    Per trial, time counts down from the horizon; each slot holds a buyer with
    probability alpha whose valuation is drawn by inverse CDF, and a sale
    happens when it reaches the scheduled price for the current leftover
    capacity. Deterministic given the seed.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"occurrence probability must lie in [0, 1], got {alpha}")
    if schedule.capacity != capacity or schedule.horizon != horizon:
        raise ValueError(
            f"schedule built for (k={schedule.capacity}, T={schedule.horizon}), "
            f"asked to simulate (k={capacity}, T={horizon})"
        )
    profits, served = _run_discrete(model, alpha, schedule.prices, capacity,
                                    horizon, trials, seed)
    return _report(profits, served, capacity, seed)


def simulate_policy_regret(model: ValuationModel, alpha: float, capacity: int,
                           horizon: int, trials: int, seed: int,
                           constant_price: float) -> RegretReport:
    """Optimal schedule versus one flat price on common random numbers.

    Both policies see the same arrival and valuation stream, so the paired
    standard error reflects only the policy difference.
    """
    schedule, _ = build_pricing(model, alpha, capacity, horizon)
    flat = np.full_like(schedule.prices, float(constant_price))
    opt, _ = _run_discrete(model, alpha, schedule.prices, capacity, horizon,
                           trials, seed)
    fixed, _ = _run_discrete(model, alpha, flat, capacity, horizon, trials, seed)
    diff = opt - fixed
    paired_se = float(diff.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return RegretReport(optimal_mean=float(opt.mean()),
                        fixed_price_mean=float(fixed.mean()),
                        paired_std_error=paired_se, trials=trials, seed=seed)


# -- continuous-time simulation -------------------------------------------------


def _log_series_levels(x: np.ndarray, capacity: int) -> np.ndarray:
    """log S_k(x) for k = 0..capacity, stacked; matches the closed-form price."""
    levels = np.empty((capacity + 1, x.size))
    total = np.ones_like(x)
    term = np.ones_like(x)
    levels[0] = 0.0
    for i in range(1, capacity + 1):
        term = term * x / i
        total = total + term
        levels[i] = np.log(total)
    return levels


def simulate_continuous(lam: float, arrival_rate: float, capacity: int,
                        horizon: float, trials: int, seed: int) -> SimulationReport:
    """Estimate realized profit under the continuous closed-form prices.

    Per trial, a Poisson number of buyers arrive at uniform times; they are
    served in arrival order (decreasing time remaining), each quoted the
    closed-form price at their remaining time and the current leftover
    capacity. An arrival with exactly zero time left is discarded: nothing
    can be priced in zero remaining time, and the event has measure zero.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if lam <= 0 or arrival_rate <= 0:
        raise ValueError("rate parameters must be positive")
    if capacity < 1:
        raise ValueError(f"capacity must be a positive integer, got {capacity}")
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")

    profits = np.empty(trials)
    served = np.empty(trials, dtype=np.int64)
    pos = 0
    for idx, size in enumerate(_chunk_sizes(trials)):
        rng = _chunk_rng(seed, idx)
        counts = rng.poisson(arrival_rate * horizon, size)
        top = int(counts.max()) if size else 0
        gain = np.zeros(size)
        j = np.full(size, capacity, dtype=np.int64)
        if top > 0:
            cols = np.arange(top)
            live = cols[None, :] < counts[:, None]
            # Arrival instants of a Poisson stream on [0, T] are uniform, so
            # remaining times are too; sorting descending plays them in order.
            # Valuations are i.i.d. and independent of the times, so pairing
            # column r of the draws with the r-th sorted time is sound.
            t_rem = np.where(live, rng.random((size, top)) * horizon, -np.inf)
            t_rem = -np.sort(-t_rem, axis=1)
            v = -np.log1p(-rng.random((size, top))) / lam
            rows = np.arange(size)
            for r in range(top):
                t = t_rem[:, r]
                open_slot = (t > 0.0) & (j > 0)
                x = np.where(open_slot, arrival_rate * np.maximum(t, 0.0) / math.e, 0.0)
                levels = _log_series_levels(x, capacity)
                jj = np.maximum(j, 1)
                price = (1.0 + levels[jj, rows] - levels[jj - 1, rows]) / lam
                sale = open_slot & (v[:, r] >= price)
                gain = np.where(sale, gain + price, gain)
                j = j - sale
        profits[pos:pos + size] = gain
        served[pos:pos + size] = capacity - j
        pos += size
    return _report(profits, served, capacity, seed)
