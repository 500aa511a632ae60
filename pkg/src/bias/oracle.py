"""
Independent newsvendor oracles: closed-form expected profit and a
Monte-Carlo grid search over order quantities.
"""

from typing import Tuple

import numpy as np
from scipy import stats

from .scenario import NewsvendorScenario


def expected_profit(sc: NewsvendorScenario, q: float) -> float:
    """
    p*E[min(Q,D)] + s*E[(Q-D)+] - c*Q for D ~ N(mu, sigma).

    Uses the standard normal loss function; demand is not truncated.
    """
    z = (q - sc.mu) / sc.sigma
    loss = stats.norm.pdf(z) - z * stats.norm.sf(z)
    sales = sc.mu - sc.sigma * loss
    leftover = q - sales
    return sc.price * sales + sc.salvage * leftover - sc.cost * q


class MonteCarloOracle:
    """
    Profit of many order quantities on one shared demand sample.

    Demand is N(mu, sigma) truncated at zero. The sample is sorted once so
    that every quantity is evaluated with a binary search and prefix sums.
    """

    def __init__(self, sc: NewsvendorScenario, rng: np.random.Generator, draws: int = 1_000_000):
        self.scenario = sc
        z = np.sort(rng.standard_normal(draws))
        self.demand = np.maximum(0.0, sc.mu + sc.sigma * z)
        self.prefix = np.concatenate(([0.0], np.cumsum(self.demand)))

    def profits(self, quantities: np.ndarray) -> np.ndarray:
        sc = self.scenario
        q = np.asarray(quantities, dtype=float)
        n = self.demand.size
        below = np.searchsorted(self.demand, q, side="right")
        sales = (self.prefix[below] + q * (n - below)) / n
        leftover = q - sales
        return sc.price * sales + sc.salvage * leftover - sc.cost * q

    def argmax(self, grid_points: int = 401) -> Tuple[float, float]:
        """Best quantity on an even grid over [mu - 4 sigma, mu + 4 sigma] and its profit."""
        sc = self.scenario
        grid = np.linspace(max(0.0, sc.mu - 4.0 * sc.sigma), sc.mu + 4.0 * sc.sigma, grid_points)
        profits = self.profits(grid)
        best = int(np.argmax(profits))
        return float(grid[best]), float(profits[best])

    def relative_gap(self, q: float, grid_points: int = 401) -> float:
        """(best grid profit - profit(q)) / |best grid profit|; <= 0 when q beats the grid."""
        _, best = self.argmax(grid_points)
        mine = float(self.profits(np.array([q]))[0])
        return (best - mine) / abs(best)
