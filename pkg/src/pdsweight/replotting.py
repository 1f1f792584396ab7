"""
Replotting attacks and difficulty-based defenses in the discrete model.

An adversary holding ``N`` space that replots ``m`` times inside one block
appears to hold ``(m + 1) * N`` space.  Each replot takes ``rho`` time during
which no timed resource accrues toward the block.

Two defenses are simulated:

* a weight band ``D <= Γ(b) <= eta * D`` on every block;
* for factored weights ``Γ1(S) * Γ2(V, W)``, pinning ``Γ2 = D`` per block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .discrete import (
    Block,
    Blockchain,
    blockchain_weight,
    honest_discretize,
    weight_gap_holds,
)
from .resources import MIN_VALUE, ResourcePoint, ResourceProfile, extrema, integrate_timed
from .weights import SamplerConfig, WeightExpr, check_subhomogeneous_space


class InfeasibleReplot(ValueError):
    """Replots leave no time inside the block for timed resources to accrue."""


@dataclass(frozen=True)
class ReplotScenario:
    expr: WeightExpr
    honest_profile: ResourceProfile
    adversary_profile: ResourceProfile
    replot_time: float
    replot_count: int = 0
    busy: bool = True  # no timed-resource credit while replotting

    def __post_init__(self):
        if not self.replot_time > 1:
            raise ValueError("replot time must exceed 1")
        if self.replot_count < 0:
            raise ValueError("replot count must be >= 0")
        if self.honest_profile.horizon != self.adversary_profile.horizon:
            raise ValueError("honest and adversary horizons differ")

    @property
    def horizon(self) -> float:
        return self.honest_profile.horizon

    @property
    def base_space(self) -> tuple[float, ...]:
        return extrema(self.adversary_profile, 0.0, self.horizon)[1].space

    def apparent_space(self, m: Optional[int] = None) -> tuple[float, ...]:
        m = self.replot_count if m is None else m
        return tuple((m + 1) * n for n in self.base_space)

    def max_replots(self) -> int:
        return int(math.floor(self.horizon / self.replot_time))


def replot_block(
    scenario: ReplotScenario,
    m: Optional[int] = None,
    span: Optional[tuple[float, float]] = None,
) -> Block:
    """Adversarial block that replots ``m`` times at the start of ``span``.

    Space is recorded as ``(m + 1)`` times the block's peak space; V and W
    integrate over the part of the span left after replotting.
    """
    m = scenario.replot_count if m is None else m
    a, b = span if span is not None else (0.0, scenario.horizon)
    busy_until = a + m * scenario.replot_time if scenario.busy else a
    if m * scenario.replot_time > b - a:
        raise InfeasibleReplot(f"{m} replots of {scenario.replot_time} exceed span ({a}, {b})")
    if busy_until >= b:
        raise InfeasibleReplot(f"{m} replots leave no accrual time in ({a}, {b})")
    lower, upper = extrema(scenario.adversary_profile, a, b)
    vdf, work = integrate_timed(scenario.adversary_profile, busy_until, b)
    if any(x < MIN_VALUE for x in vdf + work):
        raise InfeasibleReplot(f"{m} replots leave a vanishing accrual window in ({a}, {b})")
    space = tuple((m + 1) * s for s in upper.space)
    return Block(a, b, ResourcePoint(space, vdf, work), lower, upper)


@dataclass(frozen=True)
class DifficultyBand:
    difficulty: float
    eta: float

    def __post_init__(self):
        if not self.difficulty > 0:
            raise ValueError("difficulty must be positive")
        if not self.eta >= 1:
            raise ValueError("eta must be >= 1")

    @property
    def cap(self) -> float:
        return self.eta * self.difficulty

    def valid(self, weight: float) -> bool:
        return self.difficulty <= weight <= self.cap

    def credited(self, weight: float) -> float:
        """Weight a block can claim: clamped to the cap, zero if too light."""
        return 0.0 if weight < self.difficulty else min(weight, self.cap)


@dataclass(frozen=True)
class PinnedDifficulty:
    """Factored weight ``Γ1(S) * Γ2(V, W)`` with every block pinned to ``Γ2 = D``."""

    difficulty: float
    space_factor: WeightExpr
    timed_factor: WeightExpr


@dataclass(frozen=True)
class BlockVerdict:
    index: int
    weight: float
    valid: bool
    failed_bound: Optional[str] = None  # "lower" or "upper"


@dataclass(frozen=True)
class ValidityReport:
    verdicts: tuple[BlockVerdict, ...]

    @property
    def all_valid(self) -> bool:
        return all(v.valid for v in self.verdicts)

    @property
    def invalid(self) -> list[BlockVerdict]:
        return [v for v in self.verdicts if not v.valid]


def apply_difficulty_band(expr: WeightExpr, chain: Blockchain, band: DifficultyBand) -> ValidityReport:
    out = []
    for i, block in enumerate(chain.blocks):
        w = expr(block.recorded)
        if w < band.difficulty:
            out.append(BlockVerdict(i, w, False, "lower"))
        elif w > band.cap:
            out.append(BlockVerdict(i, w, False, "upper"))
        else:
            out.append(BlockVerdict(i, w, True))
    return ValidityReport(tuple(out))


@dataclass(frozen=True)
class RaceOutcome:
    honest_weight: float
    adversarial_weight: float
    best_strategy: dict = field(default_factory=dict)
    defense_claim_applies: bool = False

    @property
    def winner(self) -> str:
        # a tie is enough for the adversary
        return "adversary" if self.adversarial_weight >= self.honest_weight else "honest"

    @property
    def counterexample(self) -> bool:
        """The defense should have held but the adversary still won."""
        return self.defense_claim_applies and self.winner == "adversary"

    def to_dict(self) -> dict:
        return {
            "honest_weight": self.honest_weight,
            "adversarial_weight": self.adversarial_weight,
            "best_strategy": self.best_strategy,
            "winner": self.winner,
        }


def simulate_replot_race(scenario: ReplotScenario) -> RaceOutcome:
    """Honest unit blocks against the adversary's best single replotted block."""
    honest = blockchain_weight(scenario.expr, honest_discretize(scenario.honest_profile))
    best_m, best_w = None, -math.inf
    for m in range(scenario.max_replots() + 1):
        try:
            w = scenario.expr(replot_block(scenario, m).recorded)
        except InfeasibleReplot:
            continue
        if w > best_w:
            best_m, best_w = m, w
    strategy = {"m": [best_m], "spans": [[0.0, scenario.horizon]]}
    return RaceOutcome(honest, best_w, strategy)


def _grid(horizon: float, step: float) -> list[float]:
    n = int(math.floor(horizon / step + 1e-9))
    pts = [i * step for i in range(n + 1)]
    if horizon - pts[-1] > 1e-9:
        pts.append(horizon)
    else:
        pts[-1] = horizon
    return pts


def _best_band_chain(scenario: ReplotScenario, band: DifficultyBand, step: float):
    """Heaviest band-valid adversarial chain with block edges on the grid.

    Dynamic programme over grid points; a block may replot any feasible number
    of times.  Blocks heavier than the cap are credited at the cap, lighter
    than ``D`` are never worth including.
    """
    pts = _grid(scenario.horizon, step)
    n = len(pts)
    best = [0.0] * n
    back: list[Optional[tuple]] = [None] * n
    for j in range(1, n):
        best[j], back[j] = best[j - 1], ("gap", j - 1)
        for i in range(j):
            a, b = pts[i], pts[j]
            for m in range(int((b - a) / scenario.replot_time) + 1):
                try:
                    w = scenario.expr(replot_block(scenario, m, (a, b)).recorded)
                except InfeasibleReplot:
                    break
                credit = band.credited(w)
                if credit > 0 and best[i] + credit > best[j]:
                    best[j], back[j] = best[i] + credit, ("block", i, m, credit)
    blocks = []
    j = n - 1
    while j > 0:
        step_back = back[j]
        if step_back[0] == "gap":
            j = step_back[1]
            continue
        _, i, m, credit = step_back
        blocks.append((pts[i], pts[j], m, credit))
        j = i
    blocks.reverse()
    return best[-1], blocks


def _defended_band_race(scenario: ReplotScenario, band: DifficultyBand, step: float) -> RaceOutcome:
    chain = honest_discretize(scenario.honest_profile)
    weights = [scenario.expr(b.recorded) for b in chain.blocks]
    honest = float(sum(band.credited(w) for w in weights))
    adv, blocks = _best_band_chain(scenario, band, step)
    strategy = {
        "m": [m for _, _, m, _ in blocks],
        "spans": [[a, b] for a, b, _, _ in blocks],
    }
    applies = band.eta < scenario.replot_time and all(w >= band.difficulty for w in weights)
    return RaceOutcome(honest, adv, strategy, applies)


def _time_to_difficulty(profile, timed_factor, start, difficulty, horizon):
    """Earliest ``t`` with ``Γ2(∫V, ∫W over [start, t]) = D``, or None."""
    if start >= horizon:
        return None

    def level(t):
        vdf, work = integrate_timed(profile, start, t)
        return timed_factor(ResourcePoint(profile.dims[0] * (1.0,), vdf, work))

    if level(horizon) < difficulty:
        return None
    lo, hi = start, horizon
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if level(mid) >= difficulty:
            hi = mid
        else:
            lo = mid
    return hi


def _defended_pinned_race(scenario: ReplotScenario, pinned: PinnedDifficulty) -> RaceOutcome:
    T = scenario.horizon
    D = pinned.difficulty

    honest, t = 0.0, 0.0
    while True:
        end = _time_to_difficulty(scenario.honest_profile, pinned.timed_factor, t, D, T)
        if end is None:
            break
        s_min = extrema(scenario.honest_profile, t, end)[0]
        honest += pinned.space_factor(s_min) * D
        t = end

    prof = scenario.adversary_profile
    rho = scenario.replot_time

    @lru_cache(maxsize=None)
    def best_from(start: float):
        best, plan = 0.0, ()
        m = 0
        while start + m * rho < T:
            accrue = start + m * rho if scenario.busy else start
            end = _time_to_difficulty(prof, pinned.timed_factor, accrue, D, T)
            if end is None:
                break
            peak = extrema(prof, start, end)[1]
            w = pinned.space_factor(peak.scale_space(m + 1)) * D
            rest, rest_plan = best_from(end)
            if w + rest > best:
                best, plan = w + rest, ((start, end, m),) + rest_plan
            m += 1
        return best, plan

    adv, plan = best_from(0.0)
    sub = check_subhomogeneous_space(pinned.space_factor, SamplerConfig())
    applies = sub.holds and weight_gap_holds(
        scenario.expr, scenario.honest_profile, scenario.adversary_profile, 1.0
    )
    strategy = {"m": [m for _, _, m in plan], "spans": [[a, b] for a, b, _ in plan]}
    return RaceOutcome(honest, adv, strategy, applies)


def simulate_defended_race(
    scenario: ReplotScenario,
    band: Union[DifficultyBand, PinnedDifficulty],
    step: float = 0.25,
) -> RaceOutcome:
    """Race under a difficulty rule; the adversary plays its best grid strategy.

    With a :class:`DifficultyBand`, ``eta < rho`` and honest blocks at least
    ``D`` heavy, the honest side should win; an adversary win is flagged via
    :attr:`RaceOutcome.counterexample`.
    """
    if isinstance(band, PinnedDifficulty):
        return _defended_pinned_race(scenario, band)
    return _defended_band_race(scenario, band, step)
