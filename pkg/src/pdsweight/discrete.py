"""
Discrete block model.

A block covers a timespan and records the exact integrals of V and W over it
plus one snapshot of S.  Honest parties cut their profile into consecutive unit
blocks and report the minimum space; the adversary may leave gaps, choose any
spans and report the maximum space.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .continuous import chain_weight
from .resources import (
    DomainError,
    ResourcePoint,
    ResourceProfile,
    extrema,
    integrate_timed,
    refine,
)
from .weights import WeightExpr


class SpaceRecordError(ValueError):
    """Explicit space value outside ``[inf S, sup S)`` over the block."""


@dataclass(frozen=True)
class Block:
    start: float
    end: float
    recorded: ResourcePoint
    lower: ResourcePoint  # componentwise inf over the open span
    upper: ResourcePoint  # componentwise sup over the open span

    def __post_init__(self):
        if not self.start < self.end:
            raise DomainError("block span must have start < end")

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def space_recorded(self):
        return self.recorded.space

    @property
    def vdf_recorded(self):
        return self.recorded.vdf

    @property
    def work_recorded(self):
        return self.recorded.work

    def smoothness(self) -> float:
        ratios = [hi / lo for lo, hi in zip(self.lower.flat(), self.upper.flat())]
        return max(ratios, default=1.0)


@dataclass(frozen=True)
class Blockchain:
    blocks: tuple[Block, ...]
    kind: str = "adversarial"

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.kind not in ("honest", "adversarial"):
            raise ValueError(f"unknown chain kind {self.kind!r}")
        for b, c in zip(self.blocks, self.blocks[1:]):
            if c.start < b.end:
                raise DomainError(f"blocks overlap: ({b.start}, {b.end}) and ({c.start}, {c.end})")
        if self.kind == "honest" and self.blocks:
            if self.blocks[0].start != 0 or any(
                b.end != c.start for b, c in zip(self.blocks, self.blocks[1:])
            ):
                raise DomainError("honest blocks must cover the horizon without gaps")

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


SpacePolicy = Union[str, Sequence[float]]


def make_block(
    profile: ResourceProfile, span: tuple[float, float], space_policy: SpacePolicy = "min"
) -> Block:
    """Block over ``span`` with exact timed integrals.

    ``space_policy`` is ``"min"`` (honest), ``"max"`` (adversarial) or an
    explicit vector, which must lie in ``[inf, sup)`` componentwise, or equal
    the value where S is constant over the span.
    """
    a, b = span
    lower, upper = extrema(profile, a, b)
    vdf, work = integrate_timed(profile, a, b)
    if space_policy == "min":
        space = lower.space
    elif space_policy == "max":
        space = upper.space
    else:
        space = tuple(float(x) for x in space_policy)
        if len(space) != len(lower.space):
            raise SpaceRecordError("explicit space has the wrong dimension")
        for j, (x, lo, hi) in enumerate(zip(space, lower.space, upper.space)):
            ok = x == lo if lo == hi else lo <= x < hi
            if not ok:
                raise SpaceRecordError(f"S{j + 1}={x} outside [{lo}, {hi}) on ({a}, {b})")
    return Block(a, b, ResourcePoint(space, vdf, work), lower, upper)


def honest_discretize(profile: ResourceProfile) -> Blockchain:
    """Consecutive unit blocks over an integer horizon, recording minimum space."""
    T = profile.horizon
    if not float(T).is_integer():
        raise DomainError(f"honest discretization needs an integer horizon, got {T}")
    blocks = [make_block(profile, (i, i + 1), "min") for i in range(int(T))]
    return Blockchain(tuple(blocks), "honest")


def adversarial_discretize(
    profile: ResourceProfile, spans: Sequence[tuple[float, float]]
) -> Blockchain:
    spans = [tuple(map(float, s)) for s in spans]
    for (a, b), (c, d) in zip(spans, spans[1:]):
        if c < b:
            raise DomainError(f"spans ({a}, {b}) and ({c}, {d}) overlap or are out of order")
    blocks = [make_block(profile, s, "max") for s in spans]
    return Blockchain(tuple(blocks), "adversarial")


def smoothness(chain: Blockchain) -> float:
    """Smallest xi >= 1 with max <= xi * min for every component of every block."""
    if not chain.blocks:
        raise ValueError("smoothness of an empty chain is undefined")
    return max(1.0, max(b.smoothness() for b in chain.blocks))


def block_weight(expr: WeightExpr, block: Block) -> float:
    return expr(block.recorded)


def blockchain_weight(expr: WeightExpr, chain: Blockchain) -> float:
    return float(sum(expr(b.recorded) for b in chain.blocks))


@dataclass(frozen=True)
class InequalityReport:
    delta: float
    xi: float
    honest_block_weight: float
    honest_bound: float  # cweight(honest) / xi^2
    adversary_bound: float  # xi^2 * cweight(adversary)
    adversary_block_weight: float
    gap_ok: bool
    smooth_ok: bool
    left_ok: bool
    middle_ok: bool
    right_ok: bool
    measured_xi: tuple[float, float]

    @property
    def holds(self) -> bool:
        return self.left_ok and self.middle_ok and self.right_ok

    @property
    def preconditions_ok(self) -> bool:
        return self.gap_ok and self.smooth_ok

    @property
    def counterexample(self) -> bool:
        """Preconditions met yet the chain of inequalities breaks."""
        return self.preconditions_ok and not self.holds

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "xi": self.xi,
            "measured_xi": list(self.measured_xi),
            "quantities": [
                self.honest_block_weight,
                self.honest_bound,
                self.adversary_bound,
                self.adversary_block_weight,
            ],
            "gap_ok": self.gap_ok,
            "smooth_ok": self.smooth_ok,
            "inequalities": [self.left_ok, self.middle_ok, self.right_ok],
            "holds": self.holds,
        }


def weight_gap_holds(
    expr: WeightExpr, honest: ResourceProfile, adversary: ResourceProfile, delta: float
) -> bool:
    """``delta * Γ(adversary(t)) < Γ(honest(t))`` on every segment."""
    return all(delta * expr(a) < expr(h) for _, _, (h, a) in refine(honest, adversary))


def verify_theorem_chain(
    expr: WeightExpr,
    honest: ResourceProfile,
    adversary: ResourceProfile,
    honest_chain: Blockchain,
    adversary_chain: Blockchain,
    delta: float,
    xi: Optional[float] = None,
    rtol: float = 1e-9,
) -> InequalityReport:
    """Evaluate the four quantities

        Weight(honest blocks) >= cweight(honest)/xi^2
                              >  xi^2 * cweight(adversary)
                              >= Weight(adversary blocks)

    ``xi`` defaults to ``delta ** 0.25``.  Precondition failures are reported
    through ``gap_ok`` / ``smooth_ok`` rather than raised.
    """
    if xi is None:
        xi = delta**0.25
    xi_h = smoothness(honest_chain)
    xi_a = smoothness(adversary_chain) if adversary_chain.blocks else 1.0
    smooth_ok = xi_h <= xi * (1 + rtol) and xi_a <= xi * (1 + rtol) and xi**4 <= delta * (1 + rtol)
    gap_ok = weight_gap_holds(expr, honest, adversary, delta)

    wh = blockchain_weight(expr, honest_chain)
    wa = blockchain_weight(expr, adversary_chain)
    hb = chain_weight(expr, honest) / xi**2
    ab = xi**2 * chain_weight(expr, adversary)
    return InequalityReport(
        delta=delta,
        xi=xi,
        honest_block_weight=wh,
        honest_bound=hb,
        adversary_bound=ab,
        adversary_block_weight=wa,
        gap_ok=gap_ok,
        smooth_ok=smooth_ok,
        left_ok=wh >= hb * (1 - rtol),
        middle_ok=hb > ab,
        right_ok=wa <= ab * (1 + rtol),
        measured_xi=(xi_h, xi_a),
    )


def chain_to_csv(expr: WeightExpr, chain: Blockchain) -> str:
    """One row per block: index, span, every recorded component, block weight."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if chain.blocks:
        k1, k2, k3 = chain.blocks[0].recorded.dims
    else:
        k1 = k2 = k3 = 0
    header = ["block_index", "start", "end"]
    header += [f"S{i + 1}" for i in range(k1)] + [f"V{i + 1}" for i in range(k2)]
    header += [f"W{i + 1}" for i in range(k3)] + ["block_weight"]
    writer.writerow(header)
    for i, b in enumerate(chain.blocks):
        writer.writerow([i, repr(b.start), repr(b.end), *map(repr, b.recorded.flat()), repr(expr(b.recorded))])
    return buf.getvalue()


def random_smooth_profile(
    rng: np.random.Generator,
    dims: Sequence[int],
    horizon: float,
    xi: float,
    n_segments: int = 8,
    level: Optional[np.ndarray] = None,
) -> ResourceProfile:
    """Step profile whose components stay within a factor ``xi`` of a base level.

    Any block cut from it is ``xi``-smooth.
    """
    k = sum(dims)
    if level is None:
        level = np.exp(rng.uniform(np.log(0.25), np.log(4.0), size=k))
    cuts = np.sort(rng.uniform(0, horizon, size=n_segments - 1))
    bps = [0.0] + [float(c) for c in cuts if 0 < c < horizon]
    bps = sorted(set(bps))
    k1, k2, _ = dims
    vals = []
    for _ in bps:
        flat = level * np.exp(rng.uniform(0, np.log(xi), size=k)) if xi > 1 else level.copy()
        flat = [float(x) for x in flat]
        vals.append(ResourcePoint(flat[:k1], flat[k1 : k1 + k2], flat[k1 + k2 :]))
    return ResourceProfile(horizon, tuple(bps), tuple(vals))
