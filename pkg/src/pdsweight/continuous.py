"""
Continuous chain model: time warps, adversarial chain profiles and chain weight.

A warp ``phi`` is a positive step function.  Altered time is
``psi(t) = integral_0^t 1/phi``, piecewise linear, so it and its inverse are
evaluated exactly.  An adversary warping its resource profile records space as
is and timed resources multiplied by ``phi``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .resources import (
    DomainError,
    ResourcePoint,
    ResourceProfile,
    evaluate,
    refine,
)
from .weights import WeightExpr


@dataclass(frozen=True)
class TimeWarp:
    horizon: float
    breakpoints: tuple[float, ...]
    factors: tuple[float, ...]
    # cumulative altered time at each breakpoint
    _psi: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        phis = tuple(float(f) for f in self.factors)
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "factors", phis)
        if not bps or len(bps) != len(phis) or bps[0] != 0.0:
            raise ValueError("warp needs matching breakpoints/factors starting at 0")
        if any(b >= c for b, c in zip(bps, bps[1:])) or bps[-1] >= self.horizon:
            raise ValueError("warp breakpoints must increase strictly and stay below the horizon")
        if any(not f > 0 for f in phis):
            raise ValueError("warp factors must be > 0")
        ends = bps[1:] + (self.horizon,)
        psi = [0.0]
        for a, b, f in zip(bps, ends, phis):
            psi.append(psi[-1] + (b - a) / f)
        object.__setattr__(self, "_psi", tuple(psi))

    @classmethod
    def constant(cls, factor: float, horizon: float) -> "TimeWarp":
        return cls(horizon, (0.0,), (factor,))

    @classmethod
    def identity(cls, horizon: float) -> "TimeWarp":
        return cls.constant(1.0, horizon)

    @property
    def altered_horizon(self) -> float:
        return self._psi[-1]

    def factor_at(self, t: float) -> float:
        return self.factors[bisect.bisect_right(self.breakpoints, t) - 1]

    def segments(self):
        ends = self.breakpoints[1:] + (self.horizon,)
        return list(zip(self.breakpoints, ends, self.factors))

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "segments": [{"t": b, "phi": f} for b, f in zip(self.breakpoints, self.factors)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TimeWarp":
        segs = d["segments"]
        return cls(d["horizon"], tuple(s["t"] for s in segs), tuple(s["phi"] for s in segs))


def altered_time(warp: TimeWarp, t: float) -> float:
    if not 0 <= t <= warp.horizon:
        raise DomainError(f"t={t} outside [0, {warp.horizon}]")
    i = min(bisect.bisect_right(warp.breakpoints, t) - 1, len(warp.factors) - 1)
    if t == warp.horizon:
        return warp.altered_horizon
    return warp._psi[i] + (t - warp.breakpoints[i]) / warp.factors[i]


def inverse_altered_time(warp: TimeWarp, t_alt: float) -> float:
    if not 0 <= t_alt <= warp.altered_horizon:
        raise DomainError(f"altered time {t_alt} outside [0, {warp.altered_horizon}]")
    if t_alt == warp.altered_horizon:
        return warp.horizon
    i = min(bisect.bisect_right(warp._psi, t_alt) - 1, len(warp.factors) - 1)
    return warp.breakpoints[i] + (t_alt - warp._psi[i]) * warp.factors[i]


@dataclass(frozen=True)
class ChainProfile(ResourceProfile):
    """What a chain records over (altered) time; honest or adversarial."""

    provenance: str = "honest"


class RecordingViolation(ValueError):
    pass


def adversarial_chain(
    profile: ResourceProfile,
    warp: TimeWarp,
    recording: Optional[ResourceProfile] = None,
    rtol: float = 1e-12,
) -> ChainProfile:
    """Chain an adversary can present after warping time.

    With ``recording=None`` the chain records the largest allowed values:
    ``S`` unchanged and ``V, W`` scaled by ``phi``.  An explicit ``recording``
    (a profile over altered time) is validated against those bounds.
    """
    if not np.isclose(profile.horizon, warp.horizon, rtol=0, atol=1e-12 * warp.horizon):
        raise ValueError("profile and warp horizons differ")
    cuts = sorted(set(profile.breakpoints) | set(warp.breakpoints))
    bps, vals = [], []
    for t in cuts:
        phi = warp.factor_at(t)
        bps.append(altered_time(warp, t))
        vals.append(evaluate(profile, t).scale_timed(phi))
    bound = ChainProfile(warp.altered_horizon, tuple(bps), tuple(vals), provenance="adversarial")
    if recording is None:
        return bound
    if not np.isclose(recording.horizon, bound.horizon, rtol=1e-12):
        raise RecordingViolation(
            f"recording horizon {recording.horizon} != altered horizon {bound.horizon}"
        )
    recording = ResourceProfile(bound.horizon, recording.breakpoints, recording.values)
    for a, _, (rec, lim) in refine(recording, bound):
        for name, got, cap in zip("SVW", (rec.space, rec.vdf, rec.work), (lim.space, lim.vdf, lim.work)):
            for j, (x, y) in enumerate(zip(got, cap)):
                if x > y * (1 + rtol):
                    raise RecordingViolation(
                        f"{name}{j + 1} recorded {x} exceeds bound {y} at altered time {a}"
                    )
    return ChainProfile(
        recording.horizon, recording.breakpoints, recording.values, provenance="adversarial"
    )


def chain_weight(expr: WeightExpr, chain: ResourceProfile) -> float:
    """Integral of the weight function over the chain (exact for step profiles)."""
    return float(sum(expr(v) * (b - a) for a, b, v in chain.segments()))


def weight_rates(expr: WeightExpr, chain: ResourceProfile) -> list[tuple[float, float, float]]:
    """Per-segment ``(start, end, weight per unit time)``."""
    return [(a, b, expr(v)) for a, b, v in chain.segments()]


@dataclass(frozen=True)
class PreconditionReport:
    dominated: bool  # adversary weight <= honest weight everywhere
    strict_interval: Optional[tuple[float, float]]
    violations: tuple[tuple[float, float, float, float], ...] = ()  # (start, end, adv, honest)

    @property
    def ok(self) -> bool:
        return self.dominated and self.strict_interval is not None


def check_preconditions(
    expr: WeightExpr,
    honest: ResourceProfile,
    adversary: ResourceProfile,
    min_strict_fraction: float = 1e-6,
) -> PreconditionReport:
    """Adversary weight never above honest weight, and strictly below on some interval.

    The reported strict interval is the longest run of strictly dominated
    segments; it must be at least ``min_strict_fraction`` of the horizon.
    """
    if honest.dims != adversary.dims:
        raise ValueError("honest and adversary profiles have different dimensions")
    violations = []
    runs, current = [], None
    for a, b, (h, adv) in refine(honest, adversary):
        gh, ga = expr(h), expr(adv)
        if ga > gh:
            violations.append((a, b, ga, gh))
        if ga < gh:
            current = (current[0], b) if current and current[1] == a else (a, b)
            runs.append(current)
        else:
            current = None
    strict = max(runs, key=lambda r: r[1] - r[0]) if runs else None
    if strict and strict[1] - strict[0] < min_strict_fraction * honest.horizon:
        strict = None
    return PreconditionReport(not violations, strict, tuple(violations))
