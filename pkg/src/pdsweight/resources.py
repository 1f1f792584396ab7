"""
Piecewise-constant resource profiles.

A profile holds the space ``S``, sequential-work ``V`` and parallel-work ``W``
vectors available over ``[0, T]``.  Values are right-continuous steps, so every
integral is a finite sum and exact up to float rounding.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

MIN_VALUE = 1e-12


class DomainError(ValueError):
    """Raised when a time or interval lies outside a profile's horizon."""


def _as_vector(x, name: str) -> tuple[float, ...]:
    if x is None:
        return ()
    if np.isscalar(x):
        x = (x,)
    vec = tuple(float(v) for v in x)
    for v in vec:
        if not v >= MIN_VALUE:
            raise ValueError(f"{name} components must be >= {MIN_VALUE}, got {v!r}")
    return vec


@dataclass(frozen=True)
class ResourcePoint:
    """Resource vector at one instant.  Scalars are promoted to 1-vectors."""

    space: tuple[float, ...] = ()
    vdf: tuple[float, ...] = ()
    work: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "space", _as_vector(self.space, "space"))
        object.__setattr__(self, "vdf", _as_vector(self.vdf, "vdf"))
        object.__setattr__(self, "work", _as_vector(self.work, "work"))

    @classmethod
    def of(cls, S=None, V=None, W=None) -> "ResourcePoint":
        return cls(space=S, vdf=V, work=W)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (len(self.space), len(self.vdf), len(self.work))

    def scale_timed(self, factor: float) -> "ResourcePoint":
        """Multiply the timed resources (V and W) by ``factor``; S is left alone."""
        return ResourcePoint(
            self.space,
            tuple(factor * v for v in self.vdf),
            tuple(factor * w for w in self.work),
        )

    def scale_space(self, factor: float) -> "ResourcePoint":
        return ResourcePoint(tuple(factor * s for s in self.space), self.vdf, self.work)

    def scaled(self, factor: float) -> "ResourcePoint":
        return self.scale_space(factor).scale_timed(factor)

    def flat(self) -> tuple[float, ...]:
        return self.space + self.vdf + self.work

    def __le__(self, other: "ResourcePoint") -> bool:
        if self.dims != other.dims:
            raise ValueError("cannot compare points of different dimensions")
        return all(a <= b for a, b in zip(self.flat(), other.flat()))

    def to_dict(self) -> dict:
        return {"S": list(self.space), "V": list(self.vdf), "W": list(self.work)}

    @classmethod
    def from_dict(cls, d: dict) -> "ResourcePoint":
        return cls(d.get("S", ()), d.get("V", ()), d.get("W", ()))


@dataclass(frozen=True)
class ResourceProfile:
    """Right-continuous step function on ``[0, horizon]``.

    ``breakpoints[i]`` is where ``values[i]`` starts; it holds until the next
    breakpoint (or the horizon, inclusive, for the last segment).
    """

    horizon: float
    breakpoints: tuple[float, ...]
    values: tuple[ResourcePoint, ...]

    def __post_init__(self) -> None:
        bps = tuple(float(b) for b in self.breakpoints)
        vals = tuple(self.values)
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not bps or len(bps) != len(vals):
            raise ValueError("need one value per breakpoint and at least one segment")
        if bps[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if bps[-1] >= self.horizon:
            raise ValueError("breakpoints must lie below the horizon")
        dims = vals[0].dims
        if any(v.dims != dims for v in vals):
            raise ValueError("all segment values must share dimensions")

    @classmethod
    def constant(cls, point: ResourcePoint, horizon: float) -> "ResourceProfile":
        return cls(horizon, (0.0,), (point,))

    @classmethod
    def from_segments(
        cls, segments: Iterable[tuple[float, ResourcePoint]], horizon: float
    ) -> "ResourceProfile":
        bps, vals = zip(*segments)
        return cls(horizon, bps, vals)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.values[0].dims

    def segments(self) -> list[tuple[float, float, ResourcePoint]]:
        """``(start, end, value)`` triples covering ``[0, horizon]``."""
        ends = self.breakpoints[1:] + (self.horizon,)
        return list(zip(self.breakpoints, ends, self.values))

    def map_values(self, fn) -> "ResourceProfile":
        return replace(self, values=tuple(fn(v) for v in self.values))

    def scale_timed(self, factor: float) -> "ResourceProfile":
        return self.map_values(lambda p: p.scale_timed(factor))

    def scaled(self, factor: float) -> "ResourceProfile":
        return self.map_values(lambda p: p.scaled(factor))

    def evaluate(self, t: float) -> ResourcePoint:
        return evaluate(self, t)

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "segments": [{"t": b, **v.to_dict()} for b, v in zip(self.breakpoints, self.values)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResourceProfile":
        segs = d["segments"]
        return cls(
            d["horizon"],
            tuple(s["t"] for s in segs),
            tuple(ResourcePoint.from_dict(s) for s in segs),
        )


def _check_interval(profile: ResourceProfile, a: float, b: float) -> None:
    if not a < b:
        raise DomainError(f"empty interval: a={a} must be < b={b}")
    if a < 0 or b > profile.horizon:
        raise DomainError(f"interval ({a}, {b}) outside [0, {profile.horizon}]")


def evaluate(profile: ResourceProfile, t: float) -> ResourcePoint:
    """Value of the profile at time ``t`` (right-continuous)."""
    if not 0 <= t <= profile.horizon:
        raise DomainError(f"t={t} outside [0, {profile.horizon}]")
    i = bisect.bisect_right(profile.breakpoints, t) - 1
    return profile.values[i]


def _overlaps(profile: ResourceProfile, a: float, b: float):
    for start, end, value in profile.segments():
        lo, hi = max(start, a), min(end, b)
        if lo < hi:
            yield lo, hi, value


def integrate_timed(
    profile: ResourceProfile, a: float, b: float
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Exact integrals of V and W over ``[a, b]``."""
    _check_interval(profile, a, b)
    k1, k2, k3 = profile.dims
    vdf = [0.0] * k2
    work = [0.0] * k3
    for lo, hi, value in _overlaps(profile, a, b):
        dt = hi - lo
        for j, v in enumerate(value.vdf):
            vdf[j] += v * dt
        for j, w in enumerate(value.work):
            work[j] += w * dt
    return tuple(vdf), tuple(work)


def extrema(profile: ResourceProfile, a: float, b: float) -> tuple[ResourcePoint, ResourcePoint]:
    """Componentwise inf and sup of every resource over the open interval ``(a, b)``."""
    _check_interval(profile, a, b)
    vals = [flat for _, _, v in _overlaps(profile, a, b) for flat in [v.flat()]]
    arr = np.array(vals)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    return _unflatten(lo, profile.dims), _unflatten(hi, profile.dims)


def _unflatten(flat, dims) -> ResourcePoint:
    k1, k2, _ = dims
    flat = [float(x) for x in flat]
    return ResourcePoint(flat[:k1], flat[k1 : k1 + k2], flat[k1 + k2 :])


def space_extrema(
    profile: ResourceProfile, a: float, b: float
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    lo, hi = extrema(profile, a, b)
    return lo.space, hi.space


def common_breakpoints(*profiles: ResourceProfile) -> list[float]:
    """Sorted union of the profiles' breakpoints.  Horizons must agree."""
    horizons = {p.horizon for p in profiles}
    if len(horizons) != 1:
        raise ValueError(f"profiles have different horizons: {sorted(horizons)}")
    return sorted({b for p in profiles for b in p.breakpoints})


def refine(*profiles: ResourceProfile) -> list[tuple[float, float, list[ResourcePoint]]]:
    """Common refinement: ``(start, end, [value of each profile])`` pieces."""
    bps = common_breakpoints(*profiles)
    ends = bps[1:] + [profiles[0].horizon]
    return [(a, b, [evaluate(p, a) for p in profiles]) for a, b in zip(bps, ends)]


def riemann_timed(profile: ResourceProfile, a: float, b: float, step: float = 1e-4):
    """Midpoint Riemann sum of V and W over ``[a, b]``.

    Brute-force cross-check for :func:`integrate_timed`; it samples the profile
    pointwise and never looks at segment boundaries.
    """
    n = int(np.ceil((b - a) / step))
    h = (b - a) / n
    ts = a + h * (np.arange(n) + 0.5)
    idx = np.searchsorted(np.asarray(profile.breakpoints), ts, side="right") - 1
    table = np.array([v.flat() for v in profile.values])
    totals = table[idx].sum(axis=0) * h
    k1, k2, _ = profile.dims
    return tuple(totals[k1 : k1 + k2]), tuple(totals[k1 + k2 :])


def random_profile(
    rng: np.random.Generator,
    dims: Sequence[int],
    horizon: float,
    n_segments: int,
    lo: float = 2**-4,
    hi: float = 2**4,
) -> ResourceProfile:
    """Random step profile with log-uniform values in ``[lo, hi]``."""
    inner = np.sort(rng.uniform(0, horizon, size=n_segments - 1))
    bps = [0.0]
    for b in inner:
        if b > bps[-1] and b < horizon:
            bps.append(float(b))
    k = sum(dims)
    vals = []
    for _ in bps:
        flat = np.exp(rng.uniform(np.log(lo), np.log(hi), size=k))
        vals.append(_unflatten(flat, dims))
    return ResourceProfile(horizon, tuple(bps), tuple(vals))
