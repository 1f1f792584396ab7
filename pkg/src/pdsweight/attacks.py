"""
Explicit private double-spending attacks against insecure weight functions.

Two families:

* non-monotone weights: the adversary holds strictly more resources but
  records the smaller point, so its chain ties the honest one;
* weights that are not homogeneous in (V, W): a witness ``(s, v, w, alpha)``
  with ``Γ(s, αv, αw) = αΓ(s, v, w) + β`` and ``β > 0`` falls into one of the
  cases 1b (squeeze), 1c (stretch) or 1d (stretch at equal weight, which needs
  a second point of different weight).  Case 1a cannot occur for monotone
  weights.

Each construction picks ``T1 = 1`` and the smallest ``T0`` for which the
adversarial chain is at least as heavy as the honest one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .continuous import (
    PreconditionReport,
    TimeWarp,
    adversarial_chain,
    chain_weight,
    check_preconditions,
)
from .resources import ResourcePoint, ResourceProfile
from .weights import (
    SamplerConfig,
    WeightExpr,
    _first_homogeneity_violation,
    _sample_monotone,
)

CASES = ("1b", "1c", "1d", "1d-A", "1d-B", "non-monotone")


class InconclusiveAttack(RuntimeError):
    """No attack could be built from the sampled evidence."""


class SecureWeightError(ValueError):
    """Raised when asked to attack a weight function with no witness."""


@dataclass(frozen=True)
class HomogeneityWitness:
    point: ResourcePoint
    alpha: float
    beta: float
    case_tag: str
    second_point: Optional[ResourcePoint] = None
    delta: Optional[float] = None

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("witnesses are normalized to beta > 0")
        if self.alpha == 1:
            raise ValueError("alpha = 1 cannot witness non-homogeneity")
        if self.case_tag not in ("1b", "1c", "1d", "1d-A", "1d-B"):
            raise ValueError(f"bad case tag {self.case_tag!r}")


@dataclass(frozen=True)
class AttackScenario:
    honest: ResourceProfile
    adversary: ResourceProfile
    warp: TimeWarp
    t0: float
    t1: float
    case_tag: str
    # explicit under-recording over altered time; None records the maximum allowed
    recording: Optional[ResourceProfile] = None

    @property
    def horizon(self) -> float:
        return self.t0 + self.t1

    def to_dict(self) -> dict:
        d = {
            "case": self.case_tag,
            "t0": self.t0,
            "t1": self.t1,
            "profiles": {"honest": self.honest.to_dict(), "adversary": self.adversary.to_dict()},
            "warps": {"adversary": self.warp.to_dict()},
        }
        if self.recording is not None:
            d["recording"] = self.recording.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AttackScenario":
        rec = d.get("recording")
        return cls(
            honest=ResourceProfile.from_dict(d["profiles"]["honest"]),
            adversary=ResourceProfile.from_dict(d["profiles"]["adversary"]),
            warp=TimeWarp.from_dict(d["warps"]["adversary"]),
            t0=d["t0"],
            t1=d["t1"],
            case_tag=d["case"],
            recording=ResourceProfile.from_dict(rec) if rec else None,
        )


@dataclass(frozen=True)
class AttackOutcome:
    honest_weight: float
    adversarial_weight: float
    success: bool
    preconditions_ok: bool
    preconditions: Optional[PreconditionReport] = None

    def to_dict(self) -> dict:
        return {
            "honest_weight": self.honest_weight,
            "adversarial_weight": self.adversarial_weight,
            "success": self.success,
            "preconditions_ok": self.preconditions_ok,
        }


def _assign_case(expr: WeightExpr, point, alpha, beta) -> str:
    g = expr(point)
    g_alpha = expr(point.scale_timed(alpha))
    if alpha > 1:
        if g_alpha <= g:
            raise RuntimeError(
                f"case 1a at {point} alpha={alpha}: impossible for a monotone weight function"
            )
        return "1b"
    if g_alpha > g:
        raise RuntimeError(
            f"stretching by alpha={alpha} raised the weight at {point}: the weight is not monotone"
        )
    return "1c" if g_alpha < g else "1d"


def _second_point(expr, point, sampler, attempts=2**14, lo=2**-6, hi=2**6):
    """Any point whose weight differs from ``point``'s."""
    g = expr(point)
    for cand in (point.scaled(2.0), point.scaled(0.5)):
        if expr(cand) != g:
            return cand
    rng = np.random.default_rng(sampler.seed + 1)
    dims = point.dims
    k = sum(dims)
    flat = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(attempts, k)))
    k1, k2, _ = dims
    vals = expr.evaluate_batch(flat[:, :k1], flat[:, k1 : k1 + k2], flat[:, k1 + k2 :])
    idx = np.nonzero(vals != g)[0]
    if not len(idx):
        return None
    row = [float(x) for x in flat[idx[0]]]
    return ResourcePoint(row[:k1], row[k1 : k1 + k2], row[k1 + k2 :])


def normalize_witness(
    expr: WeightExpr,
    point: ResourcePoint,
    alpha: float,
    sampler: SamplerConfig = SamplerConfig(),
) -> HomogeneityWitness:
    """Turn any ``(point, alpha)`` with non-zero defect into a case-tagged witness.

    A negative defect is flipped by moving to ``(s, αv, αw)`` with ``1/α``.
    """
    beta = expr(point.scale_timed(alpha)) - alpha * expr(point)
    if beta == 0:
        raise ValueError("no homogeneity defect at this point")
    if beta < 0:
        point = point.scale_timed(alpha)
        alpha = 1.0 / alpha
        beta = expr(point.scale_timed(alpha)) - alpha * expr(point)
    case = _assign_case(expr, point, alpha, beta)
    if case != "1d":
        return HomogeneityWitness(point, alpha, beta, case)
    other = _second_point(expr, point, sampler)
    if other is None:
        return HomogeneityWitness(point, alpha, beta, "1d")
    g, g2 = expr(point), expr(other)
    return HomogeneityWitness(
        point, alpha, beta, "1d-A" if g2 > g else "1d-B", other, abs(g2 - g)
    )


def find_homogeneity_witness(
    expr: WeightExpr, sampler: SamplerConfig = SamplerConfig()
) -> Optional[HomogeneityWitness]:
    violation, _ = _first_homogeneity_violation(expr, sampler)
    if violation is None:
        return None
    return normalize_witness(expr, violation.point, violation.alpha, sampler)


def find_nonmonotone_witness(
    expr: WeightExpr, sampler: SamplerConfig = SamplerConfig()
) -> Optional[tuple[ResourcePoint, ResourcePoint]]:
    """``(smaller, larger)`` with the smaller point weighing more, or None."""
    if expr.symbolic_monotone:
        return None
    violation, _ = _sample_monotone(expr, sampler)
    if violation is None:
        return None
    return violation.lower, violation.upper


def _steps(horizon, *segments):
    return ResourceProfile.from_segments(segments, horizon)


def synthesize_attack(
    expr: WeightExpr,
    witness: Union[HomogeneityWitness, tuple[ResourcePoint, ResourcePoint]],
    slack: float = 0.0,
) -> AttackScenario:
    """Build the honest/adversary profiles and warp for the witness's case.

    ``slack`` inflates ``T0`` relatively above its lower bound; at zero the
    construction is a tie, which already counts as a successful attack.
    """
    t1 = 1.0
    if isinstance(witness, tuple):
        small, large = witness
        t0 = 1.0
        T = t0 + t1
        return AttackScenario(
            honest=ResourceProfile.constant(small, T),
            adversary=ResourceProfile.constant(large, T),
            warp=TimeWarp.identity(T),
            t0=t0,
            t1=t1,
            case_tag="non-monotone",
            recording=ResourceProfile.constant(small, T),
        )

    p, a, beta = witness.point, witness.alpha, witness.beta
    p_a = p.scale_timed(a)
    g, g_a = expr(p), expr(p_a)
    case = witness.case_tag

    if case == "1b":
        t0 = (a - 1) / beta * g_a * (1 + slack)
        T = t0 + t1
        return AttackScenario(
            honest=_steps(T, (0.0, p), (t0, p_a)),
            adversary=ResourceProfile.constant(p, T),
            warp=TimeWarp.constant(a, T),
            t0=t0,
            t1=t1,
            case_tag=case,
        )

    if case == "1c":
        bound = a / beta * ((1 - a) * g - beta)
        # any positive T0 works once the bound is non-positive
        t0 = bound * (1 + slack) if bound > 0 else 1.0
        T = t0 + t1
        return AttackScenario(
            honest=ResourceProfile.constant(p, T),
            adversary=_steps(T, (0.0, p), (t0, p_a)),
            warp=TimeWarp(T, (0.0, t0), (a, 1.0)),
            t0=t0,
            t1=t1,
            case_tag=case,
        )

    if case in ("1d-A", "1d-B"):
        t0 = witness.delta / (g * (1 / a - 1)) * (1 + slack)
        T = t0 + t1
        q = witness.second_point
        if case == "1d-A":
            honest, adversary = _steps(T, (0.0, p), (t0, q)), ResourceProfile.constant(p, T)
        else:
            honest, adversary = ResourceProfile.constant(p, T), _steps(T, (0.0, p), (t0, q))
        return AttackScenario(
            honest=honest,
            adversary=adversary,
            warp=TimeWarp(T, (0.0, t0), (a, 1.0)),
            t0=t0,
            t1=t1,
            case_tag=case,
        )

    raise InconclusiveAttack(
        "case 1d needs a second point of different weight and none was found; "
        "the weight may be constant on the sampled region"
    )


def run_attack(
    expr: WeightExpr, scenario: AttackScenario, rtol: float = 1e-9
) -> AttackOutcome:
    """Weigh both chains.  A tie counts as success: honest must be strictly heavier."""
    honest = chain_weight(expr, scenario.honest)
    chain = adversarial_chain(scenario.adversary, scenario.warp, scenario.recording)
    adv = chain_weight(expr, chain)
    pre = check_preconditions(expr, scenario.honest, scenario.adversary)
    success = adv >= honest - rtol * max(1.0, abs(honest))
    return AttackOutcome(honest, adv, success, pre.ok, pre)


def plan_attack(expr: WeightExpr, sampler: SamplerConfig = SamplerConfig()) -> AttackScenario:
    """Find a witness (non-monotonicity first) and build the matching attack."""
    pair = find_nonmonotone_witness(expr, sampler)
    if pair is not None:
        return synthesize_attack(expr, pair)
    witness = find_homogeneity_witness(expr, sampler)
    if witness is None:
        raise SecureWeightError(f"{expr} is monotone and homogeneous in (V, W); no attack exists")
    return synthesize_attack(expr, witness)
