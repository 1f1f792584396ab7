"""
Weight functions as expression trees.

Trees are built from resource variables (``S1``, ``V2``, ``W1`` ...), positive
constants, sums, products, non-negative powers, minima, maxima and scalar
multiples.  Every node kind is monotone and maps positive inputs to positive
outputs, so any tree is monotone by construction.  Homogeneity in the timed
resources is tracked structurally as a degree and confirmed by sampling.

The same trees evaluate on a single :class:`ResourcePoint` or on whole numpy
batches, which is what the samplers use.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Optional, Sequence

import numpy as np

from .resources import ResourcePoint

KINDS = ("S", "V", "W")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class DimensionError(ValueError):
    """Point has fewer resource components than the expression references."""


class VacuousWeightError(ValueError):
    """Constant weight functions are vacuously secure and cannot be classified."""


class WeightExpr:
    """Base class for weight-function nodes."""

    children: tuple["WeightExpr", ...] = ()

    # structural properties -------------------------------------------------
    def requires(self) -> tuple[int, int, int]:
        dims = [0, 0, 0]
        for c in self.children:
            dims = [max(a, b) for a, b in zip(dims, c.requires())]
        return tuple(dims)

    @property
    def is_constant(self) -> bool:
        return all(c.is_constant for c in self.children)

    @property
    def symbolic_monotone(self) -> bool:
        return all(c.symbolic_monotone for c in self.children)

    def timed_degree(self) -> Optional[float]:
        """Degree of positive homogeneity in (V, W), or None if not homogeneous."""
        raise NotImplementedError

    # evaluation ------------------------------------------------------------
    def _ev(self, s, v, w):
        raise NotImplementedError

    def evaluate(self, point: ResourcePoint) -> float:
        need = self.requires()
        if any(n > have for n, have in zip(need, point.dims)):
            raise DimensionError(f"expression needs dims {need}, point has {point.dims}")
        return float(self._ev(point.space, point.vdf, point.work))

    __call__ = evaluate

    def evaluate_batch(self, space: np.ndarray, vdf: np.ndarray, work: np.ndarray) -> np.ndarray:
        """Evaluate on ``n`` points at once; each argument has shape ``(n, k)``."""
        s = [space[:, i] for i in range(space.shape[1])]
        v = [vdf[:, i] for i in range(vdf.shape[1])]
        w = [work[:, i] for i in range(work.shape[1])]
        n = space.shape[0]
        return np.broadcast_to(np.asarray(self._ev(s, v, w), dtype=float), (n,))

    # building --------------------------------------------------------------
    def __add__(self, other):
        return Sum((self, _lift(other)))

    def __radd__(self, other):
        return Sum((_lift(other), self))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Scale(float(other), self)
        return Product((self, _lift(other)))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Scale(float(other), self)
        return Product((_lift(other), self))

    def __pow__(self, exponent):
        return Power(self, float(exponent))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


def _lift(x) -> WeightExpr:
    if isinstance(x, WeightExpr):
        return x
    return Const(float(x))


def _same_degree(children) -> Optional[float]:
    degs = [c.timed_degree() for c in children]
    if any(d is None for d in degs):
        return None
    if all(math.isclose(d, degs[0], rel_tol=1e-12, abs_tol=1e-12) for d in degs):
        return degs[0]
    return None


@dataclass(frozen=True, repr=False, eq=True)
class Var(WeightExpr):
    kind: str
    index: int  # 1-based, as written in the DSL

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown resource kind {self.kind!r}")
        if self.index < 1:
            raise ValueError("variable indices start at 1")

    def requires(self):
        dims = [0, 0, 0]
        dims[KINDS.index(self.kind)] = self.index
        return tuple(dims)

    @property
    def is_constant(self):
        return False

    def timed_degree(self):
        return 0.0 if self.kind == "S" else 1.0

    def _ev(self, s, v, w):
        return (s, v, w)[KINDS.index(self.kind)][self.index - 1]

    def __str__(self):
        return f"{self.kind}{self.index}"


@dataclass(frozen=True, repr=False)
class Const(WeightExpr):
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"constants must be positive, got {self.value}")

    @property
    def is_constant(self):
        return True

    def timed_degree(self):
        return 0.0

    def _ev(self, s, v, w):
        return self.value

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True, repr=False)
class Sum(WeightExpr):
    children: tuple[WeightExpr, ...]

    def timed_degree(self):
        return _same_degree(self.children)

    def _ev(self, s, v, w):
        return reduce(lambda a, b: a + b, (c._ev(s, v, w) for c in self.children))

    def __str__(self):
        return " + ".join(str(c) for c in self.children)


@dataclass(frozen=True, repr=False)
class Product(WeightExpr):
    children: tuple[WeightExpr, ...]

    def timed_degree(self):
        degs = [c.timed_degree() for c in self.children]
        return None if any(d is None for d in degs) else float(sum(degs))

    def _ev(self, s, v, w):
        return reduce(lambda a, b: a * b, (c._ev(s, v, w) for c in self.children))

    def __str__(self):
        return " * ".join(f"({c})" if isinstance(c, Sum) else str(c) for c in self.children)


@dataclass(frozen=True, repr=False)
class Power(WeightExpr):
    base: WeightExpr
    exponent: float

    def __post_init__(self):
        if not self.exponent >= 0:
            raise ValueError("power exponents must be >= 0")

    @property
    def children(self):
        return (self.base,)

    @property
    def is_constant(self):
        return self.exponent == 0 or self.base.is_constant

    def timed_degree(self):
        d = self.base.timed_degree()
        return None if d is None else d * self.exponent

    def _ev(self, s, v, w):
        return self.base._ev(s, v, w) ** self.exponent

    def __str__(self):
        return f"pow({self.base}, {self.exponent!r})"


@dataclass(frozen=True, repr=False)
class Min(WeightExpr):
    children: tuple[WeightExpr, ...]

    def timed_degree(self):
        return _same_degree(self.children)

    def _ev(self, s, v, w):
        return reduce(np.minimum, (c._ev(s, v, w) for c in self.children))

    def __str__(self):
        return "min(" + ", ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True, repr=False)
class Max(WeightExpr):
    children: tuple[WeightExpr, ...]

    def timed_degree(self):
        return _same_degree(self.children)

    def _ev(self, s, v, w):
        return reduce(np.maximum, (c._ev(s, v, w) for c in self.children))

    def __str__(self):
        return "max(" + ", ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True, repr=False)
class Scale(WeightExpr):
    factor: float
    expr: WeightExpr

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError("scalar multiples must be positive")

    @property
    def children(self):
        return (self.expr,)

    def timed_degree(self):
        return self.expr.timed_degree()

    def _ev(self, s, v, w):
        return self.factor * self.expr._ev(s, v, w)

    def __str__(self):
        inner = f"({self.expr})" if isinstance(self.expr, Sum) else str(self.expr)
        return f"{self.factor!r} * {inner}"


@dataclass(frozen=True, repr=False, eq=False)
class FunctionWeight(WeightExpr):
    """Escape hatch for weight functions outside the algebra.

    ``fn(space, vdf, work)`` receives three tuples of floats.  Nothing is known
    about it structurally, so every property is decided by sampling.
    """

    fn: Callable[[tuple, tuple, tuple], float]
    dims: tuple[int, int, int]
    name: str = "custom"

    def requires(self):
        return tuple(self.dims)

    @property
    def is_constant(self):
        return False

    @property
    def symbolic_monotone(self):
        return False

    def timed_degree(self):
        return None

    def _ev(self, s, v, w):
        if s and isinstance(s[0], np.ndarray) or v and isinstance(v[0], np.ndarray) or (
            w and isinstance(w[0], np.ndarray)
        ):
            n = len((s or v or w)[0])
            return np.array(
                [
                    self.fn(
                        tuple(float(x[i]) for x in s),
                        tuple(float(x[i]) for x in v),
                        tuple(float(x[i]) for x in w),
                    )
                    for i in range(n)
                ]
            )
        return self.fn(tuple(s), tuple(v), tuple(w))

    def __str__(self):
        return self.name


def S(i: int = 1) -> Var:
    return Var("S", i)


def V(i: int = 1) -> Var:
    return Var("V", i)


def W(i: int = 1) -> Var:
    return Var("W", i)


# --------------------------------------------------------------------------
# DSL

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<var>[SVW][1-9][0-9]*)(?![A-Za-z0-9_])"
    r"|(?P<func>min|max|pow)\s*\("
    r"|(?P<op>[+*(),])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text[pos:]) - len(text[pos:].lstrip()) + pos
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "ident":
            raise ParseError(f"unknown identifier {m.group(kind)!r}", start)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        terms = [self.term()]
        while self.peek()[1] == "+":
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.peek()[1] == "*":
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def number(self, allow_zero=False):
        kind, text, pos = self.take("num")
        value = float(text)
        if value < 0 or (value == 0 and not allow_zero):
            raise ParseError(f"non-positive literal {text}", pos)
        return value

    def factor(self):
        kind, text, pos = self.peek()
        if kind == "num":
            return Const(self.number())
        if kind == "var":
            self.take()
            return Var(text[0], int(text[1:]))
        if kind == "func":
            self.take()
            if text == "pow":
                base = self.expr()
                self.take("op", ",")
                exponent = self.number(allow_zero=True)
                self.take("op", ")")
                return Power(base, exponent)
            args = [self.expr()]
            self.take("op", ",")
            args.append(self.expr())
            while self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
            self.take("op", ")")
            return (Min if text == "min" else Max)(tuple(args))
        if text == "(":
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse(text: str) -> WeightExpr:
    """Parse the weight DSL, e.g. ``"pow(W1, 0.5) * pow(W2, 0.5)"``."""
    p = _Parser(text)
    tree = p.expr()
    p.take("end")
    return tree


# --------------------------------------------------------------------------
# property checks


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    samples: int = 2048
    lo: float = 2**-4
    hi: float = 2**4
    alpha_lo: float = 1 / 8
    alpha_hi: float = 8.0
    alpha_grid: tuple[float, ...] = (2.0, 0.5, 4.0, 0.25)
    space_alpha_hi: float = 8.0
    space_alpha_grid: tuple[float, ...] = (2.0, 4.0, 8.0)
    tolerance: float = 1e-9
    # checked before any random draw, in order
    extra_points: tuple[ResourcePoint, ...] = ()

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class MonotoneViolation:
    lower: ResourcePoint
    upper: ResourcePoint
    lower_value: float
    upper_value: float

    def replay(self, expr: WeightExpr) -> float:
        """Amount by which the smaller point outweighs the larger one."""
        return expr(self.lower) - expr(self.upper)


@dataclass(frozen=True)
class HomogeneityViolation:
    point: ResourcePoint
    alpha: float
    beta: float

    def replay(self, expr: WeightExpr) -> float:
        return homogeneity_defect(expr, self.point, self.alpha)


@dataclass(frozen=True)
class SubhomogeneityViolation:
    point: ResourcePoint
    alpha: float
    excess: float

    def replay(self, expr: WeightExpr) -> float:
        return expr(self.point.scale_space(self.alpha)) - self.alpha * expr(self.point)


@dataclass(frozen=True)
class PropertyReport:
    property: str
    holds: bool
    witness: object = None
    samples_checked: int = 0
    symbolic: bool = False

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError("a failed property must carry a witness")


def homogeneity_defect(expr: WeightExpr, point: ResourcePoint, alpha: float) -> float:
    """``Γ(s, αv, αw) − α·Γ(s, v, w)``; zero for every α iff homogeneous."""
    return expr(point.scale_timed(alpha)) - alpha * expr(point)


def _random_batch(rng, dims, n, lo, hi):
    k = sum(dims)
    flat = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(n, k)))
    return _split(flat, dims)


def _split(flat, dims):
    k1, k2, _ = dims
    return flat[:, :k1], flat[:, k1 : k1 + k2], flat[:, k1 + k2 :]


def _candidate_points(expr, sampler, rng, n):
    """Ones-vector first, then user-supplied points, then log-uniform draws."""
    dims = expr.requires()
    k = sum(dims)
    fixed = [np.ones(k)]
    fixed += [np.array(p.flat()) for p in sampler.extra_points if p.dims == dims]
    s, v, w = _random_batch(rng, dims, n, sampler.lo, sampler.hi)
    flat = np.vstack([np.array(fixed).reshape(len(fixed), k), np.hstack([s, v, w])])
    return _split(flat, dims)


def check_monotone(expr: WeightExpr, sampler: SamplerConfig = SamplerConfig()) -> PropertyReport:
    if expr.symbolic_monotone:
        return PropertyReport("monotone", True, symbolic=True)
    witness, checked = _sample_monotone(expr, sampler)
    return PropertyReport("monotone", witness is None, witness, checked, symbolic=False)


def _sample_monotone(expr, sampler):
    dims = expr.requires()
    tol = sampler.tolerance
    # explicit points: every comparable ordered pair
    pts = [p for p in sampler.extra_points if p.dims == dims]
    checked = 0
    for a in pts:
        for b in pts:
            if a is b or not a <= b:
                continue
            checked += 1
            fa, fb = expr(a), expr(b)
            if fa > fb + tol * max(1.0, abs(fb)):
                return MonotoneViolation(a, b, fa, fb), checked
    rng = sampler.rng()
    n = sampler.samples
    s, v, w = _random_batch(rng, dims, n, sampler.lo, sampler.hi)
    lower = np.hstack([s, v, w])
    # raise a random subset of coordinates so some pairs differ in one place only
    bump = np.exp(rng.uniform(0, np.log(4), size=lower.shape))
    mask = rng.random(lower.shape) < 0.5
    upper = np.where(mask, lower * bump, lower)
    fl = expr.evaluate_batch(*_split(lower, dims))
    fu = expr.evaluate_batch(*_split(upper, dims))
    bad = np.nonzero(fl > fu + tol * np.maximum(1.0, np.abs(fu)))[0]
    checked += n
    if len(bad):
        i = bad[0]
        a, b = _row(lower[i], dims), _row(upper[i], dims)
        return MonotoneViolation(a, b, float(fl[i]), float(fu[i])), checked
    return None, checked


def _row(flat, dims) -> ResourcePoint:
    k1, k2, _ = dims
    flat = [float(x) for x in flat]
    return ResourcePoint(flat[:k1], flat[k1 : k1 + k2], flat[k1 + k2 :])


def _first_homogeneity_violation(expr, sampler):
    """Scan (point, α) pairs in a fixed order; return the first violation."""
    dims = expr.requires()
    rng = sampler.rng()
    s, v, w = _candidate_points(expr, sampler, rng, sampler.samples)
    n = s.shape[0]
    rand_alpha = np.exp(rng.uniform(np.log(sampler.alpha_lo), np.log(sampler.alpha_hi), size=n))
    base = expr.evaluate_batch(s, v, w)
    columns = [np.full(n, a) for a in sampler.alpha_grid] + [rand_alpha]
    # results[j][i]: defect of point i at alpha column j
    hits = []
    for alphas in columns:
        scaled = expr.evaluate_batch(s, v * alphas[:, None], w * alphas[:, None])
        beta = scaled - alphas * base
        bad = np.abs(beta) > sampler.tolerance * alphas * base
        hits.append((alphas, beta, bad))
    checked = n * len(columns)
    for i in range(n):
        for alphas, beta, bad in hits:
            if bad[i]:
                point = _row(np.concatenate([s[i], v[i], w[i]]), dims)
                return HomogeneityViolation(point, float(alphas[i]), float(beta[i])), checked
    return None, checked


def check_homogeneous_timed(
    expr: WeightExpr, sampler: SamplerConfig = SamplerConfig()
) -> PropertyReport:
    """Sampled check of ``Γ(s, αv, αw) = α·Γ(s, v, w)``.

    ``symbolic`` is set when the structural degree certifies degree one and
    the sample agrees.
    """
    witness, checked = _first_homogeneity_violation(expr, sampler)
    holds = witness is None
    deg = expr.timed_degree()
    certified = holds and deg is not None and math.isclose(deg, 1.0, rel_tol=1e-12)
    return PropertyReport("homogeneous_timed", holds, witness, checked, symbolic=certified)


def check_subhomogeneous_space(
    expr: WeightExpr, sampler: SamplerConfig = SamplerConfig()
) -> PropertyReport:
    """Sampled check of ``Γ(αs, v, w) ≤ α·Γ(s, v, w)`` for ``α ≥ 1``."""
    dims = expr.requires()
    rng = sampler.rng()
    s, v, w = _candidate_points(expr, sampler, rng, sampler.samples)
    n = s.shape[0]
    base = expr.evaluate_batch(s, v, w)
    columns = [np.full(n, a) for a in sampler.space_alpha_grid]
    columns.append(np.exp(rng.uniform(0, np.log(sampler.space_alpha_hi), size=n)))
    excesses = []
    for alphas in columns:
        scaled = expr.evaluate_batch(s * alphas[:, None], v, w)
        excess = scaled - alphas * base
        excesses.append((alphas, excess, excess > sampler.tolerance * alphas * base))
    for i in range(n):
        for alphas, excess, bad in excesses:
            if bad[i]:
                point = _row(np.concatenate([s[i], v[i], w[i]]), dims)
                wit = SubhomogeneityViolation(point, float(alphas[i]), float(excess[i]))
                return PropertyReport("subhomogeneous_space", False, wit, n * len(columns))
    return PropertyReport("subhomogeneous_space", True, None, n * len(columns))


@dataclass(frozen=True)
class Classification:
    continuous_secure: bool
    discrete_sufficient: bool
    reports: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        """True when the secure verdict rests on structure, not only on samples."""
        return all(self.reports[k].symbolic for k in ("monotone", "homogeneous_timed"))

    @property
    def verdict(self) -> str:
        if not self.continuous_secure:
            return "insecure"
        return "secure" if self.certified else "secure (sampled)"


def classify(expr: WeightExpr, sampler: SamplerConfig = SamplerConfig()) -> Classification:
    if expr.is_constant:
        raise VacuousWeightError(f"{expr} is constant; a constant weight is vacuously secure")
    reports = {
        "monotone": check_monotone(expr, sampler),
        "homogeneous_timed": check_homogeneous_timed(expr, sampler),
        "subhomogeneous_space": check_subhomogeneous_space(expr, sampler),
    }
    cont = reports["monotone"].holds and reports["homogeneous_timed"].holds
    disc = cont and reports["subhomogeneous_space"].holds
    return Classification(cont, disc, reports)
