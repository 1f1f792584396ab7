import pytest

from pdsweight import ResourcePoint, ResourceProfile, parse

SECURE = [
    "W1",
    "S1 * V1",
    "pow(W1, 0.5) * pow(W2, 0.5)",
    "min(W1, W2)",
    "0.5 * W1 + 0.5 * W2",
    "pow(W1, 0.3333333333333333) * pow(W2, 0.3333333333333333) * pow(W3, 0.3333333333333333)",
]

INSECURE = ["pow(W1, 2)", "W1 * W2", "S1", "S1 + V1 * W1"]


def point(S=(), V=(), W=()):
    return ResourcePoint(S, V, W)


def steps(horizon, *segments):
    return ResourceProfile.from_segments(segments, horizon)


@pytest.fixture
def space_vdf():
    return parse("S1 * V1")


@pytest.fixture
def squared():
    return parse("pow(W1, 2)")


# weights that are secure in the discrete model (monotone, homogeneous in V/W,
# subhomogeneous in S)
DISCRETE_SECURE = [
    "S1 * V1",
    "W1",
    "pow(W1, 0.5) * pow(W2, 0.5)",
    "min(W1, W2)",
    "pow(S1, 0.5) * V1 + W1",
    "0.5 * W1 + 0.5 * W2",
]


def theorem_instance(rng, text, horizon=None, xi=None, delta=None):
    """Random (expr, honest, adversary, honest chain, adversary chain, delta, xi).

    Both profiles are xi-smooth on every block; the adversary's timed
    resources are scaled down until ``delta * Γ(adv) < Γ(honest)`` everywhere,
    with ``delta = xi ** 4``.
    """
    import numpy as np

    from pdsweight.discrete import (
        adversarial_discretize,
        honest_discretize,
        random_smooth_profile,
    )
    from pdsweight.resources import refine

    e = parse(text)
    dims = e.requires()
    T = float(horizon or rng.integers(2, 7))
    xi = float(rng.uniform(1.0, 1.3)) if xi is None else xi
    delta = xi**4 if delta is None else delta
    honest = random_smooth_profile(rng, dims, T, xi, n_segments=int(rng.integers(2, 9)))
    adversary = random_smooth_profile(rng, dims, T, xi, n_segments=int(rng.integers(2, 9)))
    ratio = min(e(h) / (delta * e(a)) for _, _, (h, a) in refine(honest, adversary))
    c = ratio * float(rng.uniform(0.3, 0.99))
    adversary = adversary.map_values(lambda p: p.scale_timed(c))
    n = int(rng.integers(1, 6))
    cuts = np.sort(rng.uniform(0, T, size=2 * n))
    spans = [(float(a), float(b)) for a, b in zip(cuts[::2], cuts[1::2]) if b - a > 1e-6]
    return (
        e,
        honest,
        adversary,
        honest_discretize(honest),
        adversarial_discretize(adversary, spans),
        delta,
        xi,
    )
