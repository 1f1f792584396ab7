import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdsweight.discrete import (
    Block,
    Blockchain,
    SpaceRecordError,
    adversarial_discretize,
    blockchain_weight,
    chain_to_csv,
    honest_discretize,
    make_block,
    smoothness,
    verify_theorem_chain,
)
from pdsweight.resources import DomainError, ResourceProfile
from pdsweight.weights import parse

from conftest import DISCRETE_SECURE, point, steps, theorem_instance


def test_make_block_examples():
    space_vdf = ResourceProfile.constant(point(S=(1.1,), V=(1.1,)), 6)
    b = make_block(space_vdf, (0, 1), "min")
    assert b.space_recorded == (1.1,) and b.vdf_recorded == pytest.approx((1.1,))
    w = steps(3, (0, point(W=(1,))), (2, point(W=(2,))))
    assert make_block(w, (0, 3)).work_recorded == (4.0,)
    s = steps(2, (0, point(S=(1,))), (1, point(S=(3,))))
    assert make_block(s, (0, 2), "max").space_recorded == (3.0,)


def test_explicit_space_policy():
    s = steps(2, (0, point(S=(1,))), (1, point(S=(3,))))
    assert make_block(s, (0, 2), [2.0]).space_recorded == (2.0,)
    assert make_block(s, (0, 2), [1.0]).space_recorded == (1.0,)
    with pytest.raises(SpaceRecordError):
        make_block(s, (0, 2), [3.0])
    with pytest.raises(SpaceRecordError):
        make_block(s, (0, 2), [0.5])
    c = ResourceProfile.constant(point(S=(2,)), 2)
    assert make_block(c, (0, 1), [2.0]).space_recorded == (2.0,)
    with pytest.raises(SpaceRecordError):
        make_block(c, (0, 1), [1.5])


def test_honest_discretize():
    c = ResourceProfile.constant(point(S=(1.1,), V=(1.1,)), 6)
    chain = honest_discretize(c)
    assert len(chain) == 6
    assert [(b.start, b.end) for b in chain] == [(i, i + 1) for i in range(6)]
    space_vdf = parse("S1 * V1")
    ws = [space_vdf(b.recorded) for b in chain]
    assert all(w == pytest.approx(ws[0]) for w in ws)
    assert blockchain_weight(space_vdf, chain) == pytest.approx(7.26, abs=1e-12)
    assert len(honest_discretize(ResourceProfile.constant(point(W=(1,)), 1))) == 1
    with pytest.raises(DomainError):
        honest_discretize(ResourceProfile.constant(point(W=(1,)), 2.5))


def test_adversarial_discretize():
    c = ResourceProfile.constant(point(S=(1,), V=(1,)), 6)
    one = adversarial_discretize(c, [(0, 4)])
    assert len(one) == 1 and one.blocks[0].vdf_recorded == (4.0,)
    gap = adversarial_discretize(c, [(0, 1), (2, 3)])
    assert len(gap) == 2
    empty = adversarial_discretize(c, [])
    assert len(empty) == 0 and blockchain_weight(parse("S1*V1"), empty) == 0
    with pytest.raises(DomainError):
        adversarial_discretize(c, [(0, 2), (1, 3)])


def test_honest_chain_must_be_gapless():
    c = ResourceProfile.constant(point(W=(1,)), 3)
    blocks = [make_block(c, (0, 1)), make_block(c, (2, 3))]
    with pytest.raises(DomainError):
        Blockchain(tuple(blocks), "honest")
    with pytest.raises(DomainError):
        Block(1.0, 1.0, point(W=(1,)), point(W=(1,)), point(W=(1,)))


def test_smoothness_examples():
    c = ResourceProfile.constant(point(W=(1,)), 2)
    assert smoothness(honest_discretize(c)) == 1.0
    dbl = steps(1, (0, point(W=(1,))), (0.5, point(W=(2,))))
    assert smoothness(adversarial_discretize(dbl, [(0, 1)])) == 2.0
    multi = steps(2, (0, point(S=(1,), W=(1,))), (0.5, point(S=(1.5,), W=(3,))), (1.5, point(S=(4,), W=(3,))))
    # block (0,1): S 1.5, W 3; block (1,2): S 4/1.5, W 1
    assert smoothness(honest_discretize(multi)) == pytest.approx(3.0)


def test_chain_csv():
    space_vdf = parse("S1 * V1")
    chain = honest_discretize(ResourceProfile.constant(point(S=(1.1,), V=(1.1,)), 2))
    rows = chain_to_csv(space_vdf, chain).splitlines()
    assert rows[0] == "block_index,start,end,S1,V1,block_weight"
    assert len(rows) == 3


def test_constant_profiles_hold_with_slack():
    space_vdf = parse("S1 * V1")
    honest = ResourceProfile.constant(point(S=(2,), V=(2,)), 4)
    adv = ResourceProfile.constant(point(S=(1,), V=(1,)), 4)
    rep = verify_theorem_chain(
        space_vdf, honest, adv, honest_discretize(honest),
        adversarial_discretize(adv, [(0, 2), (2, 4)]), delta=2.0, xi=1.0,
    )
    assert rep.preconditions_ok and rep.holds
    assert rep.honest_block_weight == 16 and rep.adversary_block_weight == 4
    assert rep.honest_bound > rep.adversary_bound


def test_fluctuating_space_vdf_instance():
    rng = np.random.default_rng(42)
    for _ in range(20):
        e, h, a, hc, ac, delta, xi = theorem_instance(rng, "S1 * V1", 5, xi=1.18, delta=2.0)
        rep = verify_theorem_chain(e, h, a, hc, ac, delta, xi)
        assert xi**4 <= 2.0
        assert rep.preconditions_ok and rep.holds


def test_space_spike_is_flagged():
    """A short space spike inside one adversarial block inflates its weight."""
    e = parse("pow(S1, 2) * V1")
    honest = ResourceProfile.constant(point(S=(1,), V=(1,)), 2)
    adv = steps(2, (0, point(S=(0.5,), V=(1,))), (1.9, point(S=(1.5,), V=(0.1,))))
    rep = verify_theorem_chain(e, honest, adv, honest_discretize(honest),
                               adversarial_discretize(adv, [(0, 2)]), delta=2.0)
    assert rep.gap_ok
    assert not rep.smooth_ok
    assert not rep.holds and not rep.right_ok
    assert rep.adversary_block_weight > rep.honest_block_weight
    assert not rep.counterexample


def test_cubic_space_breaks_chain_under_preconditions():
    """S^3 V is not subhomogeneous; a smooth spike breaks the right inequality."""
    e = parse("pow(S1, 3) * V1")
    honest = ResourceProfile.constant(point(S=(1,), V=(200,)), 1)
    adv = steps(1, (0, point(S=(1,), V=(1,))), (0.99, point(S=(2,), V=(1,))))
    rep = verify_theorem_chain(e, honest, adv, honest_discretize(honest),
                               adversarial_discretize(adv, [(0, 1)]), delta=16.0)
    assert rep.xi == 2.0 and rep.preconditions_ok
    assert rep.left_ok and rep.middle_ok and not rep.right_ok
    assert rep.counterexample


def test_squared_space_survives_smooth_spike():
    # with smoothness xi the S^2 V block over-counts by at most xi^2
    e = parse("pow(S1, 2) * V1")
    honest = ResourceProfile.constant(point(S=(1,), V=(200,)), 1)
    adv = steps(1, (0, point(S=(1,), V=(1,))), (0.99, point(S=(2,), V=(1,))))
    rep = verify_theorem_chain(e, honest, adv, honest_discretize(honest),
                               adversarial_discretize(adv, [(0, 1)]), delta=16.0)
    assert rep.preconditions_ok and rep.holds


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), text=st.sampled_from(DISCRETE_SECURE))
def test_theorem_chain_random(seed, text):
    rng = np.random.default_rng(seed)
    e, h, a, hc, ac, delta, xi = theorem_instance(rng, text)
    rep = verify_theorem_chain(e, h, a, hc, ac, delta, xi)
    assert rep.preconditions_ok
    assert rep.holds, rep.to_dict()
