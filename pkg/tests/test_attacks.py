import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdsweight.attacks import (
    AttackScenario,
    HomogeneityWitness,
    SecureWeightError,
    find_homogeneity_witness,
    find_nonmonotone_witness,
    normalize_witness,
    plan_attack,
    run_attack,
    synthesize_attack,
)
from pdsweight.continuous import TimeWarp, adversarial_chain, chain_weight
from pdsweight.resources import ResourceProfile, random_profile
from pdsweight.weights import FunctionWeight, SamplerConfig, parse

from conftest import INSECURE, SECURE, point, steps


def test_squared_witness_and_scenario():
    sq = parse("pow(W1, 2)")
    wit = find_homogeneity_witness(sq)
    assert (wit.point, wit.alpha, wit.beta, wit.case_tag) == (point(W=(1,)), 2.0, 2.0, "1b")
    sc = synthesize_attack(sq, wit)
    assert sc.t0 == 2.0 and sc.t1 == 1.0 and sc.horizon == 3.0
    assert sc.honest == steps(3, (0, point(W=(1,))), (2, point(W=(2,))))
    assert sc.adversary == ResourceProfile.constant(point(W=(1,)), 3)
    assert sc.warp == TimeWarp.constant(2.0, 3)
    out = run_attack(sq, sc)
    assert out.honest_weight == 6.0 and out.adversarial_weight == 6.0
    assert out.success and out.preconditions_ok
    assert out.preconditions.strict_interval == (2.0, 3.0)


def test_space_only_witness_is_case_1d():
    e = parse("S1")
    wit = find_homogeneity_witness(e)
    assert wit.point == point(S=(1,)) and wit.alpha == 0.5 and wit.beta == 0.5
    assert wit.case_tag.startswith("1d")
    assert wit.second_point == point(S=(2,)) and wit.delta == 1.0
    sc = synthesize_attack(e, wit)
    assert sc.t0 == 1.0
    out = run_attack(e, sc)
    assert out.success and out.preconditions_ok


def test_space_vdf_product_has_no_witness():
    e = parse("S1 * V1")
    assert find_homogeneity_witness(e) is None
    assert find_nonmonotone_witness(e) is None
    with pytest.raises(SecureWeightError):
        plan_attack(e)


def test_algebra_is_never_non_monotone():
    for text in SECURE + INSECURE + ["min(W1, W2)"]:
        assert find_nonmonotone_witness(parse(text)) is None


def test_case_1c_stretch():
    root = parse("pow(W1, 0.5)")
    wit = find_homogeneity_witness(root)
    assert wit.case_tag == "1c" and wit.alpha < 1
    out = run_attack(root, synthesize_attack(root, wit))
    assert out.success and out.preconditions_ok


def test_case_2_reduces_to_case_1():
    sq = parse("pow(W1, 2)")
    # at alpha = 1/2 the defect is negative; the witness flips to alpha = 2
    wit = normalize_witness(sq, point(W=(2,)), 0.5)
    assert wit.alpha == 2.0 and wit.beta > 0 and wit.point == point(W=(1,))


def test_case_1a_is_unreachable():
    # a positive defect with alpha > 1 forces the weight up, so 1a never appears
    rng = np.random.default_rng(5)
    for text in INSECURE + ["pow(W1, 0.5)", "pow(W1, 3) + V1"]:
        e = parse(text)
        for _ in range(50):
            p = point(*(tuple(rng.uniform(0.1, 4, k)) for k in e.requires()))
            a = float(rng.uniform(0.2, 5))
            if a == 1 or e(p.scale_timed(a)) == a * e(p):
                continue
            assert normalize_witness(e, p, a).case_tag != "1a"


def test_non_monotone_stretch_is_refused():
    odd = FunctionWeight(lambda s, v, w: 1.0 + 1.0 / w[0], (0, 0, 1), "decreasing")
    with pytest.raises(RuntimeError, match="not monotone"):
        normalize_witness(odd, point(W=(1,)), 2.0)


def test_witness_validation():
    with pytest.raises(ValueError):
        HomogeneityWitness(point(W=(1,)), 2.0, -1.0, "1b")
    with pytest.raises(ValueError):
        HomogeneityWitness(point(W=(1,)), 2.0, 1.0, "1a")


def _table_weight():
    def fn(s, v, w):
        key = (s[0], v[0], w[0])
        return {(1.0, 1.0, 1.0): 5.0, (2.0, 2.0, 2.0): 3.0}.get(key, s[0] + v[0] + w[0])

    return FunctionWeight(fn, (1, 1, 1), "table")


def test_non_monotone_attack_ties():
    e = _table_weight()
    pts = (point(S=(1,), V=(1,), W=(1,)), point(S=(2,), V=(2,), W=(2,)))
    pair = find_nonmonotone_witness(e, SamplerConfig(samples=64, extra_points=pts))
    assert pair == pts
    sc = synthesize_attack(e, pair)
    assert sc.case_tag == "non-monotone" and sc.warp == TimeWarp.identity(2)
    out = run_attack(e, sc)
    assert out.honest_weight == out.adversarial_weight == 10.0
    assert out.success and out.preconditions_ok


@pytest.mark.parametrize("text", INSECURE + ["pow(W1, 0.5)", "pow(W1, 3) + V1", "S1 * S1 * W1 + 1"])
def test_planned_attacks_succeed(text):
    e = parse(text)
    sc = plan_attack(e)
    out = run_attack(e, sc)
    assert out.success and out.preconditions_ok, (text, sc.case_tag, out)


def test_squared_hashrate_race():
    sq = parse("pow(W1, 2)")
    sc = AttackScenario(
        honest=ResourceProfile.constant(point(W=(2,)), 1),
        adversary=ResourceProfile.constant(point(W=(1,)), 1),
        warp=TimeWarp.constant(8, 1),
        t0=0.0,
        t1=1.0,
        case_tag="1b",
    )
    out = run_attack(sq, sc)
    assert out.honest_weight == 4.0
    assert out.adversarial_weight == pytest.approx(8.0, abs=1e-12)
    assert out.success and out.preconditions_ok


def test_scenario_round_trip_replays():
    for text in INSECURE:
        e = parse(text)
        sc = plan_attack(e)
        again = AttackScenario.from_dict(sc.to_dict())
        assert again == sc
        assert run_attack(e, again).to_dict() == run_attack(e, sc).to_dict()


def test_slack_makes_attack_strict():
    sq = parse("pow(W1, 2)")
    sc = synthesize_attack(sq, find_homogeneity_witness(sq), slack=0.1)
    out = run_attack(sq, sc)
    assert out.adversarial_weight < out.honest_weight or out.success


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), text=st.sampled_from(SECURE))
def test_secure_weights_resist_random_warps(seed, text):
    e = parse(text)
    rng = np.random.default_rng(seed)
    dims = e.requires()
    T = 3.0
    adv = random_profile(rng, dims, T, 4, lo=0.25, hi=1.0)
    honest = adv.map_values(lambda p: p.scaled(float(rng.uniform(1.1, 2.0))))
    cuts = sorted({0.0, *(float(x) for x in rng.uniform(0, T, 3))})
    phis = tuple(float(x) for x in np.exp(rng.uniform(np.log(1 / 8), np.log(8), len(cuts))))
    warp = TimeWarp(T, tuple(cuts), phis)
    sc = AttackScenario(honest, adv, warp, 0.0, T, "1b")
    out = run_attack(e, sc)
    assert out.preconditions_ok
    assert not out.success
    assert chain_weight(e, adversarial_chain(adv, warp)) < chain_weight(e, honest)
