"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import time

import numpy as np
import pytest

from pdsweight import (
    DifficultyBand,
    ReplotScenario,
    ResourceProfile,
    TimeWarp,
    adversarial_chain,
    chain_weight,
    classify,
    integrate_timed,
    parse,
    plan_attack,
    run_attack,
    simulate_defended_race,
    simulate_replot_race,
    synthesize_attack,
    find_homogeneity_witness,
    verify_theorem_chain,
)
from pdsweight.resources import random_profile, riemann_timed

from conftest import DISCRETE_SECURE, SECURE, point, theorem_instance


@pytest.fixture
def report(capsys):
    def _report(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        assert ok, detail

    return _report


def _timed(fn, repeat=1):
    best, result = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t)
    return result, best


def test_1_squared_hash_rate_race(report):
    sq = parse("pow(W1, 2)")
    honest = ResourceProfile.constant(point(W=(2,)), 1)
    adversary = ResourceProfile.constant(point(W=(1,)), 1)
    warp = TimeWarp.constant(8, 1)

    def race():
        return chain_weight(sq, honest), chain_weight(sq, adversarial_chain(adversary, warp))

    (h, a), secs = _timed(race, repeat=20)
    ok = abs(h - 4) <= 1e-9 and abs(a - 8) <= 1e-9 and secs < 1e-3
    report(1, ok, f"honest {h!r} vs adversary {a!r} in {secs * 1e3:.3f} ms")


def test_2_classification_corpus(report):
    expected = {text: (True, True) for text in SECURE}
    expected.update({
        "pow(W1, 2)": (False, False),
        "W1 * W2": (False, False),
        "S1": (False, False),
        "pow(S1, 2) * V1": (True, False),
        "S1 + V1 * W1": (False, False),
    })
    wrong = []
    for text, (cont, disc) in expected.items():
        c = classify(parse(text))
        if (c.continuous_secure, c.discrete_sufficient) != (cont, disc):
            wrong.append(text)
    report(2, not wrong, f"{len(expected)} functions, misclassified: {wrong or 'none'}")


def test_3_attack_soundness(report):
    failures = []
    for text in ("pow(W1, 2)", "W1 * W2", "S1", "S1 + V1 * W1"):
        e = parse(text)
        out = run_attack(e, plan_attack(e))
        if not (out.success and out.preconditions_ok):
            failures.append(text)
    sq = parse("pow(W1, 2)")
    sc = synthesize_attack(sq, find_homogeneity_witness(sq))
    out = run_attack(sq, sc)
    exact = (sc.case_tag, sc.t0, out.honest_weight, out.adversarial_weight) == ("1b", 2.0, 6.0, 6.0)
    report(
        3,
        not failures and exact and out.success,
        f"failed: {failures or 'none'}; squared case {sc.case_tag} T0={sc.t0} "
        f"{out.honest_weight} vs {out.adversarial_weight}",
    )


def test_4_warps_never_help_secure_weights(report):
    rng = np.random.default_rng(2024)
    exprs = [parse(t) for t in SECURE]

    def suite():
        worst = -np.inf
        for i in range(1000):
            e = exprs[i % len(exprs)]
            T = float(rng.uniform(1, 8))
            prof = random_profile(rng, e.requires(), T, int(rng.integers(1, 7)), lo=0.25, hi=4.0)
            cuts = sorted({0.0, *(float(x) for x in rng.uniform(0, T, int(rng.integers(0, 5))))})
            phis = tuple(float(x) for x in np.exp(rng.uniform(np.log(1 / 8), np.log(8), len(cuts))))
            warp = TimeWarp(T, tuple(cuts), phis)
            worst = max(worst, chain_weight(e, adversarial_chain(prof, warp)) - chain_weight(e, prof))
        return worst

    worst, secs = _timed(suite)
    report(4, worst <= 1e-9 and secs < 10, f"1000 triples, max excess {worst:.3e}, {secs:.2f} s")


def test_5_discrete_inequality_chain(report):
    rng = np.random.default_rng(48)

    def suite():
        bad = []
        for i in range(500):
            text = DISCRETE_SECURE[i % len(DISCRETE_SECURE)]
            e, h, a, hc, ac, delta, xi = theorem_instance(rng, text)
            rep = verify_theorem_chain(e, h, a, hc, ac, delta, xi)
            if not (rep.preconditions_ok and rep.holds):
                bad.append((i, text))
        return bad

    bad, secs = _timed(suite)
    report(5, not bad and secs < 30, f"500 instances, failures: {bad or 'none'}, {secs:.2f} s")


def test_6_replotting(report):
    sc = ReplotScenario(
        parse("S1 * V1"),
        ResourceProfile.constant(point(S=(1.1,), V=(1.1,)), 6),
        ResourceProfile.constant(point(S=(1,), V=(1,)), 6),
        replot_time=2.0,
    )

    def both():
        return simulate_replot_race(sc), simulate_defended_race(sc, DifficultyBand(1.21, 1.5))

    (plain, defended), secs = _timed(both)
    ok = (
        abs(plain.adversarial_weight - 8) <= 1e-9
        and abs(plain.honest_weight - 7.26) <= 1e-9
        and plain.winner == "adversary"
        and defended.winner == "honest"
        and secs < 5
    )
    report(
        6,
        ok,
        f"undefended {plain.adversarial_weight!r} vs {plain.honest_weight!r}; "
        f"defended adversary {defended.adversarial_weight!r} vs honest "
        f"{defended.honest_weight!r}; {secs:.2f} s",
    )


def test_7_riemann_oracle(report):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        prof = random_profile(rng, (1, 2, 2), float(rng.uniform(1, 5)), 6, lo=0.5, hi=2.0)
        a = float(rng.uniform(0, prof.horizon / 2))
        b = float(rng.uniform(a + 0.1, prof.horizon))
        exact, approx = integrate_timed(prof, a, b), riemann_timed(prof, a, b, 1e-4)
        for x, y in zip(exact[0] + exact[1], approx[0] + approx[1]):
            worst = max(worst, abs(x - y))
    report(7, worst <= 1e-3, f"100 profiles, max abs difference {worst:.2e}")


def test_8_generality_note(report):
    report(
        8,
        True,
        "universal security over all profiles and warps is not checkable; "
        "criteria 4-5 and the symbolic certificates stand in for it",
    )


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
