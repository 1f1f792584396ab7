"""Command-line front end: scenario files in, reports and plot data out.

Exit codes: 0 success / secure, 1 input error, 2 insecure or refused,
3 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from pathlib import Path
from typing import Optional

from . import attacks, continuous, discrete, replotting
from .resources import ResourcePoint, ResourceProfile
from .scenario import ScenarioError, ScenarioFile, attack_document, dumps
from .weights import DimensionError, ParseError, SamplerConfig, VacuousWeightError, classify, parse

EXIT_OK, EXIT_ERROR, EXIT_INSECURE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, (ResourcePoint, ResourceProfile)):
        return obj.to_dict()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, float):
        return float(obj)
    return obj


def _sampler(args, scenario: Optional[ScenarioFile]) -> SamplerConfig:
    seed = args.seed if args.seed is not None else (scenario.seed if scenario else 0)
    kw = {"seed": seed}
    if args.samples is not None:
        kw["samples"] = args.samples
    if args.tolerance is not None:
        kw["tolerance"] = args.tolerance
    return SamplerConfig(**kw)


def _emit(args, report: dict, lines: list[str]):
    if args.json:
        print(dumps(_jsonable(report)))
    else:
        print("\n".join(lines))


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


# -- classify -----------------------------------------------------------------


def cmd_classify(args) -> int:
    sc = ScenarioFile.load(args.file)
    result = classify(sc.expr, _sampler(args, sc))
    verdict = result.verdict
    report = {
        "weight": str(sc.expr),
        "verdict": verdict,
        "continuous_secure": result.continuous_secure,
        "discrete_sufficient": result.discrete_sufficient,
        "properties": {k: _jsonable(v) for k, v in sorted(result.reports.items())},
    }
    lines = [f"weight: {sc.expr}", f"verdict: {verdict}"]
    for name, rep in sorted(result.reports.items()):
        how = "symbolic" if rep.symbolic else f"{rep.samples_checked} samples"
        lines.append(f"  {name}: {'holds' if rep.holds else 'fails'} ({how})")
        if rep.witness is not None:
            lines.append(f"    witness: {_jsonable(rep.witness)}")
    lines.append(f"discrete sufficient: {result.discrete_sufficient}")
    _emit(args, report, lines)
    if verdict == "insecure":
        return EXIT_INSECURE
    return EXIT_OK if verdict == "secure" else EXIT_INCONCLUSIVE


# -- attack / replay ----------------------------------------------------------


def _attack_report(sc_dsl, scenario: attacks.AttackScenario, outcome: attacks.AttackOutcome):
    report = {"weight": sc_dsl, "scenario": scenario.to_dict(), "outcome": outcome.to_dict()}
    lines = [
        f"weight: {sc_dsl}",
        f"case: {scenario.case_tag}  T0={scenario.t0!r}  T1={scenario.t1!r}",
        f"honest weight: {outcome.honest_weight!r}",
        f"adversarial weight: {outcome.adversarial_weight!r}",
        f"preconditions ok: {outcome.preconditions_ok}",
        f"attack {'succeeds' if outcome.success else 'fails'}",
    ]
    return report, lines


def _replay(args, path) -> int:
    sc = ScenarioFile.load(path)
    scenario = sc.attack_scenario()
    outcome = attacks.run_attack(sc.expr, scenario)
    report, lines = _attack_report(sc.weight_dsl, scenario, outcome)
    _emit(args, report, lines)
    return EXIT_OK if outcome.success else EXIT_INSECURE


def cmd_attack(args) -> int:
    if args.replay:
        return _replay(args, args.replay)
    if not args.file:
        raise UsageError("attack needs a scenario file or --replay PATH")
    sc = ScenarioFile.load(args.file)
    sampler = _sampler(args, sc)
    try:
        scenario = attacks.plan_attack(sc.expr, sampler)
    except attacks.SecureWeightError:
        print("no attack exists: the weight is monotone and homogeneous in (V, W)", file=sys.stderr)
        return EXIT_INSECURE
    except attacks.InconclusiveAttack as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    outcome = attacks.run_attack(sc.expr, scenario)
    out = Path(args.out) if args.out else Path(str(args.file) + ".attack.json")
    out.write_text(dumps(attack_document(sc.weight_dsl, scenario, sampler.seed)) + "\n")
    report, lines = _attack_report(sc.weight_dsl, scenario, outcome)
    report["written"] = str(out)
    lines.append(f"scenario written to {out}")
    if args.csv:
        chain = continuous.adversarial_chain(scenario.adversary, scenario.warp, scenario.recording)
        _write_csv(args.csv, *_rate_rows(sc.expr, scenario.honest, chain))
    _emit(args, report, lines)
    return EXIT_OK if outcome.success else EXIT_INCONCLUSIVE


def cmd_replay(args) -> int:
    return _replay(args, args.file)


# -- race ---------------------------------------------------------------------


def _rate_rows(expr, honest, adv_chain):
    rows = []
    for name, chain in (("honest", honest), ("adversary", adv_chain)):
        cum = 0.0
        for a, b, rate in continuous.weight_rates(expr, chain):
            cum += rate * (b - a)
            rows.append([name, repr(a), repr(b), repr(rate), repr(cum)])
    return ["chain", "start", "end", "weight_rate", "cumulative_weight"], rows


def cmd_race(args) -> int:
    sc = ScenarioFile.load(args.file)
    expr = sc.expr
    honest = sc.profile("honest")
    adversary = sc.profile("adversary")
    if honest.dims != adversary.dims:
        raise ScenarioError("profiles", "honest and adversary dimensions differ")
    warp = sc.warps.get("adversary") or continuous.TimeWarp.identity(adversary.horizon)
    chain = continuous.adversarial_chain(adversary, warp, sc.recording)
    hw, aw = continuous.chain_weight(expr, honest), continuous.chain_weight(expr, chain)
    pre = continuous.check_preconditions(expr, honest, adversary)
    report = {
        "weight": str(expr),
        "continuous": {
            "honest_weight": hw,
            "adversarial_weight": aw,
            "winner": "adversary" if aw >= hw else "honest",
        },
        "preconditions": {
            "dominated": pre.dominated,
            "strict_interval": pre.strict_interval,
            "ok": pre.ok,
        },
    }
    lines = [
        f"weight: {expr}",
        f"continuous: honest {hw!r} vs adversary {aw!r}",
        f"preconditions: dominated={pre.dominated} strict_interval={pre.strict_interval}",
    ]
    d = sc.discrete
    if d:
        hc = discrete.honest_discretize(honest)
        spans = d.get("adversary_spans")
        if spans is None:
            spans = [(i, i + 1) for i in range(int(adversary.horizon))]
        ac = discrete.adversarial_discretize(adversary, spans)
        dh, da = discrete.blockchain_weight(expr, hc), discrete.blockchain_weight(expr, ac)
        report["discrete"] = {"honest_weight": dh, "adversarial_weight": da}
        lines.append(f"discrete: honest {dh!r} vs adversary {da!r}")
        if "delta" in d:
            ineq = discrete.verify_theorem_chain(
                expr, honest, adversary, hc, ac, float(d["delta"]), d.get("xi")
            )
            report["discrete"]["inequalities"] = ineq.to_dict()
            q = ineq.to_dict()["quantities"]
            lines.append(
                "inequality chain: "
                f"{q[0]!r} >= {q[1]!r} > {q[2]!r} >= {q[3]!r}  "
                f"[{' '.join('ok' if x else 'FAIL' for x in ineq.to_dict()['inequalities'])}]"
            )
            lines.append(f"  preconditions: gap={ineq.gap_ok} smooth={ineq.smooth_ok}")
    if args.csv:
        _write_csv(args.csv, *_rate_rows(expr, honest, chain))
    _emit(args, report, lines)
    return EXIT_OK


# -- replot -------------------------------------------------------------------


def cmd_replot(args) -> int:
    sc = ScenarioFile.load(args.file)
    if not sc.replot:
        raise ScenarioError("replot", "missing")
    r = sc.replot
    try:
        rho = float(r["replot_time"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError("replot.replot_time", "required number") from exc
    scenario = replotting.ReplotScenario(
        sc.expr,
        sc.profile("honest"),
        sc.profile("adversary"),
        rho,
        int(r.get("replot_count", 0)),
        bool(r.get("busy", True)),
    )
    undefended = replotting.simulate_replot_race(scenario)
    report = {"weight": str(sc.expr), "undefended": undefended.to_dict()}
    lines = [
        f"weight: {sc.expr}",
        f"undefended: honest {undefended.honest_weight!r} vs adversary "
        f"{undefended.adversarial_weight!r} (m={undefended.best_strategy['m'][0]}) "
        f"-> {undefended.winner} wins",
    ]
    if "replot_count" in r:
        m = int(r["replot_count"])
        fixed = sc.expr(replotting.replot_block(scenario, m).recorded)
        report["fixed_replots"] = {"m": m, "adversarial_weight": fixed}
        lines.append(f"with m={m}: adversary {fixed!r}")
    defended = None
    if "difficulty" in r:
        if "space_factor" in r or "timed_factor" in r:
            band = replotting.PinnedDifficulty(
                float(r["difficulty"]), parse(r["space_factor"]), parse(r["timed_factor"])
            )
        else:
            band = replotting.DifficultyBand(float(r["difficulty"]), float(r.get("eta", 1.0)))
        defended = replotting.simulate_defended_race(scenario, band, float(r.get("step", 0.25)))
        report["defended"] = {**defended.to_dict(), "defense_claim_applies": defended.defense_claim_applies}
        lines.append(
            f"defended: honest {defended.honest_weight!r} vs adversary "
            f"{defended.adversarial_weight!r} -> {defended.winner} wins"
        )
    if args.csv:
        hc = discrete.honest_discretize(scenario.honest_profile)
        Path(args.csv).write_text(discrete.chain_to_csv(sc.expr, hc))
    _emit(args, report, lines)
    if args.assert_defense:
        eta = r.get("eta")
        if eta is None or float(eta) >= rho:
            print(f"defense not applicable: eta={eta} must be below replot time {rho}", file=sys.stderr)
            return EXIT_INSECURE
        if defended is None or defended.winner != "honest":
            return EXIT_INCONCLUSIVE
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="sampler seed (overrides file)")
    common.add_argument("--samples", type=int, default=None, help="samples per property check")
    common.add_argument("--tolerance", type=float, default=None, help="relative tolerance")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--csv", metavar="PATH", default=None, help="write plot data as CSV")

    parser = argparse.ArgumentParser(prog="pdsweight", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a weight function")
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("attack", parents=[common], help="synthesize and run an attack")
    p.add_argument("file", nargs="?")
    p.add_argument("--out", default=None, help="where to write the replayable scenario")
    p.add_argument("--replay", metavar="PATH", default=None, help="rerun a saved attack")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("race", parents=[common], help="weigh honest and adversarial chains")
    p.add_argument("file")
    p.set_defaults(func=cmd_race)

    p = sub.add_parser("replot", parents=[common], help="replotting race and defenses")
    p.add_argument("file")
    p.add_argument("--assert-defense", action="store_true")
    p.set_defaults(func=cmd_replot)

    p = sub.add_parser("replay", parents=[common], help="rerun a saved attack scenario")
    p.add_argument("file")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ParseError, VacuousWeightError, DimensionError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
