"""``fermconic`` command line: verification suites and equation export."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import __version__, bitangent, casestudy, conicsystem, oracle, symfun
from .polyalg import QQ, PrimeField

log = logging.getLogger("fermconic")

# build revision reported by --version
REVISION = "3264135b4899"


def _identities():
    yield symfun.verify_vandermonde_kernel
    yield symfun.base_locus_identities
    yield symfun.involution_relations
    yield lambda: symfun.seeds_report(symfun.option1_table(), "option 1")
    yield lambda: symfun.seeds_report(symfun.option2_table(), "option 2")
    yield symfun.option2_initial_values
    yield bitangent.bitangent_report
    yield bitangent.dwork_roundtrip
    yield conicsystem_reports


def conicsystem_reports():
    system = conicsystem.generic_system()
    rep = conicsystem.recursion_report(system)
    tau = conicsystem.tau_check(system)
    rep.checks.extend(tau.checks)
    rep.add("F_Lambda multinomial expansion = direct substitution", conicsystem.flambda_symbolic_check())
    disc = conicsystem.discriminant_check()
    rep.checks.extend(disc.checks)
    rep.notes.extend(disc.notes)
    return rep


def _casestudy():
    yield casestudy.casestudy_report
    yield casestudy.q_structure_report
    yield casestudy.classify_solutions
    yield casestudy.orbit_witnesses


def _examples():
    yield casestudy.verify_example_s3
    yield casestudy.verify_example_z2z2
    yield casestudy.constants_report


def _run_suite(makers):
    reports = []
    for make in makers:
        start = time.perf_counter()
        rep = make()
        log.info("%s: %.2fs", rep.title, time.perf_counter() - start)
        reports.append(rep)
    return reports


def _emit(args, payload, text_lines):
    out = json.dumps(payload, indent=2) if args.format == "json" else "\n".join(text_lines)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _report_command(args, makers):
    reports = _run_suite(makers)
    ok = all(r.ok for r in reports)
    payload = {"command": args.command, "ok": ok, "reports": [r.to_json() for r in reports]}
    lines = [line for r in reports for line in r.lines()]
    lines.append(f"overall: {'OK' if ok else 'FAIL'}")
    _emit(args, payload, lines)
    return 0 if ok else 1


def _parse_coords(text, dom):
    vals = [dom.convert(Fraction(v.strip())) for v in text.split(",")]
    if len(vals) != 5:
        raise argparse.ArgumentTypeError("expected five comma-separated coordinates")
    return vals


def _show(dom, c):
    return str(Fraction(c)) if dom is QQ else dom.to_str(c)


def cmd_bitangent(args):
    dom = PrimeField(args.prime) if args.prime else QQ
    if args.action == "check":
        P = bitangent.PointP4(tuple(_parse_coords(args.p, dom)), dom)
        Q = bitangent.PointP4(tuple(_parse_coords(args.q, dom)), dom)
        res = bitangent.contact_residuals(P, Q)
        ok = all(dom.is_zero(r) for r in res)
        payload = {"ok": ok, "residuals": {f"k={k}": _show(dom, r) for k, r in zip((0, 1, 4, 5), res)}}
        _emit(args, payload, [f"k={k}: {_show(dom, r)}" for k, r in zip((0, 1, 4, 5), res)])
        return 0 if ok else 1
    U = bitangent.PointP4(tuple(_parse_coords(args.u, dom)), dom)
    try:
        M = bitangent.m_map(U)
    except bitangent.BaseLocus:
        comp = bitangent.base_locus_classify(U)
        _emit(args, {"ok": False, "base_locus": repr(comp)}, [f"base locus: {comp!r}"])
        return 1
    payload = {"ok": True, "M": [_show(dom, c) for c in M.coords]}
    _emit(args, payload, ["[" + " : ".join(payload["M"]) + "]"])
    return 0


def cmd_derive(args):
    data = conicsystem.export_system(args.option, args.eliminate)
    if args.format == "json":
        _emit(args, data, [])
    else:
        lines = [f"{e['name']}: {len(e['numerator']['terms'])} terms" for e in data["equations"]]
        lines += [f"{e['name']}: {len(e['numerator']['terms'])} terms" for e in data.get("eliminated", [])]
        _emit(args, data, lines)
    return 0


def cmd_dump_smn(args):
    table = symfun.option1_table() if args.option == 1 else symfun.option2_table()
    data = table.to_json(args.max_total)
    if args.format == "json":
        _emit(args, data, [])
    else:
        _emit(args, data, [f"{k}: {len(v['terms'])} terms" for k, v in data.items()])
    return 0


def cmd_oracle(args):
    if args.replay:
        ok, sys_sols, brute = oracle.replay(args.replay, bound=args.bound)
        payload = {"ok": ok, "system": sorted(sys_sols), "brute": sorted(brute)}
        _emit(args, payload, [f"system: {sorted(sys_sols)}", f"enumeration: {sorted(brute)}",
                              f"overall: {'OK' if ok else 'FAIL'}"])
        return 0 if ok else 1
    try:
        rep = oracle.cross_validate(args.trials, args.prime, args.seed, bound=args.bound)
    except oracle.PrimeTooLarge as exc:
        print(f"fermconic: {exc}", file=sys.stderr)
        return 2
    _emit(args, rep.to_json(), rep.lines())
    return 0 if rep.ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="fermconic", description="Conics on the Fermat quintic: checks and exports.")
    parser.add_argument("--version", action="version", version=f"fermconic {__version__} (revision {REVISION})")
    parser.add_argument("-v", "--verbose", action="store_true", help="timing logs on stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--json", dest="format", action="store_const", const="json", help="same as --format json")
    common.add_argument("--output", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("identities", parents=[common], help="kernel, base locus, involution, S tables, recursion")
    sub.add_parser("casestudy", parents=[common], help="the exceptional pair end to end")
    sub.add_parser("examples", parents=[common], help="the S3 and Z2 x Z2 families and the line count")

    d = sub.add_parser("derive", parents=[common], help="export the five equations")
    d.add_argument("--option", type=int, choices=(1, 2), default=1)
    d.add_argument("--eliminate", action="store_true", help="also export the d-free residuals")

    s = sub.add_parser("dump-smn", parents=[common], help="export an S table in the e-basis")
    s.add_argument("--option", type=int, choices=(1, 2), default=1)
    s.add_argument("--max-total", type=int, default=5)

    o = sub.add_parser("oracle", parents=[common], help="cross-validate against exhaustive search")
    o.add_argument("--prime", type=int, default=oracle.ENUMERATION_BOUND)
    o.add_argument("--trials", type=int, default=100)
    o.add_argument("--seed", type=int, default=7)
    o.add_argument("--bound", type=int, default=oracle.ENUMERATION_BOUND, help="largest prime to enumerate")
    o.add_argument("--replay", help="JSON section instance to re-check")

    b = sub.add_parser("bitangent", help="pointwise bitangent tools")
    bsub = b.add_subparsers(dest="action", required=True)
    bc = bsub.add_parser("check", parents=[common], help="the four contact residuals of P and Q")
    bc.add_argument("--p", required=True, help="five comma-separated coordinates")
    bc.add_argument("--q", required=True)
    bc.add_argument("--prime", type=int, help="work over GF(prime) instead of Q")
    bm = bsub.add_parser("mmap", parents=[common], help="m(U) = [M_0 : ... : M_4]")
    bm.add_argument("--u", required=True)
    bm.add_argument("--prime", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(name)s: %(message)s")
    if hasattr(args, "seed") and os.environ.get("FERMCONIC_SEED"):
        args.seed = int(os.environ["FERMCONIC_SEED"])
    try:
        if args.command == "identities":
            return _report_command(args, _identities())
        if args.command == "casestudy":
            return _report_command(args, _casestudy())
        if args.command == "examples":
            return _report_command(args, _examples())
        if args.command == "derive":
            return cmd_derive(args)
        if args.command == "dump-smn":
            return cmd_dump_smn(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        return cmd_bitangent(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
