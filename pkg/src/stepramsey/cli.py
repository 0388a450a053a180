"""Command-line entry point.

Exit codes: 0 pass, 2 property violated or other domain failure, 3 budget
exceeded, 64 usage error, 65 malformed input file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import comb
from pathlib import Path

from . import basegen, formats, oracle, stepup, verify
from .core import BinaryStepUp, ExplicitLeaf, MixedStepUp, PairColoring
from .errors import BudgetExceeded, FormatError, StepRamseyError

EXIT_OK, EXIT_VIOLATION, EXIT_BUDGET, EXIT_USAGE, EXIT_FORMAT = 0, 2, 3, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _ref(path: Path, out: Path) -> dict:
    rel = os.path.relpath(path.resolve(), out.resolve().parent)
    return {"path": rel, "sha256": formats.sha256_file(path)}


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="ascii", newline="\n")


# Subcommands.

def cmd_gen_base(args) -> int:
    arity = 2 if args.kind == "pair" else 3
    if args.size_from_lemma:
        if args.size_from_lemma == "2.1":
            n = basegen.pair_universe_size(args.q, args.t, args.subset)
        elif args.size_from_lemma == "3.1":
            n = basegen.lemma31_universe_size(args.subset)
        else:
            n = basegen.lemma33_universe_size(args.subset)
    elif args.n is None:
        raise UsageError("either --n or --size-from-lemma is required")
    else:
        n = args.n
    spec = basegen.GenSpec(args.kind, n, args.q, args.subset, args.t, args.seed,
                           args.max_attempts, args.budget, args.allow_vacuous)
    coloring = basegen.generate(spec, workers=args.workers)
    _write_text(args.out, formats.dumps_rlc1(coloring))
    if args.out not in (None, "-"):
        noun = "pairs" if arity == 2 else "triples"
        print(f"wrote {args.kind} coloring N={n} q={args.q} ({comb(n, arity)} {noun}) "
              f"to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_stepup(args) -> int:
    out = Path(args.out)
    if args.stepup_kind == "binary":
        base = formats.read_rlc1(args.base)
        if not isinstance(base, PairColoring):
            raise FormatError("binary step-up needs a pair coloring")
        tree = BinaryStepUp(base)
        refs = {id(base): _ref(Path(args.base), out)}
    else:
        pair = formats.read_rlc1(args.pair_base)
        if not isinstance(pair, PairColoring):
            raise FormatError("--pair-base must be a pair coloring")
        triple_base = formats.read_coloring(args.triple_base)
        refs = {id(pair): _ref(Path(args.pair_base), out)}
        if isinstance(triple_base, PairColoring):
            raise FormatError("--triple-base must be a triple coloring or a tree")
        if not isinstance(triple_base, (ExplicitLeaf, BinaryStepUp, MixedStepUp)):
            refs[id(triple_base)] = _ref(Path(args.triple_base), out)
            triple_base = ExplicitLeaf(triple_base)
        tree = MixedStepUp(pair, triple_base)
    formats.write_tree(tree, out, refs)
    print(f"universe_size = {tree.universe_size}\nnum_colors = {tree.num_colors}",
          file=sys.stderr)
    return EXIT_OK


def cmd_compose(args) -> int:
    levels = stepup.plan(args.n, args.q)
    if args.mode == "nominal":
        bound = stepup.bound_log2(args.n, args.q)
        payload = {
            "mode": "nominal",
            "n": args.n,
            "q": args.q,
            "levels": [lv.to_dict() for lv in levels],
            "log2_bound": stepup.format_real(bound),
            "log2_universe_nominal": str(stepup.nominal_universe_log2(levels)),
        }
        _write_text(args.out, json.dumps(payload, indent=1, sort_keys=True) + "\n")
        return EXIT_OK
    policy = stepup.GenPolicy(args.seed, args.pair_size, args.leaf_size, args.max_attempts)
    tree = stepup.compose(args.n, args.q, policy)
    _write_text(args.out, formats.dumps_tree(tree))
    return EXIT_OK


def cmd_eval(args) -> int:
    tree = formats.read_coloring(args.tree)
    if isinstance(tree, PairColoring):
        raise FormatError("eval needs a triple coloring or a tree")
    color = stepup.evaluate(tree, *args.triple)
    _emit(args, {"color": color}, str(color))
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.simple:
        if args.t is None:
            raise UsageError("--simple needs --t")
        value = stepup.bound_log2_simple(args.n, args.q, args.t, general=args.general)
    else:
        value = stepup.bound_log2(args.n, args.q)
    text = stepup.format_real(value)
    _emit(args, {"log2_bound": text, "exact": not hasattr(value, "_mpf_")},
          f"log2_bound = {text}")
    return EXIT_OK


def _report_exit(args, report) -> int:
    if args.format == "json":
        print(json.dumps(report.to_dict(), sort_keys=True))
    elif report.passed:
        seen = "" if report.min_colors_seen is None else f", min colors {report.min_colors_seen}"
        print(f"PASS {report.check} {report.mode}: {report.subsets_checked} checked{seen}")
    else:
        seen = "" if report.min_colors_seen is None else f" (min colors {report.min_colors_seen})"
        print(f"FAIL {report.check} {report.mode}{seen}; counterexample:")
        for v in report.counterexample:
            print(v)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_verify(args) -> int:
    coloring = formats.read_coloring(args.coloring)
    if args.mode == "exhaustive":
        vertices = _int_list(args.vertices) if args.vertices else None
        report = verify.verify_exhaustive(coloring, args.n, args.t, vertices,
                                          budget=args.budget, workers=args.workers)
    else:
        if args.seed is None:
            raise UsageError("--mode sample needs --seed")
        if args.samples > args.budget:
            raise BudgetExceeded(args.samples, args.budget, "samples")
        report = verify.verify_sampled(coloring, args.n, args.t, args.samples, args.seed,
                                       workers=args.workers)
    return _report_exit(args, report)


def cmd_props(args) -> int:
    mode = "exhaustive" if args.mode == "exhaustive" else "sampled"
    if mode == "sampled" and args.seed is None:
        raise UsageError("--mode sample needs --seed")
    report = verify.property_suite(args.check, args.radix, args.digits, mode,
                                   budget=args.budget, seed=args.seed or 0,
                                   samples=args.samples, max_chain=args.max_chain)
    return _report_exit(args, report)


def cmd_stepdown(args) -> int:
    tree = formats.read_coloring(args.tree)
    if not isinstance(tree, BinaryStepUp):
        raise UsageError("stepdown needs a binary step-up tree")
    chain = verify.Chain(tuple(_int_list(args.chain)), 2, tree.num_digits)
    res = verify.stepdown_extract(chain, tree)
    payload = {
        "positions": list(res.positions),
        "deltas": list(res.deltas),
        "witnesses": [{"pair": list(k), "triple": list(v)} for k, v in sorted(res.witnesses.items())],
    }
    lines = [f"B = {sorted(res.deltas)}"]
    for (a, b), (i, j, k) in sorted(res.witnesses.items()):
        vs = chain.vertices
        lines.append(f"phi({a},{b}) realized by ({vs[i]}, {vs[j]}, {vs[k]})")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.oracle_cmd == "materialize":
        tree = formats.read_coloring(args.tree)
        explicit = oracle.materialize(tree, args.limit)
        _write_text(args.out, formats.dumps_rlc1(explicit))
        return EXIT_OK
    if args.oracle_cmd == "search":
        res = oracle.brute_force_search(args.N, args.q, args.t, args.n, args.arity, args.budget)
        if res.sat and args.out:
            _write_text(args.out, formats.dumps_rlc1(res.witness))
        _emit(args, {"status": res.status, "nodes": res.nodes}, res.status)
        return EXIT_OK
    res = oracle.exact_f_micro(args.q, args.t, args.n, args.max_N, args.budget, args.arity)
    exact = res.first_unsat is not None
    _emit(args, {"value": res.value, "exact": exact},
          f"f = {res.value}" if exact else f"f >= {res.value}")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text",
                        help="report encoding")
    p = _Parser(prog="stepramsey", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-base", parents=[common], help="generate a verified base coloring")
    g.add_argument("--kind", choices=["pair", "triple"], required=True)
    g.add_argument("--n", type=int, help="universe size N")
    g.add_argument("--q", type=int, required=True, help="number of colors")
    g.add_argument("--subset", type=int, required=True, help="subset size m (r, s)")
    g.add_argument("--t", type=int, required=True, help="required distinct colors")
    g.add_argument("--seed", type=_u64, required=True)
    g.add_argument("--max-attempts", type=int, default=10_000)
    g.add_argument("--out", default="-")
    g.add_argument("--size-from-lemma", choices=["2.1", "3.1", "3.3"],
                   help="take N from the pair (2.1), triple (3.1) or 3-color pair (3.3) size formula")
    g.add_argument("--allow-vacuous", action="store_true")
    g.add_argument("--budget", type=int, default=basegen.DEFAULT_BUDGET)
    g.add_argument("--workers", type=int, default=1)
    g.set_defaults(fn=cmd_gen_base)

    s = sub.add_parser("stepup", parents=[common], help="build a step-up tree from base files")
    ssub = s.add_subparsers(dest="stepup_kind", required=True, parser_class=_Parser)
    sb = ssub.add_parser("binary", parents=[common])
    sb.add_argument("--base", required=True)
    sb.add_argument("--out", required=True)
    sm = ssub.add_parser("mixed", parents=[common])
    sm.add_argument("--pair-base", required=True)
    sm.add_argument("--triple-base", required=True, help="tree file or RLC1 triple coloring")
    sm.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_stepup)

    c = sub.add_parser("compose", parents=[common], help="recursive construction for (n, q)")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--mode", choices=["materializable", "nominal"], default="nominal")
    c.add_argument("--seed", type=_u64, required=True)
    c.add_argument("--out", default="-")
    c.add_argument("--pair-size", type=int, help="override the pair-base universe size")
    c.add_argument("--leaf-size", type=int, help="override the leaf universe size")
    c.add_argument("--max-attempts", type=int, default=100_000)
    c.set_defaults(fn=cmd_compose)

    e = sub.add_parser("eval", parents=[common], help="color of one triple")
    e.add_argument("--tree", required=True)
    e.add_argument("--triple", nargs=3, type=int, required=True, metavar="V")
    e.set_defaults(fn=cmd_eval)

    b = sub.add_parser("bounds", parents=[common], help="log2 of the guaranteed universe size")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--t", type=int)
    b.add_argument("--simple", action="store_true", help="the many-colors bound for (q, t)")
    b.add_argument("--general", action="store_true", help="allow n that is not a power of two")
    b.set_defaults(fn=cmd_bounds)

    v = sub.add_parser("verify", parents=[common], help="check the subset color property")
    v.add_argument("--coloring", required=True, help="tree file or RLC1 file")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--t", type=int, required=True)
    v.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    v.add_argument("--samples", type=int, default=10**5)
    v.add_argument("--seed", type=_u64)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--budget", type=int, default=verify.DEFAULT_BUDGET)
    v.add_argument("--vertices", help="restrict to these vertices (comma separated)")
    v.set_defaults(fn=cmd_verify)

    pr = sub.add_parser("props", parents=[common], help="delta property suites")
    pr.add_argument("--check", choices=["I", "II", "III"], required=True)
    pr.add_argument("--radix", type=int, default=2)
    pr.add_argument("--digits", type=int, default=8)
    pr.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    pr.add_argument("--samples", type=int, default=10**5)
    pr.add_argument("--seed", type=_u64)
    pr.add_argument("--budget", type=int, default=verify.DEFAULT_BUDGET)
    pr.add_argument("--max-chain", type=int, default=32)
    pr.set_defaults(fn=cmd_props)

    sd = sub.add_parser("stepdown", parents=[common], help="stepdown extraction on a chain")
    sd.add_argument("--tree", required=True)
    sd.add_argument("--chain", required=True, help="comma separated increasing vertices")
    sd.set_defaults(fn=cmd_stepdown)

    o = sub.add_parser("oracle", parents=[common], help="micro-scale ground truth")
    osub = o.add_subparsers(dest="oracle_cmd", required=True, parser_class=_Parser)
    om = osub.add_parser("materialize", parents=[common])
    om.add_argument("--tree", required=True)
    om.add_argument("--out", default="-")
    om.add_argument("--limit", type=int, default=oracle.DEFAULT_LIMIT)
    os_ = osub.add_parser("search", parents=[common])
    os_.add_argument("--N", type=int, required=True)
    os_.add_argument("--q", type=int, required=True)
    os_.add_argument("--t", type=int, required=True)
    os_.add_argument("--n", type=int, required=True)
    os_.add_argument("--arity", type=int, choices=[2, 3], default=3)
    os_.add_argument("--budget", type=int, default=10**7)
    os_.add_argument("--out")
    oe = osub.add_parser("exact-f", parents=[common])
    oe.add_argument("--q", type=int, required=True)
    oe.add_argument("--t", type=int, required=True)
    oe.add_argument("--n", type=int, required=True)
    oe.add_argument("--max-N", dest="max_N", type=int, required=True)
    oe.add_argument("--arity", type=int, choices=[2, 3], default=3)
    oe.add_argument("--budget", type=int, default=10**7)
    o.set_defaults(fn=cmd_oracle)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"stepramsey: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as e:
        print(f"stepramsey: bad input: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except BudgetExceeded as e:
        print(f"stepramsey: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except StepRamseyError as e:
        print(f"stepramsey: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as e:
        print(f"stepramsey: cannot access file: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except ValueError as e:
        print(f"stepramsey: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
