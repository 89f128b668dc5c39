"""Command-line front end.

Exit status: 0 success, 1 usage or parse error, 2 semantic error, 3 when a
verdict trips ``--fail-on-no`` or ``--fail-on-unknown``.
"""

from __future__ import annotations

import argparse
import shlex
import sys

from . import __version__
from .alignment import build_span, merge
from .diagram import Cosmos, classify, theory_fusion
from .errors import ParseError, TheoryFusionError
from .lattice import quotient_theory, subtheory, theory_sum
from .semantics import DEFAULT_LIMITS, Bounds, consistent, entails
from .syntax import parse_expr, well_formed
from .workspace import load_workspaces, parse_alignment, print_workspace, workspace_of

EXIT_OK, EXIT_USAGE, EXIT_SEMANTIC, EXIT_VERDICT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def render_witness(verdict):
    w = verdict.witness
    return "" if w is None else w.render()


def export_dot(diagram):
    """DOT digraph: nodes labelled ``name\\n(theory, #axioms)``, edges by morphism name."""
    lines = [f'digraph "{diagram.name}" {{']
    for n in diagram.shape.nodes:
        t = diagram.theories[n]
        lines.append(f'  "{n}" [label="{n}\\n({t.name}, {len(t.axioms)})"];')
    for e, m, n in diagram.shape.edges:
        lines.append(f'  "{m}" -> "{n}" [label="{diagram.morphisms[e].underlying.name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _header(argv, bounds):
    return (f"; theoryfusion {__version__}\n"
            f"; command: {shlex.join(argv)}\n"
            f"; bounds: max-size {bounds.max_size}, term-depth {bounds.term_depth}\n")


def _emit(args, argv, bounds, body, comment=True):
    text = (_header(argv, bounds) + "\n" if comment else "") + body
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    for name in names:
        if getattr(args, name) in (None, []):
            raise UsageError(f"{args.verb}: --{name.replace('_', '-')} is required")


def _theory(ws, args):
    _need(args, "theory")
    if len(args.theory) != 1:
        raise UsageError(f"{args.verb}: exactly one --theory expected")
    return ws.get("theory", args.theory[0])


def _verdict_exit(args, verdicts):
    if args.fail_on_no and any(v.no for v in verdicts):
        return EXIT_VERDICT
    if args.fail_on_unknown and any(v.unknown for v in verdicts):
        return EXIT_VERDICT
    return EXIT_OK


def _print_verdict(args, verdict):
    print(verdict.status.value)
    if args.witness and verdict.witness is not None:
        print(render_witness(verdict))


# -- verbs ---------------------------------------------------------------------------


def cmd_check(ws, args, argv, bounds):
    counts = ws.counts()
    plural = {"theory": "theories"}
    print("ok " + " ".join(f"{plural.get(k, k + 's')}={v}" for k, v in counts.items()))
    if not args.verify:
        return EXIT_OK
    verdicts = []
    for dname in sorted(ws.diagrams):
        for e, v in ws.diagrams[dname].verified(bounds, DEFAULT_LIMITS).edge_verdicts().items():
            print(f"{dname} {e} {v.status.value}")
            if args.witness and not v.yes:
                print(render_witness(v))
            verdicts.append(v)
    return _verdict_exit(args, verdicts)


def cmd_fuse(ws, args, argv, bounds):
    _need(args, "diagram")
    d = ws.get("diagram", args.diagram)
    fused, cocone = theory_fusion(d, verify=args.verify, bounds=bounds, limits=DEFAULT_LIMITS)
    out = workspace_of(fused, *(cocone.legs[n] for n in sorted(cocone.legs)))
    _emit(args, argv, bounds, print_workspace(out))
    return EXIT_OK


def cmd_classify(ws, args, argv, bounds):
    _need(args, "diagram")
    c = classify(ws.get("diagram", args.diagram), bounds, DEFAULT_LIMITS)
    print(c.kind.value)
    if args.witness:
        print(f"fusion {c.fusion.status.value}")
        if c.fusion.witness is not None:
            print(render_witness(c.fusion))
        for n, v in c.nodes:
            print(f"node {n} {v.status.value}")
            if v.witness is not None:
                print(render_witness(v))
    if args.fail_on_unknown and c.kind is Cosmos.UNKNOWN:
        return EXIT_VERDICT
    return EXIT_OK


def cmd_entails(ws, args, argv, bounds):
    _need(args, "expr")
    t = _theory(ws, args)
    e = parse_expr(args.expr)
    well_formed(t.language, e)
    v = entails(t, e, bounds, DEFAULT_LIMITS)
    _print_verdict(args, v)
    return _verdict_exit(args, [v])


def cmd_consistent(ws, args, argv, bounds):
    v = consistent(_theory(ws, args), bounds, DEFAULT_LIMITS)
    _print_verdict(args, v)
    return _verdict_exit(args, [v])


def cmd_sum(ws, args, argv, bounds):
    _need(args, "theory")
    named = [(name, ws.get("theory", name)) for name in args.theory]
    total, legs = theory_sum(named)
    _emit(args, argv, bounds, print_workspace(workspace_of(total, *legs)))
    return EXIT_OK


def cmd_quotient(ws, args, argv, bounds):
    _need(args, "endorelation")
    t = _theory(ws, args)
    qt, epi = quotient_theory(t, ws.get("endorelation", args.endorelation))
    _emit(args, argv, bounds, print_workspace(workspace_of(qt, epi)))
    return EXIT_OK


def _indices(text):
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"--indices expects integers, got {text!r}") from None


def cmd_subtheory(ws, args, argv, bounds):
    _need(args, "indices")
    t = _theory(ws, args)
    sub, inc = subtheory(t, _indices(args.indices))
    _emit(args, argv, bounds, print_workspace(workspace_of(sub, inc)))
    return EXIT_OK


def _spec(ws, args):
    _need(args, "left", "right", "pairs")
    left, right = ws.get("theory", args.left), ws.get("theory", args.right)
    try:
        with open(args.pairs, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read pairs file: {exc}") from None
    return parse_alignment(text, left, right)


def cmd_align(ws, args, argv, bounds):
    span = build_span(_spec(ws, args))
    _emit(args, argv, bounds, print_workspace(workspace_of(span)))
    return EXIT_OK


def cmd_merge(ws, args, argv, bounds):
    result = merge(_spec(ws, args), bounds, DEFAULT_LIMITS)
    legs = [result.cocone.legs[n] for n in sorted(result.cocone.legs)]
    _emit(args, argv, bounds, print_workspace(workspace_of(result.theory, *legs)))
    if args.out:
        print(result.classification.kind.value)
        print(result.provenance_table())
    else:
        print(f"; classification: {result.classification.kind.value}")
        for line in result.provenance_table().splitlines():
            print(f"; {line}")
    return EXIT_OK


def cmd_dot(ws, args, argv, bounds):
    _need(args, "diagram")
    _emit(args, argv, bounds, export_dot(ws.get("diagram", args.diagram)), comment=False)
    return EXIT_OK


VERBS = {
    "check": (cmd_check, "parse the workspace; with --verify validate diagram edges"),
    "fuse": (cmd_fuse, "fusion of a diagram: language, theory and cocone legs"),
    "classify": (cmd_classify, "monocosmic, polycosmic or pointwise-inconsistent"),
    "entails": (cmd_entails, "does a theory entail an expression"),
    "consistent": (cmd_consistent, "is a theory consistent"),
    "sum": (cmd_sum, "sum of theories with injections"),
    "quotient": (cmd_quotient, "quotient of a theory by an endorelation"),
    "subtheory": (cmd_subtheory, "axioms chosen by index, with the inclusion"),
    "align": (cmd_align, "alignment span from a pairs file"),
    "merge": (cmd_merge, "alignment then fusion, with provenance"),
    "dot": (cmd_dot, "DOT export of a diagram"),
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--workspace", nargs="+", action="extend", default=[], metavar="PATH")
    common.add_argument("--diagram", metavar="NAME")
    common.add_argument("--theory", action="append", default=[], metavar="NAME")
    common.add_argument("--expr", metavar="SEXPR")
    common.add_argument("--pairs", metavar="FILE")
    common.add_argument("--left", metavar="THEORY")
    common.add_argument("--right", metavar="THEORY")
    common.add_argument("--endorelation", metavar="NAME")
    common.add_argument("--indices", metavar="I,J,...")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--bound-size", type=int, default=3, metavar="K")
    common.add_argument("--bound-depth", type=int, default=1, metavar="D")
    common.add_argument("--verify", action="store_true")
    common.add_argument("--witness", action="store_true")
    common.add_argument("--fail-on-unknown", action="store_true")
    common.add_argument("--fail-on-no", action="store_true")
    parser = _Parser(prog="theoryfusion", description="Fuse and check diagrams of first-order theories.")
    parser.add_argument("--version", action="version", version=f"theoryfusion {__version__}")
    sub = parser.add_subparsers(dest="verb", metavar="VERB", parser_class=_Parser)
    for verb, (_, help_text) in VERBS.items():
        sub.add_parser(verb, parents=[common], help=help_text)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.verb is None:
            raise UsageError("theoryfusion: a verb is required")
        if not args.workspace:
            raise UsageError(f"{args.verb}: --workspace is required")
        try:
            bounds = Bounds(args.bound_size, args.bound_depth)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        try:
            ws = load_workspaces(args.workspace)
        except OSError as exc:
            raise UsageError(f"cannot read workspace: {exc}") from None
        return VERBS[args.verb][0](ws, args, ["theoryfusion"] + argv, bounds)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TheoryFusionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
