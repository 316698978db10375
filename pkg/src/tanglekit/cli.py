"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import PresentationError, TangleKitError, UnsupportedDeletion
from .export import (cut_dot, gamma_limit_data, gamma_limit_dot, inverse_system_data,
                     inverse_system_dot)
from .inverse_system import critical_sets, ends
from .presentation import Presentation
from .tangle_space import resolve, tangles
from .topology_cuts import distinguish, finite_cut_equivalent

EXIT_OK, EXIT_INPUT, EXIT_NOT_SEPARABLE, EXIT_UNKNOWN = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    json_errors = False

    def error(self, message):
        if _Parser.json_errors:
            sys.stderr.write(json.dumps({"error": {"type": "UsageError", "message": message}}) + "\n")
            self.exit(EXIT_INPUT)
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fmt_set(p, X):
    return "{" + ", ".join(sorted(X, key=p.rank)) + "}"


def _plural(n, word):
    return f"{n} {word}" + ("" if n == 1 else "s")


def _report(p, args, command, payload):
    return {"tool": "tanglekit", "version": __version__, "command": command,
            "presentation": {"digest": p.digest, "kind": p.kind},
            "parameters": {"depth": args.depth, "criticalBound": args.critical_bound,
                           **getattr(args, "extra_params", {})},
            "payload": payload}


def _emit(args, report, text):
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(text + "\n")


def _tangle_text(T):
    parts = []
    count = T.ends.count
    if count:
        parts.append(f"{count} end tangle" + ("" if count == 1 else "s"))
    if T.blocks:
        parts.append(_plural(len(T.blocks), "free-ultrafilter block"))
    return ", ".join(parts) if parts else "empty"


def cmd_analyze(p, args):
    e = ends(p, args.depth)
    c = critical_sets(p, args.critical_bound)
    T = tangles(p, args.depth, args.critical_bound)
    crit = ", ".join(_fmt_set(p, cs.X) for cs in c.sets)
    text = (f"ends: {e.count}, critical sets: {len(c.sets)}" + (f" ({crit})" if crit else "")
            + f", tangle space: {_tangle_text(T)}")
    payload = {"ends": e.to_json(), "criticalSets": c.to_json(p), "tangleSpace": T.to_json(p)}
    _emit(args, _report(p, args, "analyze", payload), text)
    return EXIT_OK


def _prefix_text(n, families):
    # a family of ends, once present, carries countably many threads through every later level
    if not families:
        return str(n)
    return "omega" if n == 0 else f"{n}+omega"


def cmd_ends(p, args):
    e = ends(p, args.depth)
    lines = [f"ends: {e.count}"]
    lines += [f"  {h.ref} ({h.kind}): {h.tail_rule}" for h in e.ends + e.families]
    fams = [any(e.thread_families[:n + 1]) for n in range(len(e.thread_families))]
    lines.append("thread prefixes at X_0..X_%d: %s" % (args.depth, " ".join(
        _prefix_text(n, f) for n, f in zip(e.level_threads, fams))))
    _emit(args, _report(p, args, "ends", e.to_json()), "\n".join(lines))
    return EXIT_OK


def cmd_critical_sets(p, args):
    c = critical_sets(p, args.critical_bound)
    lines = [f"critical sets: {len(c.sets)}"]
    lines += [f"  {_fmt_set(p, cs.X)}: " + ", ".join(d.key for d in cs.families) for cs in c.sets]
    lines.append(f"searched {c.searched} subsets of X_{args.critical_bound} plus declared candidates; "
                 f"complete: {'yes' if c.complete else 'no'}")
    _emit(args, _report(p, args, "critical-sets", c.to_json(p)), "\n".join(lines))
    return EXIT_OK


def cmd_tangles(p, args):
    T = tangles(p, args.depth, args.critical_bound)
    lines = [f"tangle space: {_tangle_text(T)}"]
    for h in T.handles():
        lines.append(f"  {h.ref}")
    _emit(args, _report(p, args, "tangles", T.to_json(p)), "\n".join(lines))
    return EXIT_OK


def cmd_distinguish(p, args):
    t1, t2 = resolve(p, args.first), resolve(p, args.second)
    if t1 == t2:
        raise TangleKitError("identical tangles")
    res = distinguish(p, t1, t2, args.depth)
    args.extra_params = {"first": args.first, "second": args.second}
    if res.separable:
        w = res.witness.to_json()
        text = (f"X = {{{', '.join(w['X'])}}}\n  {t1.ref}: {' '.join(w['first']) or '(nothing)'}\n"
                f"  {t2.ref}: {' '.join(w['second']) or '(nothing)'}")
    else:
        text = f"not separable at selector granularity: {t1.ref} vs {t2.ref}"
    _emit(args, _report(p, args, "distinguish", res.to_json()), text)
    return EXIT_OK if res.separable else EXIT_NOT_SEPARABLE


def cmd_cutsep(p, args):
    res = finite_cut_equivalent(p, args.u, args.v, args.effort)
    args.extra_params = {"u": args.u, "v": args.v, "effort": args.effort, "paths": args.paths}
    if res.verdict == "separated":
        text = (f"separated: |F| = {len(res.cut.edges)}, F = "
                + ", ".join(f"{a}-{b}" for a, b in res.cut.edges))
    elif res.verdict == "equivalent":
        paths = res.schedule.paths(args.paths, p)
        text = f"equivalent: {len(paths)} pairwise edge-disjoint paths shown\n" + "\n".join(
            "  " + " - ".join(path) for path in paths)
    else:
        text = f"unknown: edge-connectivity at least {res.lower_bound}"
    if args.dot and res.verdict == "separated":
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(cut_dot(p, res))
    _emit(args, _report(p, args, "cutsep", res.to_json(p, args.paths)), text)
    return EXIT_UNKNOWN if res.verdict == "unknown" else EXIT_OK


def cmd_export(p, args):
    if args.what == "inverse-system":
        out = inverse_system_dot(p, args.depth) if args.format == "dot" else inverse_system_data(p, args.depth)
    else:
        out = gamma_limit_dot(p, args.depth) if args.format == "dot" else gamma_limit_data(p, args.depth)
    if args.format == "json":
        args.extra_params = {"what": args.what, "format": args.format}
        out = json.dumps(_report(p, args, "export", out), indent=2, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="presentation JSON file")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--depth", type=int, default=6, help="truncation depth (default 6)")
    common.add_argument("--critical-bound", type=int, default=4,
                        help="critical-set search bound: subsets of X_n (default 4)")
    parser = _Parser(prog="tanglekit", description="Ends and tangles of finitely presented infinite graphs.")
    parser.add_argument("--version", action="version", version=f"tanglekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("analyze", parents=[common], help="ends, critical sets and tangle space")
    sub.add_parser("ends", parents=[common], help="list ends")
    sub.add_parser("critical-sets", parents=[common], help="list critical vertex sets")
    sub.add_parser("tangles", parents=[common], help="list tangle handles")
    d = sub.add_parser("distinguish", parents=[common], help="separate two tangles")
    d.add_argument("first")
    d.add_argument("second")
    c = sub.add_parser("cutsep", parents=[common], help="finite-cut equivalence of two vertices")
    c.add_argument("u")
    c.add_argument("v")
    c.add_argument("--effort", type=int, default=6, help="extra truncation levels to search")
    c.add_argument("--paths", type=int, default=10, help="paths to list for equivalent pairs")
    c.add_argument("--dot", help="write the cut as a DOT file")
    e = sub.add_parser("export", parents=[common], help="export the inverse system or a Gamma limit")
    e.add_argument("--what", choices=["inverse-system", "gamma-limit"], default="inverse-system")
    e.add_argument("--format", choices=["dot", "json"], default="dot")
    e.add_argument("--output", "-o", help="output file (default stdout)")
    return parser


COMMANDS = {"analyze": cmd_analyze, "ends": cmd_ends, "critical-sets": cmd_critical_sets,
            "tangles": cmd_tangles, "distinguish": cmd_distinguish, "cutsep": cmd_cutsep,
            "export": cmd_export}


def _fail(args, exc):
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, PresentationError):
        err.update({k: v for k, v in (("line", exc.line), ("column", exc.column), ("path", exc.path))
                    if v is not None})
    if isinstance(exc, UnsupportedDeletion):
        err["deleted"] = sorted(exc.deleted)
    if getattr(args, "json", False):
        sys.stderr.write(json.dumps({"error": err}) + "\n")
    else:
        sys.stderr.write(f"error: {err['message']}\n")
    return EXIT_INPUT


def main(argv=None):
    parser = build_parser()
    _Parser.json_errors = "--json" in (sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors and --help; report the code instead of exiting from library calls
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    for name in ("depth", "critical_bound", "effort", "paths"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            return _fail(args, TangleKitError(f"--{name.replace('_', '-')} must be non-negative"))
    try:
        p = Presentation.load(args.file)
        return COMMANDS[args.command](p, args)
    except OSError as exc:
        return _fail(args, TangleKitError(f"cannot read {args.file}: {exc.strerror}"))
    except TangleKitError as exc:
        return _fail(args, exc)


if __name__ == "__main__":
    sys.exit(main())
