"""
Floerkit - Command Line Module

One binary, one subcommand per operation. Complexes are read from files
in the text format ('-' reads stdin). Exit codes: 0 success, 1 domain
error or failed check, 2 usage error.
"""

import argparse
import json
import logging
import os
import sys
from typing import Callable, Dict, List, Optional

from floerkit import config
from floerkit.classify import classify, filtered_equivalent
from floerkit.complex import (
    KnotComplex,
    almost_staircase_1,
    almost_staircase_2,
    box,
    direct_sum,
    figure_eight,
    mirror,
    parse,
    render_grid,
    serialize,
    staircase,
    tensor,
    trefoil,
    unknot,
    validate,
)
from floerkit.enumerate import SearchSpec, enumerate_candidates, verify_theorem
from floerkit.errors import BadSteps, FloerError
from floerkit.invariants import genus, hfk, hook_profile, tau
from floerkit.regions import Region, exact_triangle, region_homology, triangle_suite
from floerkit.surgery import detect, parse_slope, pegboard_params, stability_check, surgery_rank

logger = logging.getLogger(__name__)


class Output:
    """Collects what a command prints, as text or as one JSON document"""

    def __init__(self, as_json: bool, ascii_grid: bool):
        self.as_json = as_json
        self.ascii_grid = ascii_grid

    def emit(self, text: str, data: Optional[object] = None):
        if self.as_json:
            print(json.dumps(data if data is not None else text, sort_keys=True, indent=2))
        else:
            print(text)

    def complex(self, c: KnotComplex):
        if self.as_json:
            self.emit("", c.to_dict())
        elif self.ascii_grid:
            self.emit(render_grid(c))
        else:
            sys.stdout.write(serialize(c))


def read_complex(path: str) -> KnotComplex:
    if path == "-":
        return parse(sys.stdin.read())
    with open(path) as fh:
        return parse(fh.read())


def parse_steps(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise BadSteps(f"cannot read step list {text!r}") from None


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_validate(args, out: Output) -> int:
    report = validate(read_complex(args.file))
    lines = ["valid"] if report.ok else [str(v) for v in report.violations]
    out.emit("\n".join(lines), report.to_dict())
    return 0 if report.ok else 1


def cmd_invariants(args, out: Output) -> int:
    c = read_complex(args.file)
    table, profile = hfk(c), hook_profile(c)
    g, t = genus(c), tau(c)
    text = f"genus: {g}\ntau: {t}\nhfk:\n{table}\nhook profile: {profile}"
    if out.ascii_grid:
        text += "\n" + render_grid(c)
    out.emit(text, {"genus": g, "tau": t, "hfk": table.to_dict(), "hook_profile": profile.to_dict()})
    return 0


def cmd_region(args, out: Output) -> int:
    homology = region_homology(read_complex(args.file), Region.parse(args.region))
    out.emit(str(homology), {"region": args.region, "homology": homology.to_dict()})
    return 0


def cmd_triangle(args, out: Output) -> int:
    c = read_complex(args.file)
    if args.m is not None:
        suite = triangle_suite(c, args.m)
        lines = [
            f"{t.sub} -> {t.total}: {t.sub_homology} -> {t.total_homology} -> {t.quotient_homology}"
            for t in (suite.first, suite.second, suite.row)
        ]
        lines.append(f"connecting composite zero: {suite.composite_zero}")
        out.emit("\n".join(lines), suite.to_dict())
        return 0 if suite.composite_zero else 1
    if not args.sub or not args.total:
        raise FloerError("triangle needs --sub and --total, or --m")
    report = exact_triangle(c, Region.parse(args.sub), Region.parse(args.total))
    out.emit(
        f"H(sub) = {report.sub_homology}\nH(total) = {report.total_homology}\n"
        f"H(quotient) = {report.quotient_homology}\nexact",
        report.to_dict(),
    )
    return 0


def cmd_classify(args, out: Output) -> int:
    result = classify(read_complex(args.file))
    if args.witness and result.witness is not None:
        with open(args.witness, "w") as fh:
            fh.write(serialize(result.witness))
    if args.log and result.simplified is not None:
        with open(args.log, "w") as fh:
            fh.writelines(f"{move}\n" for move in result.simplified.log)
    text = result.verdict.value + (" (overlap)" if result.overlap else "")
    out.emit(text, result.to_dict())
    return 0


def cmd_detect(args, out: Output) -> int:
    detection = detect(read_complex(args.file))
    out.emit(str(detection), detection.to_dict())
    return 0


def cmd_surgery(args, out: Output) -> int:
    p, q = parse_slope(args.pq)
    params = pegboard_params(read_complex(args.file))
    rank = surgery_rank(params, p, q)
    out.emit(str(rank), {"p": p, "q": q, "params": params.to_dict(), "rank": rank})
    return 0


def cmd_stability(args, out: Output) -> int:
    samples = [parse_slope(s) for s in args.samples]
    report = stability_check(read_complex(args.file), samples)
    lines = [f"{r.p}/{r.q}: {r.actual} (expected {r.expected})" for r in report.results]
    if report.boundary:
        b = report.boundary
        lines.append(f"boundary {b.p}: {b.actual} (expected {b.expected})")
    lines.append("ok" if report.ok else "FAILED")
    out.emit("\n".join(lines), report.to_dict())
    return 0 if report.ok else 1


def cmd_make(args, out: Output) -> int:
    kind = args.kind
    params = args.params
    steps = parse_steps(args.steps) if args.steps else None
    if kind == "staircase":
        if len(params) != 1:
            raise BadSteps("make staircase takes one comma-separated step list")
        c = staircase(parse_steps(params[0]))
    elif kind == "box":
        if len(params) != 2:
            raise BadSteps("make box takes an Alexander and a Maslov grading")
        c = box(int(params[0]), int(params[1]))
    elif kind == "almost1":
        c = almost_staircase_1(args.n if args.n is not None else 0, steps)
    elif kind == "almost2":
        c = almost_staircase_2(args.n if args.n is not None else 1, steps)
    else:
        c = {"figure8": figure_eight, "unknot": unknot, "trefoil": trefoil}[kind]()
    out.complex(c)
    return 0


def cmd_mirror(args, out: Output) -> int:
    out.complex(mirror(read_complex(args.file)))
    return 0


def cmd_tensor(args, out: Output) -> int:
    out.complex(tensor(read_complex(args.first), read_complex(args.second)))
    return 0


def cmd_sum(args, out: Output) -> int:
    out.complex(direct_sum(read_complex(args.first), read_complex(args.second)))
    return 0


def cmd_equiv(args, out: Output) -> int:
    same = filtered_equivalent(read_complex(args.first), read_complex(args.second))
    out.emit("equivalent" if same else "not equivalent", {"equivalent": same})
    return 0 if same else 1


def _search_spec(args) -> SearchSpec:
    return SearchSpec(genus=args.genus, max_step=args.max_step, lspace=args.lspace)


def cmd_enumerate(args, out: Output) -> int:
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    count = 0
    for count, c in enumerate(enumerate_candidates(_search_spec(args)), start=1):
        if args.out:
            with open(os.path.join(args.out, f"candidate_{count:04d}.cfk"), "w") as fh:
                fh.write(serialize(c))
    out.emit(f"{count} candidates", {"candidates": count})
    return 0


def cmd_verify_theorem(args, out: Output) -> int:
    report = verify_theorem(_search_spec(args))
    summary = report.to_dict()
    lines = [f"candidates: {report.candidates}"]
    lines += [f"  {name}: {n}" for name, n in sorted(report.counts.items())]
    lines.append(f"violations: {len(report.violations)}")
    if report.grading_cases or report.uncovered_cases:
        cases = ", ".join(f"{k}:{v}" for k, v in sorted(report.grading_cases.items()))
        lines.append(f"grading cases: {cases or '-'}; uncovered: {len(report.uncovered_cases)}")
    lines.append(f"delta0: {report.delta0_passed} passed, {len(report.delta0_failed)} failed")
    lines.append(f"lemma failures: {len(report.lemma_failures)}, "
                 f"triangle failures: {len(report.triangle_failures)}, tau failures: {len(report.tau_failures)}")
    if report.genus_one_found or report.genus_one_missing:
        lines.append(f"genus one models: {', '.join(report.genus_one_found) or '-'}; "
                     f"missing: {', '.join(report.genus_one_missing) or '-'}; "
                     f"other candidates: {len(report.genus_one_unmatched)}")
    out.emit("\n".join(lines), summary)
    return 0 if report.ok else 1


def cmd_serve(args, out: Output) -> int:
    from floerkit.server import run
    run(host=args.host, port=args.port)
    return 0


COMMANDS: Dict[str, Callable] = {
    "validate": cmd_validate,
    "invariants": cmd_invariants,
    "region": cmd_region,
    "triangle": cmd_triangle,
    "classify": cmd_classify,
    "detect": cmd_detect,
    "surgery": cmd_surgery,
    "stability": cmd_stability,
    "make": cmd_make,
    "mirror": cmd_mirror,
    "tensor": cmd_tensor,
    "sum": cmd_sum,
    "equiv": cmd_equiv,
    "enumerate": cmd_enumerate,
    "verify-theorem": cmd_verify_theorem,
    "serve": cmd_serve,
}


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floerkit",
        description="Knot Floer complexes: invariants, surgery ranks and almost L-space classification.",
    )
    parser.add_argument("--json", action="store_true", help="Print machine-readable JSON")
    parser.add_argument("--verbose", action="store_true", help="Log debug detail to stderr")
    parser.add_argument("--ascii", action="store_true", help="Print complexes as a plain-text grid")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def with_file(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="Complex file ('-' for stdin)")
        return p

    with_file("validate", "Check gradings, filtration and d^2 = 0")
    with_file("invariants", "Genus, tau, HFK table and hook profile")
    p = with_file("region", "Homology of a region subquotient")
    p.add_argument("--region", required=True, help='e.g. "i<=0,j=2 | i=0,j<=1"')
    p = with_file("triangle", "Verify an exact triangle")
    p.add_argument("--sub", help="Subcomplex region")
    p.add_argument("--total", help="Ambient region")
    p.add_argument("--m", type=int, help="Run the X_m / Y_m / UX_m triangles instead")
    p = with_file("classify", "Classify an almost L-space complex")
    p.add_argument("--witness", help="Write the matched template here")
    p.add_argument("--log", help="Write the basis-change log here")
    with_file("detect", "L-space / almost L-space detector")
    p = with_file("surgery", "HF-hat rank of p/q surgery")
    p.add_argument("--pq", required=True, help="Slope, e.g. 7/2")
    p = with_file("stability", "Check rank = p + 2q on sample slopes")
    p.add_argument("--samples", nargs="+", required=True, help="Slopes, e.g. 1/1 3/2 5")
    with_file("mirror", "Mirror complex")

    p = sub.add_parser("make", help="Emit a constructor output")
    p.add_argument("kind", choices=["staircase", "box", "almost1", "almost2", "figure8", "unknot", "trefoil"])
    p.add_argument("params", nargs="*", help="staircase: 1,1  box: A M")
    p.add_argument("--n", type=int, help="Arm length of an almost staircase")
    p.add_argument("--steps", help="Comma-separated almost staircase gaps")

    for name, help_text in (("tensor", "Tensor product"), ("sum", "Direct sum"),
                            ("equiv", "Filtered chain homotopy equivalence test")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("first")
        p.add_argument("second")

    for name, help_text in (("enumerate", "Enumerate candidate complexes"),
                            ("verify-theorem", "Classify every enumerated candidate")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--genus", type=int, required=True)
        p.add_argument("--max-step", type=int, default=config.DEFAULT_MAX_STEP)
        p.add_argument("--lspace", action="store_true", help="Search for L-space complexes instead")
        if name == "enumerate":
            p.add_argument("--out", help="Directory for candidate files")

    p = sub.add_parser("serve", help="Run the HTTP JSON API")
    p.add_argument("--host", default=config.HOST)
    p.add_argument("--port", type=int, default=config.PORT)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(level=config.get_log_level(args.verbose), format=config.LOG_FORMAT)
    out = Output(args.json, args.ascii)
    try:
        return COMMANDS[args.command](args, out)
    except FloerError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
