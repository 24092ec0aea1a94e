"""Command-line surface: block listings, decomposition runs, verification.

Exit codes follow the pipeline convention: 0 when every guarantee
holds, 2 when a guarantee or internal invariant fails, 3 for bad
input, bad flags, or a graph above the vertex cap.

Reports go to stdout (or --out) and stay byte-identical across runs;
status chatter goes to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import NoReturn, Sequence

from .blocks_profiles import k_blocks
from .enumeration import DEFAULT_CAP, CapExceededError, set_cap
from .fixtures import FIXTURES, fixture, random_corpus
from .graph_core import (
    Graph,
    GraphParseError,
    bit_list,
    format_mask,
    parse_graph_json,
    parse_graph_text,
)
from .pipeline import (
    EXIT_GUARANTEE_FAILED,
    EXIT_OK,
    EXIT_PRECONDITION_FAILED,
    MAXIMAL_ROBUST,
    Mode,
    PipelineBugError,
    decompose,
    decomposition_from_obj,
    is_separable,
    mode_label,
    report_to_json,
    verify,
)
from .refine import RefinementSearchError
from .tree_decomp import to_dot


@dataclass
class RunConfig:
    """Resolved invocation: what to run on what, and where output goes."""

    input: str | None = None
    mode: Mode | None = None
    out: str | None = None
    dot: str | None = None
    td: str | None = None
    cap: int = DEFAULT_CAP
    seed: int = 0
    instances: int = 25
    n_lo: int = 4
    n_hi: int = 8


class _Parser(argparse.ArgumentParser):
    # usage errors are precondition failures, not exit code 2
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_PRECONDITION_FAILED, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def resolve_cap(flag_value: int | None, unsafe: bool) -> int:
    """Pick the vertex cap: --cap wins, then BLOCKFORGE_CAP, then the default.

    Caps above the default need --unsafe-cap; the exhaustive scans grow
    roughly as 3^n, so a larger cap is an explicit opt-in.
    """
    if flag_value is not None:
        cap = flag_value
    else:
        raw = os.environ.get("BLOCKFORGE_CAP")
        if raw is None:
            cap = DEFAULT_CAP
        else:
            try:
                cap = int(raw)
            except ValueError:
                raise ValueError(f"BLOCKFORGE_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"cap must be at least 1, got {cap}")
    if cap > DEFAULT_CAP and not unsafe:
        raise ValueError(
            f"cap {cap} exceeds the safe bound {DEFAULT_CAP}; pass --unsafe-cap to accept the blow-up"
        )
    return cap


def load_graph(spec: str) -> Graph:
    """Read a graph from a file, or fall back to an embedded fixture name."""
    path = Path(spec)
    if path.is_file():
        text = path.read_text()
        if path.suffix == ".json" or text.lstrip().startswith("{"):
            return parse_graph_json(text)
        return parse_graph_text(text)
    try:
        return fixture(spec)
    except KeyError:
        known = ", ".join(sorted(FIXTURES))
        raise GraphParseError(
            f"input {spec!r} is neither a readable file nor a fixture name ({known})"
        ) from None


def cmd_blocks(cfg: RunConfig) -> int:
    """List the k-blocks of the input graph with separability flags."""
    g = load_graph(cfg.input)
    k = cfg.mode
    assert isinstance(k, int)
    blocks = sorted(k_blocks(g, k), key=lambda b: bit_list(b.vertices))
    word = "block" if len(blocks) == 1 else "blocks"
    print(f"{len(blocks)} {word} at k={k} in a graph with {g.n} vertices")
    for b in blocks:
        flag = "separable" if is_separable(g, b) else "not separable"
        print(f"  {format_mask(b.vertices)}  {flag}")
    return EXIT_OK


def cmd_decompose(cfg: RunConfig) -> int:
    """Decompose the input graph and emit the report (and optional DOT)."""
    g = load_graph(cfg.input)
    report = decompose(g, cfg.mode)
    text = report_to_json(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
        print(f"wrote report to {cfg.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    if cfg.dot:
        Path(cfg.dot).write_text(to_dot(report.decomposition))
        print(f"wrote DOT to {cfg.dot}", file=sys.stderr)
    return report.exit_code()


def cmd_verify(cfg: RunConfig) -> int:
    """Check a stored decomposition against the graph, one line per guarantee."""
    g = load_graph(cfg.input)
    obj = json.loads(Path(cfg.td).read_text())
    td = decomposition_from_obj(obj)
    report = verify(g, td, cfg.mode)
    for row in report.guarantees + (report.canonicity,):
        status = "pass" if row.passed else f"FAIL ({row.witness})"
        print(f"{row.name}: {status}")
    if report.all_pass():
        print("verify: all guarantees hold")
    else:
        print(f"verify: {len(report.failures())} guarantee(s) failed")
    return report.exit_code()


def cmd_selftest(cfg: RunConfig) -> int:
    """Decompose a seeded random corpus in every mode; abort on any failure.

    Deterministic for a fixed seed.  On failure the offending graph is
    printed as JSON so the run can be replayed.
    """
    if cfg.n_hi < cfg.n_lo:
        raise ValueError(f"empty vertex range [{cfg.n_lo},{cfg.n_hi}]")
    graphs = random_corpus(cfg.seed, cfg.instances, cfg.n_lo, cfg.n_hi)
    print(f"selftest: seed={cfg.seed} instances={cfg.instances} n in [{cfg.n_lo},{cfg.n_hi}]")
    runs = 0
    for i, g in enumerate(graphs, start=1):
        modes: list[Mode] = [*range(2, g.n + 1), MAXIMAL_ROBUST]
        for mode in modes:
            try:
                report = decompose(g, mode)
                failed = not report.all_pass()
            except (PipelineBugError, RefinementSearchError) as exc:
                print(f"selftest FAILED on instance {i} ({mode_label(mode)}): {exc}")
                failed = True
            if failed:
                print(f"selftest FAILED on instance {i} ({mode_label(mode)})")
                print(f"witness graph: {g.to_json()}")
                return EXIT_GUARANTEE_FAILED
            runs += 1
        print(f"instance {i}/{cfg.instances}: n={g.n} edges={g.edge_count()} modes={len(modes)} ok")
    print(f"selftest passed: {cfg.instances} instances, {runs} decompositions")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="blockforge",
        description="Canonical tree-decompositions displaying blocks and profiles.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--cap",
        type=_positive_int,
        default=None,
        help=f"vertex cap for exhaustive scans (default {DEFAULT_CAP}, or BLOCKFORGE_CAP)",
    )
    common.add_argument(
        "--unsafe-cap",
        action="store_true",
        help=f"allow a cap above {DEFAULT_CAP} despite the exponential cost",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_blocks = sub.add_parser(
        "blocks", parents=[common], help="list k-blocks with separability flags"
    )
    p_blocks.add_argument("input", help="graph file (JSON or edge list) or fixture name")
    p_blocks.add_argument("-k", "--k", type=_positive_int, required=True, help="block order")
    p_blocks.set_defaults(func=cmd_blocks)

    p_dec = sub.add_parser(
        "decompose", parents=[common], help="compute a canonical decomposition"
    )
    p_dec.add_argument("input", help="graph file (JSON or edge list) or fixture name")
    mode = p_dec.add_mutually_exclusive_group(required=True)
    mode.add_argument("-k", "--k", type=_positive_int, help="distinguish the k-profiles")
    mode.add_argument(
        "--maximal-robust", action="store_true", help="distinguish the maximal robust profiles"
    )
    p_dec.add_argument("--out", help="write the JSON report here instead of stdout")
    p_dec.add_argument("--dot", help="also write the tree as graphviz DOT")
    p_dec.set_defaults(func=cmd_decompose)

    p_ver = sub.add_parser(
        "verify", parents=[common], help="check a stored decomposition's guarantees"
    )
    p_ver.add_argument("input", help="graph file (JSON or edge list) or fixture name")
    p_ver.add_argument("td", help="decomposition or report JSON to check")
    mode = p_ver.add_mutually_exclusive_group(required=True)
    mode.add_argument("-k", "--k", type=_positive_int, help="check against the k-profiles")
    mode.add_argument(
        "--maximal-robust", action="store_true", help="check against the maximal robust profiles"
    )
    p_ver.set_defaults(func=cmd_verify)

    p_self = sub.add_parser(
        "selftest", parents=[common], help="run the seeded random-graph suite"
    )
    p_self.add_argument("--seed", type=int, default=0, help="corpus seed (default 0)")
    p_self.add_argument(
        "--instances", type=_positive_int, default=25, help="number of graphs (default 25)"
    )
    p_self.add_argument("--n-lo", type=_positive_int, default=4, help="smallest graph size")
    p_self.add_argument("--n-hi", type=_positive_int, default=8, help="largest graph size")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def _config_from_args(args: argparse.Namespace, cap: int) -> RunConfig:
    mode: Mode | None = None
    if getattr(args, "maximal_robust", False):
        mode = MAXIMAL_ROBUST
    elif getattr(args, "k", None) is not None:
        mode = args.k
    return RunConfig(
        input=getattr(args, "input", None),
        mode=mode,
        out=getattr(args, "out", None),
        dot=getattr(args, "dot", None),
        td=getattr(args, "td", None),
        cap=cap,
        seed=getattr(args, "seed", 0),
        instances=getattr(args, "instances", 25),
        n_lo=getattr(args, "n_lo", 4),
        n_hi=getattr(args, "n_hi", 8),
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    old_cap = None
    try:
        cap = resolve_cap(args.cap, args.unsafe_cap)
        old_cap = set_cap(cap)
        return args.func(_config_from_args(args, cap))
    except (PipelineBugError, RefinementSearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARANTEE_FAILED
    except (GraphParseError, CapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION_FAILED
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION_FAILED
    finally:
        if old_cap is not None:
            set_cap(old_cap)


if __name__ == "__main__":
    sys.exit(main())
