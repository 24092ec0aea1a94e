"""End-to-end decomposition runs and their re-verifiable reports.

The sequence: pick the profile set for the requested mode, gather the
component separations of the blocks backing those profiles, build the
scaffold tree by focusing, then refine its induced system until every
pair of profiles is distinguished efficiently.  Every claim the final
report makes is re-checked by an independent oracle; a failed check
inside :func:`decompose` is a bug, not an input problem, and raises
with the offending object attached.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Union

from .blocks_profiles import (
    Block,
    Profile,
    block_profile,
    enumerate_profiles,
    is_r_robust,
    k_blocks,
    maximal_robust_profiles,
    s_blocks,
)
from .enumeration import (
    apply_perm_to_mask,
    apply_perm_to_separation,
    automorphisms,
    generating_permutations,
    min_distinguisher_order,
    require_within_cap,
)
from .focusing import build_from_almost_nested, is_almost_nested
from .graph_core import (
    Graph,
    Mask,
    Separation,
    bit_list,
    format_mask,
    format_separation,
    is_proper,
    separates,
)
from .refine import refine_nested
from .tree_decomp import (
    TreeDecomposition,
    build_from_nested,
    induced_system,
    td_from_obj,
    validate,
)

# mode is either the k of "distinguish all k-profiles" or this marker
MAXIMAL_ROBUST = "maximal-robust"
Mode = Union[int, str]

EXIT_OK = 0
EXIT_GUARANTEE_FAILED = 2
EXIT_PRECONDITION_FAILED = 3


class PipelineBugError(RuntimeError):
    """An internal assertion failed; carries the offending object."""

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness


def parse_mode(text: str) -> Mode:
    if text == MAXIMAL_ROBUST:
        return MAXIMAL_ROBUST
    return int(text)


def mode_label(mode: Mode) -> str:
    if mode == MAXIMAL_ROBUST:
        return MAXIMAL_ROBUST
    return f"k-profiles({mode})"


def _check_mode(g: Graph, mode: Mode) -> None:
    if isinstance(mode, bool) or not isinstance(mode, (int, str)):
        raise ValueError(f"mode must be an int k or {MAXIMAL_ROBUST!r}")
    if isinstance(mode, int):
        if not 1 <= mode <= g.n:
            raise ValueError(f"k must be between 1 and {g.n}, got {mode}")
    elif mode != MAXIMAL_ROBUST:
        raise ValueError(f"unknown mode {mode!r}")


def mask_to_hex(mask: Mask) -> str:
    return format(mask, "#x")


def mask_from_hex(text: str) -> Mask:
    value = int(text, 16)
    if value < 0:
        raise ValueError(f"vertex set must be non-negative, got {text}")
    return value


def _block_vertices(b: "Block | Mask") -> Mask:
    return b.vertices if isinstance(b, Block) else b


def component_separations(g: Graph, b: "Block | Mask") -> tuple[Separation, ...]:
    """One separation (C + N(C), V - C) per component C of G - b.

    These are nested among themselves: distinct components have
    disjoint strict small sides.  Inverses are added only when the
    result is consumed as a symmetric system.
    """
    bv = _block_vertices(b)
    full = g.full_mask
    out = [
        Separation(c | g.neighbourhood(c), full & ~c)
        for c in g.components(full & ~bv)
    ]
    return tuple(sorted(out, key=Separation.sort_key))


def is_separable(g: Graph, b: "Block | Mask", k: int | None = None) -> bool:
    """Does some tree-decomposition of adhesion below k have b as a part?

    Equivalent criterion: every component separation of b has order
    below k.  When b is a tagged block its own order is the default.
    """
    if k is None:
        tag = b.with_respect_to if isinstance(b, Block) else None
        if not isinstance(tag, int):
            raise ValueError("k is required when the block does not carry one")
        k = tag
    return all(s.order() < k for s in component_separations(g, b))


def star_decomposition(g: Graph, b: "Block | Mask") -> TreeDecomposition:
    """The separability witness: central part b, one leaf per component."""
    bv = _block_vertices(b)
    leaves = tuple(s.a for s in component_separations(g, bv))
    td = TreeDecomposition(
        (bv,) + leaves, tuple((0, i + 1) for i in range(len(leaves)))
    )
    report = validate(g, td)
    if report.failures:
        raise PipelineBugError(
            "star decomposition invalid: " + "; ".join(report.failures), td
        )
    return td


def s_of_blocks(g: Graph, bs: Iterable[Block]) -> tuple[Separation, ...]:
    """Union of the below-order component separations of the given blocks.

    Closed under inverses.  The blocks must be pairwise distinguishable
    through their induced profiles; an offending pair is rejected.
    """
    keys = set()
    for blk in bs:
        if not isinstance(blk.with_respect_to, int):
            raise ValueError("blocks must carry the order they were found at")
        keys.add((blk.vertices, blk.with_respect_to))
    tagged = [(bv, k, block_profile(g, bv, k)) for bv, k in sorted(keys)]
    for i, (bv, _, p) in enumerate(tagged):
        for cv, _, q in tagged[i + 1 :]:
            if p == q or min_distinguisher_order(g, p.members, q.members) is None:
                raise ValueError(
                    f"indistinguishable blocks {format_mask(bv)} and {format_mask(cv)}"
                )
    members: set[Separation] = set()
    for bv, k, _ in tagged:
        for s in component_separations(g, bv):
            if s.order() >= k:
                continue
            # the separator is the neighbourhood of a component of G - b
            assert s.separator() & ~bv == 0
            members.add(s)
            members.add(s.inverse())
    return tuple(sorted(members, key=Separation.sort_key))


@dataclass(frozen=True)
class GuaranteeCheck:
    name: str
    passed: bool
    witness: str | None = None


@dataclass(frozen=True)
class DistinguishedPair:
    """Profile pair, the oracle's minimum order, and the achieving member."""

    first: int
    second: int
    order: int | None
    separation: Separation | None


@dataclass(frozen=True)
class DisplayedBlock:
    """A separable block and the distinct part values containing it."""

    block: Mask
    k: int
    node: int | None
    containing_values: tuple[Mask, ...]


@dataclass(frozen=True)
class DecompositionReport:
    """Everything claimed about one decomposition, in checkable form.

    Profiles are listed in a deterministic order so pair entries can
    reference them by index; re-verification recomputes the same list
    from the graph and the mode.
    """

    mode: str
    decomposition: TreeDecomposition
    profiles: tuple[Profile, ...]
    distinguished_pairs: tuple[DistinguishedPair, ...]
    separable_blocks: tuple[DisplayedBlock, ...]
    canonicity: GuaranteeCheck
    guarantees: tuple[GuaranteeCheck, ...]

    def all_pass(self) -> bool:
        return self.canonicity.passed and all(c.passed for c in self.guarantees)

    def failures(self) -> tuple[GuaranteeCheck, ...]:
        rows = self.guarantees + (self.canonicity,)
        return tuple(c for c in rows if not c.passed)

    def exit_code(self) -> int:
        return EXIT_OK if self.all_pass() else EXIT_GUARANTEE_FAILED


def _mode_profiles(g: Graph, mode: Mode) -> tuple[Profile, ...]:
    if isinstance(mode, int):
        found = enumerate_profiles(g, mode)
    else:
        found = maximal_robust_profiles(g)
    return tuple(sorted(found, key=Profile.sort_key))


def _backing_blocks(g: Graph, profiles: Iterable[Profile]) -> tuple[Block, ...]:
    """Blocks whose induced profile is one of the given profiles."""
    wanted = set(profiles)
    found: dict[tuple[Mask, int], Block] = {}
    for k in sorted({p.k for p in wanted}):
        for blk in k_blocks(g, k):
            if block_profile(g, blk.vertices, k) in wanted:
                found[(blk.vertices, k)] = blk
    return tuple(found[key] for key in sorted(found))


def _mode_r(g: Graph, mode: Mode) -> int:
    # every k-profile is (k-1)-robust; over a finite graph robust means n-robust
    return mode - 1 if isinstance(mode, int) else g.n


def decompose(g: Graph, mode: Mode) -> DecompositionReport:
    """Canonical tree-decomposition distinguishing the mode's profiles.

    Mode ``k`` targets all k-profiles and bounds the adhesion below k;
    ``maximal-robust`` targets all maximal robust profiles.  In both
    modes every separable block backing a targeted profile appears
    verbatim as a part, and any two targeted profiles are distinguished
    efficiently.  The returned report has every guarantee checked.
    """
    require_within_cap(g.n)
    _check_mode(g, mode)
    if g.n < 1:
        raise ValueError("graph has no vertices")
    if not g.is_connected():
        raise ValueError("input graph must be connected")

    profiles = _mode_profiles(g, mode)
    backing = _backing_blocks(g, profiles)
    separable = [blk for blk in backing if is_separable(g, blk)]

    r = _mode_r(g, mode)
    for p in profiles:
        if not is_r_robust(g, p, r):
            raise PipelineBugError(
                f"mode produced a profile of order {p.k} that is not {r}-robust", p
            )
    for i, p in enumerate(profiles):
        for q in profiles[i + 1 :]:
            if min_distinguisher_order(g, p.members, q.members) is None:
                raise PipelineBugError(
                    "mode produced an indistinguishable profile pair", (p, q)
                )

    system = s_of_blocks(g, backing)

    # every separable backing block must survive as a block of the system
    surviving = {blk.vertices for blk in s_blocks(g, system)}
    for blk in separable:
        if blk.vertices not in surviving:
            raise PipelineBugError(
                f"separable block {format_mask(blk.vertices)} is cut by the "
                "collected component separations",
                blk,
            )

    nested_ok, chain = is_almost_nested(g, system)
    if not nested_ok:
        raise PipelineBugError(
            "component separations of the backing blocks are not almost nested",
            chain,
        )
    scaffold = build_from_almost_nested(g, system)
    base = tuple(s for s in induced_system(scaffold) if is_proper(s))

    # refinement needs each separator inside a block backing a profile
    for s in base:
        if not any(s.separator() & ~blk.vertices == 0 for blk in backing):
            raise PipelineBugError(
                f"scaffold separator of {format_separation(s)} lies in no "
                "backing block",
                s,
            )

    refined = refine_nested(g, base, profiles)

    old = set(base)
    for s in refined:
        if s in old:
            continue
        for blk in separable:
            if separates(s, blk.vertices):
                raise PipelineBugError(
                    f"refinement member {format_separation(s)} separates the "
                    f"separable block {format_mask(blk.vertices)}",
                    (s, blk),
                )

    td = build_from_nested(g, refined)
    report = _guarantee_report(g, td, mode, profiles, backing)
    if not report.all_pass():
        names = ", ".join(c.name for c in report.failures())
        raise PipelineBugError(f"final guarantees failed: {names}", report)
    return report


def verify(g: Graph, td: TreeDecomposition, mode: Mode) -> DecompositionReport:
    """Re-check every guarantee of :func:`decompose` against a given tree.

    Report-style: each guarantee gets a pass/fail row with a witness,
    and nothing is raised for a tree that merely fails them.
    """
    require_within_cap(g.n)
    _check_mode(g, mode)
    if g.n < 1:
        raise ValueError("graph has no vertices")
    if not g.is_connected():
        raise ValueError("input graph must be connected")
    profiles = _mode_profiles(g, mode)
    backing = _backing_blocks(g, profiles)
    return _guarantee_report(g, td, mode, profiles, backing)


def _guarantee_report(
    g: Graph,
    td: TreeDecomposition,
    mode: Mode,
    profiles: tuple[Profile, ...],
    backing: tuple[Block, ...],
) -> DecompositionReport:
    checks: list[GuaranteeCheck] = []

    vr = validate(g, td)
    valid = not vr.failures
    checks.append(
        GuaranteeCheck(
            "decomposition-valid", valid, None if valid else "; ".join(vr.failures)
        )
    )
    skipped = "not evaluated: decomposition invalid"

    r = _mode_r(g, mode)
    frail = [p for p in profiles if not is_r_robust(g, p, r)]
    checks.append(
        GuaranteeCheck(
            "profiles-robust",
            not frail,
            None if not frail else f"{len(frail)} profile(s) not {r}-robust",
        )
    )

    induced = induced_system(td) if valid else ()
    proper = tuple(s for s in induced if is_proper(s))

    pair_rows: list[DistinguishedPair] = []
    dist_fail: list[str] = []
    eff_fail: list[str] = []
    for i, p in enumerate(profiles):
        for j in range(i + 1, len(profiles)):
            q = profiles[j]
            d = min_distinguisher_order(g, p.members, q.members)
            if d is None:
                dist_fail.append(f"({i},{j})")
                pair_rows.append(DistinguishedPair(i, j, None, None))
                continue
            hit = next(
                (
                    s
                    for s in proper
                    if s.order() == d and s in p.members and s.inverse() in q.members
                ),
                None,
            )
            if hit is None:
                eff_fail.append(f"({i},{j}) at order {d}")
            pair_rows.append(DistinguishedPair(i, j, d, hit))
    checks.append(
        GuaranteeCheck(
            "profile-set-distinguishable",
            not dist_fail,
            None if not dist_fail else "indistinguishable pairs " + ", ".join(dist_fail),
        )
    )
    checks.append(
        GuaranteeCheck(
            "efficient-distinction",
            valid and not eff_fail,
            (None if not eff_fail else "undistinguished pairs " + ", ".join(eff_fail))
            if valid
            else skipped,
        )
    )

    block_rows: list[DisplayedBlock] = []
    blk_fail: list[str] = []
    for blk in backing:
        if not is_separable(g, blk):
            continue
        bv = blk.vertices
        if valid:
            values = tuple(sorted(part for part in set(td.parts) if bv & ~part == 0))
            node = next((t for t, part in enumerate(td.parts) if part == bv), None)
            if values != (bv,):
                blk_fail.append(format_mask(bv))
        else:
            values, node = (), None
        block_rows.append(DisplayedBlock(bv, blk.with_respect_to, node, values))
    checks.append(
        GuaranteeCheck(
            "separable-blocks-displayed",
            valid and not blk_fail,
            (None if not blk_fail else "not a unique part value: " + ", ".join(blk_fail))
            if valid
            else skipped,
        )
    )

    if isinstance(mode, int):
        worst = max((s.order() for s in induced), default=0)
        checks.append(
            GuaranteeCheck(
                "adhesion-bound",
                valid and worst < mode,
                (None if worst < mode else f"adhesion {worst} not below {mode}")
                if valid
                else skipped,
            )
        )

    if valid:
        order = len(automorphisms(g).permutations)
        canon_ok = True
        witness = f"invariant under all {order} automorphisms"
        part_multiset = sorted(td.parts)
        member_set = set(induced)
        # invariance under the generators extends to the whole group
        for perm in generating_permutations(g):
            if sorted(apply_perm_to_mask(perm, part) for part in td.parts) != part_multiset:
                canon_ok = False
                witness = f"automorphism {perm} moves the part multiset"
                break
            moved = next(
                (
                    s
                    for s in member_set
                    if apply_perm_to_separation(perm, s) not in member_set
                ),
                None,
            )
            if moved is not None:
                canon_ok = False
                witness = (
                    f"automorphism {perm} moves {format_separation(moved)} "
                    "out of the induced system"
                )
                break
        canonicity = GuaranteeCheck("canonical", canon_ok, witness)
    else:
        canonicity = GuaranteeCheck("canonical", False, skipped)

    return DecompositionReport(
        mode=mode_label(mode),
        decomposition=td,
        profiles=profiles,
        distinguished_pairs=tuple(pair_rows),
        separable_blocks=tuple(block_rows),
        canonicity=canonicity,
        guarantees=tuple(checks),
    )


def _sep_to_obj(s: Separation) -> dict:
    return {"a": mask_to_hex(s.a), "b": mask_to_hex(s.b)}


def report_to_obj(report: DecompositionReport) -> dict:
    """JSON-ready dict with a fixed field order and hex vertex sets."""
    td = report.decomposition
    return {
        "mode": report.mode,
        "all_pass": report.all_pass(),
        "decomposition": {
            "nodes": [
                {"id": t, "part": mask_to_hex(part)} for t, part in enumerate(td.parts)
            ],
            "edges": [list(e) for e in sorted(td.edges)],
        },
        "profiles": [{"k": p.k, "size": len(p.members)} for p in report.profiles],
        "distinguished_pairs": [
            {
                "first": row.first,
                "second": row.second,
                "order": row.order,
                "separation": None
                if row.separation is None
                else _sep_to_obj(row.separation),
            }
            for row in report.distinguished_pairs
        ],
        "separable_blocks": [
            {
                "block": mask_to_hex(row.block),
                "k": row.k,
                "node": row.node,
                "containing_values": [mask_to_hex(v) for v in row.containing_values],
            }
            for row in report.separable_blocks
        ],
        "canonicity": {
            "pass": report.canonicity.passed,
            "witness": report.canonicity.witness,
        },
        "guarantees": [
            {"name": c.name, "pass": c.passed, "witness": c.witness}
            for c in report.guarantees
        ],
    }


def report_to_json(report: DecompositionReport) -> str:
    return json.dumps(report_to_obj(report), indent=2) + "\n"


def decomposition_from_obj(obj: dict) -> TreeDecomposition:
    """Read a tree back from a report or a bare decomposition object.

    Parts may be hex bitsets (report encoding) or vertex lists (the
    tree_decomp file encoding).
    """
    if "decomposition" in obj:
        obj = obj["decomposition"]
    converted = {
        "nodes": [
            {
                "id": entry["id"],
                "part": bit_list(mask_from_hex(entry["part"]))
                if isinstance(entry["part"], str)
                else entry["part"],
            }
            for entry in obj["nodes"]
        ],
        "edges": obj["edges"],
    }
    return td_from_obj(converted)
