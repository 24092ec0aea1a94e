"""Recursive decomposition construction for almost nested separation systems.

A separation system that fails to be nested can still admit a canonical
tree-decomposition, provided its crossings untangle once the graph is
restricted to ever smaller regions.  The recursion tracks a shrinking
region ``beta``: at each step the minimum-order restrictions to ``beta``
form a nested core, the core's blocks become the next candidate regions,
and the process bottoms out where nothing of the system survives
restriction.  When every such chain of regions ends well the system is
called almost nested, and the pieces glue into one decomposition that
displays every block of the original system.
"""

from __future__ import annotations

import math
from typing import Iterable

from .blocks_profiles import s_blocks
from .enumeration import require_within_cap
from .graph_core import (
    Graph,
    Mask,
    Separation,
    format_mask,
    is_proper,
    nested,
    restrict,
)
from .gluing import GluePlan, glue, trivial_decomposition
from .tree_decomp import TreeDecomposition, build_from_nested, induced_system

# A chain of shrinking regions, outermost first.  The first entry is
# always the full vertex set; each later entry is a core block of the
# region before it.
FocusingSequence = tuple[Mask, ...]


class FocusingSequenceError(ValueError):
    """A sequence that breaks the structural focusing axioms."""


def restrict_system(system: Iterable[Separation], region: Mask) -> tuple[Separation, ...]:
    """All proper restrictions of ``system`` to ``region``, deduplicated."""
    seen = set()
    for s in system:
        r = restrict(s, region)
        if is_proper(r):
            seen.add(r)
    return tuple(sorted(seen, key=Separation.sort_key))


def min_ord(system: Iterable[Separation]) -> tuple[Separation, ...]:
    """The members of minimum order, or () if the system is empty."""
    pool = sorted(set(system), key=Separation.sort_key)
    if not pool:
        return ()
    low = pool[0].order()
    return tuple(s for s in pool if s.order() == low)


def core_system(system: Iterable[Separation], region: Mask) -> tuple[Separation, ...]:
    """The nested core at ``region``: minimum-order proper restrictions,
    closed under inversion.

    The result is only guaranteed nested when ``region`` sits on a good
    focusing chain; callers that cannot assume that must check.
    """
    base = min_ord(restrict_system(system, region))
    closed = set(base)
    closed.update(s.inverse() for s in base)
    return tuple(sorted(closed, key=Separation.sort_key))


def _system_nested(core: tuple[Separation, ...], rest: tuple[Separation, ...]) -> bool:
    return all(nested(c, s) for c in core for s in rest)


def _core_blocks(g: Graph, core: tuple[Separation, ...], region: Mask) -> tuple[Mask, ...]:
    return tuple(b.vertices for b in s_blocks(g, core, universe=region))


def check_sequence(g: Graph, system: Iterable[Separation], seq: FocusingSequence) -> None:
    """Raise FocusingSequenceError unless ``seq`` is a focusing sequence.

    Checks the structural axioms only: the sequence must start at the
    full vertex set, every step but the last must have a nonempty core
    nested with the surviving restrictions, and each region must be a
    core block of its predecessor.  Whether the final region is *good*
    is a separate question answered by is_good.
    """
    system = tuple(system)
    if not seq:
        raise FocusingSequenceError("sequence is empty")
    if seq[0] != g.full_mask:
        raise FocusingSequenceError(
            f"sequence must start at the full vertex set, got {format_mask(seq[0])}"
        )
    for i in range(len(seq) - 1):
        beta = seq[i]
        core = core_system(system, beta)
        if not core:
            raise FocusingSequenceError(
                f"region {format_mask(beta)} has an empty core but the sequence continues"
            )
        if not _system_nested(core, restrict_system(system, beta)):
            raise FocusingSequenceError(
                f"core at {format_mask(beta)} crosses a surviving restriction"
            )
        if seq[i + 1] not in _core_blocks(g, core, beta):
            raise FocusingSequenceError(
                f"{format_mask(seq[i + 1])} is not a core block of {format_mask(beta)}"
            )


def is_good(g: Graph, system: Iterable[Separation], seq: FocusingSequence) -> bool:
    """Whether the final region's core is nested with everything that
    survives there.

    A sequence whose final region kills the whole system is good
    vacuously.  Structural violations raise FocusingSequenceError
    rather than returning False.
    """
    system = tuple(system)
    check_sequence(g, system, seq)
    last = seq[-1]
    return _system_nested(core_system(system, last), restrict_system(system, last))


def rank(system: Iterable[Separation], seq: FocusingSequence) -> int | float:
    """Order of the final region's core members; math.inf if none survive."""
    core = core_system(system, seq[-1])
    return core[0].order() if core else math.inf


def is_almost_nested(
    g: Graph, system: Iterable[Separation]
) -> tuple[bool, FocusingSequence | None]:
    """Whether every focusing sequence for ``system`` is good.

    Returns (True, None) or (False, witness) where the witness is a
    focusing sequence that is not good.  Goodness at a region does not
    depend on how the region was reached, so regions are visited once.
    """
    require_within_cap(g.n)
    system = tuple(sorted(set(system), key=Separation.sort_key))
    seen: set[Mask] = set()

    def visit(beta: Mask, path: FocusingSequence) -> FocusingSequence | None:
        if beta in seen:
            return None
        seen.add(beta)
        surviving = restrict_system(system, beta)
        if not surviving:
            return None
        core = core_system(system, beta)
        if not _system_nested(core, surviving):
            return path
        # A bad region cannot be extended, so recursion only happens here.
        for block in _core_blocks(g, core, beta):
            witness = visit(block, path + (block,))
            if witness is not None:
                return witness
        return None

    witness = visit(g.full_mask, (g.full_mask,))
    return (witness is None, witness)


def build_from_almost_nested(g: Graph, system: Iterable[Separation]) -> TreeDecomposition:
    """The canonical tree-decomposition displaying all blocks of an
    almost nested separation system.

    Recurses on regions: where nothing survives the region becomes a
    single part, otherwise the nested core's decomposition is refined by
    gluing recursively built decompositions into its block parts.
    Raises ValueError with a witness sequence if the system is not
    almost nested, and RuntimeError if a construction invariant breaks.
    """
    require_within_cap(g.n)
    system = tuple(sorted(set(system), key=Separation.sort_key))
    ok, witness = is_almost_nested(g, system)
    if not ok:
        assert witness is not None
        chain = " > ".join(format_mask(b) for b in witness)
        raise ValueError(f"system is not almost nested, bad sequence: {chain}")

    block_masks = {b.vertices for b in s_blocks(g, system)}
    memo: dict[Mask, TreeDecomposition] = {}

    def build(beta: Mask) -> TreeDecomposition:
        got = memo.get(beta)
        if got is not None:
            return got
        surviving = restrict_system(system, beta)
        if not surviving:
            # Dead-end regions are exactly the system's blocks.
            if beta not in block_masks:
                raise RuntimeError(
                    f"construction bug: dead-end region {format_mask(beta)} "
                    "is not a block"
                )
            td = trivial_decomposition(beta)
        else:
            # Members surviving into this region keep their separators
            # inside it; gluing separator equality depends on that.
            for s in system:
                if is_proper(restrict(s, beta)) and (s.separator() & ~beta):
                    raise RuntimeError(
                        f"construction bug: separator {format_mask(s.separator())} "
                        f"leaks out of region {format_mask(beta)}"
                    )
            core = core_system(system, beta)
            host = build_from_nested(g, core, universe=beta)
            block_parts = set(_core_blocks(g, core, beta))
            torsos = tuple(
                build(part) if part in block_parts else trivial_decomposition(part)
                for part in host.parts
            )
            td = glue(g, GluePlan(host, torsos))
        memo[beta] = td
        return td

    out = build(g.full_mask)
    for a, b in induced_system(out):
        sep = a & b
        if not any(m.separator() == sep for m in system):
            raise RuntimeError(
                f"construction bug: induced separator {format_mask(sep)} matches "
                "no system member"
            )
    missing = block_masks - set(out.parts)
    if missing:
        raise RuntimeError(
            f"construction bug: block {format_mask(min(missing))} is not a part"
        )
    for t, part in enumerate(out.parts):
        if part not in block_masks and not out.is_hub_node(t):
            raise RuntimeError(
                f"construction bug: part {format_mask(part)} is neither a "
                "block nor a hub"
            )
    return out


def reachable_regions(g: Graph, system: Iterable[Separation]) -> tuple[Mask, ...]:
    """All regions any focusing sequence can visit, for diagnostics."""
    require_within_cap(g.n)
    system = tuple(sorted(set(system), key=Separation.sort_key))
    seen: set[Mask] = set()
    stack = [g.full_mask]
    while stack:
        beta = stack.pop()
        if beta in seen:
            continue
        seen.add(beta)
        surviving = restrict_system(system, beta)
        if not surviving:
            continue
        core = core_system(system, beta)
        if not _system_nested(core, surviving):
            continue
        stack.extend(_core_blocks(g, core, beta))
    return tuple(sorted(seen, key=lambda m: (m.bit_count(), m)))
