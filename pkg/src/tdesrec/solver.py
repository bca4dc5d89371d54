"""Reconfiguration path solving by recursive backtracking forcibility.

Given a supervisor, a source state, and a target state at which a
reconfiguration event is defined, the solver backtracks from the target
through the timed eligibility set: a step into a state is backtrackable when
its event is forcible, or when every other event eligible at the predecessor
is prohibitible (so the supervisor can guarantee the step by disabling the
competition; an eligible tick with a different target rules the step out,
since tick is neither forcible nor prohibitible).

Backtracking builds a tree rooted at the target; pruning branches that never
reach the source leaves the proper tree, whose states form the attraction
field.  Reversed branches are the direct solution paths; a forward sweep
inside the attraction field collects any further simple paths whose steps all
satisfy the same condition.  The machinery never inspects timers, so it runs
unchanged on tick-free (projected) supervisors.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Sequence

from .automata import Generator, project_detail
from .events import TICK, EventTable, event_name
from .synthesis import Supervisor

Path = tuple[int, ...]


@dataclass(frozen=True)
class ReconfigProblem:
    """A supervisor with current state, target state, and reconfiguration event."""

    supervisor: Supervisor
    source: int
    target: int
    reconfig_event: int

    def __post_init__(self) -> None:
        gen = self.supervisor.automaton
        for name, q in (("source", self.source), ("target", self.target)):
            if not (0 <= q < gen.n_states):
                raise ValueError(f"{name} state {q} is not a supervisor state")
        if gen.target(self.target, self.reconfig_event) is None:
            raise ValueError(
                f"reconfiguration event {event_name(self.reconfig_event)} "
                f"is not eligible at target state {self.target}")


@dataclass(frozen=True)
class EligibilitySet:
    """Backtrackable (predecessor, event) pairs anchored at one state."""

    anchor: int
    entries: frozenset[tuple[int, int]]

    @property
    def predecessors(self) -> frozenset[int]:
        """The selector image: first components of all entries."""
        return frozenset(q for q, _ in self.entries)


@dataclass(frozen=True)
class BFTNode:
    """One tree node: a supervisor state linked to its parent by the backtracked event."""

    state: int
    parent: int
    event: int | None


@dataclass(frozen=True)
class BFT:
    """Backtracking forcibility tree; node 0 is the root (the target state)."""

    root: int
    nodes: tuple[BFTNode, ...]

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.nodes]
        for i, node in enumerate(self.nodes):
            if node.parent >= 0:
                kids[node.parent].append(i)
        return kids

    def branch_states(self, leaf: int) -> tuple[int, ...]:
        """States from the root down to ``leaf``."""
        rev = []
        i = leaf
        while i >= 0:
            rev.append(self.nodes[i].state)
            i = self.nodes[i].parent
        return tuple(reversed(rev))

    def branch_events(self, leaf: int) -> tuple[int, ...]:
        """Edge labels from the root down to ``leaf`` (backtracked events)."""
        rev = []
        i = leaf
        while self.nodes[i].parent >= 0:
            rev.append(self.nodes[i].event)
            i = self.nodes[i].parent
        return tuple(reversed(rev))

    def leaves(self) -> list[int]:
        kids = self.children()
        return [i for i in range(len(self.nodes)) if not kids[i]]


@dataclass(frozen=True)
class ForciblePathSet:
    """Solution paths of one reconfiguration problem.

    ``paths`` is sorted by (length, events); ``direct`` flags the paths read
    off the proper tree, the remainder were found by the forward sweep.  The
    attraction field is the state set of the proper tree; every prefix of
    every path stays inside it.
    """

    source: int
    target: int
    reconfig_event: int
    paths: tuple[Path, ...]
    attraction_field: frozenset[int]
    solvable: bool
    direct: frozenset[Path] = field(default_factory=frozenset)

    def __iter__(self):
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    @staticmethod
    def tick_count(path: Path) -> int:
        return sum(1 for e in path if e == TICK)

    def serialize(self) -> str:
        """One line per path: comma-separated labels, tick as the literal token."""
        return "\n".join(",".join(event_name(e) for e in p) for p in self.paths)

    def to_json(self) -> str:
        payload = {
            "source": self.source,
            "target": self.target,
            "reconfig_event": self.reconfig_event,
            "solvable": self.solvable,
            "attraction_field": sorted(self.attraction_field),
            "paths": [
                {
                    "events": [event_name(e) for e in p],
                    "length": len(p),
                    "ticks": self.tick_count(p),
                    "direct": p in self.direct,
                }
                for p in self.paths
            ],
        }
        return json.dumps(payload, indent=2)


def _edge_backtrackable(out_of_pred: Sequence[tuple[int, int]], events: EventTable,
                        ev: int, anchor: int) -> bool:
    """Condition for backtracking ``anchor`` to a predecessor via ``ev``.

    Either the event is forcible, or every event eligible at the predecessor
    whose target differs from ``anchor`` is prohibitible.  ``out_of_pred``
    lists the predecessor's outgoing (event, target) pairs.
    """
    if events.is_forcible(ev):
        return True
    for other, dst in out_of_pred:
        if dst == anchor:
            continue
        if not events.is_prohibitible(other):
            return False
    return True


def eligibility_set(sup: Supervisor, state: int) -> EligibilitySet:
    """All backtrackable (predecessor, event) pairs leading into ``state``."""
    gen = sup.automaton
    if not (0 <= state < gen.n_states):
        raise ValueError(f"unknown supervisor state {state}")
    adj = gen.out_edges()
    entries = set()
    for (pred, ev), dst in gen.transitions.items():
        if dst != state:
            continue
        if _edge_backtrackable(adj[pred], sup.events, ev, state):
            entries.add((pred, ev))
    return EligibilitySet(state, frozenset(entries))


def build_bft(problem: ReconfigProblem, max_nodes: int | None = None) -> BFT:
    """Depth-first expansion of the backtracking forcibility tree.

    Each node expands through the eligibility set of its state; a branch ends
    at the source state, or when no candidate is left that is absent from the
    branch (so no branch ever repeats a state).  The tree enumerates simple
    backward paths and can grow exponentially on dense supervisors;
    ``max_nodes`` is a resource guard (exceeding it raises ``ValueError``).
    """
    sup = problem.supervisor
    gen = sup.automaton
    q_s = problem.source

    # Backtrackable predecessor lists, computed once per anchor state.
    adj = gen.out_edges()
    incoming: dict[int, list[tuple[int, int]]] = {}
    for (pred, ev), dst in gen.transitions.items():
        incoming.setdefault(dst, []).append((pred, ev))
    elig_cache: dict[int, list[tuple[int, int]]] = {}

    def backtrackable(anchor: int) -> list[tuple[int, int]]:
        if anchor not in elig_cache:
            elig_cache[anchor] = sorted(
                (p, e) for (p, e) in incoming.get(anchor, [])
                if _edge_backtrackable(adj[p], sup.events, e, anchor)
            )
        return elig_cache[anchor]

    nodes = [BFTNode(problem.target, -1, None)]
    stack: list[tuple[int, frozenset[int]]] = [(0, frozenset({problem.target}))]
    while stack:
        i, on_branch = stack.pop()
        state = nodes[i].state
        if state == q_s:
            continue
        for pred, ev in backtrackable(state):
            if pred in on_branch:
                continue
            nodes.append(BFTNode(pred, i, ev))
            if max_nodes is not None and len(nodes) > max_nodes:
                raise ValueError(f"backtracking tree exceeds {max_nodes} nodes")
            stack.append((len(nodes) - 1, on_branch | {pred}))
    return BFT(problem.target, tuple(nodes))


def prune_to_pbft(tree: BFT, source: int) -> BFT:
    """Maximal subtree in which every leaf is the source state."""
    if tree.is_empty:
        return tree
    keep = [False] * len(tree.nodes)
    # Children appear after their parent, so one reverse pass suffices.
    for i in range(len(tree.nodes) - 1, -1, -1):
        if tree.nodes[i].state == source:
            keep[i] = True
        parent = tree.nodes[i].parent
        if keep[i] and parent >= 0:
            keep[parent] = True
    if not keep[0]:
        return BFT(tree.root, ())
    remap: dict[int, int] = {}
    new_nodes: list[BFTNode] = []
    for i, node in enumerate(tree.nodes):
        if not keep[i]:
            continue
        remap[i] = len(new_nodes)
        parent = remap[node.parent] if node.parent >= 0 else -1
        new_nodes.append(BFTNode(node.state, parent, node.event))
    return BFT(tree.root, tuple(new_nodes))


def attraction_field(pbft: BFT) -> frozenset[int]:
    """All states occurring in the proper tree."""
    return frozenset(node.state for node in pbft.nodes)


def _forward_paths(gen: Generator, events: EventTable, source: int, target: int,
                   field_states: frozenset[int],
                   max_nodes: int | None = None) -> set[Path]:
    """Simple paths source-to-target inside the field with backtrackable steps."""
    full_adj = gen.out_edges()
    adj: dict[int, list[tuple[int, int]]] = {}
    for (src, ev), dst in gen.transitions.items():
        if src in field_states and dst in field_states:
            adj.setdefault(src, []).append((ev, dst))
    for lst in adj.values():
        lst.sort()
    found: set[Path] = set()
    path: list[int] = []
    visited = {source}
    steps = 0

    def walk(state: int) -> None:
        nonlocal steps
        steps += 1
        if max_nodes is not None and steps > max_nodes:
            raise ValueError(f"path enumeration exceeds {max_nodes} steps")
        if state == target:
            found.add(tuple(path))
            return
        for ev, dst in adj.get(state, ()):
            if dst in visited:
                continue
            if not _edge_backtrackable(full_adj[state], events, ev, dst):
                continue
            visited.add(dst)
            path.append(ev)
            walk(dst)
            path.pop()
            visited.discard(dst)

    if source in field_states:
        walk(source)
    return found


def trs(problem: ReconfigProblem, max_nodes: int | None = None) -> ForciblePathSet:
    """Timed reconfiguration solver: all simple forcible paths source-to-target.

    Computes the backtracking forcibility tree, prunes it to its proper part,
    reads the direct paths off the reversed branches, and adds branching
    paths found by a forward traversal confined to the attraction field.  An
    unsolvable problem yields an empty, distinguished result (no exception).
    ``max_nodes`` guards against combinatorial blowup on dense supervisors.
    """
    bft = build_bft(problem, max_nodes)
    pbft = prune_to_pbft(bft, problem.source)
    field_states = attraction_field(pbft)
    if pbft.is_empty:
        return ForciblePathSet(problem.source, problem.target,
                               problem.reconfig_event, (), frozenset(), False)
    direct: set[Path] = set()
    for leaf in pbft.leaves():
        # Proper-tree leaves are all the source; the reversed branch runs
        # source-to-target.
        direct.add(tuple(reversed(pbft.branch_events(leaf))))
    gen = problem.supervisor.automaton
    all_paths = _forward_paths(gen, problem.supervisor.events,
                               problem.source, problem.target, field_states,
                               max_nodes)
    all_paths |= direct
    ordered = tuple(sorted(all_paths, key=lambda p: (len(p), p)))
    return ForciblePathSet(problem.source, problem.target,
                           problem.reconfig_event, ordered, field_states,
                           True, frozenset(direct))


def select_optimal(paths: ForciblePathSet, criterion: str) -> Path:
    """Best path under ``min_ticks`` or ``min_length``.

    Ties fall back to the other measure and then to lexicographic event
    order, so the choice is total and deterministic.
    """
    if not paths.paths:
        raise ValueError("no solution")
    if criterion == "min_ticks":
        key = lambda p: (ForciblePathSet.tick_count(p), len(p), p)
    elif criterion == "min_length":
        key = lambda p: (len(p), ForciblePathSet.tick_count(p), p)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    return min(paths.paths, key=key)


def erase_ticks(path: Path) -> Path:
    return tuple(e for e in path if e != TICK)


def state_witness(gen: Generator, state: int) -> Path:
    """A shortest string from the initial state to ``state`` (BFS order)."""
    if gen.is_empty:
        raise ValueError("empty generator has no states")
    if state == gen.initial:
        return ()
    adj = gen.out_edges()
    back: dict[int, tuple[int, int]] = {}
    queue = [gen.initial]
    seen = {gen.initial}
    while queue:
        nxt: list[int] = []
        for q in queue:
            for ev, dst in adj[q]:
                if dst not in seen:
                    seen.add(dst)
                    back[dst] = (q, ev)
                    if dst == state:
                        rev = []
                        cur = dst
                        while cur != gen.initial:
                            prev, e = back[cur]
                            rev.append(e)
                            cur = prev
                        return tuple(reversed(rev))
                    nxt.append(dst)
        queue = nxt
    raise ValueError(f"state {state} unreachable")


@dataclass(frozen=True)
class CommutativityReport:
    """Evidence for tick-projection commutativity of the solver.

    ``timed_projected`` holds the tick-erased images of the timed solutions;
    ``projected`` the solutions computed on the tick-projected supervisor.
    The timing fields record the wall time of each solver run, supporting the
    efficiency comparison between the two orders of composition.
    """

    timed_projected: frozenset[Path]
    projected: frozenset[Path]
    equal: bool
    projected_source: int
    projected_target: int
    seconds_trs_timed: float
    seconds_trs_projected: float
    seconds_projection: float

    def describe(self) -> list[str]:
        lines = [
            f"project-after-solve: {len(self.timed_projected)} tick-free path(s)",
            f"solve-after-project: {len(self.projected)} path(s)",
            f"sets equal: {'yes' if self.equal else 'no'}",
            f"wall time solve-then-project: {self.seconds_trs_timed:.6f} s",
            f"wall time project-then-solve: {self.seconds_trs_projected:.6f} s",
            f"wall time of the projection itself: {self.seconds_projection:.6f} s",
        ]
        return lines


def verify_projection_commutativity(problem: ReconfigProblem,
                                    max_nodes: int | None = None) -> CommutativityReport:
    """Compare solving before and after erasing ticks from the supervisor.

    The source and target are transported to the projected supervisor along
    the projection of their shortest witness strings; the two resulting path
    sets are compared as sets of tick-free strings.
    """
    sup = problem.supervisor
    gen = sup.automaton

    t0 = time.perf_counter()
    timed = trs(problem, max_nodes)
    t_timed = time.perf_counter() - t0
    if not timed.solvable:
        raise ValueError("problem is unsolvable on the timed side")

    t0 = time.perf_counter()
    if any(e == TICK for (_, e) in gen.transitions):
        pgen = project_detail(gen, {TICK}).generator
    else:
        # Nothing to erase: the supervisor is its own projection, so both
        # orders run on identical structure.
        pgen = gen
    t_project = time.perf_counter() - t0

    def image(q: int) -> int:
        witness = erase_ticks(state_witness(gen, q))
        img = pgen.run(witness)
        if img is None:
            raise ValueError(f"state lost under projection: {q}")
        return img

    p_source = image(problem.source)
    p_target = image(problem.target)
    projected_problem = ReconfigProblem(
        Supervisor.from_generator(pgen, sup.events),
        p_source, p_target, problem.reconfig_event)

    t0 = time.perf_counter()
    projected = trs(projected_problem, max_nodes)
    t_projected = time.perf_counter() - t0

    left = frozenset(erase_ticks(p) for p in timed.paths)
    right = frozenset(projected.paths)
    return CommutativityReport(left, right, left == right, p_source, p_target,
                               t_timed, t_projected, t_project)
