"""Finite deterministic generators and the language operations built on them.

States are dense integer indices.  Every operation renumbers its result in
BFS order from the initial state, so equal inputs give structurally equal
outputs and published orderings are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .events import TICK, event_name


@dataclass(frozen=True)
class Generator:
    """Deterministic partial transition structure over integer event labels.

    ``transitions`` maps ``(state, event) -> state``.  A generator with zero
    states denotes the empty language (no strings at all, not even the empty
    one); it appears as the result of synthesis over incompatible behaviors.
    """

    n_states: int
    alphabet: frozenset[int]
    transitions: Mapping[tuple[int, int], int]
    initial: int = 0
    marked: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n_states < 0:
            raise ValueError("negative state count")
        if self.n_states == 0:
            if self.transitions or self.marked:
                raise ValueError("empty generator cannot carry transitions or marked states")
            return
        if not (0 <= self.initial < self.n_states):
            raise ValueError(f"initial state {self.initial} out of range")
        if not all(0 <= q < self.n_states for q in self.marked):
            raise ValueError("marked state out of range")
        for (src, ev), dst in self.transitions.items():
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise ValueError(f"transition ({src},{ev})->{dst} out of range")
            if ev not in self.alphabet:
                raise ValueError(f"transition event {ev} not in alphabet")

    @property
    def is_empty(self) -> bool:
        return self.n_states == 0

    def target(self, state: int, event: int) -> int | None:
        return self.transitions.get((state, event))

    def eligible(self, state: int) -> frozenset[int]:
        """Events with a defined outgoing transition at ``state``."""
        return frozenset(e for (s, e) in self.transitions if s == state)

    def run(self, string: Iterable[int], start: int | None = None) -> int | None:
        """Follow ``string`` from ``start`` (default: initial); None if undefined."""
        if self.is_empty:
            return None
        q = self.initial if start is None else start
        for e in string:
            nxt = self.transitions.get((q, e))
            if nxt is None:
                return None
            q = nxt
        return q

    def accepts(self, string: Iterable[int]) -> bool:
        q = self.run(string)
        return q is not None and q in self.marked

    def out_edges(self) -> list[list[tuple[int, int]]]:
        """Per-state sorted list of (event, target) pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_states)]
        for (src, ev), dst in self.transitions.items():
            adj[src].append((ev, dst))
        for lst in adj:
            lst.sort()
        return adj


def renumber_bfs(g: Generator) -> Generator:
    """Restrict to the reachable part and renumber states in BFS order."""
    if g.is_empty:
        return g
    adj = g.out_edges()
    order: dict[int, int] = {g.initial: 0}
    queue = deque([g.initial])
    while queue:
        q = queue.popleft()
        for _, dst in adj[q]:
            if dst not in order:
                order[dst] = len(order)
                queue.append(dst)
    transitions = {
        (order[s], e): order[t]
        for (s, e), t in g.transitions.items()
        if s in order and t in order
    }
    marked = frozenset(order[q] for q in g.marked if q in order)
    return Generator(len(order), g.alphabet, transitions, 0, marked)


def reachable_states(g: Generator) -> frozenset[int]:
    if g.is_empty:
        return frozenset()
    adj = g.out_edges()
    seen = {g.initial}
    queue = deque([g.initial])
    while queue:
        q = queue.popleft()
        for _, dst in adj[q]:
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return frozenset(seen)


def coreachable_states(g: Generator) -> frozenset[int]:
    """States from which some marked state is reachable."""
    back: list[list[int]] = [[] for _ in range(g.n_states)]
    for (src, _), dst in g.transitions.items():
        back[dst].append(src)
    seen = set(g.marked)
    queue = deque(seen)
    while queue:
        q = queue.popleft()
        for src in back[q]:
            if src not in seen:
                seen.add(src)
                queue.append(src)
    return frozenset(seen)


def trim(g: Generator) -> Generator:
    """Keep states that are both reachable and coreachable."""
    if g.is_empty:
        return g
    keep = reachable_states(g) & coreachable_states(g)
    if g.initial not in keep:
        return Generator(0, g.alphabet, {}, 0, frozenset())
    transitions = {
        (s, e): t for (s, e), t in g.transitions.items() if s in keep and t in keep
    }
    pruned = Generator(g.n_states, g.alphabet, transitions, g.initial,
                       g.marked & keep)
    return renumber_bfs(pruned)


def is_nonblocking(g: Generator) -> bool:
    """True iff every reachable state can reach a marked state."""
    if g.is_empty:
        return True
    return reachable_states(g) <= coreachable_states(g)


def sync_product(components: Sequence[Generator]) -> Generator:
    """Synchronous composition: shared events synchronize, private ones interleave.

    An event moves exactly the components carrying it in their alphabet and is
    eligible only when all of those components can execute it.  Marked states
    are products of marked states.  Only the reachable part is built.
    """
    if not components:
        raise ValueError("no components")
    if any(c.is_empty for c in components):
        alphabet = frozenset().union(*(c.alphabet for c in components))
        return Generator(0, alphabet, {}, 0, frozenset())
    alphabet = frozenset().union(*(c.alphabet for c in components))
    movers = {e: [i for i, c in enumerate(components) if e in c.alphabet]
              for e in alphabet}
    start = tuple(c.initial for c in components)
    index: dict[tuple[int, ...], int] = {start: 0}
    queue = deque([start])
    transitions: dict[tuple[int, int], int] = {}
    marked: set[int] = set()
    while queue:
        state = queue.popleft()
        sid = index[state]
        if all(state[i] in c.marked for i, c in enumerate(components)):
            marked.add(sid)
        for e in sorted(alphabet):
            nxt = list(state)
            ok = True
            for i in movers[e]:
                dst = components[i].target(state[i], e)
                if dst is None:
                    ok = False
                    break
                nxt[i] = dst
            if not ok:
                continue
            key = tuple(nxt)
            if key not in index:
                index[key] = len(index)
                queue.append(key)
            transitions[(sid, e)] = index[key]
    return Generator(len(index), alphabet, transitions, 0, frozenset(marked))


def _product_pairs(a: Generator, b: Generator) -> tuple[Generator, tuple[tuple[int, int], ...]]:
    """Fully synchronized product with the (a-state, b-state) pair of each state."""
    alphabet = a.alphabet | b.alphabet
    if a.is_empty or b.is_empty:
        return Generator(0, alphabet, {}, 0, frozenset()), ()
    start = (a.initial, b.initial)
    index: dict[tuple[int, int], int] = {start: 0}
    queue = deque([start])
    transitions: dict[tuple[int, int], int] = {}
    marked: set[int] = set()
    while queue:
        (x, y) = queue.popleft()
        sid = index[(x, y)]
        if x in a.marked and y in b.marked:
            marked.add(sid)
        for e in sorted(alphabet):
            dx = a.target(x, e)
            dy = b.target(y, e)
            if dx is None or dy is None:
                continue
            key = (dx, dy)
            if key not in index:
                index[key] = len(index)
                queue.append(key)
            transitions[(sid, e)] = index[key]
    gen = Generator(len(index), alphabet, transitions, 0, frozenset(marked))
    pairs = tuple(p for p, _ in sorted(index.items(), key=lambda kv: kv[1]))
    return gen, pairs


def meet(a: Generator, b: Generator) -> Generator:
    """Reachable product synchronizing on every event of the union alphabet.

    When the alphabets agree this realizes the language intersection; an event
    private to one operand can never occur in the result.
    """
    gen, _ = _product_pairs(a, b)
    return gen


def allevents(g: Generator) -> Generator:
    """One marked state with a self-loop per alphabet event; language Sigma*."""
    transitions = {(0, e): 0 for e in g.alphabet}
    return Generator(1, g.alphabet, transitions, 0, frozenset({0}))


@dataclass(frozen=True)
class ProjectionDetail:
    """A projected generator plus, per projected state, the source-state subset."""

    generator: Generator
    subsets: tuple[frozenset[int], ...]


def project_detail(g: Generator, erase: Iterable[int]) -> ProjectionDetail:
    """Natural projection erasing ``erase``, keeping the subset-state map.

    Erased transitions become silent moves; the result is determinized by
    subset construction (a subset is marked iff it contains a marked state)
    and reduced to its minimal form.  Both the closed and the marked language
    are preserved exactly, so blocking parts of the source survive.
    """
    erased = frozenset(erase)
    if not erased <= g.alphabet:
        raise ValueError(f"erase set {sorted(erased)} not contained in alphabet")
    alphabet = g.alphabet - erased
    if g.is_empty:
        return ProjectionDetail(Generator(0, alphabet, {}, 0, frozenset()), ())
    adj = g.out_edges()

    def closure(states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        queue = deque(seen)
        while queue:
            q = queue.popleft()
            for e, dst in adj[q]:
                if e in erased and dst not in seen:
                    seen.add(dst)
                    queue.append(dst)
        return frozenset(seen)

    start = closure([g.initial])
    index: dict[frozenset[int], int] = {start: 0}
    subsets: list[frozenset[int]] = [start]
    queue = deque([start])
    transitions: dict[tuple[int, int], int] = {}
    marked: set[int] = set()
    while queue:
        subset = queue.popleft()
        sid = index[subset]
        if subset & g.marked:
            marked.add(sid)
        moves: dict[int, set[int]] = {}
        for q in subset:
            for e, dst in adj[q]:
                if e not in erased:
                    moves.setdefault(e, set()).add(dst)
        for e in sorted(moves):
            key = closure(moves[e])
            if key not in index:
                index[key] = len(index)
                subsets.append(key)
                queue.append(key)
            transitions[(sid, e)] = index[key]
    gen = Generator(len(index), alphabet, transitions, 0, frozenset(marked))
    # The construction is reachable by design; reduce to the minimal form
    # (which preserves the closed language too, so blocking parts survive).
    # Merged states pool their source-state subsets.
    block = _moore_partition(gen)
    min_transitions = {
        (block[s], e): block[t] for (s, e), t in gen.transitions.items()
    }
    min_marked = frozenset(block[s] for s in gen.marked)
    pooled: dict[int, set[int]] = {}
    for s, b in enumerate(block):
        pooled.setdefault(b, set()).update(subsets[s])
    quotient = Generator(max(block) + 1, alphabet, min_transitions,
                         block[0], min_marked)
    final = renumber_bfs(quotient)
    # Recover the BFS renumbering to realign the pooled subsets.
    adj3 = quotient.out_edges()
    remap: dict[int, int] = {quotient.initial: 0}
    bfs = deque([quotient.initial])
    while bfs:
        q = bfs.popleft()
        for _, dst in adj3[q]:
            if dst not in remap:
                remap[dst] = len(remap)
                bfs.append(dst)
    final_subsets: list[frozenset[int]] = [frozenset()] * final.n_states
    for old, new in remap.items():
        final_subsets[new] = frozenset(pooled.get(old, ()))
    return ProjectionDetail(final, tuple(final_subsets))


def _moore_partition(gen: Generator) -> list[int]:
    """Block ids merging states with equal closed and marked futures.

    ``gen`` must already be restricted to its reachable part.  Internally the
    automaton is completed with a dead sink so that definedness patterns are
    part of a state's behavior; the sink never merges with a real state.
    """
    n = gen.n_states
    sink = n
    events = sorted(gen.alphabet)
    total = {
        (s, e): gen.transitions.get((s, e), sink) for s in range(n) for e in events
    }
    for e in events:
        total[(sink, e)] = sink

    def out(s: int) -> int:
        if s == sink:
            return 0
        return 2 if s in gen.marked else 1

    block = {s: out(s) for s in list(range(n)) + [sink]}
    while True:
        mapping: dict[tuple, int] = {}
        new_block = {}
        for s in sorted(block):
            sig = (block[s],) + tuple(block[total[(s, e)]] for e in events)
            if sig not in mapping:
                mapping[sig] = len(mapping)
            new_block[s] = mapping[sig]
        stable = len(set(new_block.values())) == len(set(block.values()))
        block = new_block
        if stable:
            return [block[s] for s in range(n)]


def minimize(g: Generator) -> Generator:
    """Smallest deterministic generator with the same closed and marked languages."""
    if g.is_empty:
        return g
    gen = renumber_bfs(g)
    block = _moore_partition(gen)
    transitions = {
        (block[s], e): block[t] for (s, e), t in gen.transitions.items()
    }
    marked = frozenset(block[s] for s in gen.marked)
    quotient = Generator(max(block) + 1, gen.alphabet, transitions,
                         block[gen.initial], marked)
    return renumber_bfs(quotient)


def project(g: Generator, erase: Iterable[int]) -> Generator:
    """Deterministic generator of the projected closed and marked languages."""
    return project_detail(g, erase).generator


def _moore_canonical(g: Generator) -> tuple:
    """Canonical minimal form distinguishing closed and marked behavior.

    The reachable part is completed with a dead sink; states carry the output
    (alive, marked) and are merged by standard partition refinement.  Two
    generators share a canonical form iff both languages coincide.
    """
    if g.is_empty or not reachable_states(g):
        return ("empty", tuple(sorted(g.alphabet)))
    gen = renumber_bfs(g)
    n = gen.n_states
    sink = n
    events = sorted(gen.alphabet)
    total = {
        (s, e): gen.transitions.get((s, e), sink) for s in range(n) for e in events
    }
    for e in events:
        total[(sink, e)] = sink

    def out(s: int) -> int:
        if s == sink:
            return 0
        return 2 if s in gen.marked else 1

    block = {s: out(s) for s in list(range(n)) + [sink]}
    while True:
        mapping: dict[tuple, int] = {}
        new_block = {}
        for s in sorted(block):
            sig = (block[s],) + tuple(block[total[(s, e)]] for e in events)
            if sig not in mapping:
                mapping[sig] = len(mapping)
            new_block[s] = mapping[sig]
        stable = len(set(new_block.values())) == len(set(block.values()))
        block = new_block
        if stable:
            break
    # Canonical BFS numbering of the quotient from the initial block.
    quotient: dict[tuple[int, int], int] = {}
    for s in range(n):
        for e in events:
            quotient[(block[s], e)] = block[total[(s, e)]]
    for e in events:
        quotient[(block[sink], e)] = block[sink]
    outputs = {block[s]: out(s) for s in list(range(n)) + [sink]}
    order: dict[int, int] = {block[gen.initial]: 0}
    queue = deque([block[gen.initial]])
    while queue:
        b = queue.popleft()
        for e in events:
            t = quotient[(b, e)]
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    table = tuple(
        tuple(order[quotient[(b, e)]] for e in events)
        for b, _ in sorted(order.items(), key=lambda kv: kv[1])
    )
    outs = tuple(outputs[b] for b, _ in sorted(order.items(), key=lambda kv: kv[1]))
    return (tuple(events), table, outs)


def language_equal(a: Generator, b: Generator) -> bool:
    """True iff closed and marked languages both coincide; alphabets must match."""
    if a.alphabet != b.alphabet:
        raise ValueError("alphabet mismatch")
    return _moore_canonical(a) == _moore_canonical(b)


def language_subset(a: Generator, b: Generator) -> bool:
    """True iff L(a) <= L(b) and Lm(a) <= Lm(b); alphabets must match."""
    if a.alphabet != b.alphabet:
        raise ValueError("alphabet mismatch")
    if a.is_empty:
        return True
    if b.is_empty:
        return False
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        (x, y) = queue.popleft()
        if x in a.marked and y not in b.marked:
            return False
        for e in sorted(a.alphabet):
            dx = a.target(x, e)
            if dx is None:
                continue
            dy = b.target(y, e)
            if dy is None:
                return False
            key = (dx, dy)
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return True


def bounded_language(g: Generator, max_len: int) -> tuple[set[tuple[int, ...]], set[tuple[int, ...]]]:
    """All strings of the closed and marked languages up to ``max_len``."""
    closed: set[tuple[int, ...]] = set()
    marked: set[tuple[int, ...]] = set()
    if g.is_empty:
        return closed, marked
    adj = g.out_edges()
    frontier: list[tuple[tuple[int, ...], int]] = [((), g.initial)]
    for _ in range(max_len + 1):
        nxt: list[tuple[tuple[int, ...], int]] = []
        for string, q in frontier:
            closed.add(string)
            if q in g.marked:
                marked.add(string)
            for e, dst in adj[q]:
                nxt.append((string + (e,), dst))
        frontier = nxt
    return closed, marked


def to_dot(g: Generator, name: str = "G", state_labels: Mapping[int, str] | None = None) -> str:
    """GraphViz rendering: one node per state, double circle for marked states."""
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];"]
    if g.is_empty:
        lines.append("}")
        return "\n".join(lines)
    lines.append(f'  init [shape=point, label=""];')
    lines.append(f"  init -> s{g.initial};")
    for q in range(g.n_states):
        label = state_labels.get(q, str(q)) if state_labels else str(q)
        shape = "doublecircle" if q in g.marked else "circle"
        lines.append(f'  s{q} [shape={shape}, label="{label}"];')
    grouped: dict[tuple[int, int], list[int]] = {}
    for (src, ev), dst in sorted(g.transitions.items()):
        grouped.setdefault((src, dst), []).append(ev)
    for (src, dst), evs in sorted(grouped.items()):
        label = ",".join(event_name(e) for e in sorted(evs))
        lines.append(f'  s{src} -> s{dst} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
