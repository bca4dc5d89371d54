"""Shared test helpers: random model generators and independent oracles.

The oracles here deliberately avoid the library's algorithms: languages are
compared by bounded enumeration, supremal synthesis by exhaustive subset
search, and path solving by exhaustive filtered path enumeration.  Expected
values frozen into tests were produced by these oracles.
"""

from __future__ import annotations

import random
from itertools import combinations

from tdesrec.automata import Generator, bounded_language
from tdesrec.events import TICK, PROHIBITIBLE, UNCONTROLLABLE, EventDef, EventTable
from tdesrec.synthesis import Supervisor, supcon
from tdesrec.timed import TimedGenerator, timed_graph


def random_generator(rng: random.Random, max_states: int = 5,
                     alphabet: tuple[int, ...] = (1, 2, 3),
                     density: float = 0.5, marked_p: float = 0.5) -> Generator:
    """A random trim-ish deterministic generator (not necessarily nonblocking)."""
    n = rng.randint(1, max_states)
    transitions = {}
    for s in range(n):
        for e in alphabet:
            if rng.random() < density:
                transitions[(s, e)] = rng.randrange(n)
    marked = frozenset(s for s in range(n) if rng.random() < marked_p)
    if not marked:
        marked = frozenset({rng.randrange(n)})
    g = Generator(n, frozenset(alphabet), transitions, 0, marked)
    from tdesrec.automata import renumber_bfs

    return renumber_bfs(g)


def random_event_table(rng: random.Random, labels: tuple[int, ...],
                       max_bound: int = 4, forcible_p: float = 0.5,
                       uncontrollable_p: float = 0.4) -> EventTable:
    defs = []
    for label in labels:
        control = UNCONTROLLABLE if rng.random() < uncontrollable_p else PROHIBITIBLE
        forcible = rng.random() < forcible_p
        if rng.random() < 0.5:
            lower = rng.randint(0, max_bound)
            upper = None
        else:
            lower = rng.randint(0, max_bound)
            upper = rng.randint(lower, max_bound)
        defs.append(EventDef(label, control, forcible, lower, upper))
    return EventTable(defs)


def random_atg(rng: random.Random, max_activities: int = 8,
               max_events: int = 6, max_bound: int = 4,
               density: float = 0.5,
               forcible_p: float = 0.5) -> tuple[Generator, EventTable]:
    """A random activity transition graph with a matching event table."""
    n_events = rng.randint(1, max_events)
    labels = tuple(range(1, n_events + 1))
    events = random_event_table(rng, labels, max_bound, forcible_p=forcible_p)
    atg = random_generator(rng, max_activities, labels, density)
    return atg, events


def random_spec(rng: random.Random, alphabet: frozenset[int],
                max_states: int = 3, density: float = 0.7) -> Generator:
    """A random specification over a subset of the timed alphabet."""
    pool = sorted(alphabet)
    k = rng.randint(1, len(pool))
    sub = tuple(rng.sample(pool, k))
    return random_generator(rng, max_states, sub, density, marked_p=0.8)


def random_pipeline_supervisor(rng: random.Random, max_activities: int = 6,
                               max_events: int = 5, max_bound: int = 3,
                               spec_states: int = 3, density: float = 0.5,
                               forcible_p: float = 0.5,
                               full_alphabet_spec: bool = False
                               ) -> tuple[Supervisor, TimedGenerator] | None:
    """Random ATG through the timed graph and synthesis pipeline.

    Returns None when the instance degenerates (empty supervisor or a timed
    graph that never ticks into anything interesting).
    """
    atg, events = random_atg(rng, max_activities, max_events, max_bound,
                             density, forcible_p)
    try:
        ttg = timed_graph(atg, events, max_states=20_000)
    except ValueError:
        return None
    if full_alphabet_spec:
        alpha = tuple(sorted(ttg.generator.alphabet))
        spec = random_generator(rng, spec_states, alpha, density=0.85,
                                marked_p=0.8)
    else:
        spec = random_spec(rng, ttg.generator.alphabet, spec_states)
    sup = supcon(ttg, spec, events)
    if sup.is_empty or sup.n_states < 2:
        return None
    return sup, ttg


def solvable_problems(sup: Supervisor, limit: int = 50) -> list[tuple[int, int, int]]:
    """All (source, target, event) triples with the event defined at the target."""
    gen = sup.automaton
    triples = []
    for (q_r, e), _ in sorted(gen.transitions.items()):
        if e == TICK:
            continue
        for q_s in range(gen.n_states):
            triples.append((q_s, q_r, e))
            if len(triples) >= limit:
                return triples
    return triples


def sample_problems(rng: random.Random, sup: Supervisor,
                    count: int) -> list[tuple[int, int, int]]:
    """Random (source, target, event) triples with the event defined at target."""
    gen = sup.automaton
    anchors = sorted({(q_r, e) for (q_r, e) in gen.transitions if e != TICK})
    if not anchors:
        return []
    out = []
    for _ in range(count):
        q_r, e = rng.choice(anchors)
        out.append((rng.randrange(gen.n_states), q_r, e))
    return out


# ---------------------------------------------------------------------------
# Oracles


def oracle_language_equal(a: Generator, b: Generator, depth: int) -> bool:
    """Bounded-enumeration language comparison."""
    return bounded_language(a, depth) == bounded_language(b, depth)


def _edge_ok_oracle(gen: Generator, events: EventTable, src: int, ev: int, dst: int) -> bool:
    if events.is_forcible(ev):
        return True
    for (s, other), t in gen.transitions.items():
        if s == src and t != dst and not events.is_prohibitible(other):
            return False
    return True


def oracle_paths(sup: Supervisor, source: int, target: int) -> set[tuple[int, ...]]:
    """Exhaustive enumeration of simple backtrackable paths source-to-target.

    A path qualifies when every step is forcible or faces only prohibitible
    competition, and when all of its states lie inside the region formed by
    such paths (the attraction field); since every enumerated path is built
    from qualifying steps only, the region constraint is the path set itself.
    """
    gen = sup.automaton
    events = sup.events
    adj: dict[int, list[tuple[int, int]]] = {}
    for (s, e), t in gen.transitions.items():
        adj.setdefault(s, []).append((e, t))
    for lst in adj.values():
        lst.sort()
    found: set[tuple[int, ...]] = set()
    path: list[int] = []
    visited = {source}

    def walk(state: int) -> None:
        if state == target:
            found.add(tuple(path))
        for ev, dst in adj.get(state, ()):
            if dst in visited:
                continue
            if not _edge_ok_oracle(gen, events, state, ev, dst):
                continue
            visited.add(dst)
            path.append(ev)
            walk(dst)
            path.pop()
            visited.discard(dst)

    walk(source)
    if source == target:
        found.add(())
    # Confinement to the attraction field is automatic: the field is the set
    # of states on qualifying paths, and each found path only visits states
    # of qualifying paths.
    return found


def oracle_supremal(plant: TimedGenerator, spec: Generator,
                    events: EventTable) -> Generator:
    """Brute-force supremal controllable nonblocking sublanguage.

    Enumerates every state subset of the plant-spec product, restricts,
    trims, checks timed controllability directly against the plant, and
    keeps the candidate whose language contains all others.
    """
    from tdesrec.automata import _product_pairs, language_subset, renumber_bfs
    from tdesrec.automata import coreachable_states, reachable_states

    product, pairs = _product_pairs(plant.generator, spec)
    n = product.n_states
    plant_gen = plant.generator
    empty = Generator(0, product.alphabet, {}, 0, frozenset())
    if n == 0:
        return empty
    maximal: list[Generator] = [empty]
    all_states = list(range(n))
    for r in range(1, n + 1):
        for keep in combinations(all_states, r):
            keep_set = set(keep)
            if product.initial not in keep_set:
                continue
            transitions = {
                (s, e): t for (s, e), t in product.transitions.items()
                if s in keep_set and t in keep_set
            }
            cand = Generator(n, product.alphabet, transitions, product.initial,
                             product.marked & keep_set)
            reach = reachable_states(cand)
            if not reach <= coreachable_states(cand):
                continue
            if not _oracle_controllable(cand, reach, pairs, plant_gen, events):
                continue
            cand = renumber_bfs(cand)
            if any(language_subset(cand, m) for m in maximal):
                continue
            maximal = [m for m in maximal if not language_subset(m, cand)]
            maximal.append(cand)
    # Controllable nonblocking sublanguages are closed under union, so a
    # unique maximum must remain.
    assert len(maximal) == 1, "incomparable maximal candidates"
    return maximal[0]


def _oracle_controllable(cand: Generator, reach: frozenset[int],
                         pairs, plant_gen: Generator, events: EventTable) -> bool:
    for q in reach:
        p = pairs[q][0]
        offered = cand.eligible(q)
        for e in plant_gen.eligible(p):
            if e in offered:
                continue
            if events.is_uncontrollable(e):
                return False
            if e == TICK and not any(events.is_forcible(f) for f in offered):
                return False
    return True


def check_deadline_soundness(atg: Generator, ttg: TimedGenerator) -> None:
    """A state lacks an outgoing tick iff some enabled prospective timer is 0."""
    gen = ttg.generator
    for q in range(gen.n_states):
        ts = ttg.timed_states[q]
        enabled = atg.eligible(ts.activity)
        blocked = any(
            ttg.events[e].is_prospective and ts.timer(e) == 0
            for e in enabled
        )
        has_tick = (q, TICK) in gen.transitions
        assert has_tick != blocked, f"state {q}: tick={has_tick} blocked={blocked}"


def check_remote_liveness(atg: Generator, ttg: TimedGenerator) -> None:
    gen = ttg.generator
    for q in range(gen.n_states):
        ts = ttg.timed_states[q]
        enabled = atg.eligible(ts.activity)
        if enabled and all(ttg.events[e].is_remote for e in enabled):
            assert (q, TICK) in gen.transitions


def check_bound_soundness(atg: Generator, ttg: TimedGenerator,
                          max_paths: int = 3000, max_len: int = 12) -> None:
    """Walk bounded paths tracking per-event enablement age."""
    gen = ttg.generator
    adj = gen.out_edges()
    start_age = {e: 0 for e in atg.eligible(ttg.timed_states[0].activity)}
    stack = [(0, start_age, 0)]
    seen_paths = 0
    while stack and seen_paths < max_paths:
        q, age, depth = stack.pop()
        seen_paths += 1
        if depth >= max_len:
            continue
        activity = ttg.timed_states[q].activity
        for e, dst in adj[q]:
            if e == TICK:
                new_age = {ev: a + 1 for ev, a in age.items()}
            else:
                d = ttg.events[e]
                elapsed = age.get(e)
                assert elapsed is not None
                assert elapsed >= d.lower, f"{e} fired after {elapsed} < {d.lower} ticks"
                if d.is_prospective:
                    assert elapsed <= d.upper, f"{e} fired after {elapsed} > {d.upper} ticks"
                next_activity = ttg.timed_states[dst].activity
                before = atg.eligible(activity)
                after = atg.eligible(next_activity)
                new_age = {}
                for ev in after:
                    if ev != e and ev in before and ev in age:
                        new_age[ev] = age[ev]
                    else:
                        new_age[ev] = 0
            stack.append((dst, new_age, depth + 1))
