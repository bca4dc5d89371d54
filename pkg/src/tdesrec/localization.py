"""Decentralization of a centralized supervisor into per-event controllers.

Each prohibitible event gets a local event controller carrying exactly that
event's enable/disable decisions, and each forcible event a local tick
controller carrying exactly that event's tick-preemption decisions.  A
controller is a quotient of the supervisor: states are merged when they agree
on the owned decision, agree on marking relative to the plant, and stay
successor-consistent; events whose quotient transitions are self-loops
everywhere are dropped from the controller's alphabet.

A final disambiguation pass keeps the joint state knowledge of plant plus all
controllers injective over supervisor states, so the decentralized closed
loop tracks the centralized supervisor state for state.  The construction is
verified against the defining identity (plant composed with the controllers
reproduces the supervised behavior, closed and marked); if verification ever
fails, the trivial localization (every controller a full supervisor copy) is
used instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .automata import Generator, language_equal, renumber_bfs, sync_product
from .events import TICK, EventTable, event_name
from .solver import (
    CommutativityReport,
    ForciblePathSet,
    Path,
    ReconfigProblem,
    erase_ticks,
    state_witness,
    trs,
    verify_projection_commutativity,
)
from .synthesis import Supervisor
from .timed import TimedGenerator


@dataclass(frozen=True)
class DecentralizationPackage:
    """Plant, centralized supervisor, and the events localization is based on."""

    plant: TimedGenerator
    supervisor: Supervisor
    event_list: frozenset[int]

    def __post_init__(self) -> None:
        if not self.event_list <= self.supervisor.automaton.alphabet:
            extra = sorted(self.event_list - self.supervisor.automaton.alphabet)
            raise ValueError(f"event list exceeds the supervisor alphabet: {extra}")

    @property
    def tcrs(self) -> Supervisor:
        """The package projection onto its supervisor component."""
        return self.supervisor


def default_event_list(supervisor: Supervisor) -> frozenset[int]:
    """All prohibitible and forcible events of the supervisor alphabet."""
    alpha = supervisor.automaton.alphabet
    ev = supervisor.events
    return frozenset(e for e in alpha
                     if ev.is_prohibitible(e) or ev.is_forcible(e))


@dataclass(frozen=True)
class LocalizedSupervisor:
    """Per-event local controllers and their compositions.

    ``loc_p`` composes the tick controllers, ``loc_c`` the event controllers,
    and ``tdrs`` is their joint composition: the decentralized supervisor.
    """

    tick_controllers: Mapping[int, Generator]
    event_controllers: Mapping[int, Generator]
    loc_p: Generator
    loc_c: Generator
    tdrs: Generator
    used_fallback: bool

    @property
    def tick_alphabet(self) -> frozenset[int]:
        return self.loc_p.alphabet

    @property
    def event_alphabet(self) -> frozenset[int]:
        return self.loc_c.alphabet


def _neutral_generator() -> Generator:
    """Identity element of synchronous composition: one marked state, no events."""
    return Generator(1, frozenset(), {}, 0, frozenset({0}))


class _Partition:
    """A block assignment over supervisor states, refined until stable."""

    def __init__(self, labels: Sequence[tuple]):
        self.block = self._normalize({i: lbl for i, lbl in enumerate(labels)})

    @staticmethod
    def _normalize(raw: Mapping[int, object]) -> list[int]:
        ids: dict[object, int] = {}
        out = [0] * len(raw)
        for s in sorted(raw):
            key = raw[s]
            if key not in ids:
                ids[key] = len(ids)
            out[s] = ids[key]
        return out

    def n_blocks(self) -> int:
        return len(set(self.block))

    def refine(self, adj: Sequence[Mapping[int, int]], events: Sequence[int]) -> None:
        """Split blocks until defined successors agree blockwise per event.

        Members with the event undefined follow the largest defined group of
        their block (ties broken by smallest group id), which keeps blocks as
        coarse as the decisions allow.
        """
        while True:
            before = self.n_blocks()
            for e in events:
                members: dict[int, list[int]] = {}
                for s, b in enumerate(self.block):
                    members.setdefault(b, []).append(s)
                assign: dict[int, object] = {}
                for b, states in members.items():
                    groups: dict[int, list[int]] = {}
                    undefined: list[int] = []
                    for s in states:
                        t = adj[s].get(e)
                        if t is None:
                            undefined.append(s)
                        else:
                            groups.setdefault(self.block[t], []).append(s)
                    if len(groups) <= 1:
                        for s in states:
                            assign[s] = (b,)
                        continue
                    default = max(groups, key=lambda g: (len(groups[g]), -g))
                    for g, ss in groups.items():
                        for s in ss:
                            assign[s] = (b, g)
                    for s in undefined:
                        assign[s] = (b, default)
                self.block = self._normalize(assign)
            if self.n_blocks() == before:
                return

    def split_apart(self, states: Sequence[int]) -> None:
        """Force the given states into pairwise distinct blocks."""
        assign: dict[int, object] = {s: (b,) for s, b in enumerate(self.block)}
        for rank, s in enumerate(sorted(states)):
            assign[s] = (self.block[s], "split", rank)
        self.block = self._normalize(assign)


def _quotient(sup: Supervisor, partition: _Partition,
              protected: frozenset[int]) -> Generator:
    """Quotient generator of the supervisor under a stable partition.

    A block is marked when it contains a marked supervisor state.  Events
    outside ``protected`` whose transitions are self-loops at every block are
    dropped from the alphabet.
    """
    gen = sup.automaton
    block = partition.block
    n_blocks = partition.n_blocks()
    transitions: dict[tuple[int, int], int] = {}
    for (s, e), t in gen.transitions.items():
        transitions[(block[s], e)] = block[t]
    marked = frozenset(block[s] for s in gen.marked)
    droppable = set()
    per_event_sources: dict[int, set[int]] = {}
    for (b, e) in transitions:
        per_event_sources.setdefault(e, set()).add(b)
    for e in gen.alphabet - protected:
        sources = per_event_sources.get(e, set())
        if len(sources) == n_blocks and all(
                transitions[(b, e)] == b for b in sources):
            droppable.add(e)
    alphabet = gen.alphabet - droppable
    kept = {(b, e): t for (b, e), t in transitions.items() if e not in droppable}
    raw = Generator(n_blocks, alphabet, kept, block[gen.initial], marked)
    return renumber_bfs(raw)


def _decision_labels(pkg: DecentralizationPackage) -> tuple[list[bool], list[frozenset[int]], list[frozenset[int]]]:
    """Per supervisor state: plant marking, plant-eligible events, supervised events."""
    sup = pkg.supervisor
    plant_gen = pkg.plant.generator
    plant_adj = plant_gen.out_edges()
    sup_adj = sup.automaton.out_edges()
    plant_marked = []
    plant_elig = []
    sup_elig = []
    for x in range(sup.n_states):
        p = sup.plant_states[x]
        if not (0 <= p < plant_gen.n_states):
            raise ValueError(f"supervisor state {x} tracks unknown plant state {p}")
        plant_marked.append(p in plant_gen.marked)
        plant_elig.append(frozenset(e for e, _ in plant_adj[p]))
        sup_elig.append(frozenset(e for e, _ in sup_adj[x]))
    return plant_marked, plant_elig, sup_elig


def timed_localize(pkg: DecentralizationPackage) -> LocalizedSupervisor:
    """Build the decentralized supervisor for a package.

    Raises ``ValueError`` for an empty supervisor or an empty event list and
    ``RuntimeError`` when even the trivial fallback fails verification (which
    indicates a composition bug rather than a modeling issue).
    """
    sup = pkg.supervisor
    if sup.is_empty:
        raise ValueError("cannot localize an empty supervisor")
    if not pkg.event_list:
        raise ValueError("event list is empty; nothing to localize on")
    ev = sup.events
    gen = sup.automaton
    event_targets = sorted(e for e in pkg.event_list if ev.is_prohibitible(e))
    tick_targets = sorted(e for e in pkg.event_list if ev.is_forcible(e))
    if not event_targets and not tick_targets:
        raise ValueError("event list contains no prohibitible or forcible events")

    plant_marked, plant_elig, sup_elig = _decision_labels(pkg)
    sup_marked = [x in gen.marked for x in range(gen.n_states)]
    demarked = [plant_marked[x] and not sup_marked[x] for x in range(gen.n_states)]

    adj_maps: list[dict[int, int]] = [dict() for _ in range(gen.n_states)]
    for (s, e), t in gen.transitions.items():
        adj_maps[s][e] = t
    events_sorted = sorted(gen.alphabet)

    partitions: list[tuple[str, int, _Partition]] = []
    for alpha in event_targets:
        disable = [alpha in plant_elig[x] and alpha not in sup_elig[x]
                   for x in range(gen.n_states)]
        labels = [(disable[x], demarked[x]) for x in range(gen.n_states)]
        part = _Partition(labels)
        part.refine(adj_maps, events_sorted)
        partitions.append(("event", alpha, part))
    for beta in tick_targets:
        preempt = [TICK in plant_elig[x] and TICK not in sup_elig[x]
                   and beta in sup_elig[x] for x in range(gen.n_states)]
        labels = [(preempt[x], demarked[x]) for x in range(gen.n_states)]
        part = _Partition(labels)
        part.refine(adj_maps, events_sorted)
        partitions.append(("tick", beta, part))

    # Disambiguation: the plant state plus the controllers' joint knowledge
    # must identify the supervisor state, otherwise the decentralized closed
    # loop would conflate histories the centralized supervisor keeps apart.
    # The first partition absorbs whatever splits are needed.
    while True:
        joint: dict[tuple, list[int]] = {}
        for x in range(gen.n_states):
            key = (sup.plant_states[x],) + tuple(p.block[x] for _, _, p in partitions)
            joint.setdefault(key, []).append(x)
        clashes = [xs for xs in joint.values() if len(xs) > 1]
        if not clashes:
            break
        anchor = partitions[0][2]
        for xs in clashes:
            anchor.split_apart(xs)
        anchor.refine(adj_maps, events_sorted)

    tick_controllers = {}
    event_controllers = {}
    for kind, label, part in partitions:
        protected = frozenset({label}) if kind == "event" else frozenset({TICK, label})
        quotient = _quotient(sup, part, protected & gen.alphabet)
        if kind == "event":
            event_controllers[label] = quotient
        else:
            tick_controllers[label] = quotient

    loc = _compose(tick_controllers, event_controllers, used_fallback=False)
    if verify_localization(pkg, loc):
        return loc

    full = gen
    tick_controllers = {beta: full for beta in tick_targets}
    event_controllers = {alpha: full for alpha in event_targets}
    fallback = _compose(tick_controllers, event_controllers, used_fallback=True)
    if not verify_localization(pkg, fallback):
        raise RuntimeError(
            "trivial localization failed verification; composition machinery is broken")
    return fallback


def _compose(tick_controllers: Mapping[int, Generator],
             event_controllers: Mapping[int, Generator],
             used_fallback: bool) -> LocalizedSupervisor:
    tick_list = [tick_controllers[b] for b in sorted(tick_controllers)]
    event_list = [event_controllers[a] for a in sorted(event_controllers)]
    loc_p = sync_product(tick_list) if tick_list else _neutral_generator()
    loc_c = sync_product(event_list) if event_list else _neutral_generator()
    tdrs = sync_product([loc_p, loc_c])
    return LocalizedSupervisor(dict(tick_controllers), dict(event_controllers),
                               loc_p, loc_c, tdrs, used_fallback)


def verify_localization(pkg: DecentralizationPackage, loc: LocalizedSupervisor) -> bool:
    """Defining identity: plant composed with the controllers equals the supervisor.

    Events absent from the decentralized alphabet are unconstrained, so the
    composition is synchronous (an inverse-projection intersection), compared
    for both closed and marked language.
    """
    closed_loop = sync_product([pkg.plant.generator, loc.tdrs])
    sup_gen = pkg.supervisor.automaton
    union = closed_loop.alphabet | sup_gen.alphabet

    def pad(g: Generator) -> Generator:
        if g.alphabet == union:
            return g
        return Generator(g.n_states, union, dict(g.transitions), g.initial, g.marked)

    return language_equal(pad(closed_loop), pad(sup_gen))


def decentralized_closed_loop(pkg: DecentralizationPackage,
                              loc: LocalizedSupervisor) -> Supervisor:
    """The plant running under the decentralized controllers, as a supervisor."""
    gen = sync_product([pkg.plant.generator, loc.tdrs])
    return Supervisor.from_generator(gen, pkg.supervisor.events)


@dataclass(frozen=True)
class SolutionEquivalenceReport:
    """Outcome of comparing centralized and decentralized solving."""

    centralized: frozenset[Path]
    decentralized: frozenset[Path]
    equal: bool
    decentralized_source: int
    decentralized_target: int
    sigma_r_in_tick_alphabet: bool
    sigma_r_in_event_alphabet: bool
    replay_ok_tick_side: bool
    replay_ok_event_side: bool
    used_fallback: bool

    def describe(self) -> list[str]:
        return [
            f"centralized solutions: {len(self.centralized)}",
            f"decentralized solutions: {len(self.decentralized)}",
            f"solution sets identical: {'yes' if self.equal else 'no'}",
            f"reconfiguration event in tick-controller alphabet: "
            f"{'yes' if self.sigma_r_in_tick_alphabet else 'no'}",
            f"reconfiguration event in event-controller alphabet: "
            f"{'yes' if self.sigma_r_in_event_alphabet else 'no'}",
            f"paths replayed in tick controllers with the event eligible: "
            f"{'yes' if self.replay_ok_tick_side else 'no'}",
            f"paths replayed in event controllers with the event eligible: "
            f"{'yes' if self.replay_ok_event_side else 'no'}",
            f"greedy localization used: {'no (fallback)' if self.used_fallback else 'yes'}",
        ]


def _replay_side(side: Generator, start_witness: Path, paths: frozenset[Path],
                 sigma_r: int) -> bool:
    """Replay each path's projection onto the side alphabet; the
    reconfiguration event must be eligible at every endpoint."""
    if sigma_r not in side.alphabet:
        return False
    restrict = lambda p: tuple(e for e in p if e in side.alphabet)
    origin = side.run(restrict(start_witness))
    if origin is None:
        return False
    for path in paths:
        end = side.run(restrict(path), start=origin)
        if end is None or side.target(end, sigma_r) is None:
            return False
    return True


def verify_solution_equivalence(pkg: DecentralizationPackage,
                                problem: ReconfigProblem) -> SolutionEquivalenceReport:
    """Solve the problem centrally and on the decentralized closed loop.

    The source and target are transported into the decentralized composition
    along their shortest witness strings (the synchronized-state
    correspondence); the two path sets are compared exactly.  Each solution
    is additionally replayed inside the composed tick and event controllers
    through their projections, checking the reconfiguration event is eligible
    at both endpoints.
    """
    sup = pkg.supervisor
    sigma_r = problem.reconfig_event
    ev = sup.events
    if not (ev.is_prohibitible(sigma_r) and ev.is_forcible(sigma_r)):
        raise ValueError(
            f"reconfiguration event {event_name(sigma_r)} must be declared both "
            "prohibitible and forcible for decentralized solving")
    central = trs(problem)
    if not central.solvable:
        raise ValueError("problem is unsolvable on the centralized supervisor")

    loc = timed_localize(pkg)
    closed_loop = decentralized_closed_loop(pkg, loc)

    source_witness = state_witness(sup.automaton, problem.source)
    target_witness = state_witness(sup.automaton, problem.target)
    dec_source = closed_loop.automaton.run(source_witness)
    dec_target = closed_loop.automaton.run(target_witness)
    if dec_source is None or dec_target is None:
        raise ValueError("correspondence not established")

    dec_problem = ReconfigProblem(closed_loop, dec_source, dec_target, sigma_r)
    decentralized = trs(dec_problem)

    central_set = frozenset(central.paths)
    dec_set = frozenset(decentralized.paths)
    replay_p = _replay_side(loc.loc_p, source_witness, central_set, sigma_r)
    replay_c = _replay_side(loc.loc_c, source_witness, central_set, sigma_r)
    return SolutionEquivalenceReport(
        central_set, dec_set, central_set == dec_set,
        dec_source, dec_target,
        sigma_r in loc.loc_p.alphabet, sigma_r in loc.loc_c.alphabet,
        replay_p, replay_c, loc.used_fallback)


def verify_projection_commutativity_decentralized(
        pkg: DecentralizationPackage,
        problem: ReconfigProblem) -> CommutativityReport:
    """Tick-projection commutativity, run on the decentralized supervisor.

    Reuses the centralized machinery with the decentralized closed loop
    substituted for the supervisor, transporting source and target along
    their witness strings.
    """
    sup = pkg.supervisor
    loc = timed_localize(pkg)
    closed_loop = decentralized_closed_loop(pkg, loc)
    source = closed_loop.automaton.run(state_witness(sup.automaton, problem.source))
    target = closed_loop.automaton.run(state_witness(sup.automaton, problem.target))
    if source is None or target is None:
        raise ValueError("correspondence not established")
    dec_problem = ReconfigProblem(closed_loop, source, target, problem.reconfig_event)
    return verify_projection_commutativity(dec_problem)
