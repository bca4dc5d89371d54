"""Supremal controllable sublanguage synthesis for timed DES.

Controllability here is the timed notion: a supervisor may never disable an
uncontrollable activity event that the plant can execute, and it may disable
tick only where some forcible event remains eligible under supervision (tick
is preempted, not prohibited).
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .automata import (
    Generator,
    _product_pairs,
    allevents,
    coreachable_states,
    sync_product,
)
from .events import TICK, EventTable, event_name
from .timed import TimedGenerator, timed_graph


@dataclass(frozen=True)
class ControllabilityWitness:
    """A state pair and event at which the controllability condition fails."""

    candidate_state: int
    plant_state: int
    event: int

    def describe(self) -> str:
        return (f"event {event_name(self.event)} uncontrollably eligible at plant state "
                f"{self.plant_state} but not offered at candidate state {self.candidate_state}")


@dataclass(frozen=True)
class Supervisor:
    """A synthesized supervisor: trimmed product automaton plus control data.

    ``plant_states[q]`` is the plant state tracked at supervisor state ``q``;
    ``disabled[q]`` lists the prohibitible events the supervisor withholds
    there although the plant could execute them, and ``tick_preempted[q]``
    records whether tick is plant-eligible but suppressed (necessarily backed
    by an eligible forcible event).
    """

    automaton: Generator
    events: EventTable
    plant_states: tuple[int, ...]
    disabled: tuple[frozenset[int], ...]
    tick_preempted: tuple[bool, ...]

    @property
    def is_empty(self) -> bool:
        return self.automaton.is_empty

    @property
    def n_states(self) -> int:
        return self.automaton.n_states

    @classmethod
    def from_generator(cls, gen: Generator, events: EventTable) -> "Supervisor":
        """Wrap a bare generator (e.g. a projected or localized supervisor).

        No plant is attached, so the control-data fields are vacuous; the
        wrapper exists so the reconfiguration solver can run on any
        supervisor-shaped automaton.
        """
        n = gen.n_states
        return cls(gen, events, tuple(range(n)),
                   tuple(frozenset() for _ in range(n)),
                   tuple(False for _ in range(n)))


def controllable(candidate: Generator, plant: TimedGenerator,
                 events: EventTable | None = None) -> tuple[bool, ControllabilityWitness | None]:
    """Check timed controllability of ``candidate`` against ``plant``.

    Walks the synchronized product of candidate and plant; at every reached
    pair each uncontrollable plant-eligible event must be candidate-eligible,
    and a plant-eligible but candidate-disabled tick needs an eligible
    forcible event to justify the preemption.  On failure the first offending
    pair (in BFS order) is returned as a witness.
    """
    events = events or plant.events
    extra = candidate.alphabet - plant.alphabet - {TICK}
    if extra:
        raise ValueError(f"candidate alphabet exceeds plant alphabet: {sorted(extra)}")
    if candidate.is_empty:
        return True, None
    plant_gen = plant.generator
    start = (candidate.initial, plant_gen.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        (x, p) = queue.popleft()
        cand_elig = candidate.eligible(x)
        for e in sorted(plant_gen.eligible(p)):
            if e in cand_elig:
                key = (candidate.target(x, e), plant_gen.target(p, e))
                if key not in seen:
                    seen.add(key)
                    queue.append(key)
                continue
            if events.is_uncontrollable(e):
                return False, ControllabilityWitness(x, p, e)
            if e == TICK and not any(events.is_forcible(f) for f in cand_elig):
                return False, ControllabilityWitness(x, p, TICK)
    return True, None


def supcon(plant: TimedGenerator, spec: Generator,
           events: EventTable | None = None) -> Supervisor:
    """Greatest-fixpoint synthesis of the supremal controllable nonblocking behavior.

    Starts from the fully synchronized product of plant and spec and
    repeatedly deletes states that violate controllability or coreachability
    until nothing changes.  Within one iteration the controllability sweep
    runs before the coreachability sweep, which fixes the intermediate
    sequence but not the (supremal) result.  An empty supervisor is a legal
    outcome.
    """
    events = events or plant.events
    extra = spec.alphabet - plant.alphabet - {TICK}
    if extra:
        raise ValueError(f"spec alphabet exceeds plant alphabet: {sorted(extra)}")
    plant_gen = plant.generator
    product, pairs = _product_pairs(plant_gen, spec)
    n = product.n_states
    alive = set(range(n))
    adj = product.out_edges()
    plant_elig = [plant_gen.eligible(p) for p, _ in pairs]

    def survivor_eligible(q: int) -> dict[int, int]:
        return {e: t for e, t in adj[q] if t in alive}

    changed = True
    while changed and alive:
        changed = False
        # Controllability sweep.
        for q in sorted(alive):
            offered = survivor_eligible(q)
            bad = False
            for e in plant_elig[q]:
                if e in offered:
                    continue
                if events.is_uncontrollable(e):
                    bad = True
                    break
                if e == TICK and not any(events.is_forcible(f) for f in offered):
                    bad = True
                    break
            if bad:
                alive.discard(q)
                changed = True
        # Coreachability sweep over the survivors.
        if alive:
            restricted = Generator(
                n,
                product.alphabet,
                {(s, e): t for (s, e), t in product.transitions.items()
                 if s in alive and t in alive},
                product.initial,
                product.marked & frozenset(alive),
            )
            coreach = coreachable_states(restricted)
            dead = alive - coreach
            if dead:
                alive -= dead
                changed = True
        if product.initial not in alive:
            alive.clear()

    if not alive or product.initial not in alive:
        empty = Generator(0, product.alphabet, {}, 0, frozenset())
        return Supervisor(empty, events, (), (), ())

    # Reachable restriction, renumbered in BFS order.
    order: dict[int, int] = {product.initial: 0}
    queue = deque([product.initial])
    while queue:
        q = queue.popleft()
        for e, t in adj[q]:
            if t in alive and t not in order:
                order[t] = len(order)
                queue.append(t)
    transitions = {
        (order[s], e): order[t]
        for (s, e), t in product.transitions.items()
        if s in order and t in order
    }
    marked = frozenset(order[q] for q in product.marked if q in order)
    gen = Generator(len(order), product.alphabet, transitions, 0, marked)

    plant_states = [0] * len(order)
    disabled: list[frozenset[int]] = [frozenset()] * len(order)
    preempted = [False] * len(order)
    for old, new in order.items():
        p = pairs[old][0]
        plant_states[new] = p
        offered = gen.eligible(new)
        pe = plant_elig[old]
        disabled[new] = frozenset(
            e for e in pe if e not in offered and events.is_prohibitible(e)
        )
        preempted[new] = TICK in pe and TICK not in offered
    return Supervisor(gen, events, tuple(plant_states), tuple(disabled),
                      tuple(preempted))


def mode_timed_graph(component_atgs: Sequence[Generator], reconfig_spec: Generator,
                     events: EventTable, max_states: int = 1_000_000) -> TimedGenerator:
    """Timed graph of the components composed with the reconfiguration spec."""
    mode_atg = sync_product(list(component_atgs) + [reconfig_spec])
    return timed_graph(mode_atg, events, max_states=max_states)


def synthesize_tcrs(component_atgs: Sequence[Generator], reconfig_spec: Generator,
                    behavioral_spec: Generator, events: EventTable,
                    reconfig_events: Sequence[int] = (),
                    max_states: int = 1_000_000) -> Supervisor:
    """Full synthesis pipeline for a timed centralized reconfiguration supervisor.

    Composes the component ATGs with the reconfiguration specification, builds
    the timed graph, lifts the behavioral specification to the full alphabet
    by composing it with an all-events loop, and synthesizes the supervisor.
    Declared reconfiguration events must appear in the reconfiguration spec
    and be prohibitible.
    """
    for e in reconfig_events:
        if e not in reconfig_spec.alphabet:
            raise ValueError(f"reconfiguration event {e} missing from the reconfiguration spec")
        if e not in events:
            raise ValueError(f"reconfiguration event {e} has no event definition")
        if not events.is_prohibitible(e):
            raise ValueError(f"reconfiguration event {e} must be prohibitible")
    mode_ttg = mode_timed_graph(component_atgs, reconfig_spec, events, max_states)
    lifted = sync_product([allevents(mode_ttg.generator), behavioral_spec])
    supervisor = supcon(mode_ttg, lifted, events)
    if supervisor.is_empty:
        warnings.warn("no admissible behavior", stacklevel=2)
    return supervisor


__all__ = [
    "ControllabilityWitness",
    "Supervisor",
    "controllable",
    "supcon",
    "synthesize_tcrs",
]
