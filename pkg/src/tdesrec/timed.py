"""Timed transition graph construction from an activity transition graph.

An activity transition graph (ATG) describes untimed moves between
activities.  Adjoining per-event timers and the global ``tick`` event yields
the explicit-state timed transition graph (TTG):

* tick is eligible unless some enabled prospective event sits at its deadline
  (timer 0); a tick decrements the timer of every enabled event (remote
  timers floor at 0) and resets timers of disabled events to their default;
* a prospective event is eligible when enabled and its timer has dropped to
  at most ``upper - lower``; a remote event when enabled and its timer is 0;
* on occurrence of an event, its own timer resets; any other event keeps its
  timer exactly when it stays enabled across the move, and resets otherwise.

Marked timed states are those whose activity is marked in the ATG, with no
restriction on the timer component.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .automata import Generator
from .events import TICK, EventTable

DEFAULT_STATE_CAP = 1_000_000


@dataclass(frozen=True)
class TimedState:
    """An activity of the source ATG plus the current timer of each event."""

    activity: int
    timers: tuple[tuple[int, int], ...]

    def timer(self, label: int) -> int:
        for lbl, value in self.timers:
            if lbl == label:
                return value
        raise KeyError(label)

    @property
    def timers_dict(self) -> dict[int, int]:
        return dict(self.timers)


@dataclass(frozen=True)
class TimedGenerator:
    """A generator over the activity alphabet plus tick, with timed-state metadata."""

    generator: Generator
    events: EventTable
    timed_states: tuple[TimedState, ...]

    @property
    def n_states(self) -> int:
        return self.generator.n_states

    @property
    def alphabet(self) -> frozenset[int]:
        return self.generator.alphabet


def timed_graph(atg: Generator, events: EventTable,
                max_states: int = DEFAULT_STATE_CAP) -> TimedGenerator:
    """Forward exploration of the timed transition graph of ``atg``.

    Raises ``ValueError`` when an ATG event has no definition, when tick
    appears in the ATG alphabet, or when the state count exceeds
    ``max_states``.
    """
    if TICK in atg.alphabet:
        raise ValueError("tick must not appear in an activity transition graph")
    missing = sorted(atg.alphabet - events.labels)
    if missing:
        raise ValueError(f"no event definition for event {missing[0]}")
    if atg.is_empty:
        raise ValueError("cannot build a timed graph from an empty generator")

    labels = sorted(atg.alphabet)
    defs = {e: events[e] for e in labels}
    adj = atg.out_edges()
    enabled_at: list[frozenset[int]] = [
        frozenset(e for e, _ in adj[a]) for a in range(atg.n_states)
    ]

    def initial_state() -> TimedState:
        return TimedState(atg.initial,
                          tuple((e, defs[e].default_timer) for e in labels))

    def tick_allowed(state: TimedState) -> bool:
        timers = state.timers_dict
        return not any(
            defs[e].is_prospective and timers[e] == 0
            for e in enabled_at[state.activity]
        )

    def tick_step(state: TimedState) -> TimedState:
        timers = state.timers_dict
        enabled = enabled_at[state.activity]
        new = []
        for e in labels:
            if e in enabled:
                new.append((e, max(0, timers[e] - 1)))
            else:
                new.append((e, defs[e].default_timer))
        return TimedState(state.activity, tuple(new))

    def event_eligible(state: TimedState, e: int) -> bool:
        if e not in enabled_at[state.activity]:
            return False
        t = state.timer(e)
        d = defs[e]
        if d.is_prospective:
            return t <= d.upper - d.lower
        return t == 0

    def event_step(state: TimedState, e: int) -> TimedState:
        nxt_activity = atg.target(state.activity, e)
        assert nxt_activity is not None
        before = enabled_at[state.activity]
        after = enabled_at[nxt_activity]
        timers = state.timers_dict
        new = []
        for tau in labels:
            if tau == e or tau not in before or tau not in after:
                new.append((tau, defs[tau].default_timer))
            else:
                new.append((tau, timers[tau]))
        return TimedState(nxt_activity, tuple(new))

    start = initial_state()
    index: dict[TimedState, int] = {start: 0}
    states: list[TimedState] = [start]
    queue = deque([start])
    transitions: dict[tuple[int, int], int] = {}

    def visit(src: int, state: TimedState, event: int) -> None:
        if state not in index:
            if len(index) >= max_states:
                raise ValueError(f"timed graph exceeds {max_states} states")
            index[state] = len(index)
            states.append(state)
            queue.append(state)
        transitions[(src, event)] = index[state]

    while queue:
        state = queue.popleft()
        sid = index[state]
        if tick_allowed(state):
            visit(sid, tick_step(state), TICK)
        for e in labels:
            if event_eligible(state, e):
                visit(sid, event_step(state, e), e)

    marked = frozenset(i for i, ts in enumerate(states) if ts.activity in atg.marked)
    gen = Generator(len(states), frozenset(labels) | {TICK}, transitions, 0, marked)
    return TimedGenerator(gen, events, tuple(states))


def eligible(ttg: TimedGenerator, state: int) -> frozenset[int]:
    """Events with a defined transition at ``state`` of the timed graph."""
    if not (0 <= state < ttg.n_states):
        raise ValueError(f"unknown state {state}")
    return ttg.generator.eligible(state)
