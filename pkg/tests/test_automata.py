"""Core generator operations against small hand-checked cases and oracles."""

import random

import pytest

from tdesrec.automata import (
    Generator,
    allevents,
    bounded_language,
    is_nonblocking,
    language_equal,
    language_subset,
    meet,
    minimize,
    project,
    project_detail,
    renumber_bfs,
    sync_product,
    to_dot,
    trim,
)
from tdesrec.events import (
    PROHIBITIBLE,
    TICK,
    UNCONTROLLABLE,
    EventDef,
    EventTable,
    event_name,
)
from util import oracle_language_equal, random_generator


def chain(events, marked_last=True):
    """Linear generator executing the given events in order."""
    n = len(events) + 1
    transitions = {(i, e): i + 1 for i, e in enumerate(events)}
    marked = frozenset({n - 1}) if marked_last else frozenset({0})
    return Generator(n, frozenset(events), transitions, 0, marked)


class TestEventDefs:
    def test_tick_label_reserved(self):
        with pytest.raises(ValueError):
            EventDef(TICK, PROHIBITIBLE)

    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            EventDef(5, PROHIBITIBLE, lower=3, upper=2)
        with pytest.raises(ValueError):
            EventDef(5, PROHIBITIBLE, lower=-1)

    def test_remote_and_prospective(self):
        remote = EventDef(5, UNCONTROLLABLE, lower=2, upper=None)
        prospective = EventDef(6, PROHIBITIBLE, lower=1, upper=3)
        assert remote.is_remote and not remote.is_prospective
        assert remote.default_timer == 2
        assert prospective.is_prospective and prospective.default_timer == 3

    def test_table_rejects_duplicates(self):
        with pytest.raises(ValueError):
            EventTable([EventDef(5, PROHIBITIBLE), EventDef(5, UNCONTROLLABLE)])

    def test_table_classification(self):
        table = EventTable([
            EventDef(1, PROHIBITIBLE, forcible=True),
            EventDef(2, UNCONTROLLABLE),
        ])
        assert table.forcible == {1}
        assert table.prohibitible == {1}
        assert table.uncontrollable == {2}
        assert not table.is_forcible(TICK)
        assert not table.is_prohibitible(TICK)

    def test_event_name(self):
        assert event_name(TICK) == "tick"
        assert event_name(12) == "12"


class TestGeneratorBasics:
    def test_determinism_enforced_by_map(self):
        g = chain([1, 2])
        assert g.target(0, 1) == 1
        assert g.target(0, 2) is None
        assert g.eligible(1) == {2}

    def test_validation(self):
        with pytest.raises(ValueError):
            Generator(2, frozenset({1}), {(0, 2): 1}, 0, frozenset())
        with pytest.raises(ValueError):
            Generator(1, frozenset(), {}, 3, frozenset())

    def test_empty_generator(self):
        g = Generator(0, frozenset({1}), {}, 0, frozenset())
        assert g.is_empty
        assert g.run(()) is None


class TestSyncProduct:
    def test_no_components(self):
        with pytest.raises(ValueError, match="no components"):
            sync_product([])

    def test_identity_up_to_renumbering(self):
        rng = random.Random(1)
        for _ in range(20):
            g = random_generator(rng)
            assert language_equal(sync_product([g]), g)

    def test_disjoint_interleaving_counts_states(self):
        # Two 2-state generators over disjoint single-event alphabets must
        # interleave into a 4-state square (hand enumeration of the product).
        a = Generator(2, frozenset({1}), {(0, 1): 1}, 0, frozenset({1}))
        b = Generator(2, frozenset({2}), {(0, 2): 1}, 0, frozenset({1}))
        prod = sync_product([a, b])
        assert prod.n_states == 4
        closed, marked = bounded_language(prod, 3)
        assert closed == {(), (1,), (2,), (1, 2), (2, 1)}
        assert marked == {(1, 2), (2, 1)}

    def test_shared_events_synchronize(self):
        a = chain([1, 2])
        b = chain([2])
        prod = sync_product([a, b])
        closed, marked = bounded_language(prod, 4)
        assert closed == {(), (1,), (1, 2)}
        assert marked == {(1, 2)}

    def test_associative_up_to_language(self):
        rng = random.Random(2)
        for _ in range(15):
            comps = [random_generator(rng, 3, (1, 2)),
                     random_generator(rng, 3, (2, 3)),
                     random_generator(rng, 3, (1, 3))]
            base = sync_product(comps)
            for order in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
                other = sync_product([comps[i] for i in order])
                assert language_equal(base, other)


class TestMeet:
    def test_meet_self(self):
        rng = random.Random(3)
        for _ in range(10):
            g = random_generator(rng)
            assert language_equal(meet(g, g), g)

    def test_meet_allevents_identity(self):
        rng = random.Random(4)
        for _ in range(10):
            g = random_generator(rng)
            assert language_equal(meet(g, allevents(g)), g)

    def test_shared_path_only(self):
        # Two 3-state chains sharing only event 2: meet keeps the shared path
        # (expected strings enumerated by hand over the 2-step horizon).
        a = chain([1, 2])
        b = chain([3, 2])
        result = meet(a, b)
        closed, _ = bounded_language(result, 4)
        assert closed == {()}


class TestProject:
    def test_empty_erase_is_identity(self):
        rng = random.Random(5)
        for _ in range(10):
            g = random_generator(rng)
            assert language_equal(project(g, frozenset()), g)

    def test_definitional_example(self):
        # tick . sigma . tick projects to {eps, sigma}.
        g = chain([TICK, 7, TICK])
        g = Generator(g.n_states, g.alphabet | {TICK}, dict(g.transitions),
                      0, g.marked)
        p = project(g, {TICK})
        closed, marked = bounded_language(p, 4)
        assert closed == {(), (7,)}
        assert marked == {(7,)}

    def test_erase_outside_alphabet_rejected(self):
        with pytest.raises(ValueError):
            project(chain([1]), {9})

    def test_marking_of_subsets(self):
        # A state subset is marked iff it contains a marked state.
        g = Generator(3, frozenset({TICK, 5}), {(0, TICK): 1, (1, 5): 2},
                      0, frozenset({1}))
        p = project(g, {TICK})
        assert () in bounded_language(p, 2)[1]

    @staticmethod
    def _has_preimage(g, erase, string):
        # Search (source state, consumed length) pairs: erased events keep
        # the position, visible events must match the next symbol.
        seen = {(g.initial, 0)}
        frontier = [(g.initial, 0)]
        while frontier:
            nxt = []
            for q, i in frontier:
                if i == len(string):
                    return True
                for (s, e), t in g.transitions.items():
                    if s != q:
                        continue
                    if e in erase:
                        key = (t, i)
                    elif i < len(string) and e == string[i]:
                        key = (t, i + 1)
                    else:
                        continue
                    if key not in seen:
                        seen.add(key)
                        nxt.append(key)
            frontier = nxt
        return any(i == len(string) for (_, i) in seen)

    def test_bounded_enumeration_soundness(self):
        # Every short projected string is the erased image of a source string,
        # and conversely every erased image of a short source string is
        # accepted by the projection.
        rng = random.Random(6)
        for _ in range(25):
            g = random_generator(rng, 8, (1, 2, 3), density=0.4)
            erase = frozenset({2})
            p = project(g, erase)
            closed_p, _ = bounded_language(p, 5)
            for s in closed_p:
                assert self._has_preimage(g, erase, s)
            closed_g, _ = bounded_language(g, 6)
            for s in closed_g:
                image = tuple(e for e in s if e not in erase)
                assert p.run(image) is not None

    def test_subset_map_covers_states(self, ):
        g = chain([TICK, 4])
        g = Generator(g.n_states, g.alphabet | {TICK}, dict(g.transitions), 0, g.marked)
        detail = project_detail(g, {TICK})
        assert detail.generator.n_states == len(detail.subsets)
        assert all(isinstance(s, frozenset) for s in detail.subsets)
        # The initial subset is the tick closure of the initial state.
        assert 0 in detail.subsets[0] and 1 in detail.subsets[0]


class TestAllEvents:
    def test_single_event(self):
        g = chain([4])
        ae = allevents(g)
        assert ae.n_states == 1
        assert ae.transitions == {(0, 4): 0}
        assert ae.marked == {0}

    def test_empty_alphabet(self):
        g = Generator(1, frozenset(), {}, 0, frozenset({0}))
        ae = allevents(g)
        assert ae.n_states == 1 and not ae.transitions and ae.marked == {0}


class TestTrimNonblocking:
    def test_single_marked_state(self):
        g = Generator(1, frozenset(), {}, 0, frozenset({0}))
        assert is_nonblocking(g)

    def test_dead_end_detected(self):
        g = Generator(2, frozenset({1}), {(0, 1): 1}, 0, frozenset({0}))
        assert not is_nonblocking(g)

    def test_trim_removes_unreachable(self):
        g = Generator(3, frozenset({1}), {(0, 1): 1}, 0, frozenset({1}))
        t = trim(g)
        assert t.n_states == 2

    def test_trim_already_trim(self):
        g = chain([1, 2])
        assert trim(g) == renumber_bfs(g)

    def test_trim_result_nonblocking(self):
        rng = random.Random(7)
        for _ in range(30):
            g = random_generator(rng, 6, (1, 2), density=0.4)
            t = trim(g)
            assert is_nonblocking(t)

    def test_trim_preserves_marked_language(self):
        rng = random.Random(8)
        for _ in range(30):
            g = random_generator(rng, 6, (1, 2), density=0.4)
            t = trim(g)
            assert bounded_language(g, 6)[1] == bounded_language(t, 6)[1]


class TestLanguageEqual:
    def test_reflexive(self):
        g = chain([1, 2, 1])
        assert language_equal(g, g)

    def test_detects_removed_transition(self):
        g = chain([1, 2])
        smaller = Generator(g.n_states, g.alphabet,
                            {(0, 1): 1}, 0, g.marked)
        assert not language_equal(g, smaller)

    def test_alphabet_mismatch(self):
        with pytest.raises(ValueError):
            language_equal(chain([1]), chain([2]))

    def test_projection_of_nothing_property(self):
        rng = random.Random(9)
        for _ in range(100):
            g = random_generator(rng, 6, (1, 2, 3), density=0.5)
            assert language_equal(g, project(g, frozenset()))

    def test_agrees_with_bounded_oracle(self):
        rng = random.Random(10)
        for _ in range(60):
            a = random_generator(rng, 4, (1, 2), density=0.5)
            b = random_generator(rng, 4, (1, 2), density=0.5)
            assert language_equal(a, b) == oracle_language_equal(a, b, 9)

    def test_subset_check(self):
        g = chain([1, 2])
        smaller = Generator(g.n_states, g.alphabet, {(0, 1): 1}, 0, frozenset())
        assert language_subset(smaller, g)
        assert not language_subset(g, smaller)


class TestMinimize:
    def test_preserves_both_languages(self):
        rng = random.Random(11)
        for _ in range(40):
            g = random_generator(rng, 7, (1, 2), density=0.5)
            m = minimize(g)
            assert m.n_states <= max(g.n_states, 1)
            assert bounded_language(g, 7) == bounded_language(m, 7)

    def test_merges_duplicate_states(self):
        # Two interchangeable marked tails must fold together.
        g = Generator(
            4, frozenset({1, 2}),
            {(0, 1): 1, (0, 2): 2, (1, 1): 3, (2, 1): 3},
            0, frozenset({3}))
        assert minimize(g).n_states == 3


class TestDot:
    def test_dot_contains_nodes_and_tick_label(self):
        g = Generator(2, frozenset({TICK, 5}), {(0, TICK): 1, (1, 5): 0},
                      0, frozenset({0}))
        dot = to_dot(g, "T")
        assert "digraph T" in dot
        assert "doublecircle" in dot
        assert '"tick"' in dot
