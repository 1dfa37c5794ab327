import random
from fractions import Fraction

import pytest

from gametree import (ProfileError, ProfileParseError, Sequence, decompose,
                      mixture_from_behavior_products, parse_profile,
                      profile_support, pure_strategy, sequence_form,
                      serialize_profile)
from gametree.randgen import random_behavior_strategy, random_game
from gametree.strategy import (BehaviorStrategy, behavior_product_expansion,
                               expand_behavior_products)

F = Fraction


def lrr_behavior(lrr):
    return BehaviorStrategy(0, {
        "R0": {"L": F(9, 10), "R": F(1, 10)},
        "B": {"R'": F(1)},
    })


def test_sequence_form_behavior_lrr(lrr):
    v = sequence_form(lrr, lrr_behavior(lrr))
    reach = {s.label(): v.reach[s] for s in lrr.sequences(0)}
    assert reach == {"empty": 1, "R0:L": F(9, 10), "R0:R": F(1, 10),
                     "B:L'": 0, "B:R'": F(1, 10)}
    v.validate(lrr)


def test_sequence_form_pure_lrr(lrr):
    ps = pure_strategy(lrr, 0, {"R0": "L", "B": "L'"})
    v = sequence_form(lrr, ps)
    assert v.reach[lrr.sequence(0, "R0", "L")] == 1
    assert v.reach[lrr.sequence(0, "R0", "R")] == 0
    assert v.reach[lrr.sequence(0, "B", "L'")] == 0  # unreachable under L
    assert all(q in (0, 1) for q in v.reach.values())


def test_sequence_form_uniform_single_infoset():
    import json
    from gametree import parse_game
    g = parse_game(json.dumps({"players": ["A"], "root": {
        "kind": "decision", "player": 0, "infoset": "i", "actions": [
            {"label": "a", "child": {"kind": "terminal", "payoffs": ["0"]}},
            {"label": "b", "child": {"kind": "terminal", "payoffs": ["1"]}}]}}))
    v = sequence_form(g, BehaviorStrategy(0, {"i": {"a": F(1, 2), "b": F(1, 2)}}))
    assert v.reach[g.sequence(0, "i", "a")] == F(1, 2)
    assert v.reach[g.sequence(0, "i", "b")] == F(1, 2)


def test_sequence_vs_local_indicator(lrr):
    # reaching a sequence is reach-to-the-infoset times the local choice
    ps = pure_strategy(lrr, 0, {"R0": "L", "B": "R'"})
    v = sequence_form(lrr, ps).reach
    for iset in lrr.infosets[0]:
        for a in iset.actions:
            local = 1 if ps.action_at(iset.index) == a else 0
            inflow = v[iset.parent_seq]
            assert v[lrr.sequence(0, iset.id, a)] == inflow * local


def test_decompose_lrr_example(lrr):
    parts = decompose(lrr, sequence_form(lrr, lrr_behavior(lrr)))
    assert [(w, ps.actions) for w, ps in parts] == [
        (F(9, 10), ("L", "L'")), (F(1, 10), ("R", "R'"))]


def test_decompose_pure_is_extreme(lrr):
    ps = pure_strategy(lrr, 0, {"R0": "R", "B": "L'"})
    parts = decompose(lrr, sequence_form(lrr, ps))
    assert parts == [(F(1), ps)]


def test_decompose_uniform_two_actions():
    import json
    from gametree import parse_game
    g = parse_game(json.dumps({"players": ["A"], "root": {
        "kind": "decision", "player": 0, "infoset": "i", "actions": [
            {"label": "a", "child": {"kind": "terminal", "payoffs": ["0"]}},
            {"label": "b", "child": {"kind": "terminal", "payoffs": ["1"]}}]}}))
    v = sequence_form(g, BehaviorStrategy(0, {"i": {"a": F(1, 2), "b": F(1, 2)}}))
    parts = decompose(g, v)
    assert [(w, ps.actions) for w, ps in parts] == [(F(1, 2), ("a",)), (F(1, 2), ("b",))]


def test_decompose_round_trip_random(ebos, lrr, surj):
    rng = random.Random(99)
    for game in (ebos, lrr, surj):
        for i in range(game.n):
            for _ in range(40):
                v = sequence_form(game, random_behavior_strategy(rng, game, i))
                trace = []
                parts = decompose(game, v, _trace=trace)
                assert sum(w for w, _ in parts) == 1
                assert all(w > 0 for w, _ in parts)
                assert len(parts) <= len(game.sequences(i))
                recon = {}
                for w, ps in parts:
                    for seq, r in sequence_form(game, ps).reach.items():
                        recon[seq] = recon.get(seq, F(0)) + w * r
                assert recon == v.reach
                # each round strictly shrinks the nonzero residual support
                assert all(b < a for a, b in zip(trace, trace[1:]))


def test_decompose_requires_valid_vector(lrr):
    from gametree.strategy import SequenceFormVector
    bad = SequenceFormVector(0, {Sequence.empty(0): F(1, 2)})
    with pytest.raises(ProfileError):
        decompose(lrr, bad)


def test_mixture_from_behavior_products_lrr(lrr):
    pi = mixture_from_behavior_products(lrr, [(F(1), [lrr_behavior(lrr)])])
    assert len(pi.components) == 1
    support = sorted((w, p.strategies[0].actions) for w, p in profile_support(pi))
    assert support == [(F(1, 10), ("R", "R'")), (F(9, 10), ("L", "L'"))]


def test_expansion_is_the_literal_product(lrr):
    parts = behavior_product_expansion(lrr, lrr_behavior(lrr))
    assert sorted((w, ps.actions) for w, ps in parts) == [
        (F(1, 10), ("R", "R'")), (F(9, 10), ("L", "R'"))]


def test_expansion_and_decomposition_share_sequence_marginals(ebos):
    rng = random.Random(21)
    for i in range(ebos.n):
        b = random_behavior_strategy(rng, ebos, i)
        v = sequence_form(ebos, b).reach
        for parts in (behavior_product_expansion(ebos, b),
                      decompose(ebos, sequence_form(ebos, b))):
            recon = {}
            for w, ps in parts:
                for seq, r in sequence_form(ebos, ps).reach.items():
                    recon[seq] = recon.get(seq, F(0)) + w * r
            assert recon == v


def test_profile_support_product_weights(ebos, ebos_pi):
    support = list(profile_support(ebos_pi))
    assert len(support) == 2
    assert all(w == F(1, 2) for w, _ in support)


def test_profile_support_product_expansion(lrr):
    a = pure_strategy(lrr, 0, {"R0": "L", "B": "L'"})
    b = pure_strategy(lrr, 0, {"R0": "R", "B": "R'"})
    from gametree.strategy import MixtureComponent, MixtureOfProducts
    comp = MixtureComponent(F(1), ((F(1, 2), a), (F(1, 2), b)),)
    # two players would multiply out; with one player K=2 gives two entries
    pi = MixtureOfProducts((MixtureComponent(F(1), (((F(1, 2), a), (F(1, 2), b)),)),))
    support = list(profile_support(pi))
    assert sorted(w for w, _ in support) == [F(1, 2), F(1, 2)]


def test_two_identical_components_same_distribution(lrr, lrr_pi):
    from gametree import outcome_distribution
    from gametree.strategy import MixtureComponent, MixtureOfProducts
    comp = lrr_pi.components[0]
    halved = MixtureOfProducts((
        MixtureComponent(F(1, 2), comp.strategies),
        MixtureComponent(F(1, 2), comp.strategies)))
    assert outcome_distribution(lrr, halved).probs == \
        outcome_distribution(lrr, lrr_pi).probs


def test_mixture_validation_rejects_bad_weights(lrr):
    text = """{"components": [{"alpha": "2/3", "strategies":
        [[{"beta": "1", "actions": {"R0": "L", "B": "L'"}}]]}]}"""
    with pytest.raises(ProfileError):
        parse_profile(lrr, text)


def test_profile_parse_rejects_malformed(lrr):
    with pytest.raises(ProfileParseError):
        parse_profile(lrr, "{not json")
    with pytest.raises(ProfileParseError):
        parse_profile(lrr, "{\"components\": []}")


def test_profile_parse_rejects_partial_strategy(lrr):
    text = """{"components": [{"alpha": "1", "strategies":
        [[{"beta": "1", "actions": {"R0": "L"}}]]}]}"""
    with pytest.raises(ProfileError, match="misses infoset"):
        parse_profile(lrr, text)


def test_profile_parse_rejects_unknown_action(lrr):
    text = """{"components": [{"alpha": "1", "strategies":
        [[{"beta": "1", "actions": {"R0": "L", "B": "Z"}}]]}]}"""
    with pytest.raises(ProfileError, match="no action"):
        parse_profile(lrr, text)


def test_profile_serialization_round_trip(ebos, ebos_pi):
    text = serialize_profile(ebos, ebos_pi)
    again = parse_profile(ebos, text)
    assert again == ebos_pi
    assert serialize_profile(ebos, again) == text


def test_behavior_profile_modes_differ_exactly_as_designed(lrr):
    from gametree import fixtures, gap
    text = fixtures.fixture_text("lrr.behavior.json")
    literal = parse_profile(lrr, text)  # default expands
    small = parse_profile(lrr, text, behavior_mode="decompose")
    assert gap(lrr, literal, "efce").overall == gap(lrr, small, "efce").overall
    assert gap(lrr, literal, "bce").overall != gap(lrr, small, "bce").overall


def test_random_games_round_trip_profiles():
    rng = random.Random(42)
    for _ in range(10):
        g = random_game(rng, max_nodes=15)
        items = [(F(1), [random_behavior_strategy(rng, g, i) for i in range(g.n)])]
        pi = expand_behavior_products(g, items)
        text = serialize_profile(g, pi)
        assert parse_profile(g, text) == pi


def test_profile_support_two_players_k2_gives_four_products(ebos):
    from gametree.strategy import MixtureComponent, MixtureOfProducts
    p1a = pure_strategy(ebos, 0, {"Root": "NotU", "AfterNotU": "X1", "AfterU": "X1"})
    p1b = pure_strategy(ebos, 0, {"Root": "U", "AfterNotU": "Y1", "AfterU": "Y1"})
    p2a = pure_strategy(ebos, 1, {"Event": "X2"})
    p2b = pure_strategy(ebos, 1, {"Event": "Y2"})
    pi = MixtureOfProducts((MixtureComponent(F(1), (
        ((F(1, 3), p1a), (F(2, 3), p1b)),
        ((F(1, 4), p2a), (F(3, 4), p2b)),
    )),))
    pi.validate(ebos)
    support = list(profile_support(pi))
    assert len(support) == 4
    weights = sorted(w for w, _ in support)
    assert weights == sorted([F(1, 12), F(1, 4), F(1, 6), F(1, 2)])
    assert sum(weights) == 1


def test_decomposition_preserves_causal_and_commit_blind_gaps():
    # the small-support form keeps every per-(component, player) sequence
    # marginal, and those marginals are all the causal and commit-blind gap
    # programs ever read; counterfactual gaps may legitimately move
    from gametree import gap, outcome_equivalent
    from gametree.randgen import random_behavior_strategy, random_game
    rng = random.Random(86420)
    for _ in range(25):
        g = random_game(rng, max_players=3, max_nodes=18,
                        max_pure_product=96, max_pure_per_player=24)
        t = rng.randint(1, 3)
        weights = [rng.randint(1, 4) for _ in range(t)]
        total = sum(weights)
        items = [(F(w, total),
                  [random_behavior_strategy(rng, g, i) for i in range(g.n)])
                 for w in weights]
        literal = expand_behavior_products(g, items)
        small = mixture_from_behavior_products(g, items)
        assert outcome_equivalent(g, literal, small)
        assert gap(g, literal, "efce").overall == gap(g, small, "efce").overall
        assert gap(g, literal, "nfcce").overall == gap(g, small, "nfcce").overall
