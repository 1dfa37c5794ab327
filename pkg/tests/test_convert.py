import random
from fractions import Fraction

import pytest

from gametree import (Sequence, build_cbr_table, counterfactual_best_response,
                      deviation_point, efce_to_bce, gap, outcome_equivalent,
                      outcome_distribution, profile_support, pure_mixture,
                      pure_strategy, restricted_deviation_value)
from gametree.randgen import random_game, random_mixture
from gametree.strategy import PureProfile, sequence_form
from gametree.witnesses import HistoryPolicyWitness, TriggerCommitWitness

F = Fraction


def test_cbr_ebos_after_notu(ebos, ebos_pi):
    strategy, value = counterfactual_best_response(
        ebos, ebos_pi, 0, ebos.sequence(0, "Root", "NotU"))
    assert strategy.assignment(ebos) == {"Root": "U", "AfterU": "X1",
                                         "AfterNotU": "X1"}
    assert value == F(3, 2)


def test_cbr_lrr_after_l(lrr, lrr_small):
    strategy, value = counterfactual_best_response(
        lrr, lrr_small, 0, lrr.sequence(0, "R0", "L"))
    assert strategy.assignment(lrr) == {"R0": "L", "B": "L'"}
    assert value == 2


def test_cbr_all_zero_subtree_ties_lexicographically():
    import json
    from gametree import parse_game
    g = parse_game(json.dumps({"players": ["A"], "root": {
        "kind": "decision", "player": 0, "infoset": "top", "actions": [
            {"label": "go", "child": {
                "kind": "decision", "player": 0, "infoset": "mid", "actions": [
                    {"label": "z2", "child": {"kind": "terminal", "payoffs": ["0"]}},
                    {"label": "z1", "child": {"kind": "terminal", "payoffs": ["0"]}}]}},
            {"label": "stop", "child": {"kind": "terminal", "payoffs": ["0"]}}]}}))
    pi = pure_mixture(g, [(F(1), PureProfile(
        (pure_strategy(g, 0, {"top": "stop", "mid": "z2"}),)))])
    strategy, value = counterfactual_best_response(g, pi, 0, g.sequence(0, "top", "go"))
    assert value == 0
    # every response ties at 0, so byte-order first actions win
    assert strategy.assignment(g) == {"top": "go", "mid": "z1"}


def test_cbr_table_covers_every_sequence(ebos, ebos_pi):
    table = build_cbr_table(ebos, ebos_pi, 0)
    assert set(table.entries) == set(ebos.sequences(0))
    empty = table.entries[Sequence.empty(0)]
    assert empty.reach.event_mass == 1
    # the recorded value is the optimum against the recorded reach
    assert empty.value == F(3, 2)


def test_cbr_zero_mass_falls_back_to_unconditional(lrr, lrr_small):
    from gametree import conditional_reach
    # the recommendation never plays B:L', so the event has zero mass and
    # the response is computed (and recorded) against the unconditional law
    seq = lrr.sequence(0, "B", "L'")
    assert conditional_reach(lrr, lrr_small, 0, seq).event_mass == 0
    table = build_cbr_table(lrr, lrr_small, 0)
    assert table.entries[seq].reach.event_mass == 1
    assert table.entries[seq].reach.sequence.is_empty
    strategy, value = counterfactual_best_response(lrr, lrr_small, 0, seq)
    assert strategy.assignment(lrr)["B"] == "L'"
    assert value == 1  # value measured at B under the fallback law


def test_deviation_point_lrr(lrr):
    ps = pure_strategy(lrr, 0, {"R0": "L", "B": "R'"})
    dev = deviation_point(lrr, ps, "B")
    assert (dev.infoset, dev.action) == ("R0", "L")
    with pytest.raises(ValueError):
        deviation_point(lrr, pure_strategy(lrr, 0, {"R0": "R", "B": "R'"}), "B")


def test_efce_to_bce_ebos_matches_reference(ebos, ebos_pi):
    out = efce_to_bce(ebos, ebos_pi)
    support = sorted((w, tuple(ps.actions for ps in p.strategies))
                     for w, p in profile_support(out))
    assert support == sorted([
        (F(1, 2), (("NotU", "X1", "X1"), ("X2",))),
        (F(1, 2), (("NotU", "Y1", "X1"), ("Y2",))),
    ])


def test_efce_to_bce_lrr_small_is_fixed_point(lrr, lrr_small):
    out = efce_to_bce(lrr, lrr_small)
    assert out == lrr_small


def test_efce_to_bce_identity_when_everything_on_path():
    import json
    from gametree import parse_game
    g = parse_game(json.dumps({"players": ["A"], "root": {
        "kind": "decision", "player": 0, "infoset": "only", "actions": [
            {"label": "a", "child": {"kind": "terminal", "payoffs": ["1"]}},
            {"label": "b", "child": {"kind": "terminal", "payoffs": ["0"]}}]}}))
    pi = pure_mixture(g, [(F(1, 2), PureProfile((pure_strategy(g, 0, {"only": "a"}),))),
                          (F(1, 2), PureProfile((pure_strategy(g, 0, {"only": "b"}),)))])
    assert efce_to_bce(g, pi) == pi


def test_conversion_preserves_structure_and_weights(surj, surj_pi):
    out = efce_to_bce(surj, surj_pi)
    assert len(out.components) == len(surj_pi.components)
    for before, after in zip(surj_pi.components, out.components):
        assert before.alpha == after.alpha
        for mix_b, mix_a in zip(before.strategies, after.strategies):
            assert [b for b, _ in mix_b] == [b for b, _ in mix_a]


def test_conversion_changes_only_off_path_actions(surj, surj_pi):
    out = efce_to_bce(surj, surj_pi)
    for before, after in zip(surj_pi.components, out.components):
        for i, (mix_b, mix_a) in enumerate(zip(before.strategies, after.strategies)):
            for (_, ps_b), (_, ps_a) in zip(mix_b, mix_a):
                # on-path sequence-form reach is identical
                assert sequence_form(surj, ps_b).reach == \
                    sequence_form(surj, ps_a).reach
                for iset in surj.infosets[i]:
                    from gametree.strategy import pure_reaches_infoset
                    if pure_reaches_infoset(surj, ps_b, iset.id):
                        assert ps_b.action_at(iset.index) == ps_a.action_at(iset.index)


def test_conversion_idempotent_up_to_outcome(ebos, ebos_pi, lrr, lrr_small):
    for game, pi in ((ebos, ebos_pi), (lrr, lrr_small)):
        once = efce_to_bce(game, pi)
        twice = efce_to_bce(game, once)
        assert outcome_equivalent(game, once, twice)


def test_conversion_bound_on_random_profiles():
    rng = random.Random(1234)
    for _ in range(15):
        game = random_game(rng, max_nodes=16, max_pure_product=64)
        pi = random_mixture(rng, game)
        eps = gap(game, pi, "efce").overall
        out = efce_to_bce(game, pi)
        assert outcome_equivalent(game, pi, out)
        assert gap(game, out, "bce").overall <= eps


def test_restricted_deviation_ebos_upgrade(ebos, ebos_pi):
    # "upgrade, then obey" applied from the root loses its edge after the
    # rewrite: the upgraded recommendation is always X1
    converted = efce_to_bce(ebos, ebos_pi)
    policy = []
    for hist in ((("Root", "NotU"),), (("Root", "U"),)):
        policy.append(("Root", hist, "U"))
    witness = HistoryPolicyWitness(0, tuple(policy))
    value = restricted_deviation_value(ebos, converted, 0, witness, "Root")
    assert value <= 0
    # against the original profile the same deviation gains a full point
    assert restricted_deviation_value(ebos, ebos_pi, 0, witness, "Root") == 1


def test_restricted_deviation_identity_is_zero(ebos, ebos_pi):
    witness = TriggerCommitWitness(0, ())
    assert restricted_deviation_value(ebos, ebos_pi, 0, witness, "Root") == 0


def test_restricted_deviation_lrr_at_b(lrr, lrr_small):
    converted = efce_to_bce(lrr, lrr_small)
    policy = []
    for root_rec in ("L", "R"):
        for b_rec in ("L'", "R'"):
            policy.append(("B", (("R0", root_rec), ("B", b_rec)), "L'"))
    witness = HistoryPolicyWitness(0, tuple(policy))
    assert restricted_deviation_value(lrr, converted, 0, witness, "B") == F(1, 10)


def test_conversion_keeps_support_conditioning_positive(ebos, ebos_pi):
    # deviation points of support strategies always carry positive mass
    out = efce_to_bce(ebos, ebos_pi)  # the internal assertion would trip otherwise
    assert outcome_distribution(ebos, out).probs["NotU/X1/X2"] == F(1, 2)


def test_cbr_table_values_recompute_from_recorded_reach(ebos, ebos_pi):
    # the stored value is the optimum against the stored conditional law
    from gametree.bestresponse import best_response
    table = build_cbr_table(ebos, ebos_pi, 0)
    for seq, entry in table.entries.items():
        weights = [z.payoffs[0] * z.chance_reach * entry.reach.reach[z.index]
                   for z in ebos.terminals]
        at = None if seq.is_empty else ebos.infoset(0, seq.infoset)
        value, strategy = best_response(ebos, 0, weights, at)
        if entry.reach.event_mass:
            value /= entry.reach.event_mass
        assert value == entry.value
        assert strategy == entry.strategy


def test_regret_chain_on_converted_profiles(ebos, ebos_pi, lrr, lrr_pi, lrr_small):
    # on a rewritten profile, counterfactual regret at an infoset is bounded
    # by the ordinary regret of the deviation restricted to that infoset's
    # subtree, which in turn is bounded by the source profile's causal gap
    from gametree.metrics import counterfactual_utility
    cases = [(ebos, ebos_pi, efce_to_bce(ebos, ebos_pi)),
             (lrr, lrr_pi, efce_to_bce(lrr, lrr_small))]
    exercised = 0
    for game, source, converted in cases:
        eps = gap(game, source, "efce").overall
        report = gap(game, converted, "bce")
        for i in range(game.n):
            witness = report.witness
            if witness.player != i or witness.at_infoset is None:
                continue
            exercised += 1
            iset_id = witness.at_infoset
            cf_regret = F(0)
            for w, profile in profile_support(converted):
                strategies = list(profile.strategies)
                strategies[i] = witness.apply(game, profile.strategies[i])
                cf_regret += w * (
                    counterfactual_utility(game, PureProfile(tuple(strategies)),
                                           i, iset_id)
                    - counterfactual_utility(game, profile, i, iset_id))
            restricted = restricted_deviation_value(game, converted, i,
                                                    witness, iset_id)
            assert cf_regret <= restricted <= eps
            assert cf_regret == report.per_infoset[(i, iset_id)]
    assert exercised >= 1
