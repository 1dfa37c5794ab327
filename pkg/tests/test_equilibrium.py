import random
from fractions import Fraction

import pytest

from gametree import (ResourceGuardError, compute_bce, compute_efce, gap,
                      optimal_bce, optimal_efce, outcome_equivalent,
                      profile_support)
from gametree.equilibrium import enumerate_profiles, trigger_constraints
from gametree.metrics import expected_utility
from gametree.randgen import random_game, random_mixture, random_objective

F = Fraction


def u_objective(game, player=None):
    if player is None:
        return {z.terminal_id: sum(z.payoffs, F(0)) for z in game.terminals}
    return {z.terminal_id: z.payoffs[player] for z in game.terminals}


def test_trigger_rows_vanish_on_reference_profile(ebos, ebos_pi):
    # the bundled profile is an exact equilibrium: every row is <= 0 on it
    profiles = enumerate_profiles(ebos)
    index = {tuple(ps.actions for ps in p.strategies): k
             for k, p in enumerate(profiles)}
    weights = [F(0)] * len(profiles)
    for w, p in profile_support(ebos_pi):
        weights[index[tuple(ps.actions for ps in p.strategies)]] += w
    for tc in trigger_constraints(ebos, profiles):
        value = sum((w * c for w, c in zip(weights, tc.row)), F(0))
        assert value <= 0


def test_compute_efce_fixtures(ebos, lrr, surj):
    for game in (ebos, lrr, surj):
        pi = compute_efce(game)
        assert gap(game, pi, "efce").overall == 0


def test_compute_efce_epsilon_relaxation(lrr):
    pi = compute_efce(lrr, epsilon=F(1, 5))
    assert gap(lrr, pi, "efce").overall <= F(1, 5)


def test_point_mass_ll_verifies_for_lrr(lrr):
    from gametree import pure_mixture, pure_strategy
    from gametree.strategy import PureProfile
    pi = pure_mixture(lrr, [(F(1), PureProfile(
        (pure_strategy(lrr, 0, {"R0": "L", "B": "L'"}),)))])
    assert gap(lrr, pi, "efce").overall == 0


def test_surj_equilibria_exit_on_path(surj):
    coop = surj.infoset(1, "CoopChoice")
    for pi in (compute_efce(surj), compute_bce(surj)):
        for _w, p in profile_support(pi):
            assert p.strategies[1].action_at(coop.index) == "E"


def test_optimal_efce_lrr_maximizes_player_utility(lrr):
    pi, value = optimal_efce(lrr, u_objective(lrr, 0))
    assert value == 2
    assert expected_utility(lrr, pi, 0) == 2


def test_optimal_efce_constant_objective(lrr):
    pi, value = optimal_efce(lrr, {z.terminal_id: F(3) for z in lrr.terminals})
    assert value == 3


def test_optimal_efce_ebos_welfare(ebos):
    # coordinated upgrading is incentive-compatible and worth 5 = 3 + 2
    pi, value = optimal_efce(ebos, u_objective(ebos))
    assert value == 5
    assert gap(ebos, pi, "efce").overall == 0


def test_compute_bce_fixtures(ebos, lrr, surj):
    for game in (ebos, lrr, surj):
        pi = compute_bce(game)
        assert gap(game, pi, "bce").overall == 0


def test_optimal_bce_matches_optimal_efce_value(ebos, lrr, surj):
    for game in (ebos, lrr, surj):
        c = u_objective(game)
        pi_e, ve = optimal_efce(game, c)
        pi_b, vb = optimal_bce(game, c)
        assert ve == vb
        assert gap(game, pi_b, "bce").overall == 0
        assert outcome_equivalent(game, pi_e, pi_b)


def test_optimal_value_dominates_sampled_equilibria(lrr, ebos):
    # every sampled profile that verifies at gap 0 scores no better
    from gametree import outcome_distribution
    from gametree.randgen import random_pure_profile_mixture
    rng = random.Random(31)
    for game in (lrr, ebos):
        c = u_objective(game)
        _pi, best = optimal_efce(game, c)
        hits = 0
        for _ in range(30):
            pi = random_mixture(rng, game) if rng.random() < 0.5 \
                else random_pure_profile_mixture(rng, game)
            if gap(game, pi, "efce").overall == 0:
                hits += 1
                probs = outcome_distribution(game, pi).probs
                score = sum((c.get(zid, F(0)) * p for zid, p in probs.items()), F(0))
                assert score <= best
        assert hits > 0  # the sample must actually exercise the bound


def test_profile_cap_refusal(ebos):
    with pytest.raises(ResourceGuardError):
        compute_efce(ebos, profile_cap=5)


def test_random_games_solve_and_verify():
    rng = random.Random(50)
    for _ in range(10):
        game = random_game(rng, max_nodes=16, max_pure_product=64)
        pi = compute_efce(game)
        assert gap(game, pi, "efce").overall == 0
        c = random_objective(rng, game)
        pi_e, ve = optimal_efce(game, c)
        pi_b, vb = optimal_bce(game, c)
        assert ve == vb


def test_optimal_efce_zero_objective(lrr):
    _pi, value = optimal_efce(lrr, {})
    assert value == 0


def test_optimal_bce_lrr_player_objective(lrr):
    _pi, value = optimal_bce(lrr, u_objective(lrr, 0))
    assert value == 2
