"""Counterfactual best responses and the off-path recommendation rewrite.

The rewrite takes a correlated profile in mixture form and replaces, inside
every pure strategy of its support, the action at each infoset the strategy
does not reach: the new action comes from the counterfactual best response
conditioned on the unique sequence where that strategy walked away. On-path
recommendations are untouched, so the outcome distribution is preserved
exactly, while a deviator who keeps receiving recommendations after
disobeying now only ever sees best responses to its own situation - which is
what pushes the worst-case counterfactual regret down to the causal gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .bestresponse import best_response
from .game import Game, Sequence
from .metrics import ConditionalReach, conditional_reach, pure_utility
from .strategy import (MixtureComponent, MixtureOfProducts, PureProfile,
                       PureStrategy, profile_support, pure_reaches_infoset)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class CbrEntry:
    strategy: PureStrategy
    value: Fraction  # conditional expectation at the sequence's infoset
    reach: ConditionalReach


@dataclass(frozen=True)
class CbrTable:
    """Counterfactual best responses of one player, one per sequence
    (including the empty sequence), with the conditional reach evidence each
    was computed against."""

    player: int
    entries: dict[Sequence, CbrEntry]


def counterfactual_best_response(game: Game, pi: MixtureOfProducts,
                                 player: Union[int, str],
                                 seq: Sequence) -> tuple[PureStrategy, Fraction]:
    """The pure plan maximizing conditional utility at ``seq``'s infoset,
    given that the recommendation plays to ``seq``.

    Ties break to the lexicographically first action bottom-up; infosets
    irrelevant to the objective get the lexicographically first action. For
    the empty sequence the objective is the unconditional expected utility.
    Zero-mass conditioning falls back to the unconditional law (such
    sequences are never deviation points of support strategies, so the
    choice cannot affect :func:`efce_to_bce`).
    """
    strategy, value, _reach = _cbr(game, pi, game.player_index(player), seq)
    return strategy, value


def _cbr(game: Game, pi: MixtureOfProducts, i: int, seq: Sequence):
    cr = conditional_reach(game, pi, i, seq)
    if cr.event_mass == 0 and not seq.is_empty:
        cr = conditional_reach(game, pi, i, Sequence.empty(i))
    weights = [z.payoffs[i] * z.chance_reach * cr.reach[z.index]
               for z in game.terminals]
    at = None if seq.is_empty else game.infoset(i, seq.infoset)
    value, strategy = best_response(game, i, weights, at)
    if cr.event_mass != 0:
        value = value / cr.event_mass
    return strategy, value, cr


def build_cbr_table(game: Game, pi: MixtureOfProducts,
                    player: Union[int, str]) -> CbrTable:
    game.require_valid()
    pi.validate(game)
    i = game.player_index(player)
    entries = {}
    for seq in game.sequences(i):
        strategy, value, cr = _cbr(game, pi, i, seq)
        entries[seq] = CbrEntry(strategy, value, cr)
    return CbrTable(i, entries)


def deviation_point(game: Game, ps: PureStrategy, infoset_id: str) -> Sequence:
    """The unique own sequence Ja with x(Ja) = 1, J preceding the infoset,
    and Ja not leading to it - defined exactly when ``ps`` does not reach the
    infoset (perfect recall makes it unique)."""
    i = ps.player
    iset = game.infoset(i, infoset_id)
    for j_id, a in iset.own_history:
        j = game.infoset(i, j_id)
        played = ps.action_at(j.index)
        if played != a:
            return Sequence(i, j_id, played)
    raise ValueError(f"strategy reaches infoset {infoset_id!r}; no deviation point")


def efce_to_bce(game: Game, pi: MixtureOfProducts) -> MixtureOfProducts:
    """Rewrite off-path recommendations with counterfactual best responses.

    Preserves T, every K_i(t), and all weights; only local actions at
    infosets a support strategy does not reach are changed. The output is
    outcome-equivalent to the input, and its worst-case counterfactual
    (history-seeing) gap is at most the input's causal gap - both facts are
    verified by the callers and the test suite rather than assumed.
    """
    game.require_valid()
    pi.validate(game)
    cbr_cache: list[dict[Sequence, PureStrategy]] = [{} for _ in range(game.n)]

    def cbr_for(i: int, seq: Sequence) -> PureStrategy:
        hit = cbr_cache[i].get(seq)
        if hit is None:
            hit = _cbr(game, pi, i, seq)[0]
            cbr_cache[i][seq] = hit
        return hit

    new_components = []
    for comp in pi.components:
        per_player = []
        for i, mix in enumerate(comp.strategies):
            new_mix = []
            for beta, ps in mix:
                actions = list(ps.actions)
                for iset in game.infosets[i]:
                    if pure_reaches_infoset(game, ps, iset.id):
                        continue
                    dev = deviation_point(game, ps, iset.id)
                    if comp.alpha * beta > 0:
                        # support strategies condition on positive-mass events
                        mass = conditional_reach(game, pi, i, dev).event_mass
                        assert mass >= comp.alpha * beta > 0
                    actions[iset.index] = cbr_for(i, dev).action_at(iset.index)
                new_mix.append((beta, PureStrategy(i, tuple(actions))))
            per_player.append(tuple(new_mix))
        new_components.append(MixtureComponent(comp.alpha, tuple(per_player)))
    out = MixtureOfProducts(tuple(new_components))
    out.validate(game)
    return out


def restricted_deviation_value(game: Game, pi: MixtureOfProducts,
                               player: Union[int, str], witness,
                               infoset_id: str) -> Fraction:
    """Ordinary regret of the witness deviation applied only at infosets
    weakly after the given one (play elsewhere stays obedient)."""
    game.require_valid()
    i = game.player_index(player)
    start = game.infoset(i, infoset_id)
    total = ZERO
    for w, profile in profile_support(pi):
        ps = profile.strategies[i]
        deviated = witness.apply(game, ps)
        actions = tuple(
            deviated.action_at(iset.index) if game.precedes(start, iset)
            else ps.action_at(iset.index)
            for iset in game.infosets[i])
        strategies = list(profile.strategies)
        strategies[i] = PureStrategy(i, actions)
        total += w * (pure_utility(game, PureProfile(tuple(strategies)), i)
                      - pure_utility(game, profile, i))
    return total
