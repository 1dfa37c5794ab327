"""Best pure plan against fixed terminal weights.

The objective is linear in the player's own reach indicators:

    value(x) = sum_z W(z) * x(z | start)

where W already folds payoff, chance reach and (expected) opponent reach.
Because W does not depend on x, the maximum decomposes over the player's
sequence structure and one bottom-up pass suffices. Ties at an infoset go to
the lexicographically (byte-order) first action; infosets outside the scope
of the objective also get the lexicographically first action.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence as Seq

from .game import Game, Infoset, Sequence
from .strategy import PureStrategy

ZERO = Fraction(0)


def best_response(game: Game, player: int, weights: Seq[Fraction],
                  at_infoset: Optional[Infoset] = None) -> tuple[Fraction, PureStrategy]:
    """Maximize sum_z weights[z] * x(z | at_infoset) over pure plans.

    With ``at_infoset`` None the indicator is x(z) from the root and the
    value includes terminals the player never acts on. Otherwise only
    terminals below the infoset count and the plan is optimized at infosets
    weakly following it (everything else is set lexicographically first).
    """
    infosets = game.infosets[player]
    f_value: dict[int, Fraction] = {}
    f_choice: dict[int, str] = {}
    for iset in reversed(infosets):  # children precede parents in reverse discovery order
        best_v = None
        best_a = None
        for a in iset.actions:
            seq = Sequence(player, iset.id, a)
            v = sum((weights[z] for z in game.terminals_by_last_sequence(seq)), ZERO)
            v += sum((f_value[j.index] for j in game.children_infosets(seq)), ZERO)
            if best_v is None or v > best_v or (v == best_v and a < best_a):
                best_v, best_a = v, a
        if best_v is None:  # zero-action infosets are rejected by validation
            best_v, best_a = ZERO, ""
        f_value[iset.index] = best_v
        f_choice[iset.index] = best_a
    if at_infoset is None:
        empty = Sequence.empty(player)
        value = sum((weights[z] for z in game.terminals_by_last_sequence(empty)), ZERO)
        value += sum((f_value[j.index] for j in game.top_infosets(player)), ZERO)
        actions = tuple(f_choice[iset.index] for iset in infosets)
        return value, PureStrategy(player, actions)
    value = f_value[at_infoset.index]
    actions = tuple(
        f_choice[iset.index]
        if game.precedes(at_infoset, iset) else min(iset.actions)
        for iset in infosets)
    return value, PureStrategy(player, actions)
