"""Expected and counterfactual utilities, reach, and exact regret gaps.

The gap of a correlated profile under a notion is the worst-case exact gain
any deviation in that notion's class can extract:

* ``efce``  - deviations that stop seeing recommendations once they disobey;
  ordinary regret.
* ``bce``   - deviations that keep seeing local recommendations after
  disobeying; worst counterfactual regret over every (player, infoset).
* ``full-efce`` - the bce deviation class scored by ordinary regret.
* ``nfcce`` - constant deviations (commit to a fixed plan up front).

A profile is an eps-equilibrium for a notion exactly when its gap is <= eps.
All gaps here are computed by exact dynamic programs and are checked against
the definitional brute-force oracle in the test suite.

Counterfactual utility at an infoset weights terminals by chance and by the
*other* players' reach only; chance on the whole root-to-terminal path is
included.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .bestresponse import best_response
from .errors import ResourceGuardError
from .game import Game, Infoset, Node, Sequence
from .rational import format_rational
from .strategy import (MixtureOfProducts, PureProfile, profile_support,
                       pure_reaches_sequence, pure_terminal_reach,
                       reach_vector)
from .witnesses import (ConstantWitness, HistoryPolicyWitness,
                        TriggerCommitWitness, recommendation_history)

ZERO = Fraction(0)
ONE = Fraction(1)

NOTIONS = ("efce", "bce", "full-efce", "nfcce")

DEFAULT_STATE_CAP = 1_000_000
STATE_CAP_ENV = "GT_STATE_CAP"


# -- pure-profile utilities ---------------------------------------------------


def pure_utility(game: Game, profile: PureProfile, player: Union[int, str]) -> Fraction:
    """Expected utility of a pure profile (expectation over chance only)."""
    i = game.player_index(player)
    vectors = [reach_vector(game, ps) for ps in profile.strategies]
    total = ZERO
    for z in game.terminals:
        if all(v[z.index] for v in vectors):
            total += z.payoffs[i] * z.chance_reach
    return total


def counterfactual_utility(game: Game, profile: PureProfile,
                           player: Union[int, str], infoset_id: str) -> Fraction:
    """Utility collected below an infoset, weighting only chance and the
    other players' reach: own play above the infoset is not required."""
    i = game.player_index(player)
    iset = game.infoset(i, infoset_id)
    others = [(j, profile.strategies[j]) for j in range(game.n) if j != i]
    mine = profile.strategies[i]
    total = ZERO
    for z_idx, offset in iset.terminals_below:
        z = game.terminals[z_idx]
        if not pure_terminal_reach(game, mine, z, offset):
            continue
        if all(pure_terminal_reach(game, ps, z) for _, ps in others):
            total += z.payoffs[i] * z.chance_reach
    return total


# -- mixture-level quantities -------------------------------------------------


def _component_reaches(game: Game, comp) -> list[list[Fraction]]:
    """Per player, the component's sequence-form reach of every terminal."""
    out = []
    for mix in comp.strategies:
        row = [ZERO] * len(game.terminals)
        for beta, ps in mix:
            if beta == 0:
                continue
            vec = reach_vector(game, ps)
            for z in range(len(row)):
                if vec[z]:
                    row[z] += beta
        out.append(row)
    return out


def expected_utility(game: Game, pi: MixtureOfProducts,
                     player: Union[int, str]) -> Fraction:
    """E[u_i] under the correlated profile, computed factorized per component
    (never expanding the product support)."""
    i = game.player_index(player)
    total = ZERO
    for comp in pi.components:
        if comp.alpha == 0:
            continue
        rows = _component_reaches(game, comp)
        for z in game.terminals:
            prob = z.chance_reach
            for row in rows:
                prob *= row[z.index]
            total += comp.alpha * z.payoffs[i] * prob
    return total


@dataclass(frozen=True)
class OutcomeDistribution:
    probs: dict[str, Fraction]  # terminal id -> probability

    def to_json_dict(self) -> dict:
        return {zid: format_rational(p) for zid, p in self.probs.items()}


def outcome_distribution(game: Game, pi: MixtureOfProducts) -> OutcomeDistribution:
    probs = {z.terminal_id: ZERO for z in game.terminals}
    for comp in pi.components:
        if comp.alpha == 0:
            continue
        rows = _component_reaches(game, comp)
        for z in game.terminals:
            prob = z.chance_reach
            for row in rows:
                prob *= row[z.index]
            probs[z.terminal_id] += comp.alpha * prob
    assert sum(probs.values(), ZERO) == 1, "outcome probabilities must sum to 1"
    return OutcomeDistribution(probs)


def outcome_equivalent(game: Game, a: MixtureOfProducts, b: MixtureOfProducts) -> bool:
    """Exact equality of the induced terminal distributions."""
    return outcome_distribution(game, a).probs == outcome_distribution(game, b).probs


def counterfactually_outcome_equivalent(game: Game, a: MixtureOfProducts,
                                        b: MixtureOfProducts) -> bool:
    """Equality of E[x_i(z|I) x_{-i}(z)] for every player, infoset and
    terminal below it - a strictly stronger notion than outcome equivalence
    (chance is a common factor and is left out)."""
    for i in range(game.n):
        for iset in game.infosets[i]:
            if _cf_reach_profile(game, a, i, iset) != _cf_reach_profile(game, b, i, iset):
                return False
    return True


def _cf_reach_profile(game: Game, pi: MixtureOfProducts, i: int,
                      iset: Infoset) -> dict[int, Fraction]:
    out = {z_idx: ZERO for z_idx, _ in iset.terminals_below}
    for comp in pi.components:
        if comp.alpha == 0:
            continue
        rows = [_component_reaches(game, comp)[j] for j in range(game.n)]
        # own factor restarted at the infoset: sum_k beta * x_k(z | I)
        for z_idx, offset in iset.terminals_below:
            z = game.terminals[z_idx]
            own = ZERO
            for beta, ps in comp.strategies[i]:
                if beta != 0 and pure_terminal_reach(game, ps, z, offset):
                    own += beta
            val = comp.alpha * own
            for j in range(game.n):
                if j != i:
                    val *= rows[j][z_idx]
            out[z_idx] += val
    return out


@dataclass(frozen=True)
class ConditionalReach:
    """Opponent reach joint with the event that the recommendation plays to a
    sequence: event_mass = P[x_i(sigma) = 1] and, per terminal,
    E[x_{-i}(z) * 1[x_i(sigma) = 1]] (unnormalized, no chance factor)."""

    player: int
    sequence: Sequence
    event_mass: Fraction
    reach: tuple[Fraction, ...]  # indexed by terminal index

    def as_dict(self, game: Game) -> dict[str, Fraction]:
        return {z.terminal_id: self.reach[z.index] for z in game.terminals}


def conditional_reach(game: Game, pi: MixtureOfProducts, player: Union[int, str],
                      seq: Sequence) -> ConditionalReach:
    """Factorized computation; the empty sequence gives the unconditional
    opponent marginal (event mass 1)."""
    i = game.player_index(player)
    nz = len(game.terminals)
    mass = ZERO
    reach = [ZERO] * nz
    for comp in pi.components:
        if comp.alpha == 0:
            continue
        m = sum((beta for beta, ps in comp.strategies[i]
                 if pure_reaches_sequence(game, ps, seq)), ZERO)
        factor = comp.alpha * m
        mass += factor
        if factor == 0:
            continue
        rows = [row for j, row in enumerate(_component_reaches(game, comp)) if j != i]
        for z in range(nz):
            val = factor
            for row in rows:
                val *= row[z]
            reach[z] += val
    return ConditionalReach(i, seq, mass, tuple(reach))


def conditional_node_utility(game: Game, pi: MixtureOfProducts,
                             player: Union[int, str], path) -> Fraction:
    """Expected utility of restarting play at the node addressed by ``path``,
    with everyone (chance included) continuing as sampled. Used to compare
    conditional values inside off-path subtrees."""
    i = game.player_index(player)
    node = game.node_at(tuple(path))
    total = ZERO
    for w, profile in profile_support(pi):
        total += w * _play_from(game, node, profile, i)
    return total


def _play_from(game: Game, node: Node, profile: PureProfile, i: int) -> Fraction:
    if node.kind == "terminal":
        return node.payoffs[i]
    if node.kind == "chance":
        return sum((p * _play_from(game, child, profile, i)
                    for _label, p, child in node.moves), ZERO)
    iset = game.infoset(node.player, node.infoset_id)
    want = profile.strategies[node.player].action_at(iset.index)
    for label, child in node.moves:
        if label == want:
            return _play_from(game, child, profile, i)
    raise AssertionError("strategy names an action missing from the node")


# -- gap reports ---------------------------------------------------------------


@dataclass(frozen=True)
class GapReport:
    notion: str
    overall: Fraction
    per_player: tuple[Fraction, ...]
    per_infoset: Optional[dict[tuple[int, str], Fraction]]
    witness: object

    def to_json_dict(self, game: Game) -> dict:
        d = {"notion": self.notion,
             "gap": format_rational(self.overall),
             "per_player": [format_rational(g) for g in self.per_player]}
        if self.per_infoset is not None:
            nested: dict[str, dict[str, str]] = {}
            for (i, iset_id), g in self.per_infoset.items():
                nested.setdefault(game.players[i], {})[iset_id] = format_rational(g)
            d["per_infoset"] = nested
        d["witness"] = self.witness.to_json_dict(game) if self.witness else None
        return d


def gap(game: Game, pi: MixtureOfProducts, notion: str,
        state_cap: Optional[int] = None) -> GapReport:
    """Exact worst-case regret of ``pi`` under the given notion.

    bce and full-efce enumerate recommendation histories, which is
    exponential in the tree depth in the worst case; they refuse (raising
    :class:`ResourceGuardError`) beyond ``state_cap`` states rather than
    truncate. The cap defaults to the GT_STATE_CAP environment variable or
    1e6.
    """
    game.require_valid()
    pi.validate(game)
    if notion not in NOTIONS:
        raise ValueError(f"unknown notion {notion!r}; choose from {NOTIONS}")
    if state_cap is None:
        state_cap = int(os.environ.get(STATE_CAP_ENV, DEFAULT_STATE_CAP))
    if notion == "efce":
        return _gap_efce(game, pi)
    if notion == "nfcce":
        return _gap_nfcce(game, pi)
    if notion == "bce":
        return _gap_bce(game, pi, state_cap)
    return _gap_full_efce(game, pi, state_cap)


def _weights(game: Game, i: int, reach) -> list[Fraction]:
    return [z.payoffs[i] * z.chance_reach * reach[z.index] for z in game.terminals]


def _gap_nfcce(game: Game, pi: MixtureOfProducts) -> GapReport:
    # the constant class does not contain the identity, so the best constant
    # can lose to obedience; the gap is clamped at 0 (no deviation gains)
    gaps = []
    witnesses = []
    for i in range(game.n):
        cr = conditional_reach(game, pi, i, Sequence.empty(i))
        value, strat = best_response(game, i, _weights(game, i, cr.reach))
        gaps.append(max(ZERO, value - expected_utility(game, pi, i)))
        witnesses.append(ConstantWitness(i, strat))
    best = max(range(game.n), key=lambda i: (gaps[i], -i))
    return GapReport("nfcce", gaps[best], tuple(gaps), None, witnesses[best])


def _gap_efce(game: Game, pi: MixtureOfProducts) -> GapReport:
    """Obedient-walk dynamic program.

    A deviation in this class learns nothing new after its first disobedient
    action, so its play from a trigger state (infoset, recommended action)
    onward may as well be the best fixed continuation against the opponents'
    reach conditioned on that state. The walk therefore chooses, at every
    recommendation state, between committing to that best response and
    obeying one more step; a commit before the first recommendation (the
    empty trigger) is included as the root option.
    """
    gaps = []
    witnesses = []
    for i in range(game.n):
        eu = expected_utility(game, pi, i)
        cr0 = conditional_reach(game, pi, i, Sequence.empty(i))
        w0 = _weights(game, i, cr0.reach)
        t0, s0 = best_response(game, i, w0)

        def walk(seq: Sequence) -> tuple[Fraction, list]:
            cr = conditional_reach(game, pi, i, seq)
            if cr.event_mass == 0:
                return ZERO, []
            w = _weights(game, i, cr.reach)
            iset = game.infoset(i, seq.infoset)
            t_val, t_strat = best_response(game, i, w, iset)
            obey = sum((w[z] for z in game.terminals_by_last_sequence(seq)), ZERO)
            commits: list = []
            for child in game.children_infosets(seq):
                for b in child.actions:
                    v, c = walk(Sequence(i, child.id, b))
                    obey += v
                    commits.extend(c)
            if t_val > obey:
                return t_val, [(seq, t_strat)]
            return obey, commits

        empty = Sequence.empty(i)
        ob0 = sum((w0[z] for z in game.terminals_by_last_sequence(empty)), ZERO)
        commits0: list = []
        for top in game.top_infosets(i):
            for b in top.actions:
                v, c = walk(Sequence(i, top.id, b))
                ob0 += v
                commits0.extend(c)
        if t0 > ob0:
            value, commits = t0, [(empty, s0)]
        else:
            value, commits = ob0, commits0
        gaps.append(value - eu)
        witnesses.append(TriggerCommitWitness(i, tuple(commits)))
    best = max(range(game.n), key=lambda i: (gaps[i], -i))
    return GapReport("efce", gaps[best], tuple(gaps), None, witnesses[best])


class _StateBudget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.cap:
            raise ResourceGuardError(
                f"recommendation-history state count exceeded the cap of {self.cap}; "
                f"raise it via the {STATE_CAP_ENV} environment variable or state_cap=")


def _descend(game: Game, node: Node, om: Fraction, profile: PureProfile, i: int,
             sink: dict, consts: list):
    """Route one support element downward until the deviator must act.

    Terminal mass lands in ``consts``; own decision nodes are grouped in
    ``sink`` by (infoset index, recommendation history)."""
    if node.kind == "terminal":
        consts.append(om * node.payoffs[i])
        return
    if node.kind == "chance":
        for _label, p, child in node.moves:
            if p != 0:
                _descend(game, child, om * p, profile, i, sink, consts)
        return
    if node.player != i:
        iset = game.infoset(node.player, node.infoset_id)
        want = profile.strategies[node.player].action_at(iset.index)
        for label, child in node.moves:
            if label == want:
                _descend(game, child, om, profile, i, sink, consts)
                return
        raise AssertionError("opponent strategy names a missing action")
    iset = game.infoset(i, node.infoset_id)
    hist = recommendation_history(game, profile.strategies[i], iset.id)
    sink.setdefault((iset.index, hist), []).append((node, om, profile))


def _deviation_value(game: Game, i: int, entries, budget: _StateBudget,
                     policy_out: list) -> Fraction:
    """Optimal value for a deviator who distinguishes elements only through
    the recommendation history at each of its infosets.

    ``entries`` maps (infoset index, history) to arrival bundles. States form
    a forest: each is reachable by a unique own-action chain, so a single
    top-down pass maximizes exactly.
    """
    total = ZERO
    for (iset_index, hist), bundle in entries.items():
        total += _dp_state(game, i, game.infosets[i][iset_index], hist, bundle,
                           budget, policy_out)
    return total


def _dp_state(game: Game, i: int, iset: Infoset, hist, bundle, budget: _StateBudget,
              policy_out: list) -> Fraction:
    budget.spend()
    best_val = None
    best_a = None
    best_entries = None
    for a in iset.actions:
        consts: list[Fraction] = []
        sink: dict = {}
        for node, om, profile in bundle:
            for label, child in node.moves:
                if label == a:
                    _descend(game, child, om, profile, i, sink, consts)
                    break
        val = sum(consts, ZERO)
        sub_policy: list = []
        for (idx2, hist2), bundle2 in sink.items():
            val += _dp_state(game, i, game.infosets[i][idx2], hist2, bundle2,
                             budget, sub_policy)
        if best_val is None or val > best_val or (val == best_val and a < best_a):
            best_val, best_a, best_entries = val, a, sub_policy
    policy_out.extend(best_entries)
    policy_out.append((iset.id, hist, best_a))
    return best_val


def _arrival(game: Game, h0: Node, profile: PureProfile, i: int) -> Fraction:
    """Chance times opponents' reach of a node; the player's own actions
    above it are not required (counterfactual arrival)."""
    om = ONE
    child = h0
    cur = h0.parent
    while cur is not None:
        label = child.path[len(cur.path)]
        if cur.kind == "chance":
            for lab, p, _c in cur.moves:
                if lab == label:
                    om *= p
                    break
        elif cur.player != i:
            iset = game.infoset(cur.player, cur.infoset_id)
            if profile.strategies[cur.player].action_at(iset.index) != label:
                return ZERO
        child = cur
        cur = cur.parent
    return om


def _gap_bce(game: Game, pi: MixtureOfProducts, state_cap: int) -> GapReport:
    """Per (player, infoset): maximize counterfactual utility over deviations
    that see the full local-recommendation history, then subtract the
    profile's own counterfactual utility there."""
    support = list(profile_support(pi))
    budget = _StateBudget(state_cap)
    per_infoset: dict[tuple[int, str], Fraction] = {}
    per_player = []
    witnesses = []
    for i in range(game.n):
        player_best = ZERO  # identity achieves 0 at every infoset
        player_witness = HistoryPolicyWitness(i, ())
        for iset in game.infosets[i]:
            entries: dict = {}
            for w, profile in support:
                hist = recommendation_history(game, profile.strategies[i], iset.id)
                for h0 in iset.nodes:
                    om = w * _arrival(game, h0, profile, i)
                    if om != 0:
                        entries.setdefault((iset.index, hist), []).append(
                            (h0, om, profile))
            policy: list = []
            value = _deviation_value(game, i, entries, budget, policy)
            baseline = sum((w * counterfactual_utility(game, profile, i, iset.id)
                            for w, profile in support), ZERO)
            g = value - baseline
            per_infoset[(i, iset.id)] = g
            if g > player_best:
                player_best = g
                player_witness = HistoryPolicyWitness(i, tuple(policy), iset.id)
        per_player.append(player_best)
        witnesses.append(player_witness)
    best = max(range(game.n), key=lambda i: (per_player[i], -i))
    return GapReport("bce", per_player[best], tuple(per_player), per_infoset,
                     witnesses[best])


def _gap_full_efce(game: Game, pi: MixtureOfProducts, state_cap: int) -> GapReport:
    """Ordinary regret against the history-seeing deviation class: one walk
    from the root instead of a per-infoset counterfactual."""
    support = list(profile_support(pi))
    budget = _StateBudget(state_cap)
    gaps = []
    witnesses = []
    for i in range(game.n):
        consts: list[Fraction] = []
        entries: dict = {}
        for w, profile in support:
            _descend(game, game.root, w, profile, i, entries, consts)
        policy: list = []
        value = sum(consts, ZERO) + _deviation_value(game, i, entries, budget, policy)
        gaps.append(value - expected_utility(game, pi, i))
        witnesses.append(HistoryPolicyWitness(i, tuple(policy)))
    best = max(range(game.n), key=lambda i: (gaps[i], -i))
    return GapReport("full-efce", gaps[best], tuple(gaps), None, witnesses[best])
