"""Strategy representations and the behavior-to-mixture decomposition.

Four layers, all exact:

* :class:`PureStrategy` - one action per infoset of a player.
* :class:`BehaviorStrategy` - an independent local distribution per infoset.
* :class:`SequenceFormVector` - reach probabilities over a player's
  sequences, the convex polytope with reach(empty) = 1 and per-infoset flow
  conservation.
* :class:`MixtureOfProducts` - a correlated profile written as a convex
  combination of product distributions, each factor itself a small convex
  combination of pure strategies.

:func:`decompose` writes any sequence-form vector as a convex combination of
at most ``|sequences|`` pure strategies by greedy flow extraction, which is
what lets behavior-strategy profiles enter the mixture format without an
exponential blowup.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence as Seq, Union

from .errors import ProfileError, ProfileParseError
from .game import Game, Sequence, TerminalNode
from .rational import format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class PureStrategy:
    """A deterministic plan: the k-th entry is the action at the player's
    k-th infoset (discovery order). Hashable so it can key tables."""

    player: int
    actions: tuple[str, ...]

    def action_at(self, infoset_index: int) -> str:
        return self.actions[infoset_index]

    def assignment(self, game: Game) -> dict[str, str]:
        return {iset.id: a for iset, a in zip(game.infosets[self.player], self.actions)}

    def replace(self, infoset_index: int, action: str) -> "PureStrategy":
        acts = list(self.actions)
        acts[infoset_index] = action
        return PureStrategy(self.player, tuple(acts))


@dataclass(frozen=True)
class PureProfile:
    """One pure strategy per player, in player order."""

    strategies: tuple[PureStrategy, ...]

    def __getitem__(self, i: int) -> PureStrategy:
        return self.strategies[i]


class BehaviorStrategy:
    """Independent randomization per infoset; each local distribution is a
    map action -> Fraction summing to exactly 1."""

    def __init__(self, player: int, locals_: dict[str, dict[str, Fraction]]):
        self.player = player
        self.locals = locals_

    def local(self, infoset_id: str) -> dict[str, Fraction]:
        return self.locals[infoset_id]

    def validate(self, game: Game):
        i = self.player
        expected = {iset.id for iset in game.infosets[i]}
        if set(self.locals) != expected:
            missing = expected - set(self.locals)
            extra = set(self.locals) - expected
            raise ProfileError(
                f"behavior strategy for {game.players[i]} must cover every infoset"
                + (f"; missing {sorted(missing)}" if missing else "")
                + (f"; unknown {sorted(extra)}" if extra else ""))
        for iset in game.infosets[i]:
            dist = self.locals[iset.id]
            bad = set(dist) - set(iset.actions)
            if bad:
                raise ProfileError(f"infoset {iset.id!r} has no action {sorted(bad)}")
            total = sum(dist.values(), ZERO)
            if total != 1:
                raise ProfileError(
                    f"local distribution at {iset.id!r} sums to {format_rational(total)}")
            if any(p < 0 for p in dist.values()):
                raise ProfileError(f"negative probability at {iset.id!r}")


@dataclass(frozen=True)
class SequenceFormVector:
    """Reach probabilities over one player's sequences."""

    player: int
    reach: dict[Sequence, Fraction]

    def validate(self, game: Game):
        i = self.player
        empty = Sequence.empty(i)
        if self.reach.get(empty) != 1:
            raise ProfileError("sequence-form vector must have reach 1 at the empty sequence")
        for seq in game.sequences(i):
            if self.reach.get(seq, ZERO) < 0:
                raise ProfileError(f"negative reach at {seq.label()}")
        for iset in game.infosets[i]:
            inflow = self.reach.get(iset.parent_seq, ZERO)
            outflow = sum((self.reach.get(Sequence(i, iset.id, a), ZERO)
                           for a in iset.actions), ZERO)
            if inflow != outflow:
                raise ProfileError(
                    f"flow violated at infoset {iset.id!r}: in {format_rational(inflow)}, "
                    f"out {format_rational(outflow)}")


@dataclass(frozen=True)
class MixtureComponent:
    alpha: Fraction
    # per player: tuple of (beta, PureStrategy)
    strategies: tuple[tuple[tuple[Fraction, PureStrategy], ...], ...]


@dataclass(frozen=True)
class MixtureOfProducts:
    """A correlated profile sum_t alpha_t (x) prod_i sum_k beta_tik x_tik."""

    components: tuple[MixtureComponent, ...]

    def validate(self, game: Game):
        total = sum((c.alpha for c in self.components), ZERO)
        if total != 1:
            raise ProfileError(f"component weights sum to {format_rational(total)}, not 1")
        for t, c in enumerate(self.components):
            if c.alpha < 0:
                raise ProfileError(f"component {t} has negative weight")
            if len(c.strategies) != game.n:
                raise ProfileError(f"component {t} covers {len(c.strategies)} players, "
                                   f"game has {game.n}")
            for i, mix in enumerate(c.strategies):
                bsum = sum((b for b, _ in mix), ZERO)
                if bsum != 1:
                    raise ProfileError(
                        f"component {t}, player {game.players[i]}: strategy weights sum "
                        f"to {format_rational(bsum)}")
                for b, ps in mix:
                    if b < 0:
                        raise ProfileError(f"component {t} has a negative strategy weight")
                    if ps.player != i or len(ps.actions) != len(game.infosets[i]):
                        raise ProfileError(
                            f"component {t} holds a strategy that is not a total plan "
                            f"for player {game.players[i]}")
                    for iset, a in zip(game.infosets[i], ps.actions):
                        if a not in iset.actions:
                            raise ProfileError(
                                f"infoset {iset.id!r} has no action {a!r}")


# -- reach indicators --------------------------------------------------------


def pure_reaches_sequence(game: Game, ps: PureStrategy, seq: Sequence) -> bool:
    """x_i(sigma): does the plan play every own action leading to ``seq``?"""
    if seq.is_empty:
        return True
    iset = game.infoset(seq.player, seq.infoset)
    if ps.action_at(iset.index) != seq.action:
        return False
    for j_id, a in iset.own_history:
        j = game.infoset(seq.player, j_id)
        if ps.action_at(j.index) != a:
            return False
    return True


def pure_reaches_infoset(game: Game, ps: PureStrategy, infoset_id: str) -> bool:
    iset = game.infoset(ps.player, infoset_id)
    for j_id, a in iset.own_history:
        j = game.infoset(ps.player, j_id)
        if ps.action_at(j.index) != a:
            return False
    return True


def pure_terminal_reach(game: Game, ps: PureStrategy, z: TerminalNode,
                        offset: int = 0) -> bool:
    """x_i(z) for offset 0, or x_i(z | I) when ``offset`` marks where the
    infoset's own pair sits on z's path."""
    return all(ps.actions[idx] == a for idx, a in z.own_pairs[ps.player][offset:])


def reach_vector(game: Game, ps: PureStrategy) -> tuple[bool, ...]:
    """Terminal-indexed x_i(z) indicators, cached per game."""
    cache = getattr(game, "_reach_cache", None)
    if cache is None:
        cache = {}
        setattr(game, "_reach_cache", cache)
    hit = cache.get(ps)
    if hit is None:
        hit = tuple(pure_terminal_reach(game, ps, z) for z in game.terminals)
        cache[ps] = hit
    return hit


# -- sequence form and decomposition ----------------------------------------


def sequence_form(game: Game,
                  strategy: Union[PureStrategy, BehaviorStrategy]) -> SequenceFormVector:
    """Reach probabilities of every sequence under the given plan."""
    game.require_valid()
    i = strategy.player
    reach: dict[Sequence, Fraction] = {Sequence.empty(i): ONE}
    for iset in game.infosets[i]:
        inflow = reach[iset.parent_seq]
        for a in iset.actions:
            if isinstance(strategy, PureStrategy):
                p = ONE if strategy.action_at(iset.index) == a else ZERO
            else:
                p = strategy.local(iset.id).get(a, ZERO)
            reach[Sequence(i, iset.id, a)] = inflow * p
    return SequenceFormVector(i, reach)


def decompose(game: Game, v: SequenceFormVector,
              _trace: Optional[list] = None) -> list[tuple[Fraction, PureStrategy]]:
    """Write ``v`` exactly as sum_k beta_k * sequence_form(x_k).

    Greedy flow extraction: trace a pure plan through the lexicographically
    first action with positive residual mass at each reachable infoset
    (lexicographically first action outright at unreachable ones), subtract
    the largest feasible coefficient, repeat. Each round zeroes at least one
    residual coordinate, so k <= |sequences| and the output is deterministic.

    ``_trace``, when a list, collects the residual nonzero-coordinate count
    after each round (used by tests as a termination certificate).
    """
    game.require_valid()
    v.validate(game)
    i = v.player
    empty = Sequence.empty(i)
    residual = {seq: v.reach.get(seq, ZERO) for seq in game.sequences(i)}
    out: list[tuple[Fraction, PureStrategy]] = []
    rounds = 0
    while residual[empty] > 0:
        rounds += 1
        if rounds > len(residual) + 1:
            raise AssertionError("greedy decomposition failed to terminate")
        chosen = {empty}
        actions: list[str] = []
        for iset in game.infosets[i]:
            if iset.parent_seq in chosen:
                a = min(a for a in iset.actions
                        if residual[Sequence(i, iset.id, a)] > 0)
                chosen.add(Sequence(i, iset.id, a))
            else:
                a = min(iset.actions)
            actions.append(a)
        beta = min(residual[s] for s in chosen)
        for s in chosen:
            residual[s] -= beta
        out.append((beta, PureStrategy(i, tuple(actions))))
        if _trace is not None:
            _trace.append(sum(1 for q in residual.values() if q != 0))
    if any(q != 0 for q in residual.values()):
        raise AssertionError("greedy decomposition left residual mass off the root")
    return out


def behavior_product_expansion(game: Game, b: BehaviorStrategy,
                               cap: int = 100_000) -> list[tuple[Fraction, PureStrategy]]:
    """The mixed strategy a behavior strategy literally denotes: every pure
    plan with positive product probability. Can be exponentially large in the
    number of infosets, hence the cap; :func:`decompose` is the compact,
    outcome-equivalent alternative."""
    from .errors import ResourceGuardError
    b.validate(game)
    i = b.player
    choices = []
    count = 1
    for iset in game.infosets[i]:
        local = [(a, p) for a, p in b.local(iset.id).items() if p > 0]
        local.sort()
        count *= len(local)
        if count > cap:
            raise ResourceGuardError(
                f"behavior strategy for {game.players[i]} expands to more than "
                f"{cap} pure plans; decompose it instead")
        choices.append(local)
    out = []
    for combo in itertools.product(*choices):
        prob = ONE
        for _a, p in combo:
            prob *= p
        out.append((prob, PureStrategy(i, tuple(a for a, _p in combo))))
    return out


def _behavior_components(game: Game,
                         components: Seq[tuple[Fraction, Seq[BehaviorStrategy]]],
                         per_strategy) -> MixtureOfProducts:
    total = sum((alpha for alpha, _ in components), ZERO)
    if total != 1:
        raise ProfileError(f"component weights sum to {format_rational(total)}, not 1")
    built = []
    for alpha, behaviors in components:
        if len(behaviors) != game.n:
            raise ProfileError("each component needs one behavior strategy per player")
        per_player = []
        for i, b in enumerate(behaviors):
            if b.player != i:
                raise ProfileError("behavior strategies must be listed in player order")
            b.validate(game)
            per_player.append(tuple(per_strategy(b)))
        built.append(MixtureComponent(alpha, tuple(per_player)))
    mixture = MixtureOfProducts(tuple(built))
    mixture.validate(game)
    return mixture


def mixture_from_behavior_products(
        game: Game,
        components: Seq[tuple[Fraction, Seq[BehaviorStrategy]]]) -> MixtureOfProducts:
    """Convert weighted behavior-strategy products into a mixture of
    small-support products via :func:`decompose`.

    Each factor keeps its sequence-form marginals, so the outcome
    distribution and the causal gap are preserved; the joint recommendation
    pattern is not (that is the point of the small support), so
    counterfactual gaps may differ from the literal product profile - use
    :func:`expand_behavior_products` for the faithful distribution.
    """
    return _behavior_components(
        game, components, lambda b: decompose(game, sequence_form(game, b)))


def expand_behavior_products(
        game: Game,
        components: Seq[tuple[Fraction, Seq[BehaviorStrategy]]]) -> MixtureOfProducts:
    """The distribution the behavior products literally denote (full product
    expansion per player; exponential worst case, desk scale only)."""
    return _behavior_components(
        game, components, lambda b: behavior_product_expansion(game, b))


def pure_mixture(game: Game,
                 entries: Seq[tuple[Fraction, PureProfile]]) -> MixtureOfProducts:
    """The K = 1 special case: a plain distribution over pure profiles."""
    comps = tuple(
        MixtureComponent(w, tuple(((ONE, ps),) for ps in profile.strategies))
        for w, profile in entries)
    mixture = MixtureOfProducts(comps)
    mixture.validate(game)
    return mixture


def profile_support(pi: MixtureOfProducts) -> Iterator[tuple[Fraction, PureProfile]]:
    """Enumerate the support as (weight, pure profile) pairs.

    Weight is alpha_t * prod_i beta_tik; zero-weight entries are skipped, so
    the yielded weights still sum to 1. Size is T * prod_i K_i - meant for
    desk-scale games only.
    """
    for comp in pi.components:
        if comp.alpha == 0:
            continue
        for combo in itertools.product(*comp.strategies):
            w = comp.alpha
            for beta, _ in combo:
                w *= beta
            if w == 0:
                continue
            yield w, PureProfile(tuple(ps for _, ps in combo))


# -- profile documents --------------------------------------------------------
#
# Mixture schema:
#   {"components": [{"alpha": "p/q",
#                    "strategies": [[{"beta": "p/q",
#                                     "actions": {infoset: action, ...}}, ...]
#                                   per player]}]}
# Behavior schema (auto-detected by the "behaviors" key, converted through
# mixture_from_behavior_products):
#   {"components": [{"alpha": "p/q",
#                    "behaviors": [{infoset: {action: "p/q", ...}, ...}
#                                  per player]}]}


def parse_profile(game: Game, text: str,
                  behavior_mode: str = "expand") -> MixtureOfProducts:
    """Parse either profile schema and validate it against ``game``.

    Behavior-schema documents denote product distributions; ``behavior_mode``
    picks their mixture representation: "expand" (default) keeps the literal
    distribution, "decompose" applies the small-support decomposition, which
    preserves outcomes and the causal gap but not counterfactual gaps.
    """
    game.require_valid()
    if behavior_mode not in ("expand", "decompose"):
        raise ValueError("behavior_mode must be 'expand' or 'decompose'")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProfileParseError(
            f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from e
    if not isinstance(doc, dict) or not isinstance(doc.get("components"), list) \
            or not doc["components"]:
        raise ProfileParseError("profile must be an object with a non-empty "
                                "\"components\" list")
    kinds = {("behaviors" if "behaviors" in c else "strategies")
             for c in doc["components"] if isinstance(c, dict)}
    if kinds == {"behaviors"}:
        return _parse_behavior_profile(game, doc, behavior_mode)
    if kinds == {"strategies"}:
        return _parse_mixture_profile(game, doc)
    raise ProfileParseError("each component needs either \"strategies\" or \"behaviors\" "
                            "(not a mix)")


def _rat(value, where):
    try:
        return parse_rational(value)
    except ValueError as e:
        raise ProfileParseError(str(e), where) from e


def _parse_mixture_profile(game: Game, doc) -> MixtureOfProducts:
    comps = []
    for t, c in enumerate(doc["components"]):
        where = f"components/{t}"
        if not isinstance(c, dict) or "alpha" not in c:
            raise ProfileParseError("component needs \"alpha\"", where)
        alpha = _rat(c["alpha"], f"{where}/alpha")
        strategies = c.get("strategies")
        if not isinstance(strategies, list) or len(strategies) != game.n:
            raise ProfileParseError(
                f"\"strategies\" must list one entry per player ({game.n})", where)
        per_player = []
        for i, mix in enumerate(strategies):
            if not isinstance(mix, list) or not mix:
                raise ProfileParseError("player entry must be a non-empty list",
                                        f"{where}/strategies/{i}")
            pairs = []
            for k, item in enumerate(mix):
                sub = f"{where}/strategies/{i}/{k}"
                if not isinstance(item, dict) or "beta" not in item \
                        or not isinstance(item.get("actions"), dict):
                    raise ProfileParseError("entry needs \"beta\" and \"actions\"", sub)
                beta = _rat(item["beta"], f"{sub}/beta")
                pairs.append((beta, _pure_from_mapping(game, i, item["actions"])))
            per_player.append(tuple(pairs))
        comps.append(MixtureComponent(alpha, tuple(per_player)))
    pi = MixtureOfProducts(tuple(comps))
    pi.validate(game)
    return pi


def _parse_behavior_profile(game: Game, doc, behavior_mode: str) -> MixtureOfProducts:
    items = []
    for t, c in enumerate(doc["components"]):
        where = f"components/{t}"
        if not isinstance(c, dict) or "alpha" not in c:
            raise ProfileParseError("component needs \"alpha\"", where)
        alpha = _rat(c["alpha"], f"{where}/alpha")
        behaviors = c.get("behaviors")
        if not isinstance(behaviors, list) or len(behaviors) != game.n:
            raise ProfileParseError(
                f"\"behaviors\" must list one entry per player ({game.n})", where)
        per_player = []
        for i, spec in enumerate(behaviors):
            if not isinstance(spec, dict):
                raise ProfileParseError("behavior entry must map infosets to "
                                        "distributions", f"{where}/behaviors/{i}")
            locals_ = {}
            for iset_id, dist in spec.items():
                if not isinstance(dist, dict):
                    raise ProfileParseError("distribution must be an object",
                                            f"{where}/behaviors/{i}/{iset_id}")
                locals_[iset_id] = {a: _rat(p, f"{where}/behaviors/{i}/{iset_id}/{a}")
                                    for a, p in dist.items()}
            per_player.append(BehaviorStrategy(i, locals_))
        items.append((alpha, per_player))
    if behavior_mode == "decompose":
        return mixture_from_behavior_products(game, items)
    return expand_behavior_products(game, items)


def _pure_from_mapping(game: Game, player: int, mapping: dict) -> PureStrategy:
    actions = []
    seen = set(mapping)
    for iset in game.infosets[player]:
        if iset.id not in mapping:
            raise ProfileError(
                f"strategy for {game.players[player]} misses infoset {iset.id!r}")
        a = mapping[iset.id]
        if a not in iset.actions:
            raise ProfileError(f"infoset {iset.id!r} has no action {a!r}")
        actions.append(a)
        seen.discard(iset.id)
    if seen:
        raise ProfileError(
            f"strategy for {game.players[player]} names unknown infosets {sorted(seen)}")
    return PureStrategy(player, tuple(actions))


def pure_strategy(game: Game, player: Union[int, str],
                  mapping: dict[str, str]) -> PureStrategy:
    """Build a validated pure strategy from an infoset-to-action mapping."""
    return _pure_from_mapping(game, game.player_index(player), mapping)


def serialize_profile(game: Game, pi: MixtureOfProducts) -> str:
    doc = {"components": [
        {"alpha": format_rational(c.alpha),
         "strategies": [
             [{"beta": format_rational(beta), "actions": ps.assignment(game)}
              for beta, ps in mix]
             for mix in c.strategies]}
        for c in pi.components]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
